"""
Management command to compute the probability that a uniform matching avoids vertices.
"""

from matchings.management.base import HypermatchCommand, vertex_list
from matchings.services import estimate_probability


class Command(HypermatchCommand):
    help = 'Probability that a uniform random matching covers none of the --avoid vertices'

    def add_command_arguments(self, parser):
        parser.add_argument('graph', type=str, help='Hypergraph file (text or JSON)')
        parser.add_argument('--avoid', type=vertex_list, required=True, help='Vertices to avoid, e.g. 0,3')
        parser.add_argument('--given', type=vertex_list, default=[], help='Vertices conditioned uncovered')
        parser.add_argument(
            '--method',
            choices=['brute', 'recursion', 'walktree', 'montecarlo'],
            default='brute',
            help='Evaluation method',
        )
        parser.add_argument('--order', type=vertex_list, default=None, help='Vertex ordering as a permutation')
        parser.add_argument('--budget', type=int, default=None, help='Recursion node budget')
        parser.add_argument('--max-nodes', type=int, default=None, help='Walk-tree node limit')
        parser.add_argument('--steps', type=int, default=100_000, help='Glauber steps for montecarlo')
        parser.add_argument('--samples', type=int, default=10_000, help='Recorded Glauber states')
        parser.add_argument('--seed', type=int, default=None, help='Random seed (required for montecarlo)')

    def run(self, **options):
        if options['method'] == 'montecarlo' and options['seed'] is None:
            raise self.usage_error("--method montecarlo needs --seed")
        graph = self.load_graph(options['graph'])
        return estimate_probability(
            graph,
            options['avoid'],
            options['given'],
            method=options['method'],
            order=self.ordering(graph, options['order']),
            budget=options['budget'],
            max_nodes=options['max_nodes'],
            steps=options['steps'],
            samples=options['samples'],
            seed=options['seed'],
        )
