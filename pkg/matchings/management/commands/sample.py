"""
Management command to draw random matchings of a hypergraph.
"""

from matchings.management.base import HypermatchCommand
from matchings.sampling import glauber_chain, sample_matchings
from matchings.services import CommandResult


class Command(HypermatchCommand):
    help = 'Draw uniform random matchings exactly or with the Glauber chain'

    def add_command_arguments(self, parser):
        parser.add_argument('graph', type=str, help='Hypergraph file (text or JSON)')
        method = parser.add_mutually_exclusive_group()
        method.add_argument('--exact', action='store_true', help='Exact self-reducible sampler (default)')
        method.add_argument('--glauber', action='store_true', help='Lazy Glauber chain')
        parser.add_argument('--samples', type=int, default=10, help='Number of matchings to draw')
        parser.add_argument('--steps', type=int, default=100_000, help='Glauber steps')
        parser.add_argument('--seed', type=int, required=True, help='Random seed')
        parser.add_argument('--budget', type=int, default=None, help='Recursion node budget')

    def run(self, **options):
        graph = self.load_graph(options['graph'])
        if options['glauber']:
            method = 'glauber'
            matchings = glauber_chain(graph, options['steps'], options['samples'], options['seed'])
        else:
            method = 'exact'
            matchings = sample_matchings(graph, options['samples'], options['seed'], options['budget'])
        drawn = [sorted(matching.edges) for matching in matchings]
        rows = [
            {'sample': i, 'size': len(edges), 'edges': ' '.join(str(e) for e in edges)}
            for i, edges in enumerate(drawn)
        ]
        payload = {'method': method, 'seed': options['seed'], 'samples': drawn}
        return CommandResult(payload=payload, rows=rows, columns=('sample', 'size', 'edges'))
