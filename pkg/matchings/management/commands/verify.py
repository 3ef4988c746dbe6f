"""
Management command to run the exact identity checks on a hypergraph or a corpus.
"""

from matchings.management.base import HypermatchCommand, vertex_list
from matchings.services import (
    verify_bounds_suite, verify_chain_suite, verify_godsil_suite, verify_identity_suite,
)


class Command(HypermatchCommand):
    help = 'Verify walk-tree, polynomial, chain-rule and regular-graph bound identities'

    def add_command_arguments(self, parser):
        parser.add_argument(
            'check',
            choices=['godsil', 'identity', 'chain', 'bounds'],
            help='Which identity to check',
        )
        parser.add_argument('graph', type=str, nargs='?', default=None, help='Hypergraph file (text or JSON)')
        parser.add_argument(
            '--corpus',
            choices=['linear3', 'atlas', 'random', 'regular'],
            default=None,
            help='Check every instance of a named corpus instead of a file',
        )
        parser.add_argument('--root', type=vertex_list, default=None, help='Roots for godsil (default: all)')
        parser.add_argument('--orders', type=int, default=5, help='Orderings per root for godsil')
        parser.add_argument('--seed', type=int, default=0, help='Seed for the shuffled orderings')
        parser.add_argument('--d', type=int, default=None, help='Regular degree for bounds')
        parser.add_argument('--max-nodes', type=int, default=None, help='Walk-tree node limit')
        parser.add_argument('--budget', type=int, default=None, help='Recursion node budget')

    def run(self, **options):
        if (options['graph'] is None) == (options['corpus'] is None):
            raise self.usage_error("Give exactly one of a hypergraph file or --corpus")
        graph = self.load_graph(options['graph'])
        corpus = options['corpus']
        check = options['check']

        if check == 'godsil':
            return verify_godsil_suite(
                graph, corpus, roots=options['root'], orders=options['orders'], seed=options['seed'],
                max_nodes=options['max_nodes'], budget=options['budget'],
            )
        if check == 'identity':
            return verify_identity_suite(graph, corpus, budget=options['budget'])
        if check == 'chain':
            return verify_chain_suite(graph, corpus, budget=options['budget'])
        return verify_bounds_suite(graph, corpus, d=options['d'], budget=options['budget'])
