"""
Management command to generate hypergraph constructions.
"""

from matchings.constructions import (
    ExtendableGraph, counterexample_graph, counterexample_stats, extendable_recursive, extendable_search,
    regular_linear, tower_build, tower_stats,
)
from matchings.exceptions import ConstructionError
from matchings.management.base import HypermatchCommand, fraction
from matchings.services import CommandResult, head_probability


class Command(HypermatchCommand):
    help = 'Generate regular, extendable, tower and counterexample hypergraphs'

    formats = ('text', 'json', 'table')

    def add_command_arguments(self, parser):
        parser.add_argument(
            'construction',
            choices=['regular', 'extendable-search', 'extendable-paper', 'tower', 'counterexample'],
            help='Which construction to build',
        )
        parser.add_argument('--k', type=int, default=3, help='Uniformity')
        parser.add_argument('--d', type=int, default=None, help='Degree parameter')
        parser.add_argument('--ell', type=int, default=1, help='Recursion depth for extendable-paper')
        parser.add_argument('--max-n', type=int, default=12, help='Largest vertex count for extendable-search')
        parser.add_argument('--levels', type=int, default=1, help='Tower levels (or 2l+1 for counterexample)')
        parser.add_argument(
            '--input',
            type=str,
            default=None,
            help="Base graph file; its vertex labeled 'head' is the head",
        )
        parser.add_argument(
            '--loose',
            action='store_true',
            help='Allow a tower base that is not d-extendable',
        )
        parser.add_argument(
            '--stats',
            action='store_true',
            help='Emit exact head-probability statistics instead of the graph',
        )
        parser.add_argument('--p0', type=fraction, default=None, help='Base head probability for --stats')
        parser.add_argument('--p', type=fraction, default=None, help='Head probability of H0 for counterexample')
        parser.add_argument('--epsilon', type=fraction, default=fraction('1/10'), help='Slack in the gap checks')

    def default_format(self, result):
        return 'text' if result.graph is not None else 'json'

    def _require_d(self, options):
        if options['d'] is None:
            raise self.usage_error(f"gen {options['construction']} needs --d")
        return options['d']

    def _base(self, options) -> ExtendableGraph:
        if options['input']:
            graph = self.load_graph(options['input'])
            heads = graph.vertices_labeled('head')
            if len(heads) != 1:
                raise ConstructionError("Base graph needs exactly one vertex labeled 'head'")
            return ExtendableGraph(graph, heads[0], self._require_d(options))
        return extendable_search(options['k'], self._require_d(options), options['max_n'])

    def run(self, **options):
        construction = options['construction']
        k = options['k']

        if construction == 'regular':
            graph = regular_linear(k, self._require_d(options))
            return CommandResult(payload={}, graph=graph)

        if construction == 'extendable-search':
            built = extendable_search(k, self._require_d(options), options['max_n'])
            return CommandResult(payload={}, graph=built.graph)

        if construction == 'extendable-paper':
            built = extendable_recursive(k, options['ell'])
            return CommandResult(payload={}, graph=built.graph)

        if construction == 'tower':
            if options['stats']:
                if options['p0'] is None:
                    raise self.usage_error("gen tower --stats needs --p0")
                stats = tower_stats(k, self._require_d(options), options['p0'], options['levels'])
                return CommandResult(payload=stats.as_dict())
            built = tower_build(self._base(options), options['levels'], strict=not options['loose'])
            return CommandResult(payload={}, graph=built.graph)

        # counterexample
        d = self._require_d(options)
        if options['input']:
            return CommandResult(payload={}, graph=counterexample_graph(self._base(options), d))
        p = options['p']
        if p is None:
            if options['p0'] is None:
                raise self.usage_error("gen counterexample needs --input, --p or --p0")
            p = head_probability(k, d, options['p0'], options['levels']).head_probability
        stats = counterexample_stats(k, d, p, options['epsilon'], level=options['levels'])
        return CommandResult(payload=stats.as_dict())
