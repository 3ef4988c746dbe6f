"""
Management command to count the matchings of a hypergraph.
"""

from matchings.counting import avg_matching_size, match_coeffs
from matchings.management.base import HypermatchCommand
from matchings.services import CommandResult


class Command(HypermatchCommand):
    help = 'Count matchings by size and report the average matching size'

    def add_command_arguments(self, parser):
        parser.add_argument('graph', type=str, help='Hypergraph file (text or JSON)')
        parser.add_argument(
            '--budget',
            type=int,
            default=None,
            help='Recursion node budget (default: HYPERMATCH_BUDGET or 10^8)',
        )

    def run(self, **options):
        graph = self.load_graph(options['graph'])
        coeffs = match_coeffs(graph, options['budget'])
        average = avg_matching_size(graph, options['budget'])
        payload = coeffs.as_dict()
        payload['avg'] = {'num': str(average.numerator), 'den': str(average.denominator)}
        rows = [{'size': i, 'matchings': str(c)} for i, c in enumerate(coeffs.counts)]
        return CommandResult(payload=payload, rows=rows, columns=('size', 'matchings'))
