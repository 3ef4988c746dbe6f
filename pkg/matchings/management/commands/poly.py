"""
Management command to print the matching polynomial of a hypergraph.
"""

from matchings.counting import generating_polynomial, matching_polynomial
from matchings.management.base import HypermatchCommand
from matchings.services import CommandResult


class Command(HypermatchCommand):
    help = 'Print the matching polynomial m_k(H, x) or the generating polynomial q_k(H, x)'

    def add_command_arguments(self, parser):
        parser.add_argument('graph', type=str, help='Hypergraph file (text or JSON)')
        parser.add_argument(
            '--form',
            choices=['matching', 'generating'],
            default='matching',
            help='Polynomial to print',
        )
        parser.add_argument('--budget', type=int, default=None, help='Recursion node budget')

    def run(self, **options):
        graph = self.load_graph(options['graph'])
        build = matching_polynomial if options['form'] == 'matching' else generating_polynomial
        polynomial = build(graph, options['budget'])
        payload = polynomial.as_dict()
        payload['expression'] = str(polynomial.as_poly().as_expr())
        rows = [
            {'power': power, 'coefficient': str(c)}
            for power, c in enumerate(polynomial.coefficients) if c
        ]
        return CommandResult(payload=payload, rows=rows, columns=('power', 'coefficient'))
