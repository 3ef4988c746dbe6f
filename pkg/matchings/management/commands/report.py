"""
Management command to print the gap table of the regular counterexample.
"""

from matchings.management.base import HypermatchCommand, fraction
from matchings.services import kahn_gap_report


class Command(HypermatchCommand):
    help = 'Report fixed points, tower head probability and the centre/head gap of the counterexample'

    def add_command_arguments(self, parser):
        parser.add_argument('report', choices=['kahn-gap'], help='Report to produce')
        parser.add_argument('--k', type=int, default=3, help='Uniformity (at least 3)')
        parser.add_argument(
            '--d',
            type=int,
            default=None,
            help='Degree (default: smallest d with three certified fixed points)',
        )
        parser.add_argument('--epsilon', type=fraction, default=fraction('1/10'), help='Slack in the checks')
        parser.add_argument('--p0', type=fraction, default=fraction('1'), help='Head probability of the tower base')
        parser.add_argument('--ell', type=int, default=5, help='Tower has 2*ell+1 levels')
        parser.add_argument('--d-max', type=int, default=200, help='Search limit for the default d')
        parser.add_argument('--base-vertices', type=int, default=None, help='Vertex count of the tower base')
        parser.add_argument('--base-edges', type=int, default=None, help='Edge count of the tower base')
        parser.add_argument('--prec', type=int, default=None, help='Enclosure width exponent in bits')

    def run(self, **options):
        return kahn_gap_report(
            options['k'],
            d=options['d'],
            epsilon=options['epsilon'],
            p0=options['p0'],
            ell=options['ell'],
            d_max=options['d_max'],
            base_vertices=options['base_vertices'],
            base_edges=options['base_edges'],
            prec=options['prec'],
        )
