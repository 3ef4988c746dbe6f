"""
Management command for the fixed points and trajectories of the head-probability map.
"""

from matchings.dynamics import (
    SCAN_COLUMNS, DynParams, iterate, scan, scan_row, sign_pattern_check, smallest_three_point_degree,
)
from matchings.management.base import HypermatchCommand, fraction
from matchings.services import CommandResult


class Command(HypermatchCommand):
    help = 'Certify fixed points of f_d, iterate it, scan over d and check its sign pattern'

    formats = ('csv', 'json', 'table')

    def add_command_arguments(self, parser):
        parser.add_argument(
            'action',
            choices=['fixed-points', 'iterate', 'scan', 'signs'],
            help='What to compute',
        )
        parser.add_argument('--k', type=int, default=3, help='Uniformity')
        parser.add_argument('--d', type=int, default=None, help='Degree (fixed-points, iterate, signs)')
        parser.add_argument('--prec', type=int, default=None, help='Enclosure width exponent in bits')
        parser.add_argument('--p0', type=fraction, default=fraction('1'), help='Starting point for iterate')
        parser.add_argument('--max-iters', type=int, default=10_000, help='Iteration cap')
        parser.add_argument('--tol', type=fraction, default=None, help='Stopping step size (default 2^-64)')
        parser.add_argument('--samples', type=int, default=5, help='Points per interval for signs')
        parser.add_argument('--d-min', type=int, default=2, help='First degree of a scan')
        parser.add_argument('--d-max', type=int, default=50, help='Last degree of a scan')
        parser.add_argument(
            '--threshold',
            action='store_true',
            help='With scan: report only the smallest d with three fixed points',
        )

    def default_format(self, result):
        return 'csv' if result.columns == SCAN_COLUMNS else 'json'

    def _params(self, options):
        if options['d'] is None:
            raise self.usage_error(f"dynamics {options['action']} needs --d")
        return DynParams(options['k'], options['d'])

    def run(self, **options):
        action = options['action']
        prec = options['prec']

        if action == 'fixed-points':
            row = scan_row(self._params(options), prec)
            return CommandResult(payload=row, rows=[row], columns=SCAN_COLUMNS)

        if action == 'scan':
            if options['threshold']:
                d = smallest_three_point_degree(options['k'], options['d_max'], prec, d_min=options['d_min'])
                return CommandResult(payload={'k': options['k'], 'threshold': d})
            rows = scan(options['k'], range(options['d_min'], options['d_max'] + 1), prec)
            return CommandResult(payload={'k': options['k'], 'rows': rows}, rows=rows, columns=SCAN_COLUMNS)

        if action == 'iterate':
            trajectory = iterate(
                self._params(options), options['p0'], max_iters=options['max_iters'],
                tol=options['tol'], prec=prec,
            )
            return CommandResult(payload=trajectory.as_dict())

        report = sign_pattern_check(self._params(options), options['samples'], prec)
        return CommandResult(
            payload=report.as_dict(),
            rows=list(report.rows),
            columns=('interval', 'expected', 'points', 'violations'),
            ok=report.ok,
        )
