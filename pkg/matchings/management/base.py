"""
Shared plumbing for the hypermatch management commands.

Every command returns a CommandResult from ``run``; this base class writes it
as JSON (sorted keys, big integers as decimal strings), as a plain table, as
CSV, or as the hypergraph text format, to stdout or ``--out``. Library errors
become CommandError with the error class's exit code, and a result whose
checks failed exits with CheckFailedError's code after its output is written.
"""

import argparse
import csv
import io
import json
import logging
from fractions import Fraction
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from matchings.exceptions import CheckFailedError, HypermatchError
from matchings.formats import read_hypergraph, serialize, to_json_dict
from matchings.hypergraph import VertexOrdering

logger = logging.getLogger(__name__)

USAGE_EXIT_CODE = 2

# Integers beyond this magnitude are written as strings.
JSON_SAFE_INT = 2 ** 53


def jsonable(value):
    """Recursively convert a payload into JSON-safe, deterministic values."""
    if isinstance(value, bool) or value is None or isinstance(value, (str, float)):
        return value
    if isinstance(value, int):
        return str(value) if abs(value) >= JSON_SAFE_INT else value
    if isinstance(value, Fraction):
        return {'num': str(value.numerator), 'den': str(value.denominator)}
    if isinstance(value, dict):
        return {str(key): jsonable(item) for key, item in value.items()}
    if isinstance(value, (set, frozenset)):
        return [jsonable(item) for item in sorted(value)]
    if isinstance(value, (list, tuple, range)):
        return [jsonable(item) for item in value]
    return str(value)


def dump_json(payload: dict) -> str:
    return json.dumps(jsonable(payload), sort_keys=True, indent=2) + "\n"


def render_table(columns, rows) -> str:
    """Left-aligned fixed-width table."""
    cells = [[str(column) for column in columns]]
    cells += [[_cell(row.get(column)) for column in columns] for row in rows]
    widths = [max(len(line[i]) for line in cells) for i in range(len(columns))]
    lines = ["  ".join(cell.ljust(width) for cell, width in zip(line, widths)).rstrip() for line in cells]
    lines.insert(1, "  ".join("-" * width for width in widths))
    return "\n".join(lines) + "\n"


def _cell(value) -> str:
    if value is None:
        return ''
    if isinstance(value, (dict, list)):
        return json.dumps(jsonable(value), sort_keys=True)
    return str(value)


def render_csv(columns, rows) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(columns), extrasaction='ignore', lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({column: _cell(row.get(column)) for column in columns})
    return buffer.getvalue()


def vertex_list(text: str):
    """argparse type for comma-separated vertex ids."""
    if not text.strip():
        return []
    try:
        return [int(token) for token in text.split(',')]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def fraction(text: str) -> Fraction:
    """argparse type for exact rationals such as 1/10 or 0.25."""
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational number, got {text!r}")


class HypermatchCommand(BaseCommand):
    """
    Base class for hypermatch subcommands.

    Subclasses implement ``add_command_arguments`` and ``run``. ``formats``
    lists the accepted ``--format`` values; the first is the default.
    """

    formats = ('json', 'table')
    requires_system_checks = []

    def add_arguments(self, parser):
        self.add_command_arguments(parser)
        parser.add_argument(
            '--out',
            type=str,
            default=None,
            help='Write output to this file instead of stdout',
        )
        parser.add_argument(
            '--format',
            choices=self.formats,
            default=None,
            help=f'Output format (default: {self.formats[0]})',
        )

    def add_command_arguments(self, parser):
        pass

    def run(self, **options):
        raise NotImplementedError

    def usage_error(self, message: str):
        return CommandError(message, returncode=USAGE_EXIT_CODE)

    def load_graph(self, path):
        if path is None:
            return None
        return read_hypergraph(path)

    def ordering(self, graph, perm):
        if perm is None:
            return None
        return VertexOrdering.for_graph(graph, VertexOrdering(tuple(perm)))

    def handle(self, *args, **options):
        try:
            result = self.run(**options)
        except HypermatchError as e:
            logger.error(f"{type(e).__name__}: {e}")
            raise CommandError(str(e), returncode=e.exit_code)

        text = self.render(result, options['format'] or self.default_format(result))
        if options['out']:
            Path(options['out']).write_text(text, encoding='utf-8')
            self.stderr.write(self.style.SUCCESS(f"Wrote {options['out']}"))
        else:
            self.stdout.write(text, ending='')

        if not result.ok:
            raise CommandError("One or more checks failed", returncode=CheckFailedError.exit_code)

    def default_format(self, result) -> str:
        return self.formats[0]

    def render(self, result, output_format: str) -> str:
        payload = result.payload
        if result.graph is not None and not payload:
            payload = to_json_dict(result.graph)
        if output_format == 'text' and result.graph is not None:
            return serialize(result.graph)
        if output_format == 'csv':
            return render_csv(result.columns, result.rows)
        if output_format == 'table':
            if result.rows:
                return render_table(result.columns, result.rows)
            flat = [{'key': key, 'value': value} for key, value in sorted(payload.items())]
            return render_table(('key', 'value'), flat)
        return dump_json(payload)
