"""
Management command to build the walk tree of a hypergraph at a root vertex.
"""

import json
from pathlib import Path

from matchings.formats import to_json_dict, walk_tree_sidecar
from matchings.management.base import HypermatchCommand, jsonable, vertex_list
from matchings.services import CommandResult, decomposition_report
from matchings.walktree import build_walk_tree


class Command(HypermatchCommand):
    help = 'Build the walk tree T(H, v) and export it with its node-to-walk map'

    formats = ('text', 'json', 'table')

    def add_command_arguments(self, parser):
        parser.add_argument('graph', type=str, help='Hypergraph file (text or JSON)')
        parser.add_argument('--root', type=int, required=True, help='Root vertex v')
        parser.add_argument('--order', type=vertex_list, default=None, help='Vertex ordering as a permutation')
        parser.add_argument('--max-nodes', type=int, default=None, help='Walk-tree node limit')
        parser.add_argument(
            '--sidecar',
            type=str,
            default=None,
            help='Write the node-to-walk JSON map to this file',
        )
        parser.add_argument(
            '--decompose',
            action='store_true',
            help='Compare each root subtree with the walk tree of the matching vertex deletion',
        )

    def run(self, **options):
        graph = self.load_graph(options['graph'])
        order = self.ordering(graph, options['order'])
        if options['decompose']:
            return decomposition_report(graph, options['root'], order, options['max_nodes'])

        walk_tree = build_walk_tree(graph, options['root'], order, options['max_nodes'])
        sidecar = walk_tree_sidecar(walk_tree)
        if options['sidecar']:
            Path(options['sidecar']).write_text(
                json.dumps(jsonable(sidecar), sort_keys=True, indent=2) + "\n", encoding='utf-8'
            )
        payload = {'tree': to_json_dict(walk_tree.tree), 'sidecar': sidecar}
        return CommandResult(payload=payload, graph=walk_tree.tree)
