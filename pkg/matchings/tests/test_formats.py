import json
import tempfile
from pathlib import Path

from django.test import SimpleTestCase
from hypothesis import given, settings

from matchings.exceptions import DuplicateVertexInEdgeError, HypergraphError, HypergraphSyntaxError
from matchings.formats import (
    from_json_dict, loads, parse, read_hypergraph, serialize, to_json_dict, walk_tree_sidecar,
)
from matchings.hypergraph import new_hypergraph
from matchings.walktree import build_walk_tree

from .strategies import hypergraphs


class TextFormatTests(SimpleTestCase):
    def test_parse_single_edge(self):
        self.assertEqual(parse("k 3\nvertices 3\nedge 0 1 2\n"), new_hypergraph(3, 3, [[0, 1, 2]]))

    def test_comments_labels_and_blank_lines(self):
        graph = parse("# two edges\nk 3\n\nvertices 5\nedge 4 3 2  # unsorted\nedge 0 1 2\nlabel 0 head\n")
        self.assertEqual(graph.edges, ((0, 1, 2), (2, 3, 4)))
        self.assertEqual(graph.vertices_labeled('head'), [0])

    def test_canonical_serialization(self):
        graph = parse("k 3\nvertices 5\nedge 4 3 2\nedge 0 1 2\nlabel 4 head\n")
        self.assertEqual(serialize(graph), "k 3\nvertices 5\nedge 0 1 2\nedge 2 3 4\nlabel 4 head\n")

    def test_labels_that_would_not_survive_parsing(self):
        for name in ('a # b', 'two  spaces', ' padded', 'tab\tname', ''):
            graph = new_hypergraph(2, 2, [[0, 1]], labels={1: name})
            with self.assertRaises(HypergraphSyntaxError):
                serialize(graph)
            self.assertEqual(loads(json.dumps(to_json_dict(graph))), graph)

    def test_labels_with_single_spaces_round_trip(self):
        graph = new_hypergraph(2, 3, [[0, 1]], labels={0: 'head of tower', 2: 'copy:1,2'})
        self.assertEqual(parse(serialize(graph)), graph)

    def test_repeated_vertex(self):
        with self.assertRaises(DuplicateVertexInEdgeError):
            parse("k 3\nvertices 3\nedge 0 1 1\n")

    def test_syntax_errors_carry_line_numbers(self):
        with self.assertRaises(HypergraphSyntaxError) as cm:
            parse("k 3\nvertices 3\nedge 0 x 2\n")
        self.assertEqual(cm.exception.line, 3)
        self.assertIn("line 3", str(cm.exception))

        with self.assertRaises(HypergraphSyntaxError):
            parse("k 3\nedge 0 1 2\n")
        with self.assertRaises(HypergraphSyntaxError):
            parse("vertices 3\n")
        with self.assertRaises(HypergraphSyntaxError):
            parse("k 3\nvertices 3\nhyperedge 0 1 2\n")

    @settings(max_examples=50, deadline=None)
    @given(hypergraphs())
    def test_parse_serialize_parse_is_stable(self, graph):
        text = serialize(graph)
        self.assertEqual(parse(text), graph)
        self.assertEqual(serialize(parse(text)), text)


class JsonFormatTests(SimpleTestCase):
    def test_json_mirror(self):
        graph = new_hypergraph(3, 5, [[0, 1, 2], [2, 3, 4]], labels={0: 'head'})
        payload = to_json_dict(graph)
        self.assertEqual(payload, {'k': 3, 'n': 5, 'edges': [[0, 1, 2], [2, 3, 4]], 'labels': {'0': 'head'}})
        self.assertEqual(from_json_dict(payload).label_map, {0: 'head'})
        self.assertEqual(loads(json.dumps(payload)), graph)

    def test_invalid_json(self):
        with self.assertRaises(HypergraphSyntaxError):
            loads('{"k": 3,')
        with self.assertRaises(HypergraphSyntaxError):
            from_json_dict({'n': 3})

    def test_read_hypergraph(self):
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / 'h.txt'
            path.write_text("k 2\nvertices 2\nedge 0 1\n")
            self.assertEqual(read_hypergraph(path).edge_count, 1)
            with self.assertRaises(HypergraphError):
                read_hypergraph(Path(directory) / 'missing.txt')

    def test_invalid_utf8_is_a_syntax_error(self):
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / 'h.txt'
            path.write_bytes(b'k 2\nn 2\n\xff\xfe 0 1\n')
            with self.assertRaises(HypergraphSyntaxError) as cm:
                read_hypergraph(path)
            self.assertIn('byte offset 8', str(cm.exception))


class SidecarTests(SimpleTestCase):
    def test_walks_alternate_vertices_and_edges(self):
        graph = new_hypergraph(3, 5, [[0, 1, 2], [2, 3, 4]])
        sidecar = walk_tree_sidecar(build_walk_tree(graph, 0))
        self.assertEqual(sidecar['root'], 0)
        self.assertEqual(sidecar['walks']['0'], [0])
        self.assertIn([0, 0, 2, 1, 4], sidecar['walks'].values())
        self.assertEqual(sidecar['edge_sources'], [0, 1])
