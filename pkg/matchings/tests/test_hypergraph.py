from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from matchings.constructions import regular_linear
from matchings.exceptions import (
    DuplicateEdgeError, DuplicateVertexInEdgeError, HypergraphError, MixedUniformityError,
    NonUniformEdgeError, OutOfRangeVertexError, UnknownVertexError,
)
from matchings.hypergraph import (
    VertexOrdering, connected_components, degree_report, delete_vertices, disjoint_union,
    induced_subgraph, is_hypertree, new_hypergraph,
)

from .strategies import hypergraphs

SINGLE_EDGE = new_hypergraph(3, 3, [[0, 1, 2]])
TWO_EDGES = new_hypergraph(3, 5, [[2, 3, 4], [0, 1, 2]])
TRIANGLE = new_hypergraph(2, 3, [[0, 1], [1, 2], [0, 2]])


class NewHypergraphTests(SimpleTestCase):
    def test_edges_are_canonicalized(self):
        graph = new_hypergraph(3, 5, [[4, 3, 2], [2, 1, 0]])
        self.assertEqual(graph.edges, ((0, 1, 2), (2, 3, 4)))
        self.assertEqual(graph, TWO_EDGES)

    def test_triangle(self):
        self.assertEqual(TRIANGLE.edges, ((0, 1), (0, 2), (1, 2)))
        self.assertEqual(TRIANGLE.edge_count, 3)

    def test_labels_do_not_affect_equality(self):
        labeled = new_hypergraph(3, 3, [[0, 1, 2]], labels={0: 'head'})
        self.assertEqual(labeled, SINGLE_EDGE)
        self.assertEqual(labeled.vertices_labeled('head'), [0])

    def test_rejects_malformed_edges(self):
        with self.assertRaises(NonUniformEdgeError):
            new_hypergraph(3, 4, [[0, 1]])
        with self.assertRaises(OutOfRangeVertexError):
            new_hypergraph(3, 3, [[0, 1, 3]])
        with self.assertRaises(DuplicateEdgeError):
            new_hypergraph(3, 3, [[0, 1, 2], [2, 1, 0]])
        with self.assertRaises(DuplicateVertexInEdgeError):
            new_hypergraph(3, 3, [[0, 1, 1]])

    def test_rejects_bad_parameters(self):
        with self.assertRaises(HypergraphError):
            new_hypergraph(1, 3, [])
        with self.assertRaises(HypergraphError):
            new_hypergraph(3, -1, [])

    def test_require_vertices(self):
        self.assertEqual(TWO_EDGES.require_vertices([0, 4]), frozenset({0, 4}))
        with self.assertRaises(UnknownVertexError):
            TWO_EDGES.require_vertices([5])


class DerivedGraphTests(SimpleTestCase):
    def test_delete_from_triangle(self):
        graph, vertex_map = delete_vertices(TRIANGLE, [0])
        self.assertEqual(graph, new_hypergraph(2, 2, [[0, 1]]))
        self.assertEqual(vertex_map, {1: 0, 2: 1})

    def test_delete_shared_vertex_leaves_edgeless_graph(self):
        graph, _ = delete_vertices(TWO_EDGES, [2])
        self.assertEqual((graph.n, graph.edge_count), (4, 0))

    def test_delete_nothing_is_identity(self):
        self.assertEqual(delete_vertices(TWO_EDGES, []).graph, TWO_EDGES)

    def test_delete_carries_labels(self):
        labeled = new_hypergraph(3, 5, TWO_EDGES.edges, labels={4: 'head'})
        graph, _ = delete_vertices(labeled, [0])
        self.assertEqual(graph.vertices_labeled('head'), [3])

    def test_delete_unknown_vertex(self):
        with self.assertRaises(UnknownVertexError):
            delete_vertices(TRIANGLE, [7])

    def test_disjoint_union(self):
        union, offsets = disjoint_union([SINGLE_EDGE, SINGLE_EDGE])
        self.assertEqual(union.edges, ((0, 1, 2), (3, 4, 5)))
        self.assertEqual(offsets, (0, 3))

        self.assertEqual(disjoint_union([TWO_EDGES]).graph, TWO_EDGES)

        triple, _ = disjoint_union([SINGLE_EDGE] * 3)
        self.assertEqual((triple.n, triple.edge_count), (9, 3))
        self.assertEqual(degree_report(triple).regular_degree, 1)

    def test_disjoint_union_mixed_uniformity(self):
        with self.assertRaises(MixedUniformityError):
            disjoint_union([SINGLE_EDGE, TRIANGLE])

    def test_induced_subgraph(self):
        graph, vertex_map = induced_subgraph(TWO_EDGES, [2, 3, 4])
        self.assertEqual(graph, new_hypergraph(3, 3, [[0, 1, 2]]))
        self.assertEqual(vertex_map, {2: 0, 3: 1, 4: 2})

    @settings(max_examples=60, deadline=None)
    @given(hypergraphs(), st.data())
    def test_deleting_in_two_steps_matches_one_step(self, graph, data):
        first = data.draw(st.sets(st.sampled_from(list(graph.vertices)), max_size=2))
        rest = [v for v in graph.vertices if v not in first]
        second = data.draw(st.sets(st.sampled_from(rest), max_size=2)) if rest else set()

        together = delete_vertices(graph, first | second).graph
        partial, vertex_map = delete_vertices(graph, first)
        stepwise = delete_vertices(partial, [vertex_map[v] for v in second]).graph
        self.assertEqual(together, stepwise)
        self.assertEqual(together.n, graph.n - len(first | second))


class DegreeReportTests(SimpleTestCase):
    def test_single_edge(self):
        report = degree_report(SINGLE_EDGE)
        self.assertEqual(report.degrees, (1, 1, 1))
        self.assertEqual(report.regular_degree, 1)
        self.assertTrue(report.is_linear)

    def test_two_edges(self):
        report = degree_report(TWO_EDGES)
        self.assertEqual(report.degrees, (1, 1, 2, 1, 1))
        self.assertFalse(report.is_regular)
        self.assertTrue(report.is_linear)

    def test_regular_linear_output(self):
        report = degree_report(regular_linear(3, 2))
        self.assertEqual(len(report.degrees), 9)
        self.assertEqual(report.regular_degree, 2)
        self.assertTrue(report.is_linear)

    def test_extendable_head(self):
        graph = new_hypergraph(3, 8, [[0, 1, 2], [1, 3, 4], [2, 5, 6], [3, 5, 7], [4, 6, 7]])
        report = degree_report(graph)
        self.assertEqual(report.extendable_head, 0)
        self.assertEqual(report.extendable_degree, 2)

    def test_codegree(self):
        graph = new_hypergraph(3, 4, [[0, 1, 2], [0, 1, 3]])
        report = degree_report(graph)
        self.assertEqual(report.max_codegree, 2)
        self.assertFalse(report.is_linear)

    @settings(max_examples=40, deadline=None)
    @given(hypergraphs(k_values=(3,)), hypergraphs(k_values=(3,)))
    def test_union_report_merges_part_reports(self, left, right):
        union, _ = disjoint_union([left, right])
        merged = degree_report(union)
        self.assertEqual(merged.degrees, degree_report(left).degrees + degree_report(right).degrees)
        self.assertEqual(
            merged.max_codegree,
            max(degree_report(left).max_codegree, degree_report(right).max_codegree),
        )


class HypertreeTests(SimpleTestCase):
    def test_examples(self):
        self.assertTrue(is_hypertree(SINGLE_EDGE))
        self.assertFalse(is_hypertree(TRIANGLE))
        self.assertTrue(is_hypertree(TWO_EDGES))
        self.assertTrue(is_hypertree(new_hypergraph(3, 1, [])))
        self.assertFalse(is_hypertree(new_hypergraph(3, 0, [])))

    def test_disconnected_graph_is_not_a_hypertree(self):
        self.assertFalse(is_hypertree(disjoint_union([SINGLE_EDGE, SINGLE_EDGE]).graph))

    @settings(max_examples=60, deadline=None)
    @given(hypergraphs())
    def test_hypertree_vertex_count(self, graph):
        if is_hypertree(graph):
            self.assertEqual(graph.n, graph.edge_count * (graph.k - 1) + 1)

    def test_components(self):
        graph = new_hypergraph(2, 5, [[0, 3], [1, 2]])
        self.assertEqual(connected_components(graph), [[0, 3], [1, 2], [4]])


class VertexOrderingTests(SimpleTestCase):
    def test_rank_and_sort(self):
        order = VertexOrdering((2, 0, 1))
        self.assertTrue(order.precedes(2, 0))
        self.assertEqual(order.sort([0, 1, 2]), [2, 0, 1])

    def test_rejects_non_permutation(self):
        with self.assertRaises(HypergraphError):
            VertexOrdering((0, 0, 1))

    def test_restrict(self):
        order = VertexOrdering((2, 0, 1))
        _, vertex_map = delete_vertices(TRIANGLE, [0])
        self.assertEqual(order.restrict(vertex_map).perm, (1, 0))

    def test_for_graph_checks_size(self):
        with self.assertRaises(HypergraphError):
            VertexOrdering.for_graph(TRIANGLE, VertexOrdering((0, 1)))
