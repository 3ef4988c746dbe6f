from fractions import Fraction

import pytest
from django.test import SimpleTestCase

from matchings.corpus import load_corpus, linear_triple_systems, random_instances, regular_linear_instances
from matchings.counting import prob_avoid
from matchings.exceptions import DisjointnessViolatedError, HypergraphError
from matchings.hypergraph import VertexOrdering, new_hypergraph
from matchings.services import (
    decomposition_report, estimate_probability, head_probability, kahn_gap_report, verify_bounds_suite,
    verify_chain_suite, verify_godsil_suite, verify_identity_suite,
)
from matchings.walktree import build_walk_tree, prob_on_hypertree, prob_via_recursion

SHARED_VERTEX = new_hypergraph(3, 5, [[0, 1, 2], [2, 3, 4]])
STAR = new_hypergraph(3, 7, [[0, 1, 2], [1, 3, 4], [2, 5, 6]])


class EstimateProbabilityTests(SimpleTestCase):
    def test_exact_methods_agree(self):
        for method in ('brute', 'recursion', 'walktree'):
            result = estimate_probability(STAR, [0], method=method)
            self.assertEqual(result.payload['prob'], {'num': '4', 'den': '5'}, method)
            self.assertEqual(result.payload['method'], method)

    def test_chain_rule_for_vertex_sets(self):
        expected = estimate_probability(STAR, [0, 3], given=[5], method='brute').payload['prob']
        order = VertexOrdering((6, 5, 4, 3, 2, 1, 0))
        for method in ('recursion', 'walktree'):
            result = estimate_probability(STAR, [0, 3], given=[5], method=method, order=order)
            self.assertEqual(result.payload['prob']['num'], expected['num'])
            self.assertEqual(result.payload['prob']['den'], expected['den'])

    def test_montecarlo(self):
        result = estimate_probability(SHARED_VERTEX, [2], method='montecarlo', steps=20_000,
                                      samples=2_000, seed=3)
        self.assertLess(abs(result.payload['estimate'] - 1 / 3), 0.05)
        with self.assertRaises(HypergraphError):
            estimate_probability(SHARED_VERTEX, [2], method='montecarlo')

    def test_errors(self):
        with self.assertRaises(DisjointnessViolatedError):
            estimate_probability(SHARED_VERTEX, [0], given=[0], method='recursion')
        with self.assertRaises(HypergraphError):
            estimate_probability(SHARED_VERTEX, [0], method='guess')


class CorpusTests(SimpleTestCase):
    def test_linear_triple_systems_are_distinct_classes(self):
        instances = linear_triple_systems()
        edge_counts = sorted(instance.graph.edge_count for instance in instances)
        # One edge; two edges (disjoint or meeting in a vertex); then the three-edge classes.
        self.assertEqual(edge_counts[:3], [1, 2, 2])
        self.assertTrue(all(instance.graph.n <= 7 for instance in instances))

    def test_random_corpus_is_seeded(self):
        self.assertEqual(random_instances(5, seed=1), random_instances(5, seed=1))

    def test_regular_instances_carry_their_degree(self):
        names = {instance.name: instance.d for instance in regular_linear_instances()}
        self.assertEqual(names['fano'], 3)
        self.assertEqual(names['cycle-5'], 2)

    def test_unknown_corpus(self):
        with self.assertRaises(HypergraphError):
            load_corpus('everything')


class VerificationSuiteTests(SimpleTestCase):
    def test_godsil_on_a_file(self):
        result = verify_godsil_suite(STAR, orders=3, seed=1)
        self.assertTrue(result.ok)
        self.assertEqual(result.payload['checked'], STAR.n * 3)

    def test_godsil_compares_path_trees_for_graphs(self):
        cycle = new_hypergraph(2, 4, [[0, 1], [1, 2], [2, 3], [0, 3]])
        result = verify_godsil_suite(cycle, roots=[0], orders=2)
        self.assertTrue(result.ok)
        self.assertTrue(result.rows[0]['path_tree_ok'])

    def test_identity_on_linear_triple_systems(self):
        result = verify_identity_suite(corpus='linear3')
        self.assertTrue(result.ok, result.payload)

    def test_chain_on_random_corpus(self):
        result = verify_chain_suite(corpus='random', max_pairs=3)
        self.assertTrue(result.ok, result.payload)
        self.assertEqual(result.payload['checked'], 200)

    def test_bounds_on_regular_corpus(self):
        result = verify_bounds_suite(corpus='regular')
        self.assertTrue(result.ok, result.payload)

    def test_bounds_reject_irregular_input(self):
        with self.assertRaises(HypergraphError):
            verify_bounds_suite(SHARED_VERTEX, d=2)

    def test_decomposition(self):
        result = decomposition_report(STAR, 0)
        self.assertTrue(result.ok)
        self.assertEqual(result.payload['checked'], 2)

    def test_needs_an_input(self):
        with self.assertRaises(HypergraphError):
            verify_identity_suite()


class GapReportTests(SimpleTestCase):
    def test_head_probability(self):
        self.assertEqual(head_probability(3, 2, Fraction(1), 2).head_probability, Fraction(4, 5))

    def test_gap_holds_for_large_degree(self):
        result = kahn_gap_report(3, d=100, ell=5)
        self.assertTrue(result.ok, result.payload)
        counterexample = result.payload['counterexample']
        self.assertTrue(counterexample['consistent'])
        self.assertGreater(float(counterexample['P_center']['decimal']), 0.989)
        self.assertLess(float(counterexample['P_head']['decimal']), 0.011)

    def test_gap_fails_at_the_threshold_degree(self):
        result = kahn_gap_report(3, ell=2)
        self.assertEqual(result.payload['d'], 6)
        self.assertFalse(result.ok)

    def test_sizes_of_the_counterexample(self):
        result = kahn_gap_report(3, d=100, ell=0, base_vertices=1, base_edges=0)
        # One level: 198 single vertices and a head, then 200 copies of it around the centre.
        self.assertEqual(result.payload['counterexample']['vertices'], str(200 * 199 + 1))
        self.assertEqual(result.payload['counterexample']['edges'], str(200 * 99 + 100))


# Linear 3-graphs up to 7 vertices and 3 edges, all graphs up to 6 vertices, and the seeded random k-graphs.
FULL_CORPORA = ('linear3', 'atlas', 'random')


@pytest.mark.slow
class FullCorpusTests(SimpleTestCase):
    def test_walk_tree_identity_for_every_root_and_five_orderings(self):
        for name in FULL_CORPORA:
            with self.subTest(corpus=name):
                result = verify_godsil_suite(corpus=name, orders=5, seed=0)
                self.assertEqual(result.payload['failures'], 0)
                # No root was skipped for budget reasons.
                roots = sum(instance.graph.n for instance in load_corpus(name))
                self.assertEqual(result.payload['checked'], roots * 5)

    def test_counting_recursion_and_walk_tree_agree(self):
        for name in FULL_CORPORA:
            for instance in load_corpus(name):
                graph = instance.graph
                for v in graph.vertices:
                    expected = prob_avoid(graph, [v]).value
                    self.assertEqual(prob_via_recursion(graph, v).value, expected, f"{instance.name} at {v}")
                    tree = build_walk_tree(graph, v).tree
                    self.assertEqual(prob_on_hypertree(tree, 0).value, expected, f"{instance.name} at {v}")
