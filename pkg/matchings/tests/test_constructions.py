from fractions import Fraction

from django.test import SimpleTestCase, override_settings

from matchings.constructions import (
    ExtendableGraph, components_join_prob, counterexample_graph, counterexample_stats, extendable_recursive,
    extendable_search, recursive_size, regular_linear, s_extend, tower_build, tower_size, tower_stats,
    tower_stats_float,
)
from matchings.corpus import linear_triple_systems
from matchings.counting import prob_avoid
from matchings.dynamics import DynParams, g
from matchings.exceptions import (
    BudgetExceededError, ConstructionError, NotExtendableError, NotFoundError, RationalBlowupError,
)
from matchings.hypergraph import degree_report, new_hypergraph

SINGLE_VERTEX = ExtendableGraph(new_hypergraph(3, 1, []), head=0, d=2)
SINGLE_EDGE = ExtendableGraph(new_hypergraph(3, 3, [[0, 1, 2]]), head=0, d=2)


class RegularLinearTests(SimpleTestCase):
    def test_sizes_and_degrees(self):
        graph = regular_linear(3, 2)
        self.assertEqual((graph.n, graph.edge_count), (9, 6))
        report = degree_report(graph)
        self.assertEqual(report.regular_degree, 2)
        self.assertTrue(report.is_linear)

    def test_four_cycle(self):
        graph = regular_linear(2, 2)
        self.assertEqual(graph.edges, ((0, 1), (0, 2), (1, 3), (2, 3)))

    def test_single_edge(self):
        self.assertEqual(regular_linear(4, 1).edges, ((0, 1, 2, 3),))

    def test_vertex_limit(self):
        with self.assertRaises(BudgetExceededError):
            regular_linear(3, 4, max_vertices=50)

    @override_settings(HYPERMATCH={'CONSTRUCTION_MAX_VERTICES': 10})
    def test_vertex_limit_from_settings(self):
        with self.assertRaises(BudgetExceededError):
            regular_linear(3, 3)


class ExtensionTests(SimpleTestCase):
    def test_loose_extension_of_a_single_edge(self):
        extended = s_extend(SINGLE_EDGE, strict=False)
        self.assertEqual((extended.graph.n, extended.graph.edge_count), (7, 3))
        self.assertEqual(extended.head, 6)
        self.assertEqual(extended.graph.vertices_labeled('head'), [6])
        self.assertEqual(prob_avoid(extended.graph, [6]).value, Fraction(4, 5))

    def test_strict_mode_checks_extendability(self):
        with self.assertRaises(NotExtendableError):
            s_extend(SINGLE_EDGE)

    def test_extension_preserves_extendability(self):
        base = extendable_search(3, 2, 12)
        extended = s_extend(base)
        self.assertTrue(extended.is_extendable())
        self.assertEqual(extended.graph.n, 2 * base.graph.n + 1)

    def test_tower_head_probabilities_follow_g(self):
        stats = tower_stats(3, 2, Fraction(1), 3)
        self.assertEqual(stats.trajectory, (1, Fraction(1, 2), Fraction(4, 5), Fraction(25, 41)))
        for levels, expected in enumerate(stats.trajectory):
            tower = tower_build(SINGLE_VERTEX, levels, strict=False)
            self.assertEqual(prob_avoid(tower.graph, [tower.head]).value, expected)

    def test_tower_size(self):
        tower = tower_build(SINGLE_VERTEX, 3, strict=False)
        self.assertEqual(tower_size(3, 2, 1, 0, 3), (tower.graph.n, tower.graph.edge_count))
        self.assertEqual(tower_size(3, 2, 1, 0, 3), (15, 7))

    def test_tower_rejects_negative_levels(self):
        with self.assertRaises(ConstructionError):
            tower_build(SINGLE_VERTEX, -1, strict=False)


class ExtendableSearchTests(SimpleTestCase):
    def test_smallest_two_extendable_linear_triple_system(self):
        found = extendable_search(3, 2, 12)
        self.assertEqual(found.graph.n, 8)
        self.assertEqual(found.head, 0)
        self.assertTrue(found.is_extendable())

    def test_graphs(self):
        found = extendable_search(2, 3, 10)
        self.assertEqual(found.graph.n, 5)
        self.assertTrue(found.is_extendable())

    def test_not_found(self):
        with self.assertRaises(NotFoundError):
            extendable_search(3, 2, 7)
        with self.assertRaises(NotFoundError):
            extendable_search(3, 2, 4)
        with self.assertRaises(NotFoundError):
            extendable_search(3, 3, 20)

    def test_search_budget(self):
        with self.assertRaises(BudgetExceededError):
            extendable_search(3, 2, 12, budget=5)


class ExtendableRecursiveTests(SimpleTestCase):
    def test_base_level(self):
        built = extendable_recursive(3, 0)
        self.assertEqual((built.graph.n, built.head, built.d), (4, 3, 1))

    def test_first_level(self):
        built = extendable_recursive(3, 1)
        self.assertEqual(built.graph.n, recursive_size(3, 1))
        self.assertEqual(built.graph.n, 652)
        self.assertEqual(built.d, 4)
        self.assertTrue(built.is_extendable())

    def test_second_level_is_over_the_vertex_limit(self):
        self.assertGreater(recursive_size(3, 2), 2 * 10 ** 6)
        with self.assertRaises(BudgetExceededError):
            extendable_recursive(3, 2)


class TowerStatsTests(SimpleTestCase):
    def test_single_fixed_point(self):
        stats = tower_stats(3, 2, Fraction(1), 4)
        self.assertEqual(stats.side, 'converging-to-alpha')
        self.assertEqual(stats.even_gaps, ())
        self.assertEqual(stats.levels, 4)

    def test_two_sided_limits(self):
        stats = tower_stats(3, 6, Fraction(1), 5)
        self.assertEqual(stats.side, 'beta-side')
        self.assertEqual((len(stats.even_gaps), len(stats.odd_gaps)), (3, 3))
        self.assertLess(stats.even_gaps[-1], stats.even_gaps[0])

    def test_large_degree_towers_settle_on_beta_and_gamma(self):
        for d in (50, 100):
            with self.subTest(d=d):
                stats = tower_stats(3, d, Fraction(1), 10)
                self.assertTrue(stats.exact)
                self.assertEqual(stats.side, 'beta-side')
                self.assertLess(stats.even_gaps[-1], Fraction(1, 10**6))
                self.assertLess(stats.odd_gaps[-1], Fraction(1, 10**6))
                self.assertEqual(list(stats.even_gaps), sorted(stats.even_gaps, reverse=True))

    def test_blowup(self):
        with self.assertRaises(RationalBlowupError):
            tower_stats(3, 2, Fraction(1), 3, max_bits=4)

    def test_base_probability_range(self):
        with self.assertRaises(ConstructionError):
            tower_stats(3, 2, Fraction(0), 3)

    def test_float_trajectory_tracks_exact_one(self):
        exact = tower_stats(3, 2, Fraction(1), 4)
        approximate = tower_stats_float(3, 2, Fraction(1), 4)
        self.assertFalse(approximate.exact)
        self.assertEqual(approximate.levels, 4)
        for a, b in zip(exact.trajectory, approximate.trajectory):
            self.assertLess(abs(a - b), Fraction(1, 2 ** 200))


class CounterexampleTests(SimpleTestCase):
    def test_components_join(self):
        self.assertEqual(components_join_prob([[Fraction(1, 2), Fraction(1, 2)]]).value, Fraction(4, 5))
        self.assertEqual(components_join_prob([]).value, 1)
        with self.assertRaises(ConstructionError):
            components_join_prob([[Fraction(3, 2)]])

    def test_closed_forms_at_p_one(self):
        for d in (2, 3, 7):
            stats = counterexample_stats(3, d, Fraction(1), h0_vertices=1, h0_edges=0)
            self.assertEqual(stats.center, Fraction(1, d + 1))
            self.assertEqual(stats.head, Fraction(d, d + 1))
            self.assertTrue(stats.consistent)
            self.assertEqual(stats.vertices, 2 * d + 1)
            self.assertEqual(stats.edges, d)

    def test_explicit_graph_matches_closed_forms(self):
        base = tower_build(SINGLE_VERTEX, 1, strict=False)
        graph = counterexample_graph(base, d=2)
        stats = counterexample_stats(3, 2, prob_avoid(base.graph, [base.head]).value)
        center = graph.vertices_labeled('center')
        head = graph.vertices_labeled('copy:1,1')
        self.assertEqual(graph.n, 4 * base.graph.n + 1)
        self.assertEqual(prob_avoid(graph, center).value, stats.center)
        self.assertEqual(prob_avoid(graph, head).value, stats.head)

    def test_explicit_graph_is_regular_on_an_extendable_base(self):
        graph = counterexample_graph(extendable_search(3, 2, 12))
        report = degree_report(graph)
        self.assertEqual(report.regular_degree, 2)
        self.assertTrue(report.is_linear)

    def test_rejects_bad_probability(self):
        with self.assertRaises(ConstructionError):
            counterexample_stats(3, 2, Fraction(0))


def designated_vertex_graphs():
    """Every vertex of every small linear 3-graph, as a loose extension base."""
    return [
        (instance.name, head, instance.graph)
        for instance in linear_triple_systems()
        for head in instance.graph.vertices
    ]


class HeadRecursionTests(SimpleTestCase):
    def test_extension_applies_g_to_the_head_probability(self):
        cases = designated_vertex_graphs()
        self.assertGreaterEqual(len(cases), 20)
        for d in (2, 3, 4):
            params = DynParams(3, d)
            for name, head, graph in cases:
                with self.subTest(graph=name, head=head, d=d):
                    extended = s_extend(ExtendableGraph(graph, head=head, d=d), strict=False)
                    p = prob_avoid(graph, [head]).value
                    self.assertEqual(prob_avoid(extended.graph, [extended.head]).value, g(params, p))

    def test_counterexample_closed_forms_at_degree_three(self):
        bases = [ExtendableGraph(graph, head=head, d=3) for _, head, graph in designated_vertex_graphs()[:6]]
        bases.append(tower_build(ExtendableGraph(new_hypergraph(3, 1, []), head=0, d=3), 1, strict=False))
        for base in bases:
            with self.subTest(base=str(base.graph), head=base.head):
                graph = counterexample_graph(base)
                stats = counterexample_stats(3, 3, prob_avoid(base.graph, [base.head]).value)
                self.assertEqual(graph.n, 6 * base.graph.n + 1)
                self.assertEqual(degree_report(graph).degrees[graph.vertices_labeled('center')[0]], 3)
                self.assertEqual(prob_avoid(graph, graph.vertices_labeled('center')).value, stats.center)
                for label in ('copy:1,1', 'copy:3,2'):
                    self.assertEqual(prob_avoid(graph, graph.vertices_labeled(label)).value, stats.head)
