from collections import Counter
from fractions import Fraction

import pytest
from django.test import SimpleTestCase
from scipy.stats import chisquare

from matchings.constructions import regular_linear
from matchings.corpus import regular_linear_instances
from matchings.counting import count_matchings, prob_avoid
from matchings.exceptions import HypergraphError
from matchings.hypergraph import new_hypergraph
from matchings.sampling import (
    MatchingSampler, McEstimate, glauber_chain, mc_estimate_avoid, sample_matching_exact, sample_matchings,
)

PATH = new_hypergraph(2, 5, [[0, 1], [1, 2], [2, 3], [3, 4]])
TRIANGLE = new_hypergraph(2, 3, [[0, 1], [1, 2], [0, 2]])


class ExactSamplerTests(SimpleTestCase):
    def test_samples_are_matchings(self):
        for matching in sample_matchings(PATH, 200, seed=1):
            self.assertTrue(matching.is_valid(PATH))

    def test_seed_reproducibility(self):
        self.assertEqual(sample_matchings(PATH, 50, seed=7), sample_matchings(PATH, 50, seed=7))
        self.assertEqual(sample_matching_exact(PATH, seed=3), sample_matching_exact(PATH, seed=3))

    def test_uniform_over_all_matchings(self):
        # The path on 5 vertices has 8 matchings.
        draws = MatchingSampler(PATH).draw_many(4000, seed=2024)
        counts = Counter(matching.edges for matching in draws)
        self.assertEqual(len(counts), count_matchings(PATH))
        _, p_value = chisquare(list(counts.values()))
        self.assertGreater(p_value, 0.001)

    def test_edgeless_graph(self):
        self.assertEqual(len(sample_matching_exact(new_hypergraph(3, 3, []), seed=0)), 0)


class GlauberTests(SimpleTestCase):
    def test_states_are_matchings(self):
        states = glauber_chain(PATH, steps=2000, samples=50, seed=5)
        self.assertEqual(len(states), 50)
        for state in states:
            self.assertTrue(state.is_valid(PATH))

    def test_seed_reproducibility(self):
        self.assertEqual(glauber_chain(PATH, 1000, 20, seed=9), glauber_chain(PATH, 1000, 20, seed=9))

    def test_rejects_non_positive_sizes(self):
        with self.assertRaises(HypergraphError):
            glauber_chain(PATH, steps=0, samples=5, seed=0)
        with self.assertRaises(HypergraphError):
            glauber_chain(PATH, steps=10, samples=0, seed=0)

    def test_estimate_matches_exact_probability(self):
        exact = prob_avoid(TRIANGLE, [0]).value
        self.assertEqual(exact, Fraction(1, 2))
        estimate = mc_estimate_avoid(TRIANGLE, 0, steps=200_000, samples=20_000, seed=11)
        self.assertEqual(estimate.samples, 20_000)
        self.assertGreater(estimate.stderr, 0)
        self.assertLess(abs(estimate.estimate - float(exact)), 0.02)

    def test_within_counts_standard_errors(self):
        estimate = McEstimate(estimate=0.5, stderr=0.01, samples=100, steps=1000)
        self.assertTrue(estimate.within(0.52))
        self.assertTrue(estimate.within(Fraction(21, 40)))
        self.assertFalse(estimate.within(0.54))
        self.assertTrue(estimate.within(0.54, sigmas=5))

    def test_edgeless_estimate_is_one(self):
        estimate = mc_estimate_avoid(new_hypergraph(3, 3, []), [0], steps=10, samples=5, seed=0)
        self.assertEqual(estimate.estimate, 1.0)
        self.assertEqual(estimate.stderr, 0.0)


@pytest.mark.slow
class SamplerAccuracyTests(SimpleTestCase):
    def test_exact_sampler_is_uniform_on_small_instances(self):
        instances = [
            PATH,
            new_hypergraph(3, 7, [[0, 1, 2], [1, 3, 4], [2, 5, 6]]),
            new_hypergraph(2, 6, [(i, (i + 1) % 6) for i in range(6)]),
            new_hypergraph(2, 4, [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]]),
            regular_linear(3, 2),
        ]
        for seed, graph in enumerate(instances):
            with self.subTest(graph=str(graph)):
                total = count_matchings(graph)
                self.assertLessEqual(total, 60)
                counts = Counter(matching.edges for matching in MatchingSampler(graph).draw_many(100_000, seed))
                self.assertEqual(len(counts), total)
                _, p_value = chisquare(list(counts.values()))
                self.assertGreater(p_value, 0.001)

    def test_glauber_estimates_are_within_three_standard_errors(self):
        instances = regular_linear_instances()[:10]
        self.assertEqual(len(instances), 10)
        for seed, instance in enumerate(instances):
            with self.subTest(instance=instance.name):
                exact = prob_avoid(instance.graph, [0]).value
                estimate = mc_estimate_avoid(instance.graph, 0, steps=400_000, samples=10_000, seed=seed, batches=100)
                self.assertGreater(estimate.stderr, 0)
                self.assertTrue(estimate.within(exact), f"{estimate} vs {float(exact)}")
