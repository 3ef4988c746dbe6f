"""
Uniform sampling of matchings.

The exact sampler is self-reducible: walk the edges in canonical order and
take each one with probability N(residual with it) / N(residual). The
Glauber chain is the Monte-Carlo fallback for instances beyond exact reach.
"""

import logging
import random
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np

from .conf import resolve
from .counting import Matching, MatchingCounter, vertex_mask
from .exceptions import HypergraphError
from .hypergraph import Hypergraph

logger = logging.getLogger(__name__)


class MatchingSampler:
    """
    Draws exact uniform matchings of one graph, caching residual counts so
    repeated draws cost only table lookups once the cache is warm.
    """

    def __init__(self, graph: Hypergraph, budget: Optional[int] = None):
        self.graph = graph
        self.counter = MatchingCounter(budget)
        self._counts: Dict[Tuple[int, ...], int] = {}

    def _count(self, residual: Tuple[int, ...]) -> int:
        if residual not in self._counts:
            masks = self.graph.edge_masks
            self._counts[residual] = self.counter.total([masks[i] for i in residual])
        return self._counts[residual]

    def draw(self, rng: random.Random) -> Matching:
        masks = self.graph.edge_masks
        residual = tuple(range(self.graph.edge_count))
        chosen = []
        while residual:
            first, rest = residual[0], residual[1:]
            compatible = tuple(i for i in rest if not masks[i] & masks[first])
            with_first = self._count(compatible)
            total = with_first + self._count(rest)
            if rng.randrange(total) < with_first:
                chosen.append(first)
                residual = compatible
            else:
                residual = rest
        return Matching(frozenset(chosen))

    def draw_many(self, count: int, seed: int) -> List[Matching]:
        rng = random.Random(seed)
        return [self.draw(rng) for _ in range(count)]


def sample_matching_exact(graph: Hypergraph, seed: int, budget: Optional[int] = None) -> Matching:
    """One exact uniform sample; deterministic given ``seed``."""
    return MatchingSampler(graph, budget).draw(random.Random(seed))


def sample_matchings(graph: Hypergraph, count: int, seed: int,
                     budget: Optional[int] = None) -> List[Matching]:
    """``count`` independent exact uniform samples from one seeded stream."""
    samples = MatchingSampler(graph, budget).draw_many(count, seed)
    logger.info(f"Drew {count} exact samples from {graph}")
    return samples


@dataclass(frozen=True)
class McEstimate:
    estimate: float
    stderr: float
    samples: int
    steps: int

    def within(self, value: float, sigmas: float = 3.0) -> bool:
        return abs(self.estimate - float(value)) <= sigmas * self.stderr

    def as_dict(self) -> dict:
        return {
            'estimate': self.estimate,
            'stderr': self.stderr,
            'samples': self.samples,
            'steps': self.steps,
        }


def glauber_chain(graph: Hypergraph, steps: int, samples: int, seed: int) -> List[Matching]:
    """
    Run a lazy Glauber chain on the matchings of H from the empty matching.

    Each step picks a uniform edge and flips a fair coin: on heads the edge is
    removed if present, or added if it is disjoint from the current matching.
    The first half of the steps is burn-in; ``samples`` states are recorded at
    even spacing over the second half.
    """
    if steps <= 0 or samples <= 0:
        raise HypergraphError(f"steps and samples must be positive, got {steps} and {samples}")
    if graph.edge_count == 0:
        return [Matching(frozenset())] * samples

    rng = np.random.default_rng(seed)
    masks = graph.edge_masks
    picks = rng.integers(graph.edge_count, size=steps)
    coins = rng.random(steps) < 0.5

    current = set()
    covered = 0
    burn_in = steps // 2
    spacing = max(1, (steps - burn_in) // samples)
    recorded = []
    for t in range(steps):
        if coins[t]:
            e = int(picks[t])
            if e in current:
                current.discard(e)
                covered ^= masks[e]
            elif not covered & masks[e]:
                current.add(e)
                covered |= masks[e]
        if t >= burn_in and (t - burn_in + 1) % spacing == 0 and len(recorded) < samples:
            recorded.append(Matching(frozenset(current)))
    return recorded


def mc_estimate_avoid(graph: Hypergraph, avoid: Union[int, Iterable[int]], steps: int,
                      samples: int, seed: int, batches: Optional[int] = None) -> McEstimate:
    """
    Estimate P_H(avoid) as the share of Glauber states leaving ``avoid``
    uncovered, with a batch-means standard error.
    """
    avoid = graph.require_vertices([avoid] if isinstance(avoid, int) else avoid)
    avoid_mask = vertex_mask(avoid)
    states = glauber_chain(graph, steps, samples, seed)

    masks = graph.edge_masks
    values = np.array([
        0.0 if any(masks[e] & avoid_mask for e in state.edges) else 1.0
        for state in states
    ])
    batch_count = min(resolve(batches, 'GLAUBER_BATCHES'), len(values))
    if batch_count > 1:
        means = np.array([chunk.mean() for chunk in np.array_split(values, batch_count)])
        stderr = float(means.std(ddof=1) / np.sqrt(batch_count))
    else:
        stderr = 0.0
    estimate = float(values.mean())
    logger.info(f"Glauber estimate {estimate:.6f} +/- {stderr:.6f} over {len(values)} states")
    return McEstimate(estimate=estimate, stderr=stderr, samples=len(values), steps=steps)
