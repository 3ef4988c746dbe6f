"""
Exact matching counts, matching polynomials and avoidance probabilities.

Everything here is integer or Fraction arithmetic. Counting works on edge
bitmasks: a residual instance is a tuple of masks, and deleting a vertex set
is a filter on those masks, so no intermediate Hypergraph is ever built.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from sympy import Poly, Symbol

from .conf import resolve
from .exceptions import BudgetExceededError, DisjointnessViolatedError, HypergraphError
from .hypergraph import Hypergraph

logger = logging.getLogger(__name__)

x = Symbol('x')

Coefficients = List[int]


def iter_bits(mask: int):
    """Yield the vertex ids set in ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def vertex_mask(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def add_shifted(base: Coefficients, shifted: Coefficients) -> Coefficients:
    """Return base(x) + x * shifted(x)."""
    result = list(base) + [0] * max(0, len(shifted) + 1 - len(base))
    for i, c in enumerate(shifted):
        result[i + 1] += c
    return result


def convolve(a: Coefficients, b: Coefficients) -> Coefficients:
    result = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                result[i + j] += ca * cb
    return result


def split_components(masks: Sequence[int]) -> List[Tuple[int, ...]]:
    """Group edge masks into connected components, keeping their relative order."""
    groups: List[Tuple[int, List[int]]] = []
    for mask in masks:
        joined_support = mask
        joined_members = []
        rest = []
        for support, members in groups:
            if support & mask:
                joined_support |= support
                joined_members.extend(members)
            else:
                rest.append((support, members))
        joined_members.append(mask)
        groups = rest + [(joined_support, joined_members)]
    order = {mask: i for i, mask in enumerate(masks)}
    return [tuple(sorted(members, key=order.__getitem__)) for _, members in groups]


class MatchingCounter:
    """
    Counts matchings of edge-mask instances by size.

    Connected components are counted separately and multiplied. An acyclic
    component (a hypertree) is counted by a bottom-up pass; any other
    component branches on a pivot edge: N(H) = N(H - e) + N(H - V(e)). The
    pivot is the edge of maximum total vertex degree, lowest index first.
    Every branching step and every hypertree vertex costs one budget node.
    """

    def __init__(self, budget: Optional[int] = None, memoize: Optional[bool] = None):
        self.budget = resolve(budget, 'COUNT_BUDGET')
        self.memoize = resolve(memoize, 'COUNT_MEMOIZE')
        self.nodes = 0
        self._memo: Dict[Tuple[int, ...], Coefficients] = {}

    def _spend(self, amount: int = 1):
        self.nodes += amount
        if self.nodes > self.budget:
            logger.warning(f"Counting budget of {self.budget} nodes exhausted")
            raise BudgetExceededError(
                f"Exact counting exceeded {self.budget} recursion nodes; "
                f"instance too large (raise HYPERMATCH_BUDGET or use --method montecarlo)",
                budget=self.budget,
            )

    def coefficients(self, masks: Sequence[int]) -> Coefficients:
        """Matching counts p(0), p(1), ... of the instance given by ``masks``."""
        return self._count(tuple(masks))

    def total(self, masks: Sequence[int]) -> int:
        return sum(self._count(tuple(masks)))

    def _count(self, masks: Tuple[int, ...]) -> Coefficients:
        self._spend()
        if not masks:
            return [1]
        if len(masks) == 1:
            return [1, 1]
        if self.memoize and masks in self._memo:
            return self._memo[masks]

        components = split_components(masks)
        if len(components) > 1:
            result = [1]
            for component in components:
                result = convolve(result, self._count(component))
        elif _is_acyclic(masks):
            result = self._count_hypertree(masks)
        else:
            pivot = _choose_pivot(masks)
            chosen = masks[pivot]
            without = masks[:pivot] + masks[pivot + 1:]
            disjoint = tuple(m for m in without if not m & chosen)
            result = add_shifted(self._count(without), self._count(disjoint))

        if self.memoize:
            self._memo[masks] = result
        return result

    def _count_hypertree(self, masks: Tuple[int, ...]) -> Coefficients:
        # free[u]: subtree of u with u uncovered; total[u]: all matchings of the subtree.
        support = 0
        for mask in masks:
            support |= mask
        incident: Dict[int, List[int]] = {}
        for index, mask in enumerate(masks):
            for v in iter_bits(mask):
                incident.setdefault(v, []).append(index)

        root = (support & -support).bit_length() - 1
        parent_edge = {root: None}
        order = [root]
        for u in order:
            for index in incident[u]:
                if index == parent_edge[u]:
                    continue
                for w in iter_bits(masks[index]):
                    if w != u:
                        parent_edge[w] = index
                        order.append(w)
        self._spend(len(order))

        free: Dict[int, Coefficients] = {}
        total: Dict[int, Coefficients] = {}
        for u in reversed(order):
            child_edges = [
                [w for w in iter_bits(masks[index]) if w != u]
                for index in incident[u] if index != parent_edge[u]
            ]
            untouched = []
            for children in child_edges:
                product = [1]
                for w in children:
                    product = convolve(product, total[w])
                untouched.append(product)
            free_u = [1]
            for product in untouched:
                free_u = convolve(free_u, product)
            total_u = list(free_u)
            for i, children in enumerate(child_edges):
                term = [1]
                for w in children:
                    term = convolve(term, free[w])
                for j, product in enumerate(untouched):
                    if j != i:
                        term = convolve(term, product)
                total_u = add_shifted(total_u, term)
            free[u] = free_u
            total[u] = total_u
        return total[root]


def _is_acyclic(masks: Tuple[int, ...]) -> bool:
    # A connected hypergraph is a hypertree iff |V| - 1 = sum(|e| - 1).
    support = 0
    spread = 0
    for mask in masks:
        support |= mask
        spread += mask.bit_count() - 1
    return support.bit_count() - 1 == spread


def _choose_pivot(masks: Tuple[int, ...]) -> int:
    best_index = 0
    best_score = -1
    for i, mask in enumerate(masks):
        score = sum((mask & other).bit_count() for other in masks)
        if score > best_score:
            best_index, best_score = i, score
    return best_index


def residual_masks(graph: Hypergraph, removed: int = 0) -> Tuple[int, ...]:
    """Edge masks of H - S for the vertex set encoded by ``removed``."""
    if not removed:
        return graph.edge_masks
    return tuple(m for m in graph.edge_masks if not m & removed)


@dataclass(frozen=True)
class MatchCoeffs:
    """p(H, 0..floor(n/k)): number of matchings of each size."""

    counts: Tuple[int, ...]
    n: int
    k: int

    @property
    def total(self) -> int:
        return sum(self.counts)

    def as_dict(self) -> dict:
        return {'N': str(self.total), 'coeffs': [str(c) for c in self.counts]}


@dataclass(frozen=True)
class MatchingPolynomial:
    """
    Integer coefficients indexed by power of x.

    ``form`` is 'matching' for m_k(H, x) = sum (-1)^i p(H, i) x^(n - ki) or
    'generating' for q_k(H, x) = sum p(H, i) x^i.
    """

    coefficients: Tuple[int, ...]
    form: str

    def as_poly(self) -> Poly:
        return Poly(list(reversed(self.coefficients)), x, domain='ZZ')

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def as_dict(self) -> dict:
        return {'form': self.form, 'coefficients': [str(c) for c in self.coefficients]}


@dataclass(frozen=True)
class Probability:
    """
    Exact probability with provenance.

    ``numerator``/``denominator`` hold the raw matching counts when the value
    came from counting; other methods leave them as None.
    """

    value: Fraction
    method: str = 'count'
    numerator: Optional[int] = None
    denominator: Optional[int] = None

    def __post_init__(self):
        if not 0 <= self.value <= 1:
            raise ValueError(f"Probability out of range: {self.value}")

    def __float__(self):
        return float(self.value)

    def as_dict(self) -> dict:
        payload = {'num': str(self.value.numerator), 'den': str(self.value.denominator)}
        if self.numerator is not None:
            payload['counts'] = {'avoiding': str(self.numerator), 'total': str(self.denominator)}
        return payload


@dataclass(frozen=True)
class Matching:
    """A set of pairwise vertex-disjoint edge indices of some graph."""

    edges: FrozenSet[int]

    def covered(self, graph: Hypergraph) -> FrozenSet[int]:
        return frozenset(v for index in self.edges for v in graph.edges[index])

    def is_valid(self, graph: Hypergraph) -> bool:
        seen = 0
        for index in self.edges:
            mask = graph.edge_masks[index]
            if seen & mask:
                return False
            seen |= mask
        return True

    def __len__(self):
        return len(self.edges)


def match_coeffs(graph: Hypergraph, budget: Optional[int] = None) -> MatchCoeffs:
    """
    Count the matchings of H by size.

    Raises:
        BudgetExceededError: If counting needs more than ``budget`` nodes
    """
    counter = MatchingCounter(budget)
    counts = counter.coefficients(graph.edge_masks)
    size = graph.n // graph.k + 1
    counts = counts + [0] * (size - len(counts))
    logger.info(f"Counted {sum(counts)} matchings of {graph} in {counter.nodes} nodes")
    return MatchCoeffs(counts=tuple(counts), n=graph.n, k=graph.k)


def count_matchings(graph: Hypergraph, budget: Optional[int] = None) -> int:
    """N(H), the total number of matchings including the empty one."""
    return MatchingCounter(budget).total(graph.edge_masks)


def matching_polynomial(graph: Hypergraph, budget: Optional[int] = None) -> MatchingPolynomial:
    coeffs = match_coeffs(graph, budget)
    powers = [0] * (graph.n + 1)
    for i, count in enumerate(coeffs.counts):
        powers[graph.n - graph.k * i] = (-1) ** i * count
    return MatchingPolynomial(coefficients=tuple(powers), form='matching')


def generating_polynomial(graph: Hypergraph, budget: Optional[int] = None) -> MatchingPolynomial:
    coeffs = match_coeffs(graph, budget)
    counts = list(coeffs.counts)
    while len(counts) > 1 and counts[-1] == 0:
        counts.pop()
    return MatchingPolynomial(coefficients=tuple(counts), form='generating')


def prob_avoid(graph: Hypergraph, avoid: Iterable[int], given: Iterable[int] = (),
               budget: Optional[int] = None) -> Probability:
    """
    P_H(avoid | given): probability that a uniform matching covers no vertex of
    ``avoid``, conditioned on it covering no vertex of ``given``.

    Matchings avoiding a vertex set are exactly the matchings of its deletion,
    so the value is N(H - U - W) / N(H - U).

    Raises:
        UnknownVertexError: If a vertex is not in H
        DisjointnessViolatedError: If the two sets intersect
        BudgetExceededError: If counting runs over budget
    """
    avoid = graph.require_vertices(avoid)
    given = graph.require_vertices(given)
    overlap = avoid & given
    if overlap:
        raise DisjointnessViolatedError(f"Avoid and given sets share vertices {sorted(overlap)}")

    counter = MatchingCounter(budget)
    given_mask = vertex_mask(given)
    denominator = counter.total(residual_masks(graph, given_mask))
    numerator = counter.total(residual_masks(graph, given_mask | vertex_mask(avoid)))
    return Probability(Fraction(numerator, denominator), method='count',
                       numerator=numerator, denominator=denominator)


def avg_matching_size(graph: Hypergraph, budget: Optional[int] = None) -> Fraction:
    """Expected size of a uniformly random matching."""
    coeffs = match_coeffs(graph, budget)
    return Fraction(sum(i * c for i, c in enumerate(coeffs.counts)), coeffs.total)


def matching_size_bound(graph: Hypergraph, d: int) -> Fraction:
    """The average-size ceiling (1 - 1/(d+1)) * n/k for d-regular linear graphs."""
    if d < 1:
        raise HypergraphError(f"Degree bound needs d >= 1, got {d}")
    return (1 - Fraction(1, d + 1)) * Fraction(graph.n, graph.k)
