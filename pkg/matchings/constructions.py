"""
Explicit hypergraph constructions.

- ``regular_linear``: d-regular linear k-graphs by the recursive
  k-copies-plus-transversal-matching recipe.
- ``s_extend`` / ``tower_build``: the S_d operator. (d-1)(k-1) disjoint copies
  of F and a new head joined to the copies' heads in groups of k - 1.
- ``extendable_search`` / ``extendable_recursive``: d-extendable linear k-graphs
  (one vertex of degree d - 1, the head; every other vertex of degree d).
- ``tower_stats``: the exact head probabilities of a tower, which evolve by g_d.
- ``counterexample_stats`` / ``counterexample_graph``: the d-regular graph with
  a centre vertex that is almost never covered next to copy heads that almost
  always are.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import List, Optional, Sequence, Set, Tuple

from .conf import resolve
from .counting import Probability
from .dynamics import (
    DynParams, Enclosure, alpha, beta_gamma, classify_start, g, mpf_to_fraction, iterate, to_decimal,
)
from .exceptions import (
    BudgetExceededError, ConstructionAmbiguousError, ConstructionError, NoThreeFixedPointsError,
    NotExtendableError, NotFoundError, RationalBlowupError,
)
from .hypergraph import Hypergraph, degree_report, disjoint_union, new_hypergraph

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExtendableGraph:
    """A k-graph with a designated head vertex, meant to be d-extendable."""

    graph: Hypergraph
    head: int
    d: int

    @property
    def k(self) -> int:
        return self.graph.k

    def check(self) -> None:
        """
        Raises:
            NotExtendableError: Unless the head has degree d - 1, every other
                vertex degree d, and the graph is linear
        """
        report = degree_report(self.graph)
        if not report.is_linear:
            raise NotExtendableError(f"{self.graph} is not linear (codegree {report.max_codegree})")
        for vertex, degree in enumerate(report.degrees):
            expected = self.d - 1 if vertex == self.head else self.d
            if degree != expected:
                raise NotExtendableError(
                    f"Vertex {vertex} has degree {degree}, expected {expected} for {self.d}-extendability"
                )

    def is_extendable(self) -> bool:
        try:
            self.check()
        except NotExtendableError:
            return False
        return True


def _guard_vertices(count: int, what: str, max_vertices: Optional[int]) -> None:
    limit = resolve(max_vertices, 'CONSTRUCTION_MAX_VERTICES')
    if count > limit:
        raise BudgetExceededError(f"{what} would have {count} vertices (limit {limit})", budget=limit)


def regular_linear(k: int, d: int, max_vertices: Optional[int] = None) -> Hypergraph:
    """
    A d-regular linear k-graph on k^d vertices.

    d = 1 is a single edge. For d > 1, take k disjoint copies of the
    (d-1)-regular graph and add, for each vertex position j, the edge made of
    vertex j from every copy.
    """
    if k < 2 or d < 1:
        raise ConstructionError(f"regular_linear needs k >= 2 and d >= 1, got k={k}, d={d}")
    _guard_vertices(k ** d, f"{d}-regular linear {k}-graph", max_vertices)

    edges = [tuple(range(k))]
    n = k
    for _ in range(2, d + 1):
        edges = [tuple(copy * n + v for v in edge) for copy in range(k) for edge in edges]
        edges.extend(tuple(copy * n + j for copy in range(k)) for j in range(n))
        n *= k
    return new_hypergraph(k, n, edges)


def s_extend(base: ExtendableGraph, strict: bool = True,
             max_vertices: Optional[int] = None) -> ExtendableGraph:
    """
    S_d(F): (d-1)(k-1) disjoint copies of F plus a new head v (the last vertex id)
    and, for each i in [d-1], the edge {v} + heads of copies (i, 1..k-1).

    In non-strict mode F may be any k-graph with a designated vertex; the
    head-probability identity does not depend on extendability.

    Raises:
        NotExtendableError: In strict mode, if F is not d-extendable
        BudgetExceededError: If the result exceeds the vertex limit
    """
    if strict:
        base.check()
    k, d = base.k, base.d
    copies = (d - 1) * (k - 1)
    _guard_vertices(copies * base.graph.n + 1, "S_d extension", max_vertices)

    stripped = Hypergraph(k=k, n=base.graph.n, edges=base.graph.edges)
    union, offsets = disjoint_union([stripped] * copies) if copies else (stripped, ())
    head = union.n if copies else 0
    edges = list(union.edges) if copies else []
    for i in range(d - 1):
        edges.append((head,) + tuple(offsets[i * (k - 1) + j] + base.head for j in range(k - 1)))
    graph = new_hypergraph(k, head + 1, edges, labels={head: 'head'})
    return ExtendableGraph(graph=graph, head=head, d=d)


def tower_build(base: ExtendableGraph, levels: int, strict: bool = True,
                max_vertices: Optional[int] = None) -> ExtendableGraph:
    """
    S_d applied ``levels`` times.

    Vertex counts follow n_l = (d-1)(k-1) n_(l-1) + 1; the final size is
    checked against the vertex limit before anything is built.
    """
    if levels < 0:
        raise ConstructionError(f"Tower levels must be non-negative, got {levels}")
    n = base.graph.n
    for _ in range(levels):
        n = (base.d - 1) * (base.k - 1) * n + 1
    _guard_vertices(n, f"Tower of {levels} levels", max_vertices)

    current = base
    for level in range(levels):
        current = s_extend(current, strict=strict, max_vertices=max_vertices)
        logger.debug(f"Tower level {level + 1}: {current.graph}")
    return current


def tower_size(k: int, d: int, vertices: int, edges: int, levels: int) -> Tuple[int, int]:
    """(vertex count, edge count) of S_d^(levels)(F) without building it."""
    copies = (d - 1) * (k - 1)
    for _ in range(levels):
        vertices = copies * vertices + 1
        edges = copies * edges + d - 1
    return vertices, edges


def _admissible_sizes(k: int, d: int, max_n: int) -> List[int]:
    return [n for n in range(k + 1, max_n + 1) if (n * d - 1) % k == 0]


def _search_size(k: int, d: int, n: int, budget: int, spent: List[int]) -> Optional[List[Tuple[int, ...]]]:
    remaining = [d] * n
    remaining[0] = d - 1
    covered: Set[Tuple[int, int]] = set()
    edges: List[Tuple[int, ...]] = []

    def place(previous: Optional[Tuple[int, ...]]) -> bool:
        spent[0] += 1
        if spent[0] > budget:
            raise BudgetExceededError(f"Extendable search exceeded {budget} nodes", budget=budget)
        w = next((v for v in range(n) if remaining[v]), None)
        if w is None:
            return True
        partners = [u for u in range(w + 1, n) if remaining[u] and (w, u) not in covered]
        if len(partners) < remaining[w] * (k - 1):
            return False
        for rest in combinations(partners, k - 1):
            edge = (w,) + rest
            # Edges at the same lowest vertex are placed in increasing order.
            if previous is not None and previous[0] == w and edge <= previous:
                continue
            pairs = list(combinations(edge, 2))
            if any(pair in covered for pair in pairs):
                continue
            for v in edge:
                remaining[v] -= 1
            covered.update(pairs)
            edges.append(edge)
            if place(edge):
                return True
            edges.pop()
            covered.difference_update(pairs)
            for v in edge:
                remaining[v] += 1
        return False

    return edges if place(None) else None


def extendable_search(k: int, d: int, max_n: int, budget: Optional[int] = None) -> ExtendableGraph:
    """
    Smallest d-extendable linear k-graph on at most ``max_n`` vertices.

    Candidate sizes need n d - 1 divisible by k. For each, a canonical
    backtracking search always completes the lowest vertex with remaining
    degree, using only pairs not yet covered. The head is vertex 0.

    Raises:
        NotFoundError: If no size up to ``max_n`` admits one
    """
    if k < 2 or d < 2:
        raise ConstructionError(f"extendable_search needs k >= 2 and d >= 2, got k={k}, d={d}")
    budget = resolve(budget, 'COUNT_BUDGET')
    sizes = _admissible_sizes(k, d, max_n)
    if d % k == 0:
        raise NotFoundError(f"No n has n*{d} - 1 divisible by {k}")

    spent = [0]
    for n in sizes:
        edges = _search_size(k, d, n, budget, spent)
        if edges is not None:
            found = ExtendableGraph(new_hypergraph(k, n, edges, labels={0: 'head'}), head=0, d=d)
            found.check()
            logger.info(f"Found {d}-extendable linear {k}-graph on {n} vertices after {spent[0]} nodes")
            return found
        logger.debug(f"No {d}-extendable linear {k}-graph on {n} vertices")
    raise NotFoundError(f"No {d}-extendable linear {k}-graph on at most {max_n} vertices")


def _hub_graph(k: int, degree: int, max_vertices: Optional[int]) -> Tuple[Hypergraph, int]:
    """
    k - 1 copies of a degree-regular linear k-graph, each missing one edge,
    plus a hub joined by k new edges to the freed vertices. The hub has
    degree k; every other vertex keeps ``degree``.
    """
    regular = regular_linear(k, degree, max_vertices)
    removed = regular.edges[0]
    trimmed = Hypergraph(k=k, n=regular.n, edges=regular.edges[1:])
    union, offsets = disjoint_union([trimmed] * (k - 1))
    hub = union.n
    edges = list(union.edges)
    for position in range(k):
        edges.append((hub,) + tuple(offset + removed[position] for offset in offsets))
    return new_hypergraph(k, hub + 1, edges), hub


def recursive_size(k: int, ell: int) -> int:
    """Vertex count of ``extendable_recursive(k, ell)``: each level multiplies by the hub graph size."""
    size = k + 1
    for level in range(1, ell + 1):
        size *= (k - 1) * k ** (k * level + 1) + 1
    return size


def extendable_recursive(k: int, ell: int, max_vertices: Optional[int] = None) -> ExtendableGraph:
    """
    A (k ell + 1)-extendable linear k-graph by the recursive gluing recipe.

    ell = 0 is a single edge with an isolated head. For ell >= 1, take the
    (k(ell-1) + 1)-extendable graph H and glue to every vertex u of H a fresh
    copy of the hub graph for degree k ell + 1, identifying its hub with u.
    Each vertex of H gains exactly k edges. The result is always validated.

    Raises:
        ConstructionAmbiguousError: If the result fails validation
        BudgetExceededError: If the result exceeds the vertex limit
    """
    if k < 2 or ell < 0:
        raise ConstructionError(f"extendable_recursive needs k >= 2 and ell >= 0, got k={k}, ell={ell}")

    if ell == 0:
        graph = new_hypergraph(k, k + 1, [tuple(range(k))], labels={k: 'head'})
        result = ExtendableGraph(graph, head=k, d=1)
    else:
        degree = k * ell + 1
        _guard_vertices(recursive_size(k, ell), f"{degree}-extendable linear {k}-graph", max_vertices)

        base = extendable_recursive(k, ell - 1, max_vertices)
        hub, hub_vertex = _hub_graph(k, degree, max_vertices)
        hub_others = [v for v in hub.vertices if v != hub_vertex]

        edges = list(base.graph.edges)
        total = base.graph.n
        for u in base.graph.vertices:
            placement = {hub_vertex: u}
            for offset, v in enumerate(hub_others):
                placement[v] = total + offset
            edges.extend(tuple(placement[v] for v in edge) for edge in hub.edges)
            total += len(hub_others)
        graph = new_hypergraph(k, total, edges, labels={base.head: 'head'})
        result = ExtendableGraph(graph, head=base.head, d=degree)

    report = degree_report(result.graph)
    if not report.is_linear:
        raise ConstructionAmbiguousError(
            f"Gluing recipe for k={k}, ell={ell} produced a non-linear graph", failed_invariant='linear'
        )
    if report.extendable_head != result.head or report.extendable_degree != result.d:
        raise ConstructionAmbiguousError(
            f"Gluing recipe for k={k}, ell={ell} does not give head degree {result.d - 1} "
            f"with all other degrees {result.d}",
            failed_invariant='degrees',
        )
    logger.info(f"Built {result.d}-extendable linear {k}-graph: {result.graph}")
    return result


@dataclass(frozen=True)
class TowerStats:
    """
    Head probabilities p_0..p_L of S_d^(i)(F), p_(i+1) = g_d(p_i).

    ``side`` is p_0's position against the alpha enclosure. ``even_gaps`` and
    ``odd_gaps`` bound |p_(2i) - limit| and |p_(2i+1) - limit| against the
    beta/gamma enclosures (empty when f has a single fixed point).
    """

    k: int
    d: int
    p0: Fraction
    trajectory: Tuple[Fraction, ...]
    side: str
    exact: bool = True
    even_gaps: Tuple[Fraction, ...] = ()
    odd_gaps: Tuple[Fraction, ...] = ()

    @property
    def levels(self) -> int:
        return len(self.trajectory) - 1

    @property
    def head_probability(self) -> Fraction:
        return self.trajectory[-1]

    def as_dict(self, digits: int = 30) -> dict:
        return {
            'k': self.k,
            'd': self.d,
            'levels': self.levels,
            'exact': self.exact,
            'side': self.side,
            'p0': {'num': str(self.p0.numerator), 'den': str(self.p0.denominator)},
            'trajectory': [to_decimal(p, digits) for p in self.trajectory],
            'even_gaps': [to_decimal(gap, 6) for gap in self.even_gaps],
            'odd_gaps': [to_decimal(gap, 6) for gap in self.odd_gaps],
        }


def _gap(value: Fraction, enclosure: Enclosure) -> Fraction:
    return max(abs(value - enclosure.lo), abs(value - enclosure.hi))


def tower_stats(k: int, d: int, p0: Fraction, levels: int, max_bits: Optional[int] = None,
                prec: Optional[int] = None) -> TowerStats:
    """
    Exact tower trajectory from head probability p0.

    Raises:
        RationalBlowupError: If a denominator passes ``max_bits`` bits; use the
            float trajectory from ``dynamics.iterate`` instead
    """
    params = DynParams(k, d)
    max_bits = resolve(max_bits, 'TOWER_MAX_BITS')
    p0 = Fraction(p0)
    if not 0 < p0 <= 1:
        raise ConstructionError(f"Base head probability must lie in (0, 1], got {p0}")
    trajectory = [p0]
    for level in range(levels):
        following = g(params, trajectory[-1])
        if following.denominator.bit_length() > max_bits:
            raise RationalBlowupError(
                f"Tower level {level + 1} needs a {following.denominator.bit_length()}-bit denominator "
                f"(limit {max_bits}); iterate in floating point instead"
            )
        trajectory.append(following)
    return _stats_for(params, p0, trajectory, prec, exact=True)


def _stats_for(params: DynParams, p0: Fraction, trajectory: List[Fraction],
               prec: Optional[int], exact: bool) -> TowerStats:
    a = alpha(params, prec)
    limits = None
    if params.k > 2:
        try:
            limits = beta_gamma(params, prec, alpha_enclosure=a)
        except NoThreeFixedPointsError:
            pass
    side = classify_start(p0, a, limits is not None)

    even_gaps: Tuple[Fraction, ...] = ()
    odd_gaps: Tuple[Fraction, ...] = ()
    if limits is not None and side in ('beta-side', 'gamma-side'):
        beta, gamma = limits
        even_limit, odd_limit = (beta, gamma) if side == 'beta-side' else (gamma, beta)
        even_gaps = tuple(_gap(p, even_limit) for p in trajectory[0::2])
        odd_gaps = tuple(_gap(p, odd_limit) for p in trajectory[1::2])
    return TowerStats(
        k=params.k, d=params.d, p0=p0, trajectory=tuple(trajectory), side=side,
        exact=exact, even_gaps=even_gaps, odd_gaps=odd_gaps,
    )


def tower_stats_float(k: int, d: int, p0: Fraction, levels: int, prec: Optional[int] = None,
                      float_bits: Optional[int] = None) -> TowerStats:
    """
    Tower trajectory through floating point, for levels beyond the exact budget.

    Even levels come from iterating f from p0; odd levels are g of the even
    level below. Values are the binary rationals of the floats.
    """
    params = DynParams(k, d)
    even = iterate(params, p0, max_iters=levels // 2, tol=-1, prec=prec, switch_bits=0,
                   float_bits=float_bits)
    trajectory = [Fraction(p0)]
    for index in range(1, levels + 1):
        if index % 2 == 0:
            trajectory.append(mpf_to_fraction(even.values[index // 2]))
        else:
            trajectory.append(g(params, trajectory[index - 1]))
    return _stats_for(params, Fraction(p0), trajectory, prec, exact=False)


def components_join_prob(factors: Sequence[Sequence[Fraction]]) -> Probability:
    """
    P_H(v) for a vertex v whose m edges lead into disjoint parts:

        1 / (1 + sum_i prod_j P_(H_ij)(v_ij))

    ``factors[i]`` lists the avoidance probabilities of the other vertices of
    edge i in their own parts. m = 0 gives 1.
    """
    weight = Fraction(0)
    for row in factors:
        product = Fraction(1)
        for value in row:
            value = Fraction(value)
            if not 0 <= value <= 1:
                raise ConstructionError(f"Factor {value} is not a probability")
            product *= value
        weight += product
    return Probability(1 / (1 + weight), method='components')


@dataclass(frozen=True)
class CounterexampleStats:
    """
    Exact statistics of the d-regular graph built around a centre from
    d(k-1) copies of H0 whose heads avoid coverage with probability p.
    """

    k: int
    d: int
    p: Fraction
    center: Fraction
    head: Fraction
    edge_probability: Fraction
    epsilon: Fraction
    level: Optional[int] = None
    vertices: Optional[int] = None
    edges: Optional[int] = None

    @property
    def consistent(self) -> bool:
        return self.center + self.d * self.edge_probability == 1

    @property
    def center_bound(self) -> Fraction:
        return 1 - (1 + self.epsilon) / Fraction(self.d) ** (self.k - 2)

    @property
    def head_bound(self) -> Fraction:
        return (1 + self.epsilon) / (self.d + 1)

    @property
    def center_ok(self) -> bool:
        return self.center > self.center_bound

    @property
    def head_ok(self) -> bool:
        return self.head < self.head_bound

    def as_dict(self, digits: int = 30) -> dict:
        def exact(value: Fraction) -> dict:
            return {
                'num': str(value.numerator),
                'den': str(value.denominator),
                'decimal': to_decimal(value, digits),
            }

        return {
            'k': self.k,
            'd': self.d,
            'level': self.level,
            'p': exact(self.p),
            'P_center': exact(self.center),
            'P_head': exact(self.head),
            'consistent': self.consistent,
            'vertices': None if self.vertices is None else str(self.vertices),
            'edges': None if self.edges is None else str(self.edges),
            'checks': {
                'center_ok': self.center_ok,
                'head_ok': self.head_ok,
                'epsilon': str(self.epsilon),
                'center_bound': to_decimal(self.center_bound, digits),
                'head_bound': to_decimal(self.head_bound, digits),
            },
        }


def counterexample_stats(k: int, d: int, p: Fraction, epsilon: Fraction = Fraction(1, 10),
                         level: Optional[int] = None, h0_vertices: Optional[int] = None,
                         h0_edges: Optional[int] = None) -> CounterexampleStats:
    """
    Closed forms for the centre v and a copy head h:

        P(v) = 1 / (1 + d p^(k-1))
        P(h) = p (1 + (d-1) p^(k-1)) / (1 + d p^(k-1))

    Each centre edge lies in the matching with probability
    p^(k-1) / (1 + d p^(k-1)).
    """
    p = Fraction(p)
    if not 0 < p <= 1:
        raise ConstructionError(f"Head probability must lie in (0, 1], got {p}")
    weight = p ** (k - 1)
    center = 1 / (1 + d * weight)
    copies = d * (k - 1)
    stats = CounterexampleStats(
        k=k,
        d=d,
        p=p,
        center=center,
        head=p * (1 + (d - 1) * weight) * center,
        edge_probability=weight * center,
        epsilon=Fraction(epsilon),
        level=level,
        vertices=None if h0_vertices is None else copies * h0_vertices + 1,
        edges=None if h0_edges is None else copies * h0_edges + d,
    )
    if not stats.consistent:
        logger.error(f"Centre and edge probabilities do not sum to 1 for k={k}, d={d}, p={p}")
    return stats


def counterexample_graph(base: ExtendableGraph, d: Optional[int] = None,
                         max_vertices: Optional[int] = None) -> Hypergraph:
    """
    The explicit graph: d(k-1) copies of ``base`` and a centre joined by d
    edges, edge i holding the heads of copies (i, 1..k-1).

    The centre is labeled 'center' and the head of copy (i, j) 'copy:i,j'
    (1-based).
    """
    d = base.d if d is None else d
    k = base.k
    copies = d * (k - 1)
    _guard_vertices(copies * base.graph.n + 1, "Counterexample graph", max_vertices)

    stripped = Hypergraph(k=k, n=base.graph.n, edges=base.graph.edges)
    union, offsets = disjoint_union([stripped] * copies)
    center = union.n
    edges = list(union.edges)
    labels = {center: 'center'}
    for i in range(d):
        heads = []
        for j in range(k - 1):
            vertex = offsets[i * (k - 1) + j] + base.head
            labels[vertex] = f"copy:{i + 1},{j + 1}"
            heads.append(vertex)
        edges.append((center, *heads))
    return new_hypergraph(k, center + 1, edges, labels=labels)
