"""
Services for the hypermatch commands.

This module holds the multi-step workflows behind the management commands:
probability estimation by any of the four methods, the verification suites
over single graphs or named corpora, and the gap report for the regular
counterexample. Each returns a CommandResult the commands only have to emit.
"""

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

from sympy import Poly

from .constructions import (
    counterexample_stats, tower_size, tower_stats, tower_stats_float,
)
from .corpus import Instance, load_corpus
from .counting import (
    Probability, avg_matching_size, count_matchings, generating_polynomial, matching_polynomial,
    matching_size_bound, prob_avoid, x,
)
from .dynamics import (
    DynParams, alpha, beta_gamma, kahn_value, smallest_three_point_degree, to_decimal,
)
from .exceptions import (
    BudgetExceededError, DisjointnessViolatedError, HypergraphError, RationalBlowupError,
)
from .hypergraph import (
    Hypergraph, VertexOrdering, degree_report, delete_vertices, disjoint_union,
)
from .sampling import mc_estimate_avoid
from .walktree import (
    build_walk_tree, path_tree, prob_on_hypertree, prob_via_recursion, second_level_bounds,
    verify_godsil, walk_tree_decomposition,
)

logger = logging.getLogger(__name__)


@dataclass
class CommandResult:
    """
    What a command prints: a JSON payload, optional tabular rows (used for
    ``--format table`` and CSV), an optional hypergraph for text output,
    and whether every requested check passed.
    """

    payload: dict
    rows: List[dict] = field(default_factory=list)
    columns: Tuple[str, ...] = ()
    ok: bool = True
    graph: Optional[Hypergraph] = None


# Probabilities ----------------------------------------------------------------

def _chain_rule(graph: Hypergraph, avoid: Iterable[int], given: Iterable[int],
                order: Optional[VertexOrdering],
                single: Callable[[Hypergraph, int, VertexOrdering], Fraction]) -> Fraction:
    """
    P_H(avoid | given) as a product of single-vertex evaluations, deleting
    ``given`` first and then each avoided vertex after it is evaluated.
    """
    avoid = graph.require_vertices(avoid)
    given = graph.require_vertices(given)
    if avoid & given:
        raise DisjointnessViolatedError(f"Avoid and given sets share vertices {sorted(avoid & given)}")
    order = VertexOrdering.for_graph(graph, order)

    current, vertex_map = delete_vertices(graph, given)
    current_order = order.restrict(vertex_map)
    value = Fraction(1)
    for vertex in order.sort(avoid):
        local = vertex_map[vertex]
        value *= single(current, local, current_order)
        current, step_map = delete_vertices(current, [local])
        current_order = current_order.restrict(step_map)
        vertex_map = {old: step_map[new] for old, new in vertex_map.items() if new in step_map}
    return value


def estimate_probability(graph: Hypergraph, avoid: Sequence[int], given: Sequence[int] = (),
                         method: str = 'brute', order: Optional[VertexOrdering] = None,
                         budget: Optional[int] = None, max_nodes: Optional[int] = None,
                         steps: int = 100_000, samples: int = 10_000,
                         seed: Optional[int] = None) -> CommandResult:
    """
    P_H(avoid | given) by one of 'brute', 'recursion', 'walktree' or 'montecarlo'.

    Raises:
        HypergraphError: For an unknown method or a missing seed
    """
    if method == 'brute':
        probability = prob_avoid(graph, avoid, given, budget)
    elif method == 'recursion':
        value = _chain_rule(
            graph, avoid, given, order,
            lambda h, v, o: prob_via_recursion(h, v, o, budget).value,
        )
        probability = Probability(value, method='recursion')
    elif method == 'walktree':
        value = _chain_rule(
            graph, avoid, given, order,
            lambda h, v, o: prob_on_hypertree(build_walk_tree(h, v, o, max_nodes).tree, 0).value,
        )
        probability = Probability(value, method='walktree')
    elif method == 'montecarlo':
        if seed is None:
            raise HypergraphError("The montecarlo method needs --seed")
        avoid_set = graph.require_vertices(avoid)
        given_set = graph.require_vertices(given)
        if avoid_set & given_set:
            raise DisjointnessViolatedError(f"Avoid and given sets share vertices {sorted(avoid_set & given_set)}")
        residual, vertex_map = delete_vertices(graph, given_set)
        estimate = mc_estimate_avoid(residual, [vertex_map[v] for v in avoid_set], steps, samples, seed)
        payload = {'method': method, 'avoid': sorted(avoid_set), 'given': sorted(given_set), **estimate.as_dict()}
        return CommandResult(payload=payload)
    else:
        raise HypergraphError(f"Unknown method {method!r}")

    payload = {
        'method': method,
        'avoid': sorted(set(avoid)),
        'given': sorted(set(given)),
        'prob': probability.as_dict(),
        'decimal': to_decimal(probability.value),
    }
    return CommandResult(payload=payload)


# Verification suites ------------------------------------------------------------

def _instances(graph: Optional[Hypergraph], corpus: Optional[str], name: str = 'input') -> List[Instance]:
    if corpus:
        return list(load_corpus(corpus))
    if graph is None:
        raise HypergraphError("Give a hypergraph file or --corpus")
    return [Instance(name, graph, degree_report(graph).regular_degree)]


def _summary(records: List[dict], check: str) -> CommandResult:
    failures = [record for record in records if not record['ok']]
    for record in failures:
        logger.warning(f"{check} check failed: {record}")
    payload = {
        'check': check,
        'checked': len(records),
        'failures': len(failures),
        'ok': not failures,
        'records': records,
    }
    columns = tuple(records[0]) if records else ()
    return CommandResult(payload=payload, rows=records, columns=columns, ok=not failures)


def verify_godsil_suite(graph: Optional[Hypergraph] = None, corpus: Optional[str] = None,
                        roots: Optional[Sequence[int]] = None, orders: int = 5, seed: int = 0,
                        max_nodes: Optional[int] = None, budget: Optional[int] = None) -> CommandResult:
    """
    The walk-tree identity for every instance, root and ordering.

    The identity order is always checked; ``orders - 1`` further orderings are
    seeded shuffles. For 2-uniform inputs the walk tree is also compared
    with the path tree node by node.
    """
    rng = random.Random(seed)
    records = []
    for instance in _instances(graph, corpus):
        h = instance.graph
        checked_roots = h.vertices if roots is None else roots
        orderings = [VertexOrdering.identity(h.n)]
        orderings += [VertexOrdering.shuffled(h.n, rng) for _ in range(max(orders, 1) - 1)]
        for root in checked_roots:
            for ordering in orderings:
                try:
                    report = verify_godsil(h, root, ordering, max_nodes, budget)
                except BudgetExceededError as e:
                    logger.warning(f"Skipping {instance.name} at {root}: {e}")
                    continue
                record = {
                    'instance': instance.name,
                    'root': root,
                    'order': ','.join(str(v) for v in ordering.perm),
                    'equal': report.equal,
                    'prob_equal': report.prob_equal,
                    'tree_nodes': report.tree_nodes,
                    'ok': report.ok,
                }
                if h.k == 2 and ordering.perm == tuple(range(h.n)):
                    record['path_tree_ok'] = _matches_path_tree(h, root, max_nodes)
                    record['ok'] = record['ok'] and record['path_tree_ok']
                records.append(record)
    return _summary(records, 'godsil')


def _matches_path_tree(graph: Hypergraph, root: int, max_nodes: Optional[int]) -> bool:
    walk_tree = build_walk_tree(graph, root, max_nodes=max_nodes)
    paths = path_tree(graph, root)
    walk_nodes = {walk.vertices for walk in walk_tree.walks}
    if walk_nodes != set(paths.nodes) or len(walk_nodes) != len(walk_tree.walks):
        return False
    for members in walk_tree.tree.edges:
        parent, child = (walk_tree.walks[node].vertices for node in members)
        if not paths.has_edge(parent, child):
            return False
    return True


def verify_identity_suite(graph: Optional[Hypergraph] = None, corpus: Optional[str] = None,
                          budget: Optional[int] = None) -> CommandResult:
    """
    Per instance: the vertex recursion m(H) = x m(H - v) - sum_e m(H - V(e))
    at every vertex, m(H, x) = x^n q(H, -x^k), and
    P_H(v) = q(H - v, 1) / q(H, 1).
    """
    records = []
    for instance in _instances(graph, corpus):
        h = instance.graph
        m_full = matching_polynomial(h, budget).as_poly()

        recursion_ok = True
        ratio_ok = True
        total = count_matchings(h, budget)
        for v in h.vertices:
            minus_v = delete_vertices(h, [v]).graph
            rhs = Poly(x, x) * matching_polynomial(minus_v, budget).as_poly()
            for index in h.incidence[v]:
                rhs -= matching_polynomial(delete_vertices(h, h.edges[index]).graph, budget).as_poly()
            recursion_ok = recursion_ok and rhs == m_full
            expected = Fraction(count_matchings(minus_v, budget), total)
            ratio_ok = ratio_ok and prob_avoid(h, [v], budget=budget).value == expected
            if h.degree(v) == 0:
                ratio_ok = ratio_ok and expected == 1

        q = generating_polynomial(h, budget).as_poly()
        substituted = q.compose(Poly(-x ** h.k, x)) * Poly(x ** h.n, x)
        generating_ok = substituted == m_full
        records.append({
            'instance': instance.name,
            'vertex_recursion': recursion_ok,
            'generating_identity': generating_ok,
            'prob_ratio': ratio_ok,
            'ok': recursion_ok and generating_ok and ratio_ok,
        })
    return _summary(records, 'identity')


def verify_chain_suite(graph: Optional[Hypergraph] = None, corpus: Optional[str] = None,
                       budget: Optional[int] = None, max_pairs: int = 10) -> CommandResult:
    """
    The chain rule P(a, b) = P(a) P(b | a) on up to ``max_pairs`` vertex pairs,
    and independence across the two halves of H + H.
    """
    records = []
    for instance in _instances(graph, corpus):
        h = instance.graph
        pairs = [(a, b) for a in h.vertices for b in h.vertices if a < b][:max_pairs]
        chain_ok = all(
            prob_avoid(h, [a, b], budget=budget).value
            == prob_avoid(h, [a], budget=budget).value * prob_avoid(h, [b], [a], budget=budget).value
            for a, b in pairs
        )
        doubled, offsets = disjoint_union([h, h])
        independence_ok = all(
            prob_avoid(doubled, [a, offsets[1] + b], budget=budget).value
            == prob_avoid(h, [a], budget=budget).value * prob_avoid(h, [b], budget=budget).value
            for a, b in [(0, h.n - 1), (h.n - 1, 0)]
        ) if h.n else True
        records.append({
            'instance': instance.name,
            'pairs': len(pairs),
            'chain_rule': chain_ok,
            'independence': independence_ok,
            'ok': chain_ok and independence_ok,
        })
    return _summary(records, 'chain')


def verify_bounds_suite(graph: Optional[Hypergraph] = None, corpus: Optional[str] = None,
                        d: Optional[int] = None, budget: Optional[int] = None) -> CommandResult:
    """
    On d-regular linear instances: 1/(d+1) <= P_H(v) for every v, the
    two-level bracket holds P_H(v) with upper end (1 + d^(2-k))^-1, and the
    average matching size stays under (1 - 1/(d+1)) n/k.
    """
    records = []
    for instance in _instances(graph, corpus or None):
        h = instance.graph
        degree = d if d is not None else instance.d
        report = degree_report(h)
        if degree is None or report.regular_degree != degree or not report.is_linear:
            raise HypergraphError(f"{instance.name} is not a d-regular linear hypergraph")

        floor = Fraction(1, degree + 1)
        ceiling = 1 / (1 + Fraction(degree) ** (2 - h.k))
        lower_ok = bracket_ok = True
        for v in h.vertices:
            value = prob_avoid(h, [v], budget=budget).value
            bracket = second_level_bounds(h, v)
            lower_ok = lower_ok and floor <= value
            bracket_ok = bracket_ok and bracket.contains(value) and bracket.upper <= ceiling
        average = avg_matching_size(h, budget)
        bound = matching_size_bound(h, degree)
        records.append({
            'instance': instance.name,
            'd': degree,
            'lower_bound': lower_ok,
            'second_level': bracket_ok,
            'average_size': to_decimal(average, 12),
            'average_bound': to_decimal(bound, 12),
            'ok': lower_ok and bracket_ok and average <= bound,
        })
    return _summary(records, 'bounds')


def decomposition_report(graph: Hypergraph, root: int, order: Optional[VertexOrdering] = None,
                         max_nodes: Optional[int] = None) -> CommandResult:
    """Subtree-by-subtree comparison of T(H, v) with the walk trees of vertex deletions."""
    records = []
    for record in walk_tree_decomposition(graph, root, order, max_nodes):
        records.append({
            'edge': record['edge'],
            'vertex': record['vertex'],
            'subtree_nodes': record['subtree_nodes'],
            'residual_tree_nodes': record['residual_tree_nodes'],
            'ok': (record['subtree_nodes'] == record['residual_tree_nodes']
                   and record['subtree_prob'] == record['residual_prob']),
        })
    return _summary(records, 'decomposition')


# Gap report ------------------------------------------------------------------------

def head_probability(k: int, d: int, p0: Fraction, levels: int, prec: Optional[int] = None):
    """Tower statistics, falling back to floating point when the exact run blows up."""
    try:
        return tower_stats(k, d, p0, levels, prec=prec)
    except RationalBlowupError as e:
        logger.warning(f"{e}; continuing in floating point")
        return tower_stats_float(k, d, p0, levels, prec=prec)


def kahn_gap_report(k: int, d: Optional[int] = None, epsilon: Fraction = Fraction(1, 10),
                    p0: Fraction = Fraction(1), ell: int = 5, d_max: int = 200,
                    base_vertices: Optional[int] = None, base_edges: Optional[int] = None,
                    prec: Optional[int] = None) -> CommandResult:
    """
    Fixed points, tower head probability at level 2 ell + 1, and the
    centre/head statistics of the regular counterexample built on it.

    With no ``d`` the smallest degree with three certified fixed points is used.
    """
    if d is None:
        d = smallest_three_point_degree(k, d_max, prec)
    params = DynParams(k, d)
    a = alpha(params, prec)
    beta, gamma = beta_gamma(params, prec, alpha_enclosure=a)
    kahn = kahn_value(params, prec)

    level = 2 * ell + 1
    tower = head_probability(k, d, p0, level, prec)
    p = tower.head_probability
    h0_vertices = h0_edges = None
    if base_vertices is not None and base_edges is not None:
        h0_vertices, h0_edges = tower_size(k, d, base_vertices, base_edges, level)
    stats = counterexample_stats(k, d, p, epsilon, level=level,
                                 h0_vertices=h0_vertices, h0_edges=h0_edges)

    payload = {
        'k': k,
        'd': d,
        'alpha': a.as_dict(),
        'beta': beta.as_dict(),
        'gamma': gamma.as_dict(),
        'kahn': kahn.as_dict(),
        'tower': tower.as_dict(),
        'counterexample': stats.as_dict(),
        'gap': to_decimal(stats.center - stats.head),
        'ok': stats.center_ok and stats.head_ok,
    }
    rows = [
        {'quantity': 'alpha', 'value': to_decimal(a.midpoint), 'reference': ''},
        {'quantity': 'beta', 'value': to_decimal(beta.midpoint), 'reference': ''},
        {'quantity': 'gamma', 'value': to_decimal(gamma.midpoint), 'reference': ''},
        {'quantity': 'kahn', 'value': to_decimal(kahn.midpoint), 'reference': ''},
        {'quantity': 'p', 'value': to_decimal(p), 'reference': f"level {level}"},
        {'quantity': 'P_center', 'value': to_decimal(stats.center), 'reference': f"> {to_decimal(stats.center_bound)}"},
        {'quantity': 'P_head', 'value': to_decimal(stats.head), 'reference': f"< {to_decimal(stats.head_bound)}"},
    ]
    if not payload['ok']:
        logger.warning(f"Gap checks fail at k={k}, d={d}, epsilon={epsilon}")
    return CommandResult(payload=payload, rows=rows, columns=('quantity', 'value', 'reference'),
                         ok=payload['ok'])
