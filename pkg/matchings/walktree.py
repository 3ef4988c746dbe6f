"""
Conflict-free walks and k-walk-trees.

A conflict-free walk from v is a Berge path (v0, e1, v1, ..., el, vl) where
each edge e_i, i >= 2, avoids the conflict sets of the earlier steps. The
conflict set of a step through e into exit vertex u is its entry vertex plus
every other vertex of e that precedes u in the fixed ordering. The walk-tree
T(H, v) has the walks from v as its vertices, and one hyperedge for each walk
W and each admissible edge e: W together with its k - 1 one-step extensions
through e.

The walk tree turns P_H(v) into a bottom-up computation on a hypertree,
and its matching polynomial ratio agrees with that of H.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, List, NamedTuple, Optional, Tuple

import networkx as nx

from .conf import resolve
from .counting import MatchingPolynomial, Probability, matching_polynomial, prob_avoid
from .exceptions import BudgetExceededError, InvalidWalkError, NotAHypertreeError, UnknownVertexError
from .hypergraph import Hypergraph, VertexOrdering, delete_vertices, induced_subgraph, is_hypertree

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConflictFreeWalk:
    """Designated vertices v0..vl, host edge indices e1..el and the cumulative conflict set."""

    vertices: Tuple[int, ...]
    edges: Tuple[int, ...] = ()
    conflict: FrozenSet[int] = frozenset()

    @classmethod
    def start(cls, vertex: int) -> 'ConflictFreeWalk':
        return cls(vertices=(vertex,))

    @property
    def end(self) -> int:
        return self.vertices[-1]

    @property
    def length(self) -> int:
        return len(self.edges)

    def as_sequence(self) -> List[int]:
        sequence = [self.vertices[0]]
        for edge, vertex in zip(self.edges, self.vertices[1:]):
            sequence.extend((edge, vertex))
        return sequence


class Extension(NamedTuple):
    edge: int
    exit_vertex: int
    walk: ConflictFreeWalk


def _step(graph: Hypergraph, order: VertexOrdering, walk: ConflictFreeWalk,
          edge_index: int, exit_vertex: int) -> ConflictFreeWalk:
    entry = walk.end
    step_conflict = {
        w for w in graph.edges[edge_index]
        if w not in (entry, exit_vertex) and order.precedes(w, exit_vertex)
    }
    step_conflict.add(entry)
    return ConflictFreeWalk(
        vertices=walk.vertices + (exit_vertex,),
        edges=walk.edges + (edge_index,),
        conflict=walk.conflict | step_conflict,
    )


def _extensions(graph: Hypergraph, order: VertexOrdering, walk: ConflictFreeWalk) -> List[Extension]:
    found = []
    for edge_index in graph.incidence[walk.end]:
        edge = graph.edges[edge_index]
        if walk.conflict.intersection(edge):
            continue
        for exit_vertex in order.sort(w for w in edge if w != walk.end):
            child = _step(graph, order, walk, edge_index, exit_vertex)
            if exit_vertex in walk.vertices or edge_index in walk.edges:
                raise InvalidWalkError(
                    f"Conflict-free extension repeated a vertex or edge: {child.as_sequence()}"
                )
            found.append(Extension(edge_index, exit_vertex, child))
    return found


def validate_walk(graph: Hypergraph, order: VertexOrdering, walk: ConflictFreeWalk) -> None:
    """
    Check the Berge condition, conflict-freeness and the stored conflict set.

    Raises:
        InvalidWalkError: If any condition fails
    """
    if not walk.vertices or len(walk.vertices) != len(walk.edges) + 1:
        raise InvalidWalkError(f"Walk needs one more vertex than edges: {walk.as_sequence()}")
    try:
        graph.require_vertices(walk.vertices)
    except UnknownVertexError as e:
        raise InvalidWalkError(str(e))

    rebuilt = ConflictFreeWalk.start(walk.vertices[0])
    for edge_index, exit_vertex in zip(walk.edges, walk.vertices[1:]):
        if not 0 <= edge_index < graph.edge_count:
            raise InvalidWalkError(f"Unknown edge index {edge_index}")
        edge = graph.edges[edge_index]
        if rebuilt.end not in edge or exit_vertex not in edge or exit_vertex == rebuilt.end:
            raise InvalidWalkError(f"Edge {edge_index} does not join {rebuilt.end} to {exit_vertex}")
        if rebuilt.conflict.intersection(edge):
            raise InvalidWalkError(f"Edge {edge_index} meets the conflict set {sorted(rebuilt.conflict)}")
        rebuilt = _step(graph, order, rebuilt, edge_index, exit_vertex)

    if len(set(rebuilt.vertices)) != len(rebuilt.vertices) or len(set(rebuilt.edges)) != len(rebuilt.edges):
        raise InvalidWalkError(f"Walk repeats a vertex or edge: {walk.as_sequence()}")
    if walk.conflict != rebuilt.conflict:
        raise InvalidWalkError(
            f"Stored conflict set {sorted(walk.conflict)} differs from {sorted(rebuilt.conflict)}"
        )


def conflict_free_extensions(graph: Hypergraph, order: Optional[VertexOrdering],
                             walk: ConflictFreeWalk) -> List[Extension]:
    """
    All one-edge extensions of ``walk``: (edge, exit vertex, child walk) for
    every edge at the walk's end that avoids its conflict set, ordered by edge
    index and then by exit vertex rank.
    """
    order = VertexOrdering.for_graph(graph, order)
    validate_walk(graph, order, walk)
    return _extensions(graph, order, walk)


@dataclass(frozen=True)
class WalkTree:
    """
    T(H, v) as a hypergraph on node ids, plus the walk behind each node.

    Node 0 is the root walk (v). ``edge_sources[j]`` is the host edge that
    induced tree hyperedge j (in the tree's canonical edge order).
    """

    tree: Hypergraph
    walks: Tuple[ConflictFreeWalk, ...]
    edge_sources: Tuple[int, ...]
    host_root: int
    root: int = 0

    @property
    def node_count(self) -> int:
        return self.tree.n


def build_walk_tree(graph: Hypergraph, v: int, order: Optional[VertexOrdering] = None,
                    max_nodes: Optional[int] = None) -> WalkTree:
    """
    Breadth-first closure of conflict-free extensions from the walk (v).

    Walks with no admissible extension become leaves.

    Raises:
        BudgetExceededError: If the tree would exceed ``max_nodes`` nodes
    """
    graph.require_vertices([v])
    order = VertexOrdering.for_graph(graph, order)
    max_nodes = resolve(max_nodes, 'WALKTREE_MAX_NODES')

    walks = [ConflictFreeWalk.start(v)]
    hyperedges = []
    position = 0
    while position < len(walks):
        grouped: Dict[int, List[Extension]] = defaultdict(list)
        for extension in _extensions(graph, order, walks[position]):
            grouped[extension.edge].append(extension)
        for edge_index, group in grouped.items():
            members = [position]
            for extension in group:
                walks.append(extension.walk)
                members.append(len(walks) - 1)
            if len(walks) > max_nodes:
                raise BudgetExceededError(
                    f"Walk tree of vertex {v} exceeds {max_nodes} nodes", budget=max_nodes
                )
            hyperedges.append((tuple(members), edge_index))
        position += 1

    hyperedges.sort()
    tree = Hypergraph(
        k=graph.k,
        n=len(walks),
        edges=tuple(members for members, _ in hyperedges),
        labels=((0, 'root'),),
    )
    logger.info(f"Built walk tree of {graph} at {v}: {tree.n} nodes, {tree.edge_count} hyperedges")
    return WalkTree(
        tree=tree,
        walks=tuple(walks),
        edge_sources=tuple(source for _, source in hyperedges),
        host_root=v,
    )


def prob_on_hypertree(tree: Hypergraph, root: int) -> Probability:
    """
    P_T(root) on a hypertree by one bottom-up pass: a node's value is
    1 / (1 + sum over child hyperedges of the product of its children's values).

    Raises:
        NotAHypertreeError: If ``tree`` is not a hypertree
    """
    tree.require_vertices([root])
    if not is_hypertree(tree):
        raise NotAHypertreeError(f"{tree} is not a hypertree")

    parent_edge = {root: None}
    order = [root]
    for u in order:
        for index in tree.incidence[u]:
            if index == parent_edge[u]:
                continue
            for w in tree.edges[index]:
                if w != u:
                    parent_edge[w] = index
                    order.append(w)

    value: Dict[int, Fraction] = {}
    for u in reversed(order):
        weight = Fraction(0)
        for index in tree.incidence[u]:
            if index == parent_edge[u]:
                continue
            product = Fraction(1)
            for w in tree.edges[index]:
                if w != u:
                    product *= value[w]
            weight += product
        value[u] = 1 / (1 + weight)
    return Probability(value[root], method='walktree')


def prob_via_recursion(graph: Hypergraph, v: int, order: Optional[VertexOrdering] = None,
                       budget: Optional[int] = None) -> Probability:
    """
    P_H(v) from the vertex recursion on H itself:

        P_H(v) = 1 / (1 + sum_i prod_j P_{H - {v, u_i1, ..., u_i(j-1)}}(u_ij))

    where u_i1 < ... < u_i(k-1) are the other vertices of the i-th edge at v.
    Sub-results are cached on (deleted set, vertex); the walk tree is never
    materialized.

    Raises:
        BudgetExceededError: If more than ``budget`` distinct sub-problems arise
    """
    graph.require_vertices([v])
    order = VertexOrdering.for_graph(graph, order)
    budget = resolve(budget, 'COUNT_BUDGET')
    cache: Dict[Tuple[int, int], Fraction] = {}
    pending: Dict[Tuple[int, int], List[List[Tuple[int, int]]]] = {}

    def children(removed: int, u: int) -> List[List[Tuple[int, int]]]:
        # One group per edge at u that survives ``removed``; the keys do not depend on any value.
        groups = []
        for index in graph.incidence[u]:
            if graph.edge_masks[index] & removed:
                continue
            deleted = removed | (1 << u)
            group = []
            for w in order.sort(w for w in graph.edges[index] if w != u):
                group.append((deleted, w))
                deleted |= 1 << w
            groups.append(group)
        return groups

    # Post-order over an explicit stack: deleted sets only grow, so there are no cycles.
    stack = [(0, v)]
    while stack:
        key = stack[-1]
        if key in cache:
            stack.pop()
            continue
        groups = pending.get(key)
        if groups is None:
            if len(cache) + len(pending) >= budget:
                raise BudgetExceededError(f"Vertex recursion exceeded {budget} sub-problems", budget=budget)
            groups = pending[key] = children(*key)
        missing = [child for group in groups for child in group if child not in cache]
        if missing:
            stack.extend(missing)
            continue
        stack.pop()
        weight = Fraction(0)
        for group in groups:
            product = Fraction(1)
            for child in group:
                product *= cache[child]
            weight += product
        cache[key] = 1 / (1 + weight)
        del pending[key]

    result = cache[(0, v)]
    logger.debug(f"Vertex recursion at {v} used {len(cache)} sub-problems")
    return Probability(result, method='recursion')


@dataclass(frozen=True)
class GodsilReport:
    """Both sides of m(H - v)/m(H) = m(T - V)/m(T) plus the probability corollary."""

    host_root: int
    graph_minus_root: MatchingPolynomial
    graph_full: MatchingPolynomial
    tree_minus_root: MatchingPolynomial
    tree_full: MatchingPolynomial
    equal: bool
    prob_graph: Probability
    prob_tree: Probability
    tree_nodes: int
    tree_edges: int

    @property
    def prob_equal(self) -> bool:
        return self.prob_graph.value == self.prob_tree.value

    @property
    def ok(self) -> bool:
        return self.equal and self.prob_equal

    def as_dict(self) -> dict:
        return {
            'root': self.host_root,
            'equal': self.equal,
            'prob_equal': self.prob_equal,
            'lhs': {'num': self.graph_minus_root.as_dict(), 'den': self.graph_full.as_dict()},
            'rhs': {'num': self.tree_minus_root.as_dict(), 'den': self.tree_full.as_dict()},
            'prob_graph': self.prob_graph.as_dict(),
            'prob_tree': self.prob_tree.as_dict(),
            'tree_nodes': self.tree_nodes,
            'tree_edges': self.tree_edges,
        }


def verify_godsil(graph: Hypergraph, v: int, order: Optional[VertexOrdering] = None,
                  max_nodes: Optional[int] = None, budget: Optional[int] = None) -> GodsilReport:
    """
    Check m(H - v) * m(T) == m(H) * m(T - V) as an exact polynomial identity
    for T = T(H, v), and P_H(v) == P_T(V).
    """
    walk_tree = build_walk_tree(graph, v, order, max_nodes)
    tree = walk_tree.tree

    graph_minus = matching_polynomial(delete_vertices(graph, [v]).graph, budget)
    graph_full = matching_polynomial(graph, budget)
    tree_minus = matching_polynomial(delete_vertices(tree, [walk_tree.root]).graph, budget)
    tree_full = matching_polynomial(tree, budget)
    equal = graph_minus.as_poly() * tree_full.as_poly() == graph_full.as_poly() * tree_minus.as_poly()

    report = GodsilReport(
        host_root=v,
        graph_minus_root=graph_minus,
        graph_full=graph_full,
        tree_minus_root=tree_minus,
        tree_full=tree_full,
        equal=equal,
        prob_graph=prob_avoid(graph, [v], budget=budget),
        prob_tree=prob_on_hypertree(tree, walk_tree.root),
        tree_nodes=tree.n,
        tree_edges=tree.edge_count,
    )
    if not report.ok:
        logger.warning(f"Walk-tree identity failed on {graph} at vertex {v}")
    return report


@dataclass(frozen=True)
class SecondLevelBounds:
    lower: Fraction
    upper: Fraction

    def contains(self, value: Fraction) -> bool:
        return self.lower <= value <= self.upper

    def as_dict(self) -> dict:
        return {
            'lower': {'num': str(self.lower.numerator), 'den': str(self.lower.denominator)},
            'upper': {'num': str(self.upper.numerator), 'den': str(self.upper.denominator)},
        }


def second_level_bounds(graph: Hypergraph, v: int, order: Optional[VertexOrdering] = None) -> SecondLevelBounds:
    """
    Bracket P_H(v) by expanding the vertex recursion two levels deep and
    substituting 0 (lower) or 1 (upper) for every deeper probability.
    """
    graph.require_vertices([v])
    order = VertexOrdering.for_graph(graph, order)

    def expand(removed: int, u: int, depth: int, leaf: Fraction) -> Fraction:
        if depth == 2:
            return leaf
        weight = Fraction(0)
        for index in graph.incidence[u]:
            if graph.edge_masks[index] & removed:
                continue
            deleted = removed | (1 << u)
            product = Fraction(1)
            for w in order.sort(w for w in graph.edges[index] if w != u):
                product *= expand(deleted, w, depth + 1, leaf)
                deleted |= 1 << w
            weight += product
        return 1 / (1 + weight)

    return SecondLevelBounds(
        lower=expand(0, v, 0, Fraction(0)),
        upper=expand(0, v, 0, Fraction(1)),
    )


def walk_tree_decomposition(graph: Hypergraph, v: int, order: Optional[VertexOrdering] = None,
                            max_nodes: Optional[int] = None) -> List[dict]:
    """
    Compare each subtree T(U_ij) below the root with T(H - {v, u_i1..u_i(j-1)}, u_ij).

    One record per (edge at v, position j) with node counts and probabilities
    of both sides.
    """
    order = VertexOrdering.for_graph(graph, order)
    walk_tree = build_walk_tree(graph, v, order, max_nodes)
    records = []
    for edge_index in graph.incidence[v]:
        removed = [v]
        for exit_vertex in order.sort(w for w in graph.edges[edge_index] if w != v):
            descendants = [
                node for node, walk in enumerate(walk_tree.walks)
                if walk.length >= 1 and walk.edges[0] == edge_index and walk.vertices[1] == exit_vertex
            ]
            sub_root = min(descendants)
            subtree, subtree_map = induced_subgraph(walk_tree.tree, descendants)

            residual, vertex_map = delete_vertices(graph, removed)
            residual_order = order.restrict(vertex_map)
            residual_tree = build_walk_tree(residual, vertex_map[exit_vertex], residual_order, max_nodes)

            records.append({
                'edge': edge_index,
                'vertex': exit_vertex,
                'subtree_nodes': subtree.n,
                'residual_tree_nodes': residual_tree.node_count,
                'subtree_prob': prob_on_hypertree(subtree, subtree_map[sub_root]).value,
                'residual_prob': prob_avoid(residual, [vertex_map[exit_vertex]]).value,
            })
            removed.append(exit_vertex)
    return records


def walk_tree_graph(walk_tree: WalkTree) -> nx.Graph:
    """A 2-uniform walk tree as a networkx tree with host endpoints on the nodes."""
    tree = nx.Graph()
    for node, walk in enumerate(walk_tree.walks):
        tree.add_node(node, endpoint=walk.end, root=node == walk_tree.root)
    tree.add_edges_from(walk_tree.tree.edges)
    return tree


def path_tree(graph: Hypergraph, v: int) -> nx.Graph:
    """
    Godsil's path tree of a graph (k = 2): nodes are the simple paths from v,
    each joined to the path one vertex shorter.
    """
    if graph.k != 2:
        raise InvalidWalkError("Path trees are defined for 2-uniform graphs only")
    host = nx.Graph()
    host.add_nodes_from(graph.vertices)
    host.add_edges_from(graph.edges)

    tree = nx.Graph()
    tree.add_node((v,), endpoint=v, root=True)
    for target in graph.vertices:
        if target == v:
            continue
        for path in nx.all_simple_paths(host, v, target):
            for length in range(2, len(path) + 1):
                prefix = tuple(path[:length])
                tree.add_node(prefix, endpoint=prefix[-1], root=False)
                tree.add_edge(prefix[:-1], prefix)
    return tree
