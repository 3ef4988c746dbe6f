"""
Canonical data model for k-uniform hypergraphs.

A Hypergraph is immutable: every operation that changes structure returns a
new instance. Vertex ids are always dense (0..n-1); operations that re-index
return the old->new map alongside the result.
"""

import logging
import random
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import networkx as nx

from .exceptions import (
    DuplicateEdgeError, DuplicateVertexInEdgeError, HypergraphError, MixedUniformityError,
    NonUniformEdgeError, OutOfRangeVertexError, UnknownVertexError,
)

logger = logging.getLogger(__name__)

Edge = Tuple[int, ...]


@dataclass(frozen=True)
class Hypergraph:
    """
    A k-uniform hypergraph on vertices 0..n-1.

    Edges are sorted vertex tuples kept in lexicographic order. Labels record
    construction provenance ("head", "center", "copy:i,j") and never affect
    equality of the structure itself.
    """

    k: int
    n: int
    edges: Tuple[Edge, ...]
    labels: Tuple[Tuple[int, str], ...] = field(default=(), compare=False)

    @property
    def vertices(self) -> range:
        return range(self.n)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @cached_property
    def label_map(self) -> Dict[int, str]:
        return dict(self.labels)

    @cached_property
    def incidence(self) -> Tuple[Tuple[int, ...], ...]:
        """For each vertex, the indices of the edges containing it."""
        buckets: List[List[int]] = [[] for _ in range(self.n)]
        for index, edge in enumerate(self.edges):
            for vertex in edge:
                buckets[vertex].append(index)
        return tuple(tuple(bucket) for bucket in buckets)

    @cached_property
    def edge_masks(self) -> Tuple[int, ...]:
        """Edges as vertex bitmasks, in canonical edge order."""
        return tuple(sum(1 << v for v in edge) for edge in self.edges)

    def degree(self, vertex: int) -> int:
        return len(self.incidence[vertex])

    def vertices_labeled(self, name: str) -> List[int]:
        return [v for v, label in self.labels if label == name]

    def require_vertices(self, vertices: Iterable[int]) -> frozenset:
        """Return ``vertices`` as a frozenset, raising if any is not a vertex of H."""
        chosen = frozenset(vertices)
        unknown = sorted(v for v in chosen if not (isinstance(v, int) and 0 <= v < self.n))
        if unknown:
            raise UnknownVertexError(f"Unknown vertices {unknown} (graph has {self.n} vertices)")
        return chosen

    def __str__(self):
        return f"{self.k}-graph(n={self.n}, m={self.edge_count})"


@dataclass(frozen=True)
class VertexOrdering:
    """A linear order on vertex ids; ``perm[r]`` is the vertex of rank r."""

    perm: Tuple[int, ...]

    def __post_init__(self):
        if sorted(self.perm) != list(range(len(self.perm))):
            raise HypergraphError(f"Ordering {list(self.perm)} is not a permutation of 0..{len(self.perm) - 1}")

    @cached_property
    def rank(self) -> Dict[int, int]:
        return {vertex: position for position, vertex in enumerate(self.perm)}

    def precedes(self, u: int, v: int) -> bool:
        return self.rank[u] < self.rank[v]

    def sort(self, vertices: Iterable[int]) -> List[int]:
        return sorted(vertices, key=self.rank.__getitem__)

    @classmethod
    def identity(cls, n: int) -> 'VertexOrdering':
        return cls(tuple(range(n)))

    @classmethod
    def shuffled(cls, n: int, rng: random.Random) -> 'VertexOrdering':
        perm = list(range(n))
        rng.shuffle(perm)
        return cls(tuple(perm))

    def restrict(self, vertex_map: Mapping[int, int]) -> 'VertexOrdering':
        """The induced order on surviving vertices, renamed through ``vertex_map``."""
        return VertexOrdering(tuple(vertex_map[v] for v in self.perm if v in vertex_map))

    @classmethod
    def for_graph(cls, graph: Hypergraph, order: Optional['VertexOrdering']) -> 'VertexOrdering':
        """Default to id order; check a supplied order covers exactly the graph's vertices."""
        if order is None:
            return cls.identity(graph.n)
        if len(order.perm) != graph.n:
            raise HypergraphError(f"Ordering has {len(order.perm)} vertices, graph has {graph.n}")
        return order


@dataclass(frozen=True)
class DegreeReport:
    degrees: Tuple[int, ...]
    max_codegree: int
    is_linear: bool
    regular_degree: Optional[int]
    extendable_head: Optional[int]
    extendable_degree: Optional[int]

    @property
    def is_regular(self) -> bool:
        return self.regular_degree is not None

    def as_dict(self) -> dict:
        return {
            'degrees': list(self.degrees),
            'max_codegree': self.max_codegree,
            'is_linear': self.is_linear,
            'regular_degree': self.regular_degree,
            'extendable_head': self.extendable_head,
            'extendable_degree': self.extendable_degree,
        }


class VertexDeletion(NamedTuple):
    graph: Hypergraph
    vertex_map: Dict[int, int]


class DisjointUnion(NamedTuple):
    graph: Hypergraph
    offsets: Tuple[int, ...]


def new_hypergraph(k: int, n: int, edges: Iterable[Iterable[int]],
                   labels: Optional[Mapping[int, str]] = None) -> Hypergraph:
    """
    Validate and canonicalize a k-uniform hypergraph.

    Args:
        k: Uniformity (at least 2)
        n: Number of vertices
        edges: Iterable of k-element vertex collections
        labels: Optional vertex -> label map

    Returns:
        Canonical Hypergraph

    Raises:
        NonUniformEdgeError, DuplicateVertexInEdgeError, OutOfRangeVertexError,
        DuplicateEdgeError, HypergraphError
    """
    if not isinstance(k, int) or k < 2:
        raise HypergraphError(f"Uniformity must be an integer >= 2, got {k!r}")
    if not isinstance(n, int) or n < 0:
        raise HypergraphError(f"Vertex count must be a non-negative integer, got {n!r}")

    canonical = []
    seen = set()
    for raw in edges:
        members = list(raw)
        if len(set(members)) != len(members):
            raise DuplicateVertexInEdgeError(f"Edge {members} repeats a vertex")
        if len(members) != k:
            raise NonUniformEdgeError(f"Edge {members} has {len(members)} vertices, expected {k}")
        for vertex in members:
            if not isinstance(vertex, int) or not 0 <= vertex < n:
                raise OutOfRangeVertexError(f"Edge {members} uses vertex {vertex!r} outside [0, {n})")
        edge = tuple(sorted(members))
        if edge in seen:
            raise DuplicateEdgeError(f"Edge {list(edge)} appears more than once")
        seen.add(edge)
        canonical.append(edge)
    canonical.sort()

    label_items = ()
    if labels:
        for vertex in labels:
            if not isinstance(vertex, int) or not 0 <= vertex < n:
                raise OutOfRangeVertexError(f"Label on vertex {vertex!r} outside [0, {n})")
        label_items = tuple(sorted((v, str(name)) for v, name in labels.items()))

    return Hypergraph(k=k, n=n, edges=tuple(canonical), labels=label_items)


def _rebuild(k: int, n: int, edges: Iterable[Edge], labels: Mapping[int, str]) -> Hypergraph:
    # Inputs come from an already-valid graph; only re-sort.
    return Hypergraph(
        k=k, n=n,
        edges=tuple(sorted(tuple(sorted(edge)) for edge in edges)),
        labels=tuple(sorted(labels.items())),
    )


def delete_vertices(graph: Hypergraph, removed: Iterable[int]) -> VertexDeletion:
    """
    Return H - S: remove the vertices in S and every edge meeting S.

    Remaining vertices are re-indexed densely in increasing id order; the
    returned map sends each surviving old id to its new id.
    """
    removed = graph.require_vertices(removed)
    if not removed:
        return VertexDeletion(graph, {v: v for v in graph.vertices})

    vertex_map = {}
    for vertex in graph.vertices:
        if vertex not in removed:
            vertex_map[vertex] = len(vertex_map)

    edges = [
        tuple(vertex_map[v] for v in edge)
        for edge in graph.edges
        if not removed.intersection(edge)
    ]
    labels = {vertex_map[v]: name for v, name in graph.labels if v in vertex_map}
    return VertexDeletion(_rebuild(graph.k, len(vertex_map), edges, labels), vertex_map)


def disjoint_union(parts: Sequence[Hypergraph]) -> DisjointUnion:
    """
    Place the parts side by side; part i's vertex v becomes ``offsets[i] + v``.

    Labels of the parts are carried over unchanged.
    """
    if not parts:
        raise HypergraphError("Disjoint union needs at least one part")
    k = parts[0].k
    mixed = sorted({part.k for part in parts})
    if len(mixed) > 1:
        raise MixedUniformityError(f"Cannot join parts of uniformities {mixed}")
    if len(parts) == 1:
        return DisjointUnion(parts[0], (0,))

    offsets = []
    edges = []
    labels = {}
    total = 0
    for part in parts:
        offsets.append(total)
        edges.extend(tuple(total + v for v in edge) for edge in part.edges)
        labels.update({total + v: name for v, name in part.labels})
        total += part.n
    return DisjointUnion(_rebuild(k, total, edges, labels), tuple(offsets))


def degree_report(graph: Hypergraph) -> DegreeReport:
    """Degrees, maximum pair codegree, linearity, regularity and extendable head."""
    degrees = tuple(graph.degree(v) for v in graph.vertices)

    codegrees = Counter()
    for edge in graph.edges:
        codegrees.update(combinations(edge, 2))
    max_codegree = max(codegrees.values(), default=0)

    distinct = set(degrees)
    regular_degree = degrees[0] if len(distinct) == 1 else None

    extendable_head = None
    extendable_degree = None
    if graph.n >= 2:
        top = max(degrees)
        deficient = [v for v, deg in enumerate(degrees) if deg != top]
        if top >= 1 and len(deficient) == 1 and degrees[deficient[0]] == top - 1:
            extendable_head = deficient[0]
            extendable_degree = top
    return DegreeReport(
        degrees=degrees,
        max_codegree=max_codegree,
        is_linear=max_codegree <= 1,
        regular_degree=regular_degree,
        extendable_head=extendable_head,
        extendable_degree=extendable_degree,
    )


def incidence_graph(graph: Hypergraph) -> nx.Graph:
    """Bipartite vertex/edge incidence graph with nodes ('v', i) and ('e', j)."""
    bipartite = nx.Graph()
    bipartite.add_nodes_from((('v', v) for v in graph.vertices), kind='vertex')
    bipartite.add_nodes_from((('e', j) for j in range(graph.edge_count)), kind='edge')
    for index, edge in enumerate(graph.edges):
        bipartite.add_edges_from((('v', v), ('e', index)) for v in edge)
    return bipartite


def is_hypertree(graph: Hypergraph) -> bool:
    """True iff the incidence graph is a tree (unique Berge path between any two vertices)."""
    if graph.n == 0:
        return False
    return nx.is_tree(incidence_graph(graph))


def connected_components(graph: Hypergraph) -> List[List[int]]:
    """Vertex sets of the connected components, each sorted, in order of least vertex."""
    components = nx.connected_components(incidence_graph(graph))
    vertex_sets = [sorted(v for kind, v in comp if kind == 'v') for comp in components]
    return sorted((vs for vs in vertex_sets if vs), key=lambda vs: vs[0])


def induced_subgraph(graph: Hypergraph, vertices: Iterable[int]) -> VertexDeletion:
    """Keep only ``vertices`` (and the edges inside them)."""
    keep = graph.require_vertices(vertices)
    return delete_vertices(graph, [v for v in graph.vertices if v not in keep])
