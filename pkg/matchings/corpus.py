"""
Named collections of small hypergraphs for identity checks.

- ``linear3``: linear 3-graphs with at most 7 vertices and 3 edges, one per
  isomorphism class
- ``atlas``: every graph on 1 to 6 vertices (networkx graph atlas)
- ``random``: seeded random 3- and 4-graphs on at most 12 vertices
- ``regular``: d-regular linear instances with their degree
"""

import logging
import random
from functools import lru_cache
from itertools import combinations
from typing import Dict, List, NamedTuple, Optional, Tuple

import networkx as nx

from .constructions import regular_linear
from .exceptions import HypergraphError
from .hypergraph import Hypergraph, degree_report, incidence_graph, new_hypergraph

logger = logging.getLogger(__name__)


class Instance(NamedTuple):
    name: str
    graph: Hypergraph
    d: Optional[int] = None


FANO_LINES = ((0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6), (2, 4, 5))


def _compact(k: int, edges: Tuple[Tuple[int, ...], ...]) -> Hypergraph:
    used = sorted({v for edge in edges for v in edge})
    index = {v: i for i, v in enumerate(used)}
    return new_hypergraph(k, len(used), [[index[v] for v in edge] for edge in edges])


def _is_linear(edges) -> bool:
    return all(len(set(a) & set(b)) <= 1 for a, b in combinations(edges, 2))


@lru_cache(maxsize=None)
def linear_triple_systems(max_vertices: int = 7, max_edges: int = 3) -> Tuple[Instance, ...]:
    """Linear 3-graphs without isolated vertices, deduplicated up to isomorphism."""
    triples = list(combinations(range(max_vertices), 3))
    buckets: Dict[str, List[Tuple[nx.Graph, Hypergraph]]] = {}
    found = []
    for m in range(1, max_edges + 1):
        for edges in combinations(triples, m):
            if not _is_linear(edges):
                continue
            graph = _compact(3, edges)
            incidence = incidence_graph(graph)
            key = nx.weisfeiler_lehman_graph_hash(incidence, node_attr='kind')
            bucket = buckets.setdefault(key, [])
            same_kind = nx.algorithms.isomorphism.categorical_node_match('kind', None)
            if any(nx.is_isomorphic(incidence, other, node_match=same_kind) for other, _ in bucket):
                continue
            bucket.append((incidence, graph))
            found.append(Instance(f"linear3-{len(found)}", graph))
    logger.debug(f"Linear 3-graph corpus has {len(found)} classes")
    return tuple(found)


@lru_cache(maxsize=None)
def atlas_graphs(max_vertices: int = 6) -> Tuple[Instance, ...]:
    """Every graph with 1..max_vertices vertices (at most 7), as 2-uniform hypergraphs."""
    if max_vertices > 7:
        raise HypergraphError("The graph atlas stops at 7 vertices")
    found = []
    for index, atlas_graph in enumerate(nx.graph_atlas_g()):
        n = atlas_graph.number_of_nodes()
        if 1 <= n <= max_vertices:
            found.append(Instance(f"atlas-{index}", new_hypergraph(2, n, atlas_graph.edges())))
    return tuple(found)


def random_instances(count: int = 200, seed: int = 0, k_values: Tuple[int, ...] = (3, 4),
                     max_vertices: int = 12, max_edges: int = 8) -> Tuple[Instance, ...]:
    """Seeded random k-graphs; the same seed always gives the same corpus."""
    rng = random.Random(seed)
    found = []
    for index in range(count):
        k = rng.choice(k_values)
        n = rng.randint(k, max_vertices)
        pool = list(combinations(range(n), k))
        edges = rng.sample(pool, rng.randint(1, min(max_edges, len(pool))))
        found.append(Instance(f"random-{index}", new_hypergraph(k, n, edges)))
    return tuple(found)


@lru_cache(maxsize=None)
def regular_linear_instances() -> Tuple[Instance, ...]:
    """d-regular linear graphs small enough for exact counting, tagged with d."""
    found = [
        Instance('regular-3-1', regular_linear(3, 1), 1),
        Instance('regular-3-2', regular_linear(3, 2), 2),
        Instance('regular-4-2', regular_linear(4, 2), 2),
        Instance('regular-2-3', regular_linear(2, 3), 3),
        Instance('fano', new_hypergraph(3, 7, FANO_LINES), 3),
        Instance('k4', new_hypergraph(2, 4, combinations(range(4), 2)), 3),
    ]
    for n in range(3, 9):
        found.append(Instance(f"cycle-{n}", new_hypergraph(2, n, [(i, (i + 1) % n) for i in range(n)]), 2))

    for instance in found:
        report = degree_report(instance.graph)
        if report.regular_degree != instance.d or not report.is_linear:
            raise HypergraphError(f"Corpus instance {instance.name} is not {instance.d}-regular linear")
    return tuple(found)


CORPORA = {
    'linear3': linear_triple_systems,
    'atlas': atlas_graphs,
    'random': random_instances,
    'regular': regular_linear_instances,
}


def load_corpus(name: str) -> Tuple[Instance, ...]:
    """Instances of a named corpus."""
    try:
        builder = CORPORA[name]
    except KeyError:
        raise HypergraphError(f"Unknown corpus {name!r}; choose from {sorted(CORPORA)}")
    return builder()
