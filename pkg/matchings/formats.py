"""
Text and JSON codecs for hypergraphs and walk-tree sidecars.

Text format (UTF-8, line oriented, whitespace separated, 0-based)::

    # comment
    k 3
    vertices 5
    edge 0 1 2
    edge 2 3 4
    label 0 head

JSON mirror: {"k": 3, "n": 5, "edges": [[0, 1, 2], [2, 3, 4]], "labels": {"0": "head"}}
"""

import json
import logging
from pathlib import Path
from typing import Union

from .exceptions import HypergraphError, HypergraphSyntaxError
from .hypergraph import Hypergraph, new_hypergraph

logger = logging.getLogger(__name__)


def _parse_int(token: str, line_no: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise HypergraphSyntaxError(f"{what} must be an integer, got {token!r}", line=line_no)


def parse(text: str) -> Hypergraph:
    """
    Parse the line-oriented hypergraph format.

    Raises:
        HypergraphSyntaxError: On malformed lines (with line number)
        HypergraphError subclasses: On structural violations
    """
    k = None
    n = None
    edges = []
    labels = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        keyword, *args = line.split()
        if keyword == 'k':
            if len(args) != 1:
                raise HypergraphSyntaxError("'k' takes exactly one integer", line=line_no)
            k = _parse_int(args[0], line_no, 'k')
        elif keyword == 'vertices':
            if len(args) != 1:
                raise HypergraphSyntaxError("'vertices' takes exactly one integer", line=line_no)
            n = _parse_int(args[0], line_no, 'vertices')
        elif keyword == 'edge':
            if k is None or n is None:
                raise HypergraphSyntaxError("'edge' before 'k' and 'vertices'", line=line_no)
            edges.append([_parse_int(token, line_no, 'vertex') for token in args])
        elif keyword == 'label':
            if len(args) < 2:
                raise HypergraphSyntaxError("'label' takes a vertex and a name", line=line_no)
            labels[_parse_int(args[0], line_no, 'vertex')] = ' '.join(args[1:])
        else:
            raise HypergraphSyntaxError(f"Unknown directive {keyword!r}", line=line_no)

    if k is None:
        raise HypergraphSyntaxError("Missing 'k' line")
    if n is None:
        raise HypergraphSyntaxError("Missing 'vertices' line")
    return new_hypergraph(k, n, edges, labels=labels)


def _text_label(vertex: int, name: str) -> str:
    # parse() cuts at '#' and collapses runs of whitespace.
    if not name or '#' in name or name != ' '.join(name.split()):
        raise HypergraphSyntaxError(
            f"Label {name!r} of vertex {vertex} cannot be written in the text format; use the JSON form"
        )
    return name


def serialize(graph: Hypergraph) -> str:
    """
    Canonical text form; ``parse(serialize(H)) == H``.

    Raises:
        HypergraphSyntaxError: If a label is empty, contains '#' or has irregular whitespace
    """
    lines = [f"k {graph.k}", f"vertices {graph.n}"]
    lines.extend("edge " + " ".join(str(v) for v in edge) for edge in graph.edges)
    lines.extend(f"label {v} {_text_label(v, name)}" for v, name in graph.labels)
    return "\n".join(lines) + "\n"


def to_json_dict(graph: Hypergraph) -> dict:
    payload = {'k': graph.k, 'n': graph.n, 'edges': [list(edge) for edge in graph.edges]}
    if graph.labels:
        payload['labels'] = {str(v): name for v, name in graph.labels}
    return payload


def from_json_dict(payload: dict) -> Hypergraph:
    try:
        k = payload['k']
        n = payload['n']
        edges = payload.get('edges', [])
        labels = {int(v): name for v, name in payload.get('labels', {}).items()}
    except (KeyError, TypeError, ValueError, AttributeError) as e:
        raise HypergraphSyntaxError(f"Invalid hypergraph JSON: {e}")
    return new_hypergraph(k, n, edges, labels=labels)


def loads(text: str) -> Hypergraph:
    """Parse either the text format or the JSON mirror."""
    if text.lstrip().startswith('{'):
        try:
            payload = json.loads(text)
        except ValueError as e:
            raise HypergraphSyntaxError(f"Invalid JSON: {e}")
        return from_json_dict(payload)
    return parse(text)


def read_hypergraph(path: Union[str, Path]) -> Hypergraph:
    """Load a hypergraph file in either format."""
    try:
        text = Path(path).read_text(encoding='utf-8')
    except UnicodeDecodeError as e:
        raise HypergraphSyntaxError(f"{path} is not valid UTF-8 (byte offset {e.start}: {e.reason})")
    except OSError as e:
        raise HypergraphError(f"Cannot read {path}: {e}")
    graph = loads(text)
    logger.info(f"Loaded {graph} from {path}")
    return graph


def walk_tree_sidecar(tree) -> dict:
    """
    Node id -> walk mapping for a WalkTree.

    Each walk is the alternating list [v0, e1, v1, ..., el, vl] of vertex and
    edge ids of the host graph; ``edge_sources`` gives the host edge behind
    each tree hyperedge in canonical order.
    """
    return {
        'root': tree.root,
        'walks': {str(node): walk.as_sequence() for node, walk in enumerate(tree.walks)},
        'edge_sources': list(tree.edge_sources),
    }
