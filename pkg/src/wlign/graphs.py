"""Coloured directed graphs, atomic tuple types, JSON IO and the test-pair corpus."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np


class GraphFormatError(ValueError):
    """Raised when a graph document or graph construction is invalid."""


@dataclass(frozen=True)
class ColouredGraph:
    """A directed graph on vertices ``0..n-1`` with an opaque colour label per vertex.

    Undirected graphs are represented by symmetric edge sets.  Self-loops are allowed.
    """

    n: int
    edges: frozenset
    colours: tuple

    def __post_init__(self):
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 1:
            raise GraphFormatError(f"vertex count must be a positive integer, got {self.n!r}")
        if len(self.colours) != self.n:
            raise GraphFormatError(f"expected {self.n} colours, got {len(self.colours)}")
        for e in self.edges:
            u, v = e
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphFormatError(f"edge endpoint out of range: {e!r}")

    @classmethod
    def build(cls, n: int, edges: Iterable[Sequence[int]], colours: Sequence[str] | None = None,
              undirected: bool = False) -> "ColouredGraph":
        es = set()
        for e in edges:
            if len(e) != 2:
                raise GraphFormatError(f"edge must be a pair, got {e!r}")
            u, v = int(e[0]), int(e[1])
            es.add((u, v))
            if undirected:
                es.add((v, u))
        if colours is None:
            colours = ["a"] * n
        return cls(n, frozenset(es), tuple(str(c) for c in colours))

    @cached_property
    def palette(self) -> tuple:
        """Distinct colour labels in sorted order; the position is the interned colour id."""
        return tuple(sorted(set(self.colours)))

    @cached_property
    def colour_ids(self) -> tuple:
        index = {c: i for i, c in enumerate(self.palette)}
        return tuple(index[c] for c in self.colours)

    @cached_property
    def adjacency(self) -> np.ndarray:
        adj = np.zeros((self.n, self.n), dtype=bool)
        for u, v in self.edges:
            adj[u, v] = True
        adj.flags.writeable = False
        return adj

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.edges

    def is_symmetric(self) -> bool:
        return all((v, u) in self.edges for u, v in self.edges)

    def relabel(self, perm: Sequence[int]) -> "ColouredGraph":
        """Return the image of the graph under the vertex map ``v -> perm[v]``."""
        if sorted(perm) != list(range(self.n)):
            raise GraphFormatError("relabelling must be a permutation of the vertices")
        colours = [None] * self.n
        for v, c in enumerate(self.colours):
            colours[perm[v]] = c
        return ColouredGraph(self.n, frozenset((perm[u], perm[v]) for u, v in self.edges), tuple(colours))

    def tuples(self, k: int) -> Iterator[tuple]:
        """All k-tuples of vertices in lexicographic order."""
        return itertools.product(range(self.n), repeat=k)


class AtomicType(NamedTuple):
    """Round-0 isomorphism type of a vertex tuple."""

    equality_profile: tuple
    edge_profile: tuple
    colour_profile: tuple


def atomic_type(g: ColouredGraph, tup: Sequence[int]) -> AtomicType:
    k = len(tup)
    if k < 1:
        raise ValueError("tuple must have at least one entry")
    for x in tup:
        if not 0 <= x < g.n:
            raise ValueError(f"vertex {x} out of range for graph on {g.n} vertices")
    eq = tuple(tuple(tup[i] == tup[j] for j in range(k)) for i in range(k))
    ed = tuple(tuple((tup[i], tup[j]) in g.edges for j in range(k)) for i in range(k))
    col = tuple(g.colours[x] for x in tup)
    return AtomicType(eq, ed, col)


def atomic_types(g: ColouredGraph, k: int) -> list:
    """Atomic types of all k-tuples, in lexicographic tuple order."""
    return [atomic_type(g, t) for t in g.tuples(k)]


# -- JSON IO ---------------------------------------------------------------------------

def graph_from_dict(doc) -> ColouredGraph:
    if not isinstance(doc, dict):
        raise GraphFormatError("graph document must be a JSON object")
    for key in ("n", "edges", "colours"):
        if key not in doc:
            raise GraphFormatError(f"graph document is missing {key!r}")
    n = doc["n"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise GraphFormatError("'n' must be an integer")
    edges = doc["edges"]
    if not isinstance(edges, list):
        raise GraphFormatError("'edges' must be a list of pairs")
    pairs = []
    for e in edges:
        if (not isinstance(e, list) or len(e) != 2
                or not all(isinstance(x, int) and not isinstance(x, bool) for x in e)):
            raise GraphFormatError(f"malformed edge {e!r}")
        if not (0 <= e[0] < n and 0 <= e[1] < n):
            raise GraphFormatError(f"edge endpoint out of range: {e!r}")
        pairs.append(e)
    colours = doc["colours"]
    if not isinstance(colours, list) or not all(isinstance(c, str) for c in colours):
        raise GraphFormatError("'colours' must be a list of strings")
    undirected = doc.get("undirected", False)
    if not isinstance(undirected, bool):
        raise GraphFormatError("'undirected' must be a boolean")
    return ColouredGraph.build(n, pairs, colours, undirected=undirected)


def load_graph(data: bytes | str) -> ColouredGraph:
    try:
        doc = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise GraphFormatError(f"malformed graph document: {exc}") from exc
    return graph_from_dict(doc)


def graph_to_dict(g: ColouredGraph) -> dict:
    return {"n": g.n, "edges": [list(e) for e in sorted(g.edges)], "colours": list(g.colours)}


def dump_graph(g: ColouredGraph) -> str:
    return json.dumps(graph_to_dict(g), sort_keys=True)


# -- corpus ----------------------------------------------------------------------------

def cycle(n: int) -> ColouredGraph:
    return ColouredGraph.build(n, [(i, (i + 1) % n) for i in range(n)], undirected=True)


def disjoint_union(*graphs: ColouredGraph) -> ColouredGraph:
    edges, colours, offset = [], [], 0
    for g in graphs:
        edges.extend((u + offset, v + offset) for u, v in g.edges)
        colours.extend(g.colours)
        offset += g.n
    return ColouredGraph.build(offset, edges, colours)


def path(n: int) -> ColouredGraph:
    return ColouredGraph.build(n, [(i, i + 1) for i in range(n - 1)], undirected=True)


def star(leaves: int) -> ColouredGraph:
    return ColouredGraph.build(leaves + 1, [(0, i) for i in range(1, leaves + 1)], undirected=True)


def rook_graph(m: int = 4) -> ColouredGraph:
    """Line graph of K_{m,m}: vertices of an m x m board, adjacent when sharing a row or column."""
    edges = []
    for u, v in itertools.permutations(range(m * m), 2):
        if u // m == v // m or u % m == v % m:
            edges.append((u, v))
    return ColouredGraph.build(m * m, edges)


def shrikhande_graph() -> ColouredGraph:
    """Cayley graph of Z4 x Z4 with connection set {+-(1,0), +-(0,1), +-(1,1)}."""
    gens = [(1, 0), (3, 0), (0, 1), (0, 3), (1, 1), (3, 3)]
    edges = []
    for a, b in itertools.product(range(4), repeat=2):
        for da, db in gens:
            edges.append((4 * a + b, 4 * ((a + da) % 4) + (b + db) % 4))
    return ColouredGraph.build(16, edges)


def prism_graph() -> ColouredGraph:
    """Triangular prism K3 x K2."""
    edges = [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)]
    return ColouredGraph.build(6, edges, undirected=True)


def _pairs():
    return {
        "cycle6_vs_two_triangles": lambda: (cycle(6), disjoint_union(cycle(3), cycle(3))),
        "path4_vs_star": lambda: (path(4), star(3)),
        "rook4x4_vs_shrikhande": lambda: (rook_graph(4), shrikhande_graph()),
        "prism_vs_relabelled_prism": lambda: (prism_graph(), prism_graph().relabel([4, 2, 0, 5, 1, 3])),
        "cycle6_vs_relabelled_cycle6": lambda: (cycle(6), cycle(6).relabel([3, 0, 4, 1, 5, 2])),
    }


CORPUS_NAMES = tuple(_pairs())


def corpus(name: str) -> tuple:
    """Return a named pair of graphs (uniform colour, symmetric edges)."""
    try:
        return _pairs()[name]()
    except KeyError:
        raise KeyError(f"unknown corpus pair {name!r}; known: {', '.join(CORPUS_NAMES)}") from None


def srg_parameters(g: ColouredGraph):
    """Return (n, k, lambda, mu) if g is a loopless undirected strongly regular graph, else None."""
    adj = g.adjacency
    if adj.diagonal().any() or not (adj == adj.T).all():
        return None
    degrees = set(adj.sum(axis=1).tolist())
    if len(degrees) != 1:
        return None
    common = adj.astype(int) @ adj.astype(int)
    lam, mu = set(), set()
    for u in range(g.n):
        for v in range(g.n):
            if u != v:
                (lam if adj[u, v] else mu).add(int(common[u, v]))
    if len(lam) > 1 or len(mu) > 1:
        return None
    return g.n, degrees.pop(), lam.pop() if lam else 0, mu.pop() if mu else 0
