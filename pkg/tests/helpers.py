"""Shared strategies and small graphs for the test suite."""

import random
from fractions import Fraction

import numpy as np
from hypothesis import strategies as st

from wlign.graphs import ColouredGraph
from wlign.ign import EquivariantLayerSpec, FeatureTensor
from wlign.patterns import enumerate_patterns


def random_graph(rng: random.Random, n: int, p: float = 0.4, colours=("a",), directed=False):
    edges = []
    for u in range(n):
        for v in range(n):
            if u == v:
                continue
            if directed:
                if rng.random() < p:
                    edges.append((u, v))
            elif u < v and rng.random() < p:
                edges.append((u, v))
    cols = [rng.choice(colours) for _ in range(n)]
    return ColouredGraph.build(n, edges, cols, undirected=not directed)


@st.composite
def graphs(draw, max_n=6, directed=None, colours=("a", "b")):
    n = draw(st.integers(1, max_n))
    is_directed = draw(st.booleans()) if directed is None else directed
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v and (is_directed or u < v)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    cols = draw(st.lists(st.sampled_from(colours), min_size=n, max_size=n))
    return ColouredGraph.build(n, chosen, cols, undirected=not is_directed)


@st.composite
def permutations(draw, n):
    return draw(st.permutations(list(range(n))))


def asymmetric_digraph():
    """A directed 5-cycle with one chord; no reverse arcs."""
    edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]
    return ColouredGraph.build(5, edges)


def random_tensor(rng, n, k, p, lo=-3, hi=3, denoms=(1, 2, 3)):
    vals = np.empty((n,) * k + (p,), dtype=object)
    for idx in np.ndindex(vals.shape):
        vals[idx] = Fraction(rng.randint(lo, hi), rng.choice(denoms))
    return FeatureTensor.from_values(vals)


def random_spec(rng, k, p, q, density=1.0):
    nb2, nb1 = len(enumerate_patterns(2 * k)), len(enumerate_patterns(k))
    coeffs = np.empty((nb2, q, p), dtype=object)
    for idx in np.ndindex(coeffs.shape):
        coeffs[idx] = Fraction(rng.randint(-3, 3), rng.choice((1, 2))) if rng.random() < density else 0
    bias = np.array([Fraction(rng.randint(-3, 3), 2) for _ in range(nb1 * q)], dtype=object).reshape(nb1, q)
    return EquivariantLayerSpec.create(k, coeffs, bias)
