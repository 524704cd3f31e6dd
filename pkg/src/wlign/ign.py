"""k-th order invariant graph networks over the equality-pattern basis.

Two numeric modes are supported.  In ``rational`` mode a tensor stores integer
numerators (int64 when a priori bounds allow it, Python ints otherwise) over one
common positive denominator, so every value is an exact rational.  In ``float``
mode values are float64 and results are only as exact as binary floating point.

The equivariant layer is evaluated through coarse group sums: for a partition nu
of the 2k positions, ``T_nu(v)`` sums A over all v' such that v.v' satisfies the
equalities of nu (and nothing else).  Exact-pattern sums follow by Moebius
inversion on the partition lattice, and the inversion is folded into the layer
coefficients once per layer.  :func:`apply_equivariant_naive` is the direct
O(n^{2k}) double loop kept as an independent oracle.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np

from .graphs import ColouredGraph, atomic_type
from .patterns import enumerate_patterns, pattern_index, pattern_of

RATIONAL = "rational"
FLOAT = "float"
MODES = (RATIONAL, FLOAT)

EXACT_ACTIVATIONS = ("relu", "identity", "sign")
FLOAT_ACTIVATIONS = EXACT_ACTIVATIONS + ("tanh", "sigmoid")

_INT64_SAFE = 2 ** 62


class ShapeError(ValueError):
    pass


def _check_mode(mode: str):
    if mode not in MODES:
        raise ValueError(f"unknown numeric mode {mode!r}")


# -- tensors ----------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FeatureTensor:
    """Values on ``[n]^k x [p]``: ``values[v + (s,)]``, divided by ``denom`` in rational mode."""

    values: np.ndarray
    denom: int = 1
    mode: str = RATIONAL

    @property
    def k(self) -> int:
        return self.values.ndim - 1

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def channels(self) -> int:
        return self.values.shape[-1]

    @classmethod
    def from_values(cls, values, mode: str = RATIONAL) -> "FeatureTensor":
        """Build from an array of ints / Fractions (rational) or floats."""
        _check_mode(mode)
        arr = np.asarray(values, dtype=object if mode == RATIONAL else np.float64)
        if mode == FLOAT:
            return cls(arr, 1, FLOAT)
        flat = [Fraction(x) for x in arr.reshape(-1).tolist()]
        den = math.lcm(*(f.denominator for f in flat)) if flat else 1
        nums = np.array([f.numerator * (den // f.denominator) for f in flat], dtype=object)
        return cls(nums.reshape(arr.shape), den, RATIONAL)

    def entry(self, v: Sequence[int], s: int):
        x = self.values[tuple(v) + (s,)]
        return Fraction(int(x), self.denom) if self.mode == RATIONAL else float(x)

    def row(self, v: Sequence[int]) -> tuple:
        return tuple(self.entry(v, s) for s in range(self.channels))

    def row_keys(self) -> list:
        """Hashable rows in lexicographic tuple order (exact Fractions in rational mode)."""
        flat = self.values.reshape(-1, self.channels).tolist()
        if self.mode == FLOAT:
            return [tuple(r) for r in flat]
        if self.denom == 1:
            return [tuple(int(x) for x in r) for r in flat]
        d = self.denom
        return [tuple(Fraction(int(x), d) for x in r) for r in flat]

    def to_fractions(self) -> np.ndarray:
        if self.mode == FLOAT:
            raise ValueError("float tensors have no exact rational form")
        out = np.empty(self.values.shape, dtype=object)
        for idx, x in np.ndenumerate(self.values):
            out[idx] = Fraction(int(x), self.denom)
        return out

    def to_float(self) -> "FeatureTensor":
        if self.mode == FLOAT:
            return self
        return FeatureTensor(np.array(self.values.astype(object) / self.denom, dtype=np.float64), 1, FLOAT)

    def permute(self, perm: Sequence[int]) -> "FeatureTensor":
        """pi * A with pi(v) = perm[v]: the row of v is moved to pi(v)."""
        n = self.n
        if sorted(perm) != list(range(n)):
            raise ValueError("not a permutation of the vertices")
        inv = np.empty(n, dtype=np.int64)
        inv[np.asarray(perm)] = np.arange(n)
        vals = self.values
        for axis in range(self.k):
            vals = np.take(vals, inv, axis=axis)
        return FeatureTensor(vals, self.denom, self.mode)

    def equals(self, other: "FeatureTensor") -> bool:
        return self.values.shape == other.values.shape and self.row_keys() == other.row_keys()


def atomic_palette(graphs: Sequence[ColouredGraph], k: int) -> tuple:
    """Sorted atomic types occurring in any of the graphs; channel s is position s."""
    return tuple(sorted({atomic_type(g, t) for g in graphs for t in g.tuples(k)}))


def encode(g: ColouredGraph, k: int, palette: Sequence | None = None) -> FeatureTensor:
    """One-hot encoding of the round-0 colouring against ``palette`` (default: g's own)."""
    if k < 2:
        raise ValueError("IGN order must be >= 2")
    palette = atomic_palette([g], k) if palette is None else tuple(palette)
    index = {c: i for i, c in enumerate(palette)}
    vals = np.zeros((g.n ** k, len(palette)), dtype=np.int64)
    for r, t in enumerate(g.tuples(k)):
        try:
            vals[r, index[atomic_type(g, t)]] = 1
        except KeyError:
            raise ValueError(f"atomic type of {t} missing from palette") from None
    return FeatureTensor(vals.reshape((g.n,) * k + (len(palette),)), 1, RATIONAL)


def encode_pair(g: ColouredGraph, h: ColouredGraph, k: int) -> tuple:
    """Encodings of g and h sharing one channel per jointly occurring atomic type."""
    palette = atomic_palette([g, h], k)
    return encode(g, k, palette), encode(h, k, palette)


# -- layer specifications -------------------------------------------------------------

def _as_scalar(x, mode):
    return Fraction(x) if mode == RATIONAL else float(x)


def _coefficient_array(values, shape, mode) -> np.ndarray:
    arr = np.empty(shape, dtype=object if mode == RATIONAL else np.float64)
    src = np.asarray(values, dtype=object)
    if src.shape != tuple(shape):
        raise ShapeError(f"coefficient array has shape {src.shape}, expected {tuple(shape)}")
    for idx, x in np.ndenumerate(src):
        arr[idx] = _as_scalar(x, mode)
    return arr


def _lcm_denominator(*arrays) -> int:
    dens = {x.denominator for a in arrays for x in a.reshape(-1).tolist()}
    return math.lcm(*dens) if dens else 1


@dataclass(frozen=True, eq=False)
class EquivariantLayerSpec:
    """Coefficients ``coeffs[mu, a, b]`` for arity-2k patterns and ``bias[tau, a]``."""

    k: int
    coeffs: np.ndarray
    bias: np.ndarray
    mode: str = RATIONAL

    def __post_init__(self):
        _check_mode(self.mode)
        nb2, nb1 = len(enumerate_patterns(2 * self.k)), len(enumerate_patterns(self.k))
        if self.coeffs.ndim != 3 or self.coeffs.shape[0] != nb2:
            raise ShapeError(f"coeffs must have shape ({nb2}, q, p)")
        if self.bias.shape != (nb1, self.coeffs.shape[1]):
            raise ShapeError(f"bias must have shape ({nb1}, {self.coeffs.shape[1]})")

    @classmethod
    def create(cls, k, coeffs, bias, mode=RATIONAL) -> "EquivariantLayerSpec":
        coeffs = np.asarray(coeffs, dtype=object)
        return cls(k, _coefficient_array(coeffs, coeffs.shape, mode),
                   _coefficient_array(bias, (len(enumerate_patterns(k)), coeffs.shape[1]), mode), mode)

    @classmethod
    def zeros(cls, k, in_channels, out_channels, mode=RATIONAL) -> "EquivariantLayerSpec":
        nb2, nb1 = len(enumerate_patterns(2 * k)), len(enumerate_patterns(k))
        return cls.create(k, np.zeros((nb2, out_channels, in_channels), dtype=object),
                          np.zeros((nb1, out_channels), dtype=object), mode)

    @property
    def in_channels(self) -> int:
        return self.coeffs.shape[2]

    @property
    def out_channels(self) -> int:
        return self.coeffs.shape[1]

    @cached_property
    def _integer_form(self):
        """(D, coarse coefficients * D, bias * D) with exact integers (rational mode)."""
        den = _lcm_denominator(self.coeffs, self.bias)
        c = np.array([int(x * den) for x in self.coeffs.reshape(-1).tolist()], dtype=object)
        b = np.array([int(x * den) for x in self.bias.reshape(-1).tolist()], dtype=object)
        coarse = _moebius_matrix(self.k).T.astype(object) @ c.reshape(self.coeffs.shape[0], -1)
        return den, coarse.reshape(self.coeffs.shape), b.reshape(self.bias.shape)

    @cached_property
    def _float_form(self):
        coarse = _moebius_matrix(self.k).T.astype(np.float64) @ self.coeffs.reshape(self.coeffs.shape[0], -1)
        return coarse.reshape(self.coeffs.shape), self.bias


@dataclass(frozen=True, eq=False)
class InvariantLayerSpec:
    """``coeffs[tau, a, b]`` for arity-k patterns and constants ``bias[a]``."""

    k: int
    coeffs: np.ndarray
    bias: np.ndarray
    mode: str = RATIONAL

    def __post_init__(self):
        nb1 = len(enumerate_patterns(self.k))
        if self.coeffs.ndim != 3 or self.coeffs.shape[0] != nb1:
            raise ShapeError(f"invariant coeffs must have shape ({nb1}, q, p)")
        if self.bias.shape != (self.coeffs.shape[1],):
            raise ShapeError("invariant bias must have one entry per output channel")

    @classmethod
    def create(cls, k, coeffs, bias, mode=RATIONAL) -> "InvariantLayerSpec":
        coeffs = np.asarray(coeffs, dtype=object)
        return cls(k, _coefficient_array(coeffs, coeffs.shape, mode),
                   _coefficient_array(bias, (coeffs.shape[1],), mode), mode)

    @property
    def in_channels(self) -> int:
        return self.coeffs.shape[2]

    @property
    def out_channels(self) -> int:
        return self.coeffs.shape[1]


@dataclass(frozen=True, eq=False)
class DenseLayer:
    weights: np.ndarray  # (out, in)
    bias: np.ndarray     # (out,)

    @property
    def in_channels(self) -> int:
        return self.weights.shape[1]

    @property
    def out_channels(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True, eq=False)
class MlpHead:
    """Dense layers with ``activation`` between consecutive layers (none after the last)."""

    layers: tuple
    activation: str = "relu"


@dataclass(frozen=True, eq=False)
class IgnModel:
    k: int
    layers: tuple
    invariant: InvariantLayerSpec
    mlp: MlpHead
    activation: str = "relu"
    mode: str = RATIONAL

    def __post_init__(self):
        _check_mode(self.mode)
        allowed = EXACT_ACTIVATIONS if self.mode == RATIONAL else FLOAT_ACTIVATIONS
        for act in (self.activation, self.mlp.activation):
            if act not in allowed:
                raise ValueError(f"activation {act!r} is not available in {self.mode} mode")
        for prev, nxt in zip(self.layers, self.layers[1:]):
            if prev.out_channels != nxt.in_channels:
                raise ShapeError("equivariant layer channel counts do not chain")
        last = self.layers[-1].out_channels if self.layers else self.invariant.in_channels
        if self.invariant.in_channels != last:
            raise ShapeError("invariant layer input does not match the last equivariant layer")
        dims = self.invariant.out_channels
        for dense in self.mlp.layers:
            if dense.in_channels != dims:
                raise ShapeError("MLP layer dimensions do not chain")
            dims = dense.out_channels

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def in_channels(self) -> int:
        return self.layers[0].in_channels if self.layers else self.invariant.in_channels


# -- Moebius inversion on the partition lattice -----------------------------------------

def _refinements(block: tuple):
    """All set partitions of a block, as lists of sub-blocks."""
    if len(block) == 1:
        yield [block]
        return
    first, rest = block[0], block[1:]
    for part in _refinements(rest):
        yield [(first,)] + part
        for i in range(len(part)):
            yield part[:i] + [(first,) + part[i]] + part[i + 1:]


@lru_cache(maxsize=None)
def _moebius_matrix(k: int) -> np.ndarray:
    """M[mu, nu] = Moebius(mu, nu) for mu finer than nu, else 0 (arity 2k)."""
    pats = enumerate_patterns(2 * k)
    index = {p: i for i, p in enumerate(pats)}
    size = len(pats)
    m = np.zeros((size, size), dtype=np.int64)
    for j, nu in enumerate(pats):
        for choice in itertools.product(*(list(_refinements(b)) for b in nu.blocks)):
            coef = 1
            label = [0] * (2 * k)
            lab = 0
            for parts in choice:
                j_parts = len(parts)
                coef *= (-1) ** (j_parts - 1) * math.factorial(j_parts - 1)
                for sub in parts:
                    for pos in sub:
                        label[pos - 1] = lab
                    lab += 1
            m[index[pattern_of(label)], j] = coef
    m.flags.writeable = False
    return m


def _grid(axis_of: Sequence[int], ndim: int, n: int) -> tuple:
    """Index arrays placing position j's arange(n) on grid axis ``axis_of[j]``."""
    out = []
    for ax in axis_of:
        shape = [1] * ndim
        shape[ax] = n
        out.append(np.arange(n).reshape(shape))
    return tuple(out)


@dataclass(frozen=True)
class _CoarseTerm:
    nu: int
    gather_key: tuple     # block slot of each second-half position, plus pinned count
    n_free: int
    expand_axes: tuple    # first-half block slots that are not pinned
    scatter_axes: tuple   # first-half block slot of each first-half position
    r1: int


@lru_cache(maxsize=None)
def _coarse_terms(k: int) -> tuple:
    terms = []
    for j, nu in enumerate(enumerate_patterns(2 * k)):
        blocks = nu.blocks
        first = [b for b in blocks if b[0] <= k]
        r1 = len(first)
        second = [bi for bi, b in enumerate(blocks) if b[-1] > k]
        pinned = [bi for bi in second if bi < r1]
        slot2 = {bi: s for s, bi in enumerate(second)}
        gather_axes = tuple(slot2[nu.rgs[k + i]] for i in range(k))
        expand = tuple(bi for bi in range(r1) if bi not in pinned)
        scatter = tuple(nu.rgs[i] for i in range(k))
        terms.append(_CoarseTerm(j, gather_axes + (len(pinned),), len(second) - len(pinned),
                                 expand, scatter, r1))
    return tuple(terms)


@lru_cache(maxsize=None)
def arity_k_pattern_grid(k: int, n: int) -> np.ndarray:
    """Pattern id of every k-tuple, shape (n,)*k."""
    ids = [pattern_index(pattern_of(t)) for t in itertools.product(range(n), repeat=k)]
    arr = np.array(ids, dtype=np.int64).reshape((n,) * k)
    arr.flags.writeable = False
    return arr


def _coarse_sum(values, term: _CoarseTerm, k, n):
    axes = term.gather_key[:-1]
    ndim = max(axes) + 1
    g = values[_grid(axes, ndim, n)]
    if term.n_free:
        g = g.sum(axis=tuple(range(ndim - term.n_free, ndim)))
    return g


def _apply_terms(values, coarse, bias_term, k, n, out_dtype):
    q = coarse.shape[1]
    out = np.zeros((n,) * k + (q,), dtype=out_dtype)
    cache: dict = {}
    for term in _coarse_terms(k):
        c = coarse[term.nu]
        if not np.any(c != 0):
            continue
        key = term.gather_key
        if key not in cache:
            cache[key] = _coarse_sum(values, term, k, n)
        m = cache[key] @ c.T
        for ax in term.expand_axes:
            m = np.expand_dims(m, ax)
        m = np.broadcast_to(m, (n,) * term.r1 + (q,))
        out[_grid(term.scatter_axes, term.r1, n)] += m
    out += bias_term
    return out


def _max_abs(arr) -> int:
    return int(np.abs(arr).max()) if arr.size else 0


def apply_equivariant(spec: EquivariantLayerSpec, A: FeatureTensor) -> FeatureTensor:
    """Evaluate the equivariant layer on A exactly (rational) or in float64."""
    if A.k != spec.k:
        raise ShapeError(f"tensor order {A.k} does not match layer order {spec.k}")
    if A.channels != spec.in_channels:
        raise ShapeError(f"layer expects {spec.in_channels} channels, got {A.channels}")
    if A.mode != spec.mode:
        A = A.to_float() if spec.mode == FLOAT else A
        if A.mode != spec.mode:
            raise ValueError("cannot feed a float tensor to a rational layer")
    k, n = spec.k, A.n
    grid = arity_k_pattern_grid(k, n)
    if spec.mode == FLOAT:
        coarse, bias = spec._float_form
        vals = _apply_terms(A.values.astype(np.float64), coarse, bias[grid], k, n, np.float64)
        return FeatureTensor(vals, 1, FLOAT)
    den, coarse, bias = spec._integer_form
    max_in = _max_abs(A.values)
    bound = max_abs_bias = _max_abs(bias) * A.denom
    for term in _coarse_terms(k):
        row = np.abs(coarse[term.nu]).sum(axis=1)
        bound += max_in * n ** term.n_free * (int(row.max()) if row.size else 0)
    bound = max(bound, max_in, max_abs_bias)
    dtype = np.int64 if bound < _INT64_SAFE else object
    vals = _apply_terms(A.values.astype(dtype), coarse.astype(dtype), (bias * A.denom)[grid].astype(dtype),
                        k, n, dtype)
    return FeatureTensor(vals, A.denom * den, RATIONAL)


def apply_equivariant_naive(spec: EquivariantLayerSpec, A: FeatureTensor) -> FeatureTensor:
    """Direct double loop over (v, v') in lexicographic order; the independent oracle."""
    if A.channels != spec.in_channels or A.k != spec.k:
        raise ShapeError("tensor does not match the layer")
    k, n, q = spec.k, A.n, spec.out_channels
    src = A.to_fractions() if spec.mode == RATIONAL else A.to_float().values
    zero = Fraction(0) if spec.mode == RATIONAL else 0.0
    out = np.empty((n,) * k + (q,), dtype=object)
    tuples = list(itertools.product(range(n), repeat=k))
    for v in tuples:
        acc = [zero] * q
        for v2 in tuples:
            c = spec.coeffs[pattern_index(pattern_of(v + v2))]
            row = src[v2]
            for a in range(q):
                for b in range(spec.in_channels):
                    acc[a] += c[a, b] * row[b]
        tau = pattern_index(pattern_of(v))
        for a in range(q):
            out[v + (a,)] = acc[a] + spec.bias[tau, a]
    return FeatureTensor.from_values(out, spec.mode)


# -- activations, invariant layer, MLP -------------------------------------------------

def apply_activation(sigma: str, A: FeatureTensor) -> FeatureTensor:
    if sigma == "identity":
        return A
    if sigma == "relu":
        return FeatureTensor(np.maximum(A.values, 0), A.denom, A.mode)
    if sigma == "sign":
        vals = (A.values > 0).astype(np.int64) - (A.values < 0).astype(np.int64)
        return FeatureTensor(vals if A.mode == RATIONAL else vals.astype(np.float64), 1, A.mode)
    if sigma in ("tanh", "sigmoid"):
        if A.mode == RATIONAL:
            raise ValueError(f"activation {sigma!r} needs transcendental arithmetic")
        f = np.tanh if sigma == "tanh" else (lambda x: 1.0 / (1.0 + np.exp(-x)))
        return FeatureTensor(f(A.values), 1, FLOAT)
    raise ValueError(f"unknown activation {sigma!r}")


def _scalar_activation(sigma: str, x):
    if sigma == "identity":
        return x
    if sigma == "relu":
        return x if x > 0 else x * 0
    if sigma == "sign":
        return type(x)((x > 0) - (x < 0))
    if sigma == "tanh":
        return math.tanh(x)
    if sigma == "sigmoid":
        return 1.0 / (1.0 + math.exp(-x))
    raise ValueError(f"unknown activation {sigma!r}")


def apply_invariant(spec: InvariantLayerSpec, A: FeatureTensor) -> tuple:
    if A.k != spec.k or A.channels != spec.in_channels:
        raise ShapeError("tensor does not match the invariant layer")
    grid = arity_k_pattern_grid(spec.k, A.n).reshape(-1)
    flat = A.values.reshape(-1, A.channels)
    if spec.mode == FLOAT or A.mode == FLOAT:
        flat = A.to_float().values.reshape(-1, A.channels)
        out = np.array(spec.bias, dtype=np.float64)
        for tau in range(spec.coeffs.shape[0]):
            mask = grid == tau
            if mask.any():
                out = out + spec.coeffs[tau].astype(np.float64) @ flat[mask].sum(axis=0)
        return tuple(float(x) for x in out)
    flat = flat.astype(object)
    out = list(spec.bias)
    for tau in range(spec.coeffs.shape[0]):
        mask = grid == tau
        if not mask.any():
            continue
        sums = [Fraction(int(x), A.denom) for x in flat[mask].sum(axis=0).tolist()]
        c = spec.coeffs[tau]
        for a in range(spec.out_channels):
            out[a] += sum((c[a, b] * sums[b] for b in range(spec.in_channels)), Fraction(0))
    return tuple(out)


def apply_mlp(head: MlpHead, x: Sequence) -> tuple:
    x = list(x)
    for i, dense in enumerate(head.layers):
        y = []
        for a in range(dense.out_channels):
            acc = dense.bias[a]
            for b in range(dense.in_channels):
                acc = acc + dense.weights[a, b] * x[b]
            y.append(acc)
        if i < len(head.layers) - 1:
            y = [_scalar_activation(head.activation, v) for v in y]
        x = y
    return tuple(x)


def forward_trunc(model: IgnModel, A: FeatureTensor, t: int) -> FeatureTensor:
    """F^(t): the first t equivariant layers, each followed by the activation."""
    if not 0 <= t <= model.depth:
        raise ValueError(f"truncation {t} outside 0..{model.depth}")
    if A.channels != model.in_channels:
        raise ShapeError(f"model expects {model.in_channels} input channels, got {A.channels}")
    if model.mode == FLOAT:
        A = A.to_float()
    for layer in model.layers[:t]:
        A = apply_activation(model.activation, apply_equivariant(layer, A))
    return A


def forward_all(model: IgnModel, A: FeatureTensor) -> tuple:
    """(F^(0), ..., F^(d)) and the final output vector."""
    if A.channels != model.in_channels:
        raise ShapeError(f"model expects {model.in_channels} input channels, got {A.channels}")
    if model.mode == FLOAT:
        A = A.to_float()
    truncs = [A]
    for layer in model.layers:
        truncs.append(apply_activation(model.activation, apply_equivariant(layer, truncs[-1])))
    out = apply_mlp(model.mlp, apply_invariant(model.invariant, truncs[-1]))
    if model.mode == FLOAT:
        out = tuple(float(x) for x in out)
    return tuple(truncs), out


def forward(model: IgnModel, A: FeatureTensor) -> tuple:
    return forward_all(model, A)[1]


def row_multiset(A: FeatureTensor):
    from collections import Counter
    return Counter(A.row_keys())


def ign_equivalent_at(model: IgnModel, g: ColouredGraph, h: ColouredGraph, t: int) -> bool:
    """Whether F^(t) gives g and h the same multiset of feature rows."""
    if g.n != h.n:
        raise ShapeError("IGN comparison needs graphs with equal vertex counts")
    ag, ah = encode_pair(g, h, model.k)
    return row_multiset(forward_trunc(model, ag, t)) == row_multiset(forward_trunc(model, ah, t))


def ign_equivalent(model: IgnModel, g: ColouredGraph, h: ColouredGraph) -> bool:
    if g.n != h.n:
        raise ShapeError("IGN comparison needs graphs with equal vertex counts")
    ag, ah = encode_pair(g, h, model.k)
    return forward(model, ag) == forward(model, ah)


# -- sampling --------------------------------------------------------------------------

def _draw(rng: random.Random, lo: int = -3, hi: int = 3) -> Fraction:
    den = rng.choice((1, 2))
    return Fraction(rng.randint(lo * den, hi * den), den)


def sample_model(k: int, d: int, channels: Sequence[int], seed: int, mode: str = RATIONAL,
                 invariant_dim: int | None = None, mlp_dims: Sequence[int] = (4, 2),
                 activation: str = "relu") -> IgnModel:
    """Pseudo-random model; coefficients are rationals in [-3, 3] with denominator 1 or 2.

    ``channels`` lists s_0..s_d.  Float mode draws the same values and stores them as floats.
    """
    _check_mode(mode)
    channels = list(channels)
    if len(channels) != d + 1:
        raise ValueError(f"need d + 1 = {d + 1} channel counts, got {len(channels)}")
    rng = random.Random(seed)
    nb2, nb1 = len(enumerate_patterns(2 * k)), len(enumerate_patterns(k))

    def block(*shape):
        return np.array([_draw(rng) for _ in range(math.prod(shape))], dtype=object).reshape(shape)

    layers = tuple(EquivariantLayerSpec.create(k, block(nb2, q, p), block(nb1, q), mode)
                   for p, q in zip(channels, channels[1:]))
    inv_dim = channels[-1] if invariant_dim is None else invariant_dim
    invariant = InvariantLayerSpec.create(k, block(nb1, inv_dim, channels[-1]), block(inv_dim), mode)
    dense, prev = [], inv_dim
    for width in mlp_dims:
        dense.append(DenseLayer(_coefficient_array(block(width, prev), (width, prev), mode),
                                _coefficient_array(block(width), (width,), mode)))
        prev = width
    return IgnModel(k, layers, invariant, MlpHead(tuple(dense), activation), activation, mode)


# -- JSON ------------------------------------------------------------------------------

def _fmt(x, mode):
    return str(Fraction(x)) if mode == RATIONAL else float(x)


def _sparse(arr, mode):
    return [[*map(int, idx), _fmt(x, mode)] for idx, x in np.ndenumerate(arr) if x != 0]


def _dense(entries, shape, mode):
    arr = np.zeros(shape, dtype=object)
    for entry in entries:
        *idx, val = entry
        if len(idx) != len(shape) or any(not 0 <= i < s for i, s in zip(idx, shape)):
            raise ShapeError(f"coefficient index {idx} outside shape {shape}")
        arr[tuple(idx)] = Fraction(val) if mode == RATIONAL else float(val)
    return _coefficient_array(arr, shape, mode)


def model_to_dict(model: IgnModel) -> dict:
    m, k = model.mode, model.k
    return {
        "k": k,
        "mode": m,
        "activation": model.activation,
        "patterns": {
            "arity_2k": [list(p.rgs) for p in enumerate_patterns(2 * k)],
            "arity_k": [list(p.rgs) for p in enumerate_patterns(k)],
        },
        "layers": [{"in": L.in_channels, "out": L.out_channels, "coeffs": _sparse(L.coeffs, m),
                    "bias": _sparse(L.bias, m)} for L in model.layers],
        "invariant": {"in": model.invariant.in_channels, "out": model.invariant.out_channels,
                      "coeffs": _sparse(model.invariant.coeffs, m), "bias": _sparse(model.invariant.bias, m)},
        "mlp": {"activation": model.mlp.activation,
                "layers": [{"in": D.in_channels, "out": D.out_channels, "weights": _sparse(D.weights, m),
                            "bias": _sparse(D.bias, m)} for D in model.mlp.layers]},
    }


def model_from_dict(doc: dict) -> IgnModel:
    try:
        k, mode = int(doc["k"]), doc.get("mode", RATIONAL)
        _check_mode(mode)
        nb2, nb1 = len(enumerate_patterns(2 * k)), len(enumerate_patterns(k))
        table = doc.get("patterns")
        if table is not None:
            if ([list(p.rgs) for p in enumerate_patterns(2 * k)] != table.get("arity_2k")
                    or [list(p.rgs) for p in enumerate_patterns(k)] != table.get("arity_k")):
                raise ValueError("pattern-id table does not match the canonical enumeration")
        layers = tuple(
            EquivariantLayerSpec(k, _dense(L["coeffs"], (nb2, L["out"], L["in"]), mode),
                                 _dense(L["bias"], (nb1, L["out"]), mode), mode)
            for L in doc["layers"])
        inv = doc["invariant"]
        invariant = InvariantLayerSpec(k, _dense(inv["coeffs"], (nb1, inv["out"], inv["in"]), mode),
                                       _dense(inv["bias"], (inv["out"],), mode), mode)
        mlp = doc["mlp"]
        dense = tuple(DenseLayer(_dense(D["weights"], (D["out"], D["in"]), mode),
                                 _dense(D["bias"], (D["out"],), mode)) for D in mlp["layers"])
        return IgnModel(k, layers, invariant, MlpHead(dense, mlp.get("activation", "relu")),
                        doc.get("activation", "relu"), mode)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed model document: {exc!r}") from exc
