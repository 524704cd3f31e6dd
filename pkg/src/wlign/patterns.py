"""Equality patterns: set partitions of tuple positions and the operations on them.

Positions are 1-based, as are class ids (position of a block in canonical order).
For a pattern of arity 2k, positions ``1..k`` refer to a first tuple v and
``k+1..2k`` to a second tuple v'.  Permutations of ``[k]`` are tuples ``pi`` with
``pi[i - 1]`` the image of ``i``.  Vertex tuples are ordinary 0-based tuples.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import NamedTuple, Sequence

import numpy as np

MAX_ARITY = 10

CONSTANT_USED = "constant_used"
CONSTANT_UNUSED = "constant_unused"
VARIABLE = "variable"


@dataclass(frozen=True, order=True)
class EqualityPattern:
    """A set partition of positions ``1..arity`` stored as a restricted-growth string."""

    rgs: tuple

    def __post_init__(self):
        top = -1
        for x in self.rgs:
            if x > top + 1 or x < 0:
                raise ValueError(f"not a restricted-growth string: {self.rgs}")
            top = max(top, x)

    @classmethod
    def from_blocks(cls, blocks: Sequence[Sequence[int]], arity: int | None = None) -> "EqualityPattern":
        members = sorted(i for b in blocks for i in b)
        arity = len(members) if arity is None else arity
        if members != list(range(1, arity + 1)):
            raise ValueError(f"blocks {blocks!r} do not partition 1..{arity}")
        label = [0] * arity
        for bi, b in enumerate(blocks):
            if not b:
                raise ValueError("blocks must be nonempty")
            for i in b:
                label[i - 1] = bi
        return pattern_of(label)

    @property
    def arity(self) -> int:
        return len(self.rgs)

    @cached_property
    def blocks(self) -> tuple:
        """Blocks as sorted tuples of 1-based positions, ordered by smallest element."""
        out = [[] for _ in range(max(self.rgs, default=-1) + 1)]
        for pos, lab in enumerate(self.rgs, start=1):
            out[lab].append(pos)
        return tuple(tuple(b) for b in out)

    def block_of(self, position: int) -> int:
        """1-based class id of the block containing ``position``."""
        return self.rgs[position - 1] + 1

    def __str__(self):
        return "".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks)


def pattern_of(entries: Sequence) -> EqualityPattern:
    """The partition of positions grouping equal entries."""
    seen: dict = {}
    return EqualityPattern(tuple(seen.setdefault(x, len(seen)) for x in entries))


@lru_cache(maxsize=None)
def enumerate_patterns(arity: int) -> tuple:
    """All set partitions of ``1..arity`` in lexicographic RGS order."""
    if not isinstance(arity, int) or arity < 1:
        raise ValueError("arity must be a positive integer")
    if arity > MAX_ARITY:
        raise ValueError(f"arity {arity} exceeds the cap of {MAX_ARITY}")
    out = []

    def grow(prefix, top):
        if len(prefix) == arity:
            out.append(EqualityPattern(tuple(prefix)))
            return
        for x in range(top + 2):
            prefix.append(x)
            grow(prefix, max(top, x))
            prefix.pop()

    grow([0], 0)
    return tuple(out)


@lru_cache(maxsize=None)
def _index_table(arity: int) -> dict:
    return {p: i for i, p in enumerate(enumerate_patterns(arity))}


def pattern_index(mu: EqualityPattern) -> int:
    """Position of ``mu`` in :func:`enumerate_patterns` (its stable id)."""
    return _index_table(mu.arity)[mu]


def pattern_by_index(arity: int, idx: int) -> EqualityPattern:
    return enumerate_patterns(arity)[idx]


class ClassKind(NamedTuple):
    kind: str
    rep: int
    block: tuple


def _half(mu: EqualityPattern, k: int | None) -> int:
    if k is None:
        if mu.arity % 2:
            raise ValueError("class kinds need an even arity or an explicit k")
        return mu.arity // 2
    if mu.arity != 2 * k:
        raise ValueError(f"pattern of arity {mu.arity} does not match k={k}")
    return k


def class_kinds(mu: EqualityPattern, k: int | None = None) -> tuple:
    """Kind and representative of every block, in canonical block order."""
    k = _half(mu, k)
    out = []
    for b in mu.blocks:
        rep = b[0]
        if rep > k:
            kind = VARIABLE
        elif b[-1] > k:
            kind = CONSTANT_USED
        else:
            kind = CONSTANT_UNUSED
        out.append(ClassKind(kind, rep, b))
    return tuple(out)


def first_half(mu: EqualityPattern, k: int | None = None) -> EqualityPattern:
    """The arity-k pattern that the first tuple must have."""
    k = _half(mu, k)
    return pattern_of(mu.rgs[:k])


def second_half(mu: EqualityPattern, k: int | None = None) -> EqualityPattern:
    """The arity-k pattern of the second tuple."""
    k = _half(mu, k)
    return pattern_of(mu.rgs[k:])


def has_used_constant(mu: EqualityPattern, k: int | None = None) -> bool:
    return any(c.kind == CONSTANT_USED for c in class_kinds(mu, k))


# -- membership and the sets P / P-tilde -------------------------------------------------

def membership(mu: EqualityPattern, v: Sequence[int], v2: Sequence[int]) -> bool:
    if mu.arity != len(v) + len(v2) or len(v) != len(v2):
        raise ValueError(f"pattern of arity {mu.arity} cannot hold tuples of lengths {len(v)}, {len(v2)}")
    return pattern_of(tuple(v) + tuple(v2)) == mu


def satisfies(mu: EqualityPattern, v: Sequence[int], v2: Sequence[int], conditions: str = "abcd") -> bool:
    """Check v2 against the listed conditions (a)-(d) relative to v and mu.

    Every condition set also requires v itself to realise the first half of mu;
    otherwise (v, v2) can never lie in mu and the sets built from these conditions
    are empty.
    """
    k = len(v)
    kinds = class_kinds(mu, k)
    if pattern_of(v) != first_half(mu, k):
        return False
    # blocks that constrain v2: variable classes and used constant classes
    live = [c for c in kinds if c.kind != CONSTANT_UNUSED]
    second = [[i - k for i in c.block if i > k] for c in live]
    if "a" in conditions:
        for idx in second:
            if any(v2[i - 1] != v2[idx[0] - 1] for i in idx):
                return False
    if "b" in conditions:
        for s, t in itertools.combinations(range(len(second)), 2):
            if any(v2[i - 1] == v2[j - 1] for i in second[s] for j in second[t]):
                return False
    if "c" in conditions:
        for c, idx in zip(live, second):
            if c.kind == CONSTANT_USED and any(v2[i - 1] != v[c.rep - 1] for i in idx):
                return False
    if "d" in conditions:
        unused = [c.rep for c in kinds if c.kind == CONSTANT_UNUSED]
        for c, idx in zip(live, second):
            if c.kind == VARIABLE and any(v2[i - 1] == v[r - 1] for i in idx for r in unused):
                return False
    return True


def p_set(mu: EqualityPattern, v: Sequence[int], n: int) -> frozenset:
    """All v2 in [0, n)^k with (v, v2) in mu, by exhaustive enumeration."""
    k = len(v)
    return frozenset(v2 for v2 in itertools.product(range(n), repeat=k) if membership(mu, v, v2))


def p_tilde_set(mu: EqualityPattern, v: Sequence[int], n: int) -> frozenset:
    """Like :func:`p_set` but without the distinctness from unused constant classes."""
    k = len(v)
    return frozenset(v2 for v2 in itertools.product(range(n), repeat=k) if satisfies(mu, v, v2, "abc"))


# -- merges and the decomposition of P ------------------------------------------------

def merge(mu: EqualityPattern, s: int, s2: int) -> EqualityPattern:
    """Merge variable class ``s`` into unused constant class ``s2`` (1-based class ids)."""
    kinds = class_kinds(mu)
    if not (1 <= s <= len(kinds) and 1 <= s2 <= len(kinds)):
        raise ValueError("class id out of range")
    if kinds[s - 1].kind != VARIABLE:
        raise ValueError(f"class {s} is not a variable class")
    if kinds[s2 - 1].kind != CONSTANT_UNUSED:
        raise ValueError(f"class {s2} is not an unused constant class")
    blocks = [list(b) for b in mu.blocks]
    blocks[s2 - 1].extend(blocks[s - 1])
    del blocks[s - 1]
    return EqualityPattern.from_blocks(blocks, mu.arity)


def merges(mu: EqualityPattern) -> list:
    """All ((s, s2), merged pattern) over variable s and unused constant s2, in id order."""
    kinds = class_kinds(mu)
    var = [i for i, c in enumerate(kinds, 1) if c.kind == VARIABLE]
    unused = [i for i, c in enumerate(kinds, 1) if c.kind == CONSTANT_UNUSED]
    return [((s, s2), merge(mu, s, s2)) for s in var for s2 in unused]


class Decomposition(NamedTuple):
    p: frozenset
    rebuilt: frozenset

    @property
    def holds(self) -> bool:
        return self.p == self.rebuilt


def decompose(mu: EqualityPattern, v: Sequence[int], n: int) -> Decomposition:
    """Both sides of P = P~ minus the union of P~ over all merges."""
    removed = set()
    for _, merged in merges(mu):
        removed |= p_tilde_set(merged, v, n)
    return Decomposition(p_set(mu, v, n), p_tilde_set(mu, v, n) - removed)


# -- permutations and goodness ----------------------------------------------------------

def check_permutation(pi: Sequence[int], k: int | None = None) -> tuple:
    pi = tuple(pi)
    k = len(pi) if k is None else k
    if len(pi) != k or sorted(pi) != list(range(1, k + 1)):
        raise ValueError(f"{pi!r} is not a permutation of 1..{k}")
    return pi


def compose(p2: Sequence[int], p1: Sequence[int]) -> tuple:
    """The permutation i -> p2(p1(i))."""
    return tuple(p2[p1[i] - 1] for i in range(len(p1)))


def inverse(pi: Sequence[int]) -> tuple:
    inv = [0] * len(pi)
    for i, img in enumerate(pi, 1):
        inv[img - 1] = i
    return tuple(inv)


def permute_pattern(pi: Sequence[int], mu: EqualityPattern) -> EqualityPattern:
    """Apply pi to the first-half positions of every block; second-half positions stay."""
    k = _half(mu, len(pi))
    pi = check_permutation(pi, k)
    blocks = [[pi[i - 1] if i <= k else i for i in b] for b in mu.blocks]
    return EqualityPattern.from_blocks(blocks, mu.arity)


def permute_tuple(pi: Sequence[int], v: Sequence) -> tuple:
    """pi * v, whose entry at position pi(i) is v_i."""
    pi = check_permutation(pi, len(v))
    inv = inverse(pi)
    return tuple(v[inv[j] - 1] for j in range(len(v)))


def is_good(mu: EqualityPattern) -> bool:
    """Each used constant class contains i, where k+i is its smallest second-half index."""
    k = _half(mu, None)
    for c in class_kinds(mu, k):
        if c.kind == CONSTANT_USED:
            i = min(x for x in c.block if x > k) - k
            if i not in c.block:
                return False
    return True


def goodify(mu: EqualityPattern, v: Sequence[int] | None = None) -> tuple:
    """Return (pi, pi * mu) with pi * mu good.

    pi sends the representative of each used constant class to i, where k+i is that
    class's smallest second-half index; remaining positions go to the remaining
    targets in increasing order.
    """
    k = _half(mu, None)
    image = {}
    for c in class_kinds(mu, k):
        if c.kind == CONSTANT_USED:
            image[c.rep] = min(x for x in c.block if x > k) - k
    rest_targets = iter(sorted(set(range(1, k + 1)) - set(image.values())))
    pi = tuple(image[i] if i in image else next(rest_targets) for i in range(1, k + 1))
    return pi, permute_pattern(pi, mu)


def basis_descriptor(mu: EqualityPattern, k: int) -> dict:
    """JSON-friendly description of a pattern with class kinds for a chosen k."""
    d = {"id": pattern_index(mu), "rgs": list(mu.rgs), "blocks": [list(b) for b in mu.blocks]}
    if mu.arity == 2 * k:
        d["kinds"] = [c.kind for c in class_kinds(mu, k)]
    return d


# -- vectorized masks over all second tuples ---------------------------------------------
#
# Same sets as p_set / p_tilde_set, as boolean masks indexed by the lexicographic
# rank of v2.  The certification sweeps use these; the literal versions above are
# the oracle they are tested against.

@lru_cache(maxsize=32)
def tuple_grid(n: int, k: int):
    """All k-tuples over [0, n) in lexicographic order, shape (n^k, k)."""
    grid = np.array(list(itertools.product(range(n), repeat=k)), dtype=np.int64).reshape(-1, k)
    grid.flags.writeable = False
    return grid


def _decode_code(code: int, m: int) -> EqualityPattern:
    labels = list(range(m))
    bit = 0
    for p in range(m):
        for q in range(p + 1, m):
            if code >> bit & 1 and labels[q] == q:
                labels[q] = labels[p]
            bit += 1
    return pattern_of(labels)


@lru_cache(maxsize=8)
def pair_pattern_ids(n: int, k: int):
    """Pattern id of v.v2 for every pair of k-tuples, shape (n^k, n^k)."""
    grid = tuple_grid(n, k)
    cols = [grid[:, i][:, None] for i in range(k)] + [grid[:, i][None, :] for i in range(k)]
    m = 2 * k
    code = np.zeros((len(grid), len(grid)), dtype=np.int64)
    bit = 0
    for p in range(m):
        for q in range(p + 1, m):
            code |= (cols[p] == cols[q]).astype(np.int64) << bit
            bit += 1
    uniq, inv = np.unique(code, return_inverse=True)
    ids = np.array([pattern_index(_decode_code(int(c), m)) for c in uniq], dtype=np.int32)
    out = ids[inv].reshape(code.shape)
    out.flags.writeable = False
    return out


def tuple_rank(v: Sequence[int], n: int) -> int:
    r = 0
    for x in v:
        r = r * n + x
    return r


def condition_mask(mu: EqualityPattern, v: Sequence[int], n: int, conditions: str = "abcd"):
    """Boolean mask over all v2 satisfying the listed conditions (see :func:`satisfies`)."""
    k = len(v)
    kinds = class_kinds(mu, k)
    grid = tuple_grid(n, k)
    if pattern_of(v) != first_half(mu, k):
        return np.zeros(len(grid), dtype=bool)
    mask = np.ones(len(grid), dtype=bool)
    live = [c for c in kinds if c.kind != CONSTANT_UNUSED]
    if "a" in conditions:
        for c in live:
            second = [i - k - 1 for i in c.block if i > k]
            for i in second[1:]:
                mask &= grid[:, i] == grid[:, second[0]]
    if "b" in conditions:
        for s, t in itertools.combinations(range(len(live)), 2):
            si = [i - k - 1 for i in live[s].block if i > k]
            ti = [i - k - 1 for i in live[t].block if i > k]
            for i in si:
                for j in ti:
                    mask &= grid[:, i] != grid[:, j]
    if "c" in conditions:
        for c in live:
            if c.kind == CONSTANT_USED:
                for i in c.block:
                    if i > k:
                        mask &= grid[:, i - k - 1] == v[c.rep - 1]
    if "d" in conditions:
        unused = [v[c.rep - 1] for c in kinds if c.kind == CONSTANT_UNUSED]
        for c in live:
            if c.kind == VARIABLE:
                for i in c.block:
                    for value in unused:
                        mask &= grid[:, i - k - 1] != value
    return mask


def p_mask(mu: EqualityPattern, v: Sequence[int], n: int):
    return condition_mask(mu, v, n, "abcd")


def p_tilde_mask(mu: EqualityPattern, v: Sequence[int], n: int):
    return condition_mask(mu, v, n, "abc")


def mask_to_set(mask, n: int, k: int) -> frozenset:
    grid = tuple_grid(n, k)
    return frozenset(tuple(int(x) for x in row) for row in grid[mask])
