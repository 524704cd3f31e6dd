"""k-dimensional Weisfeiler-Leman refinement over jointly interned colours.

Colour ids come from a :class:`ColourInterner`.  Graphs refined against the same
interner get comparable ids: equal id exactly when the recursive signatures agree.
Signatures carry the previous colour, so ids never collide across rounds.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .graphs import ColouredGraph, atomic_type


class ColourInterner:
    """Injective map from colour signatures to dense integer ids.

    Each call to :meth:`intern_many` sorts the signatures it has not seen before and
    numbers them in that order, so ids depend only on the sequence of calls and the
    signature sets, never on tuple iteration order.
    """

    def __init__(self):
        self._ids: dict = {}

    def __len__(self):
        return len(self._ids)

    def intern_many(self, signatures) -> list:
        fresh = sorted({s for s in signatures if s not in self._ids})
        for s in fresh:
            self._ids[s] = len(self._ids)
        return [self._ids[s] for s in signatures]


_GLOBAL_INTERNER = ColourInterner()


def global_interner() -> ColourInterner:
    return _GLOBAL_INTERNER


@dataclass(frozen=True, eq=False)
class TupleColouring:
    graph: ColouredGraph
    k: int
    round: int
    colours: np.ndarray  # shape (n,)*k, colour ids
    interner: ColourInterner = field(repr=False)

    def colour_of(self, tup) -> int:
        return int(self.colours[tuple(tup)])

    def items(self):
        """(tuple, colour id) pairs in lexicographic order."""
        flat = self.colours.reshape(-1).tolist()
        return zip(self.graph.tuples(self.k), flat)

    @property
    def class_count(self) -> int:
        return len(np.unique(self.colours))

    def multiset(self) -> Counter:
        return Counter(self.colours.reshape(-1).tolist())

    def class_sizes(self) -> dict:
        return dict(sorted(self.multiset().items()))


def _check_k(k: int, allow_k1: bool):
    if not isinstance(k, int) or k < 1 or (k < 2 and not allow_k1):
        raise ValueError(f"WL dimension must be >= 2, got {k!r}")


def wl_init(g: ColouredGraph, k: int, interner: ColourInterner | None = None,
            allow_k1: bool = False) -> TupleColouring:
    """Colour every k-tuple by its interned atomic type."""
    _check_k(k, allow_k1)
    interner = global_interner() if interner is None else interner
    sigs = [("atomic",) + tuple(atomic_type(g, t)) for t in g.tuples(k)]
    ids = interner.intern_many(sigs)
    colours = np.array(ids, dtype=np.int64).reshape((g.n,) * k)
    colours.flags.writeable = False
    return TupleColouring(g, k, 0, colours, interner)


def wl_round(prev: TupleColouring, g: ColouredGraph) -> TupleColouring:
    """One refinement step: new colour from the old one and the k neighbour multisets."""
    if prev.graph is not g and prev.graph != g:
        raise ValueError("colouring was not produced for this graph")
    n, k, chi = g.n, prev.k, prev.colours
    parts = [chi.reshape((n,) * k + (1,))]
    for i in range(k):
        # sorted fibre along axis i is the same for every choice of v_i
        fibre = np.moveaxis(np.sort(chi, axis=i), i, -1)
        parts.append(np.broadcast_to(np.expand_dims(fibre, i), (n,) * k + (n,)))
    rows = np.concatenate(parts, axis=-1).reshape(n ** k, 1 + k * n)
    sigs = [tuple(r) for r in rows.tolist()]
    ids = prev.interner.intern_many(sigs)
    colours = np.array(ids, dtype=np.int64).reshape((n,) * k)
    colours.flags.writeable = False
    return TupleColouring(g, k, prev.round + 1, colours, prev.interner)


class RefinementHistory:
    """Per-round colourings of one graph, extended on demand.

    ``stable_round`` is the first t whose colouring induces the same partition as
    round t + 1.  Later rounds are computed when asked for, since round-stratified
    ids of a stable round are not comparable with those of a later round.
    """

    def __init__(self, g: ColouredGraph, k: int, interner: ColourInterner | None = None,
                 allow_k1: bool = False):
        self.graph = g
        self.k = k
        self.rounds = [wl_init(g, k, interner, allow_k1=allow_k1)]
        self.stable_round: int | None = None

    @property
    def interner(self) -> ColourInterner:
        return self.rounds[0].interner

    def _step(self):
        nxt = wl_round(self.rounds[-1], self.graph)
        if self.stable_round is None and nxt.class_count == self.rounds[-1].class_count:
            self.stable_round = self.rounds[-1].round
        self.rounds.append(nxt)

    def run(self, max_rounds: int | None = None) -> "RefinementHistory":
        """Refine until stable or until ``max_rounds`` rounds exist beyond round 0."""
        cap = self.graph.n ** self.k if max_rounds is None else max_rounds
        while self.stable_round is None and len(self.rounds) - 1 < cap:
            self._step()
        return self

    def colouring(self, t: int) -> TupleColouring:
        if t < 0:
            raise ValueError("round must be non-negative")
        while len(self.rounds) <= t:
            self._step()
        return self.rounds[t]

    def __len__(self):
        return len(self.rounds)


def wl_run(g: ColouredGraph, k: int, max_rounds: int | None = None,
           interner: ColourInterner | None = None, allow_k1: bool = False) -> RefinementHistory:
    return RefinementHistory(g, k, interner, allow_k1=allow_k1).run(max_rounds)


def wl_pair(g: ColouredGraph, h: ColouredGraph, k: int, max_rounds: int | None = None):
    """Histories of g and h refined against a fresh shared interner."""
    interner = ColourInterner()
    return wl_run(g, k, max_rounds, interner), wl_run(h, k, max_rounds, interner)


def _check_pair(hg: RefinementHistory, hh: RefinementHistory):
    if hg.k != hh.k:
        raise ValueError(f"histories have different dimensions ({hg.k} vs {hh.k})")
    if hg.interner is not hh.interner:
        raise ValueError("histories were not refined against a shared interner")


def wl_equivalent_at(histories, t: int) -> bool:
    """True iff the multisets of round-t colours of the two graphs coincide."""
    hg, hh = histories
    _check_pair(hg, hh)
    if hg.graph.n != hh.graph.n:
        return False
    return hg.colouring(t).multiset() == hh.colouring(t).multiset()


def joint_stable_round(histories) -> int:
    """First round t at which the partition of the union of both tuple sets is stable."""
    hg, hh = histories
    _check_pair(hg, hh)

    def joint_count(t):
        a, b = hg.colouring(t).colours, hh.colouring(t).colours
        return len(np.unique(np.concatenate([a.reshape(-1), b.reshape(-1)])))

    t = 0
    while joint_count(t) != joint_count(t + 1):
        t += 1
    return t


def wl_equivalent(histories) -> bool:
    """True iff the graphs are equivalent in every round.

    Once the joint partition is stable, later rounds relabel it bijectively, so
    checking rounds up to the joint stable round suffices.
    """
    hg, hh = histories
    if hg.graph.n != hh.graph.n:
        return False
    last = joint_stable_round(histories)
    return all(wl_equivalent_at(histories, t) for t in range(last + 1))


def first_distinguishing_round(histories) -> int | None:
    hg, hh = histories
    if hg.graph.n != hh.graph.n:
        return 0
    last = joint_stable_round(histories)
    for t in range(last + 1):
        if not wl_equivalent_at(histories, t):
            return t
    return None


def history_to_dict(h: RefinementHistory) -> dict:
    return {
        "k": h.k,
        "n": h.graph.n,
        "stable_round": h.stable_round,
        "rounds": [
            {
                "round": c.round,
                "colours": [[list(t), cid] for t, cid in c.items()],
                "class_sizes": [[cid, size] for cid, size in c.class_sizes().items()],
                "class_count": c.class_count,
            }
            for c in h.rounds
        ],
    }


def refines(fine: TupleColouring, coarse: TupleColouring) -> bool:
    """fine ⪯ coarse: equal colour under ``fine`` implies equal colour under ``coarse``."""
    seen = {}
    for a, b in zip(fine.colours.reshape(-1).tolist(), coarse.colours.reshape(-1).tolist()):
        if seen.setdefault(a, b) != b:
            return False
    return True
