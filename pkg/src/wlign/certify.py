"""Executable certification of the WL / IGN correspondence on concrete instances.

Every check returns a :class:`Check` with an instance count, a failure count and
the first counterexample in lexicographic order.  ``PASS``/``FAIL`` come from exact
arithmetic over exhaustive or seeded enumerations.  ``SKIP`` always carries the
unmet precondition.  ``INFO`` records observations that carry no claim.
"""

from __future__ import annotations

import hashlib
import itertools
import random
import time
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import ign
from .graphs import ColouredGraph, dump_graph
from .patterns import (
    check_permutation,
    enumerate_patterns,
    first_half,
    goodify,
    has_used_constant,
    is_good,
    mask_to_set,
    merges,
    p_mask,
    p_set,
    p_tilde_mask,
    pair_pattern_ids,
    pattern_of,
    permute_tuple,
    tuple_grid,
    tuple_rank,
)
from .wl import ColourInterner, RefinementHistory, joint_stable_round, wl_equivalent, wl_equivalent_at

PASS, FAIL, SKIP, INFO = "PASS", "FAIL", "SKIP", "INFO"

SUITES = ("all", "key-lemma", "decomposition", "goodness", "permute", "feature", "theorem",
          "unused-constant")

CHAIN = ("key_lemma", "feature_implication", "theorem")


@dataclass
class Check:
    claim: str
    status: str
    instances: int = 0
    failures: int = 0
    params: dict = field(default_factory=dict)
    counterexample: dict | None = None
    reason: str | None = None

    def to_dict(self) -> dict:
        d = {"claim": self.claim, "status": self.status, "instances": self.instances,
             "failures": self.failures, "params": self.params}
        if self.counterexample is not None:
            d["counterexample"] = self.counterexample
        if self.reason is not None:
            d["reason"] = self.reason
        return d


def _verdict(claim, instances, failures, params, counterexample=None) -> Check:
    return Check(claim, PASS if failures == 0 else FAIL, instances, failures, params,
                 counterexample if failures else None)


def _skip(claim, reason, params) -> Check:
    return Check(claim, SKIP, params=params, reason=reason)


@dataclass
class CertificationReport:
    experiment: str | None = None
    instance: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    wall_clock: float | None = None

    @property
    def status(self) -> str:
        statuses = {c.status for c in self.checks}
        if FAIL in statuses:
            return FAIL
        if PASS in statuses:
            return PASS
        return SKIP

    def failures(self) -> int:
        return sum(c.failures for c in self.checks if c.status == FAIL)

    def to_dict(self) -> dict:
        d = {"checks": [c.to_dict() for c in self.checks], "status": self.status}
        if self.experiment is not None:
            d["experiment"] = self.experiment
        if self.instance:
            d["instance"] = self.instance
        if self.wall_clock is not None:
            d["wall_clock_s"] = round(self.wall_clock, 3)
        return d


def exit_code(report: CertificationReport) -> int:
    return {PASS: 0, FAIL: 1, SKIP: 2}[report.status]


def graph_descriptor(g: ColouredGraph) -> dict:
    blob = dump_graph(g).encode()
    return {"n": g.n, "edges": len(g.edges), "sha256": hashlib.sha256(blob).hexdigest()}


# -- shared state for one graph pair ----------------------------------------------------

class PairContext:
    """WL histories on a shared interner plus jointly encoded IGN inputs."""

    def __init__(self, g: ColouredGraph, h: ColouredGraph, k: int):
        self.g, self.h, self.k = g, h, k
        interner = ColourInterner()
        self.histories = (RefinementHistory(g, k, interner), RefinementHistory(h, k, interner))

    def colours(self, t: int) -> tuple:
        hg, hh = self.histories
        return hg.colouring(t).colours.reshape(-1), hh.colouring(t).colours.reshape(-1)

    def equivalent_at(self, t: int) -> bool:
        return wl_equivalent_at(self.histories, t)

    @cached_property
    def equivalent(self) -> bool:
        return wl_equivalent(self.histories)

    @cached_property
    def stable_round(self) -> int:
        return joint_stable_round(self.histories)

    @cached_property
    def encoded(self) -> tuple:
        return ign.encode_pair(self.g, self.h, self.k)

    def descriptor(self) -> dict:
        return {"g": graph_descriptor(self.g), "h": graph_descriptor(self.h), "k": self.k}


def _context(g, h, k, ctx):
    if ctx is None:
        return PairContext(g, h, k)
    if ctx.g is not g or ctx.h is not h or ctx.k != k:
        raise ValueError("context was built for a different instance")
    return ctx


def _tuple(rank: int, n: int, k: int) -> list:
    return [int(x) for x in tuple_grid(n, k)[rank]]


def _mismatch_counts(cg, ch, xg, xh) -> tuple:
    """Over pairs (i, j) with cg[i] == ch[j]: (number of pairs, pairs with xg[i] != xh[j])."""
    size_g, size_h = Counter(cg), Counter(ch)
    pairs = sum(c * size_h[col] for col, c in size_g.items() if col in size_h)
    joint_h = Counter(zip(ch, xh))
    agree = sum(c * joint_h[key] for key, c in Counter(zip(cg, xg)).items() if key in joint_h)
    return pairs, pairs - agree


def _first_mismatch(cg, ch, xg, xh):
    by_colour = defaultdict(list)
    for j, col in enumerate(ch):
        by_colour[col].append(j)
    for i, col in enumerate(cg):
        for j in by_colour.get(col, ()):
            if xh[j] != xg[i]:
                return i, j
    return None


# -- Key Lemma ------------------------------------------------------------------------

def _pattern_signatures(pids: np.ndarray, colours: np.ndarray, n_patterns: int, base: int) -> list:
    """sigs[mu][v] = bytes of the sorted round colours over P_{mu, v}; colours < base."""
    keys = np.sort(pids.astype(np.int64) * base + colours[None, :].astype(np.int64), axis=1)
    bounds = np.arange(n_patterns + 1, dtype=np.int64) * base
    cuts = np.stack([np.searchsorted(row, bounds) for row in keys])
    sigs = [[None] * len(keys) for _ in range(n_patterns)]
    for v, row in enumerate(keys):
        c = cuts[v]
        for mu in range(n_patterns):
            sigs[mu][v] = row[c[mu]:c[mu + 1]].tobytes()
    return sigs


def _oracle_signatures(g_n: int, k: int, colours: np.ndarray, patterns) -> list:
    sigs = []
    for mu in patterns:
        row = []
        for v in itertools.product(range(g_n), repeat=k):
            members = p_set(mu, v, g_n)
            row.append(tuple(sorted(int(colours[tuple_rank(w, g_n)]) for w in members)))
        sigs.append(row)
    return sigs


def _multiset_check(claim, ctx, t, t_prev, pattern_ids, params, method="vectorized") -> Check:
    k, n = ctx.k, ctx.g.n
    cg, ch = ctx.colours(t)
    pg, ph = ctx.colours(t_prev)
    cg, ch = cg.tolist(), ch.tolist()
    patterns = enumerate_patterns(2 * k)
    if method == "vectorized":
        pids = pair_pattern_ids(n, k)
        base = int(max(pg.max(), ph.max())) + 1
        full_g = _pattern_signatures(pids, pg, len(patterns), base)
        full_h = _pattern_signatures(pids, ph, len(patterns), base)
        sig_g = [full_g[i] for i in pattern_ids]
        sig_h = [full_h[i] for i in pattern_ids]
    elif method == "oracle":
        chosen = [patterns[i] for i in pattern_ids]
        sig_g = _oracle_signatures(n, k, pg, chosen)
        sig_h = _oracle_signatures(n, k, ph, chosen)
    else:
        raise ValueError(f"unknown method {method!r}")
    instances = failures = 0
    counterexample = None
    for pos, mu_id in enumerate(pattern_ids):
        inst, fail = _mismatch_counts(cg, ch, sig_g[pos], sig_h[pos])
        instances += inst
        failures += fail
        if fail and counterexample is None:
            i, j = _first_mismatch(cg, ch, sig_g[pos], sig_h[pos])
            counterexample = {"v": _tuple(i, n, k), "w": _tuple(j, n, k), "mu_id": mu_id,
                              "mu": str(patterns[mu_id])}
    return _verdict(claim, instances, failures, params, counterexample)


def check_key_lemma(g, h, k: int, m: int, ctx: PairContext | None = None,
                    method: str = "vectorized") -> Check:
    """Colour-matched tuples at round m(k-1) see equal round-(m-1)(k-1) multisets per pattern."""
    ctx = _context(g, h, k, ctx)
    t, t_prev = m * (k - 1), (m - 1) * (k - 1)
    params = {"k": k, "m": m, "t": t, "t_prev": t_prev, "method": method}
    if m < 1:
        raise ValueError("m must be >= 1")
    if g.n != h.n:
        return _skip("key_lemma", "graphs have different vertex counts", params)
    if not ctx.equivalent_at(t_prev):
        return _skip("key_lemma", f"graphs are distinguished by {k}-WL at round {t_prev}", params)
    ids = list(range(len(enumerate_patterns(2 * k))))
    return _multiset_check("key_lemma", ctx, t, t_prev, ids, params, method)


# -- observations on the pattern algebra ------------------------------------------------

def check_observation_decomposition(n_max: int, k: int) -> list:
    """P = P~ minus the union of merged P~, and conditions (a)-(d) equal membership."""
    patterns = enumerate_patterns(2 * k)
    inst = fail = fail_cond = 0
    cex = cex_cond = None
    for n in range(1, n_max + 1):
        pids = pair_pattern_ids(n, k)
        grid = tuple_grid(n, k)
        merged = [[m for _, m in merges(mu)] for mu in patterns]
        for r, v in enumerate(map(tuple, grid.tolist())):
            row = pids[r]
            for mu_id, mu in enumerate(patterns):
                inst += 1
                member = row == mu_id
                rebuilt = p_tilde_mask(mu, v, n)
                for other in merged[mu_id]:
                    rebuilt = rebuilt & ~p_tilde_mask(other, v, n)
                if not np.array_equal(member, rebuilt):
                    fail += 1
                    if cex is None:
                        cex = {"n": n, "v": list(v), "mu": str(mu),
                               "p": sorted(mask_to_set(member, n, k)),
                               "rebuilt": sorted(mask_to_set(rebuilt, n, k))}
                if not np.array_equal(member, p_mask(mu, v, n)):
                    fail_cond += 1
                    if cex_cond is None:
                        cex_cond = {"n": n, "v": list(v), "mu": str(mu)}
    params = {"k": k, "n_max": n_max}
    return [_verdict("decomposition", inst, fail, params, cex),
            _verdict("membership_conditions", inst, fail_cond, params, cex_cond)]


def check_observation_goodness(n_max: int, k: int) -> Check:
    """goodify yields a good pattern and keeps P~ (with v permuted alike)."""
    patterns = enumerate_patterns(2 * k)
    inst = fail = 0
    cex = None
    for n in range(1, n_max + 1):
        for v in map(tuple, tuple_grid(n, k).tolist()):
            for mu in patterns:
                inst += 1
                pi, good = goodify(mu, v)
                pv = permute_tuple(pi, v)
                ok = is_good(good) and np.array_equal(p_tilde_mask(mu, v, n), p_tilde_mask(good, pv, n))
                if not ok:
                    fail += 1
                    if cex is None:
                        cex = {"n": n, "v": list(v), "mu": str(mu), "pi": list(pi), "good": str(good)}
    return _verdict("goodness", inst, fail, {"k": k, "n_max": n_max}, cex)


def _permuted(colours: np.ndarray, pi) -> np.ndarray:
    """Array whose entry at v is colours[pi * v]."""
    return np.transpose(colours, [p - 1 for p in pi])


def check_observation_permute(g, h, k: int, t: int, trials: int | None = None, seed: int = 0,
                              ctx: PairContext | None = None) -> Check:
    """chi(v) = chi(w) implies chi(pi * v) = chi(pi * w).

    Pairs range over ordered pairs of tuples from the union of both tuple sets, so
    pairs within one graph count as well as pairs across the two graphs.
    """
    ctx = _context(g, h, k, ctx)
    perms = list(itertools.permutations(range(1, k + 1)))
    if trials is not None and trials < len(perms):
        rng = random.Random(seed)
        perms = [perms[0]] + rng.sample(perms[1:], max(trials - 1, 0))
    hg, hh = ctx.histories
    cg, ch = hg.colouring(t).colours, hh.colouring(t).colours
    flat = cg.reshape(-1).tolist() + ch.reshape(-1).tolist()
    inst = fail = 0
    cex = None

    def locate(i):
        return ("g", _tuple(i, g.n, k)) if i < cg.size else ("h", _tuple(i - cg.size, h.n, k))

    for pi in perms:
        check_permutation(pi, k)
        image = _permuted(cg, pi).reshape(-1).tolist() + _permuted(ch, pi).reshape(-1).tolist()
        a, b = _mismatch_counts(flat, flat, image, image)
        inst, fail = inst + a, fail + b
        if b and cex is None:
            i, j = _first_mismatch(flat, flat, image, image)
            cex = {"pi": list(pi), "v": locate(i), "w": locate(j)}
    return _verdict("permute", inst, fail, {"k": k, "t": t, "permutations": len(perms)}, cex)


def check_unused_constant_case(g, h, k: int, t: int, n_max: int = 5,
                               ctx: PairContext | None = None, structure: bool = True) -> list:
    """Patterns without used constant classes.

    ``t`` is the round at which v and w are colour-matched and t' = t - (k - 1) the
    round of the compared multisets.  The structural part checks that P~ depends on
    v only through whether v realises the first half of the pattern.
    """
    ctx = _context(g, h, k, ctx)
    patterns = enumerate_patterns(2 * k)
    chosen = [i for i, mu in enumerate(patterns) if not has_used_constant(mu, k)]
    out = []
    t_prev = t - (k - 1)
    params = {"k": k, "t": t, "t_prev": t_prev, "patterns": len(chosen)}
    if t_prev < 0:
        out.append(_skip("unused_constant_multiset", f"t must be at least k - 1 = {k - 1}", params))
    elif g.n != h.n:
        out.append(_skip("unused_constant_multiset", "graphs have different vertex counts", params))
    elif not ctx.equivalent_at(t_prev):
        out.append(_skip("unused_constant_multiset",
                         f"graphs are distinguished by {k}-WL at round {t_prev}", params))
    else:
        out.append(_multiset_check("unused_constant_multiset", ctx, t, t_prev, chosen, params))
    if not structure:
        return out
    inst = fail = 0
    cex = None
    for n in range(1, n_max + 1):
        for mu_id in chosen:
            mu = patterns[mu_id]
            tau = first_half(mu, k)
            reference = None
            for v in map(tuple, tuple_grid(n, k).tolist()):
                inst += 1
                mask = p_tilde_mask(mu, v, n)
                if pattern_of(v) != tau:
                    ok = not mask.any()
                else:
                    if reference is None:
                        reference = mask
                    ok = np.array_equal(mask, reference)
                if not ok:
                    fail += 1
                    if cex is None:
                        cex = {"n": n, "mu": str(mu), "v": list(v)}
    out.append(_verdict("unused_constant_structure", inst, fail, {"k": k, "n_max": n_max}, cex))
    return out


# -- models -----------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelDescriptor:
    """Everything needed to rebuild a sampled certification model."""

    index: int
    seed: int
    k: int
    channels: tuple
    invariant_dim: int
    mlp_dims: tuple
    activation: str = "relu"
    mode: str = ign.RATIONAL

    @property
    def depth(self) -> int:
        return len(self.channels) - 1

    def build(self) -> ign.IgnModel:
        return ign.sample_model(self.k, self.depth, self.channels, self.seed, self.mode,
                                self.invariant_dim, self.mlp_dims, self.activation)

    def to_dict(self) -> dict:
        return {"index": self.index, "seed": self.seed, "k": self.k, "channels": list(self.channels),
                "invariant_dim": self.invariant_dim, "mlp_dims": list(self.mlp_dims),
                "activation": self.activation, "mode": self.mode}


def certification_models(k: int, count: int, seed: int, in_channels: int,
                         max_depth: int | None = None, max_width: int | None = None,
                         mode: str = ign.RATIONAL) -> list:
    """Deterministic model family: depth cycles through 1..max_depth, widths are seeded.

    Defaults: depth <= 3 and width <= 8 for k = 2, depth <= 2 and width <= 4 otherwise.
    """
    max_depth = (3 if k == 2 else 2) if max_depth is None else max_depth
    max_width = (8 if k == 2 else 4) if max_width is None else max_width
    rng = random.Random(seed)
    out = []
    for i in range(count):
        depth = 1 + i % max_depth
        widths = tuple(rng.randint(2, max_width) for _ in range(depth))
        inv = rng.randint(2, max_width)
        mlp = (rng.randint(2, max_width), 2)
        out.append(ModelDescriptor(i, rng.randrange(2 ** 31), k, (in_channels,) + widths, inv, mlp,
                                   mode=mode))
    return out


def _row_ids(a: ign.FeatureTensor, b: ign.FeatureTensor) -> tuple:
    """Joint integer ids of the feature rows of two tensors (equal id iff equal row)."""
    if a.mode == ign.RATIONAL and a.denom == b.denom:
        va, vb = a.values.reshape(-1, a.channels), b.values.reshape(-1, b.channels)
        if va.dtype != object and vb.dtype != object:
            _, inv = np.unique(np.concatenate([va, vb]), axis=0, return_inverse=True)
            inv = inv.reshape(-1)
            return inv[:len(va)].tolist(), inv[len(va):].tolist()
    table: dict = {}
    ka, kb = a.row_keys(), b.row_keys()
    return [table.setdefault(r, len(table)) for r in ka], [table.setdefault(r, len(table)) for r in kb]


@dataclass
class ModelOutcome:
    descriptor: ModelDescriptor
    feature: dict          # t -> (instances, failures, counterexample | None)
    outputs: tuple         # (output on G, output on H)


def feature_round_cap(depth: int, k: int) -> int:
    """Largest round t whose F^(floor(t/(k-1))) is defined: (d + 1)(k - 1) - 1."""
    return (depth + 1) * (k - 1) - 1


def _evaluate_model(task) -> ModelOutcome:
    descriptor, g, h, k, rounds, colours = task
    model = descriptor.build()
    ag, ah = ign.encode_pair(g, h, k)
    tg, out_g = ign.forward_all(model, ag)
    th, out_h = ign.forward_all(model, ah)
    ids = {}
    feature = {}
    for t in rounds:
        layer = t // (k - 1)
        if layer not in ids:
            ids[layer] = _row_ids(tg[layer], th[layer])
        xg, xh = ids[layer]
        cg, ch = colours[t]
        inst, fail = _mismatch_counts(cg, ch, xg, xh)
        cex = None
        if fail:
            i, j = _first_mismatch(cg, ch, xg, xh)
            cex = {"v": _tuple(i, g.n, k), "w": _tuple(j, h.n, k), "layer": layer,
                   "row_g": list(tg[layer].row(_tuple(i, g.n, k))),
                   "row_h": list(th[layer].row(_tuple(j, h.n, k)))}
        feature[t] = (inst, fail, cex)
    return ModelOutcome(descriptor, feature, (out_g, out_h))


def _parallel_map(fn, tasks, jobs: int):
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


def evaluate_models(ctx: PairContext, descriptors, rounds_for=None, jobs: int = 1) -> list:
    """Run every model on both graphs; feature rows are compared at the requested rounds."""
    tasks = []
    colour_cache = {}
    for d in descriptors:
        if d.mode != ign.RATIONAL:
            raise ValueError("certification requires rational-mode models")
        rounds = [] if rounds_for is None else list(rounds_for(d))
        for t in rounds:
            if t not in colour_cache:
                cg, ch = ctx.colours(t)
                colour_cache[t] = (cg.tolist(), ch.tolist())
        tasks.append((d, ctx.g, ctx.h, ctx.k, rounds, {t: colour_cache[t] for t in rounds}))
    return _parallel_map(_evaluate_model, tasks, jobs)


def feature_checks(ctx: PairContext, outcomes, rounds) -> list:
    """Lemma (feature implication) per round t, aggregated over models."""
    k = ctx.k
    checks = []
    for t in rounds:
        params = {"k": k, "t": t, "layer": t // (k - 1), "models": 0}
        if not ctx.equivalent_at(t):
            checks.append(_skip("feature_implication",
                                f"graphs are distinguished by {k}-WL at round {t}", params))
            continue
        inst = fail = 0
        cex = None
        used = [o for o in outcomes if t in o.feature]
        for o in used:
            a, b, c = o.feature[t]
            inst, fail = inst + a, fail + b
            if c is not None and cex is None:
                cex = dict(c, model=o.descriptor.to_dict())
        params["models"] = len(used)
        if not used:
            checks.append(_skip("feature_implication",
                                f"no model has enough layers for round {t}", params))
            continue
        checks.append(_verdict("feature_implication", inst, fail, params, cex))
    return checks


def check_lemma_feature_implication(g, h, k: int, model: ign.IgnModel, t: int,
                                    ctx: PairContext | None = None) -> Check:
    """If G and H agree at WL round t, colour-matched tuples get equal F^(floor(t/(k-1))) rows."""
    ctx = _context(g, h, k, ctx)
    if model.mode != ign.RATIONAL:
        raise ValueError("certification requires a rational-mode model")
    params = {"k": k, "t": t, "layer": t // (k - 1), "models": 1}
    if t // (k - 1) > model.depth:
        return _skip("feature_implication",
                     f"round {t} needs {t // (k - 1)} layers, model has {model.depth}", params)
    if not ctx.equivalent_at(t):
        return _skip("feature_implication", f"graphs are distinguished by {k}-WL at round {t}", params)
    layer = t // (k - 1)
    ag, ah = ctx.encoded
    fg, fh = ign.forward_trunc(model, ag, layer), ign.forward_trunc(model, ah, layer)
    xg, xh = _row_ids(fg, fh)
    cg, ch = (c.tolist() for c in ctx.colours(t))
    inst, fail = _mismatch_counts(cg, ch, xg, xh)
    cex = None
    if fail:
        i, j = _first_mismatch(cg, ch, xg, xh)
        cex = {"v": _tuple(i, g.n, k), "w": _tuple(j, h.n, k), "layer": layer}
    return _verdict("feature_implication", inst, fail, params, cex)


def theorem_checks(ctx: PairContext, outcomes) -> list:
    """Equal outputs for WL-equivalent pairs; informational tally otherwise."""
    params = {"k": ctx.k, "models": len(outcomes)}
    equal = sum(o.outputs[0] == o.outputs[1] for o in outcomes)
    if ctx.g.n != ctx.h.n or not ctx.equivalent:
        reason = ("graphs have different vertex counts" if ctx.g.n != ctx.h.n
                  else f"graphs are distinguished by {ctx.k}-WL")
        info = Check("theorem_info", INFO, len(outcomes), 0, dict(params, equal_outputs=equal),
                     reason="no claim for WL-distinguishable pairs")
        return [_skip("theorem", reason, params), info]
    fail = len(outcomes) - equal
    cex = None
    for o in outcomes:
        if o.outputs[0] != o.outputs[1]:
            cex = {"model": o.descriptor.to_dict(), "output_g": list(o.outputs[0]),
                   "output_h": list(o.outputs[1])}
            break
    return [_verdict("theorem", len(outcomes), fail, params, cex)]


def check_theorem(g, h, k: int, models, ctx: PairContext | None = None) -> list:
    """forward(F, A_G) = forward(F, A_H) for every model when G and H are k-WL equivalent."""
    ctx = _context(g, h, k, ctx)
    outcomes = []
    ag, ah = ctx.encoded
    for idx, model in enumerate(models):
        if model.mode != ign.RATIONAL:
            raise ValueError("certification requires rational-mode models")
        desc = ModelDescriptor(idx, -1, k, (model.in_channels,), 0, ())
        outcomes.append(ModelOutcome(desc, {}, (ign.forward(model, ag), ign.forward(model, ah))))
    return theorem_checks(ctx, outcomes)


# -- suites ------------------------------------------------------------------------------

def chain_check(checks) -> Check | None:
    """An upstream FAIL with a downstream PASS in the proof chain flags a harness bug."""
    status = {}
    for c in checks:
        if c.claim in CHAIN and c.status in (PASS, FAIL):
            status[c.claim] = FAIL if FAIL in (status.get(c.claim), c.status) else PASS
    present = [claim for claim in CHAIN if claim in status]
    if len(present) < 2:
        return None
    bad = [(a, b) for a, b in itertools.combinations(present, 2)
           if status[a] == FAIL and status[b] == PASS]
    cex = {"inconsistent": [list(p) for p in bad]} if bad else None
    return _verdict("proof_chain", len(present) - 1, len(bad), {"stages": present}, cex)


def run_suite(suite: str, g: ColouredGraph, h: ColouredGraph, k: int, models: int = 20,
              seed: int = 7, jobs: int = 1, m_max: int = 3, n_max: int | None = None,
              timing: bool = False) -> CertificationReport:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    start = time.perf_counter()
    ctx = PairContext(g, h, k)
    report = CertificationReport(suite, ctx.descriptor())
    wanted = set(SUITES[1:]) if suite == "all" else {suite}
    pattern_n = n_max if n_max is not None else (5 if k == 2 else 4)
    if "key-lemma" in wanted:
        report.checks.extend(check_key_lemma(g, h, k, m, ctx) for m in range(1, m_max + 1))
    if "decomposition" in wanted:
        report.checks.extend(check_observation_decomposition(pattern_n, k))
    if "goodness" in wanted:
        report.checks.append(check_observation_goodness(pattern_n, k))
    if "permute" in wanted:
        report.checks.extend(check_observation_permute(g, h, k, t, ctx=ctx)
                             for t in range(ctx.stable_round + 2))
    if "unused-constant" in wanted:
        for m in range(1, m_max + 1):
            report.checks.extend(check_unused_constant_case(g, h, k, m * (k - 1), pattern_n, ctx,
                                                            structure=m == 1))
    if wanted & {"feature", "theorem"}:
        in_channels = ctx.encoded[0].channels
        descriptors = certification_models(k, models, seed, in_channels)
        report.instance["models"] = {"count": models, "seed": seed}

        def rounds_for(d):
            return range(feature_round_cap(d.depth, k) + 1) if "feature" in wanted else ()

        outcomes = evaluate_models(ctx, descriptors, rounds_for, jobs)
        if "feature" in wanted:
            top = max((feature_round_cap(d.depth, k) for d in descriptors), default=-1)
            report.checks.extend(feature_checks(ctx, outcomes, range(top + 1)))
        if "theorem" in wanted:
            report.checks.extend(theorem_checks(ctx, outcomes))
    chain = chain_check(report.checks)
    if chain is not None:
        report.checks.append(chain)
    if timing:
        report.wall_clock = time.perf_counter() - start
    return report

