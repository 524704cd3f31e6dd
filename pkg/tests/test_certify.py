import numpy as np
import pytest

from helpers import asymmetric_digraph
from wlign import ign
from wlign.certify import (
    CHAIN,
    FAIL,
    INFO,
    PASS,
    SKIP,
    CertificationReport,
    Check,
    ModelDescriptor,
    ModelOutcome,
    PairContext,
    certification_models,
    chain_check,
    check_key_lemma,
    check_lemma_feature_implication,
    check_observation_decomposition,
    check_observation_goodness,
    check_observation_permute,
    check_theorem,
    check_unused_constant_case,
    exit_code,
    feature_round_cap,
    run_suite,
    theorem_checks,
)
from wlign.graphs import corpus, cycle


@pytest.fixture(scope="module")
def c6():
    return corpus("cycle6_vs_two_triangles")


@pytest.fixture(scope="module")
def p4():
    return corpus("path4_vs_star")


def model_for(g, h, k, depth, width, seed, mode=ign.RATIONAL):
    channels = ign.encode_pair(g, h, k)[0].channels
    return ign.sample_model(k, depth, (channels,) + (width,) * depth, seed=seed, mode=mode)


class CoarsenedContext(PairContext):
    """Pretends every tuple has one colour at a chosen round: a broken WL implementation."""

    def __init__(self, g, h, k, bad_round):
        super().__init__(g, h, k)
        self.bad_round = bad_round

    def colours(self, t):
        cg, ch = super().colours(t)
        if t == self.bad_round:
            return np.zeros_like(cg), np.zeros_like(ch)
        return cg, ch


# -- key lemma ---------------------------------------------------------------------------

@pytest.mark.parametrize("m", [1, 2, 3])
def test_key_lemma_cycle_pair(c6, m):
    g, h = c6
    c = check_key_lemma(g, h, 2, m)
    assert c.status == PASS and c.instances > 0 and c.failures == 0
    assert c.params["t"] == m and c.params["t_prev"] == m - 1


@pytest.mark.parametrize("m", [1, 2])
def test_key_lemma_oracle_agrees_with_vectorized(c6, m):
    g, h = c6
    ctx = PairContext(g, h, 2)
    fast = check_key_lemma(g, h, 2, m, ctx)
    slow = check_key_lemma(g, h, 2, m, ctx, method="oracle")
    assert (fast.status, fast.instances, fast.failures) == (slow.status, slow.instances, slow.failures)


def test_key_lemma_identity_pair():
    g = cycle(5)
    assert check_key_lemma(g, g, 2, 2).status == PASS


def test_key_lemma_skips_when_distinguished(p4):
    g, h = p4
    assert check_key_lemma(g, h, 2, 1).status == PASS
    c = check_key_lemma(g, h, 2, 2)
    assert c.status == SKIP and "round 1" in c.reason


def test_key_lemma_skips_on_size_mismatch():
    c = check_key_lemma(cycle(4), cycle(5), 2, 1)
    assert c.status == SKIP


def test_key_lemma_k3_all_patterns():
    g, h = corpus("prism_vs_relabelled_prism")
    c = check_key_lemma(g, h, 3, 1)
    assert c.status == PASS and c.instances >= g.n ** 3


def test_key_lemma_detects_broken_colouring(c6):
    g, h = c6
    ctx = CoarsenedContext(g, h, 2, bad_round=1)
    c = check_key_lemma(g, h, 2, 1, ctx)
    assert c.status == FAIL and c.failures > 0
    assert set(c.counterexample) == {"v", "w", "mu_id", "mu"}


def test_key_lemma_rejects_foreign_context(c6):
    g, h = c6
    with pytest.raises(ValueError):
        check_key_lemma(g, h, 2, 1, PairContext(h, g, 2))
    with pytest.raises(ValueError):
        check_key_lemma(g, h, 2, 0)


# -- observations ----------------------------------------------------------------------------

def test_decomposition_k3():
    checks = check_observation_decomposition(4, 3)
    assert [c.claim for c in checks] == ["decomposition", "membership_conditions"]
    assert all(c.status == PASS for c in checks)
    assert checks[0].instances == 203 * (1 + 8 + 27 + 64)


def test_decomposition_single_vertex():
    checks = check_observation_decomposition(1, 2)
    assert all(c.status == PASS and c.instances == 15 for c in checks)


def test_goodness():
    c = check_observation_goodness(4, 2)
    assert c.status == PASS and c.instances == 15 * (1 + 4 + 9 + 16)


@pytest.mark.parametrize("t", range(4))
def test_permute_asymmetric_digraph(t):
    g = asymmetric_digraph()
    c = check_observation_permute(g, g, 2, t)
    assert c.status == PASS and c.instances > 0 and c.params["permutations"] == 2


@pytest.mark.parametrize("t", range(5))
def test_permute_cycle_k3(c6, t):
    g, h = c6
    c = check_observation_permute(g, h, 3, t)
    assert c.status == PASS and c.params["permutations"] == 6


def test_permute_sampled_permutations(c6):
    g, h = c6
    c = check_observation_permute(g, h, 3, 1, trials=3, seed=1)
    assert c.params["permutations"] == 3 and c.status == PASS


def test_unused_constant_case(c6):
    g, h = c6
    out = check_unused_constant_case(g, h, 2, 1, n_max=4)
    assert [c.claim for c in out] == ["unused_constant_multiset", "unused_constant_structure"]
    assert all(c.status == PASS for c in out)
    assert out[0].params["patterns"] == 4  # B(2) * B(2), no block crosses the halves


def test_unused_constant_rounds(c6):
    g, h = c6
    for t in (2, 3):
        (c,) = check_unused_constant_case(g, h, 2, t, structure=False)
        assert c.status == PASS
    (c,) = check_unused_constant_case(g, h, 3, 1, structure=False)
    assert c.status == SKIP


def test_unused_constant_detects_broken_colouring(c6):
    g, h = c6
    ctx = CoarsenedContext(g, h, 2, bad_round=2)
    (c,) = check_unused_constant_case(g, h, 2, 2, ctx=ctx, structure=False)
    assert c.status == FAIL


# -- features and theorem --------------------------------------------------------------------

def test_feature_round_cap():
    assert feature_round_cap(1, 2) == 1
    assert feature_round_cap(2, 3) == 5


@pytest.mark.parametrize("t", [0, 1, 2])
def test_feature_implication_cycle(c6, t):
    g, h = c6
    model = model_for(g, h, 2, 2, 3, seed=t)
    c = check_lemma_feature_implication(g, h, 2, model, t)
    assert c.status == PASS and c.instances > 0


def test_feature_implication_skips(c6, p4):
    g, h = c6
    model = model_for(g, h, 2, 1, 2, seed=0)
    assert check_lemma_feature_implication(g, h, 2, model, 2).status == SKIP
    g, h = p4
    model = model_for(g, h, 2, 3, 2, seed=0)
    assert check_lemma_feature_implication(g, h, 2, model, 2).status == SKIP


def test_feature_implication_detects_broken_colouring(c6):
    g, h = c6
    model = model_for(g, h, 2, 1, 4, seed=3)
    ctx = CoarsenedContext(g, h, 2, bad_round=1)
    c = check_lemma_feature_implication(g, h, 2, model, 1, ctx)
    assert c.status == FAIL and c.counterexample["layer"] == 1


def test_feature_rejects_float_model(c6):
    g, h = c6
    model = model_for(g, h, 2, 1, 2, seed=0, mode=ign.FLOAT)
    with pytest.raises(ValueError):
        check_lemma_feature_implication(g, h, 2, model, 0)
    with pytest.raises(ValueError):
        check_theorem(g, h, 2, [model])


def test_theorem_on_relabelled_pair():
    g, h = corpus("prism_vs_relabelled_prism")
    models = [model_for(g, h, 2, 2, 3, seed=s) for s in range(5)]
    (c,) = check_theorem(g, h, 2, models)
    assert c.status == PASS and c.instances == 5


def test_theorem_skips_with_info_for_distinguishable(p4):
    g, h = p4
    models = [model_for(g, h, 2, 3, 3, seed=s) for s in range(10)]
    skip, info = check_theorem(g, h, 2, models)
    assert skip.status == SKIP and info.status == INFO
    assert 0 <= info.params["equal_outputs"] <= 10


def test_theorem_flags_unequal_outputs(c6):
    g, h = c6
    ctx = PairContext(g, h, 2)
    desc = ModelDescriptor(0, 1, 2, (1, 2), 2, (2, 2))
    outcomes = [ModelOutcome(desc, {}, ((0.0, 1.0), (0.0, 1.0))),
                ModelOutcome(desc, {}, ((0.0, 1.0), (1.0, 1.0)))]
    (c,) = theorem_checks(ctx, outcomes)
    assert c.status == FAIL and c.failures == 1 and c.counterexample["output_h"] == [1.0, 1.0]


def test_certification_models_deterministic():
    a = certification_models(2, 10, 7, 1)
    assert a == certification_models(2, 10, 7, 1)
    assert a != certification_models(2, 10, 8, 1)
    assert [d.depth for d in a[:4]] == [1, 2, 3, 1]
    assert all(max(d.channels[1:]) <= 8 and d.channels[0] == 1 for d in a)
    assert len({d.seed for d in a}) == 10
    k3 = certification_models(3, 6, 7, 15)
    assert all(d.depth <= 2 and max(d.channels[1:]) <= 4 for d in k3)


# -- chain and report ------------------------------------------------------------------------

def test_chain_check_flags_inconsistency():
    checks = [Check("key_lemma", FAIL, 1, 1), Check("theorem", PASS, 1, 0)]
    c = chain_check(checks)
    assert c.status == FAIL and c.counterexample == {"inconsistent": [["key_lemma", "theorem"]]}
    ok = chain_check([Check(claim, PASS, 1, 0) for claim in CHAIN])
    assert ok.status == PASS and ok.instances == 2
    assert chain_check([Check("theorem", PASS, 1, 0)]) is None
    downstream_fail = chain_check([Check("key_lemma", PASS, 1, 0), Check("theorem", FAIL, 1, 1)])
    assert downstream_fail.status == PASS


def test_report_status_and_exit_codes():
    r = CertificationReport()
    assert r.status == SKIP and exit_code(r) == 2 and r.to_dict() == {"checks": [], "status": SKIP}
    r.checks.append(Check("x", PASS))
    assert exit_code(r) == 0
    r.checks.append(Check("y", SKIP))
    assert exit_code(r) == 0
    r.checks.append(Check("z", FAIL, 3, 2))
    assert exit_code(r) == 1 and r.failures() == 2


def test_run_suite_all_cycle(c6):
    g, h = c6
    r = run_suite("all", g, h, 2, models=10)
    claims = {c.claim for c in r.checks}
    assert {"key_lemma", "decomposition", "membership_conditions", "goodness", "permute",
            "unused_constant_multiset", "unused_constant_structure", "feature_implication",
            "theorem", "proof_chain"} <= claims
    assert r.status == PASS and all(c.status == PASS for c in r.checks)
    assert r.to_dict()["instance"]["models"] == {"count": 10, "seed": 7}


def test_run_suite_deterministic(c6):
    g, h = c6
    a = run_suite("feature", g, h, 2, models=6).to_dict()
    b = run_suite("feature", g, h, 2, models=6).to_dict()
    assert a == b and "wall_clock_s" not in a
    assert "wall_clock_s" in run_suite("goodness", g, h, 2, n_max=2, timing=True).to_dict()


def test_run_suite_parallel_matches_serial(c6):
    g, h = c6
    serial = run_suite("theorem", g, h, 2, models=4, jobs=1).to_dict()
    parallel = run_suite("theorem", g, h, 2, models=4, jobs=2).to_dict()
    assert serial == parallel


def test_run_suite_distinguishable_is_skip(p4):
    g, h = p4
    r = run_suite("theorem", g, h, 2, models=5)
    assert r.status == SKIP and exit_code(r) == 2


def test_run_suite_unknown():
    with pytest.raises(ValueError):
        run_suite("nope", cycle(3), cycle(3), 2)
