import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wlign.certify import check_observation_decomposition, check_observation_goodness
from wlign.patterns import (
    CONSTANT_UNUSED,
    CONSTANT_USED,
    VARIABLE,
    EqualityPattern,
    class_kinds,
    compose,
    decompose,
    enumerate_patterns,
    first_half,
    goodify,
    has_used_constant,
    is_good,
    mask_to_set,
    membership,
    merge,
    merges,
    p_mask,
    p_set,
    p_tilde_mask,
    p_tilde_set,
    pair_pattern_ids,
    pattern_by_index,
    pattern_index,
    pattern_of,
    permute_pattern,
    permute_tuple,
    satisfies,
    tuple_grid,
)


def bell_numbers(m):
    b = [1]
    for n in range(m):
        b.append(sum(comb(n, j) * b[j] for j in range(n + 1)))
    return b


def P(*blocks, arity=None):
    return EqualityPattern.from_blocks(blocks, arity)


PAPER_MU = P({1, 4}, {2}, {3}, {5}, {6})


@pytest.mark.parametrize("arity", range(1, 9))
def test_bell_counts(arity):
    assert len(enumerate_patterns(arity)) == bell_numbers(8)[arity]


def test_bell_values():
    assert [len(enumerate_patterns(a)) for a in range(2, 9)] == [2, 5, 15, 52, 203, 877, 4140]


def test_enumerate_arity2():
    assert [str(p) for p in enumerate_patterns(2)] == ["{1,2}", "{1}{2}"]


def test_enumerate_bounds():
    with pytest.raises(ValueError):
        enumerate_patterns(11)
    with pytest.raises(ValueError):
        enumerate_patterns(0)


@pytest.mark.parametrize("arity", [3, 4, 6])
def test_enumeration_canonical_and_distinct(arity):
    pats = enumerate_patterns(arity)
    assert list(pats) == sorted(pats)
    assert len(set(pats)) == len(pats)
    for i, p in enumerate(pats):
        assert pattern_index(p) == i and pattern_by_index(arity, i) == p
        assert pattern_of(p.rgs) == p


def test_pattern_of_examples():
    assert str(pattern_of((5, 5, 7))) == "{1,2}{3}"
    v = (3, 8, 1)
    assert str(pattern_of(v + v)) == "{1,4}{2,5}{3,6}"
    assert pattern_of((0, 1, 2, 0, 7, 9)) == PAPER_MU


def test_class_kinds_paper_mu():
    kinds = class_kinds(PAPER_MU, 3)
    assert [c.kind for c in kinds] == [CONSTANT_USED, CONSTANT_UNUSED, CONSTANT_UNUSED, VARIABLE, VARIABLE]
    assert [c.rep for c in kinds] == [1, 2, 3, 5, 6]


def test_membership_examples():
    assert membership(P({1}, {2}, {3}, {4}), (1, 2), (3, 4))
    mu = P({1, 3}, {2}, {4})
    assert membership(mu, (1, 2), (1, 5))
    assert not membership(mu, (1, 2), (2, 5))
    assert membership(PAPER_MU, (10, 11, 12), (10, 20, 21))
    with pytest.raises(ValueError):
        membership(mu, (1, 2, 3), (1, 5))


def test_p_set_pairing():
    mu = P({1, 4}, {2, 5}, {3, 6})
    assert p_set(mu, (0, 1, 2), 4) == {(0, 1, 2)}


def test_p_set_paper_example():
    got = p_set(PAPER_MU, (0, 1, 2), 6)
    assert got == {(0, x, y) for x in (3, 4, 5) for y in (3, 4, 5) if x != y}
    assert len(got) == 6


def test_p_set_inconsistent_v_empty():
    mu = pattern_by_index(4, 14)  # all singletons
    assert p_set(mu, (0, 0), 4) == frozenset()
    assert p_tilde_set(mu, (0, 0), 4) == frozenset()


def test_p_tilde_paper_example():
    got = p_tilde_set(PAPER_MU, (0, 1, 2), 6)
    assert got == {(0, x, y) for x in range(1, 6) for y in range(1, 6) if x != y}
    assert len(got) == 20


def test_p_tilde_without_used_constants_v_independent():
    for mu in enumerate_patterns(4):
        if has_used_constant(mu, 2):
            continue
        tau = first_half(mu, 2)
        sets = {p_tilde_set(mu, v, 4) for v in itertools.product(range(4), repeat=2) if pattern_of(v) == tau}
        assert len(sets) == 1


def test_merge_paper_examples():
    assert str(merge(PAPER_MU, 4, 2)) == "{1,4}{2,5}{3}{6}"
    assert str(merge(PAPER_MU, 5, 3)) == "{1,4}{2}{3,6}{5}"
    assert [str(m) for _, m in merges(PAPER_MU)] == [
        "{1,4}{2,5}{3}{6}", "{1,4}{2}{3,5}{6}", "{1,4}{2,6}{3}{5}", "{1,4}{2}{3,6}{5}"]


def test_merge_creates_used_constant():
    merged = merge(PAPER_MU, 4, 2)
    kinds = class_kinds(merged, 3)
    assert kinds[1].block == (2, 5) and kinds[1].kind == CONSTANT_USED


def test_merge_wrong_kinds():
    with pytest.raises(ValueError):
        merge(PAPER_MU, 2, 4)
    with pytest.raises(ValueError):
        merge(PAPER_MU, 1, 2)
    with pytest.raises(ValueError):
        merge(PAPER_MU, 9, 2)


def test_decompose_paper_example():
    d = decompose(PAPER_MU, (0, 1, 2), 6)
    assert d.holds and len(d.p) == 6


def test_decompose_without_unused_constants():
    mu = P({1, 4}, {2, 5}, {3, 6})
    assert merges(mu) == []
    d = decompose(mu, (0, 1, 2), 4)
    assert d.holds and p_set(mu, (0, 1, 2), 4) == p_tilde_set(mu, (0, 1, 2), 4)


def test_permute_pattern_paper_example():
    mu = P({1, 5}, {2}, {3}, {4}, {6})
    got = permute_pattern((2, 1, 3), mu)
    assert set(got.blocks) == {(2, 5), (1,), (3,), (4,), (6,)}


def test_permute_identity_and_tuple():
    for mu in enumerate_patterns(6):
        assert permute_pattern((1, 2, 3), mu) == mu
    assert permute_tuple((2, 1, 3), ("a", "b", "c")) == ("b", "a", "c")
    with pytest.raises(ValueError):
        permute_tuple((1, 1, 3), ("a", "b", "c"))
    with pytest.raises(ValueError):
        permute_pattern((1, 2), PAPER_MU)


def test_good_examples():
    mu = P({1, 5}, {2}, {3}, {4}, {6})
    assert not is_good(mu)
    pi, good = goodify(mu)
    assert pi == (2, 1, 3) and is_good(good)
    assert str(good) == "{1}{2,5}{3}{4}{6}"
    assert is_good(P({1}, {2}, {3}, {4}, {5}, {6}))


@pytest.mark.parametrize("k", [2, 3])
def test_group_action(k):
    perms = list(itertools.permutations(range(1, k + 1)))
    for mu in enumerate_patterns(2 * k):
        for p1, p2 in itertools.product(perms, repeat=2):
            assert permute_pattern(p2, permute_pattern(p1, mu)) == permute_pattern(compose(p2, p1), mu)
    v = tuple("abc"[:k])
    for p1, p2 in itertools.product(perms, repeat=2):
        assert permute_tuple(p2, permute_tuple(p1, v)) == permute_tuple(compose(p2, p1), v)


@pytest.mark.parametrize("k,n", [(1, 4), (2, 4), (3, 3)])
def test_three_membership_definitions_literal(k, n):
    tuples = list(itertools.product(range(n), repeat=k))
    for mu in enumerate_patterns(2 * k):
        for v in tuples:
            members = p_set(mu, v, n)
            for w in tuples:
                a = membership(mu, v, w)
                assert a == (pattern_of(v + w) == mu) == (w in members) == satisfies(mu, v, w)


@pytest.mark.parametrize("k,n_max", [(1, 5), (2, 5), (3, 5)])
def test_membership_vs_conditions_exhaustive(k, n_max):
    for n in range(1, n_max + 1):
        pids = pair_pattern_ids(n, k)
        for r, v in enumerate(map(tuple, tuple_grid(n, k).tolist())):
            for mu_id, mu in enumerate(enumerate_patterns(2 * k)):
                assert np.array_equal(pids[r] == mu_id, p_mask(mu, v, n))


@pytest.mark.parametrize("k,n", [(2, 4), (3, 3)])
def test_masks_match_literal_sets(k, n):
    for mu in enumerate_patterns(2 * k):
        for v in itertools.product(range(n), repeat=k):
            assert mask_to_set(p_mask(mu, v, n), n, k) == p_set(mu, v, n)
            assert mask_to_set(p_tilde_mask(mu, v, n), n, k) == p_tilde_set(mu, v, n)


def test_pair_pattern_ids_match_pattern_of():
    n, k = 3, 2
    pids = pair_pattern_ids(n, k)
    tuples = list(itertools.product(range(n), repeat=k))
    for i, v in enumerate(tuples):
        for j, w in enumerate(tuples):
            assert pids[i, j] == pattern_index(pattern_of(v + w))


@pytest.mark.parametrize("k,n", [(2, 5), (3, 4)])
def test_p_sets_partition_universe(k, n):
    pids = pair_pattern_ids(n, k)
    total = len(enumerate_patterns(2 * k))
    for r in range(n ** k):
        counts = np.bincount(pids[r], minlength=total)
        assert counts.sum() == n ** k
    # each v2 lies in exactly one pattern with v: literal check on a small universe
    for v in itertools.product(range(3), repeat=2):
        covered = [w for mu in enumerate_patterns(4) for w in p_set(mu, v, 3)]
        assert sorted(covered) == sorted(itertools.product(range(3), repeat=2))


@pytest.mark.parametrize("k,n_max", [(2, 5), (3, 5)])
def test_decomposition_exhaustive(k, n_max):
    checks = check_observation_decomposition(n_max, k)
    assert [c.status for c in checks] == ["PASS", "PASS"]


@pytest.mark.parametrize("k,n_max", [(2, 5), (3, 5)])
def test_goodify_exhaustive(k, n_max):
    assert check_observation_goodness(n_max, k).status == "PASS"


@settings(max_examples=150)
@given(st.integers(1, 3), st.integers(1, 4), st.data())
def test_decompose_literal_random(k, n, data):
    mu = data.draw(st.sampled_from(enumerate_patterns(2 * k)))
    v = tuple(data.draw(st.lists(st.integers(0, n - 1), min_size=k, max_size=k)))
    assert decompose(mu, v, n).holds


@settings(max_examples=150)
@given(st.integers(1, 3), st.integers(1, 4), st.data())
def test_goodify_literal_random(k, n, data):
    mu = data.draw(st.sampled_from(enumerate_patterns(2 * k)))
    v = tuple(data.draw(st.lists(st.integers(0, n - 1), min_size=k, max_size=k)))
    pi, good = goodify(mu, v)
    assert is_good(good)
    assert p_tilde_set(mu, v, n) == p_tilde_set(good, permute_tuple(pi, v), n)


@settings(max_examples=100)
@given(st.integers(1, 3), st.integers(1, 4), st.data())
def test_p_subset_of_p_tilde(k, n, data):
    mu = data.draw(st.sampled_from(enumerate_patterns(2 * k)))
    v = tuple(data.draw(st.lists(st.integers(0, n - 1), min_size=k, max_size=k)))
    assert p_set(mu, v, n) <= p_tilde_set(mu, v, n)


def test_p_tilde_drops_only_unused_distinctness():
    # v2 = (0, 1, 3): entry 1 collides with unused constant class {2}; allowed only in P~
    assert (0, 1, 3) in p_tilde_set(PAPER_MU, (0, 1, 2), 6)
    assert (0, 1, 3) not in p_set(PAPER_MU, (0, 1, 2), 6)
    assert (0, 0, 3) not in p_tilde_set(PAPER_MU, (0, 1, 2), 6)
