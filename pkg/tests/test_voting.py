import itertools
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from groupsim import voting as vt
from groupsim.rng import Stream


class CountingRng:
    def __init__(self, value=0.25):
        self.calls = 0
        self.value = value

    def random(self):
        self.calls += 1
        return self.value


def ballots(*pairs):
    return [vt.BallotEntry(i, c, w) for i, (c, w) in enumerate(pairs)]


# -- decide -----------------------------------------------------------------

def test_majority_clear_win_draws_nothing():
    rng = CountingRng()
    out = vt.decide(vt.Majority(), ballots((True, 1), (True, 1), (False, 1)), rng)
    assert out.correct and not out.tie_broken and out.margin == 1
    assert rng.calls == 0


def test_majority_tie_flips_coin():
    out_lo = vt.decide(vt.Majority(), ballots((True, 1), (False, 1)), CountingRng(0.1))
    out_hi = vt.decide(vt.Majority(), ballots((True, 1), (False, 1)), CountingRng(0.9))
    assert out_lo.tie_broken and out_lo.correct and out_lo.margin == 0
    assert out_hi.tie_broken and not out_hi.correct


def test_weighted_sum():
    out = vt.decide(vt.OptimalWeighted(), ballots((True, 2.0), (False, 0.5), (False, 0.5)), CountingRng())
    assert out.correct and out.margin == pytest.approx(1.0)


def test_majority_ignores_weights():
    out = vt.decide(vt.Majority(), ballots((True, 5.0), (False, 1.0), (False, 1.0)), CountingRng())
    assert not out.correct


def test_empty_ballot_rejected():
    with pytest.raises(ValueError):
        vt.decide(vt.Majority(), [], CountingRng())


def test_float_noise_is_not_a_tie():
    out = vt.decide(vt.AbilityWeighted(), ballots((True, 0.1 + 0.2), (False, 0.3)), CountingRng())
    assert out.tie_broken  # |margin| ~ 5.6e-17 sits inside the tolerance
    out = vt.decide(vt.AbilityWeighted(), ballots((True, 0.3 + 1e-9), (False, 0.3)), CountingRng())
    assert not out.tie_broken and out.correct


@settings(max_examples=200)
@given(st.lists(st.tuples(st.booleans(), st.integers(min_value=1, max_value=9)), min_size=1, max_size=9),
       st.sampled_from([0.1, 10.0]))
def test_scaling_weights_keeps_decision(pairs, c):
    base = ballots(*pairs)
    scaled = [vt.BallotEntry(b.agent, b.correct, b.weight * c) for b in base]
    r1, r2 = CountingRng(0.3), CountingRng(0.3)
    a = vt.decide(vt.AbilityWeighted(), base, r1)
    b = vt.decide(vt.AbilityWeighted(), scaled, r2)
    assert (a.correct, a.tie_broken) == (b.correct, b.tie_broken)
    assert r1.calls == r2.calls == (1 if a.tie_broken else 0)


# -- weights ----------------------------------------------------------------

def test_optimal_weight_values():
    assert vt.optimal_weight(0.5) == 0.0
    assert vt.optimal_weight(0.7689) == pytest.approx(math.log(0.7689 / 0.2311), abs=1e-12)
    assert vt.optimal_weight(0.7689) == pytest.approx(1.2025, abs=1e-3)
    assert vt.optimal_weight(0.3) == pytest.approx(-0.8472978603872037, abs=1e-12)


def test_optimal_weight_clamped():
    assert vt.optimal_weight(1.0) == pytest.approx(math.log((1 - 1e-6) / 1e-6))
    assert vt.optimal_weight(0.0) == pytest.approx(-math.log((1 - 1e-6) / 1e-6))


@given(st.floats(min_value=0, max_value=1))
def test_optimal_weight_sign(p):
    w = vt.optimal_weight(p)
    assert math.isfinite(w)
    if p > 0.5:
        assert w > 0
    elif p < 0.5:
        assert w < 0


def test_vote_weight_dispatch():
    assert vt.vote_weight(vt.Majority(), 7, 0.9, 0.6) == 1.0
    assert vt.vote_weight(vt.AbilityWeighted(), 7, 0.9, 0.6) == 7
    assert vt.vote_weight(vt.OptimalWeighted("true"), 7, 0.9, 0.6) == pytest.approx(vt.optimal_weight(0.9))
    assert vt.vote_weight(vt.OptimalWeighted("empirical"), 7, 0.9, 0.6) == pytest.approx(vt.optimal_weight(0.6))
    with pytest.raises(ValueError):
        vt.OptimalWeighted("guess")


# -- analytic majority ------------------------------------------------------

def test_majority_small_cases():
    p = 0.6192
    assert vt.analytic_majority_accuracy(1, p) == pytest.approx(p, abs=1e-15)
    assert vt.analytic_majority_accuracy(2, p) == pytest.approx(p, abs=1e-15)
    # p^3 + 3p^2q evaluated independently at p = 0.6192
    assert vt.analytic_majority_accuracy(3, p) == pytest.approx(0.6754, abs=1e-4)
    assert vt.analytic_majority_accuracy(3, p) == pytest.approx(p**3 + 3 * p**2 * (1 - p), abs=1e-15)
    assert vt.analytic_majority_accuracy(3, 0.5) == pytest.approx(0.5)


@pytest.mark.parametrize("n", range(1, 7))
@pytest.mark.parametrize("p", [0.51, 0.62, 0.77, 0.9])
def test_parity_identity(n, p):
    assert vt.analytic_majority_accuracy(2 * n, p) == pytest.approx(vt.analytic_majority_accuracy(2 * n - 1, p),
                                                                    abs=1e-12)


def test_majority_rejects_empty_group():
    with pytest.raises(ValueError):
        vt.analytic_majority_accuracy(0, 0.6)


@settings(max_examples=60)
@given(st.integers(min_value=1, max_value=12), st.floats(min_value=0, max_value=1))
def test_enumeration_matches_analytic(n, p):
    assert vt.enumerate_group_accuracy([p] * n, [1.0] * n) == pytest.approx(
        vt.analytic_majority_accuracy(n, p), abs=1e-12)


# -- bounds -----------------------------------------------------------------

def test_bounds_single_agent():
    lo, hi = vt.majority_accuracy_bounds([0.7])
    assert lo == pytest.approx(0.7) and hi == pytest.approx(0.7)


def test_bounds_reference_case():
    lo, hi = vt.majority_accuracy_bounds([0.5, 0.5, 1.0])
    # upper = min(1, sigma(2) = 2/2, sigma(1) = 1/1)
    assert hi == pytest.approx(1.0)
    exact = vt.enumerate_group_accuracy([0.5, 0.5, 1.0], [1, 1, 1])
    assert exact == pytest.approx(0.75)
    assert lo - 1e-12 <= exact <= hi + 1e-12


@pytest.mark.parametrize("p", [0.55, 0.62, 0.77])
@pytest.mark.parametrize("n", [3, 5, 7])
def test_bounds_bracket_homogeneous(n, p):
    lo, hi = vt.majority_accuracy_bounds([p] * n)
    assert lo - 1e-12 <= vt.analytic_majority_accuracy(n, p) <= hi + 1e-12


def test_bounds_reject_unsorted():
    with pytest.raises(ValueError):
        vt.majority_accuracy_bounds([0.9, 0.6])


@settings(max_examples=150)
@given(st.sampled_from([3, 5, 7]).flatmap(
    lambda n: st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=n, max_size=n)))
def test_bounds_contain_enumeration(accs):
    accs = sorted(accs)
    lo, hi = vt.majority_accuracy_bounds(accs)
    exact = vt.enumerate_group_accuracy(accs, [1.0] * len(accs))
    assert 0.0 <= lo <= hi <= 1.0
    assert lo - 1e-9 <= exact <= hi + 1e-9


# -- enumeration ------------------------------------------------------------

def test_enumeration_examples():
    assert vt.enumerate_group_accuracy([0.6, 0.6], [1, 1]) == pytest.approx(0.6, abs=1e-15)
    assert vt.enumerate_group_accuracy([0.9], [1]) == pytest.approx(0.9)
    assert vt.enumerate_group_accuracy([0.7] * 4, [1] * 4) == pytest.approx(
        vt.enumerate_group_accuracy([0.7] * 3, [1] * 3), abs=1e-12)


def _naive(accs, weights):
    total = 0.0
    for bits in itertools.product([0, 1], repeat=len(accs)):
        pr = 1.0
        m = 0.0
        for b, p, w in zip(bits, accs, weights):
            pr *= p if b else 1 - p
            m += w if b else -w
        total += pr * (1.0 if m > 1e-12 else 0.0 if m < -1e-12 else 0.5)
    return total


@settings(max_examples=60)
@given(st.integers(min_value=1, max_value=7).flatmap(lambda n: st.tuples(
    st.lists(st.floats(min_value=0, max_value=1), min_size=n, max_size=n),
    st.lists(st.floats(min_value=-3, max_value=3), min_size=n, max_size=n))))
def test_enumeration_matches_naive_loop(data):
    accs, weights = data
    assert vt.enumerate_group_accuracy(accs, weights) == pytest.approx(_naive(accs, weights), abs=1e-12)


def test_enumeration_limits():
    with pytest.raises(ValueError):
        vt.enumerate_group_accuracy([0.6] * 21, [1] * 21)
    with pytest.raises(ValueError):
        vt.enumerate_group_accuracy([0.6, 0.6], [1])
    with pytest.raises(ValueError):
        vt.enumerate_group_accuracy([], [])


def test_seven_agent_reference_accuracies():
    from groupsim.response import MonotoneLogistic, accuracy
    ps = [accuracy(MonotoneLogistic(), a, 5) for a in range(1, 8)]
    # frozen from an independent mpmath enumeration
    assert vt.enumerate_group_accuracy(ps, [1] * 7) == pytest.approx(0.680457199735, abs=1e-10)
    assert vt.enumerate_group_accuracy(ps, [vt.optimal_weight(p) for p in ps]) == pytest.approx(
        0.731387253963, abs=1e-10)
    assert vt.enumerate_group_accuracy(ps, list(range(1, 8))) == pytest.approx(0.722520345526, abs=1e-10)


def test_worse_than_random_votes_are_inverted():
    accs = [0.9, 0.2, 0.2]
    maj = vt.enumerate_group_accuracy(accs, [1, 1, 1])
    opt = vt.enumerate_group_accuracy(accs, [vt.optimal_weight(p) for p in accs])
    assert opt > maj
    assert opt >= max(accs)


# -- imitation --------------------------------------------------------------

def test_best_first_order_is_deterministic():
    rng = CountingRng()
    assert vt.answer_order([0.6, 0.9, 0.6, 0.7], "best_first", rng) == [1, 3, 0, 2]
    assert rng.calls == 0


def test_random_order_draws_one_key_per_agent():
    rng = CountingRng()
    order = vt.answer_order([0.6] * 5, "random", rng)
    assert sorted(order) == list(range(5)) and rng.calls == 5


def test_imitate_formula():
    # second agent: (1 - 0.5) * 0.6 + 0.5 * 1/1 = 0.8
    got = vt.imitate([0.7, 0.6], 0.5, [0, 1], [0.1, 0.79])
    assert got == [True, True]
    got = vt.imitate([0.7, 0.6], 0.5, [0, 1], [0.1, 0.81])
    assert got == [True, False]


def test_full_imitation_copies_first():
    accs = [0.55, 0.6, 0.9, 0.7]
    for u0 in (0.05, 0.95):
        uniforms = [0.99, 0.99, u0, 0.99]
        got = vt.imitate(accs, 1.0, [2, 0, 1, 3], uniforms)
        assert len(set(got)) == 1 and got[2] == (u0 < 0.9)


def test_no_imitation_is_independent():
    accs = [0.55, 0.6, 0.9]
    u = [0.56, 0.59, 0.95]
    assert vt.imitate(accs, 0.0, [2, 1, 0], u) == [u[i] < accs[i] for i in range(3)]


def test_generate_imitation_answers_validation():
    rng = Stream.for_run(0, 0, 0)
    with pytest.raises(ValueError):
        vt.generate_imitation_answers([], 0.5, "random", rng)
    with pytest.raises(ValueError):
        vt.generate_imitation_answers([0.6], 1.5, "random", rng)
    with pytest.raises(ValueError):
        vt.Imitation(chi=-0.1)
    with pytest.raises(ValueError):
        vt.Imitation(order="worst_first")


def test_generate_imitation_best_first_accuracy():
    rng = Stream.for_run(4, 0, 0)
    accs = [0.5, 0.55, 0.69]
    n = 20000
    hits = 0
    for _ in range(n):
        b = vt.generate_imitation_answers(accs, 1.0, "best_first", rng)
        hits += vt.decide(vt.Majority(), b, rng).correct
    assert hits / n == pytest.approx(0.69, abs=0.015)


def test_generate_imitation_zero_chi_matches_independent():
    rng = Stream.for_run(8, 0, 0)
    accs = [0.6, 0.7, 0.8]
    n = 20000
    counts = [0, 0, 0]
    for _ in range(n):
        for b in vt.generate_imitation_answers(accs, 0.0, "random", rng):
            counts[b.agent] += b.correct
    for c, p in zip(counts, accs):
        assert c / n == pytest.approx(p, abs=0.015)


def test_bound_containment_random_groups():
    rnd = random.Random(2024)
    for _ in range(200):
        n = rnd.choice([3, 5, 7])
        accs = sorted(rnd.uniform(0.5, 0.95) for _ in range(n))
        lo, hi = vt.majority_accuracy_bounds(accs)
        exact = vt.enumerate_group_accuracy(accs, [1.0] * n)
        assert lo - 1e-9 <= exact <= hi + 1e-9
