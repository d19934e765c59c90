"""Acceptance suite: one test per criterion, each with its tolerance and runtime budget.

Every test records a ``criterion N: PASS/FAIL`` line; ``conftest.py`` prints
them at the end of the session.
"""

import random
import time

import numpy as np
import pytest

from groupsim import voting as vt
from groupsim.config import ScenarioConfig
from groupsim.engine import run_scenario
from groupsim.experiments import get_preset, run_preset

RESULTS: dict[int, str] = {}


class Criterion:
    def __init__(self, number: int, budget: float):
        self.number = number
        self.budget = budget
        self.failures: list[str] = []
        self.notes: list[str] = []

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def approx(self, label, got, target, tol):
        ok = abs(got - target) <= tol
        self._record(ok, f"{label} = {got:.4f} (target {target} +/- {tol})")

    def check(self, label, ok, detail=""):
        self._record(bool(ok), f"{label}{': ' + detail if detail else ''}")

    def _record(self, ok, text):
        (self.notes if ok else self.failures).append(text)

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        if exc_type is not None:
            RESULTS[self.number] = f"criterion {self.number}: FAIL (error: {exc})"
            return False
        self.check("runtime", elapsed < self.budget, f"{elapsed:.2f}s of {self.budget:g}s")
        status = "FAIL" if self.failures else "PASS"
        detail = "; ".join(self.failures) if self.failures else f"{elapsed:.2f}s"
        RESULTS[self.number] = f"criterion {self.number}: {status} ({detail})"
        print(RESULTS[self.number])
        assert not self.failures, RESULTS[self.number]
        return False


def test_criterion_1_parity_identity():
    with Criterion(1, 1.0) as c:
        worst = 0.0
        for n in range(1, 7):
            for p in (0.51, 0.6192, 0.7689, 0.9):
                even = vt.analytic_majority_accuracy(2 * n, p)
                odd = vt.analytic_majority_accuracy(2 * n - 1, p)
                enum_even = vt.enumerate_group_accuracy([p] * (2 * n), [1.0] * (2 * n))
                enum_odd = vt.enumerate_group_accuracy([p] * (2 * n - 1), [1.0] * (2 * n - 1))
                worst = max(worst, abs(even - odd), abs(enum_even - even), abs(enum_odd - odd))
        c.check("max deviation <= 1e-12", worst <= 1e-12, f"{worst:.2e}")


def test_criterion_2_voting_comparison():
    with Criterion(2, 10.0) as c:
        m = run_preset("sec5_5_empirical_weights").metrics
        c.approx("majority", m["majority.aggregate"], 0.681, 0.015)
        c.approx("optimal/true", m["optimal_true.aggregate"], 0.731, 0.015)
        c.approx("optimal/empirical", m["optimal_empirical.aggregate"], 0.728, 0.015)


def test_criterion_3_flat_line():
    with Criterion(3, 20.0) as c:
        cases = [f"bad5_k{k}_optimal" for k in range(9)] + ["bad5_k0_majority", "bad5_k8_majority"]
        m = run_preset("fig5_2_bad_agents", cases=cases).metrics
        for k in range(9):
            c.approx(f"optimal k={k}", m[f"bad5_k{k}_optimal.aggregate"], 0.769, 0.015)
        drop = m["bad5_k0_majority.aggregate"] - m["bad5_k8_majority.aggregate"]
        c.check("majority drop k0 -> k8 >= 0.05", drop >= 0.05, f"{drop:.4f}")


def test_criterion_4_static_allocation():
    with Criterion(4, 10.0) as c:
        m = run_preset("fig5_4_static_ratio").metrics
        c.approx("ratio 3", m["ratio3.approp_share"], 0.80, 0.05)
        c.approx("ratio 1", m["ratio1.approp_share"], 0.50, 0.03)
        shares = [m[f"ratio{r}.approp_share"] for r in (1, 2, 3, 5)]
        c.check("monotone over ratios 1,2,3,5", all(a <= b for a, b in zip(shares, shares[1:])),
                ", ".join(f"{s:.3f}" for s in shares))


def test_criterion_5_allocation_cases():
    with Criterion(5, 30.0) as c:
        m = run_preset("fig5_5_alloc_cases_abcd").metrics
        a, b, cc, d = (m[f"{k}.approp_share"] for k in "abcd")
        c.approx("case a", a, 0.50, 0.05)
        c.approx("case b", b, 0.70, 0.05)
        c.check("case c > case b + 0.02", cc > b + 0.02, f"c - b = {cc - b:.4f}")
        c.check("case d > case b", d > b, f"d - b = {d - b:.4f}")


def test_criterion_6_dynamic_swap():
    with Criterion(6, 5.0) as c:
        m = run_preset("fig5_6_dynamic_swap").metrics
        for agent in (0, 1):
            share = m[f"agent{agent}.final_share"]
            c.check(f"agent {agent} final-500 share > 0.6", share > 0.6, f"{share:.4f}")


def test_criterion_7_imitation_endpoints():
    with Criterion(7, 10.0) as c:
        rnd = run_preset("fig5_9_imitation_random")
        c.approx("chi=1 random order", rnd.metrics["chi1.aggregate"], 0.584, 0.015)
        sweep = [rnd.metrics[f"chi{x:g}.aggregate"] for x in (0.0, 0.25, 0.5, 0.75, 1.0)]
        c.check("random-order sweep decreasing", all(a >= b for a, b in zip(sweep, sweep[1:])),
                ", ".join(f"{s:.3f}" for s in sweep))
        best = run_preset("fig5_10_imitation_best", cases=["uniform_chi1"])
        c.approx("chi=1 best first", best.metrics["uniform_chi1.aggregate"], 0.693, 0.015)


def test_criterion_8_bound_containment():
    with Criterion(8, 5.0) as c:
        rng = random.Random(8)
        outside = 0
        for _ in range(200):
            n = rng.choice((3, 5, 7))
            accs = sorted(rng.uniform(0.5, 0.95) for _ in range(n))
            lo, hi = vt.majority_accuracy_bounds(accs)
            exact = vt.enumerate_group_accuracy(accs, [1.0] * n)
            outside += not (lo - 1e-9 <= exact <= hi + 1e-9)
        c.check("all 200 groups inside bounds", outside == 0, f"{outside} outside")


def test_criterion_9_property_suites():
    import test_allocation as ta
    import test_response as tr

    with Criterion(9, 30.0) as c:
        props = [
            tr.test_monotone_decreasing_in_difficulty, tr.test_monotone_increasing_in_ability,
            tr.test_monotone_range, tr.test_asymptote, ta.test_ema_closed_form, ta.test_ema_stays_in_unit_interval,
            ta.test_thresholds_stay_clamped, ta.test_generalized_mean_limits,
            ta.test_generalized_mean_monotone_in_exponent, ta.test_dwell_time_mean,
        ]
        for prop in props:
            try:
                prop()
                c.check(prop.__name__, True)
            except AssertionError as exc:
                c.check(prop.__name__, False, str(exc).splitlines()[0] if str(exc) else "")
        cfg = get_preset("fig5_5_alloc_cases_abcd").cases["d"]
        from dataclasses import replace
        cfg = replace(cfg, runs=2, rounds=300, seed=123)
        a, b = run_scenario(cfg), run_scenario(ScenarioConfig(**{f: getattr(cfg, f) for f in cfg.__dataclass_fields__}))
        same = all(np.array_equal(getattr(x, f), getattr(y, f))
                   for x, y in zip(a.traces, b.traces)
                   for f in ("n_j", "group_correct", "stimulus", "psi_group", "assignment", "answered"))
        c.check("bit-identical rerun", same)


def test_criterion_10_shape_checks():
    with Criterion(10, 20.0) as c:
        m7 = run_preset("fig5_7_difficulty_scaled", cases=["d"]).metrics
        shift = m7["d.mean_agents.2"] - m7["d.mean_agents.0"]
        c.check("case d shifts >= 1 agent easy -> hard", shift >= 1.0, f"{shift:.3f}")
        m8 = run_preset("fig5_8_uniformize_cases", cases=["f"]).metrics
        acc = [m8[f"f.accuracy.{j}"] for j in range(3)]
        spread = max(acc) - min(acc)
        c.check("case f accuracy spread <= 0.05", spread <= 0.05, f"{spread:.4f}")
