"""Acceptance checks, one or more tests per numbered criterion.

The terminal summary prints one PASS/FAIL line per criterion.  A criterion
is PASS only if every test carrying its marker passed; an expected failure
counts as FAIL.
"""

import itertools
import time
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from redsched.algorithms import schedule_binomial, schedule_pipeline
from redsched.cost import (
    MachineParams,
    MessageSpec,
    butterfly_threshold_ratio,
    butterfly_threshold_scan,
    ceil_log2,
    reduce_lower_bounds,
    uni_time,
)
from redsched.emit import parse_json
from redsched.greedy_bi import bi_greedy_schedule, check_round_conjecture
from redsched.greedy_uni import brute_force_min_time, uni_greedy_schedule, uni_greedy_time
from redsched.schedule import SegmentPlan, check_correctness, simulate, validate_uni
from redsched.segmentation import (
    UnequalGrid,
    ratio_vs_standards,
    summarize,
    unequal_experiment,
    unequal_point,
)

criterion = pytest.mark.criterion


def _report(n, ok, detail=""):
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())


# 1 --------------------------------------------------------------------------

def _small_plans():
    for q in (1, 2, 3):
        yield from itertools.product((1, 2, 3), repeat=q)


@criterion(1)
def test_greedy_equals_exhaustive_minimum():
    start = time.perf_counter()
    mismatches, checked = [], 0
    costs = [c for c in itertools.product((0, 1, 2), repeat=3) if c[0] + c[1] > 0]
    for p in (2, 3, 4, 5):
        for sizes in _small_plans():
            plan = SegmentPlan(sizes)
            for a, b, g in costs:
                params = MachineParams(a, b, g, p)
                greedy = uni_greedy_time(params, plan)
                best = brute_force_min_time(params, plan)
                checked += 1
                if greedy != best:
                    mismatches.append((p, sizes, (a, b, g), greedy, best))
    elapsed = time.perf_counter() - start
    _report(1, not mismatches, f"{checked} instances, {len(mismatches)} mismatches, {elapsed:.1f}s")
    assert checked == 4 * 39 * 24
    assert not mismatches
    assert elapsed < 300


# 2 --------------------------------------------------------------------------

@criterion(2)
@pytest.mark.parametrize("a,b,g,m", [
    (10, 1, 0, 100),
    (1, 1, 1, 7),
    (Fraction(1, 3), Fraction(5, 2), Fraction(7, 4), 13),
])
def test_single_segment_greedy_equals_binomial(a, b, g, m):
    bad = [p for p in range(2, 513)
           if uni_greedy_time(MachineParams(a, b, g, p), SegmentPlan((m,)))
           != ceil_log2(p) * (a + b * m + g * m)]
    _report(2, not bad, f"({a},{b},{g}) m={m}")
    assert not bad


# 3 --------------------------------------------------------------------------

@criterion(3)
def test_bidirectional_round_count():
    start = time.perf_counter()
    report = check_round_conjecture(range(2, 65), range(1, 11), [(1, 0), (2, 1), (3, 1), (5, 2)])
    p16 = simulate(bi_greedy_schedule(MachineParams(2, 0, 1, 16), SegmentPlan((1,) * 5))).completion
    elapsed = time.perf_counter() - start
    ok = report.ok and p16 == 24 and report.checked == 63 * 10 * 4
    _report(3, ok, f"{report.checked} instances, {len(report.counterexamples)} mismatches, "
                   f"{len(report.unsafe)} unsafe, p=16 q=5 -> {p16}, {elapsed:.1f}s")
    assert report.counterexamples == []
    assert report.unsafe == []
    assert report.checked == 63 * 10 * 4
    assert p16 == 24
    assert elapsed < 120


# 4 --------------------------------------------------------------------------

@criterion(4)
@pytest.mark.parametrize("p,alpha,plan,ratio", [
    (8, 0, (2, 1, 1, 1, 1, 1, 1, 1, 1), 1.0571),
    (6, 1, (5, 3, 2), 1.0408),
    (12, 0, (2, 2, 1, 1, 1, 1, 1, 1), 1.0732),
])
def test_listed_unequal_rows(p, alpha, plan, ratio):
    rec = unequal_point((p, alpha, 1, 1, 10, "greedy"))
    ok = plan in rec.best_plans and abs(float(rec.ratio) - ratio) <= 1e-3
    _report(4, ok, f"p={p} alpha={alpha} ratio={float(rec.ratio):.4f}")
    assert plan in rec.best_plans
    assert float(rec.ratio) == pytest.approx(ratio, abs=1e-3)


@criterion(4)
@pytest.mark.slow
def test_unequal_grid_summary():
    start = time.perf_counter()
    summary = summarize(unequal_experiment(UnequalGrid()))
    pipeline = summarize(unequal_experiment(UnequalGrid(), algorithm="pipeline"))
    elapsed = time.perf_counter() - start
    ok = (abs(summary.max_ratio - 1.073) <= 1e-3
          and abs(summary.mean_improvement - 0.020) <= 0.002
          and pipeline.unequal_count == 0)
    _report(4, ok, f"points={summary.points} unequal={summary.unequal_count} "
                   f"max={summary.max_ratio:.5f} mean={summary.mean_improvement:.5f} "
                   f"pipeline_unequal={pipeline.unequal_count} {elapsed:.1f}s")
    assert summary.max_ratio == pytest.approx(1.073, abs=1e-3)
    assert summary.mean_improvement == pytest.approx(0.020, abs=0.002)
    assert pipeline.unequal_count == 0
    assert elapsed < 600


# 5 --------------------------------------------------------------------------

CURVE = MachineParams(10, 1, 0, 64)


@criterion(5)
@pytest.mark.xfail(strict=True, reason=(
    "two-segment greedy plans beat binomial from m=22 on (ratio 1.0159 at m=22, "
    "1.0769 at m=32); the schedules pass every safety check"))
def test_curve_flat_below_64():
    above = [(m, r.ratio) for m in range(1, 64) for r in [ratio_vs_standards(CURVE, m)]
             if r.ratio != 1.0]
    _report(5, not above, f"m<64 with ratio != 1: {len(above)} (first {above[:1]})")
    assert not above


@criterion(5)
def test_curve_peak_and_tail():
    ratios = {2 ** k: ratio_vs_standards(CURVE, 2 ** k).ratio for k in range(0, 21)}
    peak_m = max(ratios, key=ratios.get)
    ok = 1.35 <= ratios[peak_m] <= 1.65 and ratios[2 ** 20] < ratios[2 ** 14]
    _report(5, ok, f"peak {ratios[peak_m]:.4f} at m={peak_m}, "
                   f"m=2^14 {ratios[2 ** 14]:.4f}, m=2^20 {ratios[2 ** 20]:.4f}")
    assert 1.35 <= ratios[peak_m] <= 1.65
    assert ratios[2 ** 20] < ratios[2 ** 14]


# 6 --------------------------------------------------------------------------

@criterion(6)
def test_butterfly_threshold():
    closed = butterfly_threshold_ratio(1000)
    scans = {a: butterfly_threshold_scan(1000, alpha=a) for a in (1, 10, 10 ** 4)}
    ok = 4.0 < closed < 5.0 and all(abs(v - closed) <= 1e-6 * closed for v in scans.values())
    _report(6, ok, f"closed form {closed:.9f}, scans {[round(v, 9) for v in scans.values()]}")
    assert 4.0 < closed < 5.0
    for value in scans.values():
        assert value == pytest.approx(closed, rel=1e-6)


# 7 --------------------------------------------------------------------------

@criterion(7)
def test_binomial_simulation_matches_formula():
    params = [MachineParams(10, 1, 0, 2), MachineParams(Fraction(3, 2), Fraction(1, 3), 2, 2)]
    bad = []
    for p in range(2, 129):
        for base in params:
            pp = MachineParams(base.alpha, base.beta, base.gamma, p)
            got = simulate(schedule_binomial(pp, 9)).completion
            if got != uni_time("binomial", pp, MessageSpec(9, 9)).value:
                bad.append(p)
    _report(7, not bad, f"binomial p=2..128, {len(bad)} mismatches")
    assert not bad


@criterion(7)
def test_pipeline_simulation_within_bounds():
    params = MachineParams(3, 1, 1, 2)
    bad = []
    for p in range(4, 65):
        pp = MachineParams(params.alpha, params.beta, params.gamma, p)
        for q in range(1, 17):
            for s in (1, 3):
                plan = SegmentPlan((s,) * q)
                got = simulate(schedule_pipeline(pp, plan)).completion
                formula = uni_time("pipeline", pp, MessageSpec(q * s, s)).value
                lb = reduce_lower_bounds(pp, q * s)
                if not (max(lb.latency, lb.bandwidth, lb.computation) <= got <= formula):
                    bad.append((p, q, s, got, formula))
    _report(7, not bad, f"pipeline p=4..64 q=1..16, {len(bad)} out of bounds")
    assert not bad


# 8 --------------------------------------------------------------------------

def _build(kind, params, plan):
    if kind == "binomial":
        return schedule_binomial(params, plan.m)
    if kind == "pipeline":
        return schedule_pipeline(params, plan)
    if kind == "uni-greedy":
        return uni_greedy_schedule(params, plan)
    return bi_greedy_schedule(params, plan)


@criterion(8)
@settings(max_examples=300, deadline=None)
@given(kind=st.sampled_from(["binomial", "pipeline", "uni-greedy", "bi-greedy"]),
       p=st.integers(min_value=2, max_value=48),
       sizes=st.lists(st.integers(min_value=1, max_value=4), min_size=1, max_size=6),
       a=st.integers(min_value=1, max_value=5),
       b=st.integers(min_value=0, max_value=3),
       g=st.integers(min_value=0, max_value=3))
def test_generated_schedules_are_safe(kind, p, sizes, a, b, g):
    params = MachineParams(a, b, g, p)
    sched = _build(kind, params, SegmentPlan(tuple(sizes)))
    simulate(sched)
    assert check_correctness(sched)
    if kind != "bi-greedy":
        assert validate_uni(sched).ok


# 9 --------------------------------------------------------------------------

@criterion(9)
def test_out_of_order_schedule_beats_greedy_by_one(fixture_text):
    sched = parse_json(fixture_text("out_of_order_38.json"))
    params = MachineParams(2, 0, 1, 15)
    greedy = uni_greedy_time(params, SegmentPlan((1,) * 5))
    done = simulate(sched).completion
    report = validate_uni(sched)
    ok = (sched.params == params and check_correctness(sched)
          and report.rule == "in-order" and done == greedy - 1)
    _report(9, ok, f"greedy {greedy}, fixture {done}, violated rule {report.rule}")
    assert sched.params == params and sched.plan.sizes == (1,) * 5
    assert check_correctness(sched)
    assert report.rule == "in-order"
    assert done == greedy - 1


@criterion(9)
def test_out_of_order_gap_can_exceed_one(fixture_text):
    sched = parse_json(fixture_text("out_of_order_36.json"))
    assert check_correctness(sched)
    assert validate_uni(sched).rule == "in-order"
    assert simulate(sched).completion == 36
