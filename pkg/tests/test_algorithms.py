from fractions import Fraction

import pytest

from redsched.algorithms import schedule_binomial, schedule_pipeline
from redsched.cost import MachineParams, MessageSpec, reduce_lower_bounds, uni_time
from redsched.schedule import SegmentPlan, check_correctness, simulate, validate_uni


@pytest.mark.parametrize("p,m,params,want", [
    (4, 5, (10, 1, 0), 30),
    (2, 3, (1, 2, 3), 16),
    (5, 1, (0, 1, 1), 6),
])
def test_binomial_examples(p, m, params, want):
    sched = schedule_binomial(MachineParams(*params, p), m)
    assert simulate(sched).completion == want
    assert len(sched.events) == p - 1


def test_binomial_p2_is_one_event():
    assert len(schedule_binomial(MachineParams(1, 1, 1, 2), 3).events) == 1


@pytest.mark.parametrize("p", [2, 3, 7, 8, 9, 100, 128])
def test_binomial_matches_formula_with_rationals(p):
    params = MachineParams(Fraction(3, 2), Fraction(1, 3), Fraction(2, 7), p)
    sched = schedule_binomial(params, 6)
    assert simulate(sched).completion == uni_time("binomial", params, MessageSpec(6, 6)).value
    assert validate_uni(sched).ok and check_correctness(sched)


def test_pipeline_hand_trace():
    sched = schedule_pipeline(MachineParams(1, 1, 1, 3), SegmentPlan((1, 1)))
    assert simulate(sched).completion == 11
    starts = [(e.segment, e.sender, e.receiver, e.start) for e in sched.events]
    assert starts == [(1, 2, 1, 0), (1, 1, 0, 3), (2, 2, 1, 5), (2, 1, 0, 8)]


def test_pipeline_single_hop():
    assert simulate(schedule_pipeline(MachineParams(2, 1, 1, 2), SegmentPlan((5,)))).completion == 12


@pytest.mark.parametrize("p", [2, 4, 9, 33])
def test_pipeline_one_segment_is_chain(p):
    params = MachineParams(2, 1, 3, p)
    assert simulate(schedule_pipeline(params, SegmentPlan((4,)))).completion == (p - 1) * 18


@pytest.mark.parametrize("p,q,s", [(4, 3, 2), (8, 5, 1), (17, 4, 3)])
def test_pipeline_within_formula_and_bounds(p, q, s):
    params = MachineParams(1, 1, 0, p)
    plan = SegmentPlan((s,) * q)
    done = simulate(schedule_pipeline(params, plan)).completion
    assert done <= uni_time("pipeline", params, MessageSpec(q * s, s)).value
    assert done >= reduce_lower_bounds(params, q * s).bandwidth
