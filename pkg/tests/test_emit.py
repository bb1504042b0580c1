import json
import re
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from redsched.algorithms import schedule_binomial
from redsched.cost import MachineParams
from redsched.emit import emit, parse_json, to_csv, to_json, to_svg
from redsched.greedy_bi import bi_greedy_schedule
from redsched.greedy_uni import uni_greedy_schedule
from redsched.schedule import SegmentPlan, simulate


def test_json_fields():
    sched = schedule_binomial(MachineParams(1, 1, 1, 2), 3)
    data = json.loads(to_json(sched))
    assert set(data) >= {"p", "plan", "params", "events"}
    assert data["events"] == [{"seg": 1, "from": 1, "to": 0, "start": 0}]


def test_rationals_survive_json():
    sched = uni_greedy_schedule(MachineParams(Fraction(1, 3), Fraction(2, 5), 0, 5), SegmentPlan((2, 1)))
    text = to_json(sched)
    assert '"1/3"' in text
    assert parse_json(text) == sched


@settings(max_examples=60, deadline=None)
@given(p=st.integers(min_value=2, max_value=20),
       sizes=st.lists(st.integers(min_value=1, max_value=5), min_size=1, max_size=4),
       a=st.fractions(min_value=0, max_value=5, max_denominator=7),
       b=st.fractions(min_value=Fraction(1, 7), max_value=5, max_denominator=7),
       g=st.fractions(min_value=0, max_value=5, max_denominator=7))
def test_json_round_trip(p, sizes, a, b, g):
    sched = uni_greedy_schedule(MachineParams(a, b, g, p), SegmentPlan(tuple(sizes)))
    assert parse_json(to_json(sched)) == sched


def test_csv_single_event():
    lines = to_csv(schedule_binomial(MachineParams(1, 1, 1, 2), 3)).strip().splitlines()
    assert lines[0] == "seg,from,to,start,comm,comp"
    assert lines[1:] == ["1,1,0,0,4,3"]


def test_csv_float_option():
    sched = schedule_binomial(MachineParams(Fraction(1, 2), 1, 0, 2), 1)
    assert to_csv(sched, as_float=True).splitlines()[1] == "1,1,0,0.0,1.5,0.0"
    assert to_csv(sched).splitlines()[1] == "1,1,0,0,3/2,0"


def test_svg_lanes_and_colours():
    sched = bi_greedy_schedule(MachineParams(2, 0, 1, 16), SegmentPlan((1,) * 5))
    svg = to_svg(sched, simulate(sched))
    assert svg.startswith("<svg") or svg.startswith("<?xml")
    assert len(re.findall(r'<g id="proc-\d+">', svg)) == 16
    assert set(re.findall(r'class="send seg-(\d+)"', svg)) == {"1", "2", "3", "4", "5"}
    assert 'class="compute seg-1"' in svg


def test_emit_dispatch():
    sched = schedule_binomial(MachineParams(1, 1, 1, 2), 3)
    assert emit(sched, "json").startswith(b"{")
    assert emit(sched, "csv").startswith(b"seg,")
    assert b"<svg" in emit(sched, "svg")
    with pytest.raises(ValueError):
        emit(sched, "png")
