"""Bi-greedy: discrete-time port filling for bidirectional reductions.

At every integer time step the scheduler walks the unfinished segments from
the lowest index up and pairs as many idle send ports with idle receive ports
as it can.  Processors whose both ports are idle are split between the two
roles so that the number of pairs is maximal.  A processor may receive a later
segment before it has sent an earlier one, unlike the uni-greedy schedule.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple

from . import kernels
from .cost import MachineParams, ceil_log2
from .schedule import BI, Schedule, SegmentPlan, check_correctness, simulate


def scaled_params(params: MachineParams) -> Tuple[MachineParams, int]:
    """Multiply the costs by their common denominator so durations are integers."""
    k = kernels.scale_factor(params)
    return MachineParams(params.alpha * k, params.beta * k, params.gamma * k, params.p), k


def _integer_durations(params: MachineParams, plan: SegmentPlan):
    comm, comp, k = kernels.integer_costs(params, plan.sizes)
    if k != 1:
        raise ValueError("bi-greedy runs on integer time steps; use scaled_params() first")
    if min(comm) < 1:
        raise ValueError("every segment needs a positive communication time")
    return comm, comp


def _time_cap(p: int, comm: Sequence[int], comp: Sequence[int]) -> int:
    worst = max(c + d for c, d in zip(comm, comp))
    return (ceil_log2(p) + len(comm)) * worst * 4


def bi_greedy_schedule(params: MachineParams, plan, impl=None) -> Schedule:
    if not isinstance(plan, SegmentPlan):
        plan = SegmentPlan(tuple(plan))
    comm, comp = _integer_durations(params, plan)
    impl = impl or kernels.backend
    events, _ = impl.bi_greedy_events(params.p, comm, comp, _time_cap(params.p, comm, comp))
    return Schedule.build(params, plan, BI, events)


def bi_greedy_time(params: MachineParams, plan, impl=None):
    """Completion time; rational costs are scaled to integers and back."""
    if not isinstance(plan, SegmentPlan):
        plan = SegmentPlan(tuple(plan))
    scaled, k = scaled_params(params)
    comm, comp = _integer_durations(scaled, plan)
    impl = impl or kernels.backend
    _, completion = impl.bi_greedy_events(params.p, comm, comp, _time_cap(params.p, comm, comp))
    return kernels.unscale(completion, k)


def round_formula(p: int, q: int, t_comm, t_comp):
    return (ceil_log2(p) + q - 1) * (t_comm + t_comp)


def receives_out_of_order(schedule: Schedule) -> bool:
    """True if some processor receives a segment before sending a smaller one."""
    first_recv = {}
    send_at = {}
    for ev in schedule.events:
        key = (ev.receiver, ev.segment)
        first_recv[key] = min(first_recv.get(key, ev.start), ev.start)
        send_at[(ev.sender, ev.segment)] = ev.start
    for (proc, seg), t_send in send_at.items():
        for (other, later), t_recv in first_recv.items():
            if other == proc and later > seg and t_recv < t_send:
                return True
    return False


@dataclass
class ConjectureReport:
    checked: int = 0
    counterexamples: List[tuple] = field(default_factory=list)
    reordered_instances: int = 0
    unsafe: List[tuple] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples and not self.unsafe


def check_round_conjecture(p_range: Iterable[int], q_range: Iterable[int],
                           cost_set: Iterable[Tuple[int, int]],
                           verify_schedules: bool = True) -> ConjectureReport:
    """Compare bi-greedy completion with ``(ceil(log2 p) + q - 1)`` rounds.

    ``cost_set`` holds (t_comm, t_comp) pairs, modelled as alpha = t_comm,
    beta = 0, gamma = t_comp with unit segments.  Mismatches are collected,
    never raised.
    """
    report = ConjectureReport()
    q_values = list(q_range)
    costs = list(cost_set)
    for p in p_range:
        for t_comm, t_comp in costs:
            params = MachineParams(t_comm, 0, t_comp, p)
            for q in q_values:
                sched = bi_greedy_schedule(params, SegmentPlan((1,) * q))
                report.checked += 1
                completion = simulate(sched).completion if verify_schedules else None
                if verify_schedules and not check_correctness(sched):
                    report.unsafe.append((p, q, t_comm, t_comp, "contributions"))
                if completion is None:
                    completion = bi_greedy_time(params, SegmentPlan((1,) * q))
                expected = round_formula(p, q, t_comm, t_comp)
                if completion != expected:
                    report.counterexamples.append((p, q, t_comm, t_comp, completion, expected))
                if verify_schedules and receives_out_of_order(sched):
                    report.reordered_instances += 1
    return report
