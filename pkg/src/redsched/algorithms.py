"""Event-level binomial and pipeline reduction schedules (unidirectional)."""

from __future__ import annotations

from .cost import MachineParams, comm_time, comp_time
from .schedule import UNI, Schedule, SegmentPlan


def schedule_binomial(params: MachineParams, m: int) -> Schedule:
    """Round-synchronised binomial tree on one unsegmented message.

    Each round the upper half of the surviving processors sends to the lower
    half (highest id to lowest id); a round lasts one send plus one combine.
    """
    plan = SegmentPlan((m,))
    step = comm_time(params, m) + comp_time(params, m)
    alive = list(range(params.p))
    pairs = []
    rnd = 0
    while len(alive) > 1:
        n = len(alive)
        half = n // 2
        for i in range(half):
            pairs.append((1, alive[n - 1 - i], alive[i], rnd * step))
        alive = alive[:n - half]
        rnd += 1
    return Schedule.build(params, plan, UNI, pairs)


def schedule_pipeline(params: MachineParams, plan) -> Schedule:
    """Chain ``p-1 -> ... -> 0``, every transfer as early as the ports allow.

    Each inner node receives a segment, combines it and forwards it before
    taking the next segment, so segments move through a node in order.
    """
    if not isinstance(plan, SegmentPlan):
        plan = SegmentPlan(tuple(plan))
    p = params.p
    free = [0] * p
    pairs = []
    for seg, size in enumerate(plan.sizes, start=1):
        c, d = comm_time(params, size), comp_time(params, size)
        for k in range(p - 1, 0, -1):
            start = max(free[k], free[k - 1])
            pairs.append((seg, k, k - 1, start))
            free[k] = start + c
            free[k - 1] = start + c + d
    return Schedule.build(params, plan, UNI, pairs)
