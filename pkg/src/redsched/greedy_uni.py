"""Uni-greedy reduction schedule and an exhaustive optimality oracle."""

from __future__ import annotations

import heapq
from functools import lru_cache
from typing import Optional

from . import kernels
from .cost import MachineParams, comm_time, comp_time
from .schedule import ROOT, UNI, Schedule, SegmentPlan


class SearchLimitExceeded(RuntimeError):
    pass


def _as_plan(plan) -> SegmentPlan:
    return plan if isinstance(plan, SegmentPlan) else SegmentPlan(tuple(plan))


def uni_greedy_schedule(params: MachineParams, plan) -> Schedule:
    """Pair the two earliest-idle processors, segment by segment.

    Within a segment the processor idle first sends to the one idle second,
    starting when the second becomes idle.  If the first one is the root the
    roles swap, since the root never sends.
    """
    plan = _as_plan(plan)
    p = params.p
    heap = [(0, i) for i in range(p)]
    pairs = []
    for seg, size in enumerate(plan.sizes, start=1):
        c, d = comm_time(params, size), comp_time(params, size)
        sent = []
        for _ in range(p - 1):
            _, g1 = heapq.heappop(heap)
            t, g2 = heapq.heappop(heap)
            if g1 == ROOT:
                g1, g2 = g2, g1
            pairs.append((seg, g1, g2, t))
            sent.append((t + c, g1))
            heapq.heappush(heap, (t + c + d, g2))
        heap = sent + heap
        heapq.heapify(heap)
    return Schedule.build(params, plan, UNI, pairs)


def uni_greedy_time(params: MachineParams, plan):
    """Completion time of the uni-greedy schedule (no closed form exists)."""
    return kernels.uni_greedy_time(params, _as_plan(plan).sizes)


def brute_force_min_time(params: MachineParams, plan, limit: int = 5_000_000,
                         bump: bool = True):
    """Minimum root completion over every in-order pairing schedule.

    Segments are reduced one after another; within a segment any remaining
    non-root processor may send to any other remaining processor, starting as
    soon as both are idle.  With ``bump`` the remaining idle processors are
    raised to the start time, so pairs are placed in start order.  Non-root
    processors are interchangeable, which lets states be memoised as sorted
    tuples.
    """
    plan = _as_plan(plan)
    p, q = params.p, plan.q
    if p > 6 or q > 3:
        raise ValueError("exhaustive search is limited to p <= 6 and q <= 3")
    costs = [(comm_time(params, s), comp_time(params, s)) for s in plan.sizes]
    expansions = 0

    @lru_cache(maxsize=None)
    def segment(j, root, others):
        if j == q:
            return root
        return step(j, root, others, ())

    @lru_cache(maxsize=None)
    def step(j, root, rem, sent):
        nonlocal expansions
        expansions += 1
        if expansions > limit:
            raise SearchLimitExceeded(f"more than {limit} states expanded")
        if not rem:
            return segment(j + 1, root, tuple(sorted(sent)))
        c, d = costs[j]
        best = None
        for ai in _distinct(rem):
            xa = rem[ai]
            rest = rem[:ai] + rem[ai + 1:]
            # receiver is the root
            t = max(xa, root)
            others = _bumped(rest, t, bump)
            val = step(j, t + c + d, others, _insert(sent, t + c))
            best = val if best is None or val < best else best
            # receiver is another remaining non-root processor
            for bi in _distinct(rest):
                xb = rest[bi]
                t = max(xa, xb)
                others = _bumped(rest[:bi] + rest[bi + 1:], t, bump)
                new_root = max(root, t) if bump else root
                val = step(j, new_root, _insert(others, t + c + d), _insert(sent, t + c))
                best = val if val < best else best
        return best

    return segment(0, 0, (0,) * (p - 1))


def _distinct(values: tuple):
    seen = set()
    for i, v in enumerate(values):
        if v not in seen:
            seen.add(v)
            yield i


def _bumped(values: tuple, t, bump: bool) -> tuple:
    if not bump:
        return values
    return tuple(sorted(t if v < t else v for v in values))


def _insert(values: tuple, x) -> tuple:
    return tuple(sorted(values + (x,)))


def greedy_matches_oracle(params: MachineParams, plan, limit: Optional[int] = None) -> bool:
    kwargs = {} if limit is None else {"limit": limit}
    return uni_greedy_time(params, plan) == brute_force_min_time(params, plan, **kwargs)
