"""Schedule data model, pairing-rule validation, simulation and correctness replay."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .cost import MachineParams, Number, comm_time, comp_time

ROOT = 0
UNI = "unidirectional"
BI = "bidirectional"
PORT_MODELS = (UNI, BI)


class ScheduleError(ValueError):
    pass


class OverlapError(ScheduleError):
    def __init__(self, proc: int, time: Number, tags: Tuple[str, str]):
        super().__init__(f"processor {proc} overlaps at t={time}: {tags[0]} vs {tags[1]}")
        self.proc = proc
        self.time = time
        self.tags = tags


class ContributionError(ScheduleError):
    def __init__(self, kind: str, message: str):
        super().__init__(f"{kind}: {message}")
        self.kind = kind


@dataclass(frozen=True)
class SegmentPlan:
    sizes: Tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if not sizes:
            raise ValueError("a plan needs at least one segment")
        if any(s < 1 for s in sizes):
            raise ValueError(f"segment sizes must be positive: {sizes}")
        object.__setattr__(self, "sizes", sizes)

    @property
    def m(self) -> int:
        return sum(self.sizes)

    @property
    def q(self) -> int:
        return len(self.sizes)

    @classmethod
    def equi(cls, m: int, s: int) -> "SegmentPlan":
        """``(s, ..., s, r)`` with a smaller remainder ``r`` if ``s`` does not divide ``m``."""
        if not 1 <= s <= m:
            raise ValueError(f"segment size must be in [1, {m}]")
        full, rest = divmod(m, s)
        return cls((s,) * full + ((rest,) if rest else ()))

    def __iter__(self):
        return iter(self.sizes)

    def __len__(self):
        return len(self.sizes)


@dataclass(frozen=True)
class Event:
    segment: int  # 1-based
    sender: int
    receiver: int
    start: Number
    comm: Number
    comp: Number

    @property
    def comm_end(self) -> Number:
        return self.start + self.comm

    @property
    def end(self) -> Number:
        return self.start + self.comm + self.comp


@dataclass(frozen=True)
class Schedule:
    params: MachineParams
    plan: SegmentPlan
    model: str
    events: Tuple[Event, ...]

    def __post_init__(self):
        if self.model not in PORT_MODELS:
            raise ValueError(f"unknown port model {self.model!r}")
        events = tuple(sorted(self.events, key=lambda e: e.start))
        object.__setattr__(self, "events", events)

    @property
    def p(self) -> int:
        return self.params.p

    @classmethod
    def build(cls, params: MachineParams, plan: SegmentPlan, model: str,
              pairs: Sequence[Tuple[int, int, int, Number]]) -> "Schedule":
        """Make a schedule from ``(segment, sender, receiver, start)`` tuples."""
        events = []
        for seg, a, b, t in pairs:
            size = plan.sizes[seg - 1]
            events.append(Event(seg, a, b, t, comm_time(params, size), comp_time(params, size)))
        return cls(params, plan, model, tuple(events))


@dataclass(frozen=True)
class Interval:
    start: Number
    end: Number
    tag: str  # send | recv | compute
    segment: int


@dataclass(frozen=True)
class SimulationResult:
    completion: Number
    proc_timeline: Tuple[Tuple[Interval, ...], ...]
    per_segment_finish: Tuple[Number, ...]


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    rule: Optional[str] = None
    event_index: Optional[int] = None
    message: str = ""

    def __bool__(self):
        return self.ok


def check_structure(schedule: Schedule) -> None:
    """Per-segment shape: p-1 events, every non-root sends exactly once."""
    p, q = schedule.p, schedule.plan.q
    senders: Dict[int, List[int]] = defaultdict(list)
    for idx, ev in enumerate(schedule.events):
        if not 1 <= ev.segment <= q:
            raise ScheduleError(f"event {idx}: segment {ev.segment} outside 1..{q}")
        if not (0 <= ev.sender < p and 0 <= ev.receiver < p):
            raise ScheduleError(f"event {idx}: processor id out of range")
        if ev.sender == ev.receiver:
            raise ScheduleError(f"event {idx}: processor {ev.sender} sends to itself")
        if ev.start < 0:
            raise ScheduleError(f"event {idx}: negative start time {ev.start}")
        size = schedule.plan.sizes[ev.segment - 1]
        if ev.comm != comm_time(schedule.params, size) or ev.comp != comp_time(schedule.params, size):
            raise ScheduleError(f"event {idx}: durations do not match segment size {size}")
        senders[ev.segment].append(ev.sender)
    expected = list(range(1, p))
    for seg in range(1, q + 1):
        if sorted(senders[seg]) != expected:
            raise ScheduleError(f"segment {seg}: senders {sorted(senders[seg])} != {expected}")


def validate_uni(schedule: Schedule) -> ValidationReport:
    """Check a unidirectional schedule against the in-order greedy schedule class.

    Each segment is replayed from the final states of the previous one.  An
    event ``a -> b`` at ``t`` is valid when both processors are idle by ``t``,
    the root is not the sender, and ``t`` is at least the second smallest
    remaining state.  Remaining processors idle before ``t`` are bumped to ``t``.
    """
    if schedule.model != UNI:
        return ValidationReport(False, "model", None, "schedule is not unidirectional")
    p, q = schedule.p, schedule.plan.q
    events = list(enumerate(schedule.events))
    for idx, ev in events:
        if ev.sender == ROOT:
            return ValidationReport(False, "ii", idx, "the root cannot send")
        if not 1 <= ev.segment <= q or ev.sender == ev.receiver:
            return ValidationReport(False, "structure", idx, "malformed event")

    # In-order rule: everything a processor does for segment j starts after
    # it has been reduced for segment j-1.
    done: Dict[Tuple[int, int], Number] = {}
    for idx, ev in events:
        key = (ev.sender, ev.segment)
        if key in done:
            return ValidationReport(False, "exactly-once", idx,
                                    f"processor {ev.sender} sends segment {ev.segment} twice")
        done[key] = ev.comm_end
    for idx, ev in events:
        if ev.receiver == ROOT:
            prev = done.get((ROOT, ev.segment), 0)
            done[(ROOT, ev.segment)] = max(prev, ev.end)
    for idx, ev in events:
        for proc in (ev.sender, ev.receiver):
            if ev.segment > 1:
                prev = done.get((proc, ev.segment - 1))
                if prev is None or prev > ev.start:
                    return ValidationReport(False, "in-order", idx,
                                            f"processor {proc} joins segment {ev.segment} "
                                            f"before finishing segment {ev.segment - 1}")
        sent_at = done.get((ev.receiver, ev.segment))
        if ev.receiver != ROOT and sent_at is not None and sent_at - ev.comm <= ev.start:
            return ValidationReport(False, "after-reduced", idx,
                                    f"processor {ev.receiver} receives segment {ev.segment} "
                                    f"after sending it")

    state: List[Number] = [0] * p
    for seg in range(1, q + 1):
        remaining = set(range(p))
        for idx, ev in events:
            if ev.segment != seg:
                continue
            a, b, t = ev.sender, ev.receiver, ev.start
            if a not in remaining or b not in remaining:
                return ValidationReport(False, "after-reduced", idx,
                                        f"segment {seg}: processor already reduced")
            if state[a] > t or state[b] > t:
                return ValidationReport(False, "i", idx,
                                        f"segment {seg}: pair ({a}, {b}) busy at t={t}")
            ordered = sorted(state[i] for i in remaining)
            if len(ordered) >= 2 and t < ordered[1]:
                return ValidationReport(False, "iii", idx, f"t={t} below second smallest state")
            remaining.discard(a)
            state[a] = t + ev.comm
            state[b] = t + ev.comm + ev.comp
            for i in remaining:
                if i != b and state[i] < t:
                    state[i] = t
        if remaining != {ROOT}:
            return ValidationReport(False, "exactly-once", None,
                                    f"segment {seg}: processors {sorted(remaining - {ROOT})} never send")
    return ValidationReport(True)


def _check_disjoint(proc: int, intervals: List[Interval]):
    intervals = sorted((iv for iv in intervals if iv.end > iv.start), key=lambda iv: iv.start)
    for prev, cur in zip(intervals, intervals[1:]):
        if cur.start < prev.end:
            raise OverlapError(proc, cur.start, (prev.tag, cur.tag))


def simulate(schedule: Schedule) -> SimulationResult:
    """Lay out busy intervals and check the port model.

    Unidirectional: one activity at a time per processor.  Bidirectional: one
    send and one receive may overlap, but computation excludes everything.
    """
    p = schedule.p
    timeline: List[List[Interval]] = [[] for _ in range(p)]
    seg_finish: Dict[int, Number] = {}
    for ev in schedule.events:
        if ev.start < 0:
            raise ScheduleError(f"negative start time {ev.start}")
        timeline[ev.sender].append(Interval(ev.start, ev.comm_end, "send", ev.segment))
        timeline[ev.receiver].append(Interval(ev.start, ev.comm_end, "recv", ev.segment))
        timeline[ev.receiver].append(Interval(ev.comm_end, ev.end, "compute", ev.segment))
        if ev.receiver == ROOT:
            seg_finish[ev.segment] = max(seg_finish.get(ev.segment, 0), ev.end)

    for proc, ivs in enumerate(timeline):
        if schedule.model == UNI:
            _check_disjoint(proc, ivs)
        else:
            sends = [iv for iv in ivs if iv.tag == "send"]
            recvs = [iv for iv in ivs if iv.tag == "recv"]
            comps = [iv for iv in ivs if iv.tag == "compute"]
            _check_disjoint(proc, sends)
            _check_disjoint(proc, recvs)
            _check_disjoint(proc, comps + sends)
            _check_disjoint(proc, comps + recvs)

    root_ends = [iv.end for iv in timeline[ROOT]]
    completion = max(root_ends) if root_ends else 0
    ordered = tuple(tuple(sorted(ivs, key=lambda iv: (iv.start, iv.end))) for ivs in timeline)
    finish = tuple(seg_finish.get(j, 0) for j in range(1, schedule.plan.q + 1))
    return SimulationResult(completion, ordered, finish)


def replay_contributions(schedule: Schedule) -> List[frozenset]:
    """Track which original contributions each partial result holds.

    A send carries everything whose merge has finished by its start time;
    returns the root's final set per segment.  Raises ContributionError.
    """
    p, q = schedule.p, schedule.plan.q
    held = {(i, j): {i} for i in range(p) for j in range(1, q + 1)}
    pending: Dict[Tuple[int, int], List[Tuple[Number, set]]] = defaultdict(list)
    sent = set()

    def settle(proc, seg, now):
        keep = []
        for finish, payload in pending[(proc, seg)]:
            if finish <= now:
                held[(proc, seg)] |= payload
            else:
                keep.append((finish, payload))
        pending[(proc, seg)] = keep

    for ev in schedule.events:
        a, b, j = ev.sender, ev.receiver, ev.segment
        if (a, j) in sent:
            raise ContributionError("duplicate-contribution",
                                    f"processor {a} sends segment {j} twice")
        settle(a, j, ev.start)
        if pending[(a, j)]:
            raise ContributionError("incomplete-root",
                                    f"processor {a} sends segment {j} before its merges finish")
        payload = held[(a, j)]
        held[(a, j)] = set()
        sent.add((a, j))
        if (b, j) in sent:
            raise ContributionError("incomplete-root",
                                    f"processor {b} receives segment {j} after sending it")
        mine = set(held[(b, j)])
        for _, other in pending[(b, j)]:
            mine |= other
        if mine & payload:
            raise ContributionError("duplicate-contribution",
                                    f"processor {b} already holds {sorted(mine & payload)} "
                                    f"for segment {j}")
        pending[(b, j)].append((ev.end, payload))

    result = []
    everyone = set(range(p))
    for j in range(1, q + 1):
        settle(ROOT, j, float("inf"))
        if held[(ROOT, j)] != everyone:
            missing = sorted(everyone - held[(ROOT, j)])
            raise ContributionError("incomplete-root", f"segment {j} misses {missing}")
        result.append(frozenset(held[(ROOT, j)]))
    return result


def check_correctness(schedule: Schedule) -> bool:
    """True iff the schedule reduces every segment's p contributions onto the root."""
    try:
        replay_contributions(schedule)
    except ContributionError:
        return False
    return True
