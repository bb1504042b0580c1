"""Segment-size search: equi-segment sweeps, compositions, unequal-segmentation grid."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from . import kernels
from .algorithms import schedule_pipeline
from .cost import (
    DomainError,
    MachineParams,
    MessageSpec,
    bi_sopt_topt,
    bi_time,
    uni_sopt_topt,
    uni_time,
)
from .greedy_bi import bi_greedy_time
from .greedy_uni import uni_greedy_time
from .schedule import SegmentPlan

MAX_COMPOSITION_M = 20
MAX_OVERALL_M = 14
MAX_EXHAUSTIVE_M = 1024
OPTIMAL_SET_CAP = 32

UNEQUAL_ALPHAS = tuple(range(0, 11)) + tuple(range(20, 101, 10)) + tuple(range(200, 1001, 100))
UNEQUAL_GAMMAS = (0, 1)
UNEQUAL_PS = tuple(2 ** n for n in range(2, 11)) + tuple(3 * 2 ** n for n in range(1, 10))


def compositions(m: int) -> Iterator[SegmentPlan]:
    """Every ordered composition of ``m``: by number of parts, then descending."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if m > MAX_COMPOSITION_M:
        raise ValueError(f"m={m} has {2 ** (m - 1)} compositions; the limit is "
                         f"m <= {MAX_COMPOSITION_M}")
    cuts = range(1, m)
    for parts in range(1, m + 1):
        batch = []
        for chosen in itertools.combinations(cuts, parts - 1):
            edges = (0,) + chosen + (m,)
            batch.append(tuple(b - a for a, b in zip(edges, edges[1:])))
        batch.sort(reverse=True)
        for sizes in batch:
            yield SegmentPlan(sizes)


def compositions_dfs(m: int) -> Iterator[Tuple[int, ...]]:
    """Compositions in the depth-first order used by the composition kernels."""
    if m == 0:
        yield ()
        return
    for first in range(1, m + 1):
        for rest in compositions_dfs(m - first):
            yield (first,) + rest


def equi_plans(m: int) -> List[SegmentPlan]:
    seen = {}
    for s in range(1, m + 1):
        plan = SegmentPlan.equi(m, s)
        seen.setdefault(plan.sizes, plan)
    return list(seen.values())


def equi_plans_by_count(m: int) -> List[SegmentPlan]:
    """One equi plan per segment count q, with segment size ceil(m / q).

    A subset of ``equi_plans``: for m=10 it drops (6,4), (7,3), (8,2), (9,1).
    """
    seen = {}
    for q in range(1, m + 1):
        plan = SegmentPlan.equi(m, -(-m // q))
        seen.setdefault(plan.sizes, plan)
    return list(seen.values())


def is_equi(sizes: Sequence[int]) -> bool:
    head = sizes[0]
    return all(s == head for s in sizes[:-1]) and sizes[-1] <= head


def _plan_time(params: MachineParams, sizes, model: str, algorithm: str):
    if algorithm == "pipeline":
        return kernels.pipeline_time(params, sizes)
    if model == "bi":
        return bi_greedy_time(params, sizes)
    return uni_greedy_time(params, sizes)


def _formula_candidates(params: MachineParams, m: int, model: str) -> set:
    found = set()
    if params.p <= 3:
        return found
    names = ("pipeline", "binary") if model == "uni" else ("pipeline", "binary", "bigreedy")
    for name in names:
        opt = (uni_sopt_topt if model == "uni" else bi_sopt_topt)(name, params, m)
        found.update(opt.candidates)
    return found


def segment_candidates(params: MachineParams, m: int, search: str, model: str = "uni") -> List[int]:
    if search == "exhaustive":
        if m > MAX_EXHAUSTIVE_M:
            raise ValueError(f"exhaustive equi search is limited to m <= {MAX_EXHAUSTIVE_M}")
        return list(range(1, m + 1))
    if search not in ("pow2", "pow2-plus-formula"):
        raise ValueError(f"unknown search mode {search!r}")
    sizes = {1, m} | {2 ** i for i in range(m.bit_length()) if 2 ** i <= m}
    sizes |= _formula_candidates(params, m, model)
    return sorted(sizes)


def best_equi_greedy(params: MachineParams, m: int, search: str = "exhaustive",
                     model: str = "uni", algorithm: str = "greedy") -> Tuple[SegmentPlan, object]:
    """Best equi-segmented plan; ties go to the larger segment size."""
    best_plan, best_time = None, None
    for s in segment_candidates(params, m, search, model):
        plan = SegmentPlan.equi(m, s)
        t = _plan_time(params, plan.sizes, model, algorithm)
        if best_time is None or t <= best_time:
            best_plan, best_time = plan, t
    return best_plan, best_time


def best_overall_greedy(params: MachineParams, m: int, algorithm: str = "greedy",
                        cap: int = OPTIMAL_SET_CAP) -> Tuple[List[SegmentPlan], object]:
    """All optimal compositions of ``m`` (up to ``cap``) and their time."""
    if m > MAX_OVERALL_M:
        raise ValueError(f"full composition search is limited to m <= {MAX_OVERALL_M}")
    times = kernels.composition_times(params, m, algorithm)
    best = min(times)
    winners = [sizes for sizes, t in zip(compositions_dfs(m), times) if t == best]
    order = {plan.sizes: i for i, plan in enumerate(compositions(m))}
    winners.sort(key=order.__getitem__)
    return [SegmentPlan(w) for w in winners[:cap]], best


@dataclass
class ExperimentRecord:
    p: int
    alpha: object
    beta: object
    gamma: object
    m: int
    algorithm: str
    best_equi_plan: Tuple[int, ...]
    best_equi_time: object
    best_plans: List[Tuple[int, ...]]
    best_time: object
    equi_optimal: bool
    times: Dict[str, object] = field(default_factory=dict)

    @property
    def ratio(self) -> Fraction:
        """Best equi time over best time; 1 whenever the point is equi-optimized."""
        if self.equi_optimal:
            return Fraction(1)
        return Fraction(self.best_equi_time) / Fraction(self.best_time)

    @property
    def key(self):
        return (self.algorithm, self.gamma, self.alpha, self.p)


def unequal_point(args) -> ExperimentRecord:
    """Evaluate every composition at one grid point.

    The equi baseline is the best plan of ``equi_plans_by_count``.  The point
    is equi-optimized when any optimal composition has the equi shape, which
    also covers plans such as (6,4) that the baseline does not try.
    """
    p, alpha, beta, gamma, m, algorithm = args
    params = MachineParams(alpha, beta, gamma, p)
    times = kernels.composition_times(params, m, algorithm)
    by_sizes = dict(zip(compositions_dfs(m), times))
    best = min(times)
    winners = [sizes for sizes, t in by_sizes.items() if t == best]
    equi_best_plan, equi_best = None, None
    for plan in equi_plans_by_count(m):
        t = by_sizes[plan.sizes]
        if equi_best is None or t < equi_best or (t == equi_best and plan.sizes[0] > equi_best_plan[0]):
            equi_best_plan, equi_best = plan.sizes, t
    order = {plan.sizes: i for i, plan in enumerate(compositions(m))}
    winners.sort(key=order.__getitem__)
    return ExperimentRecord(
        p=p, alpha=alpha, beta=beta, gamma=gamma, m=m, algorithm=algorithm,
        best_equi_plan=equi_best_plan, best_equi_time=equi_best,
        best_plans=winners[:OPTIMAL_SET_CAP], best_time=best,
        equi_optimal=any(is_equi(w) for w in winners),
    )


@dataclass(frozen=True)
class UnequalGrid:
    alphas: Tuple = UNEQUAL_ALPHAS
    gammas: Tuple = UNEQUAL_GAMMAS
    ps: Tuple = UNEQUAL_PS
    beta: object = 1
    m: int = 10

    def points(self, algorithm: str = "greedy"):
        for gamma in self.gammas:
            for alpha in self.alphas:
                for p in self.ps:
                    yield (p, alpha, self.beta, gamma, self.m, algorithm)


def unequal_experiment(grid: UnequalGrid = UnequalGrid(), algorithm: str = "greedy",
                       workers: int = 1) -> List[ExperimentRecord]:
    """One record per grid point, sorted by (gamma, alpha, p)."""
    points = list(grid.points(algorithm))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(unequal_point, points, chunksize=8))
    else:
        records = [unequal_point(pt) for pt in points]
    records.sort(key=lambda r: (r.gamma, r.alpha, r.p))
    return records


@dataclass(frozen=True)
class UnequalSummary:
    points: int
    unequal_count: int
    max_ratio: float
    mean_improvement: float
    positive_alpha_points: int
    positive_alpha_unequal_count: int

    def as_dict(self) -> dict:
        return {
            "points": self.points,
            "unequal_count": self.unequal_count,
            "max_ratio": self.max_ratio,
            "mean_improvement": self.mean_improvement,
            "positive_alpha_points": self.positive_alpha_points,
            "positive_alpha_unequal_count": self.positive_alpha_unequal_count,
        }


def summarize(records: Sequence[ExperimentRecord]) -> UnequalSummary:
    gains = [r.ratio for r in records if not r.equi_optimal]
    positive = [r for r in records if r.alpha > 0]
    # ratio is 1 on equi-optimized points, so max over all equals max over gains
    return UnequalSummary(
        points=len(records),
        unequal_count=len(gains),
        max_ratio=float(max((r.ratio for r in records), default=1)),
        mean_improvement=float(sum(g - 1 for g in gains) / len(gains)) if gains else 0.0,
        positive_alpha_points=len(positive),
        positive_alpha_unequal_count=sum(1 for r in positive if not r.equi_optimal),
    )


# -- greedy versus the standard algorithms ------------------------------------

def standard_times(params: MachineParams, m: int, model: str = "uni") -> Dict[str, object]:
    """Closed-form time of each standard algorithm at its optimal segment size.

    Segmented algorithms use the analytic minimum over real ``s`` in [1, m];
    when the unconstrained optimum falls outside that range, the closed form
    is evaluated at the nearer end.
    """
    timef = uni_time if model == "uni" else bi_time
    optf = uni_sopt_topt if model == "uni" else bi_sopt_topt
    out = {"binomial": timef("binomial", params, MessageSpec.unsegmented(m)).value}
    if model == "bi":
        out["butterfly"] = bi_time("butterfly", params, MessageSpec.unsegmented(m)).value
    for name in ("pipeline", "binary"):
        try:
            opt = optf(name, params, m)
        except DomainError:
            continue
        if opt.degenerate or opt.s_raw > m:
            out[name] = timef(name, params, MessageSpec(m, m)).value
        elif opt.s_raw < 1:
            out[name] = timef(name, params, MessageSpec(m, 1)).value
        else:
            out[name] = opt.t_opt
    return out


@dataclass(frozen=True)
class RatioRecord:
    m: int
    greedy_plan: Tuple[int, ...]
    greedy_time: object
    standards: Dict[str, object]
    best_standard: str
    ratio: float


def ratio_vs_standards(params: MachineParams, m: int, model: str = "uni",
                       search: Optional[str] = None) -> RatioRecord:
    """Best standard closed-form time divided by the tuned greedy time."""
    if search is None:
        search = "exhaustive" if m <= MAX_EXHAUSTIVE_M else "pow2-plus-formula"
    plan, greedy = best_equi_greedy(params, m, search=search, model=model)
    standards = standard_times(params, m, model)
    name = min(standards, key=lambda k: (standards[k], k))
    ratio = float(standards[name]) / float(greedy) if greedy else 1.0
    return RatioRecord(m, plan.sizes, greedy, standards, name, ratio)


def pipeline_plan_time_simulated(params: MachineParams, plan) -> object:
    """Pipeline completion from the event-level schedule (slow path, for checks)."""
    from .schedule import simulate

    return simulate(schedule_pipeline(params, plan)).completion
