"""Closed-form cost model for reduction algorithms.

Times follow the linear model: a message of ``s`` elements costs
``alpha + beta * s`` on the wire and ``gamma * s`` to combine on arrival.
Polynomial formulas are evaluated in exact rational arithmetic; anything
involving a square root (optimal segment sizes) is a float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, NamedTuple, Optional, Union

from scipy.optimize import minimize_scalar

Number = Union[int, Fraction]

UNI_ALGORITHMS = ("binomial", "pipeline", "binary")
BI_ALGORITHMS = ("binomial", "pipeline", "binary", "bigreedy", "butterfly")


class DomainError(ValueError):
    """Raised when a formula is evaluated outside its validity range."""

    def __init__(self, rule: str, message: str):
        super().__init__(f"{rule}: {message}")
        self.rule = rule


def exact(x) -> Number:
    """Coerce ``x`` to an int or Fraction (ints stay ints)."""
    if isinstance(x, bool):
        raise TypeError("bool is not a number here")
    if isinstance(x, int):
        return x
    if isinstance(x, float):
        x = Fraction(x).limit_denominator(10**12) if not x.is_integer() else int(x)
        return x
    if isinstance(x, str):
        x = Fraction(x.strip())
    if isinstance(x, Rational):
        x = Fraction(x)
        return x.numerator if x.denominator == 1 else x
    raise TypeError(f"cannot use {x!r} as an exact number")


def ceil_log2(n: int) -> int:
    """Smallest k with 2**k >= n, for n >= 1."""
    if n < 1:
        raise ValueError("ceil_log2 needs n >= 1")
    return (n - 1).bit_length()


@dataclass(frozen=True)
class MachineParams:
    alpha: Number
    beta: Number
    gamma: Number
    p: int

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            value = exact(getattr(self, name))
            if value < 0:
                raise ValueError(f"{name} must be >= 0, got {value}")
            object.__setattr__(self, name, value)
        if isinstance(self.p, bool) or not isinstance(self.p, int):
            raise TypeError("p must be an integer")
        if self.p < 2:
            raise ValueError(f"p must be >= 2, got {self.p}")

    def with_p(self, p: int) -> "MachineParams":
        return MachineParams(self.alpha, self.beta, self.gamma, p)


@dataclass(frozen=True)
class MessageSpec:
    """An equi-segmented message: ``m`` elements cut into pieces of ``s``."""

    m: int
    s: int
    q: int = field(init=False)

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"message size must be >= 1, got {self.m}")
        if not 1 <= self.s <= self.m:
            raise ValueError(f"segment size must be in [1, {self.m}], got {self.s}")
        object.__setattr__(self, "q", -(-self.m // self.s))

    @classmethod
    def unsegmented(cls, m: int) -> "MessageSpec":
        return cls(m, m)


@dataclass(frozen=True)
class LowerBounds:
    latency: Number
    bandwidth: Number
    computation: Number

    @property
    def total(self) -> Number:
        return self.latency + self.bandwidth + self.computation


class TimeEstimate(NamedTuple):
    """A closed-form time together with how it relates to the true time."""

    value: Number
    kind: str  # "exact", "upper-bound" or "lower-bound"


@dataclass(frozen=True)
class SegmentOptimum:
    """Optimal equi-segment size for one algorithm.

    ``s_raw`` is the unclamped analytic optimum, ``s_opt`` the same value
    clamped into ``[1, m]``; ``t_opt`` is the time formula at ``s_raw``.
    ``candidates`` are the integer sizes worth trying in a sweep.
    """

    s_opt: float
    s_raw: float
    t_opt: float
    candidates: tuple
    degenerate: bool = False


def comm_time(params: MachineParams, s) -> Number:
    if s < 1:
        raise ValueError(f"segment size must be >= 1, got {s}")
    return params.alpha + params.beta * exact(s)


def comp_time(params: MachineParams, s) -> Number:
    if s < 1:
        raise ValueError(f"segment size must be >= 1, got {s}")
    return params.gamma * exact(s)


def _round_cost(params: MachineParams, s: int) -> Number:
    return params.alpha + (params.beta + params.gamma) * s


def _binary_depth(p: int) -> int:
    return ceil_log2(p + 1)


def _require_p(params: MachineParams, lower: int, family: str):
    if params.p <= lower:
        raise DomainError(f"p>{lower}", f"{family} formulas need p > {lower}, got p={params.p}")


def _divisibility_kind(spec: MessageSpec) -> str:
    return "exact" if spec.m % spec.s == 0 else "upper-bound"


def uni_time(algorithm: str, params: MachineParams, spec: MessageSpec) -> TimeEstimate:
    """Unidirectional closed-form time of a standard algorithm.

    Segments are all priced at size ``s``; when ``s`` does not divide ``m``
    the result is therefore an upper bound.
    """
    p = params.p
    if algorithm == "binomial":
        return TimeEstimate(ceil_log2(p) * _round_cost(params, spec.m), "exact")
    if algorithm not in UNI_ALGORITHMS:
        raise ValueError(f"unknown unidirectional algorithm {algorithm!r}")
    _require_p(params, 3, "unidirectional pipeline/binary")
    step = _round_cost(params, spec.s)
    q = spec.q
    if algorithm == "pipeline":
        value = (p - 1) * step + 2 * (q - 1) * step
    else:
        value = 2 * (_binary_depth(p) - 1) * step + 4 * (q - 1) * step
    return TimeEstimate(value, _divisibility_kind(spec))


def bi_time(algorithm: str, params: MachineParams, spec: MessageSpec) -> TimeEstimate:
    """Bidirectional closed-form time (butterfly ignores ``spec.s``)."""
    p = params.p
    _require_p(params, 3, "bidirectional")
    logp = ceil_log2(p)
    if algorithm == "binomial":
        return TimeEstimate(logp * _round_cost(params, spec.m), "exact")
    if algorithm == "butterfly":
        frac = Fraction(p - 1, p)
        value = exact(2 * logp * params.alpha + 2 * frac * params.beta * spec.m
                      + frac * params.gamma * spec.m)
        kind = "exact" if p & (p - 1) == 0 else "lower-bound"
        return TimeEstimate(value, kind)
    step = _round_cost(params, spec.s)
    q = spec.q
    if algorithm == "pipeline":
        value = (p + q - 2) * step
    elif algorithm == "binary":
        value = 2 * (_binary_depth(p) + q - 1) * step
    elif algorithm == "bigreedy":
        value = (logp + q - 1) * step
    else:
        raise ValueError(f"unknown bidirectional algorithm {algorithm!r}")
    return TimeEstimate(value, _divisibility_kind(spec))


def _optimum(latency_rounds: int, bandwidth_factor: int, scale: int,
             params: MachineParams, m: int, time_at) -> SegmentOptimum:
    # T(s) = scale * [latency_rounds*(a + b s) + bandwidth_factor*m*(a/s + b)]
    # with b = beta + gamma; its minimiser and minimum are analytic.
    a = float(params.alpha)
    b = float(params.beta + params.gamma)
    if latency_rounds <= 0 or b == 0:
        value = float(time_at(m))
        return SegmentOptimum(float(m), float(m), value, (m,), degenerate=True)
    s_raw = math.sqrt(bandwidth_factor * m * a / (latency_rounds * b))
    t_opt = scale * (math.sqrt(latency_rounds * a) + math.sqrt(bandwidth_factor * m * b)) ** 2
    s_clamped = min(max(s_raw, 1.0), float(m))
    cands = {1, m, min(max(math.floor(s_raw), 1), m), min(max(math.ceil(s_raw), 1), m)}
    return SegmentOptimum(s_clamped, s_raw, t_opt, tuple(sorted(cands)))


def uni_sopt_topt(algorithm: str, params: MachineParams, m: int) -> SegmentOptimum:
    _require_p(params, 3, "unidirectional pipeline/binary")
    if algorithm == "pipeline":
        rounds, scale = params.p - 3, 1
    elif algorithm == "binary":
        rounds, scale = _binary_depth(params.p) - 3, 2
    else:
        raise ValueError(f"no optimal segment size for {algorithm!r}")
    return _optimum(rounds, 2, scale, params, m,
                    lambda s: uni_time(algorithm, params, MessageSpec(m, s)).value)


def bi_sopt_topt(algorithm: str, params: MachineParams, m: int) -> SegmentOptimum:
    _require_p(params, 3, "bidirectional")
    if algorithm == "pipeline":
        rounds, scale = params.p - 2, 1
    elif algorithm == "binary":
        rounds, scale = _binary_depth(params.p) - 2, 2
    elif algorithm == "bigreedy":
        rounds, scale = ceil_log2(params.p) - 1, 1
    else:
        raise ValueError(f"no optimal segment size for {algorithm!r}")
    return _optimum(rounds, 1, scale, params, m,
                    lambda s: bi_time(algorithm, params, MessageSpec(m, s)).value)


def reduce_lower_bounds(params: MachineParams, m: int) -> LowerBounds:
    p = params.p
    bandwidth = (2 if p >= 3 else 1) * m * params.beta
    return LowerBounds(
        latency=ceil_log2(p) * params.alpha,
        bandwidth=bandwidth,
        computation=exact(Fraction(p - 1, p) * m * params.gamma),
    )


def algorithm_lower_bounds(algorithm: str, params: MachineParams, m: int) -> LowerBounds:
    p = params.p
    if p <= 2:
        raise DomainError("p>2", f"per-algorithm lower bounds need p > 2, got p={p}")
    a, b, g = params.alpha, params.beta, params.gamma
    if algorithm == "binomial":
        k = ceil_log2(p)
        return LowerBounds(k * a, k * m * b, k * m * g)
    if algorithm == "pipeline":
        return LowerBounds((p - 1) * a, (p + 2 * m - 3) * b, (p + 2 * m - 3) * g)
    if algorithm == "binary":
        n = _binary_depth(p)
        return LowerBounds(2 * (n - 1) * a, 2 * (n + 2 * m - 3) * b, 2 * (n + 2 * m - 3) * g)
    raise ValueError(f"unknown algorithm {algorithm!r}")


def reference_line(params: MachineParams, m: int) -> Number:
    """Sum of the per-term bidirectional lower bounds."""
    p = params.p
    return exact(ceil_log2(p) * params.alpha + m * params.beta
                 + Fraction(p - 1, p) * m * params.gamma)


# --- butterfly versus bi-greedy -------------------------------------------

def _butterfly_gap_coefficients(params: MachineParams):
    """Coefficients of butterfly(m) - T_opt(m) as A*u^2 - 2*B*u + C, u = sqrt(m)."""
    p = params.p
    logp = ceil_log2(p)
    frac = (p - 1) / p
    beta, gamma, alpha = float(params.beta), float(params.gamma), float(params.alpha)
    a_coef = frac * (2 * beta + gamma) - (beta + gamma)
    b_coef = math.sqrt((logp - 1) * alpha * (beta + gamma))
    c_coef = (logp + 1) * alpha
    return a_coef, b_coef, c_coef


def butterfly_witness_interval(params: MachineParams) -> Optional[tuple]:
    """Open interval of real m where butterfly strictly beats bi-greedy's optimum.

    Returns ``None`` when no such m exists; the upper end may be ``inf``.
    """
    _require_p(params, 3, "bidirectional")
    a, b, c = _butterfly_gap_coefficients(params)
    if a <= 0:
        if a == 0:
            if b == 0:
                return None
            return ((c / (2 * b)) ** 2, math.inf)
        root = (b + math.sqrt(b * b - a * c)) / a  # a<0 => disc>0, one positive root
        return (root ** 2, math.inf) if root > 0 else (0.0, math.inf)
    disc = b * b - a * c
    if disc <= 0:
        return None
    lo = (b - math.sqrt(disc)) / a
    hi = (b + math.sqrt(disc)) / a
    return (max(lo, 0.0) ** 2, hi ** 2)


@dataclass(frozen=True)
class ButterflyComparison:
    exists: bool
    witness_m: Optional[int]
    analytic_interval: Optional[tuple]


def butterfly_beats_bigreedy(params: MachineParams, m_range: Iterable[int]) -> ButterflyComparison:
    """Scan ``m_range`` for a size where butterfly beats optimally-segmented bi-greedy."""
    _require_p(params, 3, "bidirectional")
    if params.beta + params.gamma == 0:
        raise ValueError("beta + gamma must be positive")
    interval = butterfly_witness_interval(params)
    scanned = False
    for m in m_range:
        scanned = True
        fly = float(bi_time("butterfly", params, MessageSpec.unsegmented(m)).value)
        if fly < bi_sopt_topt("bigreedy", params, m).t_opt:
            return ButterflyComparison(True, m, interval)
    if not scanned:
        raise ValueError("m_range is empty")
    return ButterflyComparison(False, None, interval)


def butterfly_threshold_ratio(p: int) -> float:
    """Critical beta/gamma below which butterfly beats bi-greedy for some m.

    Setting the discriminant of the gap quadratic (in sqrt(m)) to zero gives
    a linear equation in beta/gamma in which alpha cancels.
    """
    if p <= 3:
        raise DomainError("p>3", f"bidirectional formulas need p > 3, got p={p}")
    logp = ceil_log2(p)
    frac = (p - 1) / p
    # (L-1)(r+1) > (L+1)((2f-1) r + f - 1), linear in r
    slope = (logp - 1) - (logp + 1) * (2 * frac - 1)
    rhs = (logp + 1) * (frac - 1) - (logp - 1)
    return rhs / slope


def _min_gap(params: MachineParams) -> float:
    def gap(log_m):
        m = math.exp(log_m)
        fly = (2 * ceil_log2(params.p) * float(params.alpha)
               + (params.p - 1) / params.p * (2 * float(params.beta) + float(params.gamma)) * m)
        return fly - bi_sopt_topt("bigreedy", params, m).t_opt

    res = minimize_scalar(gap, bounds=(-30.0, 120.0), method="bounded",
                          options={"xatol": 1e-12, "maxiter": 2000})
    return float(res.fun)


def butterfly_threshold_scan(p: int, alpha=1, tol: float = 1e-13) -> float:
    """Numerically locate the butterfly threshold for a given alpha.

    Independent of the discriminant: bisects on beta/gamma (gamma = 1) using
    a bounded 1-D minimisation of the time gap over log(m).
    """
    if p <= 3:
        raise DomainError("p>3", f"bidirectional formulas need p > 3, got p={p}")

    def beats(ratio: float) -> bool:
        params = MachineParams(alpha, Fraction(ratio), 1, p)
        return _min_gap(params) < 0

    lo, hi = 0.0, 1.0
    while beats(hi):
        lo, hi = hi, hi * 2
        if hi > 1e6:
            raise RuntimeError("threshold search diverged")
    while hi - lo > tol * max(hi, 1.0):
        mid = 0.5 * (lo + hi)
        if beats(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
