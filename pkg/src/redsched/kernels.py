"""Backend selection for the hot loops.

The compiled extension ``redsched._kernels`` is used when it imports;
otherwise the pure-Python twin in ``redsched._pykernels``.  Setting
``REDSCHED_PURE_PYTHON=1`` forces the fallback.

The kernels work on integers.  Rational costs are scaled by the least common
denominator of (alpha, beta, gamma) and results divided back, which keeps
every comparison exact.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction
from typing import Sequence, Tuple

from . import _pykernels
from .cost import MachineParams, exact

if os.environ.get("REDSCHED_PURE_PYTHON") == "1":
    backend = _pykernels
else:
    try:
        from . import _kernels as backend  # type: ignore[attr-defined]
    except ImportError:  # pragma: no cover - depends on build
        backend = _pykernels

BACKEND = backend.BACKEND


def scale_factor(params: MachineParams) -> int:
    dens = [Fraction(x).denominator for x in (params.alpha, params.beta, params.gamma)]
    return math.lcm(*dens)


def integer_costs(params: MachineParams, sizes: Sequence[int]) -> Tuple[list, list, int]:
    """Per-segment (comm, comp) as integers, plus the scale they were multiplied by."""
    k = scale_factor(params)
    a, b, g = (int(Fraction(x) * k) for x in (params.alpha, params.beta, params.gamma))
    return [a + b * s for s in sizes], [g * s for s in sizes], k


def unscale(value: int, k: int):
    return exact(Fraction(value, k))


def uni_greedy_time(params: MachineParams, sizes: Sequence[int], impl=None):
    comm, comp, k = integer_costs(params, sizes)
    return unscale((impl or backend).uni_greedy_time(params.p, comm, comp), k)


def pipeline_time(params: MachineParams, sizes: Sequence[int], impl=None):
    comm, comp, k = integer_costs(params, sizes)
    return unscale((impl or backend).pipeline_time(params.p, comm, comp), k)


def composition_times(params: MachineParams, m: int, algorithm: str = "greedy", impl=None):
    """Completion times for every composition of ``m`` in DFS order."""
    k = scale_factor(params)
    a, b, g = (int(Fraction(x) * k) for x in (params.alpha, params.beta, params.gamma))
    impl = impl or backend
    if algorithm == "greedy":
        raw = impl.uni_greedy_composition_times(params.p, m, a, b, g)
    elif algorithm == "pipeline":
        raw = impl.pipeline_composition_times(params.p, m, a, b, g)
    else:
        raise ValueError(f"no composition kernel for {algorithm!r}")
    return [unscale(v, k) for v in raw]
