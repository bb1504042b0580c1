import math
from fractions import Fraction

import pytest

from redsched.cost import (
    DomainError,
    MachineParams,
    MessageSpec,
    algorithm_lower_bounds,
    bi_sopt_topt,
    bi_time,
    butterfly_beats_bigreedy,
    butterfly_threshold_ratio,
    butterfly_threshold_scan,
    butterfly_witness_interval,
    ceil_log2,
    comm_time,
    comp_time,
    exact,
    reduce_lower_bounds,
    reference_line,
    uni_sopt_topt,
    uni_time,
)


def P(alpha, beta, gamma, p):
    return MachineParams(alpha, beta, gamma, p)


def test_exact_keeps_ints_and_reduces_fractions():
    assert exact(3) == 3 and type(exact(3)) is int
    assert exact(Fraction(6, 3)) == 2 and type(exact(Fraction(6, 3))) is int
    assert exact("3/4") == Fraction(3, 4)
    assert exact(0.5) == Fraction(1, 2)
    with pytest.raises(TypeError):
        exact(True)


@pytest.mark.parametrize("n,k", [(1, 0), (2, 1), (3, 2), (4, 2), (5, 3), (1024, 10), (1025, 11)])
def test_ceil_log2(n, k):
    assert ceil_log2(n) == k


def test_params_reject_bad_values():
    with pytest.raises(ValueError):
        P(-1, 1, 1, 4)
    with pytest.raises(ValueError):
        P(1, 1, 1, 1)


def test_message_spec_segment_count():
    spec = MessageSpec(10, 4)
    assert spec.q == 3
    with pytest.raises(ValueError):
        MessageSpec(10, 11)


@pytest.mark.parametrize("alpha,beta,s,want", [(10, 1, 5, 15), (0, 0, 7, 0), (2, 3, 4, 14)])
def test_comm_time(alpha, beta, s, want):
    assert comm_time(P(alpha, beta, 0, 2), s) == want


@pytest.mark.parametrize("gamma,s,want", [(1, 10, 10), (0, 10, 0), (2, 3, 6)])
def test_comp_time(gamma, s, want):
    assert comp_time(P(0, 1, gamma, 2), s) == want


def test_segment_size_must_be_positive():
    with pytest.raises(ValueError):
        comm_time(P(1, 1, 1, 2), 0)
    with pytest.raises(ValueError):
        comp_time(P(1, 1, 1, 2), 0)


def test_uni_time_rows():
    assert uni_time("binomial", P(10, 1, 0, 64), MessageSpec(100, 100)).value == 660
    assert uni_time("pipeline", P(1, 1, 0, 4), MessageSpec(8, 8)).value == 27
    # 2(N-1) rounds for the first segment plus 4 per extra one, N = 3
    assert uni_time("binary", P(1, 1, 1, 7), MessageSpec(4, 2)).value == 40


def test_uni_time_flags_upper_bound_when_segments_do_not_divide():
    assert uni_time("pipeline", P(1, 1, 0, 8), MessageSpec(10, 4)).kind == "upper-bound"
    assert uni_time("pipeline", P(1, 1, 0, 8), MessageSpec(12, 4)).kind == "exact"


def test_uni_time_validity_guard():
    with pytest.raises(DomainError) as err:
        uni_time("pipeline", P(1, 1, 1, 3), MessageSpec(4, 1))
    assert err.value.rule == "p>3"
    # binomial has no such restriction
    assert uni_time("binomial", P(1, 1, 1, 2), MessageSpec(4, 4)).value == 9


def test_bi_time_rows():
    assert bi_time("bigreedy", P(2, 0, 1, 16), MessageSpec(5, 1)).value == 24
    assert bi_time("butterfly", P(1, 1, 0, 4), MessageSpec(8, 8)).value == 16
    assert bi_time("pipeline", P(1, 1, 1, 8), MessageSpec(6, 3)).value == 56


def test_butterfly_is_lower_bound_off_powers_of_two():
    assert bi_time("butterfly", P(1, 1, 1, 12), MessageSpec(4, 4)).kind == "lower-bound"
    assert bi_time("butterfly", P(1, 1, 1, 16), MessageSpec(4, 4)).kind == "exact"


@pytest.mark.parametrize("p", [4, 5, 16, 100])
def test_bigreedy_single_segment_is_binomial(p):
    params = P(3, 2, 1, p)
    spec = MessageSpec(7, 7)
    assert bi_time("bigreedy", params, spec).value == bi_time("binomial", params, spec).value


def test_pipeline_sopt_formula():
    opt = uni_sopt_topt("pipeline", P(10, 1, 0, 64), 16384)
    assert opt.s_raw == pytest.approx(73.2926, abs=1e-4)
    assert opt.t_opt == pytest.approx(42319.6956, abs=1e-3)
    assert opt.candidates == (1, 73, 74, 16384)


def test_pipeline_sopt_zero_latency_clamps_to_one():
    opt = uni_sopt_topt("pipeline", P(0, 1, 1, 8), 100)
    assert opt.s_raw == 0 and opt.s_opt == 1
    assert opt.t_opt == 400


def test_binary_sopt_degenerate_when_depth_term_vanishes():
    opt = uni_sopt_topt("binary", P(10, 1, 1, 7), 100)
    assert opt.degenerate
    assert opt.s_opt == 100
    assert opt.t_opt == float(uni_time("binary", P(10, 1, 1, 7), MessageSpec(100, 100)).value)


def test_sopt_degenerate_without_bandwidth_or_compute():
    opt = uni_sopt_topt("pipeline", P(5, 0, 0, 8), 20)
    assert opt.degenerate and opt.s_opt == 20


@pytest.mark.parametrize("name,p", [("pipeline", 10), ("binary", 64), ("pipeline", 700)])
def test_uni_topt_matches_formula_at_real_sopt(name, p):
    params = P(7, 2, 1, p)
    m = 5000
    opt = uni_sopt_topt(name, params, m)
    s, b = opt.s_raw, 3
    if name == "pipeline":
        at_s = (p - 3) * (7 + b * s) + 2 * m / s * (7 + b * s)
    else:
        n = ceil_log2(p + 1)
        at_s = 2 * (n - 3) * (7 + b * s) + 4 * m / s * (7 + b * s)
    assert opt.t_opt == pytest.approx(at_s, rel=1e-9)


def test_bi_sopt_values():
    opt = bi_sopt_topt("bigreedy", P(50000, 6, 1, 64), 10 ** 6)
    assert opt.t_opt == pytest.approx((math.sqrt(250000) + math.sqrt(7e6)) ** 2, rel=1e-12)
    assert opt.t_opt == pytest.approx(9.8958e6, rel=1e-4)
    assert bi_sopt_topt("pipeline", P(4, 1, 0, 10), 100).s_raw == pytest.approx(math.sqrt(50))


def test_bi_sopt_guard_small_p():
    with pytest.raises(DomainError):
        bi_sopt_topt("bigreedy", P(1, 1, 1, 2), 10)


def test_reduce_lower_bounds():
    assert reduce_lower_bounds(P(0, 1, 0, 3), 5).bandwidth == 10
    assert reduce_lower_bounds(P(0, 1, 0, 2), 5).bandwidth == 5
    assert reduce_lower_bounds(P(0, 0, 1, 8), 8).computation == 7
    assert reduce_lower_bounds(P(3, 0, 0, 9), 1).latency == 12


def test_algorithm_lower_bounds():
    lb = algorithm_lower_bounds("pipeline", P(1, 1, 0, 10), 4)
    assert (lb.latency, lb.bandwidth) == (9, 15)
    lb = algorithm_lower_bounds("binary", P(1, 1, 0, 7), 1)
    assert (lb.latency, lb.bandwidth) == (4, 4)
    lb = algorithm_lower_bounds("binomial", P(1, 1, 1, 4), 3)
    assert (lb.latency, lb.bandwidth, lb.computation) == (2, 6, 6)
    with pytest.raises(DomainError):
        algorithm_lower_bounds("binomial", P(1, 1, 1, 2), 3)


def test_reference_line():
    assert reference_line(P(50000, 6, 1, 64), 1000) == Fraction(306984375, 1000)
    assert reference_line(P(1, 1, 1, 2), 1) == Fraction(5, 2)
    assert reference_line(P(0, 3, 0, 9), 4) == 12


@pytest.mark.parametrize("algo", ["pipeline", "binary"])
@pytest.mark.parametrize("p,m,s", [(4, 10, 3), (9, 64, 8), (33, 100, 100)])
def test_uni_times_respect_reduce_lower_bounds(algo, p, m, s):
    params = P(2, 3, 1, p)
    t = uni_time(algo, params, MessageSpec(m, s)).value
    lb = reduce_lower_bounds(params, m)
    assert t >= lb.latency and t >= lb.bandwidth and t >= lb.computation


def test_butterfly_threshold_values():
    assert butterfly_threshold_ratio(1000) == pytest.approx(4.5556, abs=1e-4)
    assert butterfly_threshold_ratio(64) == pytest.approx(2.8684, abs=1e-4)
    assert butterfly_threshold_ratio(4) == pytest.approx(3.5, abs=1e-9)


@pytest.mark.parametrize("p", [4, 64])
def test_threshold_scan_agrees_with_discriminant(p):
    assert butterfly_threshold_scan(p, alpha=1) == pytest.approx(butterfly_threshold_ratio(p), rel=1e-6)


def test_butterfly_witnesses():
    assert butterfly_beats_bigreedy(P(1, 4, 1, 1000), range(1, 100)).exists
    assert not butterfly_beats_bigreedy(P(1, 6, 1, 1000), range(1, 10 ** 4)).exists
    res = butterfly_beats_bigreedy(P(50000, 6, 1, 64), [10 ** k for k in range(9)])
    assert not res.exists and res.analytic_interval is None


def test_butterfly_interval_matches_direct_comparison():
    params = P(1, 2, 1, 1000)
    lo, hi = butterfly_witness_interval(params)
    inside = int((lo + hi) / 2) if hi != math.inf else int(lo) + 1
    assert butterfly_beats_bigreedy(params, [inside]).exists


def test_butterfly_empty_range_rejected():
    with pytest.raises(ValueError):
        butterfly_beats_bigreedy(P(1, 1, 1, 8), [])
