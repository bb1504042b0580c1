"""``redsched`` command line: closed-form times, schedules, sweeps and checks.

Exit codes: 0 success, 1 a verification failed, 2 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from .algorithms import schedule_binomial, schedule_pipeline
from .cost import (
    BI_ALGORITHMS,
    UNI_ALGORITHMS,
    DomainError,
    MachineParams,
    MessageSpec,
    algorithm_lower_bounds,
    bi_sopt_topt,
    bi_time,
    butterfly_beats_bigreedy,
    butterfly_threshold_ratio,
    butterfly_witness_interval,
    exact,
    reduce_lower_bounds,
    uni_sopt_topt,
    uni_time,
)
from .emit import emit, format_number
from .greedy_bi import bi_greedy_schedule, check_round_conjecture, scaled_params
from .greedy_uni import brute_force_min_time, uni_greedy_schedule, uni_greedy_time
from .schedule import SegmentPlan, check_correctness, simulate, validate_uni
from .segmentation import (
    UNEQUAL_PS,
    UnequalGrid,
    ratio_vs_standards,
    summarize,
    unequal_experiment,
)

EXIT_OK, EXIT_FAILED, EXIT_INPUT = 0, 1, 2

SCHEDULE_ALGORITHMS = ("binomial", "pipeline", "uni-greedy", "bi-greedy")
CONJECTURE_COSTS = ((1, 0), (2, 1), (3, 1), (5, 2))


class InputError(Exception):
    pass


def _rational(text: str):
    try:
        value = exact(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative: {text!r}")
    return value


def _plan(text: str) -> SegmentPlan:
    try:
        return SegmentPlan(tuple(int(x) for x in text.split(",") if x.strip()))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad plan {text!r}: {exc}") from exc


def _num(x, as_float: bool) -> str:
    if isinstance(x, float):
        return repr(x)
    return format_number(x, as_float)


# -- argument parsing ---------------------------------------------------------

def _add_machine(p: argparse.ArgumentParser, need_p: bool = True):
    if need_p:
        p.add_argument("-p", type=int, help="number of processors")
    p.add_argument("--alpha", type=_rational, default=0, help="per-message latency")
    p.add_argument("--beta", type=_rational, default=1, help="per-element transfer time")
    p.add_argument("--gamma", type=_rational, default=0, help="per-element combine time")


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--model", choices=("uni", "bi"), default="uni")
    p.add_argument("--out", help="output file (stdout if omitted)")
    p.add_argument("--float", dest="as_float", action="store_true",
                   help="print rationals as floats instead of n/d")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="redsched", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="file of key=value defaults; flags override it")
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("time", help="closed-form times, optimal segment sizes, lower bounds")
    _add_common(t)
    _add_machine(t)
    t.add_argument("-m", type=int, help="message size")
    t.add_argument("-s", type=int, help="segment size (default: m)")
    t.add_argument("--algorithm", action="append",
                   help="restrict to these algorithms (repeatable)")

    s = sub.add_parser("schedule", help="generate, check and render one schedule")
    _add_common(s)
    _add_machine(s)
    s.add_argument("--algorithm", choices=SCHEDULE_ALGORITHMS, default="uni-greedy")
    s.add_argument("-m", type=int, help="message size (equi plan with -s)")
    s.add_argument("-s", type=int, help="segment size")
    s.add_argument("--plan", type=_plan, help='explicit plan, e.g. "3,2,2"')
    s.add_argument("--format", choices=("json", "csv", "svg"), action="append",
                   help="formats to write next to --out (default json and svg)")

    w = sub.add_parser("sweep", help="standard algorithms versus tuned greedy over m")
    _add_common(w)
    _add_machine(w)
    w.add_argument("--m-exp", type=int, nargs=2, default=(2, 16), metavar=("LO", "HI"),
                   help="sweep m = 2**LO .. 2**HI")
    w.add_argument("--search", choices=("exhaustive", "pow2", "pow2-plus-formula"),
                   help="equi segment candidates for greedy")

    r = sub.add_parser("regionmap", help="which standard algorithm wins, or butterfly witnesses")
    _add_common(r)
    _add_machine(r, need_p=False)
    r.add_argument("--mode", choices=("standards-uni", "butterfly-bi"), default="standards-uni")
    r.add_argument("--p-exp", type=int, nargs=2, default=(2, 10), metavar=("LO", "HI"))
    r.add_argument("--m-exp", type=int, nargs=2, default=(2, 20), metavar=("LO", "HI"))
    r.add_argument("--ps", type=lambda x: [int(v) for v in x.split(",")],
                   help="explicit p list for butterfly-bi")
    r.add_argument("--ratios", type=lambda x: [_rational(v) for v in x.split(",")],
                   help="beta/gamma values for butterfly-bi")

    u = sub.add_parser("unequal", help="all compositions of m against equi plans on a grid")
    _add_common(u)
    u.add_argument("--algorithm", choices=("greedy", "pipeline"), default="greedy")
    u.add_argument("-m", type=int, default=10)
    u.add_argument("--exclude-p", type=lambda x: [int(v) for v in x.split(",")], default=[],
                   help="drop these processor counts from the grid")
    u.add_argument("--workers", type=int, default=1)

    v = sub.add_parser("verify", help="oracle equivalence and round-count checks")
    _add_common(v)
    v.add_argument("--oracle-max-p", type=int, default=5)
    v.add_argument("--conjecture-max-p", type=int, default=64)
    v.add_argument("--conjecture-max-q", type=int, default=10)
    return parser


def _read_config(path: str) -> dict:
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}:{n}: expected key=value")
        key, value = (x.strip() for x in line.split("=", 1))
        out[key.lstrip("-").replace("-", "_")] = value
    return out


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.config:
        return args
    # string defaults go through each option's type, so the file's values are
    # validated like flags; anything given on the command line still wins
    subs = parser._subparsers._group_actions[0].choices
    sub = subs[args.command]
    known = {a.dest: a for a in sub._actions}
    anywhere = {a.dest for other in subs.values() for a in other._actions}
    overrides, appended = {}, {}
    for key, value in _read_config(args.config).items():
        action = known.get(key)
        if action is None or key == "help":
            # one manifest may serve several subcommands
            if key in anywhere and key != "help":
                continue
            raise InputError(f"unknown config key {key!r}")
        if isinstance(action, argparse._StoreTrueAction):
            overrides[key] = value.lower() in ("1", "true", "yes", "on")
        elif isinstance(action, argparse._AppendAction):
            # argparse would extend a list default rather than replace it
            appended[key] = [action.type(v) if action.type else v for v in value.split()]
        elif action.nargs is not None and action.nargs not in ("?",):
            overrides[key] = [action.type(v) if action.type else v for v in value.split()]
        else:
            overrides[key] = value
    sub.set_defaults(**overrides)
    args = parser.parse_args(argv)
    for key, value in appended.items():
        if getattr(args, key) is None:
            setattr(args, key, value)
    return args


def _params(args, p=None) -> MachineParams:
    p = args.p if p is None else p
    if p is None:
        raise InputError("-p is required")
    return MachineParams(args.alpha, args.beta, args.gamma, p)


def _write(args, text: str):
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _csv(rows, header) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


# -- subcommands --------------------------------------------------------------

def cmd_time(args) -> int:
    params = _params(args)
    if args.m is None:
        raise InputError("-m is required")
    spec = MessageSpec(args.m, args.s or args.m)
    names = args.algorithm or (UNI_ALGORITHMS if args.model == "uni" else BI_ALGORITHMS)
    timef = uni_time if args.model == "uni" else bi_time
    optf = uni_sopt_topt if args.model == "uni" else bi_sopt_topt
    rows = []
    for name in names:
        est = timef(name, params, spec)
        s_opt = t_opt = ""
        if name not in ("binomial", "butterfly"):
            opt = optf(name, params, args.m)
            s_opt, t_opt = repr(opt.s_opt), repr(opt.t_opt)
            if opt.degenerate:
                s_opt += " (degenerate)"
        rows.append([name, _num(est.value, args.as_float), est.kind, s_opt, t_opt])
    bounds = reduce_lower_bounds(params, args.m)
    text = _csv(rows, ["algorithm", "time", "kind", "s_opt", "t_opt"])
    text += _csv([[k, _num(getattr(bounds, k), args.as_float)]
                  for k in ("latency", "bandwidth", "computation")], ["lower_bound", "value"])
    if args.model == "uni" and params.p > 2:
        lb = [[n] + [_num(getattr(algorithm_lower_bounds(n, params, args.m), k), args.as_float)
                     for k in ("latency", "bandwidth", "computation")]
              for n in names if n in UNI_ALGORITHMS]
        text += _csv(lb, ["algorithm_bound", "latency", "bandwidth", "computation"])
    _write(args, text)
    return EXIT_OK


def _schedule_plan(args) -> SegmentPlan:
    if args.plan is not None:
        return args.plan
    if args.m is None:
        raise InputError("give -m (and optionally -s) or --plan")
    return SegmentPlan.equi(args.m, args.s or args.m)


def cmd_schedule(args) -> int:
    params = _params(args)
    plan = _schedule_plan(args)
    if args.algorithm == "binomial":
        if plan.q != 1:
            raise InputError("the binomial schedule takes one unsegmented message")
        sched = schedule_binomial(params, plan.m)
    elif args.algorithm == "pipeline":
        sched = schedule_pipeline(params, plan)
    elif args.algorithm == "uni-greedy":
        sched = uni_greedy_schedule(params, plan)
    else:
        scaled, k = scaled_params(params)
        if k != 1:
            raise InputError("bi-greedy needs integer alpha, beta, gamma (scale them first)")
        sched = bi_greedy_schedule(scaled, plan)
    result = simulate(sched)
    ok = check_correctness(sched)
    if sched.model.startswith("uni") and args.algorithm != "binomial":
        ok = ok and validate_uni(sched).ok
    print(f"completion {_num(result.completion, args.as_float)}")
    if args.out:
        stem = Path(args.out)
        for fmt in args.format or ("json", "svg"):
            target = stem.with_suffix("." + fmt)
            payload = (sched, result) if fmt == "svg" else sched
            target.write_bytes(emit(payload, fmt, args.as_float))
    elif args.format:
        sys.stdout.write(emit((sched, result) if args.format[0] == "svg" else sched,
                              args.format[0], args.as_float).decode())
    if not ok:
        print("schedule failed its own checks", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def cmd_sweep(args) -> int:
    params = _params(args)
    lo, hi = args.m_exp
    rows = []
    peak = 0.0
    for e in range(lo, hi + 1):
        rec = ratio_vs_standards(params, 2 ** e, args.model, args.search)
        peak = max(peak, rec.ratio)
        std = [_num(rec.standards.get(k, ""), args.as_float) if k in rec.standards else ""
               for k in ("binomial", "pipeline", "binary", "butterfly")]
        rows.append([2 ** e, *std, _num(rec.greedy_time, args.as_float),
                     ",".join(map(str, sorted(set(rec.greedy_plan)))), rec.best_standard,
                     f"{rec.ratio:.6f}"])
    _write(args, _csv(rows, ["m", "binomial", "pipeline", "binary", "butterfly", "greedy",
                             "greedy_segment_sizes", "best_standard", "ratio"]))
    print(f"peak_ratio {peak:.6f}", file=sys.stderr)
    return EXIT_OK


def _standards_label(params: MachineParams, m: int) -> tuple:
    times = {"binomial": float(uni_time("binomial", params, MessageSpec.unsegmented(m)).value)}
    for name in ("pipeline", "binary"):
        opt = uni_sopt_topt(name, params, m)
        times[name] = opt.t_opt
    return min(times, key=lambda k: (times[k], k)), times


def _butterfly_witness(params: MachineParams):
    """Smallest integer m where butterfly wins, confirmed by direct evaluation."""
    interval = butterfly_witness_interval(params)
    if interval is None:
        return None
    lo, hi = interval
    start = max(1, math.floor(lo))
    for m in (start, start + 1, start + 2):
        if m < hi and butterfly_beats_bigreedy(params, [m]).exists:
            return m
    return None


def cmd_regionmap(args) -> int:
    rows = []
    if args.mode == "standards-uni":
        header = ["p", "m", "winner", "binomial", "pipeline", "binary"]
        for pe in range(args.p_exp[0], args.p_exp[1] + 1):
            params = MachineParams(args.alpha, args.beta, args.gamma, 2 ** pe)
            if params.p <= 3:
                continue
            for me in range(args.m_exp[0], args.m_exp[1] + 1):
                label, times = _standards_label(params, 2 ** me)
                rows.append([params.p, 2 ** me, label,
                             *(repr(times[k]) for k in ("binomial", "pipeline", "binary"))])
    else:
        # exists: some real m wins; witness_m: smallest integer m that wins, if any
        header = ["p", "beta_over_gamma", "exists", "witness_m", "threshold"]
        ps = args.ps or [2 ** e for e in range(max(args.p_exp[0], 2), args.p_exp[1] + 1)]
        ratios = args.ratios or [Fraction(k, 2) for k in range(1, 21)]
        for p in ps:
            threshold = butterfly_threshold_ratio(p)
            for r in ratios:
                params = MachineParams(args.alpha or 1, r, 1, p)
                interval = butterfly_witness_interval(params)
                witness = _butterfly_witness(params)
                rows.append([p, _num(r, args.as_float), str(interval is not None).lower(),
                             witness if witness is not None else "", f"{threshold:.6f}"])
    _write(args, _csv(rows, header))
    return EXIT_OK


def cmd_unequal(args) -> int:
    ps = tuple(p for p in UNEQUAL_PS if p not in set(args.exclude_p))
    grid = UnequalGrid(ps=ps, m=args.m)
    records = unequal_experiment(grid, args.algorithm, args.workers)
    summary = summarize(records)
    if args.out:
        rows = [[r.p, _num(r.alpha, args.as_float), _num(r.beta, args.as_float),
                 _num(r.gamma, args.as_float), r.m, r.algorithm,
                 " ".join(map(str, r.best_equi_plan)), _num(r.best_equi_time, args.as_float),
                 ";".join(" ".join(map(str, w)) for w in r.best_plans),
                 _num(r.best_time, args.as_float), str(r.equi_optimal).lower(),
                 f"{float(r.ratio):.6f}"] for r in records]
        Path(args.out).write_text(_csv(rows, [
            "p", "alpha", "beta", "gamma", "m", "algorithm", "best_equi_plan",
            "best_equi_time", "best_plans", "best_time", "equi_optimal", "ratio"]))
    print(json.dumps(summary.as_dict(), indent=2))
    return EXIT_OK


def cmd_verify(args) -> int:
    failures = []
    checked = 0
    for p in range(2, args.oracle_max_p + 1):
        for alpha in range(3):
            for beta in range(3):
                if alpha + beta == 0:
                    continue
                for gamma in range(3):
                    params = MachineParams(alpha, beta, gamma, p)
                    for plan in _small_plans(3, 3):
                        checked += 1
                        got = uni_greedy_time(params, plan)
                        best = brute_force_min_time(params, plan)
                        if got != best:
                            failures.append({"check": "oracle", "p": p, "params":
                                             [str(alpha), str(beta), str(gamma)],
                                             "plan": list(plan.sizes), "greedy": str(got),
                                             "oracle": str(best)})
    print(f"oracle: {checked} instances, {len(failures)} mismatches")
    report = check_round_conjecture(range(2, args.conjecture_max_p + 1),
                                    range(1, args.conjecture_max_q + 1), CONJECTURE_COSTS)
    print(f"round count: {report.checked} instances, {len(report.counterexamples)} mismatches, "
          f"{len(report.unsafe)} unsafe")
    failures += [{"check": "rounds", "instance": list(map(str, c))}
                 for c in report.counterexamples]
    failures += [{"check": "safety", "instance": list(map(str, c))} for c in report.unsafe]
    if failures:
        json.dump(failures, sys.stderr, indent=2)
        print(file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def _small_plans(max_q: int, max_s: int):
    from itertools import product

    for q in range(1, max_q + 1):
        for sizes in product(range(1, max_s + 1), repeat=q):
            yield SegmentPlan(sizes)


COMMANDS = {
    "time": cmd_time,
    "schedule": cmd_schedule,
    "sweep": cmd_sweep,
    "regionmap": cmd_regionmap,
    "unequal": cmd_unequal,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        return COMMANDS[args.command](args)
    except DomainError as exc:
        print(f"domain error [{exc.rule}]: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
