"""JSON / CSV / SVG renderings of schedules."""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from typing import Union

from .cost import MachineParams, exact
from .schedule import Schedule, SegmentPlan, SimulationResult, simulate

FORMATS = ("json", "csv", "svg")

# one hue per segment; compute intervals use the darker variant
_PALETTE = [
    ("#8fb8de", "#2f5f8a"), ("#f2b880", "#a35d1a"), ("#9fd39f", "#2f7a2f"),
    ("#e79aa6", "#8e2b3b"), ("#c8b2e0", "#5d3f85"), ("#f0e08a", "#8a7a1c"),
    ("#9ed8d8", "#256f6f"), ("#d9b38c", "#6e4a24"),
]


def format_number(x, as_float: bool = False) -> str:
    x = exact(x)
    if as_float:
        return repr(float(x))
    return str(x)


def _json_number(x):
    x = exact(x)
    return x if isinstance(x, int) else str(x)


def _parse_number(x):
    return exact(x if not isinstance(x, str) else Fraction(x))


def schedule_to_dict(schedule: Schedule) -> dict:
    prm = schedule.params
    return {
        "p": schedule.p,
        "model": schedule.model,
        "plan": list(schedule.plan.sizes),
        "params": {"alpha": _json_number(prm.alpha), "beta": _json_number(prm.beta),
                   "gamma": _json_number(prm.gamma)},
        "events": [{"seg": e.segment, "from": e.sender, "to": e.receiver,
                    "start": _json_number(e.start)} for e in schedule.events],
    }


def schedule_from_dict(data: dict) -> Schedule:
    prm = data["params"]
    params = MachineParams(_parse_number(prm["alpha"]), _parse_number(prm["beta"]),
                           _parse_number(prm["gamma"]), int(data["p"]))
    plan = SegmentPlan(tuple(data["plan"]))
    pairs = [(e["seg"], e["from"], e["to"], _parse_number(e["start"])) for e in data["events"]]
    return Schedule.build(params, plan, data["model"], pairs)


def parse_json(text: Union[str, bytes]) -> Schedule:
    return schedule_from_dict(json.loads(text))


def to_json(schedule: Schedule) -> str:
    return json.dumps(schedule_to_dict(schedule), indent=2) + "\n"


def to_csv(schedule: Schedule, as_float: bool = False) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["seg", "from", "to", "start", "comm", "comp"])
    for e in schedule.events:
        writer.writerow([e.segment, e.sender, e.receiver, format_number(e.start, as_float),
                         format_number(e.comm, as_float), format_number(e.comp, as_float)])
    return buf.getvalue()


def to_svg(schedule: Schedule, result: SimulationResult = None,
           scale: float = 24.0, lane: float = 22.0) -> str:
    """Gantt chart: one lane per processor, one rectangle per busy interval."""
    if result is None:
        result = simulate(schedule)
    p = schedule.p
    horizon = float(result.completion) or 1.0
    left, top = 60.0, 30.0
    width = left + horizon * scale + 20
    height = top + p * lane + 30
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width:.1f}" height="{height:.1f}" viewBox="0 0 {width:.1f} {height:.1f}">',
        f'<title>{schedule.model} schedule, p={p}, q={schedule.plan.q}, '
        f'completion={format_number(result.completion)}</title>',
    ]
    for t in range(int(horizon) + 1):
        x = left + t * scale
        out.append(f'<line x1="{x:.1f}" y1="{top - 4:.1f}" x2="{x:.1f}" '
                   f'y2="{top + p * lane:.1f}" stroke="#dddddd" stroke-width="0.5"/>')
        out.append(f'<text x="{x:.1f}" y="{top - 8:.1f}" font-size="9" '
                   f'text-anchor="middle">{t}</text>')
    for proc, intervals in enumerate(result.proc_timeline):
        y = top + proc * lane
        out.append(f'<g id="proc-{proc}">')
        out.append(f'<text x="{left - 8:.1f}" y="{y + lane * 0.65:.1f}" font-size="11" '
                   f'text-anchor="end">P{proc}</text>')
        for k, iv in enumerate(intervals):
            if iv.end <= iv.start:
                continue
            light, dark = _PALETTE[(iv.segment - 1) % len(_PALETTE)]
            x0 = left + float(iv.start) * scale
            w = float(iv.end - iv.start) * scale
            fill = dark if iv.tag == "compute" else light
            rid = f"p{proc}-{k}-{iv.tag}-s{iv.segment}"
            out.append(f'<rect id="{rid}" class="{iv.tag} seg-{iv.segment}" x="{x0:.2f}" '
                       f'y="{y + 3:.1f}" width="{w:.2f}" height="{lane - 6:.1f}" '
                       f'fill="{fill}" stroke="#333333" stroke-width="0.6"/>')
            if iv.tag == "send":
                for xs in (x0, x0 + w - 3):
                    out.append(f'<rect class="strip" x="{xs:.2f}" y="{y + 3:.1f}" width="3" '
                               f'height="{lane - 6:.1f}" fill="{dark}"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit(obj, fmt: str, as_float: bool = False) -> bytes:
    """Render a Schedule (or a (Schedule, SimulationResult) pair for svg)."""
    result = None
    if isinstance(obj, tuple):
        obj, result = obj
    if not isinstance(obj, Schedule):
        raise TypeError("emit expects a Schedule")
    if fmt == "json":
        return to_json(obj).encode()
    if fmt == "csv":
        return to_csv(obj, as_float).encode()
    if fmt in ("svg", "svg-gantt"):
        return to_svg(obj, result).encode()
    raise ValueError(f"unsupported format {fmt!r}; choose from {FORMATS}")
