"""Command-line interface: ``grace-fir <command> ...``.

Frequencies are always on the scale where 1 is the Nyquist frequency.
Exit codes: 0 success, 1 infeasible design or degenerate response,
2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import io
from .asymptotics import DesignTargets, InfeasibleDesign, design_search
from .deripple import auto_compensate, compensate
from .filter import (
    DegenerateResponse,
    FilterSpec,
    coefficients,
    measure_metrics,
    reference_frequency,
    response,
    response_derivative,
    ripple_scan,
    even_derivatives,
)
from .grace import GraceParams, transform_metrics

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

TABLE_N = [10, 20, 30, 50, 70, 100, 150, 200, 300, 500, 700, 1000]
TABLE_PN = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]


def _threads() -> int:
    try:
        cap = int(os.environ.get("GRACE_FIR_THREADS", "0"))
    except ValueError:
        cap = 0
    return cap if cap > 0 else (os.cpu_count() or 1)


def _spec_from_args(parser, args) -> FilterSpec:
    try:
        return FilterSpec.of(args.m, args.n, args.p)
    except ValueError as exc:
        parser.error(str(exc))


def _deripple_mode(text: str):
    if text in ("auto", "off"):
        return text
    if text.startswith("q="):
        try:
            return int(text[2:])
        except ValueError:
            pass
    raise argparse.ArgumentTypeError("expected auto, off or q=<int>")


def _metrics_dict(c, z: int) -> dict:
    out = {"f_r": reference_frequency(c)}
    try:
        met = measure_metrics(c, z)
        out.update(f_c=met.f_c, rolloff_db_per_octave=met.rolloff_db_per_octave,
                   first_sidelobe_db=met.first_sidelobe_db)
    except DegenerateResponse:
        out.update(f_c=None, rolloff_db_per_octave=None, first_sidelobe_db=None,
                   note="degenerate response: no half-power crossing")
    scan = ripple_scan(c)
    out["passband_ripple"] = scan.passband_ripple
    out["stopband_regular"] = scan.stopband_regular
    out["even_derivatives"] = even_derivatives(c, z) if z >= 1 else []
    return out


def _build_document(spec: FilterSpec, c, comp: dict) -> dict:
    return {
        "spec": {"m": spec.m, "n": spec.params.n, "p": spec.params.p},
        "compensation": comp,
        "metrics": _metrics_dict(c, spec.params.z),
        "coefficients": list(map(float, c)),
    }


def _write_taps(spec, c, comp, out, fmt):
    if fmt is None:
        fmt = "json" if out and str(out).endswith(".json") else "csv"
    text = io.document_to_json(_build_document(spec, c, comp)) if fmt == "json" \
        else io.taps_to_csv(c)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _run_compensation(spec: FilterSpec, mode):
    c = coefficients(spec)
    z = spec.params.z
    if mode == "off" or z < 1:
        return c, {"applied": False, "q": None, "step_reached": 1, "singular_values": []}
    if mode == "auto":
        taps, rep = auto_compensate(spec)
        applied = rep.step_reached > 1
        return taps, {"applied": applied, "q": (rep.step_reached - 2 if applied else None),
                      "step_reached": rep.step_reached, "accepted": rep.accepted,
                      "singular_values": rep.singular_values}
    taps, rep = compensate(c, z, mode)
    return taps, {"applied": True, "q": mode, "step_reached": min(2 + mode, 5),
                  "singular_values": rep.singular_values}


def cmd_design(parser, args) -> int:
    if not 0.0 < args.fc < 1.0:
        parser.error("--fc must lie in (0, 1); 1 is the Nyquist frequency")
    try:
        targets = DesignTargets(args.fc, args.rolloff, args.sidelobe)
    except ValueError as exc:
        parser.error(str(exc))
    try:
        res = design_search(targets)
    except InfeasibleDesign as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_FAIL
    spec = res.spec
    pm = res.predicted
    print(f"m = {spec.m}")
    print(f"n = {spec.params.n}")
    print(f"p = {spec.params.p}")
    print(f"predicted rolloff = {pm.rolloff_db_per_octave:.2f} dB/octave")
    print(f"predicted first sidelobe = {pm.first_sidelobe_db:.2f} dB")
    print(f"achieved m*f_c = {res.achieved_mfc:.4f} (f_c = {res.achieved_mfc / spec.m:.5f})")
    if args.out:
        c, comp = _run_compensation(spec, "off" if args.no_deripple else "auto")
        _write_taps(spec, c, comp, args.out, args.format)
    return EXIT_OK


def cmd_coeffs(parser, args) -> int:
    spec = _spec_from_args(parser, args)
    mode = args.deripple
    if isinstance(mode, int) and mode < 0:
        z = spec.params.z
        if z < 1:
            parser.error("no compensation possible when p = n - 1")
        _, rep = compensate(coefficients(spec), z, mode)
        for s in rep.singular_values:
            print(io.fmt(s))
        return EXIT_OK
    if isinstance(mode, int) and mode > spec.params.z:
        parser.error(f"q must be <= z = {spec.params.z}")
    c, comp = _run_compensation(spec, mode)
    _write_taps(spec, c, comp, args.out, args.format)
    return EXIT_OK


def _load(parser, path):
    try:
        return io.load_taps(path)
    except io.ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        sys.exit(EXIT_USAGE)
    except OSError as exc:
        parser.error(str(exc))


def cmd_analyze(parser, args) -> int:
    c, doc = _load(parser, args.input)
    z = doc["spec"]["n"] - doc["spec"]["p"] - 1 if doc and doc.get("spec") else args.z
    met = _metrics_dict(c, z)
    scan = ripple_scan(c, points=args.points)
    met["passband_ripple"] = scan.passband_ripple
    met["stopband_regular"] = scan.stopband_regular
    if args.json:
        print(json.dumps(met, indent=2))
    else:
        for key, val in met.items():
            if isinstance(val, float):
                val = io.fmt(val)
            elif isinstance(val, list):
                val = " ".join(io.fmt(v) for v in val) or "-"
            print(f"{key}: {val}")
    return EXIT_FAIL if met.get("note") else EXIT_OK


def cmd_response(parser, args) -> int:
    c, _ = _load(parser, args.input)
    if args.points < 1:
        parser.error("--points must be >= 1")
    f = np.linspace(0.0, 1.0, args.points + 1)
    h = response(c, f)
    dh = response_derivative(c, f)
    lines = "".join(f"{io.fmt(a)},{io.fmt(b)},{io.fmt(d)}\n" for a, b, d in zip(f, h, dh))
    if args.out:
        Path(args.out).write_text(lines, encoding="utf-8")
    else:
        sys.stdout.write(lines)
    return EXIT_OK


def table_cell(which: str, n: int, pn: float):
    p = min(max(math.floor(pn * n + 0.5), 0), n - 1)
    met = transform_metrics(GraceParams(n, p))
    if which == "rolloff":
        return met.rolloff_db_per_octave, True
    return met.first_sidelobe_db, met.reliable


def cmd_tables(parser, args) -> int:
    for n in args.n:
        if not 2 <= n <= 1000:
            parser.error("table n values must lie in [2, 1000]")
    for pn in args.pn:
        if not 0.0 <= pn <= 1.0:
            parser.error("p/n values must lie in [0, 1]")
    jobs = [(n, pn) for n in args.n for pn in args.pn]
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        cells = list(pool.map(lambda t: table_cell(args.which, *t), jobs))
    unit = "dB/octave" if args.which == "rolloff" else "dB"
    print(f"# limiting {args.which} ({unit}); rows n, columns p/n")
    print("n".rjust(6) + "".join(f"{pn:>10.2f}" for pn in args.pn))
    flagged = False
    it = iter(cells)
    for n in args.n:
        row = f"{n:>6d}"
        for _ in args.pn:
            val, ok = next(it)
            flagged |= not ok
            row += f"{val:>9.1f}" + (" " if ok else "*")
        print(row)
    if flagged:
        print("# * below double-precision resolution; value is rounding noise")
    return EXIT_OK


def cmd_verify(parser, args) -> int:
    from .verify import run_quick_suite
    return EXIT_OK if run_quick_suite() else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="grace-fir",
        description="Grace-function FIR low-pass design (frequency 1 = Nyquist).")
    sub = parser.add_subparsers(dest="command", required=True)

    d = sub.add_parser("design", help="choose m, n, p from cutoff/rolloff/sidelobe targets")
    d.add_argument("--fc", type=float, required=True, help="cutoff frequency in (0, 1)")
    d.add_argument("--rolloff", type=float, required=True, help="dB/octave, positive")
    d.add_argument("--sidelobe", type=float, required=True, help="first sidelobe in dB, negative")
    d.add_argument("--out", help="write the designed filter here")
    d.add_argument("--format", choices=["csv", "json"])
    d.add_argument("--no-deripple", action="store_true", help="skip compensation")
    d.set_defaults(func=cmd_design)

    c = sub.add_parser("coeffs", help="generate Grace filter taps")
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--p", type=int, default=0)
    c.add_argument("--deripple", type=_deripple_mode, default="auto",
                   help="auto (five-step heuristic), off, or q=<int>; q<0 prints singular values")
    c.add_argument("--out")
    c.add_argument("--format", choices=["csv", "json"])
    c.set_defaults(func=cmd_coeffs)

    a = sub.add_parser("analyze", help="report metrics for a taps file")
    a.add_argument("--in", dest="input", required=True)
    a.add_argument("--points", type=int, default=2000)
    a.add_argument("--z", type=int, default=0,
                   help="even derivatives to report for CSV input (JSON carries n, p)")
    a.add_argument("--json", action="store_true", help="machine-readable output")
    a.set_defaults(func=cmd_analyze)

    r = sub.add_parser("response", help="sample h and dh/df on [0, 1]")
    r.add_argument("--in", dest="input", required=True)
    r.add_argument("--points", type=int, default=2000)
    r.add_argument("--out")
    r.set_defaults(func=cmd_response)

    t = sub.add_parser("tables", help="limiting rolloff or sidelobe tables")
    t.add_argument("--which", choices=["rolloff", "sidelobe"], required=True)
    t.add_argument("--n", type=int, nargs="+", default=TABLE_N)
    t.add_argument("--pn", type=float, nargs="+", default=TABLE_PN)
    t.set_defaults(func=cmd_tables)

    v = sub.add_parser("verify", help="run the quick invariant suite")
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(parser, args)


if __name__ == "__main__":
    sys.exit(main())
