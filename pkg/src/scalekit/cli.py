"""Command-line interface.

Exit codes: 0 success, 2 usage or input error, 3 solver failure, 4 I/O failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .conedist import solve_cone_projection
from .core import (
    derive_seed,
    dumps,
    format_float,
    random_unit_frame,
    read_frame,
    write_frame,
    frame_to_json,
)
from .errors import MaxIterations, NotSPD, ScalekitError, TraceMismatch
from .mvee import frame_from_ellipsoid, john_certificate, minimal_ellipsoid
from .probability import monte_carlo_prob
from .scalemeasures import DEFAULT_TOL, analyze, d_bounds, report_to_dict, vd_envelope

SCAN_HEADER = ("frame_index", "m", "n", "cone_distance", "volume_ratio",
               "vd_lower", "vd_upper", "d_lower", "d_upper")

EXIT_OK, EXIT_USAGE, EXIT_SOLVER, EXIT_IO = 0, 2, 3, 4


class _Fail(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _int_list(text):
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _tol(text):
    v = float(text)
    if not 0.0 < v <= 1e-4:
        raise argparse.ArgumentTypeError("tol must lie in (0, 1e-4]")
    return v


def _write_text(path, text):
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot write {path}: {exc}")


def _load(path):
    try:
        return read_frame(path)
    except OSError as exc:
        raise _Fail(EXIT_USAGE, f"cannot read {path}: {exc}")
    except ScalekitError as exc:
        raise _Fail(EXIT_USAGE, f"{path}: {exc}")


def _text_report(rep):
    lines = [
        f"frame            {rep.n} x {rep.m}",
        f"scalable         {'yes' if rep.scalable else 'no'} ({rep.certificate.value})",
        f"cone distance    {format_float(rep.cone_distance)}",
        f"volume ratio     {format_float(rep.volume_ratio)}",
        f"d lower bound    {format_float(rep.d_phi_lower)}",
        f"d upper bound    {format_float(rep.d_phi_upper)}",
        f"K, omega         {rep.k_active}, {format_float(rep.omega)}",
        f"tol              {format_float(rep.tol)}",
    ]
    if not rep.d_hypothesis_holds:
        lines.append("note             upper bound >= 1, lower bound not applicable")
    return "\n".join(lines)


def cmd_analyze(args):
    frame = _load(args.path)
    try:
        rep = analyze(frame, tol=args.tol)
    except (MaxIterations, ScalekitError) as exc:
        raise _Fail(EXIT_SOLVER, f"solver failed: {exc}")
    print(_text_report(rep) if args.text else dumps(report_to_dict(rep)))
    return EXIT_OK


def cmd_random(args):
    if args.m < args.n or args.n < 1:
        raise _Fail(EXIT_USAGE, "need m >= n >= 1")
    frame = random_unit_frame(args.m, args.n, args.seed)
    if args.out:
        try:
            write_frame(frame, args.out)
        except OSError as exc:
            raise _Fail(EXIT_IO, f"cannot write {args.out}: {exc}")
    else:
        print(frame_to_json(frame))
    return EXIT_OK


def scan_rows(m_list, n, count, seed):
    """Yield one tuple per random frame, in the column order of ``SCAN_HEADER``."""
    for m in m_list:
        for idx in range(count):
            frame = random_unit_frame(m, n, derive_seed(seed, m, idx))
            dist = solve_cone_projection(frame).distance
            vol = minimal_ellipsoid(frame).volume_ratio
            vd_lo, vd_hi = vd_envelope(dist, n)
            lo, hi, _, _ = d_bounds(dist, vol, m, n)
            yield idx, m, n, dist, vol, vd_lo, vd_hi, lo, hi


def cmd_scan(args):
    if args.n < 2 or any(m < args.n for m in args.m_list) or args.count < 1:
        raise _Fail(EXIT_USAGE, "need n >= 2, every m >= n and count >= 1")
    try:
        out = open(args.out, "w", newline="")
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot write {args.out}: {exc}")
    scalable = {m: 0 for m in args.m_list}
    try:
        with out:
            out.write(",".join(SCAN_HEADER) + "\n")
            for row in scan_rows(args.m_list, args.n, args.count, args.seed):
                idx, m, n, *vals = row
                scalable[m] += vals[0] < 1e-6
                out.write(f"{idx},{m},{n}," + ",".join(format_float(v) for v in vals) + "\n")
    except MaxIterations as exc:
        raise _Fail(EXIT_SOLVER, f"solver failed: {exc}")
    summary = {str(m): scalable[m] / args.count for m in args.m_list}
    print(dumps({"rows": len(args.m_list) * args.count, "scalable_fraction": summary}))
    return EXIT_OK


def cmd_prob(args):
    if args.n < 2 or args.trials < 1 or any(m < args.n for m in args.m):
        raise _Fail(EXIT_USAGE, "need n >= 2, m >= n and trials >= 1")
    ests = [monte_carlo_prob(m, args.n, args.trials, tol=args.tol, seed=args.seed)
            for m in args.m]
    if args.csv:
        cols = ("m", "n", "trials", "hits", "estimate", "stderr", "lower_bound", "upper_bound")
        lines = [",".join(cols)]
        for e in ests:
            d = e.to_dict()
            lines.append(",".join(format_float(d[c]) if isinstance(d[c], float) else str(d[c])
                                  for c in cols))
        _write_text(args.csv, "\n".join(lines) + "\n")
    payload = [e.to_dict() for e in ests]
    print(dumps(payload[0] if len(payload) == 1 else payload))
    return EXIT_OK


def _read_matrix(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise _Fail(EXIT_USAGE, f"cannot read {path}: {exc}")
    try:
        obj = json.loads(text)
        if isinstance(obj, dict):
            obj = obj.get("x_inv", obj.get("matrix"))
        mat = np.array(obj, dtype=float)
    except (ValueError, TypeError):
        try:
            mat = np.loadtxt(path, delimiter=",", ndmin=2)
        except ValueError as exc:
            raise _Fail(EXIT_USAGE, f"{path}: cannot parse matrix: {exc}")
    if mat.ndim != 2:
        raise _Fail(EXIT_USAGE, f"{path}: expected a square matrix")
    return mat


def cmd_construct(args):
    if args.xinv:
        x_inv = _read_matrix(args.xinv)
    else:
        lam = np.asarray(args.spectrum, dtype=float)
        if lam.size == 0:
            raise _Fail(EXIT_USAGE, "empty spectrum")
        x_inv = np.diag(lam)
    n = x_inv.shape[0]
    m = n if args.m is None else args.m
    try:
        frame = frame_from_ellipsoid(x_inv, m, seed=args.seed)
    except (TraceMismatch, NotSPD) as exc:
        raise _Fail(EXIT_USAGE, str(exc))
    except ScalekitError as exc:
        raise _Fail(EXIT_USAGE, str(exc))
    try:
        ell = minimal_ellipsoid(frame, eta=1e-9)
    except MaxIterations as exc:
        raise _Fail(EXIT_SOLVER, f"solver failed: {exc}")
    cert = john_certificate(frame, ell)
    target = math.sqrt(np.linalg.det(x_inv))
    verification = {
        "reconstruction_residual": cert.reconstruction_residual,
        "max_containment_violation": cert.max_containment_violation,
        "max_contact_slack": cert.max_contact_slack,
        "passed": cert.passed,
        "volume_ratio": ell.volume_ratio,
        "prescribed_volume_ratio": target,
    }
    if args.out:
        try:
            write_frame(frame, args.out)
        except OSError as exc:
            raise _Fail(EXIT_IO, f"cannot write {args.out}: {exc}")
        print(dumps(verification))
    else:
        print(dumps({"frame": {"n": frame.n, "m": frame.m, "columns": frame.columns.T},
                     "verification": verification}))
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="scalekit", description="Scalability measures for unit-norm frames.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="report scalability measures of a frame file")
    a.add_argument("path")
    a.add_argument("--tol", type=_tol, default=DEFAULT_TOL)
    fmt = a.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON output (default)")
    fmt.add_argument("--text", action="store_true", help="human-readable output")
    a.set_defaults(func=cmd_analyze)

    r = sub.add_parser("random", help="draw a random unit-norm frame")
    r.add_argument("--m", type=int, required=True)
    r.add_argument("--n", type=int, required=True)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out")
    r.set_defaults(func=cmd_random)

    s = sub.add_parser("scan", help="cone distance and volume ratio of many random frames")
    s.add_argument("--m-list", type=_int_list, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--count", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_scan)

    q = sub.add_parser("prob", help="Monte Carlo probability that a random frame is scalable")
    q.add_argument("--m", type=_int_list, required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--trials", type=int, default=10_000)
    q.add_argument("--tol", type=_tol, default=DEFAULT_TOL)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--csv", help="also write one CSV row per m")
    q.set_defaults(func=cmd_prob)

    c = sub.add_parser("construct", help="build a frame with a prescribed minimal ellipsoid")
    src = c.add_mutually_exclusive_group(required=True)
    src.add_argument("--xinv", help="JSON or CSV file holding the matrix X^-1")
    src.add_argument("--spectrum", type=_float_list, help="eigenvalues of X^-1 (sum n)")
    c.add_argument("--m", type=int)
    c.add_argument("--seed", type=int)
    c.add_argument("--out")
    c.set_defaults(func=cmd_construct)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Fail as exc:
        print(f"scalekit: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
