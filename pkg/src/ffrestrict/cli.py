"""Command-line entry point.

Every command emits one RunRecord JSON document::

    {"command", "params", "input_digests", "warnings", "payload",
     "wall_clock", "timestamp", "version"}

With ``--out DIR`` the record goes to ``DIR/<command>_p<p>_d<d>_s<seed>.json``;
``verify`` additionally writes the BoundCheckRecord stream as JSON lines
(``.jsonl``) and a summary CSV with a header row; table-producing commands
write their table as CSV.  Floats are printed with 12 significant digits.

Exit codes: 0 success, 1 usage or input error, 2 a failed check.
Any flag may be defaulted through an environment variable
``FFRESTRICT_<FLAG>`` (for example ``FFRESTRICT_SEED=3``).
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import math
import os
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .energy import classify_rectangles, energy_report, rectangle_triples, additive_energy
from .field import PrimeContext, canonical_set, decode
from .fileio import (ParseReport, SetFileError, parse_plane_text, read_function_file,
                     read_set_file, write_function_file)
from .incidence import (PlaneMultiset, collinear_triples, isotropic_graph_stats,
                        max_collinear, point_plane_incidences, rich_line_counts, rich_lines,
                        right_triangle_count, right_triangle_decomposition)
from .paraboloid import ParaboloidSet, on_paraboloid, project
from .spectral import (DEFAULT_SIZE_CAP, ParaboloidFunction, SizeCapError, SpatialFunction,
                       extension, fourier_transform)
from . import verifier as V

log = logging.getLogger("ffrestrict")

ENV_PREFIX = "FFRESTRICT_"
COMMANDS = ("energy", "rectangles", "incidence", "verify", "sharpness", "lower-bound",
            "extremize", "transform")


class UsageError(Exception):
    pass


class CheckFailed(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _floats(text):
    return [float(t) for t in str(text).split(",") if t.strip()]


def _ints(text):
    return [int(t) for t in str(text).split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int)
    common.add_argument("--d", type=int)
    common.add_argument("--q", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--set", dest="set_file")
    common.add_argument("--out")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--threads", type=int)
    common.add_argument("--size-cap", type=int)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="ffrestrict", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("energy", parents=[common], help="additive energy report of a set")
    s.add_argument("--threshold", type=int, help="rich-line threshold (default ceil(10 sqrt|A|))")

    sub.add_parser("rectangles", parents=[common], help="rectangle triples and classes")

    s = sub.add_parser("incidence", parents=[common], help="incidence statistics of a point set")
    s.add_argument("--planes", help="plane file: n1,n2,n3,offset[,multiplicity]")
    s.add_argument("--k", type=int, default=3, help="richness threshold")

    s = sub.add_parser("verify", parents=[common], help="run a bound-check suite")
    s.add_argument("--bound", required=True, choices=V.SUITES)
    s.add_argument("--n", type=int, default=20)
    s.add_argument("--max-c", type=float, help="fail (exit 2) if a fitted constant exceeds this")

    s = sub.add_parser("sharpness", parents=[common], help="isotropic-line ratio table")
    s.add_argument("--qs", help="comma-separated exponents (default: --q)")
    s.add_argument("--primes", required=True)

    s = sub.add_parser("lower-bound", parents=[common], help="Cartesian-slice construction")
    s.add_argument("--primes", default="31,61,101")
    s.add_argument("--family", default="translate", choices=("translate", "dilate-translate"))
    s.add_argument("--min-slope", type=float, help="fail if the norm slope is below this")

    s = sub.add_parser("extremize", parents=[common], help="hill-climb the extension ratio")
    s.add_argument("--budget", type=int, default=1000)

    s = sub.add_parser("transform", parents=[common], help="Fourier transform or extension")
    s.add_argument("--func", required=True, help="function file")
    s.add_argument("--mode", choices=("fourier", "extension"), default="fourier")
    s.add_argument("--method", choices=("auto", "direct", "fast"), default="auto")
    return parser


DEFAULTS = {"p": None, "d": 4, "q": 3.0, "seed": 0, "format": "json", "threads": 1,
            "size_cap": DEFAULT_SIZE_CAP}
_CASTS = {"p": int, "d": int, "q": float, "seed": int, "threads": int, "size_cap": int,
          "n": int, "budget": int, "k": int, "threshold": int, "max_c": float,
          "min_slope": float}


def apply_env(args, environ=None):
    environ = os.environ if environ is None else environ
    for name in vars(args):
        if getattr(args, name) is None:
            raw = environ.get(ENV_PREFIX + name.upper())
            if raw is not None:
                setattr(args, name, _CASTS.get(name, str)(raw))
    for name, val in DEFAULTS.items():
        if getattr(args, name, None) is None:
            setattr(args, name, val)
    return args


def _need_p(args):
    if args.p is None:
        raise UsageError("--p is required")
    try:
        return PrimeContext(args.p)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _digest(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _load_set(args, ctx, record):
    if not args.set_file:
        raise UsageError("--set is required")
    report = ParseReport()
    try:
        pts = read_set_file(args.set_file, ctx.p, report)
    except FileNotFoundError:
        raise UsageError(f"no such file: {args.set_file}") from None
    record["input_digests"][args.set_file] = _digest(args.set_file)
    record["warnings"].extend(report.warnings)
    record["duplicates"] = report.duplicates
    return canonical_set(pts, ctx.p)


def _paraboloid_set(pts, ctx, d):
    if pts.shape[1] == d - 1:
        return ParaboloidSet(ctx, d, pts)
    if pts.shape[1] == d and on_paraboloid(pts, ctx.p).all():
        return ParaboloidSet(ctx, d, project(pts, ctx.p))
    return None


def cmd_energy(args, record):
    ctx = _need_p(args)
    pts = _load_set(args, ctx, record)
    A = _paraboloid_set(pts, ctx, args.d)
    if A is None:
        n = len(pts)
        E = additive_energy(pts, ctx.p)
        return {"n": n, "total": E, "trivial": 2 * n * n - n, "on_paraboloid": False}
    rep = energy_report(A, args.threshold)
    out = rep.to_dict()
    out["on_paraboloid"] = True
    return out


def cmd_rectangles(args, record):
    ctx = _need_p(args)
    pts = _load_set(args, ctx, record)
    if pts.shape[1] == 3:
        c = classify_rectangles(pts, ctx.p)
        return {"n": len(pts), "triples": c.total, "trivial": c.trivial,
                "nontrivial": c.nontrivial, "ordinary": c.ordinary,
                "semi_degenerate": c.semi_degenerate, "degenerate": c.degenerate}
    return {"n": len(pts), "triples": rectangle_triples(pts, ctx.p), "trivial": 2 * len(pts)**2 - len(pts)}


def cmd_incidence(args, record):
    ctx = _need_p(args)
    pts = _load_set(args, ctx, record)
    p, dim = ctx.p, pts.shape[1]
    if dim not in (2, 3):
        raise UsageError("incidence works on sets in F_p^2 or F_p^3")
    out = {"n": len(pts), "dim": dim, "max_collinear": max_collinear(pts, p),
           "m_k": rich_line_counts(pts, p)}
    if args.k >= 2:
        out["rich_lines"] = [{"direction": list(l.direction), "base": list(l.base), "support": s}
                             for l, s in rich_lines(pts, args.k, p)]
    if dim == 2:
        out["right_triangles"] = right_triangle_count(pts, p)
        if p % 4 == 3:
            out["right_triangle_decomposition"] = right_triangle_decomposition(pts, p)
        o, u = collinear_triples(pts, 2, max(2, len(pts)), p)
        out["collinear_triples"] = {"ordered": o, "unordered": u}
    else:
        e, t, bad = isotropic_graph_stats(pts, p)
        out["isotropic_graph"] = {"edges": e, "triangles": t, "non_collinear_triangles": bad}
        if bad:
            raise CheckFailed("isotropic graph has a non-collinear triangle")
    if args.planes:
        if dim != 3:
            raise UsageError("--planes needs a set in F_p^3")
        text = Path(args.planes).read_text(encoding="utf-8")
        record["input_digests"][args.planes] = _digest(args.planes)
        planes = PlaneMultiset(p, parse_plane_text(text, p))
        res = point_plane_incidences(pts, planes)
        out["point_plane"] = {"incidences": res.incidences, "planes": len(planes),
                              "deviation_numerator": res.numerator,
                              "deviation_denominator": res.denominator}
    return out


def cmd_verify(args, record):
    ctx = _need_p(args)
    recs = V.run_suite(args.bound, ctx.p, args.d, args.n, args.seed, args.threads, args.q)
    rows = [r.to_dict() for r in recs]
    summary = V.summarize(recs)
    record["_jsonl"] = rows
    record["_csv"] = [{"bound": k.split("|")[0], "p": ctx.p, "d": args.d,
                       "max_fitted_c": v, "count": sum(1 for r in recs if r.name == k.split("|")[0])}
                      for k, v in sorted(summary.items())]
    payload = {"bound": args.bound, "count": len(rows), "max_fitted_c": summary, "records": rows}
    if args.max_c is not None:
        worst = max(r.fitted_c for r in recs)
        payload["max_c"] = args.max_c
        if worst > args.max_c:
            record["payload"] = payload
            raise CheckFailed(f"fitted constant {worst:.6g} exceeds --max-c {args.max_c}")
    return payload


def cmd_sharpness(args, record):
    qs = _floats(args.qs) if args.qs else [args.q]
    try:
        res = V.sharpness_sweep(args.d, qs, _ints(args.primes))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    record["_csv"] = res["rows"]
    bad = [q for q, t in res["trend"].items() if t in ("not-increasing", "unbounded")]
    if bad:
        record["payload"] = res
        raise CheckFailed(f"unexpected trend at q = {bad}")
    return res


def cmd_lower_bound(args, record):
    primes = _ints(args.primes)
    try:
        rows = [V.lower_bound_construction(p, args.family) for p in primes]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    flat = [{k: v for k, v in r.items() if k != "bounds"} for r in rows]
    record["_csv"] = flat
    out = {"rows": rows}
    if len(primes) >= 2:
        out["norm_slope"] = V.loglog_slope(primes, [r["restricted_norm"] for r in rows])
        out["min_bound_slope"] = V.loglog_slope(primes, [r["min_bound"] for r in rows])
    if not all(r["slices_ge_N4"] for r in rows):
        record["payload"] = out
        raise CheckFailed("a slice has fewer than N^4 rectangles")
    if args.min_slope is not None and out.get("norm_slope", math.inf) < args.min_slope:
        record["payload"] = out
        raise CheckFailed(f"norm slope {out['norm_slope']:.4f} < {args.min_slope}")
    return out


def cmd_extremize(args, record):
    ctx = _need_p(args)
    res = V.extremizer_search(ctx, args.d, args.q, args.budget, args.seed)
    return {"best_ratio": res.best_ratio, "best_size": len(res.best_base),
            "best_base": res.best_base.tolist(), "trace": res.trace}


def cmd_transform(args, record):
    ctx = _need_p(args)
    try:
        coords, vals = read_function_file(args.func, ctx.p)
    except FileNotFoundError:
        raise UsageError(f"no such file: {args.func}") from None
    record["input_digests"][args.func] = _digest(args.func)
    d = coords.shape[1] if args.mode == "fourier" else coords.shape[1] + 1
    args.d = d
    if args.mode == "fourier":
        g = SpatialFunction.from_points(ctx, d, coords, vals)
        out = fourier_transform(g, args.method, args.size_cap)
    else:
        f = ParaboloidFunction(ctx, d, SpatialFunction.from_points(ctx, d - 1, coords, vals).values)
        out = extension(f, args.method, args.size_cap)
    pts = decode(np.arange(ctx.p**d), ctx.p, d)
    record["_function"] = (pts, out.values)
    nz = np.abs(out.values) > 1e-12
    return {"mode": args.mode, "d": d, "points": int(ctx.p**d), "nonzero": int(nz.sum()),
            "l2_norm": float(np.sqrt(np.sum(np.abs(out.values) ** 2)))}


HANDLERS = {"energy": cmd_energy, "rectangles": cmd_rectangles, "incidence": cmd_incidence,
            "verify": cmd_verify, "sharpness": cmd_sharpness, "lower-bound": cmd_lower_bound,
            "extremize": cmd_extremize, "transform": cmd_transform}


def _params(args):
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "verbose", "func_obj")}


def _stem(args):
    p = args.p if args.p is not None else "-".join(str(x) for x in _ints(getattr(args, "primes", "")))
    return f"{args.command}_p{p}_d{args.d}_s{args.seed}"


def _csv_text(rows):
    if not rows:
        return ""
    buf = io.StringIO()
    fields = list(rows[0].keys())
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: V.round_sig(v) if isinstance(v, (float, np.floating)) else v
                    for k, v in r.items()})
    return buf.getvalue()


def dumps(obj) -> str:
    return json.dumps(V._clean(obj), sort_keys=True)


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    apply_env(args)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    record = {"command": args.command, "params": _params(args), "input_digests": {},
              "warnings": [], "payload": None, "version": __version__,
              "backend": kernels.BACKEND}
    t0 = time.perf_counter()
    code = 0
    try:
        record["payload"] = HANDLERS[args.command](args, record)
    except CheckFailed as exc:
        code = 2
        record["failure"] = str(exc)
        print(f"check failed: {exc}", file=sys.stderr)
    except (UsageError, SetFileError, SizeCapError, OverflowError, MemoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    record["wall_clock"] = time.perf_counter() - t0
    record["timestamp"] = datetime.now(timezone.utc).isoformat()
    jsonl = record.pop("_jsonl", None)
    table = record.pop("_csv", None)
    func = record.pop("_function", None)
    record.pop("duplicates", None)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        stem = _stem(args)
        (out / f"{stem}.json").write_text(dumps(record) + "\n", encoding="utf-8")
        if jsonl is not None:
            (out / f"{stem}.jsonl").write_text("".join(dumps(r) + "\n" for r in jsonl),
                                               encoding="utf-8")
        if table:
            (out / f"{stem}.csv").write_text(_csv_text(table), encoding="utf-8")
        if func is not None:
            write_function_file(out / f"{stem}.txt", *func)
    elif args.format == "csv" and table:
        stdout.write(_csv_text(table))
    else:
        stdout.write(dumps(record) + "\n")
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
