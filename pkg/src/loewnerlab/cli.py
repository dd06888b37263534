"""``loewnerlab`` command line.

Exit codes: 0 success, 1 parse error or failed check, 2 domain error (e.g. c = +-4).
"""
from __future__ import annotations

import argparse
import re
import sys
import warnings
from pathlib import Path

import numpy as np

from . import io
from .analytics import time1_hull
from .config import CONFIG_ENV, RunConfig, load_config, parse_config_text
from .driver import Driver, load_csv
from .errors import DegenerateC, LipGuardExceeded, LoewnerError, OutOfDomain
from .figures import ctag, make_figure
from .flow import flow_morph, hull_grid, right_hull
from .params import classify_phase, family1_params, family2_params, phase_boundary, segment_count_sign
from .trace import trace_driver, zipper_trace

EXIT_OK, EXIT_FAIL, EXIT_DOMAIN = 0, 1, 2


def parse_complex(text: str) -> complex:
    """Accept ``a+bi``, ``a - b i``, ``bi``, ``-i``, ``1e-3+2e1i`` and plain reals."""
    s = re.sub(r"\s+", "", str(text)).lower().replace("i", "j")
    try:
        z = complex(s)
    except ValueError:
        raise ValueError(f"cannot parse complex number {text!r}") from None
    if not (np.isfinite(z.real) and np.isfinite(z.imag)):
        raise ValueError(f"complex number must be finite, got {text!r}")
    return z


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_FAIL, f"{self.prog}: error: {message}\n")


def _complex_arg(text):
    try:
        return parse_complex(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def _region_arg(text):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("region must be xmin,xmax,ymin,ymax")
    if len(vals) != 4:
        raise argparse.ArgumentTypeError("region must be xmin,xmax,ymin,ymax")
    return tuple(vals)


def _common(p):
    p.add_argument("--config", help=f"key=value config file (default: ${CONFIG_ENV})")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override one config value; repeatable")
    p.add_argument("--threads", type=int, help="worker processes for grids (0 = all cores)")
    p.add_argument("--seed", type=int, help="seed for randomized suites (default 7)")
    p.add_argument("--out-dir", help="directory for written files (default 'out')")


def _driver_args(p, need_c=True):
    p.add_argument("--c", type=_complex_arg, required=need_c, help="driver coefficient, e.g. 3.31+1.15i")
    p.add_argument("--family", type=int, choices=(1, 2), default=1,
                   help="1: c sqrt(1-t), 2: c sqrt(tau+t)")
    p.add_argument("--tau", type=float, default=0.0)
    p.add_argument("--T", type=float, dest="T", help="final time (default: driver horizon)")
    p.add_argument("--driver-csv", help="sampled driver with header t,re,im (overrides --c)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="loewnerlab", description="Hulls of complex Loewner drivers c sqrt(1-t), c sqrt(tau+t).")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("params", help="roots, weights and phase of c")
    p.add_argument("--c", type=_complex_arg, required=True)
    p.add_argument("--family", type=int, choices=(1, 2), default=1)
    p.add_argument("--tau", type=float, default=0.0)
    _common(p)

    p = sub.add_parser("phase-boundary", help="the curve Re(alpha) = 0 in the first quadrant")
    p.add_argument("--samples", type=int, help="number of rays (default: boundary_samples)")
    _common(p)

    p = sub.add_parser("trace", help="upper/lower hull curves by the implicit tip equation")
    _driver_args(p)
    p.add_argument("--samples", type=int, help="trace samples (default: trace_samples)")
    _common(p)

    p = sub.add_parser("zipper", help="hull curves by composing elementary sqrt(t) maps")
    _driver_args(p, need_c=False)
    p.add_argument("--n", type=int, help="number of pieces (default: zipper_steps)")
    p.add_argument("--samples", type=int, default=500, help="output times")
    _common(p)

    p = sub.add_parser("grid", help="brute-force capture grid")
    _driver_args(p, need_c=False)
    p.add_argument("--nx", type=int)
    p.add_argument("--ny", type=int)
    p.add_argument("--region", type=_region_arg, help="xmin,xmax,ymin,ymax")
    p.add_argument("--pgm", action="store_true", help="also write a PGM raster")
    _common(p)

    p = sub.add_parser("right-hull", help="right hull via the dual driver")
    _driver_args(p)
    p.add_argument("--samples", type=int, help="samples per curve")
    _common(p)

    p = sub.add_parser("morph", help="flow the time-1 hull of c sqrt(1-t) forward to time t")
    p.add_argument("--c", type=_complex_arg, required=True)
    p.add_argument("--t", type=float, required=True)
    _common(p)

    p = sub.add_parser("time1", help="assemble L_1 for c sqrt(1-t)")
    p.add_argument("--c", type=_complex_arg, required=True)
    p.add_argument("--samples", type=int)
    _common(p)

    p = sub.add_parser("verify", help="run an acceptance suite")
    p.add_argument("--suite", default="all",
                   choices=("params", "examples", "transition", "endpoints", "oracle", "properties", "all"))
    p.add_argument("--report", help="also write the JSON report here")
    _common(p)

    p = sub.add_parser("figure", help="reproduce a reference figure (1-5)")
    p.add_argument("--id", type=int, required=True, choices=range(1, 6), dest="fig_id")
    p.add_argument("--c", type=_complex_arg, help="override the figure's c")
    p.add_argument("--t", type=float, help="time for figure 4")
    _common(p)
    return ap


def make_config(args) -> RunConfig:
    over = {}
    for item in args.set:
        over.update(parse_config_text(item))
    over.update(threads=args.threads, seed=args.seed, output_dir=args.out_dir)
    return load_config(args.config, **over)


def make_driver(args) -> Driver:
    if getattr(args, "driver_csv", None):
        return load_csv(args.driver_csv)
    if args.c is None:
        raise ValueError("need --c or --driver-csv")
    if args.family == 1:
        return Driver.sqrt_one_minus_t(args.c, args.T or 1.0)
    return Driver.sqrt_tau_plus_t(args.c, args.tau, args.T or 1.0)


def _emit(obj):
    sys.stdout.write(io.dumps(obj) + "\n")


def _label(args, d: Driver) -> str:
    return ctag(d.c) if d.is_closed_form else "sampled"


# ---------------------------------------------------------------------------------------

def cmd_params(args, cfg):
    if args.family == 1:
        p = family1_params(args.c)
        body = {"family": 1, "params": p.as_dict(), "phase": classify_phase(args.c, cfg.phase_tol).as_dict()}
    else:
        p = family2_params(args.c, args.tau)
        body = {"family": 2, "params": p.as_dict(), "segments": segment_count_sign(args.c)}
    _emit(io.report("params", body))
    return EXIT_OK


def cmd_phase_boundary(args, cfg):
    pb = phase_boundary(args.samples or cfg.boundary_samples)
    out = Path(cfg.output_dir)
    order = np.argsort(np.angle(pb.points))
    path = io.write_points_csv(out / "phase_boundary.csv", pb.points[order], ("re", "im", "im_alpha"),
                               extra=[pb.im_alpha[order]])
    _emit(io.report("phase-boundary", {"min_modulus": pb.min_modulus, "min_point": pb.min_point,
                                       "rays": pb.angles_tried, "rays_hit": pb.rays_hit,
                                       "coverage": pb.coverage, "points": len(pb.points),
                                       "csv": str(path)}))
    return EXIT_OK


def _write_curves(curves, out: Path, stem: str):
    paths = []
    for tr in curves:
        p = out / f"{stem}_{tr.side.lower()}.csv"
        p.parent.mkdir(parents=True, exist_ok=True)
        tr.write_csv(p)
        paths.append(str(p))
    return paths


def cmd_trace(args, cfg):
    d = make_driver(args)
    up, lo = trace_driver(d, args.T, args.samples or cfg.trace_samples, cfg=cfg)
    paths = _write_curves((up, lo), Path(cfg.output_dir), f"trace_{_label(args, d)}")
    _emit(io.report("trace", {"driver": d.describe(), "upper": up.summary(), "lower": lo.summary(),
                              "csv": paths}))
    return EXIT_OK


def cmd_zipper(args, cfg):
    d = make_driver(args)
    T = args.T or d.horizon
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", LipGuardExceeded)
        up, lo = zipper_trace(d, args.n or cfg.zipper_steps, T,
                              times=np.linspace(0, T, args.samples), lip_guard=cfg.lip_guard)
    paths = _write_curves((up, lo), Path(cfg.output_dir), f"zipper_{_label(args, d)}")
    meta = {k: v for k, v in up.meta.items() if k in ("method", "max_c_local", "flagged")}
    _emit(io.report("zipper", {"driver": d.describe(), "meta": meta, "lip_guard_warnings": len(caught),
                               "upper_tip": up.tip, "lower_tip": lo.tip, "csv": paths}))
    return EXIT_OK


def cmd_grid(args, cfg):
    d = make_driver(args)
    g = hull_grid(d, args.T, args.region, args.nx or cfg.grid_nx, args.ny or cfg.grid_ny, cfg,
                  workers=cfg.threads or None)
    out = Path(cfg.output_dir)
    stem = f"grid_{_label(args, d)}"
    files = [str(io.write_grid_csv(out / f"{stem}.csv", g))]
    if args.pgm:
        files.append(str(io.write_pgm(out / f"{stem}.pgm", g)))
    _emit(io.report("grid", {"driver": d.describe(), "region": list(g.region), "nx": g.nx, "ny": g.ny,
                             "captured": int((g.status == 1).sum()), "unknown_fraction": g.unknown_fraction(),
                             "cell_diag": g.cell_diag, "files": files}))
    return EXIT_OK


def cmd_right_hull(args, cfg):
    d = make_driver(args)
    rh = right_hull(d, args.T, n=args.samples or cfg.trace_samples)
    out = Path(cfg.output_dir)
    path = io.write_points_csv(out / f"right_hull_{_label(args, d)}.csv", rh.points)
    _emit(io.report("right-hull", {"driver": d.describe(), "kind": rh.kind, "points": len(rh.points),
                                   "csv": str(path)}))
    return EXIT_OK


def cmd_morph(args, cfg):
    h = time1_hull(args.c, cfg=cfg, oracle_fraction=0.0)
    img, rt = flow_morph(args.c, args.t, h.upper, h.lower, cfg=cfg)
    out = Path(cfg.output_dir)
    stem = f"morph_{ctag(args.c)}_t{args.t:g}"
    files = [str(io.write_points_csv(out / f"{stem}_image.csv", img)),
             str(io.write_points_csv(out / f"{stem}_right.csv", rt))]
    _emit(io.report("morph", {"c": args.c, "t": args.t, "image_points": len(img),
                              "right_hull_points": len(rt), "files": files}))
    return EXIT_OK


def cmd_time1(args, cfg):
    h = time1_hull(args.c, samples=args.samples, cfg=cfg)
    out = Path(cfg.output_dir)
    stem = f"time1_{ctag(args.c)}"
    files = _write_curves((h.upper, h.lower), out, stem)
    for name in ("loop", "interior", "tail"):
        arr = getattr(h, name)
        if len(arr):
            files.append(str(io.write_points_csv(out / f"{stem}_{name}.csv", arr)))
    _emit(io.report("time1", {**h.to_dict(), "files": files}))
    return EXIT_OK


def cmd_verify(args, cfg):
    from .verify import run_suite

    rep = run_suite(args.suite, cfg, echo=lambda s: print(s, file=sys.stderr, flush=True))
    if args.report:
        io.write_json(args.report, rep)
    _emit(rep)
    return EXIT_OK if rep["passed"] else EXIT_FAIL


def cmd_figure(args, cfg):
    kw = {"c": args.c}
    if args.fig_id == 4:
        kw["t"] = args.t
    paths = make_figure(args.fig_id, cfg.output_dir, cfg, **kw)
    _emit(io.report("figure", {"id": args.fig_id, "files": [str(p) for p in paths]}))
    return EXIT_OK


COMMANDS = {"params": cmd_params, "phase-boundary": cmd_phase_boundary, "trace": cmd_trace,
            "zipper": cmd_zipper, "grid": cmd_grid, "right-hull": cmd_right_hull, "morph": cmd_morph,
            "time1": cmd_time1, "verify": cmd_verify, "figure": cmd_figure}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = make_config(args)
        return COMMANDS[args.cmd](args, cfg)
    except (DegenerateC, OutOfDomain) as e:
        print(f"domain error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except (LoewnerError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
