"""Numerical checks behind ``loewnerlab verify``.

Every check returns a ``Check`` carrying the measured numbers, the tolerance and a verdict.
Suites group checks and serialize to a versioned JSON report.
"""
from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .analytics import (HullKind, Property, accessible_point_count, critical_time_check,
                        spiral_diagnostics, time1_hull, verify_property)
from .config import RunConfig
from .driver import Axis, Driver
from .errors import InconsistentPhase, LipGuardExceeded
from .flow import ALIVE, flow_points, hull_grid, right_hull
from .geometry import directed_distance, disk_points, hausdorff, segment_points
from .io import report
from .params import (alpha_of, boundary_on_ray, classify_phase, family1_params, family2_params,
                     phase_boundary, polished_boundary_point, segment_count_sign)
from .trace import family1_grid, sqrt_t_hull, trace_tips_family1, zipper_trace

R2 = math.sqrt(2)
BOUNDARY_GUESS = 3.687 + 0.511j
SPIRAL_C = 3.31 + 1.15j
TRANSITION_RAYS = (0.08, 0.3, 0.5, 0.7)


@dataclass
class Check:
    name: str
    value: float
    tol: float
    passed: bool
    seconds: float = 0.0
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"{verdict} {self.name}: {self.value:.4g} (tol {self.tol:.3g}, {self.seconds:.1f}s)"

    def to_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "tol": self.tol, "passed": self.passed,
                "seconds": round(self.seconds, 3), "details": self.details}


def _timed(fn):
    def run(*a, **kw):
        t0 = time.perf_counter()
        chk = fn(*a, **kw)
        chk.seconds = time.perf_counter() - t0
        return chk
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


def _first_quadrant(rng, r_lo, r_hi):
    return rng.uniform(r_lo, r_hi) * np.exp(1j * rng.uniform(0.0, math.pi / 2))


# ---------------------------------------------------------------------------------------

@_timed
def check_parameter_identities(n: int = 10_000, seed: int = 7, tol: float = 1e-12) -> Check:
    """Root/weight identities for random first-quadrant c with |c| < 10."""
    rng = np.random.default_rng(seed)
    cs = []
    while len(cs) < n:
        c = _first_quadrant(rng, 0.0, 10.0)
        if min(abs(c - 4), abs(c + 4)) > 1e-6:
            cs.append(c)
    errs = dict(sum_AB=0.0, prod_AB=0.0, alpha_beta=0.0, delta_alpha=0.0, prod_DE=0.0)
    for c in cs:
        p, q = family1_params(c), family2_params(c)
        scale = max(1.0, abs(c))
        errs["sum_AB"] = max(errs["sum_AB"], abs(p.A + p.B - c) / scale)
        errs["prod_AB"] = max(errs["prod_AB"], abs(p.A * p.B - 4) / 4)
        errs["alpha_beta"] = max(errs["alpha_beta"], abs(p.alpha + p.beta - 1))
        errs["delta_alpha"] = max(errs["delta_alpha"], abs(q.delta - complex(alpha_of(-1j * c))))
        errs["prod_DE"] = max(errs["prod_DE"], abs(q.D * q.E + 4) / 4)
    worst = max(errs.values())
    return Check("parameter identities", worst, tol, worst <= tol, details={"n": n, **errs})


@_timed
def check_disk_map(n: int = 100, seed: int = 7, cfg: RunConfig | None = None,
                       tol: float = 1e-6) -> Check:
    """Flow of c = 3 sqrt 2 against the closed-form map z + 2/(z - 2 sqrt 2)."""
    cfg = cfg or RunConfig()
    rng = np.random.default_rng(seed)
    z = []
    while len(z) < n:
        w = complex(rng.uniform(-2, 8), rng.uniform(-4, 4))
        if abs(w - 2 * R2) > R2 + 0.1:
            z.append(w)
    z = np.array(z)
    res = flow_points(z, Driver.sqrt_one_minus_t(3 * R2), 1 - 1e-9, cfg)
    exact = z + 2 / (z - 2 * R2)
    err = float(np.max(np.abs(res.g - exact) / np.abs(exact)))
    ok = err <= tol and bool(np.all(res.status == ALIVE))
    return Check("disk map", err, tol, ok, details={"n": n, "alive": int(np.sum(res.status == ALIVE))})


@_timed
def check_disk_hull(nx: int = 300, ny: int = 200, workers: int | None = None,
                        cfg: RunConfig | None = None) -> Check:
    """Capture grid at T = 1 against the disk |z - 2 sqrt 2| <= sqrt 2."""
    cfg = cfg or RunConfig()
    d = Driver.sqrt_one_minus_t(3 * R2)
    g = hull_grid(d, 1.0, (0.0, 6.0, -2.0, 2.0), nx, ny, cfg, workers=workers)
    h = hausdorff(g.captured_points(), disk_points(2 * R2, R2, g.cell_diag / 4))
    tol = 2 * g.cell_diag
    return Check("disk hull grid", h, tol, h <= tol,
                 details={"nx": nx, "ny": ny, "cell_diag": g.cell_diag,
                          "unknown_fraction": g.unknown_fraction()})


@_timed
def check_disk_right_hull(n: int = 10_000, tol: float = 1e-3) -> Check:
    """R_1 from the dual driver against the segment [0, 4 sqrt 2]."""
    rh = right_hull(Driver.sqrt_one_minus_t(3 * R2), 1.0, n=n)
    h = hausdorff(rh.points, segment_points(0, 4 * R2, 4 * n))
    return Check("disk right hull", h, tol, h <= tol, details={"samples": n})


@_timed
def check_segment_hull(times=(0.1, 0.25, 0.5, 1.0), n_zip: int = 64, tol: float = 1e-10) -> Check:
    """Closed-form hull of 3 sqrt 2 i sqrt t, and the zipper at n pieces against it."""
    c = 3j * R2
    seg_err = 0.0
    for t in times:
        h = sqrt_t_hull(c, t)
        exact = 4j * math.sqrt(2 * t)
        if h.count != 1:
            seg_err = math.inf
            break
        a, b = h.segments[0]
        seg_err = max(seg_err, abs(a), abs(b - exact))
    d = Driver.sqrt_tau_plus_t(c, 0.0)
    ts = np.linspace(0.0, 1.0, 101)
    up, lo = zipper_trace(d, n_zip, 1.0, times=ts)
    exact = 4j * np.sqrt(2 * ts)
    # delta = -1 here, so both tips run along the same segment
    zip_err = float(max(np.max(np.abs(up.z - exact)), np.max(np.abs(lo.z - exact))))
    one = zipper_trace(d, 1, 1.0, times=ts)[0]
    n1_err = float(np.max(np.abs(one.z - up.z)))
    worst = max(seg_err, zip_err, n1_err)
    return Check("segment hull", worst, tol, worst <= tol,
                 details={"closed_form": seg_err, "zipper_vs_exact": zip_err, "zipper_n1_vs_n": n1_err,
                          "n": n_zip})


@_timed
def check_phase_boundary(samples: int = 180) -> Check:
    """Minimum |c| on Re(alpha) = 0 and the boundary point near 3.687 + 0.511i."""
    pb = phase_boundary(samples)
    pol = polished_boundary_point(BOUNDARY_GUESS)
    e_min = abs(pb.min_modulus - 3.722)
    e_pt = abs(pol - BOUNDARY_GUESS)
    ok = e_min <= 1e-3 and e_pt <= 1e-2
    return Check("phase boundary", e_min, 1e-3, ok,
                 details={"min_modulus": pb.min_modulus, "min_point": pb.min_point,
                          "polished": pol, "polished_distance": e_pt, "coverage": pb.coverage})


def _endpoint_sample(n, seed):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        c = _first_quadrant(rng, 0.5, 10.0)
        if abs(c - 4) < 0.05:
            continue
        if abs(classify_phase(c).re_alpha) <= 0.05:
            continue
        out.append(c)
    return out


def _rate_exponents(p, up, lo, target, t_end):
    """Measured and predicted exponents of |z_t - root| ~ (1 - t)^k between 1 - 100(1 - t_end) and t_end.

    The predicted exponent is Re 1/(2w), w the weight of the root (alpha for A, beta for B).
    """
    t0 = 1 - 100 * (1 - t_end)
    out = []
    for tr, root in ((up, target), (lo, p.B)):
        w = p.alpha if root == p.A else p.beta
        d0, d1 = abs(complex(tr.at(t0)) - root), abs(tr.z[-1] - root)
        out.append((math.log(d0 / d1) / math.log(100.0), (1 / (2 * w)).real))
    return out


@_timed
def check_endpoints(n: int = 200, seed: int = 7, t_end: float = 1 - 1e-8, tol: float = 1e-3,
                    samples: int = 400, cfg: RunConfig | None = None) -> Check:
    """Traced tips at ``t_end``: upper near A iff Re(alpha) > 0 (else B), lower near B.

    Failing cases carry the measured and predicted approach exponents, which separate a
    slow but correct approach from a tracing error.
    """
    cfg = cfg or RunConfig()
    worst, bad, wrong_root, consistent = 0.0, [], 0, 0
    for c in _endpoint_sample(n, seed):
        p = family1_params(c)
        up, lo = trace_tips_family1(c, family1_grid(samples, t_end), cfg, on_self_hit="stop")
        target = p.A if p.alpha.real > 0 else p.B
        e = max(abs(up.z[-1] - target), abs(lo.z[-1] - p.B))
        other = p.B if target == p.A else p.A
        if abs(up.z[-1] - other) < abs(up.z[-1] - target) or abs(lo.z[-1] - p.A) < abs(lo.z[-1] - p.B):
            wrong_root += 1
        worst = max(worst, e)
        if e > tol:
            rates = _rate_exponents(p, up, lo, target, t_end)
            ok_rate = all(abs(m - k) < 0.05 for m, k in rates)
            consistent += ok_rate
            bad.append({"c": c, "distance": e, "re_alpha": p.alpha.real,
                        "exponents_measured": [m for m, _ in rates],
                        "exponents_predicted": [k for _, k in rates]})
    return Check("endpoint theorem", worst, tol, not bad,
                 details={"n": n, "failures": len(bad), "nearest_root_wrong": wrong_root,
                          "failures_with_predicted_rate": consistent,
                          "worst_cases": sorted(bad, key=lambda b: -b["distance"])[:10]})


@_timed
def check_spiral(c=SPIRAL_C, t_end: float = 1 - 1e-6, turns: float = 2.0, samples: int = 4000,
                 cfg: RunConfig | None = None) -> Check:
    """Unwound turns of the upper trace about A and the lower trace about B."""
    cfg = cfg or RunConfig()
    p = family1_params(c)
    up, lo = trace_tips_family1(c, family1_grid(samples, t_end), cfg)
    wa = spiral_diagnostics(up, p.A).winding
    wb = spiral_diagnostics(lo, p.B).winding
    least = min(abs(wa), abs(wb))
    return Check("spiral turns", least, turns, least >= turns,
                 details={"c": complex(c), "t_end": t_end, "turns_about_A": wa, "turns_about_B": wb})


def transition_points():
    pts = [polished_boundary_point(BOUNDARY_GUESS)]
    for th in TRANSITION_RAYS:
        pts.append(min(boundary_on_ray(th), key=abs))
    return pts


@_timed
def check_transition(tol: float = 1e-3, cfg: RunConfig | None = None) -> Check:
    """Self-hit time of the traced tip against 1 - exp(-4 pi Im alpha) on the boundary."""
    cfg = cfg or RunConfig()
    rows = [critical_time_check(c, cfg).to_dict() for c in transition_points()]
    worst = max(r["gap"] for r in rows)
    return Check("critical time", worst, tol, worst <= tol, details={"points": rows})


def oracle_sample(seed: int = 7):
    """Ten random first-quadrant c, five from each open phase."""
    rng = np.random.default_rng(seed)
    pos, neg = [], []
    while len(pos) < 5 or len(neg) < 5:
        c = _first_quadrant(rng, 1.0, 8.0)
        if abs(c - 4) < 0.1:
            continue
        ra = classify_phase(c).re_alpha
        if ra > 1e-2 and len(pos) < 5:
            pos.append(c)
        elif ra < -1e-2 and len(neg) < 5:
            neg.append(c)
    return pos + neg


def _zipper_gap(c, n, t_end, cfg):
    up, lo = trace_tips_family1(c, family1_grid(2000, t_end), cfg, on_self_hit="stop")
    ts = up.t if len(up.t) <= len(lo.t) else lo.t
    d = Driver.sqrt_one_minus_t(c, float(ts[-1]))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LipGuardExceeded)
        zu, zl = zipper_trace(d, n, times=ts)
    e = max(np.max(np.abs(zu.z - up.at(ts))), np.max(np.abs(zl.z - lo.at(ts))))
    return {"c": complex(c), "sup": float(e), "t_end": float(ts[-1])}


@_timed
def check_zipper_oracle(n: int = 10_000, seed: int = 7, t_end: float = 1 - 1e-6, tol: float = 1e-2,
                        cs=None, boundary: bool = True, cfg: RunConfig | None = None) -> Check:
    """Zipper curves against implicit-equation traces on ``[0, t_end]``.

    With ``boundary`` the two boundary points are compared too, up to their self-hit
    time, and reported without entering the verdict.
    """
    cfg = cfg or RunConfig()
    rows = [_zipper_gap(c, n, t_end, cfg) for c in (cs if cs is not None else oracle_sample(seed))]
    worst = max(r["sup"] for r in rows)
    details = {"n": n, "cases": rows}
    if boundary:
        details["boundary_points"] = [_zipper_gap(c, n, t_end, cfg) for c in transition_points()[:2]]
    return Check("zipper vs tracer", worst, tol, worst <= tol, details=details)


def property_tuples(count: int = 20, seed: int = 7):
    """Seeded (property, driver, kwargs) triples, cycling through the five identities."""
    rng = np.random.default_rng(seed)
    props = list(Property)
    out = []
    k = 0
    while len(out) < count:
        c = _first_quadrant(rng, 1.0, 6.0)
        if abs(c - 4) < 0.2 or abs(classify_phase(c).re_alpha) < 1e-2:
            continue
        prop = props[k % len(props)]
        if k % 2 == 0 or prop is Property.CONCATENATION:
            T = float(rng.uniform(0.4, 1.0))
            d = Driver.sqrt_one_minus_t(c).restrict(T)
        else:
            d = Driver.sqrt_tau_plus_t(c, float(rng.uniform(0.2, 1.0)))
            T = 1.0
        if prop is Property.TRANSLATION:
            kw = {"a": complex(rng.normal(), rng.normal())}
        elif prop is Property.SCALING:
            kw = {"a": float(rng.uniform(0.5, 3.0))}
        elif prop is Property.REFLECTION:
            kw = {"axis": [Axis.REAL, Axis.IMAG, Axis.BOTH][k % 3].value}
        elif prop is Property.DUALITY:
            kw = {"t": T}
        else:
            t = float(rng.uniform(0.2, 0.6)) * T
            kw = {"t": t, "s": float(rng.uniform(0.3, 1.0)) * (T - t)}
        out.append((prop, d, kw))
        k += 1
    return out


@_timed
def check_property(prop, d: Driver, cfg: RunConfig | None = None, n: int = 3000, **kw) -> Check:
    cfg = cfg or RunConfig()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LipGuardExceeded)
        rep = verify_property(prop, d, cfg, n=n, **kw)
    return Check(f"property {rep.property.value}", rep.hausdorff, cfg.property_tol, rep.passed,
                 details=rep.params)


def check_disc_picture(cfg: RunConfig | None = None) -> Check:
    chk = check_property(Property.CONCATENATION, Driver.sqrt_one_minus_t(3 * R2), cfg, t=0.5, s=0.5)
    chk.name = "property Concatenation (disc picture)"
    return chk


@_timed
def check_accessible(n: int = 50, seed: int = 7, cfg: RunConfig | None = None) -> Check:
    """Accessible-point count of L_1 against the segment count of the dual sqrt t hull."""
    cfg = cfg or RunConfig()
    rng = np.random.default_rng(seed)
    mismatches, rows = 0, 0
    counts = {1: 0, 2: 0}
    while rows < n:
        c = rng.uniform(0.5, 8.0) * np.exp(1j * rng.uniform(-math.pi, math.pi))
        if min(abs(c - 4), abs(c + 4)) < 0.1 or abs(classify_phase(c).re_alpha) < 1e-3:
            continue
        h = time1_hull(c, samples=600, oracle_fraction=0.0, cfg=cfg)
        try:
            k = accessible_point_count(h)
        except InconsistentPhase:
            k = 2 if h.kind is HullKind.SIMPLE_ARC else 1
        dual = sqrt_t_hull(-1j * c).count
        want = segment_count_sign(-1j * c)
        if not (k == dual == want):
            mismatches += 1
        counts[k] += 1
        rows += 1
    return Check("accessible points", float(mismatches), 0.0, mismatches == 0,
                 details={"n": n, "counts": {str(k): v for k, v in counts.items()}})


# ---------------------------------------------------------------------------------------

def suite_checks(name: str, cfg: RunConfig):
    if name == "examples":
        return [lambda: check_disk_map(cfg=cfg),
                lambda: check_disk_hull(cfg.grid_nx, cfg.grid_ny, cfg.threads or None, cfg),
                check_disk_right_hull, check_segment_hull]
    if name == "endpoints":
        return [lambda: check_endpoints(seed=cfg.seed, cfg=cfg), lambda: check_spiral(cfg=cfg),
                lambda: check_accessible(seed=cfg.seed, cfg=cfg)]
    if name == "transition":
        return [check_phase_boundary, lambda: check_transition(cfg.tc_tol, cfg)]
    if name == "properties":
        return ([lambda p=p, d=d, kw=kw: check_property(p, d, cfg, **kw)
                 for p, d, kw in property_tuples(seed=cfg.seed)] + [lambda: check_disc_picture(cfg)])
    if name == "params":
        return [lambda: check_parameter_identities(seed=cfg.seed)]
    if name == "oracle":
        return [lambda: check_zipper_oracle(cfg.zipper_steps, cfg.seed, cfg=cfg)]
    raise ValueError(f"unknown suite {name!r}")


SUITES = ("params", "examples", "transition", "endpoints", "oracle", "properties")


def run_suite(name: str, cfg: RunConfig | None = None, echo=None) -> dict:
    """Run a suite (or ``all``) and return the JSON-ready report."""
    cfg = cfg or RunConfig()
    names = SUITES if name == "all" else (name,)
    checks = []
    for nm in names:
        for fn in suite_checks(nm, cfg):
            chk = fn()
            if echo:
                echo(chk.line())
            checks.append(dict(chk.to_dict(), suite=nm))
    return report("verify", {"suite": name, "seed": cfg.seed, "passed": all(c["passed"] for c in checks),
                             "checks": checks})
