"""Family-level checks: time-1 hulls, critical times, spirals, accessible points and the
five hull identities (translation, scaling, reflection, concatenation, duality)."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .config import RunConfig
from .driver import Axis, Driver, Form
from .errors import InconsistentPhase, NoSelfHit
from .flow import ALIVE, CAPTURED, flow_points, right_hull
from .geometry import densify, hausdorff, nearest_distance, points_in_polygon, unwound_argument
from .params import PhaseKind, alpha_of, classify_phase, critical_time, family1_params, to_first_quadrant
from .trace import (LOWER, UPPER, HullTrace, family1_grid, left_hull, sqrt_t_hull,
                    trace_driver, trace_tips_family1, zipper_trace)


class HullKind(str, enum.Enum):
    SIMPLE_ARC = "SimpleArc"
    LOOP_WITH_INTERIOR = "LoopWithInterior"
    LOOP_WITH_TAIL = "LoopWithTail"


def _cj(z):
    return None if z is None else [complex(z).real, complex(z).imag]


@dataclass
class Time1Hull:
    kind: HullKind
    c: complex
    A: complex
    B: complex
    phase: object
    upper: HullTrace
    lower: HullTrace
    endpoints: tuple = ()
    loop: np.ndarray = field(default_factory=lambda: np.empty(0, complex))
    interior: np.ndarray = field(default_factory=lambda: np.empty(0, complex))
    tail: np.ndarray = field(default_factory=lambda: np.empty(0, complex))
    hit_point: complex | None = None
    t_hit: float | None = None
    oracle_checked: int = 0
    oracle_captured: int = 0

    @property
    def points(self) -> np.ndarray:
        return np.concatenate([self.upper.z, self.lower.z, self.interior])

    def to_dict(self) -> dict:
        out = {"kind": self.kind.value, "c": _cj(self.c), "A": _cj(self.A), "B": _cj(self.B),
               "phase": self.phase.as_dict(), "endpoints": [_cj(e) for e in self.endpoints],
               "upper": self.upper.summary(), "lower": self.lower.summary(),
               "loop_points": int(len(self.loop)), "interior_points": int(len(self.interior)),
               "tail_points": int(len(self.tail)),
               "oracle_checked": self.oracle_checked, "oracle_captured": self.oracle_captured}
        if self.kind is HullKind.LOOP_WITH_TAIL:
            out.update(hit_point=_cj(self.hit_point), t_hit=self.t_hit,
                       t_formula=critical_time(self.phase.im_alpha))
        return out


def _reflector(c):
    """Maps taking the hull of the first-quadrant image of ``c`` back to that of ``c``.

    Returns ``(f, swap)``: apply ``f`` pointwise and swap upper/lower when ``swap``.
    """
    c = complex(c)
    fx, fy = c.real < 0, c.imag < 0

    def f(z):
        z = np.asarray(z, dtype=complex)
        if fx:
            z = -np.conj(z)
        if fy:
            z = np.conj(z)
        return z
    return f, fy


def time1_hull(c, samples: int | None = None, interior_density: int = 60,
               oracle_fraction: float = 0.05, cfg: RunConfig | None = None,
               t_end: float = 1 - 1e-8, t_grid=None) -> Time1Hull:
    """Assemble ``L_1`` for ``c sqrt(1 - t)`` according to the phase of ``c``.

    The computation runs on the first-quadrant image of ``c`` and is reflected back.
    Loop interiors are filled with an ``interior_density``-square lattice by the
    even-odd rule; a random ``oracle_fraction`` of them is flowed to ``t = 1``.
    """
    cfg = cfg or RunConfig()
    c = complex(c)
    phase = classify_phase(c, cfg.phase_tol)
    c1 = to_first_quadrant(c)
    p = family1_params(c1)
    grid = family1_grid(samples or cfg.trace_samples, t_end) if t_grid is None else t_grid
    up, lo = trace_tips_family1(c1, grid, cfg, on_self_hit="stop")
    f, swap = _reflector(c)
    up, lo = up.mapped(f), lo.mapped(f)
    if swap:
        up, lo = lo.mapped(lambda z: z, side=UPPER), up.mapped(lambda z: z, side=LOWER)
    A, B = complex(f(p.A)), complex(f(p.B))
    hit_tr = up if up.hit_point is not None else (lo if lo.hit_point is not None else None)

    def nearest(z):
        return "A" if abs(z - A) < abs(z - B) else "B"

    if phase.kind is PhaseKind.TRANSITIONAL:
        if hit_tr is None:
            raise InconsistentPhase(f"transitional c = {c} but no self-hit was detected")
        other = lo if hit_tr is up else up
        hull = Time1Hull(HullKind.LOOP_WITH_TAIL, c, A, B, phase, up, lo,
                         endpoints=(complex(other.z[-1]),), loop=hit_tr.z.copy(),
                         tail=other.z.copy(), hit_point=hit_tr.hit_point, t_hit=hit_tr.hit_time)
        return hull
    if hit_tr is not None:
        raise InconsistentPhase(f"c = {c} in phase {phase.kind.value} returned to its start")
    ends = (complex(up.z[-1]), complex(lo.z[-1]))
    # "upper" is the side that carries A; after reflection that may be either curve
    labels = sorted(nearest(e) for e in ends)
    if phase.kind is PhaseKind.POSITIVE:
        if labels != ["A", "B"]:
            raise InconsistentPhase(f"c = {c}: expected an arc from A to B, got ends {labels}")
        return Time1Hull(HullKind.SIMPLE_ARC, c, A, B, phase, up, lo, endpoints=ends)
    if labels != ["B", "B"]:
        raise InconsistentPhase(f"c = {c}: expected a loop closing at B, got ends {labels}")
    loop = np.concatenate([up.z, lo.z[::-1]])
    x0, x1, y0, y1 = loop.real.min(), loop.real.max(), loop.imag.min(), loop.imag.max()
    X, Y = np.meshgrid(np.linspace(x0, x1, interior_density), np.linspace(y0, y1, interior_density))
    cand = (X + 1j * Y).ravel()
    interior = cand[points_in_polygon(cand, loop)]
    hull = Time1Hull(HullKind.LOOP_WITH_INTERIOR, c, A, B, phase, up, lo, endpoints=ends,
                     loop=loop, interior=interior)
    if oracle_fraction > 0 and len(interior):
        rng = np.random.default_rng(cfg.seed)
        m = max(1, int(round(oracle_fraction * len(interior))))
        sub = rng.choice(interior, size=m, replace=False)
        res = flow_points(sub, Driver.sqrt_one_minus_t(c), 1.0, cfg)
        hull.oracle_checked = m
        hull.oracle_captured = int(np.sum(res.status == CAPTURED))
        if hull.oracle_captured < 0.9 * m:
            raise InconsistentPhase(
                f"only {hull.oracle_captured}/{m} loop-interior samples are captured by t = 1")
    return hull


@dataclass(frozen=True)
class CriticalTimeCheck:
    c: complex
    t_hit: float
    t_formula: float
    gap: float
    hit_point: complex

    def to_dict(self) -> dict:
        return {"c": _cj(self.c), "t_hit": self.t_hit, "t_formula": self.t_formula,
                "gap": self.gap, "hit_point": _cj(self.hit_point)}


def critical_time_check(c, cfg: RunConfig | None = None, samples: int | None = None) -> CriticalTimeCheck:
    """Compare the traced return time of the tip to ``c`` with ``1 - exp(-4 pi Im alpha)``."""
    cfg = cfg or RunConfig()
    c1 = to_first_quadrant(c)
    a = complex(alpha_of(c1))
    if abs(a.real) >= 1e-8:
        raise ValueError(f"c = {c} is not on the phase boundary (Re alpha = {a.real:.3g})")
    up, lo = trace_tips_family1(c1, family1_grid(samples or cfg.trace_samples, 1 - 1e-8), cfg,
                                on_self_hit="stop")
    tr = up if up.hit_point is not None else lo
    if tr.hit_point is None:
        raise NoSelfHit(f"no return to c = {c} before t = 1 - 1e-8")
    tf = critical_time(a.imag)
    f, _ = _reflector(c)
    return CriticalTimeCheck(complex(c), tr.hit_time, tf, abs(tr.hit_time - tf), complex(f(tr.hit_point)))


@dataclass
class SpiralDiagnostics:
    center: complex
    argument: np.ndarray
    winding: float
    endpoint_distance: float
    tail_monotone: bool

    def to_dict(self) -> dict:
        return {"center": _cj(self.center), "winding": self.winding,
                "endpoint_distance": self.endpoint_distance, "tail_monotone": self.tail_monotone}


def spiral_diagnostics(trace: HullTrace, center, t_max: float | None = None,
                       tail_fraction: float = 0.25) -> SpiralDiagnostics:
    """Unwound argument of ``z_t - center`` and the number of turns it makes.

    ``tail_monotone`` reports whether the argument is monotone over the last
    ``tail_fraction`` of the samples.
    """
    center = complex(center)
    keep = slice(None) if t_max is None else trace.t <= t_max
    z = trace.z[keep]
    arg = unwound_argument(z, center)
    m = max(2, int(len(arg) * tail_fraction))
    d = np.diff(arg[-m:])
    mono = bool(np.all(d >= -1e-12) or np.all(d <= 1e-12))
    return SpiralDiagnostics(center, arg, float((arg[-1] - arg[0]) / (2 * math.pi)),
                             float(abs(z[-1] - center)), mono)


def accessible_point_count(hull: Time1Hull) -> int:
    """Number of points of ``L_1`` added at time 1 and reachable from outside.

    Cross-checked against the segment count of the dual hull of ``-ic sqrt(t)``.
    """
    n = 2 if hull.kind is HullKind.SIMPLE_ARC else 1
    dual = sqrt_t_hull(-1j * hull.c, 1.0).count
    if dual != n:
        raise InconsistentPhase(f"accessible points {n} but the dual hull has {dual} segments")
    return n


# ---------------------------------------------------------------------------------------
# hull identities

class Property(str, enum.Enum):
    TRANSLATION = "Translation"
    SCALING = "Scaling"
    REFLECTION = "Reflection"
    CONCATENATION = "Concatenation"
    DUALITY = "Duality"


@dataclass
class PropertyReport:
    property: Property
    hausdorff: float
    passed: bool
    params: dict

    def to_dict(self) -> dict:
        return {"property": self.property.value, "hausdorff": self.hausdorff,
                "passed": self.passed, "params": self.params}


CLOUD_SPACING = 1e-3


def _curve_cloud(z, spacing: float = CLOUD_SPACING, refine_tip: bool = False) -> np.ndarray:
    """Densified polyline; with ``refine_tip`` extra points crowd geometrically toward the
    last sample, where the forward map behaves like a square root."""
    z = densify(np.asarray(z, complex), spacing)
    if refine_tip and len(z) > 1:
        g = np.union1d(np.geomspace(1e-10, 1.0, 80), np.linspace(0.0, 1.0, 41)[1:])
        z = np.concatenate([z[:-1], z[-1] + (z[-2] - z[-1]) * g[::-1], z[-1:]])
    return z


def _cloud(curves, extra=()) -> np.ndarray:
    parts = [_curve_cloud(c) for c in curves]
    parts += [np.asarray(e, complex).ravel() for e in extra]
    return np.concatenate(parts)


def _zipper_cloud(d: Driver, n: int) -> np.ndarray:
    up, lo = zipper_trace(d, n)
    return _cloud([up.z, lo.z])


def _hull_cloud(h) -> np.ndarray:
    return _cloud([c.z for c in h.curves], [h.fill, h.extra])


def _traced_cloud(d: Driver, n: int, cfg) -> np.ndarray:
    return _hull_cloud(left_hull(d, n=n, cfg=cfg))


def _side_points(curves, eps: float):
    """Points a distance ``eps`` either side of densified curves, skipping the endpoints."""
    out = []
    for z in curves:
        z = _curve_cloud(z, refine_tip=True)
        if len(z) < 3:
            continue
        tan = np.gradient(z)
        nrm = 1j * tan / np.maximum(np.abs(tan), 1e-300)
        mid = z[1:-1]
        out += [mid + eps * nrm[1:-1], mid - eps * nrm[1:-1]]
    return np.concatenate(out) if out else np.empty(0, complex)


def verify_property(prop, d: Driver, cfg: RunConfig | None = None, n: int = 3000, **kw) -> PropertyReport:
    """Compute both sides of a hull identity with separate pipelines and compare them.

    Translation / Scaling / Reflection: zipper on the transformed driver against the
    transformed implicit trace of ``d``.  Duality: the forward flow of points just off
    ``L_T`` (which lands on the boundary of ``R_T``) against ``i`` times the traced hull of
    the dual driver.  Concatenation: the flow of hull points added after ``t`` against the
    hull of ``lambda(t + .)`` with the part lying on ``R_t`` removed.
    """
    prop = Property(prop)
    cfg = cfg or RunConfig()
    tol = kw.pop("tol", cfg.property_tol)
    params = {"driver": d.describe(), **{k: (_cj(v) if isinstance(v, complex) else v) for k, v in kw.items()}}
    if prop is Property.TRANSLATION:
        a = complex(kw.get("a", 1 + 1j))
        lhs = _zipper_cloud(d.translate(a), n)
        rhs = _traced_cloud(d, n, cfg) + a
    elif prop is Property.SCALING:
        a = float(kw.get("a", 2.0))
        lhs = _zipper_cloud(d.rescale(a), n)
        rhs = a * _traced_cloud(d, n, cfg)
    elif prop is Property.REFLECTION:
        axis = Axis(kw.get("axis", Axis.REAL))
        f = {Axis.REAL: np.conj, Axis.IMAG: lambda z: -np.conj(z), Axis.BOTH: lambda z: -z}[axis]
        lhs = _zipper_cloud(d.reflect(axis), n)
        rhs = f(_traced_cloud(d, n, cfg))
    elif prop is Property.DUALITY:
        T = float(kw.get("t", d.horizon))
        eps = float(kw.get("eps", 1e-9))
        dt = d.restrict(T)
        # the image of the curve near its tip opens like a square root around lambda(T)
        near_T = T * (1 - np.geomspace(1e-12, 1e-2, 200))
        up, lo = left_hull(dt, n=n, cfg=cfg, extra_times=near_T).curves[:2]
        seeds = _side_points([up.z, lo.z], eps)
        fcfg = cfg.updated(capture_radius=min(cfg.capture_radius, 1e-9))
        res = flow_points(seeds, dt, T, fcfg)
        lhs = res.g[res.status == ALIVE]
        rhs = _hull_cloud(right_hull(dt, T, n=n))
        params["flowed_alive"] = int(len(lhs))
    elif prop is Property.CONCATENATION:
        t = float(kw["t"])
        s = float(kw["s"])
        if not (t > 0 and s > 0 and t + s <= d.horizon * (1 + 1e-12)):
            raise ValueError("concatenation needs t, s > 0 with t + s <= T")
        lhs, rhs, extra = _concatenation_sides(d, t, s, n, cfg, kw.get("fill_spacing", 0.01))
        params.update(extra)
    h = hausdorff(lhs, rhs)
    return PropertyReport(prop, h, bool(h <= tol), params)


def _lattice_inside(loop, spacing: float) -> np.ndarray:
    x0, x1, y0, y1 = loop.real.min(), loop.real.max(), loop.imag.min(), loop.imag.max()
    X, Y = np.meshgrid(np.arange(x0, x1, spacing), np.arange(y0, y1, spacing))
    cand = (X + 1j * Y).ravel()
    return cand[points_in_polygon(cand, loop)]


def _push_lattice(loop, d: Driver, t: float, spacing: float, target: float, cfg: RunConfig,
                  levels: int = 4) -> np.ndarray:
    """Forward images at time ``t`` of a lattice filling ``loop``.

    Cells whose corner images are more than ``target`` apart are split in four, up to
    ``levels`` times, so the image cloud is about as dense as a ``target`` lattice.
    """
    x0, y0 = loop.real.min(), loop.imag.min()
    nx = int(np.ceil((loop.real.max() - x0) / spacing)) + 1
    ny = int(np.ceil((loop.imag.max() - y0) / spacing)) + 1
    X, Y = np.meshgrid(x0 + spacing * np.arange(nx), y0 + spacing * np.arange(ny))
    Z = X + 1j * Y

    def push(pts):
        g = np.full(pts.shape, np.nan + 0j)
        inside = points_in_polygon(pts.ravel(), loop).reshape(pts.shape)
        if inside.any():
            r = flow_points(pts[inside], d, t, cfg)
            g[inside] = np.where(r.status == ALIVE, r.g, np.nan)
        return g

    G = push(Z)
    images = [G[np.isfinite(G)]]
    # cells as (lower-left corner, four corner images)
    corners = Z[:-1, :-1].ravel()
    quad = np.stack([G[:-1, :-1].ravel(), G[:-1, 1:].ravel(), G[1:, 1:].ravel(), G[1:, :-1].ravel()], 1)
    h = spacing
    for _ in range(levels):
        with np.errstate(invalid="ignore"):
            edges = np.abs(quad - np.roll(quad, 1, axis=1))
        stretch = np.nanmax(np.where(np.isfinite(edges), edges, -1.0), axis=1)
        sel = stretch > target
        if not sel.any():
            break
        h = h / 2
        base = corners[sel]
        offs = h * np.array([0, 1, 2, 0, 1, 2, 0, 1, 2]) + 1j * h * np.array([0, 0, 0, 1, 1, 1, 2, 2, 2])
        sub = base[:, None] + offs[None, :]
        Gs = push(sub)
        images.append(Gs[np.isfinite(Gs)])
        # 3x3 points -> four sub-cells
        idx = [(0, 1, 4, 3), (1, 2, 5, 4), (3, 4, 7, 6), (4, 5, 8, 7)]
        corners = np.concatenate([sub[:, a] for a, *_ in idx])
        quad = np.concatenate([Gs[:, list(q)] for q in idx])
    return np.concatenate(images)


def _concatenation_sides(d: Driver, t: float, s: float, n: int, cfg: RunConfig, spacing: float):
    T = min(t + s, d.horizon)
    # resolve the curve just after t: its image leaves lambda(t) like a square root
    near_t = t + np.concatenate([[0.0], np.geomspace(1e-12, 1e-2, 200)]) * (T - t)
    full = left_hull(d, T, n=n, cfg=cfg, extra_times=near_t)
    pts = [_curve_cloud(c.z[c.t > t]) for c in full.curves]
    if full.kind == "loop":
        # interior points are only captured at T, so all are still present at t
        loop = np.concatenate([full.curves[0].z, full.curves[1].z[::-1]])
    fcfg = cfg.updated(capture_radius=min(cfg.capture_radius, 1e-9))
    res = flow_points(np.concatenate(pts), d, t, fcfg)
    image = res.g[res.status == ALIVE]
    if full.kind == "loop":
        image = np.concatenate([image, _push_lattice(loop, d, t, spacing, spacing, fcfg)])
        # around the tips of L_t the forward map opens like a square root
        tips = [c.z[np.argmin(np.abs(c.t - t))] for c in full.curves]
        r = np.geomspace(1e-12, 0.05, 120)
        th = np.linspace(0, 2 * np.pi, 96, endpoint=False)
        ring = (r[:, None] * np.exp(1j * th)[None, :]).ravel()
        polar = np.concatenate([tip + ring for tip in tips])
        polar = polar[points_in_polygon(polar, loop)]
        rp = flow_points(polar, d, t, fcfg)
        image = np.concatenate([image, rp.g[rp.status == ALIVE]])

    sh = left_hull(d.shift(t).restrict(T - t), n=n, cfg=cfg)
    rhs = _hull_cloud(sh)
    if sh.kind == "loop":
        loop = np.concatenate([sh.curves[0].z, sh.curves[1].z[::-1]])
        rhs = np.concatenate([rhs, _lattice_inside(loop, spacing * math.sqrt((T - t) / T))])
    rt_pts = _hull_cloud(right_hull(d, t, n=n))
    eta = 2 * CLOUD_SPACING
    near = nearest_distance(rhs, rt_pts) <= eta
    rhs = rhs[~near]
    return image, rhs, {"image_points": int(len(image)), "removed_on_right_hull": int(near.sum()),
                        "right_hull_band": eta}


def concatenation_picture(d: Driver, t: float, s: float | None = None, n: int = 3000,
                          cfg: RunConfig | None = None, fill_spacing: float = 0.01):
    """Point clouds for the concatenation identity at ``t``.

    Returns ``(image, shifted_hull_minus_rt, right_hull_t)``.
    """
    cfg = cfg or RunConfig()
    s = d.horizon - t if s is None else s
    image, rhs, _ = _concatenation_sides(d, t, s, n, cfg, fill_spacing)
    return image, rhs, right_hull(d, t, n=n).points
