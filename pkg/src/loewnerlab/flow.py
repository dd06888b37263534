"""Forward integration of the complex Loewner equation ``dg/dt = 2 / (g - lambda(t))``.

Every seed point carries its own time and step size, so a whole raster is advanced in
lock-step numpy arrays; the result for a point does not depend on which batch it ran in.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import RunConfig
from .driver import Driver, Form
from .errors import StepUnderflow

ALIVE, CAPTURED, UNKNOWN = 0, 1, 2
STATUS_NAMES = {ALIVE: "Alive", CAPTURED: "Captured", UNKNOWN: "Unknown"}

# Integration stops this far (relative) before a sqrt(S - t) singularity.
SINGULAR_CAP = 1e-9
STEP_SAFETY = 0.5
ROUNDOFF = 1e-14
TIME_NOISE = 64 * np.finfo(float).eps


@dataclass
class FlowResult:
    z0: np.ndarray
    g: np.ndarray
    t: np.ndarray
    status: np.ndarray
    lifetime: np.ndarray  # T_z for captured points, inf otherwise


@dataclass
class FlowState:
    z0: complex
    g: complex
    t: float
    status: str
    lifetime: float | None
    trajectory: tuple | None = field(default=None, repr=False)  # (t array, g array)

    @property
    def captured(self) -> bool:
        return self.status == "Captured"


def _rk4(f, t, y, h):
    k1 = f(t, y)
    k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = f(t + h, y + h * k3)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4), k1


def _effective_horizon(d: Driver, T: float):
    """Integration end and, for sqrt(S - t) drivers run up to S, the distance eps left over."""
    if d.form is Form.SQRT_ONE_MINUS_T and T >= d.scale * (1 - SINGULAR_CAP):
        eps = d.scale * SINGULAR_CAP
        return d.scale - eps, eps
    return T, None


def capture_scale(d: Driver) -> float:
    """Bound k with |g_t(w) - lambda(t)| <= k sqrt(S - t) for points swallowed at t = S."""
    return 2.0 * abs(d.c) + 8.0


def flow_points(z, d: Driver, T: float | None = None, cfg: RunConfig | None = None,
                record: bool = False, max_iter: int = 200_000):
    """Flow many seeds at once.  Returns a :class:`FlowResult` (and a trajectory if ``record``).

    A point is Captured at the first accepted time where ``|g - lambda| <= capture_radius``.
    For ``c*sqrt(S - t)`` drivers integrated to ``S`` the run stops at ``S(1 - 1e-9)`` and
    the remaining capture at ``t = S`` is decided by ``|g - lambda| <= k sqrt(eps)``.
    """
    cfg = cfg or RunConfig()
    T = d.horizon if T is None else float(T)
    if T > d.horizon * (1 + 1e-12):
        raise ValueError("flow horizon exceeds the driver horizon")
    T = min(T, d.horizon)
    t_end, eps = _effective_horizon(d, T)

    z0 = np.atleast_1d(np.asarray(z, dtype=complex)).copy()
    n = z0.size
    g = z0.copy()
    t = np.zeros(n)
    status = np.full(n, ALIVE, dtype=np.int8)
    life = np.full(n, np.inf)
    lam0 = d.eval_unchecked(np.zeros(1))[0]
    start_cap = np.abs(g - lam0) <= cfg.capture_radius
    status[start_cap] = CAPTURED
    life[start_cap] = 0.0
    h = np.full(n, min(1e-3, t_end) if t_end > 0 else 0.0)
    tol = cfg.ode_tol
    traj_t, traj_g = ([0.0], [complex(g[0])]) if record else (None, None)

    def field_(tt, yy):
        return 2.0 / (yy - d.eval_unchecked(tt))

    active = np.nonzero(status == ALIVE)[0]
    it = 0
    while active.size and t_end > 0:
        it += 1
        if it > max_iter:
            status[active] = UNKNOWN
            break
        ta, ga, ha = t[active], g[active], h[active]
        lam = d.eval_unchecked(ta)
        dist = np.abs(ga - lam)
        hcap = STEP_SAFETY * dist * dist / 2.0
        ha = np.minimum(np.minimum(ha, hcap), t_end - ta)
        # keep the driver from moving more than a fraction of |g - lambda| in one step;
        # the squared ratio is exact for sqrt-type motion and conservative otherwise
        dlam = np.abs(d.eval_unchecked(ta + ha) - lam)
        ratio = STEP_SAFETY * dist / np.maximum(dlam, 1e-300)
        ha = ha * np.minimum(ratio, 1.0) ** 2
        speed = np.abs(d.eval_unchecked(ta + ha) - lam) / np.maximum(ha, 1e-300)
        under = (ha < cfg.min_step) & (t_end - ta > cfg.min_step)
        if np.any(under):
            status[active[under]] = UNKNOWN
            keep = ~under
            active, ta, ga, ha = active[keep], ta[keep], ga[keep], ha[keep]
            dist, speed = dist[keep], speed[keep]
            if not active.size:
                break
        with np.errstate(all="ignore"):
            full, _ = _rk4(field_, ta, ga, ha)
            half, _ = _rk4(field_, ta, ga, 0.5 * ha)
            two, _ = _rk4(field_, ta + 0.5 * ha, half, 0.5 * ha)
            err = np.abs(two - full) / 15.0
        # roundoff floor: never ask for more than the float resolution of g, nor than the
        # noise that rounding t passes into lambda(t) near a sqrt singularity
        tnoise = TIME_NOISE * np.maximum(ta, 1.0) * speed * 2.0 / (dist * dist)
        allow = (tol + np.minimum(tnoise, 1e300)) * ha + ROUNDOFF * np.abs(two)
        ok = np.isfinite(err) & (err <= allow)
        ynew = two + (two - full) / 15.0
        ok &= np.isfinite(ynew)
        # step-size update, exponent 1/4 for error per unit time of a 4th-order pair
        with np.errstate(all="ignore"):
            fac = np.where(err > 0, 0.9 * (allow / err) ** 0.25, 4.0)
        fac = np.where(np.isfinite(fac), np.clip(fac, 0.1, 4.0), 0.1)
        h[active] = ha * fac
        acc = active[ok]
        t[acc] = ta[ok] + ha[ok]
        g[acc] = ynew[ok]
        if record and ok[0]:
            traj_t.append(float(t[0]))
            traj_g.append(complex(g[0]))
        lam_new = d.eval_unchecked(t[acc])
        hit = np.abs(g[acc] - lam_new) <= cfg.capture_radius
        status[acc[hit]] = CAPTURED
        life[acc[hit]] = t[acc[hit]]
        active = active[status[active] == ALIVE]
        active = active[t[active] < t_end]

    if eps is not None:
        alive = np.nonzero(status == ALIVE)[0]
        lam_end = d.eval_unchecked(t[alive])
        late = np.abs(g[alive] - lam_end) <= capture_scale(d) * math.sqrt(eps)
        status[alive[late]] = CAPTURED
        life[alive[late]] = d.scale
    res = FlowResult(z0, g, t, status, life)
    if record:
        return res, (np.array(traj_t), np.array(traj_g))
    return res


def flow_point(z, d: Driver, T: float | None = None, cfg: RunConfig | None = None,
               trajectory: bool = False, raise_on_underflow: bool = True) -> FlowState:
    """Integrate a single seed; see :func:`flow_points`."""
    res, traj = flow_points([z], d, T, cfg, record=True)
    st = int(res.status[0])
    if st == UNKNOWN and raise_on_underflow:
        raise StepUnderflow(f"adaptive step underflow for z = {z} at t = {res.t[0]}")
    life = float(res.lifetime[0]) if st == CAPTURED else None
    return FlowState(complex(z), complex(res.g[0]), float(res.t[0]), STATUS_NAMES[st], life,
                     traj if trajectory else None)


# ---------------------------------------------------------------------------------------
@dataclass
class CaptureGrid:
    region: tuple          # (xmin, xmax, ymin, ymax)
    nx: int
    ny: int
    status: np.ndarray     # (ny, nx) int8
    lifetime: np.ndarray   # (ny, nx)
    horizon: float

    @property
    def x(self):
        x0, x1 = self.region[:2]
        return x0 + (np.arange(self.nx) + 0.5) * (x1 - x0) / self.nx

    @property
    def y(self):
        y0, y1 = self.region[2:]
        return y0 + (np.arange(self.ny) + 0.5) * (y1 - y0) / self.ny

    @property
    def centers(self) -> np.ndarray:
        X, Y = np.meshgrid(self.x, self.y)
        return X + 1j * Y

    @property
    def cell_diag(self) -> float:
        x0, x1, y0, y1 = self.region
        return math.hypot((x1 - x0) / self.nx, (y1 - y0) / self.ny)

    def captured_points(self) -> np.ndarray:
        return self.centers[self.status == CAPTURED]

    def unknown_fraction(self) -> float:
        return float(np.mean(self.status == UNKNOWN))


def _grid_chunk(args):
    pts, d, T, cfg = args
    r = flow_points(pts, d, T, cfg)
    return r.status, r.lifetime


def hull_grid(d: Driver, T: float | None = None, region=None, nx: int = 300, ny: int = 200,
              cfg: RunConfig | None = None, workers: int | None = None) -> CaptureGrid:
    """Brute-force left hull: flow every cell center and mark the captured ones.

    ``region`` defaults to the strip bound from :func:`hull_bounds` padded by
    ``2 sqrt(T)`` vertically.  Cells are independent; with ``workers > 1`` row blocks go to
    a process pool and are reassembled in order.
    """
    cfg = cfg or RunConfig()
    T = d.horizon if T is None else T
    if nx < 2 or ny < 2:
        raise ValueError("grid needs nx, ny >= 2")
    if region is None:
        (vx0, vx1), (hy0, hy1) = hull_bounds(d, T)
        pad = 2.2 * math.sqrt(T) + 0.1 * (vx1 - vx0 + hy1 - hy0)
        region = (vx0 - 0.05 - 0.05 * pad, vx1 + 0.05 + 0.05 * pad, hy0 - pad, hy1 + pad)
    x0, x1, y0, y1 = map(float, region)
    if not (x1 > x0 and y1 > y0):
        raise ValueError("degenerate region")
    grid = CaptureGrid((x0, x1, y0, y1), nx, ny, None, None, T)
    pts = grid.centers.ravel()
    workers = workers if workers is not None else (cfg.threads or os.cpu_count() or 1)
    if workers <= 1:
        r = flow_points(pts, d, T, cfg)
        status, life = r.status, r.lifetime
    else:
        chunks = np.array_split(pts, workers * 4)
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_grid_chunk, [(c, d, T, cfg) for c in chunks]))
        status = np.concatenate([p[0] for p in parts])
        life = np.concatenate([p[1] for p in parts])
    grid.status = status.reshape(ny, nx)
    grid.lifetime = life.reshape(ny, nx)
    return grid


def hull_bounds(d: Driver, T: float | None = None):
    """``((min Re lambda, max Re lambda), (min Im lambda, max Im lambda))`` over ``[0, T]``.

    The left hull lies in the vertical strip over the first interval, the right hull in
    the horizontal strip over the second.  Closed-form drivers are monotone in each
    coordinate, so the endpoints suffice.
    """
    T = d.horizon if T is None else T
    if d.is_closed_form:
        ts = np.array([0.0, T])
    else:
        ts = np.union1d(d.times[d.times <= T], [T])
    v = d.eval(ts)
    return (float(v.real.min()), float(v.real.max())), (float(v.imag.min()), float(v.imag.max()))


def right_hull(d: Driver, T: float | None = None, n: int = 2000, fill: int = 0):
    """Right hull ``R_T`` as the left hull of the dual driver rotated by ``i``."""
    from .trace import left_hull

    T = d.horizon if T is None else T
    dual = d.restrict(T).dual()
    hull = left_hull(dual, n=n, fill=fill)
    return hull.rotated(1j)


def flow_morph(c, t: float, upper, lower, n_right: int = 1000, cfg: RunConfig | None = None):
    """Images of the time-1 hull points added after time ``t``, and the right hull at ``t``.

    ``upper``/``lower`` are traced curves of the time-1 left hull of ``c sqrt(1 - t)``.
    Returns ``(image_points, right_hull_points)``.
    """
    if not 0 <= t < 1:
        raise ValueError("morph time must lie in [0, 1)")
    cfg = cfg or RunConfig()
    d = Driver.sqrt_one_minus_t(c)
    pts = []
    for tr in (upper, lower):
        pts.append(tr.z[tr.t > t])
    pts = np.concatenate(pts)
    if t == 0:
        return pts, np.array([d.eval(0.0)])
    res = flow_points(pts, d, t, cfg)
    img = res.g[res.status == ALIVE]
    rh = right_hull(d, t, n=n_right)
    return img, rh.points
