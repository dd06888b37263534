"""Hull curves: continuation of the tip equations, closed-form sqrt(t) hulls and the zipper.

Both driver families lead to the same implicit relation for the tip ``z`` of the hull::

    F(z, s) = a log(z - P) + b log(z - Q) - (a Log Q + b Log P) - s = 0

with ``z(0) = P + Q`` and a monotone time variable ``s``:

* ``c sqrt(1 - t)``:   P, Q = A, B;   a, b = alpha, beta;   s = log(1 - t) / 2
* ``c sqrt(1 + t)``:   P, Q = D, E;   a, b = delta, epsilon; s = log(1 + t) / 2

The logarithms on the left use arguments tracked continuously along the curve, which
is what lets a trace follow a spiral through many turns.
"""
from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .config import LIP_GUARD, RunConfig
from .driver import Driver, Form
from .errors import (BranchCutHit, BranchDiscontinuity, DegenerateC, LipGuardExceeded,
                     NewtonDivergence, SelfHit)
from .params import family1_params, family2_params

UPPER, LOWER = "Upper", "Lower"
TWO_PI = 2.0 * math.pi


def _wrap(x):
    return (x + math.pi) % TWO_PI - math.pi


@dataclass(frozen=True)
class BranchState:
    """Continuous arguments of ``z - P`` and ``z - Q`` (``P = A`` or ``D``) plus the constant term."""
    arg_a: float
    arg_b: float
    log_ref: complex

    def advance(self, z, P, Q, max_jump: float = math.pi) -> "BranchState":
        da = _wrap(math.atan2((z - P).imag, (z - P).real) - self.arg_a)
        db = _wrap(math.atan2((z - Q).imag, (z - Q).real) - self.arg_b)
        if abs(da) >= max_jump or abs(db) >= max_jump:
            raise BranchDiscontinuity("argument jump too large for continuation")
        return BranchState(self.arg_a + da, self.arg_b + db, self.log_ref)


@dataclass
class HullTrace:
    side: str
    t: np.ndarray
    z: np.ndarray
    arg_a: np.ndarray
    arg_b: np.ndarray
    residual: np.ndarray
    endpoint: complex | None = None
    family: str = ""
    c: complex = 0j
    hit_time: float | None = None
    hit_point: complex | None = None
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.t)

    @property
    def tip(self) -> complex:
        return complex(self.z[-1])

    def branch_state(self, k: int) -> BranchState:
        return BranchState(float(self.arg_a[k]), float(self.arg_b[k]), self.meta.get("log_ref", 0j))

    def at(self, t):
        """Linear interpolation of the curve at the given times."""
        t = np.asarray(t, dtype=float)
        return np.interp(t, self.t, self.z.real) + 1j * np.interp(t, self.t, self.z.imag)

    def mapped(self, f, side=None) -> "HullTrace":
        return HullTrace(side or self.side, self.t.copy(), f(self.z), self.arg_a.copy(),
                         self.arg_b.copy(), self.residual.copy(),
                         None if self.endpoint is None else complex(f(np.array([self.endpoint]))[0]),
                         self.family, self.c,
                         self.hit_time,
                         None if self.hit_point is None else complex(f(np.array([self.hit_point]))[0]),
                         dict(self.meta))

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "re", "im", "argZA", "argZB", "side"])
            for row in zip(self.t, self.z, self.arg_a, self.arg_b):
                t, z, a, b = row
                w.writerow([repr(float(t)), repr(float(z.real)), repr(float(z.imag)),
                            repr(float(a)), repr(float(b)), self.side])

    def summary(self) -> dict:
        def cj(z):
            return None if z is None else [complex(z).real, complex(z).imag]
        return {"side": self.side, "family": self.family, "c": cj(self.c), "samples": len(self),
                "t_last": float(self.t[-1]), "tip": cj(self.tip), "endpoint": cj(self.endpoint),
                "hit_time": self.hit_time, "hit_point": cj(self.hit_point),
                "max_residual": float(np.nanmax(self.residual)) if len(self) else None}


# ---------------------------------------------------------------------------------------
# continuation on the unified tip equation

class _TipProblem:
    """The tip relation in coordinates relative to a root, so ``z`` may approach ``P`` or
    ``Q`` far below the double-precision spacing of ``z`` itself."""

    def __init__(self, P, Q, a, b, decreasing: bool):
        self.P, self.Q, self.a, self.b = complex(P), complex(Q), complex(a), complex(b)
        self.z0 = self.P + self.Q
        self.PQ = self.P - self.Q
        self.K = self.a * np.log(self.Q) + self.b * np.log(self.P)
        self.decreasing = decreasing

    def split(self, u, anchor):
        """(z - P, z - Q) for the state ``u = z - root[anchor]``."""
        return (u, u + self.PQ) if anchor == 0 else (u - self.PQ, u)

    def z_of(self, u, anchor):
        return (self.P if anchor == 0 else self.Q) + u

    def F(self, zp, zq, s, ap, aq):
        return (self.a * (math.log(abs(zp)) + 1j * ap)
                + self.b * (math.log(abs(zq)) + 1j * aq) - self.K - s)

    def Fz(self, zp, zq):
        return self.a / zp + self.b / zq

    def duds(self, u, anchor):
        zp, zq = self.split(u, anchor)
        return zp * zq / (zp - self.Q)


def _args_near(w, ref):
    return ref + _wrap(math.atan2(w.imag, w.real) - ref)


def _newton(prob, u, anchor, s, ap_ref, aq_ref, tol, max_it=10):
    for it in range(1, max_it + 1):
        zp, zq = prob.split(u, anchor)
        ap, aq = _args_near(zp, ap_ref), _args_near(zq, aq_ref)
        f = prob.F(zp, zq, s, ap, aq)
        du = f / prob.Fz(zp, zq)
        u = u - du
        if abs(du) <= 1e-15 * abs(u) or abs(f) <= 0.01 * tol:
            zp, zq = prob.split(u, anchor)
            ap, aq = _args_near(zp, ap_ref), _args_near(zq, aq_ref)
            f = prob.F(zp, zq, s, ap, aq)
            if abs(f) <= tol:
                return u, ap, aq, abs(f), it
    return None


def _continue(prob: _TipProblem, s_targets, side: str, cfg: RunConfig, stop_on_hit: bool = True):
    """March the tip from ``z0`` through the (monotone) ``s_targets``.

    RK4 predictor on ``dz/ds = (z - P)(z - Q) / (z - z0)``, Newton corrector on the tip
    relation.  Returns arrays (z, arg_p, arg_q, residual) at the targets and the
    self-hit info ``(s_hit, z_hit)`` or ``None``.
    """
    sign = -1.0 if prob.decreasing else 1.0
    n = len(s_targets)
    zs = np.empty(n, complex)
    aps, aqs, res = np.empty(n), np.empty(n), np.empty(n)
    P, Q, z0 = prob.P, prob.Q, prob.z0
    tol = cfg.newton_tol
    # start on the two-sheeted germ z - z0 ~ +-sqrt(2 P Q s)
    s = sign * 1e-14
    w = np.sqrt(2 * P * Q * s)
    w = w if (w.imag >= 0) == (side == UPPER) else -w
    anchor = 0 if abs(Q) <= abs(P) else 1
    u = (Q + w) if anchor == 0 else (P + w)
    ap0, aq0 = float(np.angle(Q)), float(np.angle(P))
    sol = _newton(prob, u, anchor, s, ap0, aq0, tol)
    if sol is None:
        raise NewtonDivergence("could not start the tip trace")
    u, ap, aq, r, _ = sol
    h = sign * 1e-13
    left = False
    k = 0
    while k < n and s_targets[k] * sign <= s * sign:
        zs[k], aps[k], aqs[k], res[k] = z0, ap0, aq0, 0.0
        k += 1
    hit = None
    while k < n:
        target = s_targets[k]
        if abs(target - s) <= 1e-14 * max(1.0, abs(s)):
            s = target
            zs[k], aps[k], aqs[k], res[k] = prob.z_of(u, anchor), ap, aq, r
            k += 1
            continue
        zp, zq = prob.split(u, anchor)
        dist = min(abs(zp), abs(zq), abs(zp - Q))
        k1 = prob.duds(u, anchor)
        hmax = 0.15 * dist / max(abs(k1), 1e-300)
        step = sign * min(abs(h), hmax, abs(target - s))
        if abs(step) < 1e-16 * max(1.0, abs(s)):
            raise NewtonDivergence(f"step underflow at s = {s}")
        k2 = prob.duds(u + 0.5 * step * k1, anchor)
        k3 = prob.duds(u + 0.5 * step * k2, anchor)
        k4 = prob.duds(u + step * k3, anchor)
        up_ = u + step / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        sol = _newton(prob, up_, anchor, s + step, ap, aq, tol, max_it=6)
        ok = sol is not None
        if ok:
            un, apn, aqn, rn, its = sol
            ok = (abs(un - u) <= 0.3 * dist and abs(apn - ap) < 0.5 and abs(aqn - aq) < 0.5
                  and abs(un - up_) <= 0.05 * dist)
        if not ok:
            h = 0.5 * step
            continue
        s = target if abs(step) == abs(target - s) else s + step
        u, ap, aq, r = un, apn, aqn, rn
        h = step * (2.0 if its <= 3 else 1.0)
        zp, zq = prob.split(u, anchor)
        if anchor == 0 and abs(zq) < abs(zp):
            anchor, u = 1, zq
        elif anchor == 1 and abs(zp) < abs(zq):
            anchor, u = 0, zp
        dz0 = abs(zp - Q)
        if not left and dz0 > 100 * cfg.self_hit_tol:
            left = True
        if left and dz0 < cfg.self_hit_tol:
            hit = (s, prob.z_of(u, anchor))
            if stop_on_hit:
                break
        if s == target:
            zs[k], aps[k], aqs[k], res[k] = prob.z_of(u, anchor), ap, aq, r
            k += 1
    if hit is not None and k < n:
        return zs[:k], aps[:k], aqs[:k], res[:k], hit
    return zs, aps, aqs, res, hit


def _endpoint(z, cands, tol):
    if not cands:
        return None
    best = min(cands, key=lambda p: abs(z - p))
    return complex(best) if abs(z - best) < tol else None


def family1_grid(n: int = 2000, t_end: float = 1 - 1e-8) -> np.ndarray:
    """Times on [0, t_end]: uniform early, geometric in 1 - t near the end."""
    if not 0 < t_end < 1:
        raise ValueError("t_end must lie in (0, 1)")
    geo = 1.0 - np.geomspace(1.0, 1.0 - t_end, n)
    uni = np.linspace(0.0, min(t_end, 0.9), max(n // 4, 2))
    return np.unique(np.concatenate([geo, uni, [0.0, t_end]]))


def _check_grid(t_grid):
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or len(t) < 2 or t[0] != 0.0 or np.any(np.diff(t) <= 0):
        raise ValueError("tGrid must start at 0 and increase strictly")
    return t


def _pack(side, t, zs, ap, aq, res, hit, family, c, t_of_s, log_ref, end_cands, cfg):
    m = len(zs)
    tr = HullTrace(side, t[:m].copy(), zs, ap, aq, res, family=family, c=complex(c),
                   meta={"log_ref": log_ref})
    if hit is not None:
        tr.hit_time = float(t_of_s(hit[0]))
        tr.hit_point = complex(hit[1])
    elif m:
        tr.endpoint = _endpoint(zs[-1], end_cands, cfg.endpoint_tol)
    return tr


def trace_tips_family1(c, t_grid=None, cfg: RunConfig | None = None, on_self_hit: str = "raise"):
    """Upper and lower tips of the hull of ``c sqrt(1 - t)`` on ``t_grid`` (subset of [0, 1)).

    ``on_self_hit``: ``"raise"`` raises :class:`SelfHit` carrying the partial trace,
    ``"stop"`` returns the truncated trace with ``hit_time``/``hit_point`` set.
    """
    cfg = cfg or RunConfig()
    p = family1_params(c)
    t = _check_grid(family1_grid(cfg.trace_samples) if t_grid is None else t_grid)
    if t[-1] >= 1:
        raise ValueError("family-1 traces need t < 1")
    s_t = 0.5 * np.log1p(-t)
    prob = _TipProblem(p.A, p.B, p.alpha, p.beta, decreasing=True)
    out = []
    for side in (UPPER, LOWER):
        zs, ap, aq, res, hit = _continue(prob, s_t, side, cfg)
        tr = _pack(side, t, zs, ap, aq, res, hit, "SqrtOneMinusT", c,
                   lambda s: -math.expm1(2 * s), prob.K, (p.A, p.B), cfg)
        if hit is not None and on_self_hit == "raise":
            raise SelfHit(tr.hit_time, tr.hit_point, partial=tr)
        out.append(tr)
    return out[0], out[1]


def trace_tips_family2(c, tau: float, t_grid, cfg: RunConfig | None = None,
                       on_self_hit: str = "raise"):
    """Upper and lower tips of the hull of ``c sqrt(tau + t)``, ``tau > 0``."""
    cfg = cfg or RunConfig()
    if not tau > 0:
        raise ValueError("continuation needs tau > 0; use sqrt_t_hull for tau = 0")
    p = family2_params(c)
    t = _check_grid(t_grid)
    r = math.sqrt(tau)
    s_t = 0.5 * np.log1p(t / tau)
    prob = _TipProblem(p.D, p.E, p.delta, p.epsilon, decreasing=False)
    out = []
    for side in (UPPER, LOWER):
        zs, ap, aq, res, hit = _continue(prob, s_t, side, cfg)
        tr = _pack(side, t, zs * r, ap, aq, res, hit, "SqrtTauPlusT", c,
                   lambda s: tau * math.expm1(2 * s), prob.K, (), cfg)
        if tr.hit_point is not None:
            tr.hit_point *= r
        if hit is not None and on_self_hit == "raise":
            raise SelfHit(tr.hit_time, tr.hit_point, partial=tr)
        out.append(tr)
    return out[0], out[1]


def tip_residual(z, t: float, p, b: BranchState | None = None) -> complex:
    """Left side minus right side of the tip equation, using ``b``'s continuous arguments.

    ``p`` is a :class:`SqrtOneMinusTParams` (``t`` in [0, 1)) or a
    :class:`SqrtTauPlusTParams` (roots scaled by ``sqrt(tau)``; ``tau = 0`` allowed).
    Without ``b`` each argument is taken within pi of its value at ``z = lambda(0)``.
    """
    z = complex(z)
    if hasattr(p, "alpha"):
        P0, Q0, a, bb = p.A, p.B, p.alpha, p.beta
        P, Q = P0, Q0
        s = 0.5 * math.log1p(-t)
    else:
        P0, Q0, a, bb = p.D, p.E, p.delta, p.epsilon
        r = math.sqrt(p.tau)
        P, Q = P0 * r, Q0 * r
        s = 0.5 * math.log(p.tau + t)
    if z == P or z == Q:
        raise ValueError("tip residual undefined at a root")
    ref_a = b.arg_a if b else float(np.angle(Q0))
    ref_b = b.arg_b if b else float(np.angle(P0))
    aa = _args_near(z - P, ref_a)
    ab = _args_near(z - Q, ref_b)
    lhs = a * np.log(complex(Q0)) + bb * np.log(complex(P0)) + s
    rhs = a * (math.log(abs(z - P)) + 1j * aa) + bb * (math.log(abs(z - Q)) + 1j * ab)
    return complex(lhs - rhs)


# ---------------------------------------------------------------------------------------
# c sqrt(t): closed-form hulls

def _unit_tips(c, phase_tol: float = 1e-10):
    """Upper and lower tips of the hull of ``c sqrt(t)`` at ``t = 1`` (vectorized)."""
    c = np.asarray(c, dtype=complex)
    fx = c.real < 0
    fy = c.imag < 0
    c1 = np.abs(c.real) + 1j * np.abs(c.imag)
    s = np.sqrt(c1 * c1 + 16)
    D = 0.5 * (c1 + s)
    E = 0.5 * (c1 - s)
    delta = 0.5 * (1 - c1 / s)
    # both roots lie in the closed upper half-plane; take arguments in [0, pi]
    lD = np.log(np.abs(D)) + 1j * np.arctan2(np.abs(D.imag), D.real)
    lE = np.log(np.abs(E)) + 1j * np.arctan2(np.abs(E.imag), E.real)
    up = np.exp(delta * lE + (1 - delta) * lD)
    lo = np.exp(-TWO_PI * 1j * delta) * up
    one = delta.real < -phase_tol
    lo = np.where(one, up, lo)
    up = np.where(fx, -np.conj(up), up)
    lo = np.where(fx, -np.conj(lo), lo)
    up, lo = np.where(fy, np.conj(lo), up), np.where(fy, np.conj(up), lo)
    return up, lo, delta


@dataclass
class SqrtTHull:
    c: complex
    t: float
    upper: complex
    lower: complex
    segments: list  # list of (start, end) pairs

    @property
    def count(self) -> int:
        return len(self.segments)

    def sample(self, n: int = 200) -> np.ndarray:
        u = np.linspace(0.0, 1.0, n)
        return np.concatenate([a + (b - a) * u for a, b in self.segments])


def sqrt_t_hull(c, t: float = 1.0, offset=0j, phase_tol: float = 1e-10) -> SqrtTHull:
    """Hull of ``offset + c sqrt(t)``: one or two segments from ``offset``.

    Two segments when Re(delta) > 0, one when Re(delta) < 0; when Re(delta) = 0 both
    limits lie on one ray and the hull is the segment to the farther one.  ``delta`` is
    taken after reflecting ``c`` into the first quadrant.
    """
    c = complex(c)
    if abs(c - 4j) < 1e-12 or abs(c + 4j) < 1e-12:
        raise DegenerateC(f"c = {c} makes D = E")
    if not t > 0:
        raise ValueError("t must be positive")
    up, lo, delta = _unit_tips(c, phase_tol)
    r = math.sqrt(t)
    up, lo = complex(up) * r, complex(lo) * r
    o = complex(offset)
    dr = complex(delta).real
    if dr > phase_tol:
        segs = [(o, o + up), (o, o + lo)]
    elif dr < -phase_tol:
        segs = [(o, o + up)]
    else:
        far = up if abs(up) >= abs(lo) else lo
        segs = [(o, o + far)]
    return SqrtTHull(c, t, o + up, o + lo, segs)


# ---------------------------------------------------------------------------------------
# elementary inverse maps and the zipper

@dataclass(frozen=True)
class ElementaryStep:
    base: complex
    c_local: complex
    dt: float
    D: complex
    E: complex
    delta: complex
    epsilon: complex
    guard_exceeded: bool = False

    @classmethod
    def make(cls, base, c_local, dt, lip_guard: float = LIP_GUARD) -> "ElementaryStep":
        p = family2_params(c_local)
        return cls(complex(base), complex(c_local), float(dt), p.D, p.E, p.delta, p.epsilon,
                   abs(c_local) > lip_guard)

    @property
    def tips(self):
        up, lo, _ = _unit_tips(self.c_local)
        r = math.sqrt(self.dt)
        return self.base + complex(up) * r, self.base + complex(lo) * r


def elementary_inverse(w, step: ElementaryStep, reference=None, side: str = UPPER) -> complex:
    """``base + (w' - D sqrt(dt))^delta (w' - E sqrt(dt))^epsilon`` with ``w' = w - base``.

    Each factor's argument is taken in the window of width 2 pi centred on the argument
    of the same factor at ``reference``.  Without a reference the window is (0, pi) +- pi/2
    shifted up for ``side == Upper`` and down for ``Lower``; for points off the strip
    swept by the driver piece this is the principal argument.
    """
    r = math.sqrt(step.dt)
    wp = complex(w) - step.base
    u, v = wp - step.D * r, wp - step.E * r
    for f, wt in ((u, step.delta), (v, step.epsilon)):
        if abs(f) < 1e-12:
            if wt.real > 0:
                return step.base
            raise BranchCutHit("point at a branch point with Re(weight) <= 0")
    if reference is not None:
        rp = complex(reference) - step.base
        ref_u = math.atan2((rp - step.D * r).imag, (rp - step.D * r).real)
        ref_v = math.atan2((rp - step.E * r).imag, (rp - step.E * r).real)
    else:
        mid = math.pi / 2 if side == UPPER else -math.pi / 2
        ref_u = ref_v = mid
    au = math.atan2(u.imag, u.real)
    av = math.atan2(v.imag, v.real)
    du, dv = _wrap(au - ref_u), _wrap(av - ref_v)
    if min(math.pi - abs(du), math.pi - abs(dv)) < 1e-12:
        raise BranchCutHit("point on the branch cut of the chosen window")
    lu = math.log(abs(u)) + 1j * (ref_u + du)
    lv = math.log(abs(v)) + 1j * (ref_v + dv)
    return complex(step.base + np.exp(step.delta * lu + step.epsilon * lv))


def zipper_partition(d: Driver, n: int, T: float | None = None) -> np.ndarray:
    """``n + 1`` times on [0, T] equidistributing ``t / T + I(t) / I(T)``, ``I = int |lambda'|^2``.

    Half the points go uniformly in time, half where the driver moves fast, so the local
    ``|c_k| = |d lambda| / sqrt(dt)`` stays small near square-root singularities.
    """
    T = d.horizon if T is None else T
    if d.form is Form.SQRT_ONE_MINUS_T:
        S = d.scale
        if T >= S:
            raise ValueError("zipper on c sqrt(S - t) needs T < S")
        m = max(20 * n, 2000)
        tg = np.unique(np.concatenate([np.linspace(0, T, m), S - np.geomspace(S, S - T, m)]))
        tg = tg[(tg >= 0) & (tg <= T)]
        I = abs(d.c) ** 2 / 4 * np.log(S / (S - tg))
    elif d.form is Form.SQRT_TAU_PLUS_T and d.tau > 0:
        m = max(20 * n, 2000)
        tg = np.unique(np.concatenate([np.linspace(0, T, m), np.geomspace(d.tau, d.tau + T, m) - d.tau]))
        tg = tg[(tg >= 0) & (tg <= T)]
        I = abs(d.c) ** 2 / 4 * np.log((d.tau + tg) / d.tau)
    elif d.form is Form.SAMPLED:
        knots = d.times[d.times < T]
        tg = np.append(knots, T)
        v = d.eval(tg)
        I = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(v)) ** 2 / np.diff(tg))])
    else:
        return np.linspace(0.0, T, n + 1)
    tg[0], tg[-1] = 0.0, T
    M = tg / T
    if I[-1] > 0:
        M = 0.5 * (M + I / I[-1])
    out = np.interp(np.linspace(0, 1, n + 1), M, tg)
    out[0], out[-1] = 0.0, T
    out = np.maximum.accumulate(out)
    if np.any(np.diff(out) <= 0):
        raise ValueError("degenerate zipper partition")
    return out


def _compose(p, base, Dd, Ed, delta, eps, strip_lo, strip_hi, side):
    """Apply h_1 o ... o h_{k-1} to each local tip ``p[k]`` (in place)."""
    n = len(p)
    flagged = 0
    half = math.pi / 2
    for j in range(n - 2, -1, -1):
        w = p[j + 1:] - base[j]
        u = w - Dd[j]
        v = w - Ed[j]
        au = np.angle(u)
        av = np.angle(v)
        y0 = w[0].imag
        if strip_lo[j] <= y0 <= strip_hi[j]:
            flagged += 1
            if side == UPPER:
                au[0] += TWO_PI if au[0] < -half else 0.0
                av[0] += TWO_PI if av[0] < -half else 0.0
            else:
                au[0] -= TWO_PI if au[0] > half else 0.0
                av[0] -= TWO_PI if av[0] > half else 0.0
        if len(au) > 1:
            au = au[0] + np.concatenate([[0.0], np.cumsum(_wrap_arr(np.diff(au)))])
            av = av[0] + np.concatenate([[0.0], np.cumsum(_wrap_arr(np.diff(av)))])
        lu = np.log(np.abs(u)) + 1j * au
        lv = np.log(np.abs(v)) + 1j * av
        p[j + 1:] = base[j] + np.exp(delta[j] * lu + eps[j] * lv)
    return flagged


def _wrap_arr(x):
    return (x + np.pi) % TWO_PI - np.pi


def zipper_trace(d: Driver, n: int, T: float | None = None, times=None, lip_guard: float = LIP_GUARD):
    """Upper and lower hull curves of ``d`` by composing explicit inverses of sqrt(t) pieces.

    Step ``k`` covers ``[t_{k-1}, t_k]`` with the driver replaced by
    ``lambda(t_{k-1}) + c_k sqrt(t - t_{k-1})``.  The curve point at ``t_k`` is the tip of
    step ``k`` pulled back through the inverse maps of steps ``k-1, ..., 1``.  For drivers
    ``offset + c sqrt(t)`` the pieces are not exact, so the closed-form tips are returned.
    """
    if n < 1:
        raise ValueError("zipper needs n >= 1")
    T = d.horizon if T is None else T
    if times is None:
        ts = zipper_partition(d, n, T)
        keep = None
    else:
        want = _check_grid(times)
        if d.form is Form.SQRT_TAU_PLUS_T and d.tau == 0:
            ts = want
        else:
            ts = np.union1d(zipper_partition(d, n, want[-1]), want)
        keep = np.searchsorted(ts, want)
    lam = d.eval(ts)
    if d.form is Form.SQRT_TAU_PLUS_T and d.tau == 0:
        up, lo, _ = _unit_tips(d.c)
        r = np.sqrt(ts)
        zu = d.offset + complex(up) * r
        zl = d.offset + complex(lo) * r
        meta = {"method": "closed-form", "max_c_local": 0.0, "flagged": 0}
        return (_zip_trace(UPPER, ts, zu, d, meta), _zip_trace(LOWER, ts, zl, d, meta))
    dt = np.diff(ts)
    sq = np.sqrt(dt)
    ck = (lam[1:] - lam[:-1]) / sq
    big = np.abs(ck) > lip_guard
    if np.any(big):
        warnings.warn(LipGuardExceeded(
            f"{int(big.sum())} zipper steps have |c_k| > {lip_guard:.3g} (max {np.abs(ck).max():.3g})"))
    if np.any((np.abs(ck - 4j) < 1e-12) | (np.abs(ck + 4j) < 1e-12)):
        raise DegenerateC("zipper step hit c = +-4i")
    s = np.sqrt(ck * ck + 16)
    Dd = 0.5 * (ck + s) * sq
    Ed = 0.5 * (ck - s) * sq
    delta = 0.5 * (1 - ck / s)
    eps = 1 - delta
    up, lo, _ = _unit_tips(ck)
    base = lam[:-1]
    h = ck.imag * sq
    slo, shi = np.minimum(0.0, h), np.maximum(0.0, h)
    out = []
    for side, tip in ((UPPER, up), (LOWER, lo)):
        p = base + tip * sq
        flagged = _compose(p, base, Dd, Ed, delta, eps, slo, shi, side)
        meta = {"method": "zipper", "max_c_local": float(np.abs(ck).max()), "flagged": flagged}
        z = np.concatenate([[lam[0]], p])
        if keep is not None:
            z = z[keep]
        out.append(_zip_trace(side, ts if keep is None else ts[keep], z, d, meta))
    return out[0], out[1]


def _zip_trace(side, ts, z, d, meta):
    nan = np.full(len(ts), np.nan)
    z = np.asarray(z, complex)
    return HullTrace(side, ts.copy(), z, nan, nan.copy(), nan.copy(), family=d.form.value,
                     c=d.c, meta=meta)


# ---------------------------------------------------------------------------------------
# left hulls of arbitrary drivers

@dataclass
class LeftHull:
    curves: list                      # HullTrace objects
    fill: np.ndarray = field(default_factory=lambda: np.empty(0, complex))
    kind: str = "curves"
    extra: np.ndarray = field(default_factory=lambda: np.empty(0, complex))

    @property
    def points(self) -> np.ndarray:
        parts = [c.z for c in self.curves] + [self.fill, self.extra]
        return np.concatenate(parts)

    def rotated(self, w) -> "LeftHull":
        w = complex(w)
        return LeftHull([c.mapped(lambda z: w * z) for c in self.curves], w * self.fill,
                        self.kind, w * self.extra)

    def mapped(self, f) -> "LeftHull":
        return LeftHull([c.mapped(f) for c in self.curves], f(self.fill), self.kind, f(self.extra))


def trace_driver(d: Driver, T: float | None = None, n: int = 2000, t_grid=None,
                 cfg: RunConfig | None = None, on_self_hit: str = "stop"):
    """Upper and lower hull curves of a closed-form driver on ``[0, T]``, in driver time.

    Offsets and the ``S``/``tau`` scale are undone with the scaling and translation
    identities before tracing the normalized family.  Sampled drivers go to the zipper.
    """
    cfg = cfg or RunConfig()
    T = d.horizon if T is None else T
    if d.form is Form.SAMPLED:
        return zipper_trace(d, n, T)
    o = d.offset
    if d.form is Form.SQRT_ONE_MINUS_T:
        S = d.scale
        tn_end = min(T / S, 1 - 1e-8)
        tn = family1_grid(n, tn_end) if t_grid is None else _check_grid(t_grid) / S
        up, lo = trace_tips_family1(d.c, tn, cfg, on_self_hit=on_self_hit)
        r = math.sqrt(S)
    elif d.tau > 0:
        tn = np.linspace(0, T / d.tau, n) if t_grid is None else _check_grid(t_grid) / d.tau
        if t_grid is None:
            tn = np.unique(np.concatenate([tn, np.geomspace(1e-9, T / d.tau, n)]))
            tn[0] = 0.0
        up, lo = trace_tips_family2(d.c, 1.0, tn, cfg, on_self_hit=on_self_hit)
        r = math.sqrt(d.tau)
        S = d.tau
    else:
        ts = np.linspace(0, T, n) if t_grid is None else _check_grid(t_grid)
        return zipper_trace(d, 1, T, times=ts)
    res = []
    for tr in (up, lo):
        m = tr.mapped(lambda z: o + r * z)
        m.t = tr.t * S
        if m.hit_time is not None:
            m.hit_time *= S
        res.append(m)
    return res[0], res[1]


def left_hull(d: Driver, T: float | None = None, n: int = 2000, fill: int = 0,
              cfg: RunConfig | None = None, extra_times=None) -> LeftHull:
    """Point-cloud representation of ``L_T``: traced boundary curves plus, for hulls
    with interior, ``fill`` x ``fill`` lattice points inside the traced loop.

    For ``c sqrt(S - t)`` run to ``T = S`` the time-1 hull is assembled by phase, the
    curves are traced to ``1 - 1e-14`` and closed with their limit points.
    ``extra_times`` are merged into the trace grid of closed-form drivers.
    """
    cfg = cfg or RunConfig()
    T = d.horizon if T is None else T
    if d.form is Form.SQRT_TAU_PLUS_T and d.tau == 0:
        h = sqrt_t_hull(d.c, T, d.offset)
        seg = h.sample(n)
        tr = HullTrace(UPPER, np.linspace(0, T, len(seg)), seg, *(np.full(len(seg), np.nan),) * 3,
                       family="SqrtTauPlusT", c=d.c)
        return LeftHull([tr], kind=f"{h.count}-segment")
    if d.form is Form.SQRT_ONE_MINUS_T and T >= d.scale * (1 - 1e-12):
        from .analytics import HullKind, time1_hull

        grid = family1_grid(n, 1 - 1e-14)
        if extra_times is not None:
            grid = np.union1d(grid, np.asarray(extra_times, float) / d.scale)
        h1 = time1_hull(d.c, interior_density=fill or 2, oracle_fraction=0.0, cfg=cfg,
                        t_grid=grid)
        r, o = math.sqrt(d.scale), d.offset
        f = lambda z: o + r * np.asarray(z)
        curves = [h1.upper.mapped(f), h1.lower.mapped(f)]
        for tr in curves:
            tr.t = tr.t * d.scale
        if h1.kind is HullKind.SIMPLE_ARC:
            ends = [h1.A, h1.B]
            kind = "arc"
        elif h1.kind is HullKind.LOOP_WITH_INTERIOR:
            ends = [h1.B]
            kind = "loop"
        else:
            ends = [h1.B, h1.c]
            kind = "loop+tail"
        hull = LeftHull(curves, kind=kind, extra=f(np.array(ends, complex)))
        if fill and kind == "loop":
            hull.fill = f(h1.interior)
        return hull
    grid = None
    if extra_times is not None and d.is_closed_form:
        base = trace_driver(d, T, n, cfg=cfg)[0].t
        grid = np.union1d(base, np.clip(np.asarray(extra_times, float), 0.0, T))
    up, lo = trace_driver(d, T, n, t_grid=grid, cfg=cfg)
    return LeftHull([up, lo], kind="loop+tail" if up.hit_point is not None else "arc")
