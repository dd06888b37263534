"""Parameter algebra for the drivers c*sqrt(1-t) and c*sqrt(tau+t), and phase classification.

For ``c*sqrt(1-t)`` the roots of ``G^2 - cG + 4`` are ``A, B`` and the partial-fraction
weights are ``alpha, beta``.  For ``c*sqrt(tau+t)`` the roots of ``W^2 - cW - 4`` are ``D, E``
with weights ``delta, epsilon``.  All square roots are principal.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import DegenerateC, NoRootOnRay

DEGENERATE_TOL = 1e-12
PHASE_TOL = 1e-10


@dataclass(frozen=True)
class SqrtOneMinusTParams:
    c: complex
    sqrt_disc: complex
    A: complex
    B: complex
    alpha: complex
    beta: complex

    def as_dict(self) -> dict:
        return {k: _cjson(getattr(self, k)) for k in ("c", "sqrt_disc", "A", "B", "alpha", "beta")}


@dataclass(frozen=True)
class SqrtTauPlusTParams:
    c: complex
    tau: float
    sqrt_disc: complex
    D: complex
    E: complex
    delta: complex
    epsilon: complex

    def as_dict(self) -> dict:
        out = {k: _cjson(getattr(self, k)) for k in ("c", "sqrt_disc", "D", "E", "delta", "epsilon")}
        out["tau"] = self.tau
        return out


class PhaseKind(str, enum.Enum):
    POSITIVE = "PositiveReAlpha"
    NEGATIVE = "NegativeReAlpha"
    TRANSITIONAL = "Transitional"


@dataclass(frozen=True)
class Phase:
    kind: PhaseKind
    re_alpha: float
    im_alpha: float
    critical_time: float | None = None

    def as_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "re_alpha": self.re_alpha,
            "im_alpha": self.im_alpha,
            "critical_time": self.critical_time,
        }


def _cjson(z):
    z = complex(z)
    return [z.real, z.imag]


def family1_params(c) -> SqrtOneMinusTParams:
    """Roots and weights for the driver ``c*sqrt(1-t)``.

    >>> p = family1_params(3j)
    >>> p.A, p.B, p.alpha
    (4j, -1j, (0.2+0j))
    """
    c = complex(c)
    if abs(c - 4) < DEGENERATE_TOL or abs(c + 4) < DEGENERATE_TOL:
        raise DegenerateC(f"c = {c} makes A = B")
    s = np.sqrt(c * c - 16)
    s = complex(s)
    A = 0.5 * (c + s)
    B = 0.5 * (c - s)
    alpha = 0.5 * (1 - c / s)
    return SqrtOneMinusTParams(c, s, A, B, alpha, 1 - alpha)


def family2_params(c, tau: float = 0.0) -> SqrtTauPlusTParams:
    """Roots and weights for the driver ``c*sqrt(tau+t)``.

    With principal roots, ``delta(c) == alpha(-ic)`` whenever Re(c)*Im(c) > 0; on the other
    quadrants the two weights trade places (the tip equation is unchanged by the swap).
    """
    c = complex(c)
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    if abs(c - 4j) < DEGENERATE_TOL or abs(c + 4j) < DEGENERATE_TOL:
        raise DegenerateC(f"c = {c} makes D = E")
    s = complex(np.sqrt(c * c + 16))
    D = 0.5 * (c + s)
    E = 0.5 * (c - s)
    delta = 0.5 * (1 - c / s)
    return SqrtTauPlusTParams(c, float(tau), s, D, E, delta, 1 - delta)


def alpha_of(c):
    """Vectorized ``alpha(c)`` (principal branch), no degeneracy check."""
    c = np.asarray(c, dtype=complex)
    return 0.5 * (1 - c / np.sqrt(c * c - 16))


def to_first_quadrant(c) -> complex:
    """Image of ``c`` under the reflections used to reduce to Arg(c) in [0, pi/2]."""
    c = complex(c)
    return complex(abs(c.real), abs(c.imag))


def classify_phase(c, phase_tol: float = PHASE_TOL) -> Phase:
    """Sign of Re(alpha), computed after reflecting ``c`` into the first quadrant.

    The reflection matters: on the left half-plane the principal root swaps the
    labels of ``alpha`` and ``beta``.
    """
    a = family1_params(to_first_quadrant(c)).alpha  # raises on +-4
    re, im = a.real, a.imag
    if abs(re) <= phase_tol:
        return Phase(PhaseKind.TRANSITIONAL, re, im, critical_time(im))
    kind = PhaseKind.POSITIVE if re > 0 else PhaseKind.NEGATIVE
    return Phase(kind, re, im)


def critical_time(im_alpha: float) -> float:
    """Time at which the upper tip returns to its start when Re(alpha) = 0."""
    return -math.expm1(-4 * math.pi * im_alpha)


def segment_count_sign(c) -> int:
    """Number of segments of the hull of ``c*sqrt(t)``: 2 iff Re(delta) > 0 (first-quadrant reduced)."""
    d = family2_params(to_first_quadrant(c)).delta
    return 2 if d.real > 0 else 1


@dataclass
class PhaseBoundary:
    points: np.ndarray          # boundary values of c, first quadrant
    im_alpha: np.ndarray
    angles_tried: int
    rays_hit: int
    min_modulus: float
    min_point: complex
    missed_angles: list = field(default_factory=list)

    @property
    def coverage(self) -> float:
        return self.rays_hit / max(self.angles_tried, 1)


def boundary_on_ray(theta: float, r_min: float = 0.05, r_max: float = 1e3, n_scan: int = 2000,
                    xtol: float = 1e-15) -> list[complex]:
    """All points with Re(alpha) = 0 on the ray ``r*exp(i*theta)``, polished by Brent's method."""
    u = np.exp(1j * theta)
    rs = np.geomspace(r_min, r_max, n_scan)
    vals = alpha_of(rs * u).real
    idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    if len(idx) == 0:
        raise NoRootOnRay(f"no Re(alpha) = 0 crossing on ray at angle {theta}")
    out = []
    f = lambda r: alpha_of(r * u).real
    for i in idx:
        r = brentq(f, rs[i], rs[i + 1], xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)
        out.append(complex(r * u))
    return out


def phase_boundary(samples: int = 180) -> PhaseBoundary:
    """Sweep rays through the open first quadrant and locate the curve Re(alpha) = 0.

    Rays that miss the curve (all angles above pi/4, where Re(alpha) stays positive) are
    skipped and reported through ``missed_angles``.  The minimum of |c| over the curve is
    polished by a bounded scalar minimization of the ray radius.
    """
    if samples < 16:
        raise ValueError("need at least 16 boundary samples")
    thetas = np.linspace(0, np.pi / 2, samples + 2)[1:-1]
    pts, missed = [], []
    hit = 0
    for th in thetas:
        try:
            roots = boundary_on_ray(th)
        except NoRootOnRay:
            missed.append(float(th))
            continue
        hit += 1
        pts.extend(roots)
    pts = np.array(pts, dtype=complex)
    mods = np.abs(pts)
    k = int(np.argmin(mods))
    th0 = float(np.angle(pts[k]))
    step = thetas[1] - thetas[0]

    def radius(th):
        roots = boundary_on_ray(th)
        return min(abs(r) for r in roots)

    res = minimize_scalar(radius, bounds=(max(th0 - 2 * step, 1e-6), th0 + 2 * step),
                          method="bounded", options={"xatol": 1e-12})
    rmin = float(res.fun)
    cmin = complex(rmin * np.exp(1j * res.x))
    return PhaseBoundary(pts, alpha_of(pts).imag, len(thetas), hit, rmin, cmin, missed)


def polished_boundary_point(c_guess) -> complex:
    """The boundary point on the ray through ``c_guess`` closest to it."""
    c_guess = complex(c_guess)
    roots = boundary_on_ray(float(np.angle(c_guess)))
    return min(roots, key=lambda r: abs(r - c_guess))
