"""Point-cloud helpers: Hausdorff distance, even-odd polygon test, winding."""
from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree


def _xy(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex).ravel()
    return np.column_stack([z.real, z.imag])


def directed_distance(a, b) -> float:
    """max over a of the distance to the nearest point of b."""
    a, b = _xy(a), _xy(b)
    if not len(a):
        return 0.0
    if not len(b):
        return np.inf
    d, _ = cKDTree(b).query(a)
    return float(d.max())


def hausdorff(a, b) -> float:
    return max(directed_distance(a, b), directed_distance(b, a))


def nearest_distance(a, b) -> np.ndarray:
    d, _ = cKDTree(_xy(b)).query(_xy(a))
    return d


def densify(z, spacing: float) -> np.ndarray:
    """Insert points along a polyline so consecutive samples are at most ``spacing`` apart."""
    z = np.asarray(z, dtype=complex)
    if len(z) < 2:
        return z
    seg = np.abs(np.diff(z))
    k = np.maximum(np.ceil(seg / spacing).astype(int), 1)
    parts = [z[i] + (z[i + 1] - z[i]) * np.arange(k[i]) / k[i] for i in range(len(seg))]
    return np.concatenate(parts + [z[-1:]])


def segment_points(a, b, n: int = 500) -> np.ndarray:
    return complex(a) + (complex(b) - complex(a)) * np.linspace(0.0, 1.0, n)


def disk_points(center, radius: float, spacing: float) -> np.ndarray:
    """Lattice points of a closed disk plus its boundary circle."""
    r = float(radius)
    m = int(np.ceil(2 * r / spacing)) + 1
    x = np.linspace(-r, r, m)
    X, Y = np.meshgrid(x, x)
    w = (X + 1j * Y).ravel()
    w = w[np.abs(w) <= r]
    nb = max(int(np.ceil(2 * np.pi * r / spacing)), 8)
    circ = r * np.exp(2j * np.pi * np.arange(nb) / nb)
    return complex(center) + np.concatenate([w, circ])


def points_in_polygon(pts, poly) -> np.ndarray:
    """Even-odd rule: boolean mask of points inside the closed polygon ``poly``."""
    pts = np.asarray(pts, dtype=complex).ravel()
    poly = np.asarray(poly, dtype=complex)
    x, y = pts.real, pts.imag
    inside = np.zeros(len(pts), dtype=bool)
    xa, ya = poly.real, poly.imag
    xb, yb = np.roll(xa, -1), np.roll(ya, -1)
    for i in range(len(poly)):
        cond = (ya[i] > y) != (yb[i] > y)
        if not cond.any():
            continue
        xc = xa[i] + (y[cond] - ya[i]) * (xb[i] - xa[i]) / (yb[i] - ya[i])
        hit = np.zeros_like(cond)
        hit[cond] = x[cond] < xc
        inside ^= hit
    return inside


def unwound_argument(z, center) -> np.ndarray:
    """Continuous argument of ``z - center`` along a sampled curve."""
    return np.unwrap(np.angle(np.asarray(z, dtype=complex) - complex(center)))


def winding(z, center) -> float:
    a = unwound_argument(z, center)
    return float((a[-1] - a[0]) / (2 * np.pi))
