"""Deterministic writers: versioned JSON reports, CSV tables, SVG 1.1 plots, PGM rasters."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

SCHEMA = "v1"
UPPER_COLOR = "#1f4fd8"   # blue
LOWER_COLOR = "#d8281f"   # red


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if hasattr(x, "value") and not isinstance(x, (str, int)):
        return x.value
    return x


def report(kind: str, body: dict) -> dict:
    return {"schema": SCHEMA, "kind": kind, **_plain(body)}


def dumps(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=2)


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj) + "\n")
    return path


def write_points_csv(path, pts, header=("re", "im"), extra=None) -> Path:
    """One row per complex point; ``extra`` is an optional list of per-row columns."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pts = np.asarray(pts, dtype=complex)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for i, z in enumerate(pts):
            row = [repr(float(z.real)), repr(float(z.imag))]
            if extra is not None:
                row += [_cell(col[i]) for col in extra]
            w.writerow(row)
    return path


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_grid_csv(path, grid) -> Path:
    from .flow import STATUS_NAMES

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "status", "T_z"])
        for j, y in enumerate(grid.y):
            for i, x in enumerate(grid.x):
                st = int(grid.status[j, i])
                tz = grid.lifetime[j, i]
                w.writerow([repr(float(x)), repr(float(y)), STATUS_NAMES[st],
                            repr(float(tz)) if np.isfinite(tz) else ""])
    return path


def write_pgm(path, grid) -> Path:
    """Binary PGM: captured cells black, alive white, unknown grey; top row = largest y."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    shade = np.array([255, 0, 128], dtype=np.uint8)
    img = shade[grid.status][::-1]
    with open(path, "wb") as fh:
        fh.write(f"P5\n{grid.nx} {grid.ny}\n255\n".encode())
        fh.write(img.tobytes())
    return path


class Svg:
    """Minimal SVG canvas in mathematical orientation (imaginary axis up)."""

    def __init__(self, width: int = 600, height: int = 600, margin: float = 0.05):
        self.width, self.height, self.margin = width, height, margin
        self.items = []   # (kind, points, style)

    def polyline(self, pts, color=UPPER_COLOR, width=1.5, fill="none", closed=False, opacity=1.0):
        self.items.append(("poly", np.asarray(pts, complex), dict(color=color, width=width, fill=fill,
                                                                  closed=closed, opacity=opacity)))

    def points(self, pts, color=UPPER_COLOR, r=1.0, opacity=1.0):
        self.items.append(("dots", np.asarray(pts, complex), dict(color=color, r=r, opacity=opacity)))

    def _view(self):
        allp = np.concatenate([p for _, p, _ in self.items if len(p)]) if self.items else np.zeros(1)
        x0, x1 = allp.real.min(), allp.real.max()
        y0, y1 = allp.imag.min(), allp.imag.max()
        span = max(x1 - x0, y1 - y0, 1e-9)
        pad = self.margin * span
        return x0 - pad, y0 - pad, span + 2 * pad

    def render(self, title: str = "") -> str:
        x0, y0, span = self._view()
        s = min(self.width, self.height) / span

        def xy(z):
            return (z.real - x0) * s, self.height - (z.imag - y0) * s

        out = [f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{self.width}" '
               f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">']
        if title:
            out.append(f"<title>{title}</title>")
        out.append(f'<rect width="{self.width}" height="{self.height}" fill="white"/>')
        for kind, pts, st in self.items:
            if kind == "poly":
                coords = " ".join(f"{a:.3f},{b:.3f}" for a, b in (xy(z) for z in pts))
                tag = "polygon" if st["closed"] else "polyline"
                out.append(f'<{tag} points="{coords}" fill="{st["fill"]}" stroke="{st["color"]}" '
                           f'stroke-width="{st["width"]}" opacity="{st["opacity"]}"/>')
            else:
                for z in pts:
                    a, b = xy(z)
                    out.append(f'<circle cx="{a:.3f}" cy="{b:.3f}" r="{st["r"]}" fill="{st["color"]}" '
                               f'opacity="{st["opacity"]}"/>')
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def save(self, path, title: str = "") -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.render(title))
        return path
