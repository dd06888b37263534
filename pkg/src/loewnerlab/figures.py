"""Recipes for the five reference pictures. Each writes SVG plus CSV data and returns the paths."""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .analytics import HullKind, concatenation_picture, time1_hull
from .config import RunConfig
from .driver import Driver
from .flow import flow_morph, right_hull
from .io import LOWER_COLOR, UPPER_COLOR, Svg, write_points_csv
from .params import phase_boundary, polished_boundary_point

FIG2_DEFAULTS = (3.31 + 1.15j, 5 + 2j)
FIG3_GUESS = 3.687 + 0.511j
FIG4_C, FIG4_T = 3 * math.sqrt(2), 0.5
FIG5_C = 3.31 + 1.15j
FIG5_TIMES = (0.196, 0.392, 0.588, 0.784)
SHADE = "#9db4f0"


def ctag(c) -> str:
    """Filename-safe label for a complex number, e.g. ``3.31p1.15i``."""
    c = complex(c)
    s = f"{c.real:.6g}{'+' if c.imag >= 0 else '-'}{abs(c.imag):.6g}i"
    return s.replace("+", "p").replace("-", "m")


def _curves(svg, upper, lower, width=1.5):
    svg.polyline(upper, UPPER_COLOR, width)
    svg.polyline(lower, LOWER_COLOR, width)


def figure1(out: Path, cfg: RunConfig) -> list[Path]:
    pb = phase_boundary(cfg.boundary_samples)
    pts = pb.points[np.argsort(np.angle(pb.points))]
    paths = [write_points_csv(out / "fig1_boundary.csv", pts, header=("re", "im", "im_alpha"),
                              extra=[pb.im_alpha[np.argsort(np.angle(pb.points))]])]
    svg = Svg()
    for f in (lambda z: z, lambda z: -np.conj(z), np.conj, lambda z: -z):
        svg.polyline(f(pts), UPPER_COLOR)
    svg.points([4, -4], LOWER_COLOR, r=3)
    svg.points([pb.min_point], LOWER_COLOR, r=3)
    paths.append(svg.save(out / "fig1_boundary.svg", "Re(alpha) = 0"))
    return paths


def _hull_svg(h, svg):
    if len(h.interior):
        svg.points(h.interior, SHADE, r=1.2, opacity=0.6)
    _curves(svg, h.upper.z, h.lower.z)
    svg.points([h.A, h.B], "black", r=2.5)


def _hull_csvs(h, out: Path, stem: str) -> list[Path]:
    paths = []
    for tr in (h.upper, h.lower):
        p = out / f"{stem}_{tr.side.lower()}.csv"
        tr.write_csv(p)
        paths.append(p)
    for name in ("loop", "interior", "tail"):
        arr = getattr(h, name)
        if len(arr):
            paths.append(write_points_csv(out / f"{stem}_{name}.csv", arr))
    return paths


def figure2(out: Path, cfg: RunConfig, c=None) -> list[Path]:
    paths = []
    for cc in ([complex(c)] if c is not None else FIG2_DEFAULTS):
        h = time1_hull(cc, cfg=cfg)
        stem = f"fig2_{ctag(cc)}"
        paths += _hull_csvs(h, out, stem)
        svg = Svg()
        _hull_svg(h, svg)
        paths.append(svg.save(out / f"{stem}.svg", f"L_1 for c = {cc}, {h.kind.value}"))
    return paths


def figure3(out: Path, cfg: RunConfig, c=None) -> list[Path]:
    cc = polished_boundary_point(FIG3_GUESS if c is None else c)
    h = time1_hull(cc, cfg=cfg)
    stem = "fig3_transition"
    paths = _hull_csvs(h, out, stem)
    svg = Svg()
    _hull_svg(h, svg)
    if h.kind is HullKind.LOOP_WITH_TAIL:
        svg.points([h.hit_point], "black", r=3)
    paths.append(svg.save(out / f"{stem}.svg", f"L_1 for c = {cc:.9f}, {h.kind.value}"))
    return paths


def figure4(out: Path, cfg: RunConfig, c=None, t: float | None = None) -> list[Path]:
    cc = FIG4_C if c is None else complex(c)
    t = FIG4_T if t is None else float(t)
    d = Driver.sqrt_one_minus_t(cc)
    image, shifted, rt = concatenation_picture(d, t, cfg=cfg)
    paths = [write_points_csv(out / "fig4_image.csv", image),
             write_points_csv(out / "fig4_shifted_hull.csv", shifted),
             write_points_csv(out / "fig4_right_hull.csv", rt)]
    svg = Svg()
    svg.points(image, UPPER_COLOR, r=0.6, opacity=0.5)
    svg.points(rt, LOWER_COLOR, r=1.0)
    paths.append(svg.save(out / "fig4_concatenation.svg", f"c = {cc}, t = {t}"))
    return paths


def figure5(out: Path, cfg: RunConfig, c=None, times=FIG5_TIMES) -> list[Path]:
    cc = FIG5_C if c is None else complex(c)
    h = time1_hull(cc, cfg=cfg)
    d = Driver.sqrt_one_minus_t(cc)
    paths = []
    svg = Svg()
    _curves(svg, h.upper.z, h.lower.z)
    paths.append(svg.save(out / "fig5_frame0.svg", "L_1"))
    for k, t in enumerate(times, 1):
        img, rt = flow_morph(cc, t, h.upper, h.lower, cfg=cfg)
        paths.append(write_points_csv(out / f"fig5_frame{k}_image.csv", img))
        paths.append(write_points_csv(out / f"fig5_frame{k}_right.csv", rt))
        svg = Svg()
        svg.points(img, UPPER_COLOR, r=0.8)
        svg.points(rt, LOWER_COLOR, r=0.8)
        paths.append(svg.save(out / f"fig5_frame{k}.svg", f"t = {t}"))
    r1 = right_hull(d, 1.0).points
    paths.append(write_points_csv(out / f"fig5_frame{len(times) + 1}_right.csv", r1))
    svg = Svg()
    svg.points(r1, LOWER_COLOR, r=0.8)
    paths.append(svg.save(out / f"fig5_frame{len(times) + 1}.svg", "R_1"))
    return paths


RECIPES = {1: figure1, 2: figure2, 3: figure3, 4: figure4, 5: figure5}


def make_figure(fig_id: int, out=None, cfg: RunConfig | None = None, **kw) -> list[Path]:
    cfg = cfg or RunConfig()
    if fig_id not in RECIPES:
        raise ValueError(f"unknown figure id {fig_id}; choose from 1-5")
    out = Path(out or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    kw = {k: v for k, v in kw.items() if v is not None}
    return RECIPES[fig_id](out, cfg, **kw)
