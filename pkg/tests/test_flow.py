import math

import numpy as np
import pytest

from loewnerlab.analytics import time1_hull
from loewnerlab.driver import Driver
from loewnerlab.flow import (ALIVE, CAPTURED, flow_morph, flow_point, flow_points, hull_bounds,
                             hull_grid, right_hull)
from loewnerlab.geometry import densify, directed_distance, disk_points, hausdorff, nearest_distance, segment_points
from loewnerlab.params import family1_params

R2 = math.sqrt(2)
EX1 = Driver.sqrt_one_minus_t(3 * R2)
EX2 = Driver.sqrt_tau_plus_t(3j * R2)


def test_disk_map():
    z = 3 + 3j
    st = flow_point(z, EX1)
    assert not st.captured
    assert abs(st.g - (z + 2 / (z - 2 * R2))) <= 1e-6 * abs(z)


def test_disk_center_captured():
    st = flow_point(2 * R2, EX1)
    assert st.captured and st.lifetime <= 1


def test_root_trajectories(rng):
    # w = g / sqrt(1 - t) has a fixed point at each root with linear rate 1/2 - root^2 / 8
    # in s = -log(1 - t); above rate ~1 the roundoff growth by 1 - 1e-6 is visible, so
    # only roots whose trajectory is not strongly repelling are held to 1e-6
    checked = 0
    for _ in range(40):
        c = complex(*rng.uniform(0.2, 6, 2))
        if abs(c - 4) < 0.1:
            continue
        p = family1_params(c)
        for root in (p.A, p.B):
            if (0.5 - root ** 2 / 8).real > 1:
                continue
            checked += 1
            st = flow_point(root, Driver.sqrt_one_minus_t(c), trajectory=True)
            t, g = map(np.asarray, st.trajectory)
            keep = t <= 1 - 1e-6
            assert np.max(np.abs(g[keep] - root * np.sqrt(1 - t[keep]))) <= 1e-6 * max(1, abs(root))
    assert checked >= 30


def test_monotone_escape():
    d = Driver.sqrt_one_minus_t(2 + 1.5j)
    st = flow_point(2.5 + 0.4j, d, trajectory=True)
    _, g = map(np.asarray, st.trajectory)
    assert np.all(np.diff(g.real) >= -1e-12)


def test_lower_half_plane_monotone():
    d = Driver.sqrt_one_minus_t(2 + 1.5j)
    for z in (1 + 2j, 3 + 1.6j, -1 + 1.5j):
        st = flow_point(z, d, trajectory=True)
        t, g = map(np.asarray, st.trajectory)
        assert np.all(g.imag - d.eval(np.minimum(t, 1)).imag >= -1e-6)


def test_vectorized_matches_single():
    zs = np.array([3 + 3j, 1 - 2j, 5 + 0.5j])
    r = flow_points(zs, EX1)
    for z, g in zip(zs, r.g):
        assert flow_point(z, EX1).g == pytest.approx(g, abs=1e-12)


def test_bounds():
    (x0, x1), _ = hull_bounds(EX1)
    assert (x0, x1) == pytest.approx((0, 3 * R2))
    (x0, x1), _ = hull_bounds(EX2)
    assert x0 == x1 == 0
    (x0, x1), (y0, y1) = hull_bounds(Driver.constant(1 + 2j))
    assert x0 == x1 == 1 and y0 == y1 == 2


def test_grid_segment_case():
    g = hull_grid(EX2, region=(-1, 1, -1, 7), nx=41, ny=80, workers=1)
    cap = g.captured_points()
    assert len(cap) and g.unknown_fraction() < 0.01
    seg = segment_points(0, 4j * R2, 2000)
    assert hausdorff(cap, seg) <= 2 * g.cell_diag


def test_grid_constant_driver():
    g = hull_grid(Driver.constant(0), region=(-1, 1, -3, 3), nx=41, ny=60, workers=1)
    assert hausdorff(g.captured_points(), segment_points(-2j, 2j, 2000)) <= 2 * g.cell_diag


def test_grid_in_strip():
    d = Driver.sqrt_one_minus_t(5 + 2j)
    g = hull_grid(d, nx=60, ny=40, workers=1)
    (x0, x1), _ = hull_bounds(d)
    w = g.cell_diag
    cap = g.captured_points()
    assert len(cap) and np.all((cap.real >= x0 - w) & (cap.real <= x1 + w))


def test_grid_parallel_matches_serial():
    a = hull_grid(EX1, region=(0, 6, -2, 2), nx=30, ny=20, workers=1)
    b = hull_grid(EX1, region=(0, 6, -2, 2), nx=30, ny=20, workers=2)
    assert np.array_equal(a.status, b.status)


def test_grid_disk_case():
    g = hull_grid(EX1, region=(0, 6, -2, 2), nx=60, ny=40, workers=1)
    disk = disk_points(2 * R2, R2, g.cell_diag / 4)
    assert hausdorff(g.captured_points(), disk) <= 2 * g.cell_diag


def test_right_hull_disk_case():
    r = right_hull(EX1, 1.0, n=2000).points
    assert np.max(np.abs(r.imag)) < 1e-9
    assert hausdorff(r, segment_points(0, 4 * R2, 8000)) <= 2e-3


def test_right_hull_segment_case():
    r = right_hull(EX2, 1.0, n=2000).points
    assert np.max(np.abs(np.abs(r - 2j * R2) - R2)) <= 1e-3


def test_right_hull_real_driver():
    d = Driver.from_function(lambda t: math.sin(4 * t), 1.0, 201)
    r = right_hull(d, 1.0, n=400).points
    assert np.max(np.abs(r.imag)) < 1e-6


@pytest.fixture(scope="module")
def fig5_hull():
    return time1_hull(3.31 + 1.15j, samples=8000)


def test_morph_identity(fig5_hull):
    h = fig5_hull
    img, rt = flow_morph(h.c, 0.0, h.upper, h.lower)
    assert np.allclose(rt, [h.c])
    L1 = np.concatenate([h.upper.z[1:], h.lower.z[1:]])
    assert len(img) == len(L1)
    assert directed_distance(L1, img) < 1e-12


def test_morph_half(fig5_hull):
    # every flowed point lies on sqrt(1-t) L_1, and those parts of sqrt(1-t) L_1 away from
    # R_t are reached; the second bound is set by the trace sample spacing
    h, t = fig5_hull, 0.5
    img, rt = flow_morph(h.c, t, h.upper, h.lower)
    s = math.sqrt(1 - t)
    L = np.concatenate([densify(h.upper.z * s, 1e-3), densify(h.lower.z * s, 1e-3)])
    assert directed_distance(img, L) <= 1e-2
    gap = s * max(np.abs(np.diff(h.upper.z)).max(), np.abs(np.diff(h.lower.z)).max())
    far = L[nearest_distance(L, rt) > 1e-2]
    assert directed_distance(far, img) <= max(1e-2, gap / 2)


def test_morph_collapse(fig5_hull):
    h = fig5_hull
    sizes = [np.abs(flow_morph(h.c, t, h.upper, h.lower)[0]).max() for t in (0.9, 0.99, 0.999)]
    assert sizes[0] > sizes[1] > sizes[2]
    assert sizes[2] < 0.2


def test_status_codes():
    r = flow_points([2 * R2, 3 + 3j], EX1)
    assert list(r.status) == [CAPTURED, ALIVE]
