import math
import warnings

import numpy as np
import pytest

from loewnerlab.analytics import spiral_diagnostics
from loewnerlab.driver import Driver
from loewnerlab.errors import DegenerateC, LipGuardExceeded
from loewnerlab.flow import hull_grid
from loewnerlab.geometry import directed_distance, disk_points, hausdorff, segment_points
from loewnerlab.params import family1_params, family2_params
from loewnerlab.trace import (LOWER, UPPER, ElementaryStep, elementary_inverse, family1_grid,
                              left_hull, sqrt_t_hull, tip_residual, trace_driver,
                              trace_tips_family1, trace_tips_family2, zipper_trace)

R2 = math.sqrt(2)


def test_residual_at_start():
    for c in (3 * R2, 3.31 + 1.15j, 2j):
        assert abs(tip_residual(c, 0.0, family1_params(c))) < 1e-14


def test_residual_near_endpoint_large():
    p = family1_params(3 * R2)
    with pytest.raises(ValueError):
        tip_residual(p.B, 0.999, p)
    assert abs(tip_residual(R2 + 1e-8, 0.5, p)) > 1


def test_residual_segment_case():
    q = family2_params(3j * R2)
    for t in (0.1, 0.5, 1.0):
        assert abs(tip_residual(4j * math.sqrt(2 * t), t, q)) < 1e-13


def test_trace_residuals():
    up, lo = trace_tips_family1(3.31 + 1.15j, family1_grid(800, 1 - 1e-6))
    for tr in (up, lo):
        assert np.nanmax(np.abs(tr.residual)) <= 1e-10
        for k in (0, len(tr) // 2, len(tr) - 1):
            assert abs(tip_residual(tr.z[k], tr.t[k], family1_params(tr.c), tr.branch_state(k))) <= 1e-10


def test_spiral_case():
    c = 3.31 + 1.15j
    p = family1_params(c)
    up, lo = trace_tips_family1(c, family1_grid(3000, 1 - 1e-6))
    sa = spiral_diagnostics(up, p.A)
    sb = spiral_diagnostics(lo, p.B)
    assert sa.argument[-1] - sa.argument[0] > 4 * math.pi
    assert sa.tail_monotone and sb.tail_monotone
    assert sa.winding > 0 > sb.winding   # counterclockwise about A, clockwise about B
    assert abs(up.tip - p.A) < abs(up.tip - p.B)
    assert abs(lo.tip - p.B) < abs(lo.tip - p.A)


def test_loop_case():
    # both sides close up at B; the approach is slow, see the endpoint acceptance check
    p = family1_params(5 + 2j)
    up, lo = trace_tips_family1(5 + 2j, family1_grid(2000, 1 - 1e-8))
    for tip in (up.tip, lo.tip):
        assert abs(tip - p.B) < 1e-2 and abs(tip - p.B) < abs(tip - p.A) / 100


def test_imaginary_c_no_spiral():
    up, lo = trace_tips_family1(3j, family1_grid(2000, 1 - 1e-8))
    assert abs(up.tip - 4j) < 1e-3 and abs(lo.tip + 1j) < 1e-3
    assert np.max(np.abs(up.z.real)) < 1e-9 and np.max(np.abs(lo.z.real)) < 1e-9


def test_reflection_equivariance():
    c, g = 3.31 + 1.15j, family1_grid(400, 1 - 1e-6)
    up, lo = trace_tips_family1(c, g)
    up2, lo2 = trace_tips_family1(np.conj(c), g)
    # conjugation swaps the roles of the two sides
    assert np.max(np.abs(np.conj(up.z) - lo2.z)) <= 1e-10
    assert np.max(np.abs(np.conj(lo.z) - up2.z)) <= 1e-10


def test_family2_disjoint():
    c = -1j * (3.31 + 1.15j)
    up, lo = trace_tips_family2(c, 0.01, np.linspace(0, 1, 400))
    assert np.min(np.abs(up.z[1:, None] - lo.z[None, 1:])) > 1e-4


def test_family2_large_tau():
    # the driver is nearly constant on [0, 1], so the hull is close to a vertical slit
    up, lo = trace_tips_family2(2 + 1j, 1e4, np.linspace(0, 1, 50))
    start = (2 + 1j) * 100
    assert abs(up.tip - (start + 2j)) < 0.05 and abs(lo.tip - (start - 2j)) < 0.05


def test_family2_symmetric():
    up, lo = trace_tips_family2(0, 1.0, np.linspace(0, 1, 50))
    assert np.allclose(up.z.real, 0, atol=1e-12) and np.allclose(lo.z, np.conj(up.z), atol=1e-12)
    assert up.tip.imag == pytest.approx(2 * math.sqrt(1.0), rel=1e-9)


def test_sqrt_t_hull_examples():
    h = sqrt_t_hull(3j * R2, 1.0)
    assert h.count == 1
    a, b = h.segments[0]
    assert a == 0 and abs(b - 4j * R2) < 1e-12
    h = sqrt_t_hull(0, 1.0)
    assert h.count == 2
    assert {complex(round(s[1].imag, 12) * 1j) for s in h.segments} == {2j, -2j}
    h = sqrt_t_hull(1.7, 0.3)
    assert h.count == 2
    assert abs(h.upper - np.conj(h.lower)) < 1e-12
    with pytest.raises(DegenerateC):
        sqrt_t_hull(4j)


def test_elementary_inverse_examples():
    st = ElementaryStep.make(0.3, 0.0, 1.0)       # D = 2, E = -2, delta = 1/2
    assert elementary_inverse(0.3 + st.D, st) == 0.3
    out = elementary_inverse(0.3 + 5.0, st)
    assert abs(out.imag) < 1e-14 and out.real > 0.3
    st = ElementaryStep.make(0, 3j * R2, 1.0)
    assert abs(elementary_inverse(3j * R2, st, side=UPPER) - 4j * R2) < 1e-12
    assert abs(elementary_inverse(3j * R2 + 1e-9, st, side=LOWER) - 4j * R2) < 1e-8


def test_zipper_closed_form():
    d = Driver.sqrt_tau_plus_t(3j * R2)
    ts = [0.0, 0.25, 0.5, 1.0]
    u1, _ = zipper_trace(d, 1, times=ts)
    u64, _ = zipper_trace(d, 64, times=ts)
    assert np.max(np.abs(u1.z - u64.z)) <= 1e-10
    assert np.max(np.abs(u1.z - 4j * np.sqrt(2 * np.array(ts)))) <= 1e-10


def test_zipper_scaling():
    d, a = Driver.sqrt_one_minus_t(3.31 + 1.15j), 1.7
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LipGuardExceeded)
        zu, zl = zipper_trace(d, 300, 0.99)
        ru, rl = zipper_trace(d.rescale(a), 300, 0.99 * a * a)
    assert np.max(np.abs(a * zu.z - ru.z)) <= 1e-8
    assert np.max(np.abs(a * zl.z - rl.z)) <= 1e-8
    assert np.allclose(ru.t, a * a * zu.t, atol=1e-12)


def test_zipper_guard_warning():
    with pytest.warns(LipGuardExceeded):
        zipper_trace(Driver.sqrt_one_minus_t(3.31 + 1.15j), 10, 0.99)


def test_zipper_circle():
    d = Driver.sqrt_one_minus_t(3 * R2)
    up, lo = zipper_trace(d, 10_000, 1 - 1e-6)
    z = np.concatenate([up.z, lo.z])
    assert np.max(np.abs(np.abs(z - 2 * R2) - R2)) < 1e-2


def test_zipper_vs_grid():
    d1 = Driver.sqrt_one_minus_t(3 * R2)
    g = hull_grid(d1, region=(0, 6, -2, 2), nx=60, ny=40, workers=1)
    up, lo = zipper_trace(d1, 4000, 1 - 1e-6)
    boundary = np.concatenate([up.z, lo.z])
    cap = g.captured_points()
    # every traced boundary point is near a captured cell and the disk is within reach
    assert directed_distance(boundary, cap) <= 2 * g.cell_diag
    assert directed_distance(cap, disk_points(2 * R2, R2, 0.01)) <= 2 * g.cell_diag

    d2 = Driver.sqrt_tau_plus_t(3j * R2)
    g = hull_grid(d2, region=(-1, 1, -1, 7), nx=41, ny=80, workers=1)
    up, _ = zipper_trace(d2, 64, times=np.linspace(0, 1, 200))
    assert hausdorff(up.z, g.captured_points()) <= 2 * g.cell_diag


def test_trace_driver_scaled():
    d = Driver.sqrt_one_minus_t(2 + 1j).rescale(1.5).translate(0.4j)
    up, lo = trace_driver(d, 0.5 * d.horizon, n=200)
    assert up.z[0] == pytest.approx(d.eval(0))
    assert up.t[-1] == pytest.approx(0.5 * d.horizon)


def test_left_hull_disk_case():
    h = left_hull(Driver.sqrt_one_minus_t(3 * R2), n=2000)
    pts = h.points
    assert np.max(np.abs(np.abs(pts - 2 * R2) - R2)) < 1e-3 or hausdorff(
        pts, disk_points(2 * R2, R2, 0.02)) < 0.05
