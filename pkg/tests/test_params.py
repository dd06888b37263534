import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loewnerlab.errors import DegenerateC, NoRootOnRay
from loewnerlab.params import (PhaseKind, alpha_of, boundary_on_ray, classify_phase, critical_time,
                               family1_params, family2_params, phase_boundary,
                               polished_boundary_point, segment_count_sign, to_first_quadrant)

R2 = math.sqrt(2)


def close(a, b, tol=1e-12):
    return abs(complex(a) - complex(b)) <= tol


def test_circle_case():
    p = family1_params(3 * R2)
    assert close(p.A, 2 * R2) and close(p.B, R2)
    assert close(p.alpha, -1) and close(p.beta, 2)


def test_zero_and_imaginary():
    p = family1_params(0)
    assert close(p.A, 2j) and close(p.B, -2j) and close(p.alpha, 0.5)
    p = family1_params(3j)
    assert close(p.A, 4j) and close(p.B, -1j) and close(p.alpha, 0.2)


def test_real_c():
    assert close(family1_params(5).alpha, -1 / 3)
    assert close(family1_params(2).alpha, 0.5 + 0.5j / math.sqrt(3))


def test_family2_examples():
    q = family2_params(0)
    assert close(q.D, 2) and close(q.E, -2) and close(q.delta, 0.5)
    q = family2_params(3j * R2)
    assert close(q.D, 2j * R2) and close(q.E, 1j * R2) and close(q.delta, -1)
    assert family2_params(3 * R2).delta.real == pytest.approx(0.1362, abs=1e-4)


def test_degenerate():
    for c in (4, -4):
        with pytest.raises(DegenerateC):
            family1_params(c)
    for c in (4j, -4j):
        with pytest.raises(DegenerateC):
            family2_params(c)


def test_degenerate_is_value_error():
    with pytest.raises(ValueError):
        family1_params(4)


def test_classification():
    assert classify_phase(2).kind is PhaseKind.POSITIVE
    assert classify_phase(5).kind is PhaseKind.NEGATIVE
    assert classify_phase(3j).kind is PhaseKind.POSITIVE
    pt = polished_boundary_point(3.687 + 0.511j)
    ph = classify_phase(pt)
    assert ph.kind is PhaseKind.TRANSITIONAL
    assert ph.critical_time == pytest.approx(critical_time(ph.im_alpha))
    assert 0 < ph.critical_time < 1


def test_classify_symmetric_quadrants():
    for c in (3.31 + 1.15j, 5 + 2j):
        kinds = {classify_phase(z).kind for z in (c, -c, np.conj(c), -np.conj(c))}
        assert len(kinds) == 1
    assert classify_phase(3.31 + 1.15j).kind is PhaseKind.POSITIVE
    assert classify_phase(5 + 2j).kind is PhaseKind.NEGATIVE
    c = 3.31 + 1.15j
    assert to_first_quadrant(-c) == c


def test_derivatives_of_roots():
    # dA/dc = beta and dB/dc = alpha
    c, h = 2.3 + 1.1j, 1e-6
    p = family1_params(c)
    dA = (family1_params(c + h).A - family1_params(c - h).A) / (2 * h)
    dB = (family1_params(c + h).B - family1_params(c - h).B) / (2 * h)
    assert close(dA, p.beta, 1e-7) and close(dB, p.alpha, 1e-7)


def test_segment_count_sign():
    assert segment_count_sign(0) == 2
    assert segment_count_sign(3j * R2) == 1


def test_boundary():
    pb = phase_boundary(60)
    assert pb.min_modulus == pytest.approx(3.722, abs=1e-3)
    assert np.all(np.abs(alpha_of(pb.points).real) < 1e-9)
    assert pb.coverage > 0.4
    with pytest.raises(NoRootOnRay):
        boundary_on_ray(1.5)


first_quadrant = st.builds(lambda r, th: r * complex(math.cos(th), math.sin(th)),
                           st.floats(0.01, 9.9), st.floats(1e-3, math.pi / 2 - 1e-3))


@settings(max_examples=300, deadline=None)
@given(first_quadrant)
def test_identities(c):
    if abs(c - 4) < 1e-6:
        return
    p = family1_params(c)
    q = family2_params(c)
    scale = max(1.0, abs(c))
    assert close(p.A + p.B, c, 1e-12 * scale)
    assert close(p.A * p.B, 4, 1e-12 * scale ** 2)
    assert close(p.alpha + p.beta, 1, 1e-12)
    assert close(q.D * q.E, -4, 1e-12 * scale ** 2)
    assert close(q.delta + q.epsilon, 1, 1e-12)
    assert close(q.delta, alpha_of(-1j * c), 1e-10)
