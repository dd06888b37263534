import math

import numpy as np
import pytest

from loewnerlab.analytics import (HullKind, Property, accessible_point_count, critical_time_check,
                                  time1_hull, verify_property)
from loewnerlab.driver import Driver
from loewnerlab.params import critical_time, family1_params, polished_boundary_point

TRANSITIONAL = polished_boundary_point(3.687 + 0.511j)


@pytest.fixture(scope="module")
def hulls():
    return {c: time1_hull(c) for c in (3.31 + 1.15j, 5 + 2j, TRANSITIONAL)}


def test_kinds(hulls):
    assert hulls[3.31 + 1.15j].kind is HullKind.SIMPLE_ARC
    assert hulls[5 + 2j].kind is HullKind.LOOP_WITH_INTERIOR
    assert hulls[TRANSITIONAL].kind is HullKind.LOOP_WITH_TAIL


def test_loop_interior_is_captured(hulls):
    h = hulls[5 + 2j]
    assert len(h.interior) > 0
    assert h.oracle_checked > 0 and h.oracle_captured == h.oracle_checked


def test_tail_hits_start(hulls):
    h = hulls[TRANSITIONAL]
    assert abs(h.hit_point - TRANSITIONAL) < 1e-5
    assert len(h.tail) > 0


def test_hull_reflection():
    c = 5 + 2j
    a, b = time1_hull(c, interior_density=10), time1_hull(np.conj(c), interior_density=10)
    assert b.kind is a.kind
    assert abs(b.A - np.conj(a.A)) < 1e-12 or abs(b.A - np.conj(a.B)) < 1e-12
    za = np.sort_complex(np.conj(np.concatenate([a.upper.z, a.lower.z])))
    zb = np.sort_complex(np.concatenate([b.upper.z, b.lower.z]))
    assert np.max(np.abs(za - zb)) < 1e-10


def test_critical_time():
    chk = critical_time_check(TRANSITIONAL)
    assert chk.gap <= 1e-3
    a = family1_params(TRANSITIONAL).alpha
    assert chk.t_formula == pytest.approx(critical_time(a.imag))
    with pytest.raises(ValueError):
        critical_time_check(3.31 + 1.15j)


def test_accessible_counts(hulls):
    assert accessible_point_count(hulls[3.31 + 1.15j]) == 2
    assert accessible_point_count(hulls[5 + 2j]) == 1


def test_translation_property():
    rep = verify_property(Property.TRANSLATION, Driver.sqrt_one_minus_t(2 + 1j).restrict(0.7),
                          n=800, a=0.5 - 0.3j)
    assert rep.passed and rep.hausdorff <= 1e-2


def test_reflection_property():
    rep = verify_property("Reflection", Driver.sqrt_tau_plus_t(1 + 2j, 0.5), n=800, axis="ImagAxis")
    assert rep.passed


def test_scaling_property():
    rep = verify_property("Scaling", Driver.sqrt_one_minus_t(1.5 + 2j).restrict(0.6), n=800, a=1.8)
    assert rep.passed
    assert rep.to_dict()["property"] == "Scaling"
