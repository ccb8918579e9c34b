import cmath
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tricorn_lab.rays import (
    as_angle,
    boettcher,
    green_potential,
    trace_dynamical_ray,
    trace_parameter_ray,
)


def chebyshev_phi(z):
    # Boettcher map of z^2 - 2, branch with Phi(z) ~ z
    s = cmath.sqrt(z * z - 4)
    w = (z + s) / 2
    return w if abs(w) >= 1 else (z - s) / 2


@pytest.fixture(scope="module")
def ray_minus2():
    return trace_dynamical_ray(-2, 0, g_hi=1.0)


@pytest.fixture(scope="module")
def ray_zero_third():
    return trace_dynamical_ray(0, (1, 3))


def test_green_examples():
    assert green_potential(0, 3).value == pytest.approx(math.log(3), abs=1e-14)
    assert green_potential(-2, 3).value == pytest.approx(math.log(abs(chebyshev_phi(3))), abs=1e-14)
    g = green_potential(-2, 2)
    assert g.value == 0 and math.isinf(g.resid)


def test_green_resid_small_at_depth():
    assert green_potential(0.3 + 0.5j, 1.5 + 1j, depth=60).resid < 1e-12


@settings(max_examples=60)
@given(st.floats(0, 2 * math.pi), st.floats(2.5, 6), st.sampled_from([0, -2, 0.25, 0.3 + 0.4j, -1 + 0.2j]))
def test_green_doubles(theta, r, c):
    z = r * cmath.exp(1j * theta)
    g0 = green_potential(c, z).value
    g1 = green_potential(c, z.conjugate() ** 2 + c).value
    assert abs(g1 - 2 * g0) < 1e-9


def test_boettcher_examples():
    assert boettcher(0, 2 + 1j) == 2 + 1j
    assert boettcher(-2, 3) == pytest.approx((3 + math.sqrt(5)) / 2, abs=1e-14)
    for z in (2.5 + 1j, -3 + 0.5j, 0.1 + 2.5j):
        assert boettcher(-2, z) == pytest.approx(chebyshev_phi(z), abs=1e-12)


@settings(max_examples=60)
@given(st.floats(0.1, 2 * math.pi - 0.1), st.floats(3, 8), st.sampled_from([0, -2, 0.3 + 0.4j, -1 + 0.2j]))
def test_boettcher_functional_equation(theta, r, c):
    z = r * cmath.exp(1j * theta)
    lhs = boettcher(c, z.conjugate() ** 2 + c)
    rhs = boettcher(c, z).conjugate() ** 2
    assert abs(lhs - rhs) < 1e-9 * abs(rhs)
    # angle map t -> -2t
    d = (cmath.phase(lhs) + 2 * cmath.phase(boettcher(c, z))) / (2 * math.pi)
    assert abs(d - round(d)) < 1e-8


def test_boettcher_rejects_bounded_orbit():
    with pytest.raises(ArithmeticError):
        boettcher(-1, 0.1)


def test_as_angle_reduces():
    assert as_angle((4, 3)) == as_angle((1, 3))
    assert as_angle(-0.25).numerator == 3


def test_chebyshev_ray(ray_minus2):
    pts, gs = ray_minus2.points, ray_minus2.potentials
    assert np.all(np.diff(gs) < 0)
    assert np.all(np.abs(pts.imag) < 1e-12)
    assert np.all((pts.real > 2) & (pts.real <= 2 * math.cosh(1.0) + 1e-12))
    # the ray of angle 0 is 2 cosh(g) for z^2 - 2
    assert np.allclose(pts.real, 2 * np.cosh(gs), rtol=1e-9, atol=1e-12)
    assert ray_minus2.landing_estimate == pytest.approx(2, abs=1e-8)


def test_radial_ray_at_zero(ray_zero_third):
    target = cmath.exp(2j * math.pi / 3)
    pts, gs = ray_zero_third.points, ray_zero_third.potentials
    assert np.allclose(pts, np.exp(gs) * target, atol=1e-9)
    assert ray_zero_third.landing_estimate == pytest.approx(target, abs=1e-8)


def test_ray_continuity_and_angles(ray_zero_third):
    pts = ray_zero_third.points
    steps = np.abs(np.diff(pts))
    assert np.all(steps <= 0.5 * np.maximum(1, np.abs(pts[:-1])))
    for g, z in ray_zero_third.samples[::10]:
        ang = cmath.phase(boettcher(0, z)) / (2 * math.pi)
        assert abs((ang - 1 / 3 + 0.5) % 1 - 0.5) < 1e-8


def test_parabolic_ray_approaches_half():
    tr = trace_dynamical_ray(0.25, 0)
    pts = tr.points
    assert np.all(pts.real > 0.5) and np.all(np.abs(pts.imag) < 1e-9)
    assert np.all(np.diff(pts.real) < 0)
    # the approach is only logarithmic, so no Cauchy tail at 1e-8
    assert tr.landing_estimate is None
    assert pts[-1].real < 0.6


def test_ray_symmetry_at_real_c():
    a = trace_dynamical_ray(-1, (1, 5), g_lo=1e-3)
    b = trace_dynamical_ray(-1, (4, 5), g_lo=1e-3)
    assert np.allclose(a.points, np.conj(b.points), atol=1e-9)


def test_ray_serialization(ray_zero_third):
    lines = ray_zero_third.to_csv().splitlines()
    assert lines[0] == "potential,re,im" and len(lines) == len(ray_zero_third.samples) + 1
    doc = json.loads(ray_zero_third.dumps())
    assert doc["kind"] == "dynamical" and doc["angle"] == {"num": 1, "den": 3}
    assert len(doc["samples"][0]) == 3 and len(doc["landing"]) == 2


def test_ray_rejects_bad_schedule():
    with pytest.raises(ValueError):
        trace_dynamical_ray(0, 0, g_hi=1e-3, g_lo=1.0)


@pytest.fixture(scope="module")
def param_rays():
    return {k: trace_parameter_ray((k, 2)) for k in (0, 1)}


def test_parameter_ray_zero_is_real_right(param_rays):
    pts = param_rays[0].points
    assert np.all(np.abs(pts.imag) < 1e-9) and np.all(pts.real > 0.25)
    assert np.all(np.diff(param_rays[0].potentials) < 0)


def test_parameter_ray_half_is_real_left(param_rays):
    pts = param_rays[1].points
    assert np.all(np.abs(pts.imag) < 1e-9) and np.all(pts.real < -2)


def test_parameter_ray_asymptote(param_rays):
    R = 1e6
    for k, tr in param_rays.items():
        g, c = tr.samples[0]
        assert g == pytest.approx(math.log(R))
        assert abs(c - R * cmath.exp(1j * math.pi * k)) / R < 1e-3


def test_parameter_ray_threefold(param_rays):
    third = trace_parameter_ray((1, 3), g_lo=1e-2)
    zero = trace_parameter_ray(0, g_lo=1e-2)
    omega = cmath.exp(2j * math.pi / 3)
    assert np.allclose(third.points, omega * zero.points, atol=1e-8)
