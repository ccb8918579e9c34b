import json
import math

import numpy as np
import pytest

from tricorn_lab.core import apply_second
from tricorn_lab.koenigs import (
    build_chart,
    chebyshev_poincare,
    closed_form_constants,
    coefficient_A,
    estimate_B_constants,
    koenigs_derivative,
    koenigs_eval,
    poincare_eval,
)
from tricorn_lab.orbits import solve_c_n


@pytest.fixture(scope="module")
def hat():
    return build_chart(-2)


@pytest.fixture(scope="module")
def b_constants():
    return estimate_B_constants()


def test_chart_at_chebyshev(hat):
    assert hat.lam == pytest.approx(16, abs=1e-12)
    assert hat.beta == pytest.approx(2, abs=1e-14)
    # a = 1 / Psi'(1) with Psi(w) = 2 cos(pi sqrt(w) / 2)
    psi_prime = -math.pi / 2 * math.sin(math.pi / 2)
    assert hat.a_c == pytest.approx(1 / psi_prime, abs=1e-10)
    assert koenigs_eval(hat, 0) == pytest.approx(1, abs=1e-14)
    assert koenigs_eval(hat, 2) == 0


def test_chart_json(hat):
    doc = json.loads(json.dumps(hat.to_json()))
    assert set(doc) == {"c", "beta", "lambda", "a_c", "lin_radius"}


def test_lambda_near_c1():
    chart = build_chart(solve_c_n(1).c_n)
    assert abs(chart.lam - 16) < 0.5


def test_interval_endpoints(hat):
    assert koenigs_eval(hat, 1) == pytest.approx(4 / 9, abs=1e-12)
    assert koenigs_eval(hat, -1) == pytest.approx(16 / 9, abs=1e-12)


def test_poincare_examples(hat):
    assert poincare_eval(hat, 4) == pytest.approx(-2, abs=1e-12)
    assert poincare_eval(hat, 1) == pytest.approx(0, abs=1e-12)
    assert poincare_eval(hat, 0) == pytest.approx(2, abs=1e-14)


def test_chebyshev_identity(hat):
    w = np.arange(0, 401) / 100
    got = np.array([poincare_eval(hat, x) for x in w])
    assert np.max(np.abs(got - chebyshev_poincare(w))) < 1e-8


@pytest.mark.parametrize("c", [-2, -1.9 + 0.05j, -1.8, -1.95 - 0.1j])
def test_linearization_and_inverse(c):
    chart = build_chart(c)
    rng = np.random.default_rng(3)
    # inside the domain where the inverse branch nearest beta inverts f^2
    r = 0.15 * abs(chart.beta) * np.sqrt(rng.random(1000))
    zs = chart.beta + r * np.exp(2j * np.pi * rng.random(1000))
    worst_fe = worst_inv = 0.0
    for z in zs:
        k = koenigs_eval(chart, z)
        lhs = koenigs_eval(chart, apply_second(c, z))
        worst_fe = max(worst_fe, abs(lhs - chart.lam * k) / (1 + abs(chart.lam * k)))
        worst_inv = max(worst_inv, abs(poincare_eval(chart, k) - z))
    assert worst_fe < 1e-9
    assert worst_inv < 1e-8


def test_derivative_matches_difference(hat):
    z, h = 0.3 + 0.2j, 1e-6
    fd = (koenigs_eval(hat, z + h) - koenigs_eval(hat, z - h)) / (2 * h)
    assert koenigs_derivative(hat, z) == pytest.approx(fd, rel=1e-7)


def test_coefficients_at_chebyshev(hat):
    assert abs(coefficient_A(-2, 0, hat)) < 1e-12
    assert coefficient_A(-2, 2, hat).real == pytest.approx(64 / math.pi ** 2, rel=1e-6)


def test_coefficient_index_checked():
    with pytest.raises(ValueError):
        coefficient_A(-2, 5)


@pytest.mark.parametrize("n", range(1, 6))
def test_A0_at_cn(n):
    rec = solve_c_n(n)
    chart = build_chart(rec.c_n)
    a0 = coefficient_A(rec.c_n, 0, chart)
    assert abs(a0 * chart.lam ** n - 1) < 1e-6


def test_b_constants(b_constants):
    b0, b0s = b_constants
    ref = closed_form_constants()
    assert b0.real == pytest.approx(896 / (15 * math.pi ** 2), rel=1e-4)
    assert b0s.real == pytest.approx(-256 / (15 * math.pi ** 2), rel=1e-4)
    assert abs(b0.imag) < 1e-4 and abs(b0s.imag) < 1e-4
    assert ref["b0"] ** 2 - ref["b0_star"] ** 2 == pytest.approx(33.64, abs=5e-3)
    assert abs(b0) ** 2 - abs(b0s) ** 2 == pytest.approx(33.64, abs=5e-3)
