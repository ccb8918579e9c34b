import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tricorn_lab.core import (
    OMEGA,
    AntiQuadratic,
    apply,
    apply_second,
    escape_counts,
    escape_time,
    holomorphic_iterate,
    iterate,
    tricorn_member,
)

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)
points = st.builds(complex, finite, finite)


def test_apply_beta_of_chebyshev():
    assert apply(-2, 2) == 2


def test_orbit_of_zero_is_preperiodic_at_minus_two():
    f = AntiQuadratic(-2)
    orbit = [0j]
    for _ in range(4):
        orbit.append(f(orbit[-1]))
    assert orbit == [0, -2, 2, 2, 2]


def test_apply_at_i():
    assert apply(1j, 1 + 1j) == -1j


@pytest.mark.parametrize("bad", [complex(math.nan, 0), complex(0, math.inf)])
def test_non_finite_rejected(bad):
    with pytest.raises(ValueError):
        apply(0, bad)
    with pytest.raises(ValueError):
        AntiQuadratic(bad)


def test_second_iterate_examples():
    assert apply_second(-2, 0) == 2
    assert apply_second(0.25, 0.5) == 0.5
    z = 0.7 * cmath.exp(0.3j)
    assert apply_second(0, z) == pytest.approx(0.7 ** 4 * cmath.exp(1.2j), abs=1e-15)


@given(points, points)
def test_second_iterate_matches_two_steps(c, z):
    two = apply(c, apply(c, z))
    assert abs(apply_second(c, z) - two) <= 8 * np.spacing(max(1.0, abs(two)))


@given(points, points, st.integers(0, 6))
def test_holomorphic_iterate_parity(c, z, k):
    q, dq, conj = holomorphic_iterate(c, z, k)
    direct = iterate(c, z, k)
    assert conj == (k % 2 == 1)
    assert abs((q.conjugate() if conj else q) - direct) <= 1e-9 * max(1.0, abs(direct))


def test_holomorphic_iterate_derivative():
    c, z, h = 0.3 - 0.2j, 0.4 + 0.1j, 1e-6
    _, dq, _ = holomorphic_iterate(c, z, 4)
    fd = (holomorphic_iterate(c, z + h, 4)[0] - holomorphic_iterate(c, z - h, 4)[0]) / (2 * h)
    assert dq == pytest.approx(fd, rel=1e-8)


def test_escape_time_examples():
    r = escape_time(1, 0, 100, 4)
    assert r.escaped and r.iterations == 3 and r.final_modulus == 5
    assert r.potential == pytest.approx(math.log(5) / 8)
    r = escape_time(-2, 0, 1000, 4)
    assert not r.escaped and r.iterations == 1000 and r.potential == 0
    r = escape_time(0, 3, 10, 2)
    assert r.escaped and r.iterations == 0 and r.final_modulus == 3


def test_escape_time_validation():
    with pytest.raises(ValueError):
        escape_time(1, 0, 10, 2.5)
    with pytest.raises(ValueError):
        escape_time(0, 0, 0)


def test_membership_examples():
    assert tricorn_member(0)
    assert not tricorn_member(2)
    assert tricorn_member(-1.7548776662466927)


def test_escape_counts_convention():
    c = np.array([0, 2, 1, -2], dtype=complex)
    counts = escape_counts(c, 0, 100)
    # iterations + 1 for escapes, 0 for bounded orbits
    assert counts.tolist() == [0, 3, 4, 0]


@settings(max_examples=50)
@given(points)
def test_escape_is_monotone_beyond_radius(c):
    c = c / 2
    z, radius = 0j, 2 + abs(c)
    seen = False
    for _ in range(40):
        nz = z.conjugate() ** 2 + c
        if abs(z) > radius:
            seen = True
            assert abs(nz) > abs(z)
        if abs(nz) > 1e100:
            break
        z = nz
    assert seen or abs(z) <= radius


def test_threefold_and_conjugate_symmetry():
    rng = np.random.default_rng(7)
    r = 2 * np.sqrt(rng.random(1000))
    c = r * np.exp(2j * np.pi * rng.random(1000))
    base = escape_counts(c, 0, 200) == 0
    assert np.array_equal(base, escape_counts(np.conj(c), 0, 200) == 0)
    # rotation by omega is exact only up to rounding, so a few boundary points may differ
    rot = escape_counts(OMEGA * c, 0, 200) == 0
    assert np.mean(base == rot) >= 0.995
