import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tricorn_lab.scaling import (
    DEFAULT_Z_GRID,
    aspect_ratio,
    build_frame,
    convergence_report,
    limit_map,
    max_error,
    rescaled_return,
    rho_n,
)

unit = st.floats(-1, 1)


@pytest.fixture(scope="module")
def report():
    return convergence_report(2, 6)


@pytest.mark.parametrize("n", range(7))
def test_frame_invariants(n):
    f = build_frame(n)
    assert f.N == 2 * n + 3
    assert f.alpha_n < 0 and f.k_n > 0
    assert abs(f.alpha_n) == pytest.approx(32 / math.pi * 16 ** n, rel=0.05)
    a_hat = -2 / math.pi
    assert f.k_n * f.alpha_n * f.lambda_cn ** n == pytest.approx(a_hat, rel=1e-9)


def test_frame_examples():
    assert build_frame(1).alpha_n == pytest.approx(-32 / math.pi * 16, rel=1e-6)
    assert build_frame(3).k_n == pytest.approx(16.0 ** -7, rel=0.05)
    with pytest.raises(ValueError):
        build_frame(7)


def test_frame_json():
    doc = json.loads(json.dumps(build_frame(2).to_json()))
    assert set(doc) == {"n", "N", "c_n", "lambda_cn", "alpha_n", "k_n", "b0", "b0_star"}


def test_rho_axes():
    f = build_frame(3)
    unit_scale = 2 ** 7 * f.k_n / (15 * math.pi ** 2)
    assert rho_n(f, 0) == 0
    # b0 - b0* = 9 * 2^7 / (15 pi^2) on the real axis, b0 + b0* = 5 * 2^7 / (15 pi^2) on the imaginary one
    assert rho_n(f, 0.7) == pytest.approx(unit_scale * 9 * 0.7, rel=1e-8)
    assert rho_n(f, 0.7j) == pytest.approx(unit_scale * 5 * 0.7j, rel=1e-8)
    with pytest.raises(ValueError):
        rho_n(f, 11)


@given(unit, unit, unit, unit, st.floats(-3, 3))
def test_rho_is_real_linear(a, b, c, d, lam):
    f = build_frame(2)
    s, t = complex(a, b), complex(c, d)
    scale = f.k_n * 10
    assert abs(rho_n(f, s + t) - rho_n(f, s) - rho_n(f, t)) < 1e-14 * scale
    assert abs(rho_n(f, lam * s) - lam * rho_n(f, s)) < 1e-14 * scale


def test_rescaled_return_at_center():
    assert abs(rescaled_return(build_frame(0), 0, 0)) < 1e-8
    vals = [abs(rescaled_return(build_frame(n), 0, 0)) for n in range(1, 7)]
    assert max(vals) < 1e-8
    with pytest.raises(ValueError):
        rescaled_return(build_frame(0), 0, 5)


def test_rescaled_return_near_limit():
    f = build_frame(4)
    g = rescaled_return(f, 0.5, 1)
    assert abs(g - (1 + 33.64 * 0.5)) < 0.01
    assert abs(g - limit_map(f, 0.5, 1)) < 1e-3


def test_convergence(report):
    errs = report.errors
    assert all(b <= 0.7 * a for a, b in zip(errs, errs[1:]))
    assert all(b <= a for a, b in zip(errs, errs[1:]))
    assert report.ratio < 0.5


def test_t_zero_column():
    errs = [max_error(n, [0], DEFAULT_Z_GRID) for n in range(2, 6)]
    ratio = (errs[-1] / errs[0]) ** (1 / 3)
    assert ratio < 0.5


def test_report_serialization(report):
    lines = report.to_csv().splitlines()
    assert lines[0] == "n,e_n,ratio" and len(lines) == 6
    doc = json.loads(report.dumps())
    assert doc["rows"][0]["ratio"] is None and doc["ratio"] == pytest.approx(report.ratio)


def test_rho_axes_align():
    for n in range(7):
        f = build_frame(n)
        assert abs(rho_n(f, 1).imag) < 1e-12 * abs(rho_n(f, 1))
        assert abs(rho_n(f, 1j).real) < 1e-12 * abs(rho_n(f, 1j))


def test_aspect_ratio_is_five_ninths():
    ratios = [aspect_ratio(build_frame(n)) for n in range(7)]
    assert all(r == pytest.approx(5 / 9, rel=1e-9) for r in ratios)
