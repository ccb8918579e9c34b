"""Linearizing coordinate of f_c^2 at the beta fixed point and its inverse.

The chart stores two local power series about beta, both computed from the
functional equation kappa(f^2(z)) = lambda * kappa(z):

* ``kseries``: kappa_raw(beta + h) = h + k_2 h^2 + ...
* ``pseries``: psi_raw(v) = beta + v + p_2 v^2 + ...   (the inverse)

Global evaluation pulls a point towards beta with the inverse branch of f^2
fixing beta (kappa) or pushes the local inverse forward with f^2 (psi).
The raw series are then rescaled so that kappa(0) = 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import series
from .core import as_complex, holomorphic_iterate, iterate
from .orbits import beta_fixed_point

SERIES_ORDER = 40
MAX_PULLBACK = 50
MAX_PUSH = 60
FIT_RADIUS = 1e-3
FIT_SAMPLES = 64
FIT_DEGREE = 4
WIRTINGER_STEP = 1e-5


@dataclass(frozen=True)
class KoenigsChart:
    c: complex
    beta: complex
    lam: complex
    a_c: complex
    lin_radius: float
    scale: complex  # kappa_raw(0); kappa = kappa_raw / scale
    kseries: np.ndarray
    pseries: np.ndarray

    def to_json(self) -> dict:
        pair = lambda z: [z.real, z.imag]  # noqa: E731
        return {
            "c": pair(self.c),
            "beta": pair(self.beta),
            "lambda": pair(self.lam),
            "a_c": pair(self.a_c),
            "lin_radius": self.lin_radius,
        }


def _f2_taylor(c: complex, beta: complex) -> np.ndarray:
    return series.iterate_taylor(c, beta, 2)


def _koenigs_series(F: np.ndarray, lam: complex, order: int) -> np.ndarray:
    # F: exact Taylor coefficients of f^2 at beta (F[0] = beta)
    Fs = series.pad(np.concatenate([[0.0], F[1:]]), order)
    k = np.zeros(order + 1, dtype=complex)
    k[1] = 1.0
    powers = [series.pad([1.0], order), Fs.copy()]
    for _ in range(2, order + 1):
        powers.append(series.mul(powers[-1], Fs, order))
    for j in range(2, order + 1):
        rhs = sum(k[l] * powers[l][j] for l in range(1, j))
        k[j] = rhs / (lam - lam ** j)
    return k


def _poincare_series(F: np.ndarray, lam: complex, order: int) -> np.ndarray:
    p = np.zeros(order + 1, dtype=complex)
    p[1] = 1.0
    for j in range(2, order + 1):
        # coefficient of v^j in sum_{i>=2} F_i P(v)^i with P truncated below j
        P = p.copy()
        P[j:] = 0.0
        acc = 0.0
        Pi = series.mul(P, P, j)
        for i in range(2, len(F)):
            acc += F[i] * Pi[j]
            Pi = series.mul(Pi, P, j)
        p[j] = acc / (lam ** j - lam)
    return p


def _inverse_branch(c: complex, w: complex, beta: complex) -> complex:
    # preimages of w under (y^2 + conj(c))^2 + c, nearest to beta
    s = np.sqrt(complex(w - c))
    best = None
    for t in (s, -s):
        y = np.sqrt(complex(t - c.conjugate()))
        for cand in (y, -y):
            if best is None or abs(cand - beta) < abs(best - beta):
                best = complex(cand)
    return best


def _kappa_raw(c, beta, lam, kseries, lin_radius, z, with_derivative=False):
    w = complex(z)
    dw = 1.0 + 0.0j
    k = 0
    while abs(w - beta) > lin_radius:
        if k >= MAX_PULLBACK:
            raise ArithmeticError(f"point {z} did not reach the linearization disk")
        w = _inverse_branch(c, w, beta)
        if with_derivative:
            _, d, _ = holomorphic_iterate(c, w, 2)
            dw /= d
        k += 1
    h = w - beta
    val = lam ** k * series.evaluate(kseries, h)
    if not with_derivative:
        return complex(val)
    der = lam ** k * series.evaluate(series.derivative(kseries), h) * dw
    return complex(val), complex(der)


def _psi_raw(c, beta, lam, pseries, lin_radius, u):
    u = complex(u)
    k = 0
    v = u
    while abs(v) > lin_radius:
        if k >= MAX_PUSH:
            raise OverflowError(f"Poincare argument {u} needs more than {MAX_PUSH} pushes")
        v /= lam
        k += 1
    z = complex(series.evaluate(pseries, v))
    return iterate(c, z, 2 * k)


def build_chart(c, order: int = SERIES_ORDER) -> KoenigsChart:
    """Koenigs chart at beta_c normalized by kappa(beta) = 0, kappa(0) = 1."""
    c = as_complex(c, "c")
    beta = beta_fixed_point(c)
    F = _f2_taylor(c, beta)
    lam = complex(F[1])
    if abs(lam) <= 1.0:
        raise ArithmeticError(f"beta is not repelling at c={c} (|lambda|={abs(lam)})")
    kser = _koenigs_series(F, lam, order)
    pser = _poincare_series(F, lam, order)
    pser[0] = beta
    lin_radius = 0.05 * abs(beta)
    # shrink until the truncated series agree with the functional equation
    for _ in range(20):
        h = lin_radius / abs(lam) * np.exp(2j * np.pi * np.arange(8) / 8)
        lhs = series.evaluate(kser, series.evaluate(F, h) - beta)
        rhs = lam * series.evaluate(kser, h)
        if np.max(np.abs(lhs - rhs)) <= 1e-13 * np.max(np.abs(rhs)):
            break
        lin_radius /= 2
    scale, dscale = _kappa_raw(c, beta, lam, kser, lin_radius, 0.0, with_derivative=True)
    if scale == 0:
        raise ArithmeticError("kappa vanishes at the critical point")
    return KoenigsChart(c, beta, lam, dscale / scale, lin_radius, scale, kser, pser)


def koenigs_eval(chart: KoenigsChart, z) -> complex:
    z = as_complex(z, "z")
    return _kappa_raw(chart.c, chart.beta, chart.lam, chart.kseries, chart.lin_radius, z) / chart.scale


def koenigs_derivative(chart: KoenigsChart, z) -> complex:
    _, d = _kappa_raw(chart.c, chart.beta, chart.lam, chart.kseries, chart.lin_radius, complex(z), True)
    return d / chart.scale


def poincare_eval(chart: KoenigsChart, u) -> complex:
    u = as_complex(u, "u")
    return _psi_raw(chart.c, chart.beta, chart.lam, chart.pseries, chart.lin_radius, u * chart.scale)


def coefficient_A(c, i: int, chart: KoenigsChart | None = None, radius: float = FIT_RADIUS) -> complex:
    """Coefficient of conj(z)^i in kappa_c(f_c^3(z)) near z = 0.

    Least-squares fit on a circle of the given radius in powers
    conj(z)^0 .. conj(z)^4.
    """
    c = as_complex(c, "c")
    if not 0 <= i <= FIT_DEGREE:
        raise ValueError(f"i must be in 0..{FIT_DEGREE}")
    chart = chart or build_chart(c)
    theta = 2.0 * np.pi * np.arange(FIT_SAMPLES) / FIT_SAMPLES
    z = radius * np.exp(1j * theta)
    vals = np.array([koenigs_eval(chart, iterate(c, complex(zz), 3)) for zz in z])
    basis = np.stack([np.conj(z) ** j for j in range(FIT_DEGREE + 1)], axis=1)
    coef, _, rank, sv = np.linalg.lstsq(basis, vals, rcond=None)
    if rank < FIT_DEGREE + 1 or sv[-1] / sv[0] < 1e-14:
        raise ArithmeticError("ill-conditioned coefficient fit")
    return complex(coef[i])


def _wirtinger(fn, c0: complex, h: float):
    dx = (fn(c0 + h) - fn(c0 - h)) / (2 * h)
    dy = (fn(c0 + 1j * h) - fn(c0 - 1j * h)) / (2 * h)
    return 0.5 * (dx - 1j * dy), 0.5 * (dx + 1j * dy)


def estimate_B_constants(c_hat: complex = -2.0, h: float = WIRTINGER_STEP):
    """Wirtinger derivatives (d/dc, d/dcbar) of A_0 at c_hat.

    Central differences with one Richardson step (h, h/2).
    """
    A0 = lambda c: coefficient_A(c, 0)  # noqa: E731
    d1, s1 = _wirtinger(A0, complex(c_hat), h)
    d2, s2 = _wirtinger(A0, complex(c_hat), h / 2)
    return (4 * d2 - d1) / 3, (4 * s2 - s1) / 3


def chebyshev_poincare(w):
    """Closed form 2 cos(pi sqrt(w) / 2) of the Poincare map at c = -2."""
    return 2.0 * np.cos(0.5 * np.pi * np.sqrt(np.asarray(w, dtype=complex)))


def closed_form_constants() -> dict:
    pi2 = math.pi ** 2
    return {
        "a_hat": -2.0 / math.pi,
        "A2_hat": 64.0 / pi2,
        "b0": 896.0 / (15.0 * pi2),
        "b0_star": -256.0 / (15.0 * pi2),
    }
