"""Rescaled return maps near the parameters c_n and their limit.

Near c_n the map g(Z) = alpha_n f_c^N(Z / alpha_n), N = 2n + 3, evaluated at
c = c_n + rho_n(t), tends to conj(Z)^2 + (b0^2 - b0*^2) t.  The perturbation
rho_n(t) is of size 16^(-2n-1), below double resolution of c_n for n >= 4,
so parameters and orbits are carried in mpmath.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath

from .core import as_complex
from .koenigs import build_chart, coefficient_A, estimate_B_constants
from .orbits import solve_c_n_mp

C_HAT = -2.0
N_MAX = 6
T_MAX = 10.0
Z_BOX = 4.0
DPS = 60

DEFAULT_T_GRID = (0, 0.5, -0.5, 0.5j, -0.5j, 1, 1j)
DEFAULT_Z_GRID = tuple(complex(x, y) for y in [i / 4 - 1 for i in range(9)] for x in [i / 4 - 1 for i in range(9)])


@lru_cache(maxsize=1)
def hat_constants() -> dict:
    """a, A_2, lambda at c = -2 and the Wirtinger constants b0, b0*."""
    chart = build_chart(C_HAT)
    b0, b0s = estimate_B_constants(C_HAT)
    return {
        "a": chart.a_c.real,
        "A2": coefficient_A(C_HAT, 2, chart).real,
        "lam": chart.lam.real,
        "b0": b0.real,
        "b0_star": b0s.real,
    }


@dataclass(frozen=True)
class ScalingFrame:
    n: int
    N: int
    c_n: float
    lambda_cn: float
    alpha_n: float
    k_n: float
    b0: float
    b0_star: float
    c_n_exact: str = ""  # decimal string of c_n to DPS digits

    @property
    def limit_shift(self) -> float:
        return self.b0 ** 2 - self.b0_star ** 2

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in ("n", "N", "c_n", "lambda_cn", "alpha_n", "k_n", "b0", "b0_star")}


@lru_cache(maxsize=None)
def build_frame(n: int) -> ScalingFrame:
    if not 0 <= n <= N_MAX:
        raise ValueError(f"n must be in 0..{N_MAX}")
    h = hat_constants()
    with mpmath.workdps(DPS):
        cn = solve_c_n_mp(n, DPS)
        beta = (1 + mpmath.sqrt(1 - 4 * cn)) / 2
        lam = 4 * beta * beta
        lam_n = mpmath.mpf(1)
        for _ in range(n):
            lam_n *= lam
        # real negative branch for alpha_n
        alpha = mpmath.mpf(h["lam"]) ** n * h["A2"] / h["a"]
        k = h["a"] / (alpha * lam_n)
        return ScalingFrame(
            n, 2 * n + 3, float(cn), float(lam), float(alpha), float(k),
            h["b0"], h["b0_star"], mpmath.nstr(cn, DPS),
        )


def _rho_mp(frame: ScalingFrame, t) -> mpmath.mpc:
    t = mpmath.mpc(t)
    return mpmath.mpf(frame.k_n) * (frame.b0 * t - frame.b0_star * mpmath.conj(t))


def rho_n(frame: ScalingFrame, t) -> complex:
    """k_n (b0 t - b0* conj(t)); real-linear in t."""
    t = as_complex(t, "t")
    if abs(t) > T_MAX:
        raise ValueError(f"|t| must be <= {T_MAX}")
    return frame.k_n * (frame.b0 * t - frame.b0_star * t.conjugate())


def rescaled_return(frame: ScalingFrame, t, Z) -> complex:
    t = as_complex(t, "t")
    Z = as_complex(Z, "Z")
    if abs(Z) > Z_BOX:
        raise ValueError(f"|Z| must be <= {Z_BOX}")
    if abs(t) > T_MAX:
        raise ValueError(f"|t| must be <= {T_MAX}")
    with mpmath.workdps(DPS):
        c = mpmath.mpf(frame.c_n_exact) + _rho_mp(frame, t)
        alpha = mpmath.mpf(frame.alpha_n)
        z = mpmath.mpc(Z) / alpha
        for _ in range(frame.N):
            z = mpmath.conj(z) ** 2 + c
        return complex(alpha * z)


def limit_map(frame: ScalingFrame, t, Z) -> complex:
    return complex(Z).conjugate() ** 2 + frame.limit_shift * complex(t)


@dataclass(frozen=True)
class ConvergenceReport:
    rows: tuple  # (n, e_n, e_n / e_{n-1} or None)
    ratio: float  # geometric mean of consecutive ratios

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "e_n", "ratio"])
        for n, e, r in self.rows:
            w.writerow([n, repr(e), "" if r is None else repr(r)])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "rows": [{"n": n, "e_n": e, "ratio": r} for n, e, r in self.rows],
            "ratio": self.ratio,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @property
    def errors(self) -> list:
        return [e for _, e, _ in self.rows]


def max_error(n: int, t_grid=DEFAULT_T_GRID, Z_grid=DEFAULT_Z_GRID) -> float:
    frame = build_frame(n)
    return max(abs(rescaled_return(frame, t, Z) - limit_map(frame, t, Z)) for t in t_grid for Z in Z_grid)


def convergence_report(n_lo: int = 2, n_hi: int = N_MAX, t_grid=DEFAULT_T_GRID, Z_grid=DEFAULT_Z_GRID) -> ConvergenceReport:
    if not 0 <= n_lo < n_hi <= N_MAX:
        raise ValueError(f"need 0 <= n_lo < n_hi <= {N_MAX}")
    t_grid, Z_grid = list(t_grid), list(Z_grid)
    if not t_grid or not Z_grid:
        raise ValueError("grids must be non-empty")
    rows = []
    prev = None
    for n in range(n_lo, n_hi + 1):
        e = max_error(n, t_grid, Z_grid)
        rows.append((n, e, None if not prev else e / prev))
        prev = e
    ratios = [r for _, _, r in rows if r is not None and r > 0]
    ratio = math.exp(sum(map(math.log, ratios)) / len(ratios)) if ratios else math.nan
    return ConvergenceReport(tuple(rows), ratio)


def aspect_ratio(frame: ScalingFrame) -> float:
    """|rho_n(i)| / |rho_n(1)|."""
    return abs(rho_n(frame, 1j)) / abs(rho_n(frame, 1.0))
