"""Parabolic parameters of odd period, Fatou coordinates and Ecalle heights.

Near a parabolic point x of the first-return map f^p (p odd) the holomorphic
map F = f^{2p} has the normal form F(x + h) = x + h + a h^2 + ...  In the
coordinate w = -1/(a h) it reads w -> w + 1 + A/w + O(w^-2), and

    Phi0(w) = w - A log w + sum_j d_j w^-j

solves Phi0(F) = Phi0 + 1 asymptotically.  Attracting coordinates push a
point into the far end of the petal (Re w >> 0) with F, repelling ones use
the series directly for Re w << 0.  Both are then shifted by a constant so
that the anti-holomorphic Abel equation

    Phi(f^p(z)) = conj(Phi(z)) + 1/2

holds; its imaginary part is the Ecalle height.
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from . import series
from .core import as_complex, escape_counts, holomorphic_iterate, iterate
from .orbits import multiplier

SERIES_TERMS = 16
R_ATTR = 120.0  # |w| where the attracting series is trusted
W0_REP = 120.0  # base half-plane Re w <= -W0 for the repelling series
REF_W = 1.0e3  # reference point for the imaginary normalization
ANCHOR_W = -64.0
DEFAULT_DEPTH = 10_000
MAX_RECURSION = 1_000
CUSP_TOL = 1e-6
ESCAPE_BUDGET = 100_000
DEFAULT_GRID = (32, 17)


@dataclass(frozen=True)
class ParabolicPoint:
    c: complex
    period: int
    x: complex
    petal_coeff: complex
    cycle: tuple = ()
    multiplier: float = 1.0

    def to_json(self) -> dict:
        return {
            "c": [self.c.real, self.c.imag],
            "period": self.period,
            "x": [self.x.real, self.x.imag],
            "petal_coeff": [self.petal_coeff.real, self.petal_coeff.imag],
            "multiplier": self.multiplier,
        }


@dataclass(frozen=True)
class _Normal:
    """Local data shared by both charts of a parabolic point."""

    F: np.ndarray  # Taylor coefficients of F(x+h) - x, exact polynomial
    Q: np.ndarray  # Taylor coefficients of q_p(x+h) - conj(x); f^p = conj(q_p)
    a: complex
    A: complex
    d: np.ndarray  # d[j] multiplies w^-j, d[0] unused
    h_loc: float  # radius where the local polynomial is used


@dataclass(frozen=True)
class FatouChart:
    kind: str  # "attracting" or "repelling"
    base: ParabolicPoint
    normalization_anchor: complex
    depth: int
    const: complex
    normal: _Normal = field(repr=False, compare=False)
    abel_defect: float = 0.0  # |Re D| at the reference point, should be ~0


# ---------------------------------------------------------------- local data


def _normal_data(pp: ParabolicPoint, terms: int = SERIES_TERMS) -> _Normal:
    c, x, p = pp.c, pp.x, pp.period
    F = series.iterate_taylor(c, x, 2 * p)
    F[0] -= x
    Q = series.iterate_taylor(c, x, p)
    Q[0] -= x.conjugate()
    a = complex(F[2])
    # the normal-form series assumes F'(x) = 1 exactly
    Fn = F.copy()
    Fn[0], Fn[1] = 0.0, 1.0
    order = terms + 2
    j = np.arange(1, order + 2)
    Fj = series.pad(Fn, order + 1)[1:]
    U = np.zeros(order + 2, dtype=complex)
    U[1:] = Fj * (-1.0) ** (j + 1) * a ** (1 - j)  # u -> u' with u = 1/w
    V = U[1:]  # U(u)/u
    R = series.reciprocal(V, order)  # G(w) = w R(1/w)
    A = complex(R[2])
    Vs = series.pad(V, order)
    Rm1 = R.copy()
    Rm1[0] = 0.0
    logR = series.log1p(Rm1, order)
    d = np.zeros(terms + 1, dtype=complex)
    Vpow = [series.pad([1.0], order)]
    for _ in range(terms):
        Vpow.append(series.mul(Vpow[-1], Vs, order))
    for m in range(1, terms + 1):
        res = np.zeros(order + 1, dtype=complex)
        res[1:order] = R[2 : order + 1]
        res -= A * logR
        for k in range(1, m):
            term = Vpow[k].copy()
            term[0] -= 1.0
            res += d[k] * np.concatenate([np.zeros(k, dtype=complex), term])[: order + 1]
        d[m] = res[m + 1] / m
    # radius of reliable evaluation of the exact polynomial
    mags = [abs(F[k]) ** (-1.0 / k) for k in range(2, len(F)) if abs(F[k]) > 0]
    h_loc = 0.25 * min(mags) if mags else 0.1
    return _Normal(F, Q, a, A, d, h_loc)


def _to_w(nd: _Normal, h: complex) -> complex:
    return -1.0 / (nd.a * h)


def _to_h(nd: _Normal, w: complex) -> complex:
    return -1.0 / (nd.a * w)


def _F_local(nd: _Normal, h: complex) -> complex:
    return complex(series.evaluate(nd.F, h))


def _fp_local(nd: _Normal, h: complex) -> complex:
    return complex(series.evaluate(nd.Q, h)).conjugate()


def _phi0(nd: _Normal, w: complex, repelling: bool) -> complex:
    lg = cmath.log(-w) if repelling else cmath.log(w)
    u = 1.0 / w
    tail = complex(series.evaluate(np.concatenate([[0.0], nd.d[1:]]), u))
    return w - nd.A * lg + tail


def _dphi0(nd: _Normal, w: complex) -> complex:
    u = 1.0 / w
    j = np.arange(1, len(nd.d))
    return 1.0 - nd.A * u - complex(np.sum(j * nd.d[1:] * u ** (j + 1)))


def _in_attracting(w: complex, R: float) -> bool:
    return w.real >= R and abs(w.imag) <= w.real


def _in_repelling(w: complex, R: float) -> bool:
    return w.real <= -R and abs(w.imag) <= -w.real


def _F(pp: ParabolicPoint, z: complex) -> complex:
    return holomorphic_iterate(pp.c, z, 2 * pp.period)[0]


def _fp(pp: ParabolicPoint, z: complex) -> complex:
    return iterate(pp.c, z, pp.period)


# ---------------------------------------------------------- parabolic points


def _cycle_from(c: complex, x: complex, p: int) -> tuple:
    pts = [x]
    for _ in range(p - 1):
        pts.append(pts[-1].conjugate() ** 2 + c)
    return tuple(pts)


def _select_basin_point(c: complex, cycle: tuple, p: int, depth: int = 4000) -> complex:
    """Cycle point whose immediate basin (under f^{2p}) contains c."""
    z = c
    for _ in range(depth):
        z = holomorphic_iterate(c, z, 2 * p)[0]
        if not cmath.isfinite(z) or abs(z) > 2.0 + abs(c):
            raise ArithmeticError("critical value escapes; c is not parabolic")
    return min(cycle, key=lambda q: abs(q - z))


def _center_fixed(c: complex, z: complex, p: int, maxit: int = 60) -> complex:
    # midpoint of a near-double fixed point of F: Newton on F'(z) = 1
    for _ in range(maxit):
        T = series.iterate_taylor(c, z, 2 * p, 2)
        if T[2] == 0:
            break
        step = (T[1] - 1.0) / (2.0 * T[2])
        z -= step
        if abs(step) < 1e-16 * max(1.0, abs(z)):
            break
    return z


def make_parabolic_point(c, x, p: int, choose_basin: bool = True) -> ParabolicPoint:
    c = as_complex(c, "c")
    x = as_complex(x, "x")
    if p < 1 or p % 2 == 0:
        raise ValueError("period must be odd")
    cycle = _cycle_from(c, x, p)
    if choose_basin and p > 1:
        x = _select_basin_point(c, cycle, p)
        cycle = _cycle_from(c, x, p)
    lam = multiplier(c, cycle).real
    F = series.iterate_taylor(c, x, 2 * p, 2)
    a = complex(F[2])
    scale = max(1.0, abs(F[1]))
    if abs(a) < CUSP_TOL * scale:
        raise ArithmeticError(f"cusp: petal coefficient {abs(a):.3g} vanishes at c={c}")
    return ParabolicPoint(c, p, x, a, cycle, lam)


def deltoid_parabolic(phi: float) -> ParabolicPoint:
    """Period-one parabolic parameter c = z0 - conj(z0)^2 with z0 = e^{i phi}/2."""
    phi = float(phi)
    if not (0.0 <= phi < 2.0 * math.pi and math.isfinite(phi)):
        raise ValueError("phi must lie in [0, 2 pi)")
    z0 = cmath.exp(1j * phi) / 2.0
    c = z0 - z0.conjugate() ** 2
    return make_parabolic_point(c, z0, 1)


def parabolic_from_parameter(c, p: int) -> ParabolicPoint:
    """Locate the parabolic cycle of f_c (period p) and build its datum."""
    from .orbits import periodic_points

    c = as_complex(c, "c")
    cands = []
    for orb in periodic_points(c, p):
        cands.append((abs(orb.multiplier - 1.0), orb))
    if not cands:
        raise ArithmeticError(f"no cycle of period {p} at c={c}")
    _, orb = min(cands, key=lambda t: t[0])
    if abs(orb.multiplier - 1.0) > 1e-3:
        raise ArithmeticError(f"no parabolic cycle of period {p} at c={c}")
    x = _select_basin_point(c, orb.points, p) if p > 1 else orb.points[0]
    x = _center_fixed(c, x, p)
    return make_parabolic_point(c, x, p, choose_basin=False)


# ------------------------------------------------------------- Fatou charts


def _attr_raw(pp: ParabolicPoint, nd: _Normal, z: complex, depth: int) -> complex:
    """Phi0_attr(z) without constant: push z into the petal end with F."""
    x = pp.x
    h = z - x
    k = 0
    local = abs(h) < nd.h_loc
    while True:
        if local:
            w = _to_w(nd, h)
            if _in_attracting(w, R_ATTR):
                return _phi0(nd, w, False) - k
        if k >= depth:
            raise ArithmeticError(f"{z} is not attracted to the parabolic point within {depth} steps")
        if local:
            h = _F_local(nd, h)
        else:
            z = _F(pp, z)
            if not cmath.isfinite(z) or abs(z) > 2.0 + abs(pp.c):
                raise ArithmeticError(f"orbit of the sample escapes (depth {k})")
            h = z - x
            local = abs(h) < nd.h_loc
        k += 1


def _imag_constant(nd: _Normal, repelling: bool) -> tuple:
    """Im C making the anti-holomorphic Abel equation hold, and |Re D|."""
    w = -REF_W if repelling else REF_W
    h = _to_h(nd, w)
    w1 = _to_w(nd, _fp_local(nd, h))
    D = _phi0(nd, w1, repelling) - _phi0(nd, w, repelling).conjugate() - 0.5
    return -D.imag / 2.0, abs(D.real)


def attracting_chart(pp: ParabolicPoint, anchor=None, depth: int = DEFAULT_DEPTH) -> FatouChart:
    """Attracting Fatou coordinate normalized by Re Phi(anchor) = 0 (default: critical value)."""
    nd = _normal_data(pp)
    anchor = pp.c if anchor is None else as_complex(anchor, "anchor")
    im_c, defect = _imag_constant(nd, repelling=False)
    raw = _attr_raw(pp, nd, anchor, depth)
    const = complex(-raw.real, im_c)
    return FatouChart("attracting", pp, anchor, depth, const, nd, defect)


def repelling_chart(pp: ParabolicPoint, anchor_w: float = ANCHOR_W, depth: int = DEFAULT_DEPTH) -> FatouChart:
    """Repelling Fatou coordinate with Re Phi = 0 at the point w = anchor_w of the petal."""
    nd = _normal_data(pp)
    if not anchor_w < 0:
        raise ValueError("anchor must lie on the repelling side (w < 0)")
    im_c, defect = _imag_constant(nd, repelling=True)
    const = complex(-_phi0(nd, complex(anchor_w), True).real, im_c)
    anchor = pp.x + _to_h(nd, complex(anchor_w))
    return FatouChart("repelling", pp, anchor, depth, const, nd, defect)


def attracting_fatou(chart: FatouChart, z) -> complex:
    if chart.kind != "attracting":
        raise ValueError("need an attracting chart")
    z = as_complex(z, "z")
    return _attr_raw(chart.base, chart.normal, z, chart.depth) + chart.const


def _inverse_F_near(pp: ParabolicPoint, z: complex) -> complex:
    # branch of F^-1 fixing x; F is tangent to the identity there
    y = z
    for _ in range(50):
        q, dq, _ = holomorphic_iterate(pp.c, y, 2 * pp.period)
        step = (q - z) / dq
        y -= step
        if abs(step) < 1e-16 * max(1.0, abs(y)):
            break
    return y


def repelling_fatou(chart: FatouChart, z) -> complex:
    """Phi_rep(z), pulling z back towards x with the local inverse of F."""
    if chart.kind != "repelling":
        raise ValueError("need a repelling chart")
    pp, nd = chart.base, chart.normal
    z = as_complex(z, "z")
    for k in range(chart.depth + 1):
        h = z - pp.x
        if abs(h) < nd.h_loc:
            w = _to_w(nd, h)
            if _in_repelling(w, W0_REP):
                return _phi0(nd, w, True) + k + chart.const
        z = _inverse_F_near(pp, z)
    raise ArithmeticError("point does not pull back into the repelling petal")


def _rep_base_inverse(chart: FatouChart, W: complex) -> complex:
    nd = chart.normal
    target = W - chart.const
    w = target + nd.A * cmath.log(-target)
    for _ in range(60):
        step = (_phi0(nd, w, True) - target) / _dphi0(nd, w)
        w -= step
        if abs(step) < 1e-15 * abs(w):
            break
    return chart.base.x + _to_h(nd, w)


def repelling_fatou_inverse(chart: FatouChart, W) -> complex:
    """Psi(W) = Phi_rep^-1(W), extended by Psi(W) = f^p(Psi(conj(W) - 1/2))."""
    if chart.kind != "repelling":
        raise ValueError("need a repelling chart")
    W = as_complex(W, "W")
    steps = 0
    V = W
    while not _in_repelling(V - chart.const, W0_REP):
        if steps >= MAX_RECURSION:
            raise ArithmeticError(f"recursion depth exceeded for W={W}")
        V = V.conjugate() - 0.5
        steps += 1
    z = _rep_base_inverse(chart, V)
    return iterate(chart.base.c, z, chart.base.period * steps)


def abel_residual(chart: FatouChart, z) -> float:
    """|Phi(f^p(z)) - conj(Phi(z)) - 1/2| for the chart's coordinate."""
    ev = attracting_fatou if chart.kind == "attracting" else repelling_fatou
    z = as_complex(z, "z")
    return abs(ev(chart, _fp(chart.base, z)) - ev(chart, z).conjugate() - 0.5)


def critical_ecalle_height(c, p: int | None = None) -> float:
    """Im Phi_attr at the critical value; ``c`` may be a ParabolicPoint."""
    pp = c if isinstance(c, ParabolicPoint) else parabolic_from_parameter(c, p or 1)
    return attracting_fatou(attracting_chart(pp), pp.c).imag


# ------------------------------------------------------------ arc following


def _track_fixed(c: complex, z: complex, p: int, maxit: int = 80):
    """Newton on F(z) = z from z; returns (z, F'(z)) or None."""
    for _ in range(maxit):
        q, dq, _ = holomorphic_iterate(c, z, 2 * p)
        if dq == 1 or not cmath.isfinite(q):
            return None
        step = (q - z) / (dq - 1.0)
        z -= step
        if abs(step) < 1e-15 * max(1.0, abs(z)):
            break
    q, dq, _ = holomorphic_iterate(c, z, 2 * p)
    if abs(q - z) > 1e-9 * max(1.0, abs(z)):
        return None
    if abs(iterate(c, z, p) - z) > 1e-7 * max(1.0, abs(z)):
        return None
    return z, dq.real


def _arc_residual(seed, theta, p, r, x):
    c = seed + r * cmath.exp(1j * theta)
    fx = iterate(c, x, p) - x
    lam = holomorphic_iterate(c, x, 2 * p)[1].real
    return np.array([fx.real, fx.imag, lam - 1.0])


def _polish_boundary(seed, theta, p, r, x, maxit: int = 30):
    v = np.array([r, x.real, x.imag])
    for _ in range(maxit):
        res = _arc_residual(seed, theta, p, v[0], complex(v[1], v[2]))
        if np.max(np.abs(res)) < 1e-15:
            break
        J = np.empty((3, 3))
        for i in range(3):
            e = np.zeros(3)
            e[i] = 1e-7 * max(1.0, abs(v[i]))
            J[:, i] = (
                _arc_residual(seed, theta, p, *(lambda u: (u[0], complex(u[1], u[2])))(v + e))
                - _arc_residual(seed, theta, p, *(lambda u: (u[0], complex(u[1], u[2])))(v - e))
            ) / (2 * e[i])
        try:
            step = np.linalg.solve(J, -res)
        except np.linalg.LinAlgError:
            break
        v = v + step
        if np.max(np.abs(step)) < 1e-16:
            break
    res = _arc_residual(seed, theta, p, v[0], complex(v[1], v[2]))
    return v[0], complex(v[1], v[2]), float(np.max(np.abs(res)))


def _boundary_on_ray(seed: complex, theta: float, p: int, x0: complex, r_step: float):
    """Parameter where the tracked attracting cycle becomes parabolic along a ray."""
    d = cmath.exp(1j * theta)
    r, x = 0.0, x0
    lo = None
    for _ in range(4000):
        r_new = r + r_step
        t = _track_fixed(seed + r_new * d, x, p)
        if t is None or t[1] >= 1.0:
            lo = (r, x)
            hi_r = r_new
            break
        r, x = r_new, t[0]
    if lo is None:
        raise ArithmeticError("component boundary not reached along the ray")
    r_lo, x_lo = lo
    for _ in range(60):
        m = 0.5 * (r_lo + hi_r)
        t = _track_fixed(seed + m * d, x_lo, p)
        if t is None or t[1] >= 1.0:
            hi_r = m
        else:
            r_lo, x_lo = m, t[0]
        if hi_r - r_lo < 1e-9 * max(1.0, hi_r):
            break
    r, x, res = _polish_boundary(seed, theta, p, r_lo, x_lo)
    if res > 1e-10:
        raise ArithmeticError(f"boundary corrector did not converge (residual {res:.3g})")
    return r, x


def _attracting_seed_cycle(seed: complex, p: int) -> complex:
    from .orbits import periodic_points

    orbs = [o for o in periodic_points(seed, p) if abs(o.multiplier) < 1.0]
    if not orbs:
        raise ArithmeticError(f"c_seed={seed} has no attracting cycle of period {p}")
    orb = min(orbs, key=lambda o: abs(o.multiplier))
    return min(orb.points, key=abs)


@dataclass
class _ArcScan:
    seed: complex
    p: int
    x0: complex
    r_step: float
    thetas: np.ndarray
    radii: np.ndarray
    petal: np.ndarray


def _scan_arcs(seed: complex, p: int, n_dir: int = 72) -> _ArcScan:
    x0 = _attracting_seed_cycle(seed, p)
    # step size from a coarse probe along the real direction
    r_step = 1e-3 if p > 1 else 1e-2
    thetas = 2.0 * np.pi * np.arange(n_dir) / n_dir
    radii = np.empty(n_dir)
    petal = np.empty(n_dir)
    for i, th in enumerate(thetas):
        r, x = _boundary_on_ray(seed, th, p, x0, r_step)
        c = seed + r * cmath.exp(1j * th)
        radii[i] = r
        petal[i] = abs(series.iterate_taylor(c, x, 2 * p, 2)[2])
    return _ArcScan(seed, p, x0, r_step, thetas, radii, petal)


def _petal_at(scan: _ArcScan, theta: float) -> float:
    r, x = _boundary_on_ray(scan.seed, theta, scan.p, scan.x0, scan.r_step)
    c = scan.seed + r * cmath.exp(1j * theta)
    return abs(series.iterate_taylor(c, x, 2 * scan.p, 2)[2])


def _refine_cusp(scan: _ArcScan, theta: float, step: float) -> float:
    def f(t):
        try:
            return _petal_at(scan, t)
        except ArithmeticError:
            return math.inf

    res = minimize_scalar(f, bounds=(theta - step, theta + step), method="bounded", options={"xatol": 1e-6})
    return float(res.x)


def _arc_interval(scan: _ArcScan, direction: float | None):
    n = len(scan.thetas)
    cusps = [i for i in range(n) if scan.petal[i] <= scan.petal[i - 1] and scan.petal[i] <= scan.petal[(i + 1) % n]]
    if direction is None:
        rmin = scan.radii.min()
        start = int(np.nonzero(scan.radii <= rmin + 1e-9 * max(1.0, rmin))[0][0])
        ang = scan.thetas[start]
    else:
        ang = float(direction) % (2 * math.pi)
    if len(cusps) < 2:
        return ang - math.pi, ang + math.pi
    step = 2 * math.pi / n
    cusp_angles = sorted(_refine_cusp(scan, scan.thetas[i], step) for i in cusps)
    left = max([a for a in cusp_angles if a <= ang], default=cusp_angles[-1] - 2 * math.pi)
    right = min([a for a in cusp_angles if a > ang], default=cusp_angles[0] + 2 * math.pi)
    return left, right


def _point_at(scan: _ArcScan, theta: float) -> ParabolicPoint:
    r, x = _boundary_on_ray(scan.seed, theta, scan.p, scan.x0, scan.r_step)
    c = scan.seed + r * cmath.exp(1j * theta)
    return make_parabolic_point(c, x, scan.p)


def _height_at(scan: _ArcScan, theta: float):
    pp = _point_at(scan, theta)
    return critical_ecalle_height(pp), pp


def find_parabolic_on_arc(p: int, c_seed, target_height: float = 0.0, direction: float | None = None,
                          tol: float = 1e-7) -> ParabolicPoint:
    """Parabolic parameter of odd period p with critical Ecalle height ``target_height``.

    The arc is the one met first by rays from ``c_seed`` (or the one hit in
    the given ``direction``); points on it are parametrized by the ray angle.
    """
    if p < 1 or p % 2 == 0:
        raise ValueError("period must be odd")
    seed = as_complex(c_seed, "c_seed")
    scan = _scan_arcs(seed, p)
    left, right = _arc_interval(scan, direction)
    step = 2 * math.pi / len(scan.thetas) / 4
    lo, hi = left + step / 2, right - step / 2
    e_lo = e_hi = None
    for _ in range(6):
        try:
            e_lo, _ = _height_at(scan, lo)
            e_hi, _ = _height_at(scan, hi)
        except ArithmeticError:
            e_lo = e_hi = None
        if e_lo is not None and (e_lo - target_height) * (e_hi - target_height) < 0:
            break
        step /= 2
        lo, hi = left + step / 2, right - step / 2
    else:
        raise ArithmeticError("cusp reached before the target height")
    if e_lo is None or (e_lo - target_height) * (e_hi - target_height) >= 0:
        raise ArithmeticError("cusp reached before the target height")
    best = None
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        e, pp = _height_at(scan, mid)
        best = pp
        if abs(e - target_height) < tol or hi - lo < 1e-14:
            break
        if (e - target_height) * (e_lo - target_height) > 0:
            lo, e_lo = mid, e
        else:
            hi = mid
    return best


# ------------------------------------------------------------ accessibility


@dataclass(frozen=True)
class AccessibilityReport:
    c: complex
    period: int
    E_crit: float
    epsilon: float
    grid: tuple
    escape_fraction: float
    verdict: bool
    undetermined_count: int

    @property
    def accessible_evidence(self) -> bool:
        return self.verdict

    def to_json(self) -> dict:
        return {
            "c": [self.c.real, self.c.imag],
            "period": self.period,
            "E_crit": self.E_crit,
            "epsilon": self.epsilon,
            "grid": list(self.grid),
            "escape_fraction": self.escape_fraction,
            "verdict": self.verdict,
            "undetermined_count": self.undetermined_count,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def strip_samples(E: float, epsilon: float, grid=DEFAULT_GRID) -> np.ndarray:
    nre, nim = grid
    re = np.arange(nre) / nre
    im = E + epsilon * (2.0 * (np.arange(nim) + 0.5) / nim - 1.0)
    return (re[None, :] + 1j * im[:, None]).ravel()


def accessibility_test(pp: ParabolicPoint, epsilon: float = 0.05, grid=DEFAULT_GRID,
                       budget: int = ESCAPE_BUDGET, height: float | None = None) -> AccessibilityReport:
    """Escape test on a strip of the repelling cylinder around the critical height."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    E = critical_ecalle_height(pp)
    center = E if height is None else float(height)
    chart = repelling_chart(pp)
    pts = []
    undetermined = 0
    for W in strip_samples(center, epsilon, grid):
        try:
            z = repelling_fatou_inverse(chart, complex(W))
        except (ArithmeticError, OverflowError):
            undetermined += 1
            continue
        pts.append(z)
    total = grid[0] * grid[1]
    escaped = 0
    if pts:
        counts = escape_counts(pp.c, np.array(pts), budget)
        escaped = int(np.count_nonzero(counts))
    frac = escaped / total
    verdict = undetermined == 0 and escaped == total
    return AccessibilityReport(pp.c, pp.period, E, epsilon, tuple(grid), frac, verdict, undetermined)


# ------------------------------------------------------------- lifted phase


@dataclass(frozen=True)
class Transit:
    phase: complex  # Phi_rep(F^n z) - Phi_attr(z) - n
    n: int
    height_in: float
    height_out: float


def transit(c_pert, z, pp: ParabolicPoint, depth: int = 5_000_000) -> Transit:
    c_pert = as_complex(c_pert, "c_pert")
    z = as_complex(z, "z")
    attr = attracting_chart(pp)
    rep = repelling_chart(pp)
    nd = attr.normal
    eps = abs(c_pert - pp.c)
    if eps == 0:
        raise ValueError("c_pert must differ from the parabolic parameter")
    # unperturbed coordinates are used where the perturbation is invisible
    W_m = min(max((1e-7 / eps) ** (1.0 / 3.0), 12.0), 1e4)
    P = series.iterate_taylor(c_pert, pp.x, 2 * pp.period)
    P[0] -= pp.x
    k = 0
    h = z - pp.x
    local = abs(h) < nd.h_loc
    phi_in = None
    while k < depth:
        if local:
            w = _to_w(nd, h)
            if phi_in is None:
                if _in_attracting(w, W_m):
                    phi_in = _phi0(nd, w, False) + attr.const - k
            elif _in_repelling(w, 1e-300) and abs(w) <= W_m:
                out = _phi0(nd, w, True) + rep.const
                C = out - phi_in - k
                return Transit(C, k, phi_in.imag, out.imag)
            h = complex(series.evaluate(P, h))
        else:
            z = holomorphic_iterate(c_pert, z, 2 * pp.period)[0]
            if not cmath.isfinite(z) or abs(z) > 2.0 + abs(c_pert):
                raise ArithmeticError("orbit escapes before transiting")
            h = z - pp.x
            local = abs(h) < nd.h_loc
        k += 1
    raise ArithmeticError(f"orbit does not transit within {depth} steps")


def lifted_phase(c_pert, z, pp: ParabolicPoint) -> float:
    """Real constant C with Phi_rep(F^n z) = Phi_attr(z) + n + C across the gate."""
    t = transit(c_pert, z, pp)
    if abs(t.phase.imag) >= 1e-4:
        raise ArithmeticError(f"lifted phase has imaginary part {t.phase.imag:.3g}")
    return t.phase.real
