"""Green potential, Boettcher coordinate and external rays of f_c."""
from __future__ import annotations

import cmath
import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import as_complex, holomorphic_iterate

BIG = 1e8  # Phi(z) ~ z beyond this modulus (relative error |c| / BIG^2)
TARGET_LOG = math.log(1e6)
LANDING_TOL = 1e-8
LANDING_WINDOW = 20
NEWTON_MAXIT = 60
MAX_SUBDIV = 12


@dataclass(frozen=True)
class GreenEstimate:
    value: float
    depth: int
    resid: float


@dataclass(frozen=True)
class RayTrace:
    kind: str  # "dynamical" or "parameter"
    angle: tuple
    samples: tuple  # ((potential, complex), ...), potential decreasing
    landing_estimate: complex | None = None
    c: complex | None = None
    truncated: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def points(self) -> np.ndarray:
        return np.array([p for _, p in self.samples], dtype=complex)

    @property
    def potentials(self) -> np.ndarray:
        return np.array([g for g, _ in self.samples])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["potential", "re", "im"])
        for g, p in self.samples:
            w.writerow([repr(g), repr(p.real), repr(p.imag)])
        return buf.getvalue()

    def to_json(self) -> dict:
        land = self.landing_estimate
        out = {
            "kind": self.kind,
            "angle": {"num": self.angle[0], "den": self.angle[1]},
            "samples": [[g, p.real, p.imag] for g, p in self.samples],
            "landing": None if land is None else [land.real, land.imag],
        }
        if self.c is not None:
            out["c"] = [self.c.real, self.c.imag]
        if self.truncated:
            out["truncated"] = True
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def as_angle(theta) -> Fraction:
    if isinstance(theta, tuple):
        theta = Fraction(*theta)
    elif isinstance(theta, float):
        theta = Fraction(theta).limit_denominator(10**9)
    else:
        theta = Fraction(theta)
    return theta - math.floor(theta)


def green_potential(c, z, depth: int = 100) -> GreenEstimate:
    """G_c(z) = lim 2^-k log|f_c^k(z)|; value 0 when the orbit stays bounded."""
    c = as_complex(c, "c")
    z = as_complex(z, "z")
    radius = 2.0 + abs(c)
    prev = None
    for k in range(depth + 1):
        m = abs(z)
        if m > radius:
            val = math.ldexp(math.log(m), -k)
            if prev is not None:
                resid = abs(val - prev)
                if resid < 1e-15 or m > 1e150:
                    return GreenEstimate(val, k, resid)
            prev = val
        if k < depth:
            z = z.conjugate() ** 2 + c
    if prev is None:
        return GreenEstimate(0.0, depth, math.inf)
    return GreenEstimate(prev, depth, abs(prev - math.ldexp(math.log(abs(z)), -depth)))


def boettcher(c, z, depth: int = 200) -> complex:
    """Phi_c(z) with Phi_c(f_c(z)) = conj(Phi_c(z))^2 and Phi_c(z)/z -> 1.

    Works with the ratios r_j = Phi(z_j)/z_j along the orbit: r_j is a
    square root of conj(u_j r_{j+1}) with u_j = z_{j+1}/conj(z_j)^2, and the
    root nearest r_{j+1} is kept.
    """
    c = as_complex(c, "c")
    z = as_complex(z, "z")
    orbit = [z]
    while abs(orbit[-1]) <= BIG:
        if len(orbit) > depth:
            raise ArithmeticError(f"orbit of {z} does not escape within {depth} steps")
        w = orbit[-1]
        orbit.append(w.conjugate() ** 2 + c)
    r = 1.0 + 0.0j
    for j in range(len(orbit) - 2, -1, -1):
        zj = orbit[j]
        if zj == 0:
            raise ArithmeticError("orbit passes through the critical point")
        u = orbit[j + 1] / zj.conjugate() ** 2
        s = cmath.sqrt(u * r).conjugate()
        d1, d2 = abs(s - r), abs(-s - r)
        if abs(d1 - d2) < 1e-9 * max(d1, d2):
            raise ArithmeticError(f"branch ambiguity for Boettcher coordinate at {z}")
        r = s if d1 < d2 else -s
    return z * r


def _depth_for(g: float) -> int:
    if g >= TARGET_LOG:
        return 0
    return max(0, math.ceil(math.log2(TARGET_LOG / g)))


def _target(g: float, theta: Fraction, k: int) -> complex:
    # Boettcher value of f^k at potential g and angle theta (angle map t -> -2t)
    ang = float((theta * (-2) ** k) % 1)
    return cmath.exp(complex(math.ldexp(g, k), 2.0 * math.pi * ang))


def _aitken_tail(points: list) -> complex | None:
    if len(points) < LANDING_WINDOW + 2:
        return None
    acc = []
    for a, b, d in zip(points, points[1:], points[2:]):
        den = d - 2 * b + a
        acc.append(d if den == 0 else d - (d - b) ** 2 / den)
    tail = acc[-LANDING_WINDOW:]
    spread = max(abs(p - tail[-1]) for p in tail)
    if spread < LANDING_TOL:
        return tail[-1]
    return None


def _schedule(g_hi: float, g_lo: float, per_halving: int) -> list:
    if not (g_hi > g_lo > 0):
        raise ValueError("need g_hi > g_lo > 0")
    if per_halving < 1:
        raise ValueError("steps per halving must be >= 1")
    n = max(1, math.ceil(per_halving * math.log2(g_hi / g_lo)))
    # exactly geometric, so that the tail can be accelerated
    gs = list(np.geomspace(g_hi, g_lo, n + 1))
    gs[-1] = g_lo
    return gs


def _dyn_newton(c, z, g, theta):
    k = _depth_for(g)
    T = _target(g, theta, k)
    if k % 2 == 1:
        T = T.conjugate()
    for _ in range(NEWTON_MAXIT):
        q, dq, _ = holomorphic_iterate(c, z, k)
        if dq == 0 or not cmath.isfinite(q):
            return None
        # Newton on log q - log T keeps the residual O(1) for large k
        step = (cmath.log(q / T)) * q / dq
        z -= step
        if abs(step) < 1e-15 * max(1.0, abs(z)):
            break
    q, dq, _ = holomorphic_iterate(c, z, k)
    if not cmath.isfinite(q):
        return None
    # allow for the rounding of z itself, amplified by the condition number
    tol = 1e-9 + 1e-14 * abs(z * dq / q)
    if abs(q / T - 1) > tol:
        return None
    return z


def _continue(solve, start, gs, ceiling):
    """Step along the potential schedule, subdividing failed steps."""
    samples = [(gs[0], start)]
    z = start
    for g_next in gs[1:]:
        g_prev = samples[-1][0]
        pending = [g_next]
        depth = 0
        while pending:
            g = pending[-1]
            cand = solve(z, g)
            if cand is not None and abs(cand - z) <= ceiling(z):
                z = cand
                pending.pop()
                g_prev = g
                continue
            depth += 1
            if depth > MAX_SUBDIV:
                return samples, True
            pending.append(math.sqrt(g_prev * g))
        samples.append((g_next, z))
    return samples, False


def trace_dynamical_ray(c, theta, g_hi: float = 4.0, g_lo: float = 1e-6, steps_per_halving: int = 8) -> RayTrace:
    """Points of R_c(theta) from potential g_hi down to g_lo."""
    c = as_complex(c, "c")
    theta = as_angle(theta)
    gs = _schedule(g_hi, g_lo, steps_per_halving)
    # Phi_c is tangent to the identity at infinity
    seed = cmath.exp(complex(gs[0], 2.0 * math.pi * float(theta)))
    z0 = _dyn_newton(c, seed, gs[0], theta)
    if z0 is None:
        raise ArithmeticError("could not seed the dynamical ray")
    ceiling = lambda z: 0.5 * max(1.0, abs(z))  # noqa: E731
    samples, trunc = _continue(lambda z, g: _dyn_newton(c, z, g, theta), z0, gs, ceiling)
    land = None
    if not trunc and samples[-1][0] <= 1e-6:
        land = _aitken_tail([p for _, p in samples])
    return RayTrace("dynamical", (theta.numerator, theta.denominator), tuple(samples), land, c, trunc)


def _param_map(c: complex, k: int) -> complex:
    z = c
    for _ in range(k):
        z = z.conjugate() ** 2 + c
    return z


def _param_newton(c, g, theta):
    k = _depth_for(g)
    T = _target(g, theta, k)
    residual = lambda x: _param_map(x, k) / T - 1.0  # noqa: E731
    for _ in range(NEWTON_MAXIT):
        r = residual(c)
        if not cmath.isfinite(r):
            return None
        if abs(r) < 1e-13:
            break
        h = 1e-7 * max(1.0, abs(c))
        dx = (residual(c + h) - residual(c - h)) / (2 * h)
        dy = (residual(c + 1j * h) - residual(c - 1j * h)) / (2 * h)
        J = np.array([[dx.real, dy.real], [dx.imag, dy.imag]])
        try:
            sx, sy = np.linalg.solve(J, [-r.real, -r.imag])
        except np.linalg.LinAlgError:
            return None
        step = complex(sx, sy)
        # damp steps that would leave the basin
        while abs(step) > 0.25 * max(1.0, abs(c)):
            step /= 2
        c += step
        if abs(step) < 1e-15 * max(1.0, abs(c)):
            break
    r = residual(c)
    if not cmath.isfinite(r) or abs(r) > 1e-8:
        return None
    return c


def trace_parameter_ray(theta, g_hi: float = math.log(1e6), g_lo: float = 1e-3, steps: int = 8) -> RayTrace:
    """Parameter ray: solutions of Phi_c(c) = exp(g + 2 pi i theta)."""
    theta = as_angle(theta)
    gs = _schedule(g_hi, g_lo, steps)
    seed = cmath.exp(complex(gs[0], 2.0 * math.pi * float(theta)))
    c0 = _param_newton(seed, gs[0], theta)
    if c0 is None:
        raise ArithmeticError("could not seed the parameter ray")
    ceiling = lambda c: 0.5 * max(1.0, abs(c))  # noqa: E731
    samples, trunc = _continue(lambda c, g: _param_newton(c, g, theta), c0, gs, ceiling)
    land = None
    if not trunc and samples[-1][0] <= 1e-6:
        land = _aitken_tail([p for _, p in samples])
    return RayTrace("parameter", (theta.numerator, theta.denominator), tuple(samples), land, None, trunc)
