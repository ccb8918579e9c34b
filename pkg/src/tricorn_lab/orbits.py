"""Periodic orbits, multipliers and the real sequence c_n with Q_{c_n}^{2n+3}(0) = 0."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import mpmath
import numpy as np

from .core import as_complex, holomorphic_iterate, iterate

CN_BRACKET = (-2.0, -1.7)


@dataclass(frozen=True)
class PeriodicOrbit:
    c: complex
    period: int
    points: tuple
    multiplier: complex

    @property
    def residual(self) -> float:
        pts = self.points
        return max(abs(pts[i].conjugate() ** 2 + self.c - pts[(i + 1) % len(pts)]) for i in range(len(pts)))


@dataclass(frozen=True)
class CnRecord:
    n: int
    N: int
    c_n: float
    lambda_n: float
    orbit_check: bool

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class PeriodicPoints:
    """Result of :func:`periodic_points`; iterates like a list of orbits."""

    orbits: list = field(default_factory=list)
    complete: bool = True
    roots_found: int = 0
    degree: int = 0

    def __iter__(self):
        return iter(self.orbits)

    def __len__(self):
        return len(self.orbits)

    def __getitem__(self, i):
        return self.orbits[i]


def _newton_second(c: complex, z: complex, tol=1e-15, maxit=200) -> complex:
    for _ in range(maxit):
        q, dq, _ = holomorphic_iterate(c, z, 2)
        if dq == 1:
            break
        step = (q - z) / (dq - 1.0)
        z -= step
        if abs(step) <= tol * max(1.0, abs(z)):
            break
    return z


def _polish_fixed(c: complex, z: complex, maxit=8) -> complex:
    # real 2x2 Newton on f(z) - z, written with Wirtinger derivatives
    for _ in range(maxit):
        r = -(z.conjugate() ** 2 + c - z)
        a, b = -1.0, 2.0 * z.conjugate()
        det = abs(a) ** 2 - abs(b) ** 2
        if abs(det) < 1e-8:
            break
        dz = (a * r - b * r.conjugate()) / det
        z += dz
        if abs(dz) < 1e-17 * max(1.0, abs(z)):
            break
    return z


def beta_fixed_point(c) -> complex:
    """Fixed point of f_c reached by Newton from the large real seed 2 + |c|."""
    c = as_complex(c, "c")
    seed = complex(2.0 + abs(c), 0.0)
    z = _polish_fixed(c, seed, maxit=100)
    if abs(z.conjugate() ** 2 + c - z) > 1e-12 * max(1.0, abs(z)) ** 2:
        z = _polish_fixed(c, _newton_second(c, seed))
    if abs(z.conjugate() ** 2 + c - z) > 1e-12 * max(1.0, abs(z)) ** 2:
        # fixed points of f_c are among the roots of f_c^2(z) - z
        cb = c.conjugate()
        roots = np.roots([1.0, 0.0, 2.0 * cb, -1.0, cb * cb + c])
        fixed = [_polish_fixed(c, complex(r)) for r in roots]
        fixed = [w for w in fixed if abs(w.conjugate() ** 2 + c - w) < 1e-10 * max(1.0, abs(w)) ** 2]
        if fixed:
            z = max(fixed, key=lambda w: w.real)
    res = abs(z.conjugate() ** 2 + c - z)
    if not math.isfinite(res) or res > 1e-12 * max(1.0, abs(z)) ** 2:
        raise ArithmeticError(f"beta fixed point did not converge at c={c} (residual {res:.3g})")
    return z


def multiplier(c, orbit) -> complex:
    """Multiplier of a cycle with the parity convention.

    Even period p: (f^p)'(z).  Odd period p: (f^{2p})'(z), which equals
    |d/dzbar f^p|^2 and is returned as a non-negative real.
    """
    c = as_complex(c, "c")
    pts = list(orbit.points) if isinstance(orbit, PeriodicOrbit) else [complex(z) for z in orbit]
    p = len(pts)
    if p % 2 == 1:
        m = 1.0
        for z in pts:
            m *= 4.0 * (z.real * z.real + z.imag * z.imag)
        return complex(m, 0.0)
    d = 1.0 + 0.0j
    for j, z in enumerate(pts):
        d *= 2.0 * (z if j % 2 == 0 else z.conjugate())
    return d


def _exact_period(c, z, p, tol):
    w = z
    for d in range(1, p + 1):
        w = w.conjugate() ** 2 + c
        if abs(w - z) < tol * max(1.0, abs(z)):
            return d
    return None


def periodic_points(c, p: int, grid: int = 64, dedup_tol: float = 1e-8, newton_steps: int = 80) -> PeriodicPoints:
    """All cycles of exact period p of f_c, found by Newton from a square grid.

    Odd p works with the holomorphic equation f^{2p}(z) = z and keeps the
    roots that are also fixed by f^p.
    """
    c = as_complex(c, "c")
    if not 1 <= p <= 12:
        raise ValueError("period must be in 1..12")
    k = p if p % 2 == 0 else 2 * p
    half = 2.0 + abs(c)
    xs = np.linspace(-half, half, grid)
    z = (xs[None, :] + 1j * xs[:, None]).ravel()
    cb = np.conj(c)
    with np.errstate(all="ignore"):
        for _ in range(newton_steps):
            q = z.copy()
            dq = np.ones_like(z)
            for j in range(k):
                dq = 2.0 * q * dq
                q = q * q + (cb if j % 2 == 0 else c)
            z = z - (q - z) / (dq - 1.0)
    z = z[np.isfinite(z)]
    roots: list[complex] = []
    for w in z:
        w = complex(w)
        for _ in range(4):
            q, dq, _ = holomorphic_iterate(c, w, k)
            if dq == 1:
                break
            w = w - (q - w) / (dq - 1.0)
        q, _, _ = holomorphic_iterate(c, w, k)
        if abs(q - w) > 1e-9 * max(1.0, abs(w)) or not math.isfinite(abs(w)):
            continue
        if all(abs(w - r) > dedup_tol for r in roots):
            roots.append(w)
    orbits: list[PeriodicOrbit] = []
    seen: list[complex] = []
    # a parabolic cycle is a multiple root, resolved only to ~sqrt(eps)
    near = max(dedup_tol, 1e-6)
    for w in sorted(roots, key=lambda r: (round(r.real, 9), round(r.imag, 9))):
        if any(abs(w - s) < near for s in seen):
            continue
        if abs(iterate(c, w, p) - w) > 1e-7 * max(1.0, abs(w)):
            continue
        if _exact_period(c, w, p, 1e-8) != p:
            continue
        pts = [w]
        for _ in range(p - 1):
            pts.append(pts[-1].conjugate() ** 2 + c)
        seen.extend(pts)
        rep = min(range(p), key=lambda i: (pts[i].real, pts[i].imag))
        pts = pts[rep:] + pts[:rep]
        orbits.append(PeriodicOrbit(c, p, tuple(pts), multiplier(c, pts)))
    orbits.sort(key=lambda o: (o.points[0].real, o.points[0].imag))
    degree = 2 ** k
    return PeriodicPoints(orbits, len(roots) >= degree, len(roots), degree)


def critical_orbit_real(c: float, N: int) -> float:
    x = 0.0
    for _ in range(N):
        x = x * x + c
    return x


def _scan_bracket(n: int):
    N = 2 * n + 3
    lo, hi = CN_BRACKET
    # dense in the offset from -2, where the roots accumulate
    offsets = np.concatenate([[0.0], np.logspace(-15, math.log10(hi - lo), 6000)])
    cs = lo + offsets
    vals = np.zeros_like(cs)
    for _ in range(N):
        vals = vals * vals + cs
    sgn = np.sign(vals)
    idx = np.nonzero(sgn[:-1] * sgn[1:] <= 0)[0]
    if idx.size == 0:
        raise ArithmeticError(f"no sign change of Q_c^{N}(0) in {CN_BRACKET}")
    i = idx[0]
    return float(cs[i]), float(cs[i + 1])


def _ordering_ok(c: float, N: int) -> bool:
    orbit = [0.0]
    dc = 0.0
    for _ in range(N):
        dc = 2.0 * orbit[-1] * dc + 1.0
        orbit.append(orbit[-1] ** 2 + c)
    # c = Q(0) < 0 = Q^N(0) < Q^{N-1}(0) < ... < Q^2(0)
    chain = [orbit[1], 0.0] + [orbit[j] for j in range(N - 1, 1, -1)]
    # residual measured against the sensitivity d Q^N(0) / dc
    scale = max(1.0, abs(dc))
    return abs(orbit[N]) < 1e-12 * scale and all(a < b for a, b in zip(chain, chain[1:]))


def solve_c_n(n: int) -> CnRecord:
    """Leftmost real root c_n of c -> Q_c^{2n+3}(0) in [-2, -1.7]."""
    if not 0 <= n <= 8:
        raise ValueError("n must be in 0..8")
    N = 2 * n + 3
    a, b = _scan_bracket(n)
    fa = critical_orbit_real(a, N)
    for _ in range(200):
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        fm = critical_orbit_real(m, N)
        if fm == 0.0:
            a = b = m
            break
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    c = a if abs(critical_orbit_real(a, N)) <= abs(critical_orbit_real(b, N)) else b
    beta = (1.0 + math.sqrt(1.0 - 4.0 * c)) / 2.0
    lam = 4.0 * beta * beta
    return CnRecord(n, N, c, lam, _ordering_ok(c, N))


def solve_c_n_mp(n: int, dps: int = 60):
    """High-precision c_n (mpmath), refined from the double-precision root."""
    N = 2 * n + 3
    seed = solve_c_n(n).c_n
    with mpmath.workdps(dps):
        def q(c):
            x = mpmath.mpf(0)
            for _ in range(N):
                x = x * x + c
            return x

        # the double root is within a few ulp; bracket generously and bisect
        width = mpmath.mpf(abs(seed + 2.0)) * mpmath.mpf("1e-6") + mpmath.mpf("1e-14")
        a = mpmath.mpf(seed) - width
        b = mpmath.mpf(seed) + width
        fa = q(a)
        if fa * q(b) > 0:
            raise ArithmeticError("high-precision bracket for c_n failed")
        c = mpmath.findroot(q, (a, b), solver="anderson")
        if not a <= c <= b:
            for _ in range(4 * dps):
                m = (a + b) / 2
                if (q(m) > 0) == (fa > 0):
                    a = m
                else:
                    b = m
            c = (a + b) / 2
        return +c


def cn_table(n_max: int) -> list[CnRecord]:
    return [solve_c_n(n) for n in range(n_max + 1)]
