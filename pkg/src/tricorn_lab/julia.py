"""Point clouds of Julia sets and their small-scale geometry near c = -2."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from .core import as_complex, escape_counts
from .koenigs import build_chart, koenigs_eval
from .orbits import beta_fixed_point, solve_c_n
from .rays import green_potential

BURN_IN = 50
WALKERS = 256
MAX_COUNT = 10_000_000
LAMBDA = 16.0
DEFAULT_RL_RADII = tuple(np.logspace(-6, -2, 9))
# calibrated at n = 4: median |z| of pulled-back samples is about
# BAND_SCALE[m] * 16^-(1 - 2^-m) n
BAND_SCALE = (0.57, 0.24, 0.15, 0.12, 0.11)
BAND_LO, BAND_HI = 0.125, 4.0  # ratio 32
Y_MIN = 0.1


@dataclass(frozen=True)
class PointCloud:
    c: complex
    points: np.ndarray = field(repr=False)
    method: str = "inverse_iteration"
    seed: int | None = None

    def __len__(self):
        return len(self.points)

    def sidecar(self) -> dict:
        return {"c": [self.c.real, self.c.imag], "count": len(self.points), "seed": self.seed, "method": self.method}

    def save(self, path) -> None:
        """Little-endian float64 (re, im) pairs plus a JSON sidecar."""
        path = Path(path)
        pairs = np.empty((len(self.points), 2), dtype="<f8")
        pairs[:, 0] = self.points.real
        pairs[:, 1] = self.points.imag
        path.write_bytes(pairs.tobytes())
        path.with_suffix(path.suffix + ".json").write_text(json.dumps(self.sidecar()))

    @classmethod
    def load(cls, path) -> "PointCloud":
        path = Path(path)
        meta = json.loads(path.with_suffix(path.suffix + ".json").read_text())
        pairs = np.frombuffer(path.read_bytes(), dtype="<f8").reshape(-1, 2)
        pts = pairs[:, 0] + 1j * pairs[:, 1]
        return cls(complex(*meta["c"]), pts, meta["method"], meta["seed"])


def _inverse(c: complex, w: np.ndarray, signs: np.ndarray) -> np.ndarray:
    # preimages of w under conj(z)^2 + c are conj(+-sqrt(w - c))
    return np.conj(signs * np.sqrt(w - c))


def sample_julia(c, count: int, seed: int = 0) -> PointCloud:
    """Random backward orbits from beta_c after a burn-in of 50 steps."""
    c = as_complex(c, "c")
    if not 1 <= count <= MAX_COUNT:
        raise ValueError(f"count must be in 1..{MAX_COUNT}")
    beta = beta_fixed_point(c)
    walkers = min(WALKERS, count)
    per = -(-count // walkers)
    children = np.random.SeedSequence(seed).spawn(walkers)
    gens = [np.random.Generator(np.random.Philox(s)) for s in children]
    # one row of sign choices per walker, each from its own stream
    signs = np.stack([g.integers(0, 2, BURN_IN + per) for g in gens]) * 2 - 1
    z = np.full(walkers, beta, dtype=complex)
    out = np.empty((walkers, per), dtype=complex)
    for k in range(BURN_IN + per):
        z = _inverse(c, z, signs[:, k])
        if k >= BURN_IN:
            out[:, k - BURN_IN] = z
    return PointCloud(c, out.ravel()[:count], "inverse_iteration", seed)


def filled_real_segment(c, count: int = 1000) -> np.ndarray:
    """Real interval [-beta, beta] contained in K(f_c) for real c in [-2, 1/4]."""
    c = as_complex(c, "c")
    if c.imag != 0 or not -2.0 <= c.real <= 0.25:
        return np.empty(0, dtype=complex)
    b = beta_fixed_point(c).real
    return np.linspace(-b, b, count).astype(complex)


def membership_fraction(cloud: PointCloud, max_iter: int = 1000, fraction: float = 0.01, seed: int = 0,
                        g_tol: float = 1e-8) -> float:
    """Share of a random subsample that is bounded or within rounding of K.

    J is repelling, so a rounded point on J drifts off and escapes well
    before 10^3 steps; such points still have Green potential ~1e-14.
    """
    rng = np.random.Generator(np.random.Philox(seed))
    k = max(1, int(len(cloud) * fraction))
    idx = rng.choice(len(cloud), size=k, replace=False)
    pts = cloud.points[idx]
    bounded = escape_counts(cloud.c, pts, max_iter) == 0
    near = np.array([green_potential(cloud.c, z, max_iter).value < g_tol for z in pts])
    return float(np.mean(bounded | near))


def hausdorff_distance(A, B) -> float:
    a = np.asarray(A.points if isinstance(A, PointCloud) else A, dtype=complex).ravel()
    b = np.asarray(B.points if isinstance(B, PointCloud) else B, dtype=complex).ravel()
    if a.size == 0 or b.size == 0:
        raise ValueError("point clouds must be non-empty")
    pa = np.column_stack([a.real, a.imag])
    pb = np.column_stack([b.real, b.imag])
    d_ab = cKDTree(pb).query(pa)[0].max()
    d_ba = cKDTree(pa).query(pb)[0].max()
    return float(max(d_ab, d_ba))


@dataclass(frozen=True)
class RLFit:
    slope: float
    r2: float
    radii: tuple
    heights: tuple

    def to_json(self) -> dict:
        return {"slope": self.slope, "r2": self.r2, "radii": list(self.radii), "heights": list(self.heights)}


def vertical_extent(r: float, count: int = 20_000, seed: int = 0) -> float:
    """max |Im z| over K(f_c) samples for c = -2 + r and c = -2 + i r."""
    h = 0.0
    for c in (complex(-2.0 + r, 0.0), complex(-2.0, r)):
        cloud = sample_julia(c, count, seed)
        pts = np.concatenate([cloud.points, filled_real_segment(c)])
        h = max(h, float(np.abs(pts.imag).max()))
    return h


def rl_scaling_fit(radii=DEFAULT_RL_RADII, count: int = 20_000, seed: int = 0) -> RLFit:
    """Least-squares slope of log h(r) against log r."""
    radii = [float(r) for r in radii]
    if len(radii) < 2:
        raise ValueError("need at least two radii")
    if any(not 1e-6 * (1 - 1e-9) <= r <= 1e-2 * (1 + 1e-9) for r in radii):
        raise ValueError("radii must lie in [1e-6, 1e-2]")
    heights = [vertical_extent(r, count, seed) for r in radii]
    if min(heights) <= 0:
        raise ArithmeticError("degenerate fit: zero vertical extent")
    x, y = np.log(radii), np.log(heights)
    slope, icpt = np.polyfit(x, y, 1)
    resid = y - (slope * x + icpt)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0:
        raise ArithmeticError("degenerate fit: constant heights")
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot
    return RLFit(float(slope), r2, tuple(radii), tuple(heights))


@dataclass(frozen=True)
class BandSpec:
    n: int
    m: int
    r_lo: float
    r_hi: float


def band_spec(n: int, m: int) -> BandSpec:
    scale = BAND_SCALE[m] * LAMBDA ** (-(1.0 - 2.0 ** -m) * n)
    return BandSpec(n, m, BAND_LO * scale, BAND_HI * scale)


def _critical_orbit(c: float, N: int) -> np.ndarray:
    orb = [0j]
    for _ in range(N):
        orb.append(orb[-1].conjugate() ** 2 + c)
    return np.array(orb)


def _pull_back_return(c: complex, orbit: np.ndarray, w: np.ndarray, sign: np.ndarray) -> np.ndarray:
    """Preimages near 0 of w under the first return f^N along the critical orbit."""
    N = len(orbit) - 1
    for j in range(N - 1, 0, -1):
        r = np.conj(np.sqrt(w - c))
        w = np.where(np.abs(r - orbit[j]) <= np.abs(-r - orbit[j]), r, -r)
    return np.conj(sign * np.sqrt(w - c))


@dataclass(frozen=True)
class Quantization:
    n: int
    m: int
    c: complex
    band: BandSpec
    max_dev: float
    histogram: tuple
    bin_edges: tuple
    samples: int
    seed: int

    def to_json(self) -> dict:
        return {
            "n": self.n, "m": self.m, "c": [self.c.real, self.c.imag],
            "band": [self.band.r_lo, self.band.r_hi], "max_dev": self.max_dev,
            "histogram": list(self.histogram), "bin_edges": list(self.bin_edges),
            "samples": self.samples, "seed": self.seed,
        }


def argument_quantization(n: int, m: int, count: int = 20_000, seed: int = 0, c=None, bins: int = 16) -> Quantization:
    """Deviation of arg z from multiples of pi/2^m for K-points in the m-th band.

    K-points of D^0 (|Re y| <= 1, away from the critical point) are pulled
    back m times by the first-return map f^{2n+3} along the critical orbit.
    """
    if not 0 <= n <= 6:
        raise ValueError("n must be in 0..6")
    if not 0 <= m <= 4:
        raise ValueError("m must be in 0..4")
    N = 2 * n + 3
    c = complex(solve_c_n(n).c_n) if c is None else as_complex(c, "c")
    orbit = _critical_orbit(c, N)
    if m > 0 and abs(orbit[-1]) > 1e-6:
        raise ValueError("the critical point is not periodic with period 2n+3 at this c")
    cloud = sample_julia(c, count, seed)
    y = cloud.points
    z = y[(np.abs(y.real) <= 1.0) & (np.abs(y) >= Y_MIN)]
    rng = np.random.Generator(np.random.Philox(seed + 1))
    for _ in range(m):
        z = _pull_back_return(c, orbit, z, rng.integers(0, 2, z.size) * 2 - 1)
    band = band_spec(n, m)
    r = np.abs(z)
    z = z[(r >= band.r_lo) & (r <= band.r_hi)]
    if z.size < 10:
        raise ArithmeticError(f"band holds only {z.size} samples")
    q = math.pi / 2 ** m
    ang = np.angle(z)
    dev = np.abs(ang - q * np.round(ang / q))
    hist, edges = np.histogram(dev, bins=bins, range=(0.0, q / 2))
    return Quantization(n, m, c, band, float(dev.max()), tuple(int(h) for h in hist),
                        tuple(float(e) for e in edges), int(z.size), seed)


def koenigs_interval_check(grid_step: float = 1e-3) -> tuple:
    """min and max of kappa_{-2} over a grid of [-1, 1]."""
    if not 0 < grid_step <= 1e-3:
        raise ValueError("grid_step must be in (0, 1e-3]")
    chart = build_chart(-2.0)
    k = int(round(2.0 / grid_step))
    xs = np.linspace(-1.0, 1.0, k + 1)
    vals = np.array([koenigs_eval(chart, x).real for x in xs])
    return float(vals.min()), float(vals.max())
