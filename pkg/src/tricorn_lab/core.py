"""Arithmetic of the anti-holomorphic quadratic family f_c(z) = conj(z)**2 + c.

Points of the plane are plain Python ``complex`` values.  Every public entry
point rejects NaN/Inf input.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

OMEGA = complex(-0.5, math.sqrt(3.0) / 2.0)

DEFAULT_MEMBER_ITER = 10_000
DEFAULT_POTENTIAL_ITER = 100


def as_complex(value, name: str = "value") -> complex:
    z = complex(value)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"{name} must be finite, got {z!r}")
    return z


@dataclass(frozen=True)
class AntiQuadratic:
    """The map f_c(z) = conj(z)^2 + c."""

    c: complex

    def __post_init__(self):
        object.__setattr__(self, "c", as_complex(self.c, "c"))

    def __call__(self, z: complex) -> complex:
        return apply(self, z)

    def second(self, z: complex) -> complex:
        return apply_second(self.c, z)


@dataclass(frozen=True)
class EscapeResult:
    escaped: bool
    iterations: int
    final_modulus: float
    potential: float


def apply(f, z) -> complex:
    """Evaluate f_c at z.  ``f`` may be an :class:`AntiQuadratic` or a bare c."""
    c = f.c if isinstance(f, AntiQuadratic) else as_complex(f, "c")
    z = as_complex(z, "z")
    return z.conjugate() ** 2 + c


def apply_second(c, z) -> complex:
    """Second iterate (z^2 + conj(c))^2 + c, holomorphic in z."""
    c = as_complex(c, "c")
    z = as_complex(z, "z")
    w = z * z + c.conjugate()
    return w * w + c


def iterate(c: complex, z: complex, k: int) -> complex:
    for _ in range(k):
        z = z.conjugate() ** 2 + c
    return z


def holomorphic_iterate(c: complex, z: complex, k: int):
    """Return (q, dq, conjugated) with f_c^k(z) = q or conj(q).

    ``q`` is a holomorphic polynomial in z: q_0 = z and
    q_{j+1} = q_j^2 + conj(c) on odd steps, q_j^2 + c on even ones.
    ``conjugated`` is True when f_c^k(z) = conj(q), i.e. for odd k.
    """
    cb = c.conjugate()
    q, dq = z, 1.0 + 0.0j
    for j in range(k):
        dq = 2.0 * q * dq
        q = q * q + (cb if j % 2 == 0 else c)
    return q, dq, k % 2 == 1


def escape_time(c, z0, max_iter: int = DEFAULT_POTENTIAL_ITER, radius: float | None = None) -> EscapeResult:
    """Iterate f_c from z0 until |z| exceeds ``radius`` or ``max_iter`` steps pass.

    ``iterations`` counts applications of f_c before the orbit was seen
    outside the radius, so a starting point already outside escapes at 0.
    """
    c = as_complex(c, "c")
    z = as_complex(z0, "z0")
    if radius is None:
        radius = 2.0 + abs(c)
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if not radius >= 2.0 + abs(c) - 1e-12:
        raise ValueError(f"radius must be >= 2 + |c| = {2.0 + abs(c)}")
    for k in range(max_iter + 1):
        m = abs(z)
        if m > radius:
            return EscapeResult(True, k, m, math.ldexp(math.log(m), -k))
        if k == max_iter:
            break
        z = z.conjugate() ** 2 + c
    return EscapeResult(False, max_iter, abs(z), 0.0)


def tricorn_member(c, max_iter: int = DEFAULT_MEMBER_ITER) -> bool:
    c = as_complex(c, "c")
    return not escape_time(c, 0.0, max_iter, 2.0 + abs(c)).escaped


def escape_counts(c, z0, max_iter: int, radius=None, dtype=np.complex128):
    """Vectorized escape time over arrays of parameters and/or start points.

    Returns an integer array: ``iterations + 1`` for escaped points and 0
    for points that stayed bounded for ``max_iter`` steps.  ``radius``
    defaults to 2 + |c| pointwise.
    """
    c = np.asarray(c, dtype=dtype)
    z = np.array(np.broadcast_to(np.asarray(z0, dtype=dtype), np.broadcast(c, z0).shape))
    c = np.broadcast_to(c, z.shape)
    if radius is None:
        r2 = (2.0 + np.abs(c)) ** 2
    else:
        r2 = np.broadcast_to(np.asarray(radius, dtype=float) ** 2, z.shape)
    out = np.zeros(z.shape, dtype=np.int64)
    flat_z = z.ravel().copy()
    flat_c = np.ascontiguousarray(c).ravel()
    flat_r2 = np.ascontiguousarray(r2).ravel()
    flat_out = out.ravel()
    alive = np.arange(flat_z.size)
    zs, cs, rs = flat_z, flat_c, flat_r2
    for k in range(max_iter + 1):
        mod2 = zs.real * zs.real + zs.imag * zs.imag
        gone = mod2 > rs
        if gone.any():
            flat_out[alive[gone]] = k + 1
            keep = ~gone
            alive, zs, cs, rs = alive[keep], zs[keep], cs[keep], rs[keep]
            if alive.size == 0:
                break
        if k == max_iter:
            break
        zs = np.conj(zs) ** 2 + cs
    return flat_out.reshape(out.shape)


def unit_root_rotation(c: complex, k: int = 1) -> complex:
    """Rotate c by the k-th power of e^{2 pi i/3} (a symmetry of the tricorn)."""
    return c * cmath.exp(2j * math.pi * k / 3.0)
