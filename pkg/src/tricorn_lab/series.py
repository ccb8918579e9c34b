"""Truncated power series on numpy coefficient arrays (index = power)."""
from __future__ import annotations

import numpy as np


def mul(a, b, order: int):
    out = np.convolve(a[: order + 1], b[: order + 1])[: order + 1]
    if out.size < order + 1:
        out = np.concatenate([out, np.zeros(order + 1 - out.size, dtype=out.dtype)])
    return out


def pad(a, order: int):
    a = np.asarray(a, dtype=complex)[: order + 1]
    if a.size < order + 1:
        a = np.concatenate([a, np.zeros(order + 1 - a.size, dtype=complex)])
    return a


def reciprocal(a, order: int):
    """Series of 1/a; requires a[0] != 0."""
    a = pad(a, order)
    out = np.zeros(order + 1, dtype=complex)
    out[0] = 1.0 / a[0]
    for j in range(1, order + 1):
        out[j] = -np.dot(a[1 : j + 1], out[j - 1 :: -1][:j]) / a[0]
    return out


def log1p(a, order: int):
    """Series of log(1 + a) for a with zero constant term."""
    a = pad(a, order)
    if a[0] != 0:
        raise ValueError("log1p needs a vanishing constant term")
    # d/du log(1+a) = a' / (1+a)
    da = np.arange(1, order + 1) * a[1:]
    one_plus = a.copy()
    one_plus[0] += 1.0
    q = mul(pad(da, order), reciprocal(one_plus, order), order)
    out = np.zeros(order + 1, dtype=complex)
    out[1:] = q[:order] / np.arange(1, order + 1)
    return out


def power(a, n: int, order: int):
    out = pad([1.0], order)
    for _ in range(n):
        out = mul(out, a, order)
    return out


def evaluate(a, x):
    """Horner evaluation; works for scalars and numpy arrays."""
    acc = np.zeros_like(np.asarray(x, dtype=complex)) + a[-1]
    for coeff in a[-2::-1]:
        acc = acc * x + coeff
    return acc


def derivative(a):
    return np.arange(1, len(a)) * np.asarray(a)[1:]


def iterate_taylor(c: complex, x: complex, k: int, order: int | None = None):
    """Taylor coefficients in h of q_k(x + h), the holomorphic form of f_c^k.

    With ``order=None`` the expansion is exact (degree 2**k).
    """
    if order is None:
        order = 2 ** k
    q = pad([x, 1.0], order)
    cb = complex(c).conjugate()
    for j in range(k):
        q = mul(q, q, order)
        q[0] += cb if j % 2 == 0 else c
    return q
