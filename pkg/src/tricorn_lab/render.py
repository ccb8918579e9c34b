"""Escape-time images of the tricorn, its Julia sets and baby windows."""
from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import mpmath
import numpy as np
from scipy import ndimage

from .core import as_complex, escape_counts
from .scaling import N_MAX, build_frame

TILE = 64
MAX_PIXELS = 10**8


@dataclass(frozen=True)
class Window:
    center: complex
    width: float
    height: float
    px_w: int
    px_h: int

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError("width and height must be positive")
        if self.px_w < 1 or self.px_h < 1 or self.px_w * self.px_h > MAX_PIXELS:
            raise ValueError(f"need 1 <= px_w*px_h <= {MAX_PIXELS}")

    @classmethod
    def square(cls, center, width: float, px: int) -> "Window":
        return cls(complex(center), float(width), float(width), int(px), int(px))

    def axes(self, dtype=np.float64):
        """Pixel-center coordinates; row 0 is the top edge."""
        cx, cy = dtype(self.center.real), dtype(self.center.imag)
        i = np.arange(self.px_w, dtype=dtype)
        j = np.arange(self.px_h, dtype=dtype)
        xs = cx + (i - dtype(self.px_w - 1) / 2) * (dtype(self.width) / self.px_w)
        ys = cy - (j - dtype(self.px_h - 1) / 2) * (dtype(self.height) / self.px_h)
        return xs, ys

    def grid(self, dtype=np.complex128) -> np.ndarray:
        real = np.longdouble if dtype == np.clongdouble else np.float64
        xs, ys = self.axes(real)
        return (xs[None, :] + 1j * ys[:, None]).astype(dtype)

    def pixel_of(self, z: complex) -> tuple:
        """(row, col) of the pixel nearest to z, possibly outside the image."""
        col = (z.real - self.center.real) / (self.width / self.px_w) + (self.px_w - 1) / 2
        row = (self.center.imag - z.imag) / (self.height / self.px_h) + (self.px_h - 1) / 2
        return int(round(row)), int(round(col))

    def to_json(self) -> dict:
        return {
            "center": [self.center.real, self.center.imag],
            "width": self.width, "height": self.height,
            "px_w": self.px_w, "px_h": self.px_h,
        }


@dataclass(frozen=True)
class ImageGrid:
    window: Window
    values: np.ndarray = field(repr=False)  # (px_h, px_w), 0 = interior
    max_iter: int
    kind: str
    meta: dict = field(default_factory=dict)

    @property
    def interior(self) -> np.ndarray:
        return self.values == 0

    def sidecar(self) -> dict:
        return {"window": self.window.to_json(), "max_iter": self.max_iter, "kind": self.kind, **self.meta}

    def gray(self) -> np.ndarray:
        """8-bit levels: interior black, escaped points brighter when they escape sooner."""
        v = self.values.astype(float)
        out = np.zeros(v.shape, dtype=np.uint8)
        esc = v > 0
        top = np.log(self.max_iter + 2.0)
        out[esc] = np.clip(255 * (1 - np.log(v[esc]) / top), 1, 255).astype(np.uint8)
        return out

    def to_ppm(self) -> bytes:
        g = self.gray()
        header = f"P6\n{self.window.px_w} {self.window.px_h}\n255\n".encode()
        return header + np.repeat(g[:, :, None], 3, axis=2).tobytes()

    def save(self, path) -> Path:
        path = Path(path)
        path.write_bytes(self.to_ppm())
        path.with_suffix(".json").write_text(json.dumps(self.sidecar(), sort_keys=True))
        return path


def default_threads() -> int:
    env = os.environ.get("TRICORN_LAB_THREADS")
    if env:
        n = int(env)
        if n < 1:
            raise ValueError("TRICORN_LAB_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1


def _tiled(c, z0, max_iter: int, dtype, tile: int, threads: int | None) -> np.ndarray:
    h, w = np.broadcast(c, z0).shape
    out = np.zeros((h, w), dtype=np.int64)
    slices = [(slice(r, min(r + tile, h)), slice(q, min(q + tile, w)))
              for r in range(0, h, tile) for q in range(0, w, tile)]
    c = np.broadcast_to(c, (h, w))
    z0 = np.broadcast_to(z0, (h, w))

    def work(s):
        # tiles write disjoint slices
        out[s] = escape_counts(c[s], z0[s], max_iter, dtype=dtype)

    with ThreadPoolExecutor(max_workers=threads or default_threads()) as pool:
        list(pool.map(work, slices))
    return out


def _check_iter(max_iter: int) -> int:
    if int(max_iter) < 1:
        raise ValueError("max_iter must be >= 1")
    return int(max_iter)


def render_parameter(window: Window, max_iter: int = 500, tile: int = TILE, threads: int | None = None) -> ImageGrid:
    max_iter = _check_iter(max_iter)
    c = window.grid()
    vals = _tiled(c, np.zeros((), dtype=complex), max_iter, np.complex128, tile, threads)
    return ImageGrid(window, vals, max_iter, "parameter")


def render_dynamical(c, window: Window, max_iter: int = 500, tile: int = TILE, threads: int | None = None) -> ImageGrid:
    c = as_complex(c, "c")
    max_iter = _check_iter(max_iter)
    vals = _tiled(np.asarray(c), window.grid(), max_iter, np.complex128, tile, threads)
    return ImageGrid(window, vals, max_iter, "dynamical", {"c": [c.real, c.imag]})


def baby_parameters(n: int, t_window: Window) -> np.ndarray:
    """c_n + rho_n(t) over the t-window in long double."""
    frame = build_frame(n)
    t = t_window.grid(np.clongdouble)
    k = np.longdouble(frame.k_n)
    # rho_n(t) = k_n ((b0 - b0*) Re t + i (b0 + b0*) Im t)
    re = k * (np.longdouble(frame.b0) - np.longdouble(frame.b0_star)) * t.real
    im = k * (np.longdouble(frame.b0) + np.longdouble(frame.b0_star)) * t.imag
    with mpmath.workdps(30):
        cn = np.longdouble(mpmath.nstr(mpmath.mpf(frame.c_n_exact), 25))
    return (cn + re) + 1j * im


def render_baby_window(n: int, t_window: Window, max_iter: int = 2000, tile: int = TILE,
                       threads: int | None = None) -> ImageGrid:
    """Parameter image of c_n + rho_n(t) with axes in t."""
    if not 0 <= n <= N_MAX:
        raise ValueError(f"n must be in 0..{N_MAX}")
    max_iter = _check_iter(max_iter)
    c = baby_parameters(n, t_window)
    vals = _tiled(c, np.zeros((), dtype=np.clongdouble), max_iter, np.clongdouble, tile, threads)
    return ImageGrid(t_window, vals, max_iter, "baby", {"n": n})


def baby_component(n: int, t_window: Window, max_iter: int = 2000, tol: float = 1e-4) -> np.ndarray:
    """Pixels of the central component: attracting cycle of exact period 2n + 3,
    4-connected to the image center.  ``tol`` is in rescaled units alpha_n z.
    """
    N = 2 * n + 3
    tol = tol / abs(build_frame(n).alpha_n)
    c = baby_parameters(n, t_window).ravel()
    z = np.zeros_like(c)
    alive = np.ones(c.shape, dtype=bool)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(max_iter):
            z[alive] = np.conj(z[alive]) ** 2 + c[alive]
            alive &= np.abs(z) <= 4.0
        # compare at the cycle point nearest 0, where the halves of a
        # doubled cycle are 1/alpha_n apart rather than 1/alpha_n^2
        w = z.copy()
        for _ in range(N):
            w = np.where(alive, np.conj(w) ** 2 + c, 0)
            z = np.where(np.abs(w) < np.abs(z), w, z)
        w = z.copy()
        gain = np.zeros(c.shape, dtype=np.longdouble)
        for j in range(N):
            gain += np.log(2 * np.abs(w) + 1e-300)
            w = np.where(alive, np.conj(w) ** 2 + c, 0)
            # a shorter cycle is not the central component
            if j < N - 1:
                alive &= np.abs(w - z) > tol
        mask = alive & (np.abs(w - z) <= tol) & (gain < 0)
    mask = mask.reshape(t_window.px_h, t_window.px_w)
    labels, _ = ndimage.label(mask)
    lab = labels[(t_window.px_h - 1) // 2, (t_window.px_w - 1) // 2]
    return labels == lab if lab else np.zeros_like(mask)


def bounding_aspect(mask: np.ndarray, window: Window) -> float:
    """height / width of the bounding box of a pixel mask, in window units."""
    rows, cols = np.nonzero(mask)
    if rows.size == 0:
        raise ValueError("empty mask")
    h = (rows.max() - rows.min() + 1) * window.height / window.px_h
    w = (cols.max() - cols.min() + 1) * window.width / window.px_w
    return float(h / w)
