"""Fourier transform on V = F_p^d, the extension operator and L^q norms.

Normalisations: the forward transform sums over V with e(-x.xi); the
extension averages over P (mass p^-(d-1) per point) with e(x.xi); norms on V
use counting measure and norms on P use the normalised measure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import kernels
from .field import PrimeContext, all_points, as_context, decode, encode
from .paraboloid import lift

DEFAULT_SIZE_CAP = 2**24
# work units (support size x p^d) below which "auto" takes the direct sum
DIRECT_WORK_MAX = 10**6


class SizeCapError(ValueError):
    pass


def _check_cap(p, d, size_cap):
    cap = DEFAULT_SIZE_CAP if size_cap is None else size_cap
    if p**d > cap:
        raise SizeCapError(f"p^d = {p**d} exceeds the workspace cap {cap}")


@dataclass(frozen=True, eq=False)
class SpatialFunction:
    """g : F_p^d -> C as a dense vector indexed by point code."""

    ctx: PrimeContext
    d: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "ctx", as_context(self.ctx))
        v = np.asarray(self.values, dtype=np.complex128).reshape(-1)
        if v.size != self.ctx.p**self.d:
            raise ValueError(f"expected {self.ctx.p**self.d} values, got {v.size}")
        if not np.isfinite(v).all():
            raise ValueError("function values must be finite")
        object.__setattr__(self, "values", v)

    @classmethod
    def zeros(cls, ctx, d):
        ctx = as_context(ctx)
        return cls(ctx, d, np.zeros(ctx.p**d, np.complex128))

    @classmethod
    def from_points(cls, ctx, d, points, values=None):
        ctx = as_context(ctx)
        v = np.zeros(ctx.p**d, np.complex128)
        pts = np.atleast_2d(np.asarray(points, dtype=np.int64))
        if len(pts) and pts.size:
            codes = encode(np.mod(pts, ctx.p), ctx.p)
            v[codes] = 1.0 if values is None else values
        return cls(ctx, d, v)

    @property
    def p(self):
        return self.ctx.p

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.values)

    def support_points(self) -> np.ndarray:
        return decode(self.support(), self.p, self.d)

    def sup_norm(self) -> float:
        return float(np.abs(self.values).max()) if self.values.size else 0.0

    def as_grid(self) -> np.ndarray:
        """View as an array indexed [x_1, ..., x_d]."""
        return self.values.reshape((self.p,) * self.d, order="F")


@dataclass(frozen=True, eq=False)
class ParaboloidFunction:
    """f on P, indexed by the code of the base point in F_p^(d-1)."""

    ctx: PrimeContext
    d: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "ctx", as_context(self.ctx))
        v = np.asarray(self.values, dtype=np.complex128).reshape(-1)
        if v.size != self.ctx.p ** (self.d - 1):
            raise ValueError(f"expected {self.ctx.p ** (self.d - 1)} values, got {v.size}")
        if not np.isfinite(v).all():
            raise ValueError("function values must be finite")
        object.__setattr__(self, "values", v)

    @classmethod
    def indicator(cls, ctx, d, base_points):
        ctx = as_context(ctx)
        v = np.zeros(ctx.p ** (d - 1), np.complex128)
        b = np.atleast_2d(np.asarray(base_points, dtype=np.int64))
        if b.size:
            v[encode(np.mod(b, ctx.p), ctx.p)] = 1.0
        return cls(ctx, d, v)

    @classmethod
    def constant(cls, ctx, d, c=1.0):
        ctx = as_context(ctx)
        return cls(ctx, d, np.full(ctx.p ** (d - 1), c, np.complex128))

    @property
    def p(self):
        return self.ctx.p

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.values)


@lru_cache(maxsize=None)
def paraboloid_codes(p: int, d: int) -> np.ndarray:
    """Code in F_p^d of lift(b) for every base point b, in base-code order."""
    codes = encode(lift(all_points(p, d - 1), p), p)
    codes.setflags(write=False)
    return codes


# -- prime-length DFT (Bluestein chirp) --------------------------------------

@lru_cache(maxsize=64)
def _chirp(n: int, sign: int):
    m = 1 << (2 * n - 1).bit_length()
    k = np.arange(n)
    # k^2 mod 2n keeps the angle small and exact
    c = np.exp(sign * 1j * np.pi * ((k * k) % (2 * n)) / n)
    b = np.zeros(m, np.complex128)
    b[:n] = np.conj(c)
    b[m - n + 1:] = np.conj(c[1:])[::-1]
    return c, np.fft.fft(b), m


def dft_axis(a: np.ndarray, axis: int, sign: int = -1) -> np.ndarray:
    """X_k = sum_n a_n exp(sign 2 pi i n k / N) along ``axis``.

    Any length N is rewritten as a cyclic convolution of power-of-two length.
    """
    a = np.moveaxis(np.asarray(a, dtype=np.complex128), axis, -1)
    n = a.shape[-1]
    c, bhat, m = _chirp(n, sign)
    buf = np.zeros(a.shape[:-1] + (m,), np.complex128)
    buf[..., :n] = a * c
    conv = np.fft.ifft(np.fft.fft(buf, axis=-1) * bhat, axis=-1)
    return np.moveaxis(conv[..., :n] * c, -1, axis)


def dftn(grid: np.ndarray, sign: int = -1) -> np.ndarray:
    out = grid
    for ax in range(grid.ndim):
        out = dft_axis(out, ax, sign)
    return out


def _pick(method, work):
    if method == "auto":
        return "direct" if work <= DIRECT_WORK_MAX else "fast"
    if method not in ("direct", "fast"):
        raise ValueError(f"unknown method {method!r}")
    return method


def fourier_transform(g: SpatialFunction, method: str = "auto", size_cap=None) -> SpatialFunction:
    """ghat(xi) = sum_x g(x) e(-x.xi) on every xi of the dual copy of V."""
    p, d = g.p, g.d
    _check_cap(p, d, size_cap)
    supp = g.support()
    how = _pick(method, len(supp) * p**d)
    if how == "direct":
        pts = decode(supp, p, d)
        vals = kernels.charsum(pts, g.values[supp].copy(), p, d, -1, g.ctx.character)
    else:
        vals = dftn(g.as_grid(), -1).reshape(-1, order="F")
    return SpatialFunction(g.ctx, d, vals)


def inverse_sum(g: SpatialFunction, method: str = "auto", size_cap=None) -> SpatialFunction:
    """sum_xi g(xi) e(x.xi), without normalisation."""
    p, d = g.p, g.d
    _check_cap(p, d, size_cap)
    supp = g.support()
    how = _pick(method, len(supp) * p**d)
    if how == "direct":
        pts = decode(supp, p, d)
        vals = kernels.charsum(pts, g.values[supp].copy(), p, d, 1, g.ctx.character)
    else:
        vals = dftn(g.as_grid(), 1).reshape(-1, order="F")
    return SpatialFunction(g.ctx, d, vals)


def measure_on_V(f: ParaboloidFunction) -> SpatialFunction:
    """The function on V equal to f on P and 0 elsewhere."""
    v = np.zeros(f.p**f.d, np.complex128)
    v[paraboloid_codes(f.p, f.d)] = f.values
    return SpatialFunction(f.ctx, f.d, v)


def extension(f: ParaboloidFunction, method: str = "auto", size_cap=None) -> SpatialFunction:
    """(f dsigma)^v(x) = p^-(d-1) sum_{xi in P} f(xi) e(x.xi)."""
    out = inverse_sum(measure_on_V(f), method=method, size_cap=size_cap)
    return SpatialFunction(f.ctx, f.d, out.values / f.p ** (f.d - 1))


def restrict(ghat: SpatialFunction) -> ParaboloidFunction:
    return ParaboloidFunction(ghat.ctx, ghat.d, ghat.values[paraboloid_codes(ghat.p, ghat.d)])


def _values(h):
    return h.values if hasattr(h, "values") else np.asarray(h, dtype=np.complex128)


def _power_sum(vals, q):
    a = np.abs(vals)
    return math.fsum((a * a).tolist()) if q == 2 else math.fsum((a**q).tolist())


def lq_norm_V(g, q: float) -> float:
    if q < 1:
        raise ValueError("q must be >= 1")
    return _power_sum(_values(g), q) ** (1.0 / q)


def lq_norm_P(f, q: float, d: int | None = None, p: int | None = None) -> float:
    if q < 1:
        raise ValueError("q must be >= 1")
    vals = _values(f)
    if isinstance(f, ParaboloidFunction):
        mass = f.p ** (f.d - 1)
    else:
        if d is None or p is None:
            raise ValueError("raw arrays need p and d")
        mass = p ** (d - 1)
    return (_power_sum(vals, q) / mass) ** (1.0 / q)


def restricted_l2(g: SpatialFunction, method: str = "auto", size_cap=None) -> float:
    """||ghat||_{L^2(P, dsigma)}."""
    return lq_norm_P(restrict(fourier_transform(g, method, size_cap)), 2)
