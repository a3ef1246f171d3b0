"""The paraboloid P = {(x, x.x)} in F_p^d, lifts, projections and slices."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .field import (BITMAP_MAX, PrimeContext, all_points, as_context,
                    canonical_set, encode, membership_table)


def _check_d(d):
    if d not in (3, 4):
        raise ValueError(f"unsupported ambient dimension d={d}; expected 3 or 4")


def lift(base, p: int) -> np.ndarray:
    """(x, x.x) for every row x of ``base``."""
    b = np.mod(np.atleast_2d(np.asarray(base, dtype=np.int64)), p)
    h = (b * b).sum(axis=1) % p
    return np.concatenate([b, h[:, None]], axis=1)


def on_paraboloid(points, p: int) -> np.ndarray:
    x = np.atleast_2d(np.asarray(points, dtype=np.int64))
    return (x[:, :-1] * x[:, :-1]).sum(axis=1) % p == x[:, -1] % p


def project(points, p: int) -> np.ndarray:
    x = np.atleast_2d(np.asarray(points, dtype=np.int64))
    if len(x) and not on_paraboloid(x, p).all():
        bad = x[~on_paraboloid(x, p)][0]
        raise ValueError(f"point {tuple(int(c) for c in bad)} is not on the paraboloid")
    return x[:, :-1].copy()


@dataclass(frozen=True, eq=False)
class ParaboloidSet:
    """A set A on P, stored through its base projection (sorted by code)."""

    ctx: PrimeContext
    d: int
    base: np.ndarray = field(repr=False)

    def __post_init__(self):
        _check_d(self.d)
        object.__setattr__(self, "ctx", as_context(self.ctx))
        b = np.asarray(self.base, dtype=np.int64).reshape(-1, self.d - 1)
        b = canonical_set(b, self.ctx.p)
        b.setflags(write=False)
        object.__setattr__(self, "base", b)

    @classmethod
    def from_points(cls, ctx, points) -> "ParaboloidSet":
        ctx = as_context(ctx)
        pts = np.atleast_2d(np.asarray(points, dtype=np.int64))
        return cls(ctx, pts.shape[1], project(np.mod(pts, ctx.p), ctx.p))

    @property
    def p(self) -> int:
        return self.ctx.p

    def __len__(self):
        return len(self.base)

    @cached_property
    def points(self) -> np.ndarray:
        return lift(self.base, self.p)

    @cached_property
    def base_codes(self) -> np.ndarray:
        return encode(self.base, self.p) if len(self.base) else np.empty(0, np.int64)

    @cached_property
    def base_table(self) -> np.ndarray | None:
        """Flat membership bitmap over F_p^(d-1) when small enough."""
        if self.p ** (self.d - 1) > BITMAP_MAX:
            return None
        return membership_table(self.base.reshape(-1, self.d - 1), self.p)

    def __contains__(self, x) -> bool:
        x = np.asarray(x, dtype=np.int64) % self.p
        if x.shape[-1] == self.d:
            if not on_paraboloid(x, self.p)[0]:
                return False
            x = x[:-1]
        return bool(self.base_table[encode(x, self.p)[0]])


def full_paraboloid(ctx, d: int) -> ParaboloidSet:
    ctx = as_context(ctx)
    _check_d(d)
    return ParaboloidSet(ctx, d, all_points(ctx.p, d - 1))


def slice_at(G, h: int, p: int) -> np.ndarray:
    """Lift onto P of {x : (x, h) in G}; rows sorted by base code."""
    g = np.mod(np.atleast_2d(np.asarray(G, dtype=np.int64)), p)
    base = g[g[:, -1] == h % p][:, :-1]
    if not len(base):
        return np.empty((0, g.shape[1]), np.int64)
    return lift(canonical_set(base, p), p)


@dataclass(frozen=True, eq=False)
class SlicedSupport:
    """Horizontal slices of a support set G in F_p^d, indexed by height h."""

    ctx: PrimeContext
    d: int
    slices: dict = field(repr=False)

    @classmethod
    def of(cls, ctx, G) -> "SlicedSupport":
        ctx = as_context(ctx)
        g = canonical_set(G, ctx.p)
        d = g.shape[1]
        _check_d(d)
        slices = {}
        for h in range(ctx.p):
            base = g[g[:, -1] == h][:, :-1]
            if len(base):
                slices[h] = base
        return cls(ctx, d, slices)

    def lifted(self, h: int) -> np.ndarray:
        base = self.slices.get(h % self.ctx.p)
        if base is None:
            return np.empty((0, self.d), np.int64)
        return lift(base, self.ctx.p)

    @property
    def size(self) -> int:
        return sum(len(b) for b in self.slices.values())
