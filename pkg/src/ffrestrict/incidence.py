"""Exact incidence counts between points, lines and planes over F_p."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .field import (BITMAP_MAX, all_points, as_context, canonical_set, membership_table,
                    projective_directions)
from .kernels._common import decode_line_key, line_keys

_CHUNK = 1 << 22


def _pts(points, p):
    return np.mod(np.atleast_2d(np.asarray(points, dtype=np.int64)), p)


def _check_overflow(*sizes):
    if math.prod(max(1, s) for s in sizes) >= 2**62:
        raise OverflowError("count may overflow 64 bits")


@dataclass(frozen=True)
class Line:
    """Affine line in F_p^2 or F_p^3 in canonical form.

    ``direction`` has leading coordinate 1; ``base`` is the line's point of
    minimal code.
    """

    p: int
    direction: tuple
    base: tuple

    @classmethod
    def through(cls, point, direction, p) -> "Line":
        ctx = as_context(p)
        key = int(line_keys(_pts(point, p), _pts(direction, p), ctx.p, ctx.inverse)[0])
        return cls.from_key(key, ctx.p, len(direction))

    @classmethod
    def from_points(cls, a, b, p) -> "Line":
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if not np.any((b - a) % p):
            raise ValueError("a line needs two distinct points")
        return cls.through(a, (b - a) % p, p)

    @classmethod
    def from_key(cls, key, p, k) -> "Line":
        d, b = decode_line_key(key, p, k)
        return cls(p, d, b)

    @property
    def dim(self) -> int:
        return len(self.direction)

    @property
    def key(self) -> int:
        p, k = self.p, self.dim
        w = p ** np.arange(k)
        return int(np.dot(self.direction, w)) * p**k + int(np.dot(self.base, w))

    def points(self) -> np.ndarray:
        t = np.arange(self.p)[:, None]
        return (np.array(self.base) + t * np.array(self.direction)) % self.p

    def contains(self, points) -> np.ndarray:
        q = (_pts(points, self.p) - np.array(self.base)) % self.p
        d = np.array(self.direction)
        j0 = int(np.argmax(d != 0))
        t = q[:, j0]
        return np.all((q - t[:, None] * d) % self.p == 0, axis=1)

    def is_isotropic(self) -> bool:
        return sum(c * c for c in self.direction) % self.p == 0

    def perpendicular(self, through=None) -> "Line":
        if self.dim != 2:
            raise ValueError("perpendicular lines are defined here only in F_p^2")
        a, b = self.direction
        z = self.base if through is None else through
        return Line.through(z, ((-b) % self.p, a), self.p)


def all_lines(p: int, k: int = 2) -> list[Line]:
    """Every affine line of F_p^k."""
    ctx = as_context(p)
    pts = all_points(p, k)
    out = set()
    for d in projective_directions(p, k):
        keys = line_keys(pts, np.broadcast_to(d, pts.shape), p, ctx.inverse)
        out.update(int(x) for x in np.unique(keys))
    return [Line.from_key(x, p, k) for x in sorted(out)]


# -- planes ------------------------------------------------------------------

def canonical_plane(normal, offset, p):
    normal = [int(c) % p for c in normal]
    lead = next((c for c in normal if c), 0)
    if not lead:
        raise ValueError("plane normal must be nonzero")
    s = pow(lead, p - 2, p)
    return tuple((s * c) % p for c in normal), (s * int(offset)) % p


def plane_through(point, normal, p):
    n, _ = canonical_plane(normal, 1, p)
    return n, int(np.dot(n, np.asarray(point, dtype=np.int64))) % p


class PlaneMultiset:
    """Planes n.x = c of F_p^3, canonical normal, with multiplicities."""

    def __init__(self, p: int, planes=None):
        self.p = int(p)
        self.counts: Counter = Counter()
        for item in planes or ():
            self.add(*item)

    def add(self, normal, offset, mult: int = 1):
        if mult < 1:
            raise ValueError("multiplicity must be positive")
        self.counts[canonical_plane(normal, offset, self.p)] += int(mult)

    def __len__(self):
        return sum(self.counts.values())

    @property
    def distinct(self) -> int:
        return len(self.counts)

    def __iter__(self):
        return iter(sorted(self.counts.items()))

    def arrays(self):
        items = sorted(self.counts.items())
        if not items:
            return (np.empty((0, 3), np.int64), np.empty(0, np.int64), np.empty(0, np.int64))
        normals = np.array([n for (n, _), _ in items], dtype=np.int64)
        offsets = np.array([c for (_, c), _ in items], dtype=np.int64)
        mults = np.array([m for _, m in items], dtype=np.int64)
        return normals, offsets, mults

    @classmethod
    def all_planes(cls, p) -> "PlaneMultiset":
        ms = cls(p)
        for n in projective_directions(p, 3):
            for c in range(p):
                ms.counts[(tuple(int(x) for x in n), c)] += 1
        return ms

    @classmethod
    def from_base_pairs(cls, base, p) -> "PlaneMultiset":
        """Planes through z with normal y - z over ordered pairs y != z of ``base``."""
        b = _pts(base, p)
        ms = cls(p)
        for iz in range(len(b)):
            for iy in range(len(b)):
                if iy != iz:
                    ms.add(*plane_through(b[iz], b[iy] - b[iz], p))
        return ms


def plane_contains_line(plane, line: Line) -> bool:
    (normal, offset), p = plane, line.p
    return (int(np.dot(normal, line.direction)) % p == 0
            and int(np.dot(normal, line.base)) % p == offset)


@dataclass(frozen=True)
class IncidenceCount:
    incidences: int
    expected: Fraction
    deviation: Fraction

    @property
    def numerator(self) -> int:
        return self.deviation.numerator

    @property
    def denominator(self) -> int:
        return self.deviation.denominator


def _plane_regime(Q, normals, offsets, mults, p):
    table = membership_table(Q, p)
    w = p ** np.arange(3)
    grid = all_points(p, 2)
    total = 0
    for n, c, m in zip(normals, offsets, mults):
        j = int(np.argmax(n != 0))
        free = [i for i in range(3) if i != j]
        pts = np.empty((len(grid), 3), np.int64)
        pts[:, free] = grid
        pts[:, j] = (c - grid @ n[free]) % p
        total += int(table[pts @ w].sum()) * int(m)
    return total


def point_plane_incidences(Q, planes: PlaneMultiset) -> IncidenceCount:
    p = planes.p
    Q = canonical_set(_pts(Q, p), p) if np.size(Q) else np.empty((0, 3), np.int64)
    normals, offsets, mults = planes.arrays()
    _check_overflow(len(Q), len(planes))
    # crossover: scan plane points against a bitmap once |Q| outgrows p^2
    if len(Q) > p * p and p**3 <= BITMAP_MAX:
        inc = _plane_regime(Q, normals, offsets, mults, p)
    else:
        inc = int(kernels.plane_incidences(np.ascontiguousarray(Q), normals, offsets, mults, p))
    expected = Fraction(len(Q) * len(planes), p)
    return IncidenceCount(inc, expected, Fraction(inc) - expected)


def point_plane_incidences_excluding(Q, planes: PlaneMultiset, lines) -> int:
    """Incidences (q, pi) except those with q on some l in ``lines`` and l inside pi."""
    p = planes.p
    Q = canonical_set(_pts(Q, p), p) if np.size(Q) else np.empty((0, 3), np.int64)
    lines = list(lines)
    if not lines:
        return point_plane_incidences(Q, planes).incidences
    normals, offsets, mults = planes.arrays()
    _check_overflow(len(Q), len(planes))
    on_line = np.array([ln.contains(Q) for ln in lines])  # (L, |Q|)
    dirs = np.array([ln.direction for ln in lines], dtype=np.int64)
    bases = np.array([ln.base for ln in lines], dtype=np.int64)
    total = 0
    step = max(1, _CHUNK // max(1, len(Q)))
    for s in range(0, len(normals), step):
        n, c, m = normals[s:s + step], offsets[s:s + step], mults[s:s + step]
        inc = (Q @ n.T - c) % p == 0  # (|Q|, chunk)
        inside = ((dirs @ n.T) % p == 0) & ((bases @ n.T - c) % p == 0)  # (L, chunk)
        excluded = (on_line.T.astype(np.int64) @ inside.astype(np.int64)) > 0
        total += int(((inc & ~excluded).sum(axis=0)) @ m)
    return total


def point_line_incidences(points, lines) -> int:
    lines = list(lines)
    if not lines:
        return 0
    p = lines[0].p
    if any(ln.dim != 2 for ln in lines):
        raise ValueError("point-line incidences are counted in F_p^2")
    P = canonical_set(_pts(points, p), p)
    if P.shape[1] != 2:
        raise ValueError("points must lie in F_p^2")
    _check_overflow(len(P), len(lines))
    D = np.array([ln.direction for ln in lines], dtype=np.int64)
    B = np.array([ln.base for ln in lines], dtype=np.int64)
    total = 0
    step = max(1, _CHUNK // max(1, len(lines)))
    for s in range(0, len(P), step):
        q = P[s:s + step]
        cross = ((q[:, None, 0] - B[None, :, 0]) * D[None, :, 1]
                 - (q[:, None, 1] - B[None, :, 1]) * D[None, :, 0]) % p
        total += int((cross == 0).sum())
    return total


def _line_supports(points, p):
    """(keys, support sizes) of every line through two or more of the points."""
    ctx = as_context(p)
    P = canonical_set(_pts(points, p), p)
    keys = kernels.pair_line_keys(np.ascontiguousarray(P), p, ctx.inverse)
    if not len(keys):
        return np.empty(0, np.int64), np.empty(0, np.int64), P
    uniq, pairs = np.unique(keys, return_counts=True)
    # a line with s points carries s(s-1)/2 unordered pairs
    support = (1 + np.sqrt(1 + 8 * pairs.astype(np.float64))).astype(np.int64) // 2
    return uniq, support, P


def rich_lines(points, k: int, p: int) -> list[tuple[Line, int]]:
    """All lines holding at least k of the points, with their support counts."""
    if k < 2:
        raise ValueError("richness threshold must be >= 2")
    keys, support, P = _line_supports(points, p)
    dim = P.shape[1]
    sel = support >= k
    return [(Line.from_key(int(key), p, dim), int(s)) for key, s in zip(keys[sel], support[sel])]


def rich_line_counts(points, p: int) -> dict:
    """m_k for every k >= 2 (number of lines with at least k points)."""
    _, support, _ = _line_supports(points, p)
    if not len(support):
        return {}
    return {k: int((support >= k).sum()) for k in range(2, int(support.max()) + 1)}


def max_collinear(points, p: int) -> int:
    P = _pts(points, p)
    if not P.size:
        raise ValueError("max_collinear of an empty set")
    _, support, P = _line_supports(P, p)
    if len(P) == 1:
        return 1
    return int(support.max())


def right_triangle_count(points, p: int) -> int:
    """Nontrivial solutions of (x - z).(z - y) = 0 with x, y, z in the set."""
    P = canonical_set(_pts(points, p), p)
    if P.shape[1] != 2:
        raise ValueError("right triangles are counted in F_p^2")
    _check_overflow(len(P), len(P), len(P))
    return int(kernels.right_triangle_count(np.ascontiguousarray(P), p))


def _iroot_floor(m: int, k: int) -> int:
    r = int(round(m ** (1.0 / k)))
    while r**k > m:
        r -= 1
    while (r + 1) ** k <= m:
        r += 1
    return r


def right_triangle_decomposition(points, p: int) -> dict:
    """N = sum_z sum_{l through z} n(l) n(l_perp), split into poor/just-rich/very-rich.

    n(l) counts the points on l minus one.  Needs p = 3 mod 4 so that no line
    is its own perpendicular.
    """
    ctx = as_context(p)
    if p % 4 != 3:
        raise ValueError("decomposition needs p = 3 (mod 4): no isotropic directions")
    P = canonical_set(_pts(points, p), p)
    if P.shape[1] != 2:
        raise ValueError("right triangles are counted in F_p^2")
    n = len(P)
    # n(l) is an integer, so compare against exact integer cut-offs
    poor_max = _iroot_floor(n**3, 7)
    rich_min = _iroot_floor(n**6, 11)
    if rich_min**11 < n**6:
        rich_min += 1
    poor, just, very = (int(x) for x in kernels.perp_decomposition(
        np.ascontiguousarray(P), p, ctx.inverse, float(poor_max), float(rich_min)))
    kstar = float(poor_max) if poor_max**7 == n**3 else n ** (3 / 7)
    vrich = float(rich_min) if rich_min**11 == n**6 else n ** (6 / 11)
    return {"n": n, "k_star": kstar, "very_rich_threshold": vrich,
            "N_poor": poor, "N_just_rich": just, "N_very_rich": very,
            "N": poor + just + very}


def collinear_triples(points, k_lo: int, k_hi: int, p: int) -> tuple[int, int]:
    """(ordered, unordered) collinear triples on lines with support in [k_lo, k_hi]."""
    if not 2 <= k_lo <= k_hi:
        raise ValueError("need 2 <= k_lo <= k_hi")
    _, support, _ = _line_supports(points, p)
    s = support[(support >= k_lo) & (support <= k_hi)]
    ordered = int((s * (s - 1) * (s - 2)).sum())
    return ordered, ordered // 6


def isotropic_graph_stats(points, p: int) -> tuple[int, int, int]:
    """(edges, triangles, non-collinear triangles) of the graph joining points
    whose difference is isotropic."""
    P = canonical_set(_pts(points, p), p)
    if P.shape[1] != 3:
        raise ValueError("the isotropic graph lives in F_p^3")
    n = len(P)
    D = (P[:, None, :] - P[None, :, :]) % p
    adj = ((D * D).sum(axis=2) % p == 0)
    np.fill_diagonal(adj, False)
    edges = int(adj.sum()) // 2
    triangles = 0
    bad = 0
    idx = np.arange(n)
    for i in range(n):
        for j in np.flatnonzero(adj[i] & (idx > i)):
            common = np.flatnonzero(adj[i] & adj[j] & (idx > j))
            triangles += len(common)
            if len(common):
                u = (P[j] - P[i]) % p
                v = (P[common] - P[i]) % p
                cross = np.stack([u[1] * v[:, 2] - u[2] * v[:, 1],
                                  u[2] * v[:, 0] - u[0] * v[:, 2],
                                  u[0] * v[:, 1] - u[1] * v[:, 0]], axis=1) % p
                bad += int(np.any(cross != 0, axis=1).sum())
    return edges, triangles, bad
