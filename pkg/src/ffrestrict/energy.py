"""Additive energy and the rectangle structure of sets on the paraboloid."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import kernels
from .field import BITMAP_MAX, as_context, canonical_set, encode, membership_table
from .incidence import Line, rich_lines
from .paraboloid import ParaboloidSet, lift

RICH_FACTOR = 10


def _guard(n):
    if n**3 >= 2**63:
        raise OverflowError(f"|X| = {n} is too large for exact 64-bit energy")


def _coords(X, p):
    if isinstance(X, ParaboloidSet):
        return X.points
    return np.mod(np.atleast_2d(np.asarray(X, dtype=np.int64)), p)


def _sum_counts(X, Y, p):
    k = X.shape[1]
    if p**k <= min(BITMAP_MAX, 2**24):
        return kernels.pair_sum_counts(np.ascontiguousarray(X), np.ascontiguousarray(Y), p)
    w = p ** np.arange(k, dtype=np.int64)
    codes = (((X[:, None, :] + Y[None, :, :]) % p) @ w).ravel()
    return np.unique(codes, return_counts=True)[1]


def additive_energy(X, p: int) -> int:
    """#{(x, y, z, u) in X^4 : x + y = z + u} = sum_s r_{X+X}(s)^2."""
    X = canonical_set(_coords(X, p), p)
    _guard(len(X))
    if not len(X):
        return 0
    r = _sum_counts(X, X, p)
    return int(np.dot(r, r))


def mixed_energy(X, Y, p: int) -> int:
    """#{(x, y, z, u) in X x Y x X x Y : x + y = z + u}."""
    X = canonical_set(_coords(X, p), p)
    Y = canonical_set(_coords(Y, p), p)
    if X.shape[1] != Y.shape[1]:
        raise ValueError("sets live in different spaces")
    _guard(max(len(X), len(Y)))
    if not len(X) or not len(Y):
        return 0
    r = _sum_counts(X, Y, p)
    return int(np.dot(r, r))


def _scan(base, p, rich_keys=None, rich_iso=None):
    ctx = as_context(p)
    B = canonical_set(np.atleast_2d(np.asarray(base, dtype=np.int64)), p)
    _guard(len(B))
    table = membership_table(B, p)
    if rich_keys is None:
        rich_keys = np.empty(0, np.int64)
        rich_iso = np.empty(0, np.bool_)
    return kernels.rectangle_scan(np.ascontiguousarray(B), table, p, ctx.inverse,
                                  rich_keys, rich_iso), B


def rectangle_triples(base, p: int) -> int:
    """Ordered (x, y, z) in the base set with (x - z).(z - y) = 0 and x + y - z in the set.

    Equal to the additive energy of the lift of the base set.
    """
    out, _ = _scan(base, p)
    return int(out[0])


@dataclass
class RectangleClasses:
    total: int
    trivial: int
    ordinary: int
    semi_degenerate: int
    degenerate: int

    @property
    def nontrivial(self) -> int:
        return self.total - self.trivial


def classify_rectangles(base, p: int) -> RectangleClasses:
    """Split nontrivial rectangles by how many side directions are isotropic.

    Sides along x - z and y - z: neither isotropic is ordinary, exactly one is
    semi-degenerate, both (hence all four vertices on one isotropic line) is
    degenerate.
    """
    B = np.atleast_2d(np.asarray(base, dtype=np.int64))
    if B.shape[1] != 3:
        raise ValueError("classification is defined for base sets in F_p^3 (d = 4)")
    out, _ = _scan(B, p)
    return RectangleClasses(*(int(x) for x in out[:5]))


@dataclass
class Decomposition:
    E1: int
    E2: int
    E3: int
    threshold: int
    rich_lines: list = field(default_factory=list)


def rich_threshold(n: int) -> int:
    return math.ceil(RICH_FACTOR * math.sqrt(n))


def _rich(base, p, threshold):
    found = rich_lines(base, max(2, threshold), p) if len(base) >= max(2, threshold) else []
    keys = np.array([ln.key for ln, _ in found], dtype=np.int64)
    iso = np.array([ln.is_isotropic() for ln, _ in found], dtype=np.bool_)
    order = np.argsort(keys)
    return keys[order], iso[order], [found[i] for i in order]


def energy_decomposition(A: ParaboloidSet, threshold: int | None = None) -> Decomposition:
    """Rectangles split by whether their side lines are rich.

    E1: some side line is not rich.  E2: ordinary or semi-degenerate with a
    side on a rich non-isotropic line.  E3: degenerate, on a rich isotropic
    line.  Lines are rich when they carry ``threshold`` points, by default
    ceil(10 sqrt|A|).
    """
    if A.d != 4:
        raise ValueError("the rich-line decomposition is defined for d = 4")
    thr = rich_threshold(len(A)) if threshold is None else int(threshold)
    keys, iso, found = _rich(A.base, A.p, thr)
    out, _ = _scan(A.base, A.p, keys, iso)
    return Decomposition(int(out[5]), int(out[6]), int(out[7]), thr,
                         [(ln, s) for ln, s in found])


@dataclass
class EnergyReport:
    n: int
    total: int
    trivial: int
    by_class: dict
    decomposition: tuple | None = None
    threshold: int | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def energy_report(A: ParaboloidSet, threshold: int | None = None) -> EnergyReport:
    total = additive_energy(A.points, A.p)
    n = len(A)
    if A.d == 4:
        thr = rich_threshold(n) if threshold is None else int(threshold)
        keys, iso, _ = _rich(A.base, A.p, thr)
        out, _ = _scan(A.base, A.p, keys, iso)
        decomp = (int(out[5]), int(out[6]), int(out[7]))
    else:
        thr, decomp = None, None
        out, _ = _scan(A.base, A.p)
    if int(out[0]) != total:
        raise AssertionError(f"rectangle count {out[0]} disagrees with energy {total}")
    by_class = {"ordinary": int(out[2]), "semi_degenerate": int(out[3]),
                "degenerate": int(out[4])}
    return EnergyReport(n, total, int(out[1]), by_class, decomp, thr)


def line_lift(line: Line, base=None) -> np.ndarray:
    """Lift onto P of the line's points (optionally intersected with ``base``)."""
    pts = line.points()
    if base is not None:
        b = canonical_set(base, line.p)
        keep = np.isin(encode(pts, line.p), encode(b, line.p))
        pts = pts[keep]
    return lift(pts, line.p)
