"""Prime-field arithmetic, point encoding and isotropy over F_p."""
from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

# flat membership tables are only built below this many cells
BITMAP_MAX = 2**27


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True, eq=False)
class PrimeContext:
    """The modulus p with its additive character and quadratic-residue tables."""

    p: int
    character: np.ndarray = field(init=False, repr=False)
    qr: np.ndarray = field(init=False, repr=False)
    inverse: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        p = int(self.p)
        if p == 2:
            raise ValueError("characteristic 2 is not supported")
        if not is_prime(p):
            raise ValueError(f"{p} is not an odd prime")
        object.__setattr__(self, "p", p)
        t = np.arange(p)
        # exact angles for t < p; cmath avoids accumulating phase error
        chars = np.array([cmath.exp(2j * cmath.pi * k / p) for k in range(p)])
        chars.setflags(write=False)
        qr = np.zeros(p, dtype=bool)
        qr[(t * t) % p] = True
        qr[0] = False
        qr.setflags(write=False)
        inv = np.zeros(p, dtype=np.int64)
        for a in range(1, p):
            inv[a] = pow(a, p - 2, p)
        inv.setflags(write=False)
        object.__setattr__(self, "character", chars)
        object.__setattr__(self, "qr", qr)
        object.__setattr__(self, "inverse", inv)

    def __eq__(self, other):
        return isinstance(other, PrimeContext) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeContext", self.p))

    def e(self, t) -> complex | np.ndarray:
        """Additive character e(t) = exp(2 pi i t / p)."""
        return self.character[np.mod(t, self.p)]

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("0 has no inverse mod p")
        return int(self.inverse[a])

    @cached_property
    def minus_one_is_square(self) -> bool:
        return self.p % 4 == 1


def as_context(p) -> PrimeContext:
    return p if isinstance(p, PrimeContext) else PrimeContext(int(p))


# -- encoding --------------------------------------------------------------

def radix(p: int, k: int) -> np.ndarray:
    return p ** np.arange(k, dtype=np.int64)


def encode(coords, p: int) -> np.ndarray:
    """Mixed-radix code of each row; first coordinate least significant."""
    c = np.atleast_2d(np.asarray(coords, dtype=np.int64))
    return c @ radix(p, c.shape[1])


def decode(codes, p: int, k: int) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64).reshape(-1)
    out = np.empty((codes.size, k), dtype=np.int64)
    rest = codes.copy()
    for i in range(k):
        out[:, i] = rest % p
        rest //= p
    return out


def all_points(p: int, k: int) -> np.ndarray:
    """Every point of F_p^k, ordered by code."""
    return decode(np.arange(p**k), p, k)


def canonical_set(coords, p: int) -> np.ndarray:
    """Reduce mod p, dedupe and sort rows by code."""
    c = np.mod(np.atleast_2d(np.asarray(coords, dtype=np.int64)), p)
    if c.size == 0:
        return c.reshape(0, c.shape[1] if c.ndim == 2 else 0)
    codes = np.unique(encode(c, p))
    return decode(codes, p, c.shape[1])


def membership_table(coords, p: int) -> np.ndarray:
    c = np.atleast_2d(coords)
    k = c.shape[1]
    if p**k > BITMAP_MAX:
        raise MemoryError(f"membership table for p^{k} exceeds {BITMAP_MAX} cells")
    table = np.zeros(p**k, dtype=np.bool_)
    if len(c):
        table[encode(c, p)] = True
    return table


@dataclass(frozen=True)
class FPoint:
    coords: tuple
    p: int

    def __post_init__(self):
        cs = tuple(int(c) for c in self.coords)
        if any(c < 0 or c >= self.p for c in cs):
            raise ValueError(f"coordinates {cs} not reduced mod {self.p}")
        object.__setattr__(self, "coords", cs)

    @classmethod
    def of(cls, coords, p: int) -> "FPoint":
        return cls(tuple(int(c) % p for c in coords), p)

    @classmethod
    def from_code(cls, code: int, p: int, k: int) -> "FPoint":
        return cls(tuple(decode([code], p, k)[0]), p)

    @property
    def k(self) -> int:
        return len(self.coords)

    @property
    def code(self) -> int:
        return int(sum(c * p_i for c, p_i in zip(self.coords, radix(self.p, self.k))))

    def __add__(self, other: "FPoint") -> "FPoint":
        _check_compatible(self, other)
        return FPoint.of([a + b for a, b in zip(self.coords, other.coords)], self.p)

    def __sub__(self, other: "FPoint") -> "FPoint":
        _check_compatible(self, other)
        return FPoint.of([a - b for a, b in zip(self.coords, other.coords)], self.p)

    def scale(self, t: int) -> "FPoint":
        return FPoint.of([t * a for a in self.coords], self.p)

    def is_zero(self) -> bool:
        return not any(self.coords)


def _check_compatible(u: FPoint, v: FPoint):
    if u.p != v.p:
        raise ValueError("points over different fields")
    if u.k != v.k:
        raise ValueError(f"dimension mismatch: {u.k} vs {v.k}")


# -- scalar geometry -------------------------------------------------------

def legendre_symbol(a: int, ctx: PrimeContext) -> int:
    a %= ctx.p
    if a == 0:
        return 0
    return 1 if ctx.qr[a] else -1


def dot(u: FPoint, v: FPoint) -> int:
    _check_compatible(u, v)
    return sum(a * b for a, b in zip(u.coords, v.coords)) % u.p


def is_isotropic(v: FPoint) -> bool:
    if v.is_zero():
        raise ValueError("isotropy is undefined for the zero vector")
    return dot(v, v) == 0


def normalize_direction(v, p: int) -> tuple:
    """Scale so the first nonzero coordinate is 1."""
    v = [int(c) % p for c in v]
    for c in v:
        if c:
            s = pow(c, p - 2, p)
            return tuple((s * x) % p for x in v)
    raise ValueError("zero vector has no direction")


def projective_directions(p: int, k: int) -> np.ndarray:
    """Canonical representatives of all (p^k - 1)/(p - 1) directions in F_p^k."""
    pts = all_points(p, k)[1:]
    lead = pts[np.arange(len(pts)), np.argmax(pts != 0, axis=1)]
    return pts[lead == 1]


def isotropic_directions(ctx: PrimeContext, k: int) -> list[tuple]:
    if k not in (2, 3):
        raise ValueError(f"unsupported dimension {k}")
    dirs = projective_directions(ctx.p, k)
    iso = (dirs * dirs).sum(axis=1) % ctx.p == 0
    return [tuple(int(c) for c in d) for d in dirs[iso]]


def null_sphere(ctx: PrimeContext) -> np.ndarray:
    """S_0 = {x in F_p^3 : x.x = 0}, origin included, rows sorted by code."""
    pts = all_points(ctx.p, 3)
    return pts[(pts * pts).sum(axis=1) % ctx.p == 0]
