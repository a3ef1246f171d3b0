"""Numerical checks of the energy, incidence and restriction inequalities.

Every inequality is evaluated as exact left side against its bound terms;
the ratio lhs / sum(terms) is the fitted constant.  Instances are built from
(generator, p, d, seed, index, size) so any record can be replayed.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .energy import additive_energy
from .field import (all_points, as_context, decode, encode, isotropic_directions, null_sphere,
                    projective_directions)
from .incidence import (Line, PlaneMultiset, max_collinear, plane_through,
                        point_plane_incidences)
from .paraboloid import ParaboloidSet, SlicedSupport, lift
from .spectral import (ParaboloidFunction, SpatialFunction, extension, lq_norm_P,
                       lq_norm_V, paraboloid_codes, restrict, fourier_transform)

SIG = 12


def round_sig(x, sig=SIG):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, Fraction):
        x = float(x)
    x = float(x)
    if x == 0 or not math.isfinite(x):
        return x
    return float(f"{x:.{sig}g}")


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (float, int, np.floating, np.integer, Fraction, bool, np.bool_)):
        return round_sig(obj)
    return obj


def rng_for(seed: int, index: int) -> np.random.Generator:
    """Counter-based stream keyed by (seed, instance index)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


@dataclass
class BoundCheckRecord:
    name: str
    lhs: float
    rhs_terms: dict
    fitted_c: float
    instance: dict
    extra: dict = field(default_factory=dict)

    @classmethod
    def make(cls, name, lhs, terms, instance, extra=None):
        total = math.fsum(terms.values())
        if any(t < 0 for t in terms.values()):
            raise ValueError("bound terms must be non-negative")
        c = float(lhs) / total if total > 0 else math.inf
        return cls(name, lhs, dict(terms), c, dict(instance), dict(extra or {}))

    def to_dict(self) -> dict:
        return _clean(asdict(self))


# -- dyadic levels -------------------------------------------------------------

@dataclass
class DyadicDecomposition:
    levels: list  # (i, codes with 2^-(i+1) < |g| <= 2^-i)

    @property
    def L(self) -> int:
        return max((i for i, _ in self.levels), default=0)

    def sizes(self) -> dict:
        return {i: len(c) for i, c in self.levels}


def dyadic_level(values) -> np.ndarray:
    """floor(-log2 |v|), computed exactly from the binary exponent."""
    m, e = np.frexp(np.abs(values))
    return np.where(m == 0.5, 1 - e, -e).astype(np.int64)


def dyadic_decompose(g: SpatialFunction) -> DyadicDecomposition:
    if g.sup_norm() > 1:
        raise ValueError("dyadic decomposition expects ||g||_inf <= 1; rescale first")
    supp = g.support()
    lev = dyadic_level(g.values[supp])
    levels = [(int(i), supp[lev == i]) for i in np.unique(lev)]
    return DyadicDecomposition(levels)


# -- instance generators ---------------------------------------------------------

def random_base(rng, p, k, size):
    size = min(size, p**k)
    codes = np.sort(rng.choice(p**k, size=size, replace=False))
    return decode(codes, p, k)


def isotropic_line_base(p: int, d: int) -> np.ndarray:
    """Points t v of an isotropic line through the origin in F_p^(d-1)."""
    ctx = as_context(p)
    dirs = isotropic_directions(ctx, d - 1)
    if not dirs:
        raise ValueError(f"no isotropic direction in F_{p}^{d - 1}")
    v = np.array(dirs[0])
    return (np.arange(p)[:, None] * v) % p


def box_base(p, k, n):
    return decode(encode(np.stack(np.meshgrid(*[np.arange(1, n + 1)] * k, indexing="ij"), -1)
                         .reshape(-1, k) % p, p), p, k)


def subspace_base(p, k, dim, rng):
    """A random linear subspace of F_p^k of the given dimension."""
    while True:
        basis = rng.integers(0, p, size=(dim, k))
        coeffs = all_points(p, dim)
        pts = (coeffs @ basis) % p
        if len(np.unique(encode(pts, p))) == p**dim:
            return pts


def geometric_sizes(total):
    s, out = 1, []
    while s <= total:
        out.append(s)
        s *= 2
    return out


NAMED_P = ("point-mass", "full", "isotropic-line", "null-sphere", "box", "line", "plane")


def generate_base(generator, p, d, seed, index, size=None):
    """Base set in F_p^(d-1) of a paraboloid-set instance."""
    k = d - 1
    rng = rng_for(seed, index)
    if generator == "random-set":
        return random_base(rng, p, k, int(size))
    if generator == "point-mass":
        return random_base(rng, p, k, 1)
    if generator == "full":
        return all_points(p, k)
    if generator == "isotropic-line":
        return isotropic_line_base(p, d)
    if generator == "null-sphere":
        if k != 3:
            raise ValueError("null sphere lives in F_p^3")
        return null_sphere(as_context(p))
    if generator == "box":
        return box_base(p, k, max(2, round(p ** (1 / 3))) if size is None else int(size))
    if generator == "line":
        return subspace_base(p, k, 1, rng)
    if generator == "plane":
        return subspace_base(p, k, 2, rng)
    raise ValueError(f"unknown generator {generator!r}")


def paraboloid_instances(p, d, n, seed):
    """(generator, size) list: named families first, then random sets at
    geometric cardinality steps."""
    named = [g for g in NAMED_P
             if not (g == "isotropic-line" and d == 3 and p % 4 == 3)
             and not (g == "null-sphere" and d != 4)
             and not (g == "plane" and d == 3)]
    sizes = geometric_sizes(p ** (d - 1))
    out = [(g, None) for g in named]
    i = 0
    while len(out) < n:
        out.append(("random-set", sizes[i % len(sizes)]))
        i += 1
    return out[:n] if n >= len(named) else out


# -- energy lemmas -----------------------------------------------------------------

def _paraboloid_instance(A, instance):
    meta = {"p": A.p, "d": A.d, "size": len(A)}
    meta.update(instance or {})
    return meta


def check_energy_bound_d4(A: ParaboloidSet, instance=None) -> BoundCheckRecord:
    if A.d != 4:
        raise ValueError("d = 4 bound")
    n, p = len(A), A.p
    E = additive_energy(A.points, p)
    terms = {"A^3/p": n**3 / p, "A^(5/2)": n**2.5, "p^2 A": p**2 * n}
    return BoundCheckRecord.make("par-energy-d4", E, terms, _paraboloid_instance(A, instance))


def check_energy_bound_d3(A: ParaboloidSet, instance=None) -> BoundCheckRecord:
    if A.d != 3:
        raise ValueError("d = 3 bound")
    n, p = len(A), A.p
    E = additive_energy(A.points, p)
    small = {"A^(17/7)": n ** (17 / 7)}
    large = {"A^3/p": n**3 / p, "A^2 sqrt(p)": n**2 * math.sqrt(p)}
    threshold = p ** (26 / 21)
    first = n <= threshold
    active, other = (small, large) if first else (large, small)
    total_other = math.fsum(other.values())
    extra = {"regime": "small" if first else "large", "threshold": threshold,
             "p_mod_4": p % 4, "other_terms": other,
             "other_fitted_c": E / total_other if total_other else math.inf}
    return BoundCheckRecord.make("energy-d3", E, active, _paraboloid_instance(A, instance), extra)


# -- restriction side ---------------------------------------------------------------

def _support_meta(g, instance):
    meta = {"p": g.p, "d": g.d, "size": int(len(g.support()))}
    meta.update(instance or {})
    return meta


def _check_sup(g):
    if g.sup_norm() > 1 + 1e-12:
        raise ValueError("bound needs ||g||_inf <= 1")


def restricted_norm(g: SpatialFunction, method="auto") -> float:
    return lq_norm_P(restrict(fourier_transform(g, method)), 2)


def slice_energies(g: SpatialFunction) -> dict:
    """E(G_h) for every height h with a nonempty slice."""
    sl = SlicedSupport.of(g.ctx, g.support_points())
    return {h: additive_energy(sl.lifted(h), g.p) for h in sorted(sl.slices)}


def check_transfer_bound(g: SpatialFunction, instance=None, energies=None) -> BoundCheckRecord:
    _check_sup(g)
    p, d = g.p, g.d
    G = len(g.support())
    lhs = restricted_norm(g)
    energies = slice_energies(g) if energies is None else energies
    s = math.fsum(e**0.25 for e in energies.values())
    terms = {"G^(1/2)": G**0.5, "energy": G ** (3 / 8) * p ** (-(d - 2) / 8) * math.sqrt(s)}
    return BoundCheckRecord.make("transfer", lhs, terms, _support_meta(g, instance),
                                 {"sum_E_quarter": s})


def stein_tomas_terms(G, p, d):
    return ({"G^(1/2)": G**0.5, "G p^-(d-1)/4": G * p ** (-(d - 1) / 4)},
            {"p^(1/2) G^(1/2)": math.sqrt(p * G)})


def check_stein_tomas(g: SpatialFunction, instance=None, lhs=None):
    _check_sup(g)
    G = len(g.support())
    lhs = restricted_norm(g) if lhs is None else lhs
    t2, t3 = stein_tomas_terms(G, g.p, g.d)
    meta = _support_meta(g, instance)
    return (BoundCheckRecord.make("stein-tomas-2", lhs, t2, meta),
            BoundCheckRecord.make("stein-tomas-3", lhs, t3, meta))


def corollary_regimes(p, d):
    """[(upper |G| limit, bound terms as functions of (G, p))] per dimension."""
    if d == 4:
        return [
            (p ** (9 / 4), lambda G: {"G^(1/2)": G**0.5, "G p^(-3/4)": G * p ** -0.75}),
            (p ** (7 / 3), lambda G: {"G^(1/2) p^(3/8)": G**0.5 * p ** 0.375}),
            (p**3, lambda G: {"G^(11/16) p^(-1/16)": G ** (11 / 16) * p ** (-1 / 16)}),
            (p**4, lambda G: {"G^(1/2) p^(1/2)": math.sqrt(G * p)}),
        ]
    if d == 3:
        return [
            (p ** (16 / 9), lambda G: {"G^(1/2)": G**0.5, "G p^(-1/2)": G * p**-0.5}),
            (p ** (47 / 21), lambda G: {"G^(19/28) p^(1/14)": G ** (19 / 28) * p ** (1 / 14),
                                        "G^(7/8) p^(-125/336)": G ** (7 / 8) * p ** (-125 / 336)}),
            (p ** (5 / 2), lambda G: {"G^(5/8) p^(3/16)": G ** (5 / 8) * p ** (3 / 16)}),
            (p**3, lambda G: {"G^(1/2) p^(1/2)": math.sqrt(G * p)}),
        ]
    raise ValueError("d must be 3 or 4")


def corollary_regime(G, p, d) -> int:
    for i, (hi, _) in enumerate(corollary_regimes(p, d), 1):
        if G <= hi * (1 + 1e-12):
            return i
    return len(corollary_regimes(p, d))


def corollary_regime_report(g: SpatialFunction, instance=None, lhs=None) -> BoundCheckRecord:
    _check_sup(g)
    G = len(g.support())
    i = corollary_regime(G, g.p, g.d)
    terms = corollary_regimes(g.p, g.d)[i - 1][1](G)
    lhs = restricted_norm(g) if lhs is None else lhs
    return BoundCheckRecord.make(f"corollary-d{g.d}", lhs, terms, _support_meta(g, instance),
                                 {"regime": i})


# -- extension ratios ----------------------------------------------------------------

def extension_ratio(f: ParaboloidFunction, q: float, method="auto") -> float:
    """||(f dsigma)^v||_{L^q(V)} / ||f||_{L^2(P, dsigma)}."""
    den = lq_norm_P(f, 2)
    if den == 0:
        raise ValueError("f is identically zero")
    return lq_norm_V(extension(f, method), q) / den


def isotropic_line_function(p: int, d: int) -> ParaboloidFunction:
    return ParaboloidFunction.indicator(as_context(p), d, isotropic_line_base(p, d))


def critical_exponent(d: int) -> float:
    return {3: 4.0, 4: 3.0}[d]


def sharpness_sweep(d: int, q_list, p_list) -> dict:
    rows = []
    for p in p_list:
        if d == 3 and p % 4 != 1:
            raise ValueError(f"p = {p}: the d = 3 construction needs p = 1 (mod 4)")
        if d not in (3, 4):
            raise ValueError("d must be 3 or 4")
        f = isotropic_line_function(p, d)
        for q in q_list:
            # closed form: |ext| = p^-(d-2) on p^(d-1) points, ||f|| = p^-(d-2)/2
            closed = p ** ((d - 1) / q - (d - 2) / 2)
            rows.append({"p": p, "q": q, "ratio": extension_ratio(f, q), "closed_form": closed})
    crit = critical_exponent(d)
    trend = {}
    for q in q_list:
        r = [row["ratio"] for row in rows if row["q"] == q]
        if q < crit:
            trend[q] = "increasing" if all(b > a for a, b in zip(r, r[1:])) else "not-increasing"
        else:
            trend[q] = "bounded" if max(r) <= 1 + 1e-9 else "unbounded"
    return {"d": d, "critical_exponent": crit, "rows": rows, "trend": trend}


# -- lower bound construction ------------------------------------------------------------

def cartesian_slices(p: int, family: str = "translate"):
    """p slices of F_p^2, slice h a translate (or dilate) of [1..N]^2, N = round(p^(1/3))."""
    N = round(p ** (1 / 3))
    if N < 2:
        raise ValueError(f"N = {N} < 2; p too small")
    grid = box_base(p, 2, N)
    slices = []
    for h in range(p):
        if family == "translate":
            pts = (grid + np.array([h, 0])) % p
        elif family == "dilate-translate":
            lam = 1 + h % (p - 1)
            pts = (lam * grid + np.array([h, 0])) % p
        else:
            raise ValueError(f"unknown family {family!r}")
        slices.append(pts)
    return N, slices


def lower_bound_construction(p: int, family: str = "translate", method="fast") -> dict:
    N, slices = cartesian_slices(p, family)
    pts = np.concatenate([np.column_stack([s, np.full(len(s), h)]) for h, s in enumerate(slices)])
    g = SpatialFunction.from_points(as_context(p), 3, pts)
    G = len(g.support())
    energies = [additive_energy(lift(s, p), p) for s in slices]
    norm = restricted_norm(g, method)
    st2, st3 = stein_tomas_terms(G, p, 3)
    s = math.fsum(e**0.25 for e in energies)
    transfer = G**0.5 + G ** (3 / 8) * p ** (-1 / 8) * math.sqrt(s)
    bounds = {"stein-tomas-2": math.fsum(st2.values()), "stein-tomas-3": math.fsum(st3.values()),
              "transfer": transfer}
    logN = math.log(N)
    return {
        "p": p, "N": N, "family": family, "G": G,
        "slice_energies_min": min(energies), "slice_energies_max": max(energies),
        "slices_ge_N4": all(e >= N**4 for e in energies),
        "log_N_ge_1": logN >= 1,
        "c_N4logN": min(energies) / (N**4 * logN),
        "restricted_norm": norm,
        "norm_over_p76": norm / p ** (7 / 6),
        "bounds": bounds,
        "min_bound": min(bounds.values()),
        "min_bound_over_p76": min(bounds.values()) / p ** (7 / 6),
    }


def loglog_slope(xs, ys) -> float:
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


# -- extremizer search --------------------------------------------------------------------

@dataclass
class ExtremizerResult:
    best_base: np.ndarray
    best_ratio: float
    trace: list


def extremizer_search(ctx, d: int, q: float, budget: int, seed: int, patience: int = 200):
    """Hill climbing over indicator sets on P with random restarts.

    Moves add, remove or swap one base point; a move is kept when it raises
    the extension ratio.  After ``patience`` moves without gain the climb
    restarts from a random set.  ``budget`` counts move evaluations.  The
    isotropic line, when one exists, is the initial candidate.
    """
    ctx = as_context(ctx)
    p = ctx.p
    nb = p ** (d - 1)
    mass = p ** (d - 1)
    X = all_points(p, d)
    ext_codes = paraboloid_codes(p, d)
    xi_all = decode(ext_codes, p, d)
    rng = rng_for(seed, 0)

    def column(b):
        return ctx.character[(X @ xi_all[b]) % p] / mass

    def score(ext, size):
        return float(np.sum(np.abs(ext) ** q)) ** (1 / q) / math.sqrt(size / mass)

    def start(members):
        ext = np.zeros(p**d, np.complex128)
        for b in np.flatnonzero(members):
            ext += column(b)
        return ext

    try:
        init = np.zeros(nb, bool)
        init[encode(isotropic_line_base(p, d), p)] = True
    except ValueError:
        init = np.zeros(nb, bool)
        init[rng.choice(nb, size=max(1, p), replace=False)] = True
    cur = init
    ext = start(cur)
    cur_r = score(ext, cur.sum())
    best, best_r = cur.copy(), cur_r
    trace = [{"step": 0, "event": "init", "ratio": cur_r, "size": int(cur.sum())}]
    stall = 0
    for step in range(1, budget + 1):
        size = int(cur.sum())
        kind = rng.integers(3)
        if kind == 0 and size < nb:
            b = rng.choice(np.flatnonzero(~cur))
            new_ext, delta = ext + column(b), [(b, True)]
        elif kind == 1 and size > 1:
            b = rng.choice(np.flatnonzero(cur))
            new_ext, delta = ext - column(b), [(b, False)]
        elif size < nb:
            a = rng.choice(np.flatnonzero(cur))
            b = rng.choice(np.flatnonzero(~cur))
            new_ext, delta = ext - column(a) + column(b), [(a, False), (b, True)]
        else:
            continue
        new_size = size + sum(1 if add else -1 for _, add in delta)
        r = score(new_ext, new_size)
        if r > cur_r * (1 + 1e-12):
            for b, add in delta:
                cur[b] = add
            ext, cur_r, stall = new_ext, r, 0
            if r > best_r:
                best, best_r = cur.copy(), r
                trace.append({"step": step, "event": "improve", "ratio": r, "size": new_size})
        else:
            stall += 1
        if stall >= patience:
            size = int(rng.integers(1, nb + 1))
            cur = np.zeros(nb, bool)
            cur[rng.choice(nb, size=size, replace=False)] = True
            ext = start(cur)
            cur_r = score(ext, size)
            stall = 0
            trace.append({"step": step, "event": "restart", "ratio": cur_r, "size": size})
    base = decode(np.flatnonzero(best), p, d - 1)
    exact = extension_ratio(ParaboloidFunction.indicator(ctx, d, base), q)
    return ExtremizerResult(base, exact, trace)


# -- exponent bookkeeping --------------------------------------------------------------------

def exponent_bookkeeping() -> dict:
    """Restriction exponent r and its dual for d = 3 (and the d = 4 pair)."""
    inv_r = Fraction(19, 28) + Fraction(1, 14) * Fraction(9, 16)
    r = 1 / inv_r
    dual = r / (r - 1)
    r4 = Fraction(3, 2)
    return {"d3_inv_r": inv_r, "d3_r": r, "d3_dual": dual, "d4_r": r4, "d4_dual": r4 / (r4 - 1)}


# -- point-plane instances -------------------------------------------------------------------------

POINT_PLANE_KINDS = ("random", "line-pencil", "plane-points", "rectangle-planes", "box")


def _random_planes(rng, p, m, ms=None):
    ms = PlaneMultiset(p) if ms is None else ms
    normals = decode(np.arange(1, p**3), p, 3)
    while ms.distinct < m:
        n = normals[rng.integers(len(normals))]
        plane = plane_through(np.zeros(3, np.int64), n, p)[0], int(rng.integers(p))
        if plane not in ms.counts:
            ms.add(*plane)
    return ms


def point_plane_instance(kind, p, seed, index):
    """(Q, planes) with |Q| <= |planes|."""
    rng = rng_for(seed, index)
    total_planes = p * (p * p + p + 1)
    if kind == "random":
        nq = int(rng.integers(1, min(p**3, total_planes) + 1))
        m = int(rng.integers(nq, total_planes + 1))
        return random_base(rng, p, 3, nq), _random_planes(rng, p, m)
    if kind == "line-pencil":
        v = decode([int(rng.integers(1, p**3))], p, 3)[0]
        line = Line.through(random_base(rng, p, 3, 1)[0], v, p)
        Q = line.points()
        ms = PlaneMultiset(p)
        # every plane through the line: normals orthogonal to its direction
        for n in projective_directions(p, 3):
            if int(n @ np.array(line.direction)) % p == 0:
                ms.add(*plane_through(np.array(line.base), n, p))
        return Q, _random_planes(rng, p, max(len(Q), ms.distinct), ms)
    if kind == "plane-points":
        n = decode([int(rng.integers(1, p**3))], p, 3)[0]
        normal, c = plane_through(random_base(rng, p, 3, 1)[0], n, p)
        pts = all_points(p, 3)
        on = pts[(pts @ np.array(normal)) % p == c]
        Q = on[np.sort(rng.choice(len(on), size=int(rng.integers(1, len(on) + 1)), replace=False))]
        ms = PlaneMultiset(p)
        ms.add(normal, c)
        return Q, _random_planes(rng, p, len(Q), ms)
    if kind == "rectangle-planes":
        n = int(rng.integers(2, min(p**3, 40) + 1))
        B = random_base(rng, p, 3, n)
        return B, PlaneMultiset.from_base_pairs(B, p)
    if kind == "box":
        a = int(rng.integers(2, p + 1))
        Q = box_base(p, 3, a) if a < p else all_points(p, 3)
        return Q, _random_planes(rng, p, len(Q))
    raise ValueError(f"unknown point-plane instance kind {kind!r}")


def check_point_plane(Q, planes: PlaneMultiset, instance=None) -> BoundCheckRecord:
    if len(Q) > len(planes):
        raise ValueError("the point-plane bound assumes |Q| <= |planes|")
    res = point_plane_incidences(Q, planes)
    k = max_collinear(Q, planes.p)
    terms = {"Q^(1/2) Pi": math.sqrt(len(Q)) * len(planes), "k Q": k * len(Q)}
    meta = {"p": planes.p, "size": len(Q), "planes": len(planes), "distinct_planes": planes.distinct}
    meta.update(instance or {})
    return BoundCheckRecord.make("point-plane", abs(float(res.deviation)), terms, meta,
                                 {"incidences": res.incidences,
                                  "signed_deviation": float(res.deviation), "k": k})


# -- suites -----------------------------------------------------------------------------------------

SUITES = ("par-energy-d4", "energy-d3", "transfer", "stein-tomas", "corollary",
          "extension", "point-plane")


def spatial_instance(generator, p, d, seed, index, size=None) -> SpatialFunction:
    ctx = as_context(p)
    rng = rng_for(seed, index)
    if generator == "delta":
        return SpatialFunction.from_points(ctx, d, np.zeros((1, d), np.int64))
    if generator == "ones":
        return SpatialFunction(ctx, d, np.ones(p**d))
    if generator == "random-set":
        return SpatialFunction.from_points(ctx, d, random_base(rng, p, d, int(size)))
    if generator == "random-function":
        pts = random_base(rng, p, d, int(size))
        vals = rng.uniform(0, 1, len(pts)) * np.exp(2j * np.pi * rng.uniform(0, 1, len(pts)))
        return SpatialFunction.from_points(ctx, d, pts, vals)
    if generator == "isotropic-slices":
        base = isotropic_line_base(p, d) if not (d == 3 and p % 4 == 3) else random_base(rng, p, d - 1, p)
        pts = np.concatenate([np.column_stack([base, np.full(len(base), h)]) for h in range(p)])
        return SpatialFunction.from_points(ctx, d, pts)
    raise ValueError(f"unknown generator {generator!r}")


def spatial_instances(p, d, n):
    named = [("delta", None), ("ones", None), ("isotropic-slices", None)]
    sizes = geometric_sizes(p**d)
    out = list(named)
    i = 0
    while len(out) < n:
        gen = "random-set" if i % 3 else "random-function"
        out.append((gen, sizes[i % len(sizes)]))
        i += 1
    return out[:max(n, 0)]


def _run_one(bound, p, d, seed, index, gen, size, q):
    meta = {"generator": gen, "seed": seed, "index": index, "gen_size": size}
    if bound in ("par-energy-d4", "energy-d3"):
        dd = 4 if bound == "par-energy-d4" else 3
        A = ParaboloidSet(as_context(p), dd, generate_base(gen, p, dd, seed, index, size))
        check = check_energy_bound_d4 if dd == 4 else check_energy_bound_d3
        return [check(A, meta)]
    if bound == "extension":
        f = ParaboloidFunction.indicator(as_context(p), d, generate_base(gen, p, d, seed, index, size))
        ext = lq_norm_V(extension(f), q)
        fl2 = lq_norm_P(f, 2)
        meta.update({"p": p, "d": d, "q": q, "size": int(len(f.support()))})
        return [BoundCheckRecord.make("extension", ext, {"||f||_L2(P)": fl2}, meta)]
    if bound == "point-plane":
        Q, planes = point_plane_instance(gen, p, seed, index)
        return [check_point_plane(Q, planes, meta)]
    g = spatial_instance(gen, p, d, seed, index, size)
    if bound == "transfer":
        return [check_transfer_bound(g, meta)]
    if bound == "stein-tomas":
        return list(check_stein_tomas(g, meta))
    if bound == "corollary":
        return [corollary_regime_report(g, meta)]
    raise ValueError(f"unknown bound {bound!r}; expected one of {SUITES}")


def suite_plan(bound, p, d, n):
    if bound == "par-energy-d4":
        return paraboloid_instances(p, 4, n, 0)
    if bound == "energy-d3":
        return paraboloid_instances(p, 3, n, 0)
    if bound == "extension":
        return paraboloid_instances(p, d, n, 0)
    if bound == "point-plane":
        return [(POINT_PLANE_KINDS[i % len(POINT_PLANE_KINDS)], None) for i in range(n)]
    return spatial_instances(p, d, n)


def run_suite(bound, p, d, n, seed, threads=1, q=3.0) -> list[BoundCheckRecord]:
    """Run ``n`` instances of a bound check; records come back in instance order."""
    plan = suite_plan(bound, p, d, n)
    jobs = [(bound, p, d, seed, i, gen, size, q) for i, (gen, size) in enumerate(plan)]
    if threads <= 1:
        chunks = [_run_one(*job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda job: _run_one(*job), jobs))
    return [rec for chunk in chunks for rec in chunk]


def replay(record: BoundCheckRecord | dict) -> list[BoundCheckRecord]:
    """Rebuild a record's instance from its metadata and rerun the check."""
    rec = record if isinstance(record, dict) else record.to_dict()
    inst = rec["instance"]
    name = rec["name"]
    bound = {"stein-tomas-2": "stein-tomas", "stein-tomas-3": "stein-tomas",
             "corollary-d3": "corollary", "corollary-d4": "corollary"}.get(name, name)
    d = inst.get("d", 3)
    q = inst.get("q", 3.0)
    out = _run_one(bound, inst["p"], d, inst["seed"], inst["index"], inst["generator"],
                   inst.get("gen_size"), q)
    return [r for r in out if r.name == name]


def summarize(records) -> dict:
    """Max fitted constant per (bound name, p)."""
    out = {}
    for r in records:
        key = f"{r.name}|p={r.instance.get('p')}"
        out[key] = max(out.get(key, 0.0), r.fitted_c)
    return out
