"""Exit criteria, one test per criterion, each printing a PASS/FAIL line."""
import io
import json
import time
from fractions import Fraction

import numpy as np
import pytest

import oracles
from ffrestrict import cli
from ffrestrict import verifier as V
from ffrestrict.energy import additive_energy, classify_rectangles, line_lift, mixed_energy, rectangle_triples
from ffrestrict.field import PrimeContext
from ffrestrict.incidence import (Line, PlaneMultiset, isotropic_graph_stats, plane_through,
                                  point_plane_incidences_excluding, rich_lines)
from ffrestrict.paraboloid import lift
from ffrestrict.spectral import (ParaboloidFunction, SpatialFunction, extension, fourier_transform,
                                 lq_norm_V, restrict)

# recorded battery constants
C_STAR_D4 = 1.2
C_STAR_D3 = 1.2
TREND_FACTOR = 1.2


def rel_err(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def battery(p, d, n_random=200, seed=0):
    """Named families plus ``n_random`` random indicator sets on P."""
    plan = V.paraboloid_instances(p, d, 0, seed)
    sizes = V.geometric_sizes(p ** (d - 1))
    plan += [("random-set", sizes[i % len(sizes)]) for i in range(n_random)]
    for i, (gen, size) in enumerate(plan):
        yield gen, size, V.generate_base(gen, p, d, seed, i, size)


def test_c01_energy_oracle(criterion):
    t0 = time.perf_counter()
    bad = 0
    for p in (3, 5, 7):
        for k in (2, 3):
            for i in range(50):
                rng = V.rng_for(1, 100 * p + 10 * k + i)
                X = V.random_base(rng, p, k, int(rng.integers(1, 31)))
                bad += additive_energy(X, p) != oracles.energy_quadruples_np(X, p)
    dt = time.perf_counter() - t0
    criterion("[1] energy = quadruple oracle", bad == 0 and dt <= 10,
              f"mismatches={bad} over 300 sets, {dt:.1f}s (limit 10s)")


def test_c02_rectangle_identity(criterion):
    t0 = time.perf_counter()
    bad = 0
    for p in (3, 5, 7):
        for k in (2, 3):
            for i in range(50):
                rng = V.rng_for(2, 100 * p + 10 * k + i)
                B = V.random_base(rng, p, k, int(rng.integers(1, 31)))
                t = rectangle_triples(B, p)
                bad += t != additive_energy(lift(B, p), p)
                if k == 3:
                    c = classify_rectangles(B, p)
                    bad += c.total != t
                    bad += c.ordinary + c.semi_degenerate + c.degenerate != c.nontrivial
    dt = time.perf_counter() - t0
    criterion("[2] rectangle triples = E(lift), classes partition", bad == 0 and dt <= 30,
              f"failures={bad} over 300 sets, {dt:.1f}s (limit 30s)")


def test_c03_spectral(criterion):
    t0 = time.perf_counter()
    worst = {"plancherel": 0.0, "duality": 0.0, "fast-direct": 0.0}
    for p in (3, 5, 7, 11):
        for d in (3, 4):
            ctx = PrimeContext(p)
            for i in range(20):
                rng = V.rng_for(3, 1000 * p + 100 * d + i)
                v = rng.normal(size=p**d) + 1j * rng.normal(size=p**d)
                v[rng.random(p**d) > rng.uniform(0.02, 1)] = 0
                g = SpatialFunction(ctx, d, v)
                fast = fourier_transform(g, "fast")
                direct = fourier_transform(g, "direct")
                scale = max(np.abs(direct.values).max(), 1e-300)
                worst["fast-direct"] = max(worst["fast-direct"],
                                           np.abs(fast.values - direct.values).max() / scale)
                lhs = lq_norm_V(fast, 2) ** 2
                rhs = p**d * lq_norm_V(g, 2) ** 2
                worst["plancherel"] = max(worst["plancherel"], rel_err(lhs, rhs) if rhs else 0.0)
                f = ParaboloidFunction(ctx, d, rng.normal(size=p ** (d - 1))
                                       + 1j * rng.normal(size=p ** (d - 1)))
                a = np.sum(extension(f).values * np.conj(g.values))
                b = np.sum(f.values * np.conj(restrict(fast).values)) / p ** (d - 1)
                worst["duality"] = max(worst["duality"], abs(a - b) / max(abs(b), 1e-300))
    dt = time.perf_counter() - t0
    ok = all(w <= 1e-9 for w in worst.values()) and dt <= 60
    criterion("[3] Plancherel, duality, fast = direct", ok,
              ", ".join(f"{k}={v:.1e}" for k, v in worst.items()) + f", {dt:.1f}s (limit 60s)")


def _battery_max(p, d, q, n_random):
    ctx = PrimeContext(p)
    rows = []
    for gen, size, base in battery(p, d, n_random):
        f = ParaboloidFunction.indicator(ctx, d, base)
        rows.append((len(base), gen, V.extension_ratio(f, q)))
    return rows


def test_c04_theorem_d4_battery(criterion):
    t0 = time.perf_counter()
    maxima, nonincreasing = {}, True
    for p in (3, 5, 7, 11, 13):
        rows = _battery_max(p, 4, 3.0, 200)
        maxima[p] = max(r for _, _, r in rows)
        # max over instances of size >= s can only fall as s grows
        cut = [max(r for n, _, r in rows if n >= s) for s in sorted({n for n, _, _ in rows})]
        nonincreasing &= all(b <= a for a, b in zip(cut, cut[1:]))
    dt = time.perf_counter() - t0
    ok = (all(m <= C_STAR_D4 for m in maxima.values())
          and maxima[13] <= TREND_FACTOR * maxima[5] and nonincreasing and dt <= 300)
    criterion("[4] d=4 battery max ratio (q=3) bounded, no upward trend", ok,
              " ".join(f"p{p}={m:.4f}" for p, m in maxima.items())
              + f" C*={C_STAR_D4} p13/p5={maxima[13] / maxima[5]:.3f} {dt:.1f}s")


def test_c05_sharpness(criterion):
    t0 = time.perf_counter()
    res = V.sharpness_sweep(4, [3.0, 2.5], [3, 7, 11])
    at3 = [r["ratio"] for r in res["rows"] if r["q"] == 3.0]
    at25 = [(r["p"], r["ratio"]) for r in res["rows"] if r["q"] == 2.5]
    ok3 = all(abs(r - 1) <= 1e-9 for r in at3)
    ok25 = all(abs(r - p**0.2) <= 1e-6 for p, r in at25)
    inc = all(b[1] > a[1] for a, b in zip(at25, at25[1:]))
    dt = time.perf_counter() - t0
    criterion("[5] isotropic-line sharpness", ok3 and ok25 and inc and dt <= 30,
              f"q=3 max|r-1|={max(abs(r - 1) for r in at3):.1e}, "
              f"q=2.5 max|r-p^0.2|={max(abs(r - p**0.2) for p, r in at25):.1e}, {dt:.1f}s")


def test_c06_theorem_d3_battery(criterion):
    t0 = time.perf_counter()
    q = float(Fraction(32, 9))
    maxima = {p: max(r for _, _, r in _battery_max(p, 3, q, 200)) for p in (7, 11, 19)}
    b = V.exponent_bookkeeping()
    exact = (b["d3_r"] == Fraction(224, 161) and b["d3_dual"] == Fraction(32, 9)
             and 1 / b["d3_r"] + 1 / b["d3_dual"] == 1)
    dt = time.perf_counter() - t0
    ok = (all(m <= C_STAR_D3 for m in maxima.values()) and maxima[19] <= TREND_FACTOR * maxima[7]
          and exact and dt <= 120)
    criterion("[6] d=3 battery max ratio (q=32/9) bounded; r=224/161 <-> 32/9", ok,
              " ".join(f"p{p}={m:.4f}" for p, m in maxima.items())
              + f" C*={C_STAR_D3} r={b['d3_r']} dual={b['d3_dual']} {dt:.1f}s")


def _excluding_instance(seed, p):
    rng = V.rng_for(seed, p)
    Q = V.random_base(rng, p, 3, int(rng.integers(5, 40)))
    ms = PlaneMultiset(p)
    lines = []
    for _ in range(5):
        i, j = rng.choice(len(Q), 2, replace=False)
        ln = Line.from_points(Q[i], Q[j], p)
        lines.append(ln)
        for n in V.projective_directions(p, 3):
            if int(np.dot(n, ln.direction)) % p == 0 and rng.random() < 0.5:
                ms.add(*plane_through(ln.base, n, p), int(rng.integers(1, 3)))
    V._random_planes(rng, p, ms.distinct + 10, ms)
    return Q, ms, lines


def test_c07_point_plane(criterion):
    t0 = time.perf_counter()
    fitted = {}
    for p in (3, 5, 7, 11):
        recs = []
        for i in range(100):
            kind = V.POINT_PLANE_KINDS[i % len(V.POINT_PLANE_KINDS)]
            Q, planes = V.point_plane_instance(kind, p, 7, i)
            assert len(Q) <= len(planes)
            recs.append(V.check_point_plane(Q, planes))
        fitted[p] = max(r.fitted_c for r in recs)
    mismatch = 0
    for seed in range(20):
        for p in (3, 5):
            Q, ms, lines = _excluding_instance(seed, p)
            sets = [set(map(tuple, ln.points().tolist())) for ln in lines]
            mismatch += point_plane_incidences_excluding(Q, ms, lines) != \
                oracles.excluded_incidences_brute(Q, list(ms), sets, p)
    dt = time.perf_counter() - t0
    ok = fitted[11] <= 2 * fitted[3] and mismatch == 0 and dt <= 120
    criterion("[7] point-plane deviation, stable C; exclusion = oracle", ok,
              " ".join(f"C(p{p})={c:.3f}" for p, c in fitted.items())
              + f" ratio={fitted[11] / fitted[3]:.2f} excl_mismatch={mismatch} {dt:.1f}s")


def test_c08_energy_lemmas(criterion):
    t0 = time.perf_counter()
    c4 = {p: max(r.fitted_c for r in V.run_suite("par-energy-d4", p, 4, 60, 8)) for p in (5, 7, 11)}
    c3 = {p: max(r.fitted_c for r in V.run_suite("energy-d3", p, 3, 60, 8)) for p in (7, 11, 19)}
    mixed_bad = mixed_checked = tri_bad = graphs = 0
    for p in (5, 7, 11):
        for gen, size, base in battery(p, 4, 40, seed=8):
            A = lift(base, p)
            if len(base) >= 2:
                for ln, _ in rich_lines(base, 2, p)[:10]:
                    if ln.is_isotropic():
                        continue
                    Al = line_lift(ln, base)
                    mixed_checked += 1
                    mixed_bad += mixed_energy(Al, A, p) > 3 * len(Al) * len(A)
            if len(base) <= 400:
                graphs += 1
                tri_bad += isotropic_graph_stats(base, p)[2]
    dt = time.perf_counter() - t0
    ok = (c4[11] <= TREND_FACTOR * c4[5] and c3[19] <= TREND_FACTOR * c3[7]
          and mixed_bad == 0 and mixed_checked > 0 and tri_bad == 0 and dt <= 180)
    criterion("[8] energy lemmas: fitted constants flat, mixed-energy bound, triangle-free", ok,
              " ".join(f"d4:p{p}={c:.3f}" for p, c in c4.items()) + " "
              + " ".join(f"d3:p{p}={c:.3f}" for p, c in c3.items())
              + f" mixed {mixed_checked} ok, graphs={graphs} bad_triangles={tri_bad} {dt:.1f}s")


PRIMES_LB = (31, 61, 101)


@pytest.fixture(scope="module")
def lower_bound_rows():
    t0 = time.perf_counter()
    rows = [V.lower_bound_construction(p, "translate", method="fast") for p in PRIMES_LB]
    return rows, time.perf_counter() - t0


def test_c09_lower_bound_slices(criterion, lower_bound_rows):
    rows, dt = lower_bound_rows
    ok = all(r["slices_ge_N4"] for r in rows) and dt <= 300
    criterion("[9a] lower-bound slices carry >= N^4 rectangles", ok,
              " ".join(f"p{r['p']}:N={r['N']},E={r['slice_energies_min']},N^4={r['N']**4},"
                       f"logN>=1:{r['log_N_ge_1']}" for r in rows) + f" {dt:.1f}s")


def test_c09_lower_bound_min_estimate_slope(criterion, lower_bound_rows):
    rows, _ = lower_bound_rows
    slope = V.loglog_slope(PRIMES_LB, [r["min_bound"] for r in rows])
    criterion("[9b] slope of min(upper estimates) vs p >= 7/6 - 0.15", slope >= 7 / 6 - 0.15,
              f"slope={slope:.4f}")


def test_c09_lower_bound_norm_slope(criterion, lower_bound_rows):
    rows, _ = lower_bound_rows
    slope = V.loglog_slope(PRIMES_LB, [r["restricted_norm"] for r in rows])
    criterion("[9c] slope of ||ghat||_L2(P) vs p >= 7/6 - 0.15", slope >= 7 / 6 - 0.15,
              f"slope={slope:.4f} norms=" + ",".join(f"{r['restricted_norm']:.2f}" for r in rows))


def _same(a, b):
    if isinstance(a, dict):
        return a.keys() == b.keys() and all(_same(a[k], b[k]) for k in a)
    if isinstance(a, list):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, float) or isinstance(b, float):
        return a == b or abs(a - b) <= 1e-9 * max(abs(a), abs(b))
    return a == b


def test_c10_determinism_across_threads(criterion):
    t0 = time.perf_counter()
    same = True
    for bound in V.SUITES:
        d = 4 if bound in ("par-energy-d4", "corollary", "extension") else 3
        outs = []
        for threads in ("1", "4"):
            buf = io.StringIO()
            code = cli.run(["verify", "--bound", bound, "--p", "5", "--d", str(d), "--n", "12",
                            "--seed", "42", "--threads", threads], stdout=buf)
            assert code == 0
            outs.append(json.loads(buf.getvalue())["payload"])
        same &= _same(outs[0], outs[1])
    dt = time.perf_counter() - t0
    criterion("[10] verify output independent of --threads", same,
              f"{len(V.SUITES)} suites, {dt:.1f}s")
