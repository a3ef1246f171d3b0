import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ffrestrict import kernels
from ffrestrict.energy import _rich
from ffrestrict.field import PrimeContext, decode, membership_table

NB = kernels.get_backend("numba")
NP = kernels.get_backend("numpy")

primes = st.sampled_from([3, 5, 7, 11])


@st.composite
def point_sets(draw, k=None, max_size=25):
    p = draw(primes)
    k = k or draw(st.sampled_from([2, 3]))
    n = draw(st.integers(1, min(max_size, p**k)))
    codes = draw(st.lists(st.integers(0, p**k - 1), min_size=n, max_size=n, unique=True))
    return p, np.ascontiguousarray(decode(np.array(sorted(codes)), p, k))


def test_backend_selection():
    assert kernels.BACKEND in ("numba", "numpy")
    with pytest.raises(ValueError):
        kernels.get_backend("cuda")
    assert set(kernels.NAMES) <= set(dir(NP)) and set(kernels.NAMES) <= set(dir(NB))


def test_env_flag_selects_numpy():
    out = subprocess.run(
        [sys.executable, "-c", "from ffrestrict import kernels; print(kernels.BACKEND)"],
        env={**os.environ, "FFRESTRICT_NO_NUMBA": "1"}, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


@settings(max_examples=40, deadline=None)
@given(point_sets(), st.integers(0, 2**31))
def test_pair_sum_counts(a, seed):
    p, X = a
    Y = np.ascontiguousarray(np.random.default_rng(seed).integers(0, p, (7, X.shape[1])))
    assert (NB.pair_sum_counts(X, Y, p) == NP.pair_sum_counts(X, Y, p)).all()


@settings(max_examples=40, deadline=None)
@given(point_sets(), st.integers(2, 5))
def test_rectangle_scan(data, thr):
    p, B = data
    ctx = PrimeContext(p)
    table = membership_table(B, p)
    empty = (np.empty(0, np.int64), np.empty(0, np.bool_))
    assert (NB.rectangle_scan(B, table, p, ctx.inverse, *empty)
            == NP.rectangle_scan(B, table, p, ctx.inverse, *empty)).all()
    if B.shape[1] == 3:
        keys, iso, _ = _rich(B, p, thr)
        assert (NB.rectangle_scan(B, table, p, ctx.inverse, keys, iso)
                == NP.rectangle_scan(B, table, p, ctx.inverse, keys, iso)).all()


@settings(max_examples=40, deadline=None)
@given(point_sets(k=2, max_size=40))
def test_right_triangles_and_keys(data):
    p, B = data
    assert NB.right_triangle_count(B, p) == NP.right_triangle_count(B, p)
    inv = PrimeContext(p).inverse
    assert (np.sort(NB.pair_line_keys(B, p, inv)) == np.sort(NP.pair_line_keys(B, p, inv))).all()


@settings(max_examples=30, deadline=None)
@given(point_sets(k=2, max_size=60), st.floats(0, 6), st.floats(0, 10))
def test_perp_decomposition(data, kstar, vrich):
    p, B = data
    if p % 4 != 3:
        return
    inv = PrimeContext(p).inverse
    assert (NB.perp_decomposition(B, p, inv, kstar, vrich)
            == NP.perp_decomposition(B, p, inv, kstar, vrich)).all()


@settings(max_examples=20, deadline=None)
@given(point_sets(k=3), st.sampled_from([-1, 1]), st.integers(0, 2**31))
def test_charsum(data, sign, seed):
    p, supp = data
    rng = np.random.default_rng(seed)
    w = rng.normal(size=len(supp)) + 1j * rng.normal(size=len(supp))
    char = PrimeContext(p).character
    a = NB.charsum(supp, w, p, 3, sign, char)
    b = NP.charsum(supp, w, p, 3, sign, char)
    assert np.max(np.abs(a - b)) <= 1e-12 * max(1.0, np.max(np.abs(b)))


@settings(max_examples=30, deadline=None)
@given(point_sets(k=3), st.integers(0, 2**31))
def test_plane_incidences(data, seed):
    p, Q = data
    rng = np.random.default_rng(seed)
    normals = rng.integers(0, p, (10, 3))
    normals[:, 0] = 1
    offsets = rng.integers(0, p, 10)
    mults = rng.integers(1, 4, 10)
    assert NB.plane_incidences(Q, normals, offsets, mults, p) == \
        NP.plane_incidences(Q, normals, offsets, mults, p)
