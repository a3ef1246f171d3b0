import numpy as np
import pytest

from ffrestrict.field import PrimeContext, all_points, encode, null_sphere
from ffrestrict.paraboloid import (ParaboloidSet, SlicedSupport, full_paraboloid, lift,
                                   on_paraboloid, project, slice_at)


@pytest.mark.parametrize("p,d,size", [(3, 4, 27), (5, 3, 25), (7, 4, 343)])
def test_full_paraboloid_size(p, d, size):
    P = full_paraboloid(PrimeContext(p), d)
    assert len(P) == size
    assert on_paraboloid(P.points, p).all()


def test_bad_dimension():
    with pytest.raises(ValueError):
        full_paraboloid(PrimeContext(3), 5)


def test_lift_examples():
    assert lift([[1, 2]], 5).tolist() == [[1, 2, 0]]
    assert lift([[0, 0, 0]], 7).tolist() == [[0, 0, 0, 0]]


def test_project_roundtrip(rng):
    B = np.unique(rng.integers(0, 7, (40, 3)), axis=0)
    assert (project(lift(B, 7), 7) == B).all()
    assert len(np.unique(encode(lift(B, 7), 7))) == len(B)


def test_project_rejects_off_paraboloid():
    with pytest.raises(ValueError):
        project([[1, 1, 1]], 5)


def test_paraboloid_set_membership():
    A = ParaboloidSet(PrimeContext(5), 3, [[1, 2], [0, 0]])
    assert len(A) == 2
    assert (1, 2, 0) in A
    assert (1, 2, 1) not in A
    B = ParaboloidSet.from_points(PrimeContext(5), A.points)
    assert (B.base == A.base).all()


@pytest.mark.parametrize("p", [3, 5, 7])
def test_null_sphere_inside_paraboloid(p):
    S = null_sphere(PrimeContext(p))
    pts = np.hstack([S, np.zeros((len(S), 1), np.int64)])
    assert on_paraboloid(pts, p).all()


def test_slice_examples():
    G = np.array([[1, 2, 0, 3]])
    assert slice_at(G, 3, 5).tolist() == [[1, 2, 0, 0]]
    assert len(slice_at(G, 0, 5)) == 0
    V = all_points(3, 4)
    full = full_paraboloid(PrimeContext(3), 4).points
    for h in range(3):
        assert sorted(encode(slice_at(V, h, 3), 3)) == sorted(encode(full, 3))


def test_sliced_support_partition(rng):
    G = np.unique(rng.integers(0, 5, (60, 3)), axis=0)
    S = SlicedSupport.of(PrimeContext(5), G)
    assert S.size == len(G)
    assert sum(len(S.lifted(h)) for h in range(5)) == len(G)
