"""Vectorised helpers shared by both kernel backends."""
import numpy as np


def radix(p, k):
    return p ** np.arange(k, dtype=np.int64)


def line_keys(points, directions, p, inv):
    """Canonical integer key of the line through each point along each direction.

    The direction is scaled to a leading 1; the base point is the point of the
    line whose last direction-supported coordinate is 0, which is the point of
    minimal code on the line.
    """
    q = np.asarray(points, dtype=np.int64)
    v = np.mod(np.asarray(directions, dtype=np.int64), p)
    m, k = v.shape
    rows = np.arange(m)
    nz = v != 0
    if not nz.any(axis=1).all():
        raise ValueError("zero direction")
    j0 = np.argmax(nz, axis=1)
    d = (v * inv[v[rows, j0]][:, None]) % p
    j1 = k - 1 - np.argmax((d != 0)[:, ::-1], axis=1)
    t = (q[rows, j1] * inv[d[rows, j1]]) % p
    base = np.mod(q - t[:, None] * d, p)
    w = radix(p, k)
    return (d @ w) * p**k + base @ w


def decode_line_key(key, p, k):
    key = int(key)
    size = p**k
    dcode, bcode = divmod(key, size)
    d = [(dcode // p**i) % p for i in range(k)]
    b = [(bcode // p**i) % p for i in range(k)]
    return tuple(d), tuple(b)
