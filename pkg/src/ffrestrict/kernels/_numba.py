"""numba kernels; each mirrors the function of the same name in _numpy."""
import numpy as np
from numba import njit

from ._common import line_keys as _line_keys_np


@njit(cache=True, nogil=True)
def pair_sum_counts(X, Y, p):
    k = X.shape[1]
    w = np.empty(k, np.int64)
    acc = 1
    for c in range(k):
        w[c] = acc
        acc *= p
    counts = np.zeros(acc, np.int64)
    for i in range(X.shape[0]):
        for j in range(Y.shape[0]):
            code = 0
            for c in range(k):
                code += ((X[i, c] + Y[j, c]) % p) * w[c]
            counts[code] += 1
    return counts


@njit(cache=True, nogil=True)
def _line_key(q, v, p, inv, w, size):
    k = v.shape[0]
    j0 = 0
    while v[j0] == 0:
        j0 += 1
    s = inv[v[j0]]
    j1 = k - 1
    while v[j1] == 0:
        j1 -= 1
    dj1 = (v[j1] * s) % p
    t = (q[j1] * inv[dj1]) % p
    dcode = 0
    bcode = 0
    for c in range(k):
        dc = (v[c] * s) % p
        dcode += dc * w[c]
        bcode += ((q[c] - t * dc) % p + p) % p * w[c]
    return dcode * size + bcode


@njit(cache=True, nogil=True)
def _is_rich(key, rich_keys):
    if rich_keys.shape[0] == 0:
        return -1
    i = np.searchsorted(rich_keys, key)
    if i < rich_keys.shape[0] and rich_keys[i] == key:
        return i
    return -1


@njit(cache=True, nogil=True)
def rectangle_scan(coords, table, p, inv, rich_keys, rich_iso):
    """Scan ordered triples (x, y, z) for the rectangle criterion.

    Returns [total, trivial, ordinary, semi, degenerate, E1, E2, E3].
    """
    n, k = coords.shape
    w = np.empty(k, np.int64)
    acc = 1
    for c in range(k):
        w[c] = acc
        acc *= p
    size = acc
    out = np.zeros(8, np.int64)
    a = np.empty(k, np.int64)
    b = np.empty(k, np.int64)
    norms = np.empty(n, np.int64)
    diffs = np.empty((n, k), np.int64)
    use_rich = rich_keys.shape[0] > 0
    for iz in range(n):
        for i in range(n):
            s = 0
            for c in range(k):
                t = (coords[i, c] - coords[iz, c] + p) % p
                diffs[i, c] = t
                s += t * t
            norms[i] = s % p
        for ix in range(n):
            for c in range(k):
                a[c] = diffs[ix, c]
            for iy in range(n):
                dab = 0
                ucode = 0
                for c in range(k):
                    dab += a[c] * diffs[iy, c]
                    ucode += ((coords[ix, c] + diffs[iy, c]) % p) * w[c]
                if dab % p != 0 or not table[ucode]:
                    continue
                out[0] += 1
                if ix == iz or iy == iz:
                    out[1] += 1
                    continue
                iso_a = norms[ix] == 0
                iso_b = norms[iy] == 0
                if iso_a and iso_b:
                    out[4] += 1
                elif iso_a or iso_b:
                    out[3] += 1
                else:
                    out[2] += 1
                if not use_rich:
                    out[5] += 1
                    continue
                for c in range(k):
                    b[c] = diffs[iy, c]
                r0 = _is_rich(_line_key(coords[iz], a, p, inv, w, size), rich_keys)
                r1 = _is_rich(_line_key(coords[iz], b, p, inv, w, size), rich_keys)
                r2 = _is_rich(_line_key(coords[ix], b, p, inv, w, size), rich_keys)
                r3 = _is_rich(_line_key(coords[iy], a, p, inv, w, size), rich_keys)
                if r0 < 0 or r1 < 0 or r2 < 0 or r3 < 0:
                    out[5] += 1
                if iso_a and iso_b:
                    if r0 >= 0:
                        out[7] += 1
                else:
                    hit = False
                    for r in (r0, r1, r2, r3):
                        if r >= 0 and not rich_iso[r]:
                            hit = True
                    if hit:
                        out[6] += 1
    return out


@njit(cache=True, nogil=True)
def right_triangle_count(coords, p):
    n, k = coords.shape
    total = 0
    diffs = np.empty((n, k), np.int64)
    for iz in range(n):
        for i in range(n):
            for c in range(k):
                diffs[i, c] = (coords[i, c] - coords[iz, c] + p) % p
        for ix in range(n):
            if ix == iz:
                continue
            for iy in range(n):
                if iy == iz:
                    continue
                s = 0
                for c in range(k):
                    s += diffs[ix, c] * diffs[iy, c]
                if s % p == 0:
                    total += 1
    return total


@njit(cache=True, nogil=True)
def _pair_line_keys(coords, p, inv):
    n, k = coords.shape
    w = np.empty(k, np.int64)
    acc = 1
    for c in range(k):
        w[c] = acc
        acc *= p
    out = np.empty(n * (n - 1) // 2, np.int64)
    v = np.empty(k, np.int64)
    m = 0
    for i in range(n):
        for j in range(i + 1, n):
            for c in range(k):
                v[c] = (coords[j, c] - coords[i, c] + p) % p
            out[m] = _line_key(coords[i], v, p, inv, w, acc)
            m += 1
    return out


def pair_line_keys(coords, p, inv):
    coords = np.ascontiguousarray(coords, dtype=np.int64)
    if len(coords) < 2:
        return np.empty(0, np.int64)
    return _pair_line_keys(coords, p, inv)


def line_keys(points, directions, p, inv):
    return _line_keys_np(points, directions, p, inv)


@njit(cache=True, nogil=True)
def charsum(supp, weights, p, d, sign, char):
    """out[code(xi)] = sum_i weights[i] * char[sign * supp[i].xi mod p]."""
    m = supp.shape[0]
    total = 1
    for _ in range(d):
        total *= p
    out = np.zeros(total, np.complex128)
    phase = np.zeros(m, np.int64)
    xi = np.zeros(d, np.int64)
    for code in range(total):
        acc = 0j
        for i in range(m):
            t = phase[i] if sign > 0 else (p - phase[i]) % p
            acc += weights[i] * char[t]
        out[code] = acc
        # odometer step over xi, first coordinate fastest
        c = 0
        while c < d:
            if xi[c] < p - 1:
                xi[c] += 1
                for i in range(m):
                    phase[i] = (phase[i] + supp[i, c]) % p
                break
            xi[c] = 0
            for i in range(m):
                phase[i] = (phase[i] + supp[i, c]) % p
            c += 1
    return out


@njit(cache=True, nogil=True)
def plane_incidences(Q, normals, offsets, mults, p):
    total = 0
    for j in range(normals.shape[0]):
        for i in range(Q.shape[0]):
            s = Q[i, 0] * normals[j, 0] + Q[i, 1] * normals[j, 1] + Q[i, 2] * normals[j, 2]
            if (s - offsets[j]) % p == 0:
                total += mults[j]
    return total


@njit(cache=True, nogil=True)
def perp_decomposition(coords, p, inv, kstar, vrich):
    """Split sum_z sum_l n(l) n(l_perp) into poor / just-rich / very-rich parts."""
    n = coords.shape[0]
    out = np.zeros(3, np.int64)
    cnt = np.zeros(p + 1, np.int64)
    perp = np.empty(p + 1, np.int64)
    perp[0] = p
    perp[p] = 0
    for t in range(1, p):
        perp[t] = (p - inv[t]) % p
    for iz in range(n):
        cnt[:] = 0
        for ix in range(n):
            if ix == iz:
                continue
            a = (coords[ix, 0] - coords[iz, 0] + p) % p
            b = (coords[ix, 1] - coords[iz, 1] + p) % p
            if a == 0:
                cnt[p] += 1
            else:
                cnt[(b * inv[a]) % p] += 1
        for l in range(p + 1):
            x = cnt[l]
            y = cnt[perp[l]]
            prod = x * y
            if prod == 0:
                continue
            lo = min(x, y)
            hi = max(x, y)
            if lo <= kstar:
                out[0] += prod
            elif hi >= vrich:
                out[2] += prod
            else:
                out[1] += prod
    return out
