"""Pure-numpy kernels, used when numba is disabled or unavailable."""
import numpy as np

from ._common import line_keys, radix

_CHUNK = 1 << 22  # max cells per temporary block


def pair_sum_counts(X, Y, p):
    k = X.shape[1]
    w = radix(p, k)
    size = p**k
    counts = np.zeros(size, np.int64)
    step = max(1, _CHUNK // max(1, len(Y) * k))
    for s in range(0, len(X), step):
        codes = ((X[s:s + step, None, :] + Y[None, :, :]) % p) @ w
        counts += np.bincount(codes.ravel(), minlength=size)
    return counts


def rectangle_scan(coords, table, p, inv, rich_keys, rich_iso):
    n, k = coords.shape
    w = radix(p, k)
    out = np.zeros(8, np.int64)
    use_rich = len(rich_keys) > 0
    for iz in range(n):
        z = coords[iz]
        D = (coords - z) % p
        norms = (D * D).sum(axis=1) % p
        ok = (D @ D.T) % p == 0
        ucodes = ((coords[:, None, :] + D[None, :, :]) % p) @ w
        ok &= table[ucodes]
        out[0] += ok.sum()
        triv = np.zeros_like(ok)
        triv[iz, :] = True
        triv[:, iz] = True
        out[1] += (ok & triv).sum()
        ix, iy = np.nonzero(ok & ~triv)
        if not len(ix):
            continue
        iso_a = norms[ix] == 0
        iso_b = norms[iy] == 0
        degen = iso_a & iso_b
        out[2] += (~iso_a & ~iso_b).sum()
        out[3] += (iso_a ^ iso_b).sum()
        out[4] += degen.sum()
        if not use_rich:
            out[5] += len(ix)
            continue
        zz = np.broadcast_to(z, (len(ix), k))
        sides = [
            line_keys(zz, D[ix], p, inv),
            line_keys(zz, D[iy], p, inv),
            line_keys(coords[ix], D[iy], p, inv),
            line_keys(coords[iy], D[ix], p, inv),
        ]
        rich = []
        noniso = []
        for key in sides:
            pos = np.clip(np.searchsorted(rich_keys, key), 0, len(rich_keys) - 1)
            hit = rich_keys[pos] == key
            rich.append(hit)
            noniso.append(hit & ~rich_iso[pos])
        out[5] += (~(rich[0] & rich[1] & rich[2] & rich[3])).sum()
        out[6] += (~degen & (noniso[0] | noniso[1] | noniso[2] | noniso[3])).sum()
        out[7] += (degen & rich[0]).sum()
    return out


def right_triangle_count(coords, p):
    n = len(coords)
    total = 0
    for iz in range(n):
        D = (coords - coords[iz]) % p
        ok = (D @ D.T) % p == 0
        ok[iz, :] = False
        ok[:, iz] = False
        total += int(ok.sum())
    return total


def pair_line_keys(coords, p, inv):
    n = len(coords)
    if n < 2:
        return np.empty(0, np.int64)
    i, j = np.triu_indices(n, 1)
    return line_keys(coords[i], (coords[j] - coords[i]) % p, p, inv)


def charsum(supp, weights, p, d, sign, char):
    total = p**d
    out = np.empty(total, np.complex128)
    w = radix(p, d)
    step = max(1, _CHUNK // max(1, len(supp)))
    for s in range(0, total, step):
        codes = np.arange(s, min(total, s + step))
        xi = (codes[:, None] // w) % p
        ph = (xi @ supp.T) % p
        if sign < 0:
            ph = (-ph) % p
        out[s:s + len(codes)] = char[ph] @ weights
    return out


def plane_incidences(Q, normals, offsets, mults, p):
    total = 0
    step = max(1, _CHUNK // max(1, len(Q)))
    for s in range(0, len(normals), step):
        hit = (Q @ normals[s:s + step].T - offsets[s:s + step]) % p == 0
        total += int(hit.sum(axis=0) @ mults[s:s + step])
    return total


def perp_decomposition(coords, p, inv, kstar, vrich):
    out = np.zeros(3, np.int64)
    perp = np.empty(p + 1, np.int64)
    perp[0] = p
    perp[p] = 0
    perp[1:p] = (p - inv[1:p]) % p
    for iz in range(len(coords)):
        D = np.delete((coords - coords[iz]) % p, iz, axis=0)
        idx = np.where(D[:, 0] == 0, p, (D[:, 1] * inv[D[:, 0]]) % p)
        cnt = np.bincount(idx, minlength=p + 1).astype(np.int64)
        x, y = cnt, cnt[perp]
        prod = x * y
        lo = np.minimum(x, y)
        hi = np.maximum(x, y)
        poor = lo <= kstar
        very = ~poor & (hi >= vrich)
        out[0] += prod[poor].sum()
        out[2] += prod[very].sum()
        out[1] += prod[~poor & ~very].sum()
    return out
