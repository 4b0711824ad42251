"""Pure-Python (numpy) versions of the hot loops.

Every function here has a twin in ``_kernels_c.pyx`` with the same
signature and the same integer results; float results (``pair_distances``)
agree to rounding.  Keep the two in sync.
"""
import numpy as np


def greedy_net(D, order, r):
    """Scan ``order`` and admit a point iff it is at distance >= r from all admitted points."""
    order = np.asarray(order, dtype=np.int64)
    if order.size == 0:
        return np.empty(0, dtype=np.int64)
    mind = np.full(D.shape[0], np.inf)
    members = []
    for i in order:
        if mind[i] >= r:
            members.append(i)
            np.minimum(mind, D[i], out=mind)
    return np.asarray(members, dtype=np.int64)


def farthest_order(D, start=0):
    """Farthest-point traversal of all points; ties go to the lowest index."""
    n = D.shape[0]
    out = np.empty(n, dtype=np.int64)
    if n == 0:
        return out
    mind = D[start].astype(np.float64, copy=True)
    taken = np.zeros(n, dtype=bool)
    out[0] = start
    taken[start] = True
    mind[start] = -1.0
    for t in range(1, n):
        i = int(np.argmax(mind))
        out[t] = i
        taken[i] = True
        np.minimum(mind, D[i], out=mind)
        mind[taken] = -1.0
    return out


def fp_cover_count(D, subset, r):
    """Size of the farthest-point greedy cover of ``subset`` by closed r-balls."""
    subset = np.asarray(subset, dtype=np.int64)
    if subset.size == 0:
        return 0
    sub = D[np.ix_(subset, subset)]
    mind = sub[0].copy()
    count = 1
    while True:
        i = int(np.argmax(mind))
        if mind[i] <= r:
            return count
        np.minimum(mind, sub[i], out=mind)
        count += 1


def sup_ball_cover(D, ball_radius, cover_radius):
    """max over x of fp_cover_count(B(x, ball_radius), cover_radius), with the first maximiser."""
    best, arg = 0, -1
    for x in range(D.shape[0]):
        ball = np.flatnonzero(D[x] <= ball_radius)
        c = fp_cover_count(D, ball, cover_radius)
        if c > best:
            best, arg = c, x
    return best, arg


def greedy_coloring(D, members, sep):
    """Smallest color not used by an earlier member within ``sep``; colors start at 1."""
    members = np.asarray(members, dtype=np.int64)
    m = members.size
    colors = np.zeros(m, dtype=np.int64)
    if m == 0:
        return colors
    sub = D[np.ix_(members, members)]
    for t in range(m):
        used = set(colors[:t][sub[t, :t] <= sep].tolist())
        c = 1
        while c in used:
            c += 1
        colors[t] = c
    return colors


def pair_distances(X):
    """Condensed Euclidean distances, pairs (i, j) with i < j in row-major order."""
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    out = np.empty(n * (n - 1) // 2)
    pos = 0
    for i in range(n - 1):
        diff = X[i + 1:] - X[i]
        out[pos:pos + n - 1 - i] = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        pos += n - 1 - i
    return out


def triangle_violation(D, tol):
    """First (i, j, k, excess) with D[i,j] > D[i,k] + D[k,j] + tol, scanning k outermost; else None."""
    for k in range(D.shape[0]):
        excess = D - (D[:, k][:, None] + D[k, :][None, :])
        bad = np.argwhere(excess > tol)
        if bad.size:
            i, j = bad[0]
            return int(i), int(j), k, float(excess[i, j])
    return None
