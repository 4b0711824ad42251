"""Coordinate maps F^xi, their reversed-order twins, and the direct-product embedding.

For each color xi and each level k the members of J_k(xi) are visited in a
fixed order (forward or reverse enumeration).  Member j receives a vector
v_j from a cubic lattice of spacing 7 tau^3 inside the ball of radius
tau^2, chosen as the first candidate (by squared norm, then
lexicographically) such that

    |F_{k-1}(x') + r_k^eps v - G_{k,j}(y')| >= threshold

for every x' in B_j and every y' in B(x_j, 10 tau^-2 r_k) minus 2B_j, where
G_{k,j} is F_{k-1} plus the contributions of members already visited at
level k.  On a finite space these point sets are used directly.
"""
import dataclasses
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction

import numpy as np

from .errors import LatticeExhausted, SelectionFailed, ValidationError
from .metric_space import ball_members
from .nets import build_hierarchy
from .params import EmbeddingParams

SCHEMA = 1
THRESHOLDS = ("direct", "surrogate")


# -- candidate lattice ------------------------------------------------------

def lattice_radius_sq(tau):
    """Largest integer s with 7 tau^3 sqrt(s) <= tau^2, i.e. 49 tau^2 s <= 1, in exact arithmetic."""
    t = Fraction(tau)
    return math.floor(1 / (49 * t * t))


def lattice_count(M, s_max):
    """Exact number of z in Z^M with |z|^2 <= s_max."""
    if s_max < 0:
        return 0
    theta1 = [0] * (s_max + 1)
    a = 0
    while a * a <= s_max:
        theta1[a * a] += 1 if a == 0 else 2
        a += 1
    poly = [1] + [0] * s_max
    for _ in range(M):
        new = [0] * (s_max + 1)
        for s, c in enumerate(poly):
            if c:
                for q, w in enumerate(theta1[:s_max + 1 - s]):
                    if w:
                        new[s + q] += c * w
        poly = new
    return sum(poly)


def _shell(dim, s):
    if dim == 0:
        if s == 0:
            yield ()
        return
    a = math.isqrt(s)
    for x in range(-a, a + 1):
        rest = s - x * x
        if dim == 1 and rest:
            continue
        for tail in _shell(dim - 1, rest):
            yield (x,) + tail


def iter_lattice(M, s_max):
    """Integer vectors with |z|^2 <= s_max, ordered by |z|^2 then lexicographically."""
    for s in range(s_max + 1):
        yield from _shell(M, s)


def candidate_vectors(M, tau, needed):
    """The first ``needed + 1`` lattice candidates (spacing 7 tau^3, radius tau^2)."""
    s_max = lattice_radius_sq(tau)
    total = lattice_count(M, s_max)
    if total <= needed:
        raise LatticeExhausted(total, needed, M)
    step = 7.0 * tau ** 3
    out = []
    for z in iter_lattice(M, s_max):
        out.append(step * np.asarray(z, dtype=np.float64))
        if len(out) == needed + 1:
            break
    return out


# -- bumps and point sets ---------------------------------------------------

def bump_values(space, center, r):
    """phi(x) = max(0, 1 - dist(x, B(center, r)) / r) for every point x."""
    B = ball_members(space, center, r)
    d = space.dist[:, B].min(axis=1)
    return np.maximum(0.0, 1.0 - d / r)


def bump(space, net, j, x):
    """Single bump value for net member j (a point index) at point x."""
    if j not in net.members:
        raise ValidationError(f"point {j} is not a member of the level-{net.level} net")
    return float(bump_values(space, j, net.radius)[x])


def dense_subsets(space, center, r, tau):
    """(E1, E2): all points of B_j, and all points of B(x_j, 10 tau^-2 r) outside 2B_j.

    A finite point set is dense in itself at every scale, so no thinning to
    eta = tau^3 r^(1/theta) is needed.
    """
    d = space.dist[center]
    E1 = np.flatnonzero(d <= r)
    E2 = np.flatnonzero((d <= 10.0 * r / (tau * tau)) & (d > 2.0 * r))
    return E1, E2


# -- vector selection -------------------------------------------------------

def _pair_margins(F_E1, G_E2, scale, v):
    diff = F_E1[:, None, :] + scale * v - G_E2[None, :, :]
    return np.sqrt(np.einsum("abm,abm->ab", diff, diff))


def select_vector(F_E1, G_E2, scale, threshold, tau, M, s_max=None, brute=False):
    """First lattice candidate v with |F_E1[a] + scale v - G_E2[b]| >= threshold for all a, b.

    ``F_E1`` holds F_{k-1} on E1 and ``G_E2`` holds G_{k,j} on E2.  Each
    pair excludes at most the one lattice point nearest to its kill center
    (G - F) / scale, so only those are tested before the enumeration is
    walked; ``brute=True`` instead tests every candidate against every pair.
    Returns ``(v, info)``.
    """
    if s_max is None:
        s_max = lattice_radius_sq(tau)
    step = 7.0 * tau ** 3
    F_E1 = np.asarray(F_E1, dtype=np.float64).reshape(-1, M)
    G_E2 = np.asarray(G_E2, dtype=np.float64).reshape(-1, M)
    pairs = F_E1.shape[0] * G_E2.shape[0]

    killed = set()
    if pairs and not brute:
        centers = (G_E2[None, :, :] - F_E1[:, None, :]).reshape(-1, M) / scale
        near = np.rint(centers / step).astype(np.int64)
        for z in {tuple(row) for row in near.tolist()}:
            if sum(c * c for c in z) > s_max:
                continue
            v = step * np.asarray(z, dtype=np.float64)
            if _pair_margins(F_E1, G_E2, scale, v).min() < threshold:
                killed.add(z)

    tested = 0
    for rank, z in enumerate(iter_lattice(M, s_max)):
        if z in killed:
            continue
        v = step * np.asarray(z, dtype=np.float64)
        tested += 1
        if pairs == 0 or _pair_margins(F_E1, G_E2, scale, v).min() >= threshold:
            return v, {"rank": rank, "pairs": pairs, "killed": len(killed), "tested": tested}
        killed.add(z)
    raise SelectionFailed(
        "no lattice candidate separates all pairs",
        supplied=lattice_count(M, s_max), pairs=pairs, killed=len(killed))


# -- coordinate maps --------------------------------------------------------

class _Levels:
    """Per-level bump matrices shared by all coordinate maps of one build."""

    def __init__(self, space, params, hierarchy):
        self.space = space
        self.params = params
        self.hierarchy = hierarchy
        self.phi = {}
        self.r = {}
        for k in params.levels:
            net = hierarchy.net(k)
            r = params.radius(k)
            self.r[k] = r
            self.phi[k] = np.column_stack(
                [bump_values(space, j, r) for j in net.members]
            ) if net.members else np.zeros((len(space), 0))

    def r_eps(self, k):
        return self.r[k] ** self.params.epsilon


@dataclass
class CoordinateMap:
    """One color and one visiting order; ``vectors[k]`` maps net position t -> v (length M)."""

    color: int
    order: str
    M: int
    vectors: dict = field(default_factory=dict)
    selection: dict = field(default_factory=dict)  # k -> positions in visiting order
    log: list = field(default_factory=list)
    _levels: _Levels = field(default=None, repr=False)

    def level_term(self, k, points=None):
        """f_k^xi on ``points`` (all points by default), shape (len, M)."""
        phi = self._levels.phi[k]
        if points is not None:
            phi = phi[points]
        pos = sorted(self.vectors.get(k, {}))
        if not pos:
            return np.zeros((phi.shape[0], self.M))
        V = np.vstack([self.vectors[k][t] for t in pos])
        return phi[:, pos] @ V

    def partial(self, k, points=None):
        """F_k^xi = sum_{n0 <= l <= k} r_l^eps f_l^xi; F_{n0-1} = 0."""
        lv = self._levels
        n = len(lv.space) if points is None else len(points)
        acc = np.zeros((n, self.M))
        for l in lv.params.levels:
            if l > k:
                break
            acc = acc + lv.r_eps(l) * self.level_term(l, points)
        return acc

    def evaluate(self, points=None):
        return self.partial(self._levels.params.n, points)

    def partial_G(self, k, count, points):
        """G_{k,j} on ``points`` where j is the ``count``-th member visited at level k."""
        lv = self._levels
        F_prev = self.partial(k - 1, points)
        earlier = self.selection[k][:count]
        if not earlier:
            return F_prev
        V = np.vstack([self.vectors[k][t] for t in earlier])
        return F_prev + lv.r_eps(k) * (lv.phi[k][np.ix_(points, earlier)] @ V)


def build_color_map(space, hierarchy, params, color, order="forward", threshold="direct",
                    levels=None, lattice_total=None):
    """Select every v_j^k for one color, level by level, in the given visiting order."""
    if order not in ("forward", "reverse"):
        raise ValidationError(f"order must be 'forward' or 'reverse', got {order!r}")
    if threshold not in THRESHOLDS:
        raise ValidationError(f"threshold must be one of {THRESHOLDS}")
    lv = levels or _Levels(space, params, hierarchy)
    tau, M = params.tau, params.M
    s_max = lattice_radius_sq(tau)
    strict = params.mode == "strict"
    if strict and lattice_total is None:
        lattice_total = lattice_count(M, s_max)
    factor = 1.0 if threshold == "direct" else 3.0
    cmap = CoordinateMap(color, order, M, _levels=lv)

    for k in params.levels:
        net, col = hierarchy.levels[k]
        fiber = list(col.fiber(color))
        visit = fiber if order == "forward" else fiber[::-1]
        cmap.vectors[k] = {}
        cmap.selection[k] = []
        if not visit:
            continue
        r, scale = lv.r[k], lv.r_eps(k)
        thr = factor * tau ** 3 * scale
        F_prev = cmap.partial(k - 1)
        for count, t in enumerate(visit):
            j = net.members[t]
            E1, E2 = dense_subsets(space, j, r, tau)
            pairs = len(E1) * len(E2)
            if strict and not lattice_total > pairs:
                raise SelectionFailed(
                    f"lattice too small at level {k}, member {j}, color {color}",
                    level=k, member=int(j), color=color, supplied=lattice_total, pairs=pairs)
            G_E2 = cmap.partial_G(k, count, E2) if len(E2) else np.zeros((0, M))
            try:
                v, info = select_vector(F_prev[E1], G_E2, scale, thr, tau, M, s_max)
            except SelectionFailed as e:
                e.info.update(level=k, member=int(j), color=color, order=order)
                raise
            cmap.vectors[k][t] = v
            cmap.selection[k].append(t)
            info.update(level=k, member=int(j), E1=len(E1), E2=len(E2),
                        lattice=lattice_total)
            cmap.log.append(info)
    return cmap


# -- direct product ---------------------------------------------------------

@dataclass
class Embedding:
    coords: np.ndarray
    params: EmbeddingParams
    metadata: dict
    maps: list = field(default_factory=list, repr=False)
    hierarchy: object = field(default=None, repr=False)

    @property
    def dimension(self):
        return self.coords.shape[1]

    def block(self, color, order):
        """Column slice holding F^xi (forward) or its reversed twin for a color."""
        M = self.params.M
        start = (color - 1) * 2 * M + (0 if order == "forward" else M)
        return slice(start, start + M)

    def to_json(self):
        return {"schema": SCHEMA, "params": self.params.to_json(), "metadata": self.metadata,
                "dimension": self.dimension, "coords": self.coords.tolist()}

    @classmethod
    def from_json(cls, obj):
        params = EmbeddingParams.from_json(obj["params"])
        coords = np.asarray(obj["coords"], dtype=np.float64).reshape(-1, obj["dimension"])
        return cls(coords, params, obj["metadata"])

    def vectors_json(self):
        return {"schema": SCHEMA, "maps": [
            {"color": m.color, "order": m.order, "levels": [
                {"k": k, "vectors": {str(self.hierarchy.net(k).members[t]): m.vectors[k][t].tolist()
                                     for t in m.selection[k]}}
                for k in sorted(m.vectors)]}
            for m in self.maps]}


def build_embedding(space, params, net_order="input", threshold="direct", threads=1,
                    timestamp=None, seed=None):
    """Nets, both visiting orders for every color, and the concatenated coordinates.

    Width is 2 * N_colors * M.  In practical mode a color budget of 0, or
    one smaller than the greedy coloring needs, is replaced by the number of
    colors actually used and flagged in the metadata.
    """
    if not 0.0 < space.diameter < 1.0 and len(space) > 1:
        raise ValidationError("build_embedding needs a space with diameter < 1 (normalize first)")
    hierarchy = build_hierarchy(space, params, net_order)
    used = hierarchy.colors_used
    grown = False
    if params.mode != "strict" and used > params.N_colors:
        params = dataclasses.replace(params, N_colors=used)
        grown = True
    levels = _Levels(space, params, hierarchy)
    lattice_total = lattice_count(params.M, lattice_radius_sq(params.tau)) \
        if params.mode == "strict" else None

    jobs = [(c, o) for c in range(1, used + 1) for o in ("forward", "reverse")]

    def run(job):
        return build_color_map(space, hierarchy, params, job[0], job[1], threshold,
                               levels, lattice_total)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            maps = list(ex.map(run, jobs))
    else:
        maps = [run(j) for j in jobs]

    coords = np.zeros((len(space), params.width))
    emb = Embedding(coords, params, {}, maps, hierarchy)
    for m in maps:
        coords[:, emb.block(m.color, m.order)] = m.evaluate()

    if timestamp is None:
        timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    emb.metadata = {
        "net_order": net_order, "mode": params.mode, "threshold": threshold,
        "seed": seed, "timestamp": timestamp, "space_fingerprint": space.fingerprint,
        "n_points": len(space), "colors_used": used, "budget_grown": grown,
        "support_overlap_levels": [k for k, v in sorted(hierarchy.overlaps.items()) if v],
        "selections": sum(len(m.log) for m in maps),
    }
    return emb


def write_embedding(emb, path, csv_path=None):
    with open(path, "w") as fh:
        json.dump(emb.to_json(), fh)
        fh.write("\n")
    if csv_path:
        np.savetxt(csv_path, emb.coords, delimiter=",", fmt="%.17g")


def read_embedding(path):
    with open(path) as fh:
        return Embedding.from_json(json.load(fh))
