"""Pairwise check of the two-sided snowflake bounds."""
import csv
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import kernels
from .errors import DegenerateSpace, SpaceMismatch, ValidationError
from .params import scale_radius

SCHEMA = 1
DEFAULT_SLACK = 1e-9


def pair_level(d, tau, n0, n):
    """Largest k in [n0, n] with d <= 4 r_{k-1}; returns (k, clamped).

    ``clamped`` is set when d <= 4 r_n as well, i.e. the scan would have
    continued past n.
    """
    if d <= 0:
        raise ValidationError("pair_level needs a positive distance")
    for k in range(n, n0 - 1, -1):
        if d <= 4.0 * scale_radius(tau, k - 1):
            return k, (k == n and d <= 4.0 * scale_radius(tau, n))
    raise ValidationError(f"d = {d} exceeds 4 r_(n0-1); is the space normalized?")


@dataclass
class PairRecord:
    i: int
    j: int
    d: float
    embedded: float
    ratio: float
    level: int
    in_scope: bool


@dataclass
class DistortionReport:
    epsilon: float
    threshold: float
    upper_constant: float
    lower_constant: float
    slack: float
    mode: str
    pairs: list = field(default_factory=list)
    worst_upper: float = 0.0
    worst_lower: float = math.inf
    upper_witness: tuple = None
    lower_witness: tuple = None
    pass_: bool = True

    def to_json(self):
        d = asdict(self)
        d["pass"] = d.pop("pass_")
        d["worst_lower"] = None if math.isinf(self.worst_lower) else self.worst_lower
        d["schema"] = SCHEMA
        return d


def embedded_distances(coords):
    """Condensed |F(i) - F(j)|; all-zero columns are dropped since they add nothing."""
    coords = np.asarray(coords, dtype=np.float64)
    live = np.flatnonzero(np.any(coords != 0, axis=0))
    return kernels.pair_distances(coords[:, live])


def distortion_report(space, embedding, slack=DEFAULT_SLACK):
    """Exhaustive over all pairs: the upper bound everywhere, the lower bound above 4 tau^(2n)."""
    fp = embedding.metadata.get("space_fingerprint")
    if fp is not None and fp != space.fingerprint:
        raise SpaceMismatch("embedding was built on a different space")
    if embedding.coords.shape[0] != len(space):
        raise SpaceMismatch(f"{embedding.coords.shape[0]} embedded points for {len(space)} space points")
    p = embedding.params
    eps, tau = p.epsilon, p.tau
    rep = DistortionReport(
        epsilon=eps,
        threshold=4.0 * scale_radius(tau, p.n),
        upper_constant=5.0 * math.sqrt(p.N_colors) * tau ** (-2.0 * (1.0 - eps)),
        lower_constant=tau ** 5 / 8.0,
        slack=slack, mode=p.mode)
    n = len(space)
    if n < 2:
        return rep
    emb = embedded_distances(embedding.coords)
    iu, ju = np.triu_indices(n, 1)
    D = space.dist[iu, ju]
    ratios = emb / D ** eps
    up_lim = rep.upper_constant * (1.0 + slack)
    lo_lim = rep.lower_constant * (1.0 - slack)
    for q in range(len(D)):
        i, j, d, e, ratio = int(iu[q]), int(ju[q]), float(D[q]), float(emb[q]), float(ratios[q])
        k, _ = pair_level(d, tau, p.n0, p.n)
        scope = d >= rep.threshold
        rep.pairs.append(PairRecord(i, j, d, e, ratio, k, scope))
        if ratio > rep.worst_upper:
            rep.worst_upper, rep.upper_witness = ratio, (i, j)
        if scope and ratio < rep.worst_lower:
            rep.worst_lower, rep.lower_witness = ratio, (i, j)
        if ratio > up_lim or (scope and ratio < lo_lim):
            rep.pass_ = False
    return rep


def lipschitz_norm(values, space, exponent=1.0):
    """max over pairs of |f(x) - f(y)| / d(x, y)^exponent.

    ``values`` is an (N, m) array of f at every point, or a callable taking
    a point index.
    """
    n = len(space)
    if n < 2:
        raise DegenerateSpace("Lipschitz norm needs at least two points")
    if callable(values):
        values = [np.atleast_1d(values(i)) for i in range(n)]
    V = np.asarray(values, dtype=np.float64).reshape(n, -1)
    iu, ju = np.triu_indices(n, 1)
    num = kernels.pair_distances(V)
    return float(np.max(num / space.dist[iu, ju] ** exponent))


def write_report(rep, path, csv_path=None):
    with open(path, "w") as fh:
        json.dump(rep.to_json(), fh)
        fh.write("\n")
    if csv_path:
        with open(csv_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["i", "j", "distance", "embedded_distance", "ratio", "level", "in_scope"])
            for pr in rep.pairs:
                w.writerow([pr.i, pr.j, repr(pr.d), repr(pr.embedded), repr(pr.ratio),
                            pr.level, int(pr.in_scope)])
