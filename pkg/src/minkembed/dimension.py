"""Covering numbers and the dimension estimates built on them.

Covers are intrinsic: ball centers are points of the space.  Greedy covers
use farthest-point traversal (an upper bound on the covering number); a
greedy 2r-packing gives the matching lower bound.  Exact covers are solved
by branch and bound and are capped at 16 points.
"""
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ExactTooLarge, InsufficientScales, ThetaOutOfRange, ValidationError

EXACT_CAP = 16
MIN_SCALES = 4


@dataclass
class DimensionEstimate:
    value: float
    scales_used: list
    fit_residual: float
    method: str = "greedy_cover"
    what: str = "minkowski"
    theta: float = None

    def to_json(self):
        out = {"what": self.what, "value": self.value, "residual": self.fit_residual,
               "scales": [[float(r), int(c)] for r, c in self.scales_used],
               "method": self.method}
        if self.theta is not None:
            out["theta"] = self.theta
        return out


@dataclass
class QuasidoublingEstimate:
    theta: float
    delta: float
    C: float
    witnesses: list = field(default_factory=list)

    def bound(self, R, lam):
        return lam ** self.delta * self.C * R ** ((1.0 - 1.0 / self.theta) * self.delta)

    def validate(self):
        """Re-evaluate the covering inequality on every stored witness."""
        return all(w["cover_size"] <= self.bound(w["R"], w["lambda"]) for w in self.witnesses)

    def to_json(self):
        return {"what": "quasidoubling", "value": self.C, "theta": self.theta,
                "delta": self.delta, "witnesses": self.witnesses}


# -- covering numbers -------------------------------------------------------

def greedy_cover_size(space, subset, r):
    return kernels.fp_cover_count(space.dist, subset, r)


def packing_lower_bound(space, subset, r):
    """Size of a greedy set of subset points pairwise more than 2r apart.

    No closed r-ball can hold two such points, so this bounds the covering
    number from below.
    """
    subset = np.asarray(subset, dtype=np.int64)
    if subset.size == 0:
        return 0
    sub = space.dist[np.ix_(subset, subset)]
    return len(kernels.greedy_net(sub, np.arange(subset.size), np.nextafter(2.0 * r, np.inf)))


def cover_bounds(space, subset, r):
    """(greedy cover size, packing lower bound) for ``subset`` at radius r."""
    return greedy_cover_size(space, subset, r), packing_lower_bound(space, subset, r)


def _exact_cover(space, subset, r):
    m = len(subset)
    full = (1 << m) - 1
    within = space.dist[:, subset] <= r
    masks = set()
    for row in within:
        mk = 0
        for b in np.flatnonzero(row):
            mk |= 1 << int(b)
        if mk:
            masks.add(mk)
    # drop dominated masks
    masks = sorted(masks, key=lambda v: (-bin(v).count("1"), v))
    kept = []
    for mk in masks:
        if not any(mk & k == mk for k in kept):
            kept.append(mk)
    by_elem = [[mk for mk in kept if mk >> e & 1] for e in range(m)]

    best = [greedy_cover_size(space, subset, r)]

    def search(uncovered, depth):
        if uncovered == 0:
            best[0] = min(best[0], depth)
            return
        if depth + 1 >= best[0]:
            return
        e = min((e for e in range(m) if uncovered >> e & 1), key=lambda e: len(by_elem[e]))
        opts = sorted(by_elem[e], key=lambda mk: -bin(mk & uncovered).count("1"))
        for mk in opts:
            search(uncovered & ~mk, depth + 1)

    search(full, 0)
    return best[0]


def covering_number(space, subset, r, method="greedy"):
    """Number of closed r-balls (centered in the space) needed to cover ``subset``."""
    if r <= 0:
        raise ValidationError("covering radius must be positive")
    subset = np.asarray(subset, dtype=np.int64)
    if subset.size == 0:
        raise ValidationError("subset must be nonempty")
    if method == "greedy":
        return greedy_cover_size(space, subset, r)
    if method == "exact":
        if subset.size > EXACT_CAP:
            raise ExactTooLarge(f"exact cover limited to {EXACT_CAP} points, got {subset.size}")
        return _exact_cover(space, subset, r)
    raise ValidationError(f"unknown covering method {method!r}")


# -- scale grids and fits ---------------------------------------------------

def default_scale_grid(space):
    """r = 2^-2 .. 2^-10 clipped to [min positive distance, diameter]."""
    lo, hi = space.min_positive_distance, space.diameter
    return [2.0 ** -m for m in range(2, 11) if lo <= 2.0 ** -m <= hi]


def default_spectrum_grid(space, theta):
    """R = 2^-1 .. 2^-10 with R <= diameter/2 and R^(1/theta) >= min positive distance.

    Balls with R > diameter/2 can swallow the whole space from every center,
    which flattens the small end of the log-log fit.
    """
    lo, hi = space.min_positive_distance, space.diameter / 2
    return [2.0 ** -m for m in range(1, 11)
            if 2.0 ** -m <= hi and (2.0 ** -m) ** (1.0 / theta) >= lo]


def _fit(xs, counts):
    """OLS slope of log(count) on xs; returns (slope, max abs residual)."""
    y = np.log(np.asarray(counts, dtype=np.float64))
    x = np.asarray(xs, dtype=np.float64)
    if np.all(y == y[0]):
        return 0.0, 0.0
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, icpt), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * x + icpt)
    return float(slope), float(np.max(np.abs(resid)))


def estimate_minkowski(space, scale_grid=None):
    """Slope of log N_r(X) against log(1/r)."""
    n = len(space)
    if n <= 1:
        grid = sorted(scale_grid or [2.0 ** -m for m in range(2, 11)], reverse=True)
        return DimensionEstimate(0.0, [(r, n) for r in grid], 0.0)
    grid = default_scale_grid(space) if scale_grid is None else list(scale_grid)
    grid = sorted(set(float(r) for r in grid), reverse=True)
    if len(grid) < MIN_SCALES:
        raise InsufficientScales(f"need at least {MIN_SCALES} scales, got {len(grid)}")
    if grid[-1] <= 0:
        raise ValidationError("scales must be positive")
    allpts = np.arange(n)
    counts = [greedy_cover_size(space, allpts, r) for r in grid]
    slope, resid = _fit([-math.log(r) for r in grid], counts)
    return DimensionEstimate(max(slope, 0.0), list(zip(grid, counts)), resid)


def _check_theta(theta):
    if not 0.0 < theta < 1.0:
        raise ThetaOutOfRange(f"theta must lie in (0, 1), got {theta}")


def estimate_assouad_spectrum(space, theta, R_grid=None):
    """Slope of log sup_x N_{R^(1/theta)}(B(x, R)) against log(R / R^(1/theta))."""
    _check_theta(theta)
    n = len(space)
    if n <= 1:
        grid = sorted(R_grid or [2.0 ** -m for m in range(1, 11)], reverse=True)
        return DimensionEstimate(0.0, [(R, n) for R in grid], 0.0,
                                 what="assouad_spectrum", theta=theta)
    grid = default_spectrum_grid(space, theta) if R_grid is None else list(R_grid)
    grid = sorted(set(float(R) for R in grid), reverse=True)
    if any(not 0.0 < R < 1.0 for R in grid):
        raise ValidationError("every R must lie in (0, 1)")
    if len(grid) < MIN_SCALES:
        raise InsufficientScales(f"need at least {MIN_SCALES} scales, got {len(grid)}")
    counts = [kernels.sup_ball_cover(space.dist, R, R ** (1.0 / theta))[0] for R in grid]
    xs = [(1.0 - 1.0 / theta) * math.log(R) for R in grid]
    slope, resid = _fit(xs, counts)
    return DimensionEstimate(max(slope, 0.0), list(zip(grid, counts)), resid,
                             what="assouad_spectrum", theta=theta)


def default_lambdas(theta):
    return (1.0, 3.0 ** theta, 2.0, 4.0, 8.0, 16.0, 32.0)


def estimate_quasidoubling_constant(space, theta, delta, radii=None, lambdas=None,
                                    warn=True):
    """Smallest C >= 1 making every sampled ball satisfy the quasidoubling cover bound.

    A sample is (R, lam) with lam * R < 1; the ball radius is lam * R and the
    cover radius R^(1/theta).  For each sample the sup over centers is taken
    and recorded as a witness.
    """
    _check_theta(theta)
    if delta <= 0:
        raise ValidationError("delta must be positive")
    if warn and len(space) > 1:
        try:
            spec = estimate_assouad_spectrum(space, theta)
            if delta <= spec.value:
                warnings.warn(f"delta={delta} does not exceed the estimated "
                              f"theta-Assouad spectrum {spec.value:.3f}", stacklevel=2)
        except InsufficientScales:
            pass
    radii = [2.0 ** -m for m in range(1, 11)] if radii is None else list(radii)
    lambdas = default_lambdas(theta) if lambdas is None else list(lambdas)
    est = QuasidoublingEstimate(theta, delta, 1.0)
    ratio_max = 1.0
    for R in sorted(set(float(R) for R in radii), reverse=True):
        for lam in lambdas:
            lam = float(lam)
            if not 0.0 < lam * R < 1.0:
                continue
            size, x = kernels.sup_ball_cover(space.dist, lam * R, R ** (1.0 / theta))
            est.witnesses.append({"x": int(x), "R": R, "lambda": lam, "cover_size": int(size)})
            denom = lam ** delta * R ** ((1.0 - 1.0 / theta) * delta)
            ratio_max = max(ratio_max, size / denom)
    est.C = ratio_max
    # nudge past rounding so every witness re-validates
    while not est.validate():
        est.C = float(np.nextafter(est.C, np.inf))
    return est
