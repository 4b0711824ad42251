"""Finite metric spaces stored as exact distance matrices."""
import csv
import hashlib
import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .errors import (AsymmetryError, DegenerateSpace, DuplicatePoints, EmptySet,
                     NegativeDistanceError, NonFiniteError, NonzeroDiagonal,
                     NotSquareError, TriangleViolation, ValidationError)

SCHEMA = 1


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """A labelled point set with a validated, read-only distance matrix.

    Build instances through :func:`validate_space`; the constructor itself
    does not check the metric axioms.
    """

    labels: tuple
    dist: np.ndarray

    def __post_init__(self):
        self.dist.setflags(write=False)

    def __len__(self):
        return self.dist.shape[0]

    @cached_property
    def diameter(self):
        return float(self.dist.max()) if len(self) else 0.0

    @cached_property
    def min_positive_distance(self):
        pos = self.dist[self.dist > 0]
        return float(pos.min()) if pos.size else 0.0

    @cached_property
    def fingerprint(self):
        """sha256 of the float64 matrix bytes; used to tie embeddings to their space."""
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.dist, dtype="<f8").tobytes())
        return h.hexdigest()

    def to_json(self):
        return {"schema": SCHEMA, "labels": list(self.labels),
                "distances": self.dist.tolist()}


def validate_space(matrix, labels=None, tol=1e-12, merge_duplicates=False):
    """Check the metric axioms and return a :class:`FiniteMetricSpace`.

    Symmetry and the triangle inequality are checked with additive slack
    ``tol``.  Distinct points at distance zero raise :class:`DuplicatePoints`
    unless ``merge_duplicates`` is set, in which case the first occurrence
    of each duplicate group is kept.
    """
    D = np.array(matrix, dtype=np.float64)
    if D.ndim == 1 and D.size == 0:
        D = D.reshape(0, 0)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise NotSquareError(f"distance matrix must be square, got shape {D.shape}")
    n = D.shape[0]
    if labels is None:
        labels = [str(i) for i in range(n)]
    labels = tuple(labels)
    if len(labels) != n:
        raise ValidationError(f"{len(labels)} labels for {n} points")
    if not np.all(np.isfinite(D)):
        i, j = np.argwhere(~np.isfinite(D))[0]
        raise NonFiniteError(f"non-finite distance at ({i}, {j})")

    diag = np.flatnonzero(np.diagonal(D) != 0)
    if diag.size:
        raise NonzeroDiagonal(int(diag[0]), float(D[diag[0], diag[0]]))
    neg = np.argwhere(D < 0)
    if neg.size:
        i, j = neg[0]
        raise NegativeDistanceError(int(i), int(j), float(D[i, j]))
    asym = np.argwhere(np.abs(D - D.T) > tol)
    if asym.size:
        i, j = asym[0]
        raise AsymmetryError(int(i), int(j), float(D[i, j]), float(D[j, i]))

    bad = kernels.triangle_violation(D, tol)
    if bad is not None:
        raise TriangleViolation(*bad)

    off = D + np.eye(n)
    dup = np.argwhere(np.triu(off == 0, 1))
    if dup.size:
        if not merge_duplicates:
            i, j = dup[0]
            raise DuplicatePoints(int(i), int(j))
        keep = [i for i in range(n) if not np.any(off[i, :i] == 0)]
        D = D[np.ix_(keep, keep)]
        labels = tuple(labels[i] for i in keep)

    return FiniteMetricSpace(labels, D)


def normalize_diameter(space):
    """Rescale so the diameter is exactly 1/2.

    Returns ``(normalized_space, scale)`` with ``scale = 1 / (2 * diameter)``.
    Distances are divided by ``2 * diameter`` rather than multiplied by the
    scale so the new maximum is 0.5 exactly and normalization is idempotent.
    """
    diam = space.diameter
    if diam <= 0:
        raise DegenerateSpace("all points coincide (diameter 0)")
    D = np.asarray(space.dist) / (2.0 * diam)
    return FiniteMetricSpace(space.labels, D), 1.0 / (2.0 * diam)


def ball_members(space, center, radius):
    """Indices of the closed ball B(center, radius), ascending."""
    return np.flatnonzero(space.dist[center] <= radius)


def set_distance(space, x, S):
    S = np.asarray(S, dtype=np.int64)
    if S.size == 0:
        raise EmptySet("set_distance needs a nonempty set")
    return float(space.dist[x, S].min())


# -- file formats -----------------------------------------------------------

def space_from_json(obj, **kw):
    if not isinstance(obj, dict) or "distances" not in obj:
        raise ValidationError("space JSON needs a 'distances' field")
    dist = obj["distances"]
    labels = obj.get("labels")
    arr = np.asarray(dist, dtype=np.float64)
    if arr.ndim == 1:
        n = int(round(np.sqrt(arr.size)))
        if n * n != arr.size:
            raise ValidationError("flat distance list is not a square matrix")
        arr = arr.reshape(n, n)
    return validate_space(arr, labels, **kw)


def read_space(path, **kw):
    """Read a space from ``.json`` or ``.csv`` (header row of labels)."""
    path = str(path)
    if path.endswith(".csv"):
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows:
            raise ValidationError(f"{path}: empty CSV")
        labels = [s.strip() for s in rows[0]]
        return validate_space([[float(v) for v in row] for row in rows[1:] if row], labels, **kw)
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as e:
            raise ValidationError(f"{path}: not valid JSON ({e})") from None
    return space_from_json(obj, **kw)


def write_space(space, path):
    path = str(path)
    if path.endswith(".csv"):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(space.labels)
            for row in space.dist.tolist():
                w.writerow([repr(v) for v in row])
        return
    with open(path, "w") as fh:
        json.dump(space.to_json(), fh)
        fh.write("\n")
