"""Backend selection for the hot loops.

The compiled extension is used when it imports; set ``MINKEMBED_PURE=1`` to
force the numpy fallback.  ``BACKEND`` names the active one and
:func:`get_backend` returns either module explicitly (tests and the
benchmark use it to compare the two).
"""
import os

import numpy as np

from . import _kernels_py

try:
    from . import _kernels_c
except ImportError:  # extension not built
    _kernels_c = None

__all__ = ["BACKEND", "available_backends", "get_backend", "greedy_net",
           "farthest_order", "fp_cover_count", "sup_ball_cover",
           "greedy_coloring", "pair_distances", "triangle_violation"]


def available_backends():
    return ["python"] + (["cython"] if _kernels_c is not None else [])


def get_backend(name=None):
    if name is None:
        name = BACKEND
    if name == "python":
        return _kernels_py
    if name == "cython":
        if _kernels_c is None:
            raise ImportError("compiled kernels are not built")
        return _kernels_c
    raise ValueError(f"unknown backend {name!r}")


if _kernels_c is not None and os.environ.get("MINKEMBED_PURE", "") in ("", "0"):
    BACKEND = "cython"
else:
    BACKEND = "python"

_impl = get_backend(BACKEND)


def _mat(D):
    return np.ascontiguousarray(D, dtype=np.float64)


def greedy_net(D, order, r):
    return _impl.greedy_net(_mat(D), np.asarray(order, dtype=np.int64), float(r))


def farthest_order(D, start=0):
    return _impl.farthest_order(_mat(D), int(start))


def fp_cover_count(D, subset, r):
    return int(_impl.fp_cover_count(_mat(D), np.asarray(subset, dtype=np.int64), float(r)))


def sup_ball_cover(D, ball_radius, cover_radius):
    return _impl.sup_ball_cover(_mat(D), float(ball_radius), float(cover_radius))


def greedy_coloring(D, members, sep):
    return _impl.greedy_coloring(_mat(D), np.asarray(members, dtype=np.int64), float(sep))


def pair_distances(X):
    return _impl.pair_distances(_mat(X))


def triangle_violation(D, tol=0.0):
    return _impl.triangle_violation(_mat(D), float(tol))
