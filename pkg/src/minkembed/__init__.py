"""Weak snowflake embeddings of finite metric spaces of finite Minkowski dimension.

Typical use::

    from minkembed import generators, metric_space, dimension, params, embedding, verification

    space, _ = metric_space.normalize_diameter(generators.interval(8))
    C = dimension.estimate_quasidoubling_constant(space, 0.5, 1.2).C
    p = params.strict_params(0.75, 0.5, 1.2, C, diameter=space.diameter)
    emb = embedding.build_embedding(space, p)
    report = verification.distortion_report(space, emb)
"""
from .dimension import (covering_number, estimate_assouad_spectrum, estimate_minkowski,
                        estimate_quasidoubling_constant)
from .embedding import Embedding, build_embedding
from .generators import GeneratorSpec, gen_space
from .kernels import BACKEND
from .metric_space import FiniteMetricSpace, normalize_diameter, validate_space
from .params import EmbeddingParams, practical_params, solve_tau, strict_params
from .verification import distortion_report, lipschitz_norm

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "Embedding", "EmbeddingParams", "FiniteMetricSpace", "GeneratorSpec",
    "build_embedding", "covering_number", "distortion_report", "estimate_assouad_spectrum",
    "estimate_minkowski", "estimate_quasidoubling_constant", "gen_space", "lipschitz_norm",
    "normalize_diameter", "practical_params", "solve_tau", "strict_params", "validate_space",
]
