"""Deterministic and seeded test spaces.

Families: ``interval`` (evenly spaced points on [0, 1]), ``cantor``
(left endpoints of the middle-thirds construction), ``star`` (a center plus
arms at distance 2^-i, a non-doubling family as the arm count grows),
``gw_tree`` (critical Galton-Watson tree with geometric(1/2) offspring,
conditioned on its size, graph metric) and ``snowflake_of`` (d -> d^alpha).
"""
from collections import deque
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .errors import BadParameters
from .metric_space import validate_space

FAMILIES = ("interval", "cantor", "star", "gw_tree", "snowflake_of")
PRNG = "numpy.PCG64/SeedSequence"
MAX_CANTOR_DEPTH = 10
GW_MAX_ATTEMPTS = 10_000


@dataclass
class GeneratorSpec:
    family: str
    size: int = None  # interval points / gw_tree vertices
    depth: int = None  # cantor
    arms: int = None  # star
    seed: int = 0
    alpha: float = 1.0  # snowflake_of exponent

    def to_json(self):
        d = asdict(self)
        d["prng"] = PRNG
        return d


def interval(m):
    if m is None or m < 1:
        raise BadParameters("interval needs size >= 1")
    x = np.linspace(0.0, 1.0, m) if m > 1 else np.zeros(1)
    return validate_space(np.abs(x[:, None] - x[None, :]), [f"x{i}" for i in range(m)])


def cantor_points(depth):
    pts = [Fraction(0)]
    for _ in range(depth):
        pts = [p / 3 for p in pts] + [Fraction(2, 3) + p / 3 for p in pts]
    return sorted(pts)


def cantor(depth):
    if depth is None or not 0 <= depth <= MAX_CANTOR_DEPTH:
        raise BadParameters(f"cantor depth must lie in [0, {MAX_CANTOR_DEPTH}]")
    pts = cantor_points(depth)
    D = [[float(abs(a - b)) for b in pts] for a in pts]
    return validate_space(D, [str(p) for p in pts])


def star(arms):
    if arms is None or arms < 1:
        raise BadParameters("star needs arms >= 1")
    n = arms + 1
    D = np.zeros((n, n))
    for i in range(1, n):
        D[0, i] = D[i, 0] = 2.0 ** -i
        for j in range(i + 1, n):
            D[i, j] = D[j, i] = 2.0 ** -i + 2.0 ** -j
    return validate_space(D, ["c"] + [f"a{i}" for i in range(1, n)])


def _gw_attempt(rng, v):
    """One critical geometric(1/2) GW tree, abandoned once it exceeds v vertices."""
    parent = [-1]
    queue = deque([0])
    while queue:
        u = queue.popleft()
        kids = int(rng.geometric(0.5)) - 1  # support {0, 1, ...}, mean 1
        if len(parent) + kids > v:
            return None
        for _ in range(kids):
            parent.append(u)
            queue.append(len(parent) - 1)
    return parent if len(parent) == v else None


def tree_distances(parent):
    n = len(parent)
    adj = [[] for _ in range(n)]
    for c, p in enumerate(parent):
        if p >= 0:
            adj[c].append(p)
            adj[p].append(c)
    D = np.zeros((n, n))
    for s in range(n):
        seen = [-1] * n
        seen[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for w in adj[u]:
                if seen[w] < 0:
                    seen[w] = seen[u] + 1
                    q.append(w)
        D[s] = seen
    return D


def gw_tree(v, seed, max_attempts=GW_MAX_ATTEMPTS):
    if v is None or v < 1:
        raise BadParameters("gw_tree needs size >= 1")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    for _ in range(max_attempts):
        parent = _gw_attempt(rng, v)
        if parent is not None:
            return validate_space(tree_distances(parent), [f"v{i}" for i in range(v)])
    raise BadParameters(f"no GW tree with {v} vertices after {max_attempts} attempts (seed {seed})")


def snowflake_of(space, alpha):
    """The space (X, d^alpha); a metric again for 0 < alpha <= 1."""
    if not 0.0 < alpha <= 1.0:
        raise BadParameters(f"snowflake exponent must lie in (0, 1], got {alpha}")
    D = np.asarray(space.dist)
    return validate_space(D if alpha == 1.0 else D ** alpha, space.labels)


def gen_space(spec, base=None):
    """Build the space described by ``spec``; ``base`` is the input for snowflake_of."""
    f = spec.family
    if f == "interval":
        return interval(spec.size)
    if f == "cantor":
        return cantor(spec.depth)
    if f == "star":
        return star(spec.arms)
    if f == "gw_tree":
        return gw_tree(spec.size, spec.seed)
    if f == "snowflake_of":
        if base is None:
            raise BadParameters("snowflake_of needs an input space")
        return snowflake_of(base, spec.alpha)
    raise BadParameters(f"unknown family {f!r}; choose from {FAMILIES}")
