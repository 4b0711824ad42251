"""Scalar parameters of the construction: tau, the scales r_k, n0, N_n and M_n."""
import json
import math
import sys
import warnings
from dataclasses import asdict, dataclass
from fractions import Fraction

import mpmath

from .errors import BadParameters, BudgetOverflow, NoFeasibleTau, ValidationError

DEFAULT_BUDGET_CAP = 2 ** 20
SCHEMA = 1


class UnderflowWarning(RuntimeWarning):
    pass


def _log(x, base):
    return math.log(x) if base is None else math.log(x, base)


def tau_conditions(tau, epsilon, theta, delta, C, log_base=None):
    """Evaluate the five admissibility inequalities for tau; returns name -> bool.

    ``log_base=None`` means natural logarithms.  The base enters the
    exponential condition (tau2); in (tau4) it cancels.
    """
    t_log = _log(1.0 / tau, log_base)
    return {
        "tau0": tau < min(2.0 ** (-2.0 * epsilon), 1.0 - epsilon),
        "tau1": tau ** (2.0 * (theta - 1.0)) > 2.0,
        "tau2": math.exp(-2.0 * tau * t_log) <= 1.0 - tau * t_log,
        "tau3": 1.0 - 4.0 * tau ** (2.0 * epsilon - 1.0) >= 0.5,
        "tau4": -7.0 * _log(7.0 * tau, log_base)
        > max(_log(40.0 ** delta * C * C, log_base), _log(21.0, log_base)),
    }


def tau_caps(epsilon, theta, delta, C):
    """Closed-form strict upper bounds on tau from (tau0), (tau1), (tau3), (tau4)."""
    return {
        "tau0": min(2.0 ** (-2.0 * epsilon), 1.0 - epsilon),
        "tau1": 2.0 ** (1.0 / (2.0 * (theta - 1.0))),
        # 4 tau^(2eps-1) <= 1/2  <=>  tau <= 8^(-1/(2eps-1))
        "tau3": math.exp(-math.log(8.0) / (2.0 * epsilon - 1.0)),
        "tau4": math.exp(-max(math.log(40.0 ** delta * C * C), math.log(21.0)) / 7.0) / 7.0,
    }


def _check_ranges(epsilon, theta, delta, C):
    if not 0.5 < epsilon < 1.0:
        raise BadParameters(f"epsilon must lie in (1/2, 1), got {epsilon}")
    if not 0.0 < theta < 1.0:
        raise BadParameters(f"theta must lie in (0, 1), got {theta}")
    if delta <= 0:
        raise BadParameters(f"delta must be positive, got {delta}")
    if C < 1:
        raise BadParameters(f"C must be >= 1, got {C}")


def solve_tau(epsilon, theta, delta, C, grid_step=1e-3, log_base=None):
    """Largest grid value tau = m * grid_step < 1/2 meeting all five conditions."""
    _check_ranges(epsilon, theta, delta, C)
    if grid_step <= 0:
        raise BadParameters("grid_step must be positive")
    m = math.ceil(0.5 / grid_step)
    while m >= 1:
        tau = round(m * grid_step, 15)
        if 0 < tau < 0.5 and all(tau_conditions(tau, epsilon, theta, delta, C, log_base).values()):
            return tau
        m -= 1
    caps = tau_caps(epsilon, theta, delta, C)
    cap = min(caps.values())
    raise NoFeasibleTau(
        f"no admissible tau on the grid with step {grid_step}; analytic cap "
        f"tau < {cap:.6g} (binding: {min(caps, key=caps.get)}); shrink grid_step",
        analytic_cap=cap, caps=caps)


def scale_radius(tau, k):
    """r_k = tau^(2k); log-space for large |k|, warns with UnderflowWarning below the normal range."""
    if abs(k) <= 64:
        r = tau ** (2 * k)
    else:
        r = math.exp(2 * k * math.log(tau))
    if r < sys.float_info.min:
        warnings.warn(f"r_{k} = tau^{2 * k} underflows ({r!r})", UnderflowWarning, stacklevel=2)
    return r


def base_level(tau, diameter):
    """Largest integer k with tau^(2k) >= diameter."""
    if not 0.0 < diameter < 1.0:
        raise BadParameters(f"diameter must lie in (0, 1), got {diameter}")
    k = math.floor(math.log(diameter) / (2.0 * math.log(tau)))
    while scale_radius(tau, k) < diameter:
        k -= 1
    while scale_radius(tau, k + 1) >= diameter:
        k += 1
    return k


def color_budget(theta, delta, C, tau, n, cap=DEFAULT_BUDGET_CAP):
    """N_n = ceil(3^delta C tau^(2 n delta (theta - 1))); returns (N_n, log10 N_n-value).

    Evaluated at 60 significant digits from the exact float inputs so the
    ceiling is not at the mercy of rounding near integers.
    """
    with mpmath.workdps(60):
        fr = Fraction(2 * n) * Fraction(delta) * (Fraction(theta) - 1)
        expo = mpmath.mpf(fr.numerator) / fr.denominator
        val = mpmath.power(3, mpmath.mpf(delta)) * mpmath.mpf(C) * mpmath.power(mpmath.mpf(tau), expo)
        lg = float(mpmath.log10(val))
        if cap is not None and val > cap:
            raise BudgetOverflow(lg, cap)
        return int(mpmath.ceil(val)), lg


def vector_dimension(theta, delta, n):
    """M_n = ceil(6 delta (2 theta + n (1 - theta)) / theta) + 1, exact in rationals."""
    th, de = Fraction(theta), Fraction(delta)
    return math.ceil(6 * de * (2 * th + n * (1 - th)) / th) + 1


@dataclass
class EmbeddingParams:
    epsilon: float
    theta: float
    delta: float
    C: float
    tau: float
    n0: int
    n: int
    N_colors: int
    M: int
    mode: str = "strict"
    log_base: float = None
    budget_log10: float = None

    def radius(self, k):
        return scale_radius(self.tau, k)

    @property
    def levels(self):
        return range(self.n0, self.n + 1)

    @property
    def width(self):
        return 2 * self.N_colors * self.M

    def to_json(self):
        d = asdict(self)
        d["schema"] = SCHEMA
        return d

    @classmethod
    def from_json(cls, obj):
        obj = {k: v for k, v in obj.items() if k != "schema"}
        return cls(**obj)


def strict_params(epsilon, theta, delta, C, diameter=0.5, n=None, grid_step=1e-3,
                  log_base=None, budget_cap=DEFAULT_BUDGET_CAP):
    """Every scalar derived from (epsilon, theta, delta, C, n, diameter); n defaults to n0 + 1."""
    tau = solve_tau(epsilon, theta, delta, C, grid_step, log_base)
    n0 = base_level(tau, diameter)
    if n is None:
        n = n0 + 1
    if n <= n0:
        raise BadParameters(f"n must exceed n0 = {n0}, got {n}")
    N, lg = color_budget(theta, delta, C, tau, n, budget_cap)
    return EmbeddingParams(epsilon, theta, delta, C, tau, n0, n, N,
                           vector_dimension(theta, delta, n), "strict", log_base, lg)


def practical_params(epsilon, theta, delta, C, tau, diameter=0.5, n=None, N_colors=None,
                     M=None, budget_cap=DEFAULT_BUDGET_CAP):
    """User-chosen tau (and optionally n, N_colors, M); anything missing comes from the formulas.

    ``N_colors=None`` resolves to the formula value, or, when that overflows
    the cap, is left as 0 so the builder substitutes the observed greedy
    color count.
    """
    if not 0.0 < tau < 0.5:
        raise BadParameters(f"tau must lie in (0, 1/2), got {tau}")
    if not 0.0 < epsilon < 1.0 or not 0.0 < theta < 1.0 or delta <= 0 or C < 1:
        raise BadParameters("epsilon, theta in (0,1); delta > 0; C >= 1 required")
    n0 = base_level(tau, diameter)
    if n is None:
        n = n0 + 1
    if n <= n0:
        raise BadParameters(f"n must exceed n0 = {n0}, got {n}")
    lg = None
    if N_colors is None:
        try:
            N_colors, lg = color_budget(theta, delta, C, tau, n, budget_cap)
        except BudgetOverflow as e:
            N_colors, lg = 0, e.log10_value
    if M is None:
        M = vector_dimension(theta, delta, n)
    if M < 1 or N_colors < 0:
        raise ValidationError("M must be >= 1 and N_colors >= 0")
    return EmbeddingParams(epsilon, theta, delta, C, tau, n0, n, int(N_colors), int(M),
                           "practical", None, lg)


def read_params(path):
    with open(path) as fh:
        return EmbeddingParams.from_json(json.load(fh))
