"""Exception hierarchy.

Two families matter to callers: :class:`ValidationError` covers malformed
input (bad matrices, bad parameters, missing files) and
:class:`MathematicalFailure` covers constructions that are well-posed but
cannot be completed (no admissible tau, color budget exceeded, vector
selection failed).  The CLI maps them to exit codes 1 and 2.
"""


class MinkembedError(Exception):
    """Base class for all package errors."""

    def diagnostics(self):
        return {"error": type(self).__name__, "message": str(self)}


class ValidationError(MinkembedError, ValueError):
    pass


class MathematicalFailure(MinkembedError):
    pass


# -- metric space -----------------------------------------------------------

class NotSquareError(ValidationError):
    pass


class NonFiniteError(ValidationError):
    pass


class AsymmetryError(ValidationError):
    def __init__(self, i, j, dij, dji):
        super().__init__(f"d[{i}][{j}] = {dij!r} but d[{j}][{i}] = {dji!r}")
        self.pair = (i, j)


class NegativeDistanceError(ValidationError):
    def __init__(self, i, j, value):
        super().__init__(f"negative distance d[{i}][{j}] = {value!r}")
        self.pair = (i, j)


class NonzeroDiagonal(ValidationError):
    def __init__(self, i, value):
        super().__init__(f"d[{i}][{i}] = {value!r}, expected 0")
        self.index = i


class TriangleViolation(ValidationError):
    """``d[i][j] > d[i][k] + d[k][j]``; the offending triple is kept on the instance."""

    def __init__(self, i, j, k, excess):
        super().__init__(
            f"triangle inequality fails for ({i}, {j}) via {k}: excess {excess!r}")
        self.triple = (i, j, k)
        self.excess = excess


class DuplicatePoints(ValidationError):
    def __init__(self, i, j):
        super().__init__(f"points {i} and {j} are at distance 0 (pass merge_duplicates=True to merge)")
        self.pair = (i, j)


class DegenerateSpace(ValidationError):
    pass


class EmptySet(ValidationError):
    pass


class SpaceMismatch(ValidationError):
    pass


# -- estimation -------------------------------------------------------------

class ExactTooLarge(ValidationError):
    pass


class InsufficientScales(ValidationError):
    pass


class ThetaOutOfRange(ValidationError):
    pass


class BadParameters(ValidationError):
    pass


# -- construction -----------------------------------------------------------

class NoFeasibleTau(MathematicalFailure):
    def __init__(self, message, analytic_cap=None, caps=None):
        super().__init__(message)
        self.analytic_cap = analytic_cap
        self.caps = caps or {}

    def diagnostics(self):
        d = super().diagnostics()
        d["analytic_cap"] = self.analytic_cap
        d["caps"] = self.caps
        return d


class BudgetOverflow(MathematicalFailure):
    def __init__(self, log10_value, cap):
        super().__init__(
            f"color budget 10^{log10_value:.4f} exceeds cap {cap}")
        self.log10_value = log10_value
        self.cap = cap

    def diagnostics(self):
        d = super().diagnostics()
        d.update(log10_value=self.log10_value, cap=self.cap)
        return d


class BudgetExceeded(MathematicalFailure):
    def __init__(self, level, member, color, budget):
        super().__init__(
            f"level {level}: net point {member} needs color {color} > budget {budget}")
        self.level = level
        self.member = member
        self.color = color
        self.budget = budget

    def diagnostics(self):
        d = super().diagnostics()
        d.update(level=self.level, member=self.member, color=self.color,
                 budget=self.budget)
        return d


class SupportOverlap(MathematicalFailure):
    pass


class LatticeExhausted(MathematicalFailure):
    def __init__(self, count, needed, M):
        super().__init__(
            f"only {count} lattice points fit in the ball in dimension {M}; "
            f"{needed + 1} needed (raise M)")
        self.count = count
        self.needed = needed
        self.M = M

    def diagnostics(self):
        d = super().diagnostics()
        d.update(count=self.count, needed=self.needed, M=self.M)
        return d


class SelectionFailed(MathematicalFailure):
    def __init__(self, message, **info):
        super().__init__(message)
        self.info = info

    def diagnostics(self):
        d = super().diagnostics()
        d.update(self.info)
        return d
