"""Exception hierarchy.

Every error raised by the library derives from :class:`RelaxError`. The three
intermediate classes group errors by how the CLI reports them (exit codes 1, 2
and 3 respectively).
"""


class RelaxError(Exception):
    """Base class for all library errors."""


class UsageError(RelaxError):
    """Malformed input: bad grids, unparsable expressions."""


class DomainError(RelaxError):
    """Input outside the admissible domain of an operation."""


class NumericError(RelaxError):
    """A numerical evaluation failed or a hypothesis could not be met."""


class BadGrid(UsageError):
    pass


class ParseError(UsageError):
    def __init__(self, offset, expected, source=""):
        self.offset = offset
        self.expected = frozenset(expected)
        self.source = source
        exp = ", ".join(sorted(self.expected))
        super().__init__(f"parse error at offset {offset}: expected one of {{{exp}}}")


class NotSpecialLinear(DomainError):
    def __init__(self, det):
        self.det = det
        super().__init__(f"matrix is not in SL(2): det = {det!r}")


class NonPositiveDeterminant(DomainError):
    def __init__(self, det):
        self.det = det
        super().__init__(f"determinant must be positive, got {det!r}")


class NegativeGap(DomainError):
    def __init__(self, t):
        self.t = t
        super().__init__(f"gap must be nonnegative, got {t!r}")


class NegativeGridPoint(DomainError):
    pass


class NotEven(DomainError):
    def __init__(self, t, residual):
        self.t = t
        self.residual = residual
        super().__init__(f"profile is not even: |f(t) - f(-t)| = {residual:.3g} at t = {t:.6g}")


class OutsideGrid(DomainError):
    def __init__(self, t, t_max):
        self.t = t
        self.t_max = t_max
        super().__init__(f"gap {t!r} lies outside the envelope grid (max {t_max!r})")


class EvalError(NumericError):
    def __init__(self, t, reason):
        self.t = t
        self.reason = reason
        super().__init__(f"evaluation failed at t = {t!r}: {reason}")


class UnboundedBelowSuspected(NumericError):
    pass
