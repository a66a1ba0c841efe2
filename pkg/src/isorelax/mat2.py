"""2x2 matrix arithmetic on SL(2) and the conversions between matrices,
singular values and the singular value gap ``t = lambda_1 - lambda_2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import NegativeGap, NonPositiveDeterminant, NotSpecialLinear

SL2_TOL = 1e-9


@dataclass(frozen=True)
class Mat2:
    """Real 2x2 matrix ``[[a11, a12], [a21, a22]]``."""

    a11: float
    a12: float
    a21: float
    a22: float

    def __post_init__(self):
        for name in ("a11", "a12", "a21", "a22"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} is not finite: {v!r}")
            object.__setattr__(self, name, v)

    @classmethod
    def from_array(cls, a) -> Mat2:
        a = np.asarray(a, dtype=float)
        return cls(a[0, 0], a[0, 1], a[1, 0], a[1, 1])

    @classmethod
    def diag(cls, d1, d2) -> Mat2:
        return cls(d1, 0.0, 0.0, d2)

    @classmethod
    def identity(cls) -> Mat2:
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def rotation(cls, theta) -> Mat2:
        c, s = math.cos(theta), math.sin(theta)
        return cls(c, -s, s, c)

    def to_array(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a21, self.a22]])

    def __matmul__(self, other: Mat2) -> Mat2:
        return Mat2(
            self.a11 * other.a11 + self.a12 * other.a21,
            self.a11 * other.a12 + self.a12 * other.a22,
            self.a21 * other.a11 + self.a22 * other.a21,
            self.a21 * other.a12 + self.a22 * other.a22,
        )

    def __add__(self, other: Mat2) -> Mat2:
        return Mat2(self.a11 + other.a11, self.a12 + other.a12,
                    self.a21 + other.a21, self.a22 + other.a22)

    def scale(self, s) -> Mat2:
        return Mat2(s * self.a11, s * self.a12, s * self.a21, s * self.a22)

    def cof(self) -> Mat2:
        """Cofactor matrix, ``det(F) F^{-T}`` for invertible ``F``."""
        return Mat2(self.a22, -self.a21, -self.a12, self.a11)

    def inverse(self) -> Mat2:
        d = det(self)
        if d == 0.0:
            raise ZeroDivisionError("singular matrix")
        return Mat2(self.a22 / d, -self.a12 / d, -self.a21 / d, self.a11 / d)

    def transpose(self) -> Mat2:
        return Mat2(self.a11, self.a21, self.a12, self.a22)


class SingularPair(NamedTuple):
    sigma_max: float
    sigma_min: float


def det(F: Mat2) -> float:
    return F.a11 * F.a22 - F.a12 * F.a21


def frobenius_norm_sq(F: Mat2) -> float:
    return F.a11 ** 2 + F.a12 ** 2 + F.a21 ** 2 + F.a22 ** 2


def inner(A: Mat2, B: Mat2) -> float:
    """Frobenius inner product ``<A, B> = tr(A^T B)``."""
    return A.a11 * B.a11 + A.a12 * B.a12 + A.a21 * B.a21 + A.a22 * B.a22


def assert_sl2(F: Mat2, tol: float = SL2_TOL) -> Mat2:
    if not tol > 0:
        raise ValueError("tol must be positive")
    d = det(F)
    if not abs(d - 1.0) <= tol:
        raise NotSpecialLinear(d)
    return F


def singular_values(F: Mat2) -> SingularPair:
    """Closed-form singular values of a matrix with positive determinant.

    Uses ``sigma_max = (sqrt(|F|^2 + 2 det F) + sqrt(|F|^2 - 2 det F)) / 2``
    and ``sigma_min = det F / sigma_max``. The two radicands are evaluated as
    the sums of squares ``(a11 +- a22)^2 + (a12 -+ a21)^2``, which avoids the
    cancellation in ``|F|^2 - 2 det F`` near conformal matrices.
    """
    d = det(F)
    if not d > 0:
        raise NonPositiveDeterminant(d)
    smax = 0.5 * (_plus_radius(F) + _minus_radius(F))
    return SingularPair(smax, d / smax)


def _plus_radius(F):
    return math.hypot(F.a11 + F.a22, F.a12 - F.a21)


def _minus_radius(F):
    # sqrt(|F|^2 - 2 det F) = sigma_max - sigma_min, never negative
    return math.hypot(F.a11 - F.a22, F.a12 + F.a21)


def gap(F: Mat2, tol: float = SL2_TOL) -> float:
    """Singular value gap ``sigma_max - sigma_min = sqrt(|F|^2 - 2)`` on SL(2).

    Computed as ``sqrt(|F|^2 - 2 det F)``, equal on SL(2) and free of
    cancellation for small gaps.
    """
    assert_sl2(F, tol)
    return _minus_radius(F)


def conformal_radius(F: Mat2) -> float:
    """``sqrt(|F|^2 - 2 det F)`` for an arbitrary 2x2 matrix."""
    return _minus_radius(F)


def lambda_from_gap(t: float) -> SingularPair:
    if not t >= 0 or not math.isfinite(t):
        raise NegativeGap(t)
    r = math.sqrt(4.0 + t * t)
    return SingularPair(0.5 * (r + t), 0.5 * (r - t))


def representative(t: float) -> Mat2:
    """Diagonal SL(2) matrix whose gap is ``t``."""
    smax, smin = lambda_from_gap(t)
    return Mat2.diag(smax, smin)


def random_sl2(rng: np.random.Generator, log_stretch_scale: float = 1.5) -> Mat2:
    """Random ``R1 diag(l, 1/l) R2`` with ``log l`` uniform in ``[-scale, scale]``."""
    th1, th2 = rng.uniform(0.0, 2.0 * math.pi, size=2)
    lam = math.exp(rng.uniform(-log_stretch_scale, log_stretch_scale))
    return Mat2.rotation(th1) @ Mat2.diag(lam, 1.0 / lam) @ Mat2.rotation(th2)
