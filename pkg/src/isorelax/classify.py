"""Generalized convexity of isotropic energies on SL(2).

For an objective, isotropic energy on SL(2) rank-one convexity,
quasiconvexity, polyconvexity and convexity coincide, and all of them are
equivalent to convexity of the even gap profile ``phi_tilde`` on the line,
or equivalently to ``phi`` being nondecreasing and convex on ``[0, inf)``.
Both scalar criteria are checked here on a grid; the results describe the
sampled restriction, not the continuum function.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadGrid
from .models import EnergyModel
from .scalar import Grid, SampledFn, sample

DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class ClassificationReport:
    rank_one_convex: bool
    polyconvex: bool
    quasiconvex: bool
    convex_on_sl2: bool
    min_second_difference: float
    min_forward_difference: float
    witness_t: float
    grid_used: Grid
    tolerance: float
    # the two scalar criteria separately (full-line convexity, half-line monotone convexity)
    criterion_full_line: bool = True
    criterion_half_line: bool = True

    def to_dict(self) -> dict:
        return {
            "rank_one_convex": self.rank_one_convex,
            "polyconvex": self.polyconvex,
            "quasiconvex": self.quasiconvex,
            "convex_on_sl2": self.convex_on_sl2,
            "min_second_difference": self.min_second_difference,
            "min_forward_difference": self.min_forward_difference,
            "witness_t": self.witness_t,
            "grid": {"t_min": self.grid_used.t_min, "t_max": self.grid_used.t_max,
                     "n": len(self.grid_used)},
            "tolerance": self.tolerance,
            "criterion_full_line": self.criterion_full_line,
            "criterion_half_line": self.criterion_half_line,
        }


def second_differences(f: SampledFn) -> np.ndarray:
    """Divided second differences ``f[t_{i-1}, t_i, t_{i+1}]`` (= f''/2 for smooth f)."""
    t, v = f.t, f.values
    d1 = np.diff(v) / np.diff(t)
    return np.diff(d1) / (t[2:] - t[:-2])


def is_convex_scalar(f: SampledFn, tol: float):
    """Returns ``(flag, min_second_difference, witness_t)``."""
    if len(f.grid) < 3:
        raise BadGrid("need at least 3 points")
    d2 = second_differences(f)
    i = int(np.argmin(d2))
    return bool(d2[i] >= -tol), float(d2[i]), float(f.t[i + 1])


def is_nondecreasing(f: SampledFn, tol: float):
    """Returns ``(flag, min_forward_difference, witness_t)``.

    Forward differences are raw value differences; the flag allows each of
    them to dip by ``tol`` times the local spacing.
    """
    if len(f.grid) < 3:
        raise BadGrid("need at least 3 points")
    if f.t[0] < 0:
        raise BadGrid("is_nondecreasing needs a nonnegative grid")
    d = np.diff(f.values)
    h = np.diff(f.t)
    i = int(np.argmin(d / h))
    return bool(np.all(d >= -tol * h)), float(d[i]), float(f.t[i])


def classify_energy(model: EnergyModel, grid: Grid, tol: float = DEFAULT_TOL) -> ClassificationReport:
    """Check both scalar criteria and report the common verdict.

    ``tol`` is relative to the value scale ``max |phi_tilde|`` on the grid.
    A nonnegative grid is mirrored for the full-line criterion.
    """
    if grid.t_min >= 0:
        full = grid.reflected()
    elif grid.t_max > 0:
        full = grid
    else:
        raise BadGrid("grid must be symmetric about 0 or nonnegative")
    half = full.nonnegative()

    ft = sample(model.phi_tilde, full)
    fh = sample(model.phi, half)
    scale = max(float(np.max(np.abs(ft.values))), np.finfo(float).tiny)
    abs_tol = tol * scale

    conv_full, d2_full, w_full = is_convex_scalar(ft, abs_tol)
    conv_half, d2_half, w_half = is_convex_scalar(fh, abs_tol)
    mono, d1, w_mono = is_nondecreasing(fh, abs_tol)
    flag = conv_full and conv_half and mono

    # worst violation: the criterion that fails most, measured on its own scale
    if d2_full <= d2_half:
        d2, witness = d2_full, w_full
    else:
        d2, witness = d2_half, w_half
    if not mono and (conv_full and conv_half):
        witness = w_mono

    return ClassificationReport(flag, flag, flag, flag, d2, d1, witness, full, tol,
                                conv_full, conv_half and mono)
