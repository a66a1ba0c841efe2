"""Matrix-level lamination oracle.

Rank-one lines that stay inside SL(2): for rank-one ``H``,
``det(F + sH) = det F + s <cof F, H>`` (the ``s^2 det H`` term vanishes), so
``F + sH`` keeps determinant 1 for every ``s`` exactly when
``<cof F, H> = 0``. Writing ``H = u (x) v`` this reads ``u^T (cof F) v = 0``,
i.e. ``v`` is perpendicular to ``(cof F)^T u``.

Isotropy lets every base point be the diagonal representative of its gap,
so the lamination value is stored as a function of the gap alone. Along a
unit tangent line the gap obeys ``gap^2(F + sH) = gap^2(F) + 2 s <F, H> + s^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BadGrid
from .mat2 import Mat2, assert_sl2, lambda_from_gap
from .models import EnergyModel
from .scalar import Grid, sample

DEFAULT_DIRECTIONS = 8
DEFAULT_S_SAMPLES = 33


@dataclass(frozen=True)
class TangentDirection:
    u: tuple
    v: tuple

    @property
    def H(self) -> Mat2:
        return Mat2(self.u[0] * self.v[0], self.u[0] * self.v[1],
                    self.u[1] * self.v[0], self.u[1] * self.v[1])


@dataclass
class LaminationTable:
    gap_grid: Grid
    values_per_iteration: list
    converged: bool = False
    max_delta_history: list = field(default_factory=list)
    max_det_error: float = 0.0
    discarded_laminates: int = 0

    @property
    def values(self) -> np.ndarray:
        return self.values_per_iteration[-1]

    @property
    def iterations(self) -> int:
        return len(self.values_per_iteration) - 1


def tangent_directions(F: Mat2, count: int) -> list[TangentDirection]:
    """Unit rank-one directions ``u (x) v`` along which ``det`` stays 1.

    ``u = (cos a, sin a)`` for ``count`` angles uniform in ``[0, pi)``.
    """
    assert_sl2(F)
    if count < 1:
        raise ValueError("count must be >= 1")
    C = F.cof()
    out = []
    for j in range(count):
        a = math.pi * j / count
        u = (math.cos(a), math.sin(a))
        w = (C.a11 * u[0] + C.a21 * u[1], C.a12 * u[0] + C.a22 * u[1])
        nw = math.hypot(*w)
        out.append(TangentDirection(u, (-w[1] / nw, w[0] / nw)))
    return out


def _directions_diag(smax, smin, count):
    """Vectorized tangent directions at ``diag(smax, smin)``; arrays of shape (n, d, 2)."""
    a = np.pi * np.arange(count) / count
    u = np.stack([np.cos(a), np.sin(a)], axis=-1)[None, :, :].repeat(smax.size, axis=0)
    # cof(diag(x, y)) = diag(y, x)
    w = np.stack([smin[:, None] * u[..., 0], smax[:, None] * u[..., 1]], axis=-1)
    w /= np.linalg.norm(w, axis=-1, keepdims=True)
    v = np.stack([-w[..., 1], w[..., 0]], axis=-1)
    return u, v


def _s_samples(s_samples, s_max):
    k = np.arange(1, s_samples + 1) / s_samples
    return -s_max * k, s_max * k


def initial_table(model: EnergyModel, gap_grid: Grid) -> LaminationTable:
    if gap_grid.t_min != 0.0:
        raise BadGrid("lamination gap grid must start at 0")
    return LaminationTable(gap_grid, [sample(model.phi, gap_grid).values.copy()])


def laminate_once(table: LaminationTable, directions_per_point: int = DEFAULT_DIRECTIONS,
                  s_samples: int = DEFAULT_S_SAMPLES, s_max: float | None = None) -> LaminationTable:
    """One lamination sweep over every grid point.

    At the representative ``F`` of each gap the new value is the least
    convex combination ``(1 - mu) r(F + s_- H) + mu r(F + s_+ H)`` with
    ``s_- < 0 < s_+`` and ``(1 - mu) s_- + mu s_+ = 0``, where ``r`` is the
    linear interpolant of the previous sweep. Laminates reaching beyond the
    grid are discarded. Returns a new table; the input is left untouched.
    """
    grid = table.gap_grid
    gp = grid.points
    if s_max is None:
        s_max = 0.5 * (grid.t_max - grid.t_min)
    prev = table.values
    r = np.sqrt(4.0 + gp * gp)
    smax, smin = 0.5 * (r + gp), 0.5 * (r - gp)
    u, v = _directions_diag(smax, smin, directions_per_point)
    H11, H12 = u[..., 0] * v[..., 0], u[..., 0] * v[..., 1]
    H21, H22 = u[..., 1] * v[..., 0], u[..., 1] * v[..., 1]

    s_neg, s_pos = _s_samples(s_samples, s_max)
    s_all = np.concatenate([s_neg, s_pos])[None, None, :]
    a11 = smax[:, None, None] + s_all * H11[..., None]
    a12 = s_all * H12[..., None]
    a21 = s_all * H21[..., None]
    a22 = smin[:, None, None] + s_all * H22[..., None]
    det_err = float(np.max(np.abs(a11 * a22 - a12 * a21 - 1.0)))
    g = np.hypot(a11 - a22, a12 + a21)
    outside = g > grid.t_max
    vals = np.interp(g, gp, prev)
    vals[outside] = np.inf

    S = s_samples
    r_neg, r_pos = vals[..., :S], vals[..., S:]
    best = np.full(r_neg.shape[:2], np.inf)
    for k in range(S):
        sm = s_neg[k]
        # chord value at s = 0 through (sm, r_neg[k]) and every (sp, r_pos)
        mu = -sm / (s_pos - sm)
        c = (1.0 - mu)[None, None, :] * r_neg[..., k:k + 1] + mu[None, None, :] * r_pos
        np.minimum(best, c.min(axis=-1), out=best)
    new = np.minimum(prev, best.min(axis=1))

    return LaminationTable(
        grid,
        table.values_per_iteration + [new],
        table.converged,
        table.max_delta_history + [float(np.max(prev - new))],
        max(table.max_det_error, det_err),
        table.discarded_laminates + int(outside.sum()),
    )


def lamination_fixed_point(model: EnergyModel, gap_grid: Grid, max_iters: int = 12,
                           tol: float = 1e-4, directions_per_point: int = DEFAULT_DIRECTIONS,
                           s_samples: int = DEFAULT_S_SAMPLES,
                           s_max: float | None = None) -> LaminationTable:
    """Sweep until the largest pointwise change is at most ``tol``."""
    table = initial_table(model, gap_grid)
    for _ in range(max_iters):
        table = laminate_once(table, directions_per_point, s_samples, s_max)
        if table.max_delta_history[-1] <= tol:
            table.converged = True
            break
    return table


def gap_transport(t: float, H: Mat2, s: float) -> float:
    """Gap of ``F + sH`` at the diagonal representative ``F`` of gap ``t``,
    from the quadratic transport identity (``H`` of unit norm)."""
    smax, smin = lambda_from_gap(t)
    c = smax * H.a11 + smin * H.a22
    return math.sqrt(max(t * t + 2.0 * s * c + s * s, 0.0))
