"""Convex envelopes of sampled scalar profiles.

The envelope of a sample is the lower convex hull of its points, i.e. the
convex envelope of its piecewise-linear interpolant. This sits above the
envelope of the underlying smooth function by O(h^2) where the hull bridges
a non-convex stretch between grid points.

Besides the hull itself (:func:`convex_envelope_grid`) the module provides
the two independent checks used throughout the test-suite: a brute-force
chord minimization and the discrete Legendre-Fenchel biconjugate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import BadGrid, NegativeGridPoint, UnboundedBelowSuspected
from .scalar import Grid, SampledFn

TAIL_FRACTION = 0.1


class Bridge(NamedTuple):
    """Affine hull segment strictly below the source on its interior points.

    ``residual`` is the largest mismatch between ``slope`` and the
    finite-difference derivative of the source at the two contact points
    (zero for an exact common tangent).
    """

    t_left: float
    t_right: float
    slope: float
    residual: float


class TailReport(NamedTuple):
    left_tail_slope: float
    right_tail_slope: float
    truncation_warning: bool


@dataclass(frozen=True, eq=False)
class PiecewiseEnvelope:
    """Piecewise-linear convex envelope through ``vertex_t``/``vertex_v``.

    ``vertex_index`` maps each vertex to its source grid index. The
    monotone-convex envelope may start with an anchor vertex carrying the
    global minimum at the left grid end; it still has the index of that
    grid point but its value is below the source there.
    """

    vertex_t: np.ndarray
    vertex_v: np.ndarray
    vertex_index: np.ndarray
    source: SampledFn
    bridges: tuple = ()

    @property
    def hull_vertices(self):
        return list(zip(self.vertex_t.tolist(), self.vertex_v.tolist()))

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.vertex_v) / np.diff(self.vertex_t)

    @property
    def left_tail_slope(self) -> float:
        return float(self.slopes[0])

    @property
    def right_tail_slope(self) -> float:
        return float(self.slopes[-1])

    def __call__(self, t):
        """Evaluate by interpolation; tail slopes extrapolate beyond the grid."""
        scalar = np.ndim(t) == 0
        tt = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.interp(tt, self.vertex_t, self.vertex_v)
        lo = tt < self.vertex_t[0]
        hi = tt > self.vertex_t[-1]
        out[lo] = self.vertex_v[0] + self.left_tail_slope * (tt[lo] - self.vertex_t[0])
        out[hi] = self.vertex_v[-1] + self.right_tail_slope * (tt[hi] - self.vertex_t[-1])
        return float(out[0]) if scalar else out

    def grid_values(self) -> np.ndarray:
        """Envelope values at every source grid point."""
        return np.interp(self.source.t, self.vertex_t, self.vertex_v)


def _lower_hull(t, f):
    """Indices of the lower convex hull of ``(t[i], f[i])``, ``t`` increasing.

    Collinear middle points are dropped.
    """
    hull = []
    for i in range(len(t)):
        ti, fi = t[i], f[i]
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            cross = (t[b] - t[a]) * (fi - f[a]) - (f[b] - f[a]) * (ti - t[a])
            if cross > 0:
                break
            hull.pop()
        hull.append(i)
    return np.asarray(hull, dtype=int)


def _bridges(t, f, vidx, vt, vv):
    grad = np.gradient(f, t)
    out = []
    for k in range(len(vidx) - 1):
        i, j = vidx[k], vidx[k + 1]
        if j - i < 2:
            continue
        slope = (vv[k + 1] - vv[k]) / (vt[k + 1] - vt[k])
        res = max(abs(grad[i] - slope), abs(grad[j] - slope))
        out.append(Bridge(float(vt[k]), float(vt[k + 1]), float(slope), float(res)))
    return tuple(out)


def _check(f: SampledFn):
    if len(f.grid) < 3:
        raise BadGrid("envelope needs at least 3 points")


def convex_envelope_grid(f: SampledFn) -> PiecewiseEnvelope:
    """Lower convex hull of the sample points (single monotone-chain pass)."""
    _check(f)
    t, v = f.t, f.values
    idx = _lower_hull(t.tolist(), v.tolist())
    vt, vv = t[idx], v[idx]
    return PiecewiseEnvelope(vt, vv, idx, f, _bridges(t, v, idx, vt, vv))


def extract_bridges(env: PiecewiseEnvelope) -> list[Bridge]:
    return list(env.bridges)


def chord_envelope_oracle(f: SampledFn) -> np.ndarray:
    """Brute-force envelope: at every ``t_i`` the least value of any chord
    through two sample points bracketing ``t_i``.

    For a fixed left end ``j`` the best right end ``k >= i`` is the one with
    the smallest chord slope, so a running suffix minimum over ``k`` turns
    the O(n^3) search into O(n^2) work with O(n) memory.
    """
    _check(f)
    t, v = f.t, f.values
    n = t.size
    best = v.copy()
    for j in range(n - 1):
        s = (v[j + 1:] - v[j]) / (t[j + 1:] - t[j])
        smin = np.minimum.accumulate(s[::-1])[::-1]
        cand = v[j] + (t[j + 1:] - t[j]) * smin
        np.minimum(best[j + 1:], cand, out=best[j + 1:])
    return best


def _conjugate(x, fx, s, chunk=512):
    """``max_i (s_k x_i - fx_i)`` for every ``s_k``."""
    s = np.asarray(s, dtype=float)
    out = np.empty(s.size)
    for a in range(0, s.size, chunk):
        blk = s[a:a + chunk]
        out[a:a + chunk] = np.max(blk[:, None] * x[None, :] - fx[None, :], axis=1)
    return out


def legendre_transform(f: SampledFn, slopes: Grid) -> SampledFn:
    """Discrete Legendre-Fenchel transform ``g*(s) = max_i (s t_i - f_i)``."""
    _check(f)
    return SampledFn(slopes, _conjugate(f.t, f.values, slopes.points), f"({f.label})*")


def suspect_unbounded_below(f: SampledFn) -> bool:
    """Heuristic: values fall off ever more steeply towards a grid end."""
    t, v = f.t, f.values
    k = max(3, int(np.ceil(TAIL_FRACTION * t.size)))
    sides = [(t[-k:], v[-k:])]
    if t[0] < 0:
        sides.append((-t[:k][::-1], v[:k][::-1]))
    for tt, vv in sides:
        d = np.diff(vv) / np.diff(tt)
        if np.all(d < 0) and d[-1] < d[0] - 1e-9 * (abs(d[0]) + abs(d[-1])):
            return True
    return False


def hull_slopes(env: PiecewiseEnvelope) -> np.ndarray:
    """Distinct hull slopes padded by the two tail slopes."""
    s = env.slopes
    return np.unique(np.concatenate([[env.left_tail_slope], s, [env.right_tail_slope]]))


def biconjugate(f: SampledFn) -> SampledFn:
    """``f**`` on the sample grid.

    The slope grid is the set of hull slopes, which makes the double
    transform exact for the piecewise-linear interpolant.

    Raises
    ------
    UnboundedBelowSuspected
        If the sample looks unbounded below; the biconjugate equals the
        convex envelope only for profiles bounded below.
    """
    _check(f)
    if suspect_unbounded_below(f):
        raise UnboundedBelowSuspected("profile appears unbounded below; biconjugate undefined")
    s = hull_slopes(convex_envelope_grid(f))
    gstar = _conjugate(f.t, f.values, s)
    return SampledFn(f.grid, _conjugate(s, gstar, f.t), f"({f.label})**")


def monotone_convex_envelope(phi: SampledFn) -> PiecewiseEnvelope:
    """Largest nondecreasing convex minorant of a half-line sample.

    Computed as the lower hull of the sample with its left end pulled down
    to the global minimum: a convex function whose left end is its minimum
    is nondecreasing, and every nondecreasing minorant lies below that
    anchor. This coincides with the even envelope restricted to ``t >= 0``.
    """
    _check(phi)
    t, v = phi.t, phi.values
    if t[0] < 0:
        raise NegativeGridPoint(f"grid point {t[0]!r} < 0")
    anchored = v.copy()
    anchored[0] = v.min()
    idx = _lower_hull(t.tolist(), anchored.tolist())
    vt, vv = t[idx], anchored[idx]
    return PiecewiseEnvelope(vt, vv, idx, phi, _bridges(t, anchored, idx, vt, vv))


def tail_report(env: PiecewiseEnvelope) -> TailReport:
    """Outermost hull slopes, plus a warning if the source still flattens
    out (outward secant slopes shrinking in magnitude) over the outer 10%
    of the grid on either side, in which case the envelope over the whole
    line may lie below the truncated one.
    """
    t, v = env.source.t, env.source.values
    k = max(3, int(np.ceil(TAIL_FRACTION * t.size)))
    warn = False
    sides = [(t[-k:], v[-k:])]
    if t[0] < 0:
        sides.append((-t[:k][::-1], v[:k][::-1]))
    for tt, vv in sides:
        d = np.abs(np.diff(vv) / np.diff(tt))
        if d[-1] < d[0] * (1 - 1e-9):
            warn = True
    return TailReport(env.left_tail_slope, env.right_tail_slope, warn)
