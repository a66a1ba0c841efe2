"""Relaxed energies on SL(2).

The rank-one convex, quasiconvex, polyconvex and convex envelopes of an
isotropic energy on SL(2) all coincide with the convex envelope of its even
gap profile, evaluated at the gap of ``F``. The same scalar envelope,
evaluated at ``sqrt(|F|^2 - 2 det F)``, is the envelope of the conformal
extension of ``W`` to all 2x2 matrices.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .envelope import (
    PiecewiseEnvelope,
    TailReport,
    convex_envelope_grid,
    suspect_unbounded_below,
    tail_report,
)
from .errors import OutsideGrid, UnboundedBelowSuspected
from .mat2 import SL2_TOL, Mat2, conformal_radius, gap
from .models import EnergyModel
from .scalar import Grid, sample

log = logging.getLogger(__name__)

ON_BRIDGE_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class RelaxedEnergy:
    model: EnergyModel
    envelope: PiecewiseEnvelope
    grid_spec: Grid
    tails: TailReport
    metadata: dict = field(default_factory=dict)

    @property
    def t_max(self) -> float:
        return self.grid_spec.t_max

    def at_gap(self, t, extrapolate: bool = False):
        t_abs = np.abs(t)
        if not extrapolate and np.any(t_abs > self.t_max):
            raise OutsideGrid(float(np.max(t_abs)), self.t_max)
        return self.envelope(t_abs)


class ProfileRow(NamedTuple):
    t: float
    phi: float
    envelope: float
    on_bridge: bool


def _bias_tolerance(values):
    # a missed contact point costs at most one cell's worth of curvature
    d2 = np.abs(np.diff(values, 2))
    return max(float(d2.max()) if d2.size else 0.0, 1e-9 * (1.0 + float(np.max(np.abs(values)))))


def build_relaxation(model: EnergyModel, grid: Grid) -> RelaxedEnergy:
    """Sample ``phi_tilde`` on the mirrored grid and take its convex hull.

    Closed-form envelopes (when exact on the line) are compared with the
    numeric one at build time; the mismatch is kept in ``metadata``.

    Raises
    ------
    UnboundedBelowSuspected
        If the samples fall off superlinearly towards a grid end.
    """
    full = grid if grid.is_symmetric() else grid.reflected()
    f = sample(model.phi_tilde, full)
    if suspect_unbounded_below(f):
        raise UnboundedBelowSuspected(
            f"{model.phi_tilde.label} decreases superlinearly towards the grid boundary")
    env = convex_envelope_grid(f)
    tails = tail_report(env)
    meta = {"algorithm": "monotone-chain lower hull", "n": len(full),
            "closed_form_max_error": None, "closed_form_tolerance": None}
    cf = model.closed_form_envelope
    if cf is not None and not model.envelope_asymptotic:
        err = float(np.max(np.abs(env.grid_values() - cf(full.points))))
        tol = _bias_tolerance(f.values)
        meta["closed_form_max_error"] = err
        meta["closed_form_tolerance"] = tol
        if err > tol:
            log.warning("numeric envelope of %s deviates from the closed form by %.3g (> %.3g)",
                        model.name, err, tol)
    if tails.truncation_warning:
        log.info("envelope of %s may be truncated by the grid", model.name)
    return RelaxedEnergy(model, env, full, tails, meta)


def relaxed_value(rel: RelaxedEnergy, F: Mat2, extrapolate: bool = False,
                  tol: float = SL2_TOL) -> float:
    return rel.at_gap(gap(F, tol), extrapolate)


def relaxed_profile(rel: RelaxedEnergy, ts: Grid | np.ndarray) -> list[ProfileRow]:
    pts = ts.points if isinstance(ts, Grid) else np.asarray(ts, dtype=float)
    if pts.size and (pts.min() < rel.grid_spec.t_min or pts.max() > rel.t_max):
        bad = pts.min() if pts.min() < rel.grid_spec.t_min else pts.max()
        raise OutsideGrid(float(bad), rel.t_max)
    phi = rel.model.phi_tilde(pts)
    env = rel.envelope(pts)
    below = env < phi - ON_BRIDGE_RTOL * (1.0 + np.abs(phi))
    return [ProfileRow(float(a), float(b), float(c), bool(d))
            for a, b, c, d in zip(pts, phi, env, below)]


def extension_value(model: EnergyModel, F: Mat2) -> float:
    """Conformal extension ``phi_tilde(sqrt(|F|^2 - 2 det F))`` for any 2x2 ``F``."""
    return model.phi_tilde(conformal_radius(F))


def extension_envelope_value(rel: RelaxedEnergy, F: Mat2, extrapolate: bool = False) -> float:
    return rel.at_gap(conformal_radius(F), extrapolate)
