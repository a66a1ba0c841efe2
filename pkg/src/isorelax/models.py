"""Built-in isotropic energies on SL(2) and user-defined ones.

An isotropic, objective energy on SL(2) is fully determined by an even
profile ``phi_tilde`` of the singular value gap, ``W(F) = phi_tilde(l1 - l2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotEven
from .mat2 import SL2_TOL, Mat2, gap
from .scalar import FULL_LINE, HALF_LINE, ScalarFn, eval_expr, parse_expr, symmetrize

EVEN_PROBE_SEED = 20240101
EVEN_PROBE_POINTS = 64
EVEN_PROBE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class EnergyModel:
    """Energy on SL(2) given by its gap profile.

    ``phi_tilde`` is even on the real line and ``phi`` is its restriction to
    ``[0, inf)``. ``envelope_asymptotic`` marks a closed-form envelope that
    holds on the whole line only, so truncated grids approach it in the limit.
    """

    name: str
    phi_tilde: ScalarFn
    phi: ScalarFn
    closed_form_envelope: ScalarFn | None = None
    parameters: dict = field(default_factory=dict)
    bounded_below_hint: bool = True
    envelope_asymptotic: bool = False


def _from_half_line(name, phi_eval, label, **kw):
    phi = ScalarFn(phi_eval, HALF_LINE, label)
    return EnergyModel(name, symmetrize(phi), phi, **kw)


def adm(gamma: float) -> EnergyModel:
    """Alibert-Dacorogna-Marcellini energy ``|F|^4 - 2 gamma |F|^2`` on SL(2).

    Its gap profile is ``t^4 + (4 - 2 gamma) t^2 + 4 - 4 gamma``. For
    ``gamma > 2`` the convex envelope replaces the well ``t^2 < gamma - 2``
    by the constant ``-gamma^2``; otherwise the energy is already convex.
    """
    g = float(gamma)

    def profile(t):
        t2 = t * t
        return t2 * t2 + (4.0 - 2.0 * g) * t2 + 4.0 - 4.0 * g

    label = f"adm(gamma={g!r})"
    if g > 2:
        def envelope(t):
            t = np.abs(t)
            return np.where(t * t >= g - 2.0, profile(t), -g * g)
    else:
        def envelope(t):
            return profile(np.abs(t))

    cf = ScalarFn(envelope, FULL_LINE, f"C {label}")
    return _from_half_line("adm", profile, label,
                           closed_form_envelope=cf, parameters={"gamma": g})


def adm_matrix_energy(F: Mat2, gamma: float) -> float:
    """``|F|^4 - 2 gamma |F|^2`` straight from the matrix entries."""
    n2 = F.a11 ** 2 + F.a12 ** 2 + F.a21 ** 2 + F.a22 ** 2
    return n2 * n2 - 2.0 * gamma * n2


def hencky() -> EnergyModel:
    """Hencky energy ``|log V|^2 = 2 log^2(lambda_max)``; its envelope on
    SL(2) is identically zero because the profile grows sublinearly."""

    def profile(t):
        return 2.0 * np.log((t + np.sqrt(4.0 + t * t)) / 2.0) ** 2

    cf = ScalarFn(lambda t: np.zeros_like(t), FULL_LINE, "0")
    return _from_half_line("hencky", profile, "hencky",
                           closed_form_envelope=cf, envelope_asymptotic=True)


def check_even(fn: ScalarFn, seed: int = EVEN_PROBE_SEED) -> None:
    rng = np.random.default_rng(seed)
    t = rng.uniform(0.0, 10.0, EVEN_PROBE_POINTS)
    a, b = fn(t), fn(-t)
    res = np.abs(a - b)
    bad = res > EVEN_PROBE_TOL * (1.0 + np.abs(a))
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise NotEven(float(t[i]), float(res[i]))


def from_expression(source: str, name: str = "expr") -> EnergyModel:
    """Model from an expression in ``t``; the expression must be even."""
    ast = parse_expr(source)
    check_even(ScalarFn(lambda t: eval_expr(ast, t), FULL_LINE, source))
    return _from_half_line(name, lambda t: eval_expr(ast, t), source,
                           parameters={"expr": source})


def energy_at(model: EnergyModel, F: Mat2, tol: float = SL2_TOL) -> float:
    return model.phi_tilde(gap(F, tol))


def by_name(model: str, gamma: float | None = None, expr: str | None = None) -> EnergyModel:
    if model == "adm":
        if gamma is None:
            raise ValueError("model 'adm' requires gamma")
        return adm(gamma)
    if model == "hencky":
        return hencky()
    if model == "expr":
        if expr is None:
            raise ValueError("model 'expr' requires an expression")
        return from_expression(expr)
    raise ValueError(f"unknown model {model!r}")
