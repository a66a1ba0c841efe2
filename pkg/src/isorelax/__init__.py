"""Quasiconvex relaxation of isotropic energies on SL(2).

For objective, isotropic energies ``W(F) = phi_tilde(l1 - l2)`` on SL(2) the
rank-one convex, quasiconvex, polyconvex and convex envelopes all equal the
convex envelope of the even scalar profile ``phi_tilde``. This package
computes that envelope numerically, classifies energies, and checks the
result against independent oracles (chord search, Legendre biconjugate,
matrix-level lamination).
"""

__version__ = "0.1.0"

from .classify import ClassificationReport, classify_energy, is_convex_scalar, is_nondecreasing
from .envelope import (
    Bridge,
    PiecewiseEnvelope,
    TailReport,
    biconjugate,
    chord_envelope_oracle,
    convex_envelope_grid,
    extract_bridges,
    legendre_transform,
    monotone_convex_envelope,
    tail_report,
)
from .errors import *  # noqa: F401,F403
from .lamination import (
    LaminationTable,
    TangentDirection,
    laminate_once,
    lamination_fixed_point,
    tangent_directions,
)
from .mat2 import (
    Mat2,
    SingularPair,
    assert_sl2,
    det,
    frobenius_norm_sq,
    gap,
    lambda_from_gap,
    representative,
    singular_values,
)
from .models import EnergyModel, adm, energy_at, from_expression, hencky
from .relax import (
    RelaxedEnergy,
    build_relaxation,
    extension_envelope_value,
    extension_value,
    relaxed_profile,
    relaxed_value,
)
from .scalar import (
    Grid,
    SampledFn,
    ScalarFn,
    eval_expr,
    geometric_grid,
    parse_expr,
    sample,
    symmetrize,
    uniform_grid,
)
