"""Command-line interface.

    isorelax classify --model adm --gamma 3 --grid -5:5:4001 --format json
    isorelax relax    --model adm --gamma 3 --F "1,0;0,1"
    isorelax envelope --model hencky --grid geo:4:1e4:2001
    isorelax table    --model adm --gamma 3 --ts 0,1,2
    isorelax verify   --model adm --gamma 3

Exit codes: 0 success, 1 usage or parse error, 2 domain error
(matrix not in SL(2), profile not even, point outside the grid), 3 numeric
failure (evaluation error, profile unbounded below, I/O).
"""

from __future__ import annotations

import argparse
import io
import json
import sys

import numpy as np

from . import __version__
from .classify import DEFAULT_TOL, classify_energy
from .envelope import (
    biconjugate,
    chord_envelope_oracle,
    convex_envelope_grid,
    monotone_convex_envelope,
    tail_report,
)
from .errors import DomainError, NumericError, RelaxError, UsageError
from .lamination import DEFAULT_DIRECTIONS, DEFAULT_S_SAMPLES, lamination_fixed_point
from .mat2 import Mat2, gap, random_sl2
from .models import EnergyModel, by_name
from .relax import (
    ProfileRow,
    build_relaxation,
    extension_envelope_value,
    relaxed_profile,
    relaxed_value,
)
from .scalar import Grid, geometric_grid, sample, uniform_grid

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_NUMERIC = 0, 1, 2, 3

DEFAULT_GRIDS = {"adm": "-5:5:4001", "hencky": "geo:4:1e4:2001", "expr": "-5:5:4001"}
_VALUE_OPTS = ("--grid", "--ts", "--F", "--gamma", "--expr")


def fmt(x) -> str:
    """17 significant digits, enough to round-trip a double."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    return format(float(x), ".17g")


def parse_grid(spec: str) -> Grid:
    """``min:max:count`` (uniform) or ``geo:peak:max:count`` (geometric)."""
    parts = spec.split(":")
    try:
        if parts[0] == "geo" and len(parts) == 4:
            return geometric_grid(float(parts[1]), float(parts[2]), _count(parts[3]))
        if len(parts) == 3:
            return uniform_grid(float(parts[0]), float(parts[1]), _count(parts[2]))
    except ValueError as exc:
        raise UsageError(f"bad grid {spec!r}: {exc}") from None
    raise UsageError(f"bad grid {spec!r}: expected min:max:count or geo:peak:max:count")


def _count(s):
    n = float(s)
    if n != int(n):
        raise ValueError("count must be an integer")
    return int(n)


def parse_points(spec: str) -> np.ndarray:
    """Comma list ``0,1,2`` or a grid spec."""
    if ":" in spec:
        return parse_grid(spec).points
    try:
        pts = np.array([float(x) for x in spec.split(",") if x.strip()])
    except ValueError:
        raise UsageError(f"bad point list {spec!r}") from None
    if pts.size == 0:
        raise UsageError("empty point list")
    return pts


def parse_matrix(spec: str) -> Mat2:
    """``a11,a12;a21,a22``."""
    try:
        rows = [[float(x) for x in r.split(",")] for r in spec.split(";")]
        if len(rows) != 2 or any(len(r) != 2 for r in rows):
            raise ValueError
        return Mat2(rows[0][0], rows[0][1], rows[1][0], rows[1][1])
    except ValueError:
        raise UsageError(f"bad matrix {spec!r}: expected a11,a12;a21,a22") from None


def emit_table(rows: list[ProfileRow]) -> str:
    if not rows:
        raise UsageError("empty table")
    rows = sorted(rows, key=lambda r: r.t)
    buf = io.StringIO()
    buf.write("t,phi,envelope,on_bridge\n")
    for r in rows:
        buf.write(f"{fmt(r.t)},{fmt(r.phi)},{fmt(r.envelope)},{fmt(r.on_bridge)}\n")
    return buf.getvalue()


def emit_json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def emit_verification(report: dict) -> str:
    return emit_json(report)


def grid_summary(grid: Grid) -> dict:
    return {"t_min": grid.t_min, "t_max": grid.t_max, "n": len(grid)}


def model_summary(model: EnergyModel) -> dict:
    return {"name": model.name, "label": model.phi.label, "parameters": dict(model.parameters)}


def verification_report(model: EnergyModel, grid: Grid, seed: int = 42, lam_max: float = 4.0,
                        lam_n: int = 201, lam_iters: int = 12, lam_tol: float = 1e-4,
                        directions: int = DEFAULT_DIRECTIONS,
                        s_samples: int = DEFAULT_S_SAMPLES) -> dict:
    """Run the hull, both scalar oracles and the lamination oracle on one model."""
    rel = build_relaxation(model, grid)
    f = rel.envelope.source
    hull = rel.envelope.grid_values()
    chord = chord_envelope_oracle(f)
    bic = biconjugate(f).values

    gap_grid = uniform_grid(0.0, min(lam_max, rel.t_max), lam_n)
    table = lamination_fixed_point(model, gap_grid, lam_iters, lam_tol, directions, s_samples)
    scalar_env = monotone_convex_envelope(sample(model.phi, gap_grid)).grid_values()

    rng = np.random.default_rng(seed)
    inv_err = 0.0
    for _ in range(100):
        F = random_sl2(rng)
        R = Mat2.rotation(rng.uniform(0, 2 * np.pi))
        try:
            base = relaxed_value(rel, F)
            inv_err = max(inv_err, abs(relaxed_value(rel, R @ F) - base),
                          abs(extension_envelope_value(rel, F) - base))
        except DomainError:
            continue

    cf_err = rel.metadata["closed_form_max_error"]
    return {
        "model": model_summary(model),
        "grid": grid_summary(rel.grid_spec),
        "max_abs_diff_hull_vs_chord": float(np.max(np.abs(hull - chord))),
        "max_abs_diff_hull_vs_biconjugate": float(np.max(np.abs(hull - bic))),
        "max_abs_diff_hull_vs_lamination": float(np.max(np.abs(table.values - scalar_env))),
        "lamination_iterations": table.iterations,
        "converged": table.converged,
        "closed_form_max_error": cf_err,
        "closed_form_asymptotic": model.envelope_asymptotic,
        "truncation_warning": rel.tails.truncation_warning,
        "lamination_grid": grid_summary(gap_grid),
        "seed": seed,
        "max_invariance_error": inv_err,
    }


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="isorelax", description="Relaxation of isotropic energies on SL(2).")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, fmt_default="json"):
        sp.add_argument("--model", choices=("adm", "hencky", "expr"), required=True)
        sp.add_argument("--gamma", type=float)
        sp.add_argument("--expr")
        sp.add_argument("--grid", help="min:max:count or geo:peak:max:count")
        sp.add_argument("--format", choices=("csv", "json"), default=fmt_default)
        sp.add_argument("--output", "-o", help="output file (default: stdout)")

    sp = sub.add_parser("classify", help="generalized convexity of the energy")
    common(sp)
    sp.add_argument("--tol", type=float, default=DEFAULT_TOL)

    sp = sub.add_parser("relax", help="relaxed energy at a matrix")
    common(sp, fmt_default="csv")
    sp.add_argument("--F", required=True, help='matrix "a11,a12;a21,a22"')
    sp.add_argument("--extrapolate", action="store_true",
                    help="extrapolate with the tail slopes beyond the grid")

    sp = sub.add_parser("envelope", help="hull vertices, bridges and tails")
    common(sp)

    sp = sub.add_parser("table", help="t, phi, envelope, on_bridge table")
    common(sp, fmt_default="csv")
    sp.add_argument("--ts", help="points: comma list or grid spec (default: the grid)")

    sp = sub.add_parser("verify", help="cross-check the envelope against all oracles")
    common(sp)
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--lam-max", type=float, default=4.0)
    sp.add_argument("--lam-n", type=int, default=201)
    sp.add_argument("--lam-iters", type=int, default=12)
    sp.add_argument("--lam-tol", type=float, default=1e-4)
    sp.add_argument("--directions", type=int, default=DEFAULT_DIRECTIONS)
    sp.add_argument("--s-samples", type=int, default=DEFAULT_S_SAMPLES)
    return p


def _join_values(argv):
    # let values such as "-5:5:4001" follow their option without "="
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _VALUE_OPTS and i + 1 < len(argv):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
        else:
            out.append(a)
            i += 1
    return out


def _model(args) -> EnergyModel:
    if (args.gamma is not None) != (args.model == "adm"):
        raise UsageError("--gamma is required for, and only for, --model adm")
    if (args.expr is not None) != (args.model == "expr"):
        raise UsageError("--expr is required for, and only for, --model expr")
    return by_name(args.model, args.gamma, args.expr)


def _kv_csv(d: dict) -> str:
    lines = ["key,value"]
    for k, v in d.items():
        if isinstance(v, dict):
            v = ";".join(f"{a}={b}" for a, b in v.items())
        elif v is None:
            v = ""
        elif isinstance(v, (bool, float)):
            v = fmt(v)
        lines.append(f"{k},{v}")
    return "\n".join(lines) + "\n"


def _dispatch(args) -> str:
    model = _model(args)
    grid = parse_grid(args.grid or DEFAULT_GRIDS[args.model])

    if args.command == "classify":
        rep = classify_energy(model, grid, args.tol).to_dict()
        rep = {"model": model_summary(model), **rep}
        return emit_json(rep) if args.format == "json" else _kv_csv(rep)

    if args.command == "relax":
        F = parse_matrix(args.F)
        rel = build_relaxation(model, grid)
        val = relaxed_value(rel, F, extrapolate=args.extrapolate)
        if args.format == "csv":
            return fmt(val) + "\n"
        return emit_json({"model": model_summary(model), "F": [[F.a11, F.a12], [F.a21, F.a22]],
                          "relaxed": val, "energy": model.phi_tilde(gap(F))})

    if args.command == "envelope":
        rel = build_relaxation(model, grid)
        env = rel.envelope
        if args.format == "csv":
            return emit_table(relaxed_profile(rel, rel.grid_spec))
        tails = tail_report(env)
        return emit_json({
            "model": model_summary(model),
            "grid": grid_summary(rel.grid_spec),
            "hull_vertices": [[a, b] for a, b in env.hull_vertices],
            "bridges": [b._asdict() for b in env.bridges],
            "left_tail_slope": tails.left_tail_slope,
            "right_tail_slope": tails.right_tail_slope,
            "truncation_warning": tails.truncation_warning,
            "closed_form_max_error": rel.metadata["closed_form_max_error"],
        })

    if args.command == "table":
        rel = build_relaxation(model, grid)
        ts = parse_points(args.ts) if args.ts is not None else rel.grid_spec.points
        rows = relaxed_profile(rel, ts)
        if args.format == "csv":
            return emit_table(rows)
        return emit_json([r._asdict() for r in sorted(rows, key=lambda r: r.t)])

    rep = verification_report(model, grid, args.seed, args.lam_max, args.lam_n, args.lam_iters,
                              args.lam_tol, args.directions, args.s_samples)
    return emit_verification(rep)


def run(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_join_values(argv))
        text = _dispatch(args)
        if args.output:
            with open(args.output, "w", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except UsageError as exc:
        code, msg = EXIT_USAGE, exc
    except ValueError as exc:
        code, msg = EXIT_USAGE, exc
    except DomainError as exc:
        code, msg = EXIT_DOMAIN, exc
    except (NumericError, OSError) as exc:
        code, msg = EXIT_NUMERIC, exc
    except RelaxError as exc:
        code, msg = EXIT_NUMERIC, exc
    sys.stderr.write(f"isorelax: error: {msg}\n")
    return code


def main() -> None:
    sys.exit(run())
