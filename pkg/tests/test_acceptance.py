"""Acceptance criteria, each checked at its stated tolerance and time budget.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines as they
are produced; they are also repeated in the terminal summary.
"""

import io
import json
import math
import subprocess
import sys
import time
from contextlib import redirect_stdout

import numpy as np
import pytest

from isorelax.classify import classify_energy
from isorelax.cli import run
from isorelax.envelope import (
    biconjugate,
    chord_envelope_oracle,
    convex_envelope_grid,
    monotone_convex_envelope,
)
from isorelax.lamination import lamination_fixed_point
from isorelax.mat2 import Mat2, frobenius_norm_sq, gap, random_sl2, singular_values
from isorelax.models import adm, adm_matrix_energy, from_expression, hencky
from isorelax.relax import build_relaxation, extension_envelope_value, relaxed_value
from isorelax.scalar import Grid, SampledFn, ScalarFn, geometric_grid, sample, uniform_grid


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def sl2_suite(seed=42, n=1000):
    rng = np.random.default_rng(seed)
    return [random_sl2(rng) for _ in range(n)]


def test_01_adm_closed_form(acceptance_log):
    grid = uniform_grid(-6, 6, 8001)
    h = 12 / 8000
    errs, ends = [], []
    with Timer() as tm:
        for gamma in (2.5, 3.0, 5.0):
            m = adm(gamma)
            rel = build_relaxation(m, grid)
            errs.append(np.max(np.abs(rel.envelope.grid_values()
                                      - m.closed_form_envelope(grid.points))))
            (b,) = rel.envelope.bridges
            r = math.sqrt(gamma - 2)
            ends.append(max(abs(b.t_left + r), abs(b.t_right - r)) / h)
    ok = max(errs) <= 1e-4 and max(ends) <= 2 and tm.elapsed < 1
    acceptance_log(1, "ADM closed-form envelope", ok,
                   f"max err {max(errs):.2e} (<= 1e-4), endpoint offset {max(ends):.2f} cells "
                   f"(<= 2), {tm.elapsed:.3f}s (< 1s)")
    assert ok


def test_02_convexity_threshold(acceptance_log):
    grid = uniform_grid(-5, 5, 4001)
    flags = {}
    with Timer() as tm:
        for gamma in (1.0, 1.5, 2.0, 2.1, 2.5, 3.0):
            r = classify_energy(adm(gamma), grid, 1e-8)
            f = (r.rank_one_convex, r.polyconvex, r.quasiconvex, r.convex_on_sl2)
            flags[gamma] = all(f) if len(set(f)) == 1 else None
    ok = all(flags[g] is (g <= 2) for g in flags) and tm.elapsed < 1
    acceptance_log(2, "convexity threshold", ok,
                   f"all-true for {[g for g in flags if flags[g] is True]}, "
                   f"all-false for {[g for g in flags if flags[g] is False]}, {tm.elapsed:.3f}s (< 1s)")
    assert ok


def test_03_hencky_trend(acceptance_log):
    vals, warns = [], []
    with Timer() as tm:
        for T in (1e2, 1e3, 1e4):
            rel = build_relaxation(hencky(), geometric_grid(4, T, 2001))
            vals.append(rel.at_gap(2.0))
            warns.append(rel.tails.truncation_warning)
    ok = (all(v > 0 for v in vals) and vals[0] > vals[1] > vals[2] and vals[2] <= 0.05
          and all(warns) and tm.elapsed < 2)
    acceptance_log(3, "Hencky envelope trend", ok,
                   "C(2) = " + ", ".join(f"{v:.4f}" for v in vals)
                   + f" for T = 1e2, 1e3, 1e4 (last <= 0.05), warnings {warns}, {tm.elapsed:.3f}s (< 2s)")
    assert ok


def random_profile(rng):
    """Piecewise-smooth sample: a few smooth pieces with jumps and kinks."""
    n = int(rng.integers(200, 1500))
    t = np.unique(rng.uniform(-5, 5, n))
    cuts = np.sort(rng.uniform(-5, 5, int(rng.integers(1, 5))))
    piece = np.searchsorted(cuts, t)
    v = np.zeros_like(t)
    for k in range(cuts.size + 1):
        m = piece == k
        c = rng.normal(size=5)
        x = t[m]
        v[m] = (c[0] + c[1] * x + c[2] * x ** 2 + c[3] * np.sin(3 * c[4] * x)
                + 0.1 * x ** 4 * abs(c[4]))
    return SampledFn(Grid(t), v)


def test_04_hull_vs_chord(acceptance_log):
    rng = np.random.default_rng(2024)
    worst = 0.0
    with Timer() as tm:
        for _ in range(50):
            f = random_profile(rng)
            d = np.max(np.abs(convex_envelope_grid(f).grid_values() - chord_envelope_oracle(f)))
            worst = max(worst, d)
    ok = worst <= 1e-10 and tm.elapsed < 10
    acceptance_log(4, "hull vs chord oracle", ok,
                   f"max diff {worst:.2e} over 50 profiles (<= 1e-10), {tm.elapsed:.3f}s (< 10s)")
    assert ok


def test_05_biconjugate(acceptance_log):
    worst = {}
    with Timer() as tm:
        f1 = sample(adm(3).phi_tilde, uniform_grid(-5, 5, 4001))
        f2 = sample(ScalarFn(lambda t: t ** 4 - 2 * t ** 2), uniform_grid(-2, 2, 4001))
        for name, f in (("adm3", f1), ("double-well", f2)):
            worst[name] = float(np.max(np.abs(biconjugate(f).values
                                              - convex_envelope_grid(f).grid_values())))
    ok = max(worst.values()) <= 1e-8 and tm.elapsed < 2
    acceptance_log(5, "biconjugate vs hull", ok,
                   ", ".join(f"{k} {v:.2e}" for k, v in worst.items())
                   + f" (<= 1e-8), {tm.elapsed:.3f}s (< 2s)")
    assert ok


def test_06_lamination(acceptance_log):
    m = adm(3)
    diffs, times, info = [], [], []
    for k in (1, 2, 4):
        g = uniform_grid(0, 4, 200 * k + 1)
        with Timer() as tm:
            table = lamination_fixed_point(m, g, 12, 1e-4, directions_per_point=8 * k,
                                           s_samples=33 * k)
        env = monotone_convex_envelope(sample(m.phi, g)).grid_values()
        diffs.append(float(np.max(np.abs(table.values - env))))
        times.append(tm.elapsed)
        info.append((table.iterations, table.converged))
    ok = (diffs[0] <= 5e-2 and info[0][0] <= 12 and diffs[0] > diffs[1] > diffs[2]
          and times[-1] < 60)
    acceptance_log(6, "lamination convergence", ok,
                   "max diff " + ", ".join(f"{d:.2e}" for d in diffs)
                   + f" at levels 1, 2, 4 (first <= 5e-2, decreasing), iterations {info[0][0]}, "
                   f"finest {times[-1]:.2f}s (< 60s)")
    assert ok


def test_07_invariance(acceptance_log):
    suite = sl2_suite()
    rng = np.random.default_rng(7)
    rel = build_relaxation(adm(3), uniform_grid(-5, 5, 4001))
    worst = dict(rotation=0.0, inversion=0.0, restriction=0.0, gap=0.0)
    with Timer() as tm:
        for F in suite:
            v = relaxed_value(rel, F)
            R1 = Mat2.rotation(rng.uniform(0, 2 * math.pi))
            R2 = Mat2.rotation(rng.uniform(0, 2 * math.pi))
            worst["rotation"] = max(worst["rotation"], abs(relaxed_value(rel, R1 @ F @ R2) - v))
            worst["inversion"] = max(worst["inversion"], abs(relaxed_value(rel, F.inverse()) - v))
            worst["restriction"] = max(worst["restriction"],
                                       abs(extension_envelope_value(rel, F) - v))
            s = np.linalg.svd(F.to_array(), compute_uv=False)
            worst["gap"] = max(worst["gap"], abs(gap(F) - (s[0] - s[1])),
                               abs(gap(F) - math.sqrt(max(frobenius_norm_sq(F) - 2, 0))))
    ok = max(worst.values()) <= 1e-9 and tm.elapsed < 1
    acceptance_log(7, "invariance suite", ok,
                   ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
                   + f" (<= 1e-9), {tm.elapsed:.3f}s (< 1s)")
    assert ok


def random_even_expression(rng):
    terms = [
        lambda: f"{rng.uniform(-2, 2):.3f}*t^2",
        lambda: f"{rng.uniform(0, 1):.3f}*t^4",
        lambda: f"{rng.uniform(-3, 3):.3f}*exp(-{rng.uniform(0.2, 3):.3f}*t^2)",
        lambda: f"{rng.uniform(-2, 2):.3f}*abs(t)",
        lambda: f"{rng.uniform(-2, 2):.3f}*log(1+t^2)",
        lambda: f"{rng.uniform(0, 2):.3f}*sqrt(1+{rng.uniform(0.5, 4):.3f}*t^2)",
        lambda: f"{rng.uniform(-1, 1):.3f}*abs(t)^{rng.uniform(1, 3):.3f}",
    ]
    picks = rng.choice(len(terms), size=int(rng.integers(2, 5)), replace=False)
    return " + ".join(terms[i]() for i in picks)


def test_08_monotone_identity(acceptance_log):
    rng = np.random.default_rng(8)
    models = [adm(g) for g in (1.0, 2.0, 2.5, 3.0, 5.0)] + [hencky()]
    models += [from_expression(random_even_expression(rng)) for _ in range(20)]
    g = uniform_grid(-4, 4, 1601)
    half = g.nonnegative()
    worst = 0.0
    with Timer() as tm:
        for m in models:
            full = convex_envelope_grid(sample(m.phi_tilde, g)).grid_values()[g.points >= 0]
            mono = monotone_convex_envelope(sample(m.phi, half)).grid_values()
            worst = max(worst, float(np.max(np.abs(mono - full))))
    ok = worst <= 1e-12 and tm.elapsed < 2
    acceptance_log(8, "monotone-convex identity", ok,
                   f"max diff {worst:.2e} over {len(models)} models (<= 1e-12), {tm.elapsed:.3f}s (< 2s)")
    assert ok


def test_09_dual_routes(acceptance_log):
    suite = sl2_suite()
    worst = dict(adm=0.0, hencky=0.0, trace=0.0)
    with Timer() as tm:
        models = {g: adm(g) for g in (1.5, 3.0)}
        h = hencky()
        for F in suite:
            t = gap(F)
            for g, m in models.items():
                worst["adm"] = max(worst["adm"], abs(adm_matrix_energy(F, g) - m.phi_tilde(t)))
            smax, smin = singular_values(F)
            la, lb = math.log(smax), math.log(smin)
            worst["hencky"] = max(worst["hencky"], abs(la * la + lb * lb - h.phi_tilde(t)))
            worst["trace"] = max(worst["trace"], abs(la + lb))
    ok = max(worst.values()) <= 1e-9 and tm.elapsed < 1
    acceptance_log(9, "dual-route identities", ok,
                   ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
                   + f" (<= 1e-9), {tm.elapsed:.3f}s (< 1s)")
    assert ok


def _run(*argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = run(list(argv))
    return code, buf.getvalue()


def test_10_cli_contract(acceptance_log, capsys):
    with Timer() as tm:
        c1, o1 = _run("classify", "--model", "adm", "--gamma", "3", "--grid", "-5:5:4001",
                      "--format", "json")
        c2, o2 = _run("relax", "--model", "adm", "--gamma", "3", "--F", "1,0;0,1")
        c3, _ = _run("relax", "--model", "adm", "--gamma", "3", "--F", "2,0;0,1")
        argv = [sys.executable, "-m", "isorelax", "table", "--model", "adm", "--gamma", "3",
                "--ts", "-2:2:41"]
        outs = [subprocess.run(argv, capture_output=True, check=True).stdout for _ in range(3)]
    capsys.readouterr()
    checks = {
        "classify": c1 == 0 and json.loads(o1)["rank_one_convex"] is False,
        "relax": c2 == 0 and abs(float(o2) + 9) <= 1e-4,
        "det": c3 == 2,
        "csv determinism": len(set(outs)) == 1 and outs[0].startswith(b"t,phi,envelope,on_bridge\n"),
    }
    ok = all(checks.values()) and tm.elapsed < 1
    acceptance_log(10, "CLI contract", ok,
                   ", ".join(f"{k} {'ok' if v else 'FAILED'}" for k, v in checks.items())
                   + f", {tm.elapsed:.3f}s (< 1s)")
    assert ok
