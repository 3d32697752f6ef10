"""Acceptance suite: one test per criterion, with stated tolerances pinned.

Each test prints a single PASS/FAIL line (visible with ``pytest -s`` or in
failure output) and enforces its runtime budget.
"""

import json
import math
import time

import numpy as np
import pytest

from areaflow.cli import main as cli_main
from areaflow.curvature import CurvatureTensor, chi_ic1, constant_curvature_tensor
from areaflow.evolution import sweep_algebra, sweep_bound, sweep_positivity, sweep_term_II
from areaflow.flow import (
    EquivariantFlowState,
    FlowConfig,
    equivariant_step,
    exp_monitor_nondecreasing,
    run,
)
from areaflow.conditions import check_A, check_B
from areaflow.spaces import ModelSpace, bounds as space_bounds, curvature_at


def _report(num: int, ok: bool, detail: str, elapsed: float, budget: float):
    line = (f"CRITERION {num}: {'PASS' if ok and elapsed < budget else 'FAIL'} "
            f"- {detail} [{elapsed:.1f}s / budget {budget:.0f}s]")
    print(line)
    assert ok, line
    assert elapsed < budget, line


def test_criterion_1_algebraic_suite():
    t0 = time.monotonic()
    out = sweep_algebra(100_000, seed=101)
    worst = max(out["pythagoras"], out["keystone"], out["wedge"])
    el = time.monotonic() - t0
    _report(1, worst <= 1e-12, f"worst algebra defect {worst:.2e}", el, 10.0)


def test_criterion_2_term_ii_oracle():
    t0 = time.monotonic()
    out = sweep_term_II(100_000, seed=102)
    el = time.monotonic() - t0
    _report(2, out["max_abs_diff"] <= 1e-12,
            f"closed form vs contraction {out['max_abs_diff']:.2e}", el, 30.0)


def test_criterion_3_lemma_sweeps():
    t0 = time.monotonic()
    gaps = {}
    gaps["positivity_alpha_pos"] = sweep_positivity(10_000, 103, alpha_positive=True)
    gaps["positivity_alpha_zero"] = sweep_positivity(10_000, 104, alpha_positive=False)
    consts = {}
    for cond in ("A", "B", "C", "D"):
        out = sweep_bound(cond, 10_000, 105)
        gaps[f"bound_{cond}"] = out
        if "chosen_constants" in out:
            consts[cond] = out["chosen_constants"]
    worst = min(v["min_gap"] for v in gaps.values())
    el = time.monotonic() - t0
    _report(3, worst >= -1e-10,
            f"min gap {worst:.2e}, constants {consts}", el, 60.0)


def test_criterion_4_condition_audits_exact():
    t0 = time.monotonic()
    ok = True
    for n in (3, 4, 5):
        b = space_bounds(ModelSpace("sphere", n, scale=1.0))
        rep = check_A(b, b, n, n)
        ok &= rep.holds and rep.strict and rep.slack("kappa_sum") == 2.0
        ok &= rep.slack("ric_gap") == 0.0
    hopf = []
    for n in (1, 2, 3):
        bm = space_bounds(ModelSpace("sphere", 2 * n + 1, scale=1.0))
        bn = space_bounds(ModelSpace("fubini", 2 * n, scale=4.0))
        rep_a = check_A(bm, bn, 2 * n + 1, 2 * n)
        rep_b = check_B(bm, bn, 2 * n + 1, 2 * n)
        ok &= (not rep_a.holds) and rep_a.slack("ric_gap") == -1.0
        ok &= (not rep_b.holds) and rep_b.slack("sec_gap") == float(-6 * n + 5)
        hopf.append((rep_a.slack("ric_gap"), rep_b.slack("sec_gap")))
    el = time.monotonic() - t0
    _report(4, ok, f"sphere self-pairs strict; Hopf slacks {hopf}", el, 120.0)


def test_criterion_5_chi_ic1_extraction():
    t0 = time.monotonic()
    sphere = chi_ic1(constant_curvature_tensor(4, 1.0), seed=105)
    flat = chi_ic1(CurvatureTensor.zero(4), seed=106)
    cp2, _ = curvature_at(ModelSpace("fubini", 4, scale=4.0))
    proj = chi_ic1(cp2, seed=107)
    ok = abs(sphere - 1.0) <= 1e-3 and flat == 0.0 and abs(proj) <= 1e-2
    el = time.monotonic() - t0
    _report(5, ok, f"sphere {sphere:.6f}, flat {flat!r}, projective {proj:.2e}",
            el, 60.0)


def test_criterion_6_flat_torus_flow():
    t0 = time.monotonic()

    def torus_run(grid):
        cfg = FlowConfig(case="torus", m=2, n=2, grid=grid, t_end=0.5,
                         preset="linear_sine", amplitude=0.1, monitor_every=40)
        return run(cfg)

    base = torus_run(64)
    h = base.meta["h"]
    mono_defect = float(np.diff(base.m_of_t).min())
    fine = torus_run(128)
    r_base = np.nanmax(np.asarray(base.residual)[1:])
    r_fine = np.nanmax(np.asarray(fine.residual)[1:])
    slope = math.log2(r_base / r_fine)
    ok = (base.abort_reason is None and mono_defect >= -5 * h**2 and slope >= 1.8)
    el = time.monotonic() - t0
    _report(6, ok, f"monitor defect {mono_defect:.2e} (tol {5*h**2:.2e}), "
            f"residual slope {slope:.2f}", el, 120.0)


def test_criterion_7_equivariant_sphere_flow():
    t0 = time.monotonic()
    cfg = FlowConfig(case="equivariant", m=3, n=3, grid=512, t_end=2.0,
                     preset="sine", amplitude=0.8, monitor_every=120)
    series = run(cfg)
    mono_defect = float(np.diff(series.m_of_t).min())
    final = series.m_of_t[-1]

    th = np.linspace(0.0, math.pi, 513)
    ident = EquivariantFlowState(3, 3, th.copy(), 1)
    dt = 1e-5
    moved = abs(equivariant_step(ident, dt, lambda t: (1.0, 1.0)).rho - ident.rho).max()
    ok = (series.abort_reason is None and mono_defect >= -1e-8
          and final >= 1.9 and moved <= 1e-10 * dt)
    el = time.monotonic() - t0
    _report(7, ok, f"monitor defect {mono_defect:.2e}, m(T=2) {final:.6f}, "
            f"identity step {moved:.2e}", el, 120.0)


def test_criterion_8_coupled_shrinking_spheres():
    t0 = time.monotonic()
    cfg = FlowConfig(case="equivariant", m=3, n=3, grid=512, preset="sine",
                     amplitude=0.8, background_m="ricci", background_n="ricci",
                     t_end_frac_of_extinction=0.9, t_end=0.0, monitor_every=120)
    series = run(cfg)
    a = series.meta["a_used"]
    ok = (series.abort_reason is None and a is not None and a > 0
          and exp_monitor_nondecreasing(series, a, tol=1e-6))
    el = time.monotonic() - t0
    _report(8, ok, f"exp({a:.0f} t) m(t) nondecreasing (observed min rate "
            f"{series.meta['a_min_observed']:.3g})", el, 120.0)


def test_criterion_9_determinism(tmp_path, capsys):
    t0 = time.monotonic()
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps({
        "case": "equivariant", "m": 3, "n": 3, "grid": 64, "t_end": 0.2,
        "preset": "sine", "amplitude": 0.8, "monitor_every": 20,
    }))
    blobs = []
    for sub in ("first", "second"):
        outdir = tmp_path / sub
        assert cli_main(["flow", "--case", "equivariant", "--config",
                         str(cfgfile), "--out", str(outdir)]) == 0
        assert cli_main(["audit", "--m", "sphere:3:1", "--n", "fubini:2:4",
                         "--conditions", "A,B", "--out", str(outdir)]) == 0
        assert cli_main(["verify-identities", "--sweep", "400", "--seed", "9",
                         "--out", str(outdir)]) == 0
        blobs.append(tuple(
            (outdir / name).read_bytes()
            for name in ("flow_equivariant.csv", "flow_equivariant.manifest.json",
                         "audit.json", "verify_identities.json")))
    capsys.readouterr()
    ok = blobs[0] == blobs[1]
    el = time.monotonic() - t0
    _report(9, ok, "byte-identical CSV/JSON across reruns", el, 120.0)
