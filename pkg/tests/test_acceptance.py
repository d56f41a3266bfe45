"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line
with the measured numbers (run with `pytest tests/test_acceptance.py -v -s`).

Population readouts at a target time use the documented windowed mean
(trailing 5 g_r^-1): the exact-model populations carry a fast, sub-resolution
dressing oscillation and the window average is the resolvable value; the
instantaneous sample is printed alongside.
"""

import math
from dataclasses import replace

import numpy as np

from rydcav import cavity, qops
from rydcav.cavity import RegimeRecipe, apply_recipe
from rydcav.device import TWO_PI, DeviceParams, derive
from rydcav.effective import fourth_order, triplet
from rydcav.protocols import (
    EnsembleParams,
    blockade_budget,
    omega_d_for_phase,
    optical_depth,
    optimal_omega,
    photonic_cphase,
    polariton,
)
from rydcav.qops import BasisSpec, DensityMatrix, IntegratorOpts
from rydcav.timeseries import (
    first_minimum,
    max_abs_difference,
    moving_average,
    value_at,
    windowed_mean,
)

from conftest import dressing_beat, reduced_overlay
from oracles import expm_scaling_squaring, scan_minimum

WINDOW = cavity.SURVIVAL_WINDOW


def check(name: str, ok: bool, detail: str) -> None:
    print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def test_criterion_1_pair_shift_f10(vdw_f10):
    recipe = vdw_f10.meta["recipe"]
    t_pi = recipe.t_pi
    p_win = windowed_mean(vdw_f10.t, vdw_f10.p_rr, t_pi, WINDOW)
    p_inst = value_at(vdw_f10.t, vdw_f10.p_rr, t_pi)
    phi = value_at(vdw_f10.t, vdw_f10.phi_rr, t_pi)
    wall = vdw_f10.meta["wall_s"]
    ok = (
        abs(p_win - 0.92) <= 0.03
        and abs(phi - math.pi) <= 0.05 * math.pi
        and wall < 10.0
    )
    check(
        "criterion 1 (pair shift, f=10)",
        ok,
        f"p_rr(T_pi) = {p_win:.4f} (inst {p_inst:.4f}, target 0.92 +- 0.03), "
        f"phi/pi = {phi / math.pi:.4f} (target 1 +- 0.05), wall = {wall:.1f}s (< 10s)",
    )


def test_criterion_2_pair_shift_f20(vdw_f20):
    recipe = vdw_f20.meta["recipe"]
    p_win = windowed_mean(vdw_f20.t, vdw_f20.p_rr, recipe.t_pi, WINDOW)
    ok = abs(p_win - 0.74) <= 0.04
    check(
        "criterion 2 (pair shift, f=20)",
        ok,
        f"p_rr(T_pi) = {p_win:.4f} (target 0.74 +- 0.04)",
    )


def test_criterion_3_exchange_overlays(ddi_f10, ddi_f20, ddi_f20_unitary):
    details = []
    oks = []
    for traj, bound in ((ddi_f10, 0.05), (ddi_f20, 0.02)):
        recipe = traj.meta["recipe"]
        reduced = reduced_overlay(traj)
        width = 6 * dressing_beat(recipe.f)
        sm_full = moving_average(traj.t, traj.p_rr, width)
        sm_red = moving_average(traj.t, reduced.p_rr, width)
        mask = traj.t <= recipe.oscillation_period
        dev = max_abs_difference(sm_full, sm_red, mask)
        oks.append(dev <= bound)
        details.append(f"f={recipe.f:.0f}: max|dp_rr| = {dev:.4f} (<= {bound})")

    t_min = first_minimum(ddi_f20_unitary.t, ddi_f20_unitary.p_rr)
    freq = math.pi / (2 * t_min)  # first zero of cos^2 at sqrt2 D t = pi/2
    target = math.sqrt(2) * 0.05
    rel = abs(freq - target) / target
    oks.append(rel <= 0.02)
    details.append(f"f=20 frequency: {freq:.5f} vs sqrt2 D = {target:.5f} ({rel:.2%})")

    check("criterion 3 (exchange overlays)", all(oks), "; ".join(details))


def test_criterion_4_triplet():
    d = 0.1
    pairs = triplet(d)
    energies = np.array([e for e, _ in pairs])
    target = np.array([-math.sqrt(2) * d, 0.0, math.sqrt(2) * d])
    rel = np.abs(energies - target).max() / (math.sqrt(2) * d)
    # cross-check against the Hermitian eigensolver on the explicit block
    block = np.array([[0, d, d], [d, 0, 0], [d, 0, 0]], dtype=complex)
    rel_eig = np.abs(np.linalg.eigvalsh(block) - target).max() / (math.sqrt(2) * d)
    zero_overlap = abs(pairs[1][1][0])
    ok = rel <= 1e-12 and rel_eig <= 1e-12 and zero_overlap == 0.0
    check(
        "criterion 4 (triplet)",
        ok,
        f"energy error {rel:.2e} (closed form) / {rel_eig:.2e} (eigensolver), "
        f"<psi0|rr> = {zero_overlap}",
    )


def test_criterion_5_device_pipeline():
    der = derive(DeviceParams())
    depth = optical_depth(EnsembleParams())
    checks = {
        "V_c": abs(der.V_c - 1.41e-11) / 1.41e-11 <= 0.01,
        "lambda_c": der.lambda_c == 4e-3,
        "omega_c": abs(der.omega_c - TWO_PI * 30e9) / (TWO_PI * 30e9) <= 0.05,
        "kappa": der.kappa == der.omega_c / 1e6,
        "depth": abs(depth - 80.0) / 80.0 <= 0.01,
    }
    check(
        "criterion 5 (device pipeline)",
        all(checks.values()),
        f"V_c = {der.V_c:.3e} m^3, lambda_c = {der.lambda_c * 1e3:.1f} mm, "
        f"omega_c = 2pi x {der.omega_c / TWO_PI / 1e9:.2f} GHz, "
        f"kappa = omega_c/Q exactly, optical depth = {depth:.2f}",
    )


def test_criterion_6_blockade_budget():
    n, d = 1e6, TWO_PI * 1e6
    gamma_total = 1e3 + 1.885e5 / 100  # intrinsic + cavity-induced at f = 10
    omega, err = optimal_omega(n, d, gamma_total)
    budget = blockade_budget(n, omega, d, gamma_total)

    def total(x):
        b = blockade_budget(n, x, d, gamma_total)
        return b.p_double + b.p_decay

    x_scan, y_scan, step = scan_minimum(total, 0.2 * omega, 5 * omega, n=1000)
    t_total = budget.total_time
    checks = {
        "omega": abs(omega - TWO_PI * 100) <= 0.2 * TWO_PI * 100,
        "time": abs(t_total - 2.7e-6) <= 0.15 * 2.7e-6,
        "fidelity": budget.fidelity >= 0.98,
        "scan": abs(x_scan - omega) <= step and err <= y_scan + 1e-12,
    }
    check(
        "criterion 6 (blockade budget)",
        all(checks.values()),
        f"omega_opt = 2pi x {omega / TWO_PI:.1f} Hz (target 100 +- 20%), "
        f"T1+T2 = {t_total * 1e6:.2f} us (target 2.7 +- 15%), "
        f"fidelity = {budget.fidelity:.4f} (>= 0.98), scan optimum confirmed",
    )


def test_criterion_7_photonic_cphase():
    ens = EnsembleParams()
    w = TWO_PI * 40e3
    phi = photonic_cphase(ens, polariton(ens, TWO_PI * 1.1e6), w)
    omega_inv = omega_d_for_phase(ens, w)
    ok = (
        abs(phi - math.pi) <= 0.1 * math.pi
        and abs(omega_inv - TWO_PI * 1.1e6) <= 0.1 * TWO_PI * 1.1e6
    )
    check(
        "criterion 7 (photonic cphase)",
        ok,
        f"phi = {phi / math.pi:.4f} pi (target 1 +- 10%), "
        f"inverse = 2pi x {omega_inv / TWO_PI / 1e6:.4f} MHz (target 1.1 +- 10%)",
    )


def test_criterion_8_property_suite(vdw_f10, vdw_f20, ddi_f10, ddi_f20):
    presets = {
        "vdw-f10": vdw_f10, "vdw-f20": vdw_f20,
        "ddi-f10": ddi_f10, "ddi-f20": ddi_f20,
    }
    details = []
    oks = []

    drift = max(np.abs(t.trace - 1.0).max() for t in presets.values())
    min_eig = min(t.meta["min_eig"] for t in presets.values())
    oks += [drift <= 1e-8, min_eig >= -1e-8]
    details.append(f"trace drift {drift:.1e} (<= 1e-8), min eig {min_eig:.1e} (>= -1e-8)")

    # unitary evolution vs the independent matrix exponential
    rng = np.random.default_rng(7)
    basis = BasisSpec(n_max=1)
    m = rng.normal(size=(basis.dim, basis.dim)) + 1j * rng.normal(size=(basis.dim, basis.dim))
    h = qops.Operator(basis, 0.5 * (m + m.conj().T))
    rho = rng.normal(size=(basis.dim, basis.dim)) + 1j * rng.normal(size=(basis.dim, basis.dim))
    rho = rho @ rho.conj().T
    rho0 = DensityMatrix(basis, rho / np.trace(rho))
    traj = qops.evolve(rho0, h, [], IntegratorOpts(t_max=3.0, n_samples=4))
    u = expm_scaling_squaring(-1j * h.data * 3.0)
    unit_err = np.abs(traj.final_state.data - u @ rho0.data @ u.conj().T).max()
    oks.append(unit_err <= 1e-8)
    details.append(f"unitary vs expm {unit_err:.1e} (<= 1e-8)")

    # fixed-step order: halving dt cuts the error ~16x
    s = qops.atom_sigma(basis, "b", "r")
    h2 = qops.kron3(0.65 * (s + s.conj().T), np.eye(4), np.eye(2), basis)
    rho0 = DensityMatrix.pure(basis, "b", "sink", 0)
    exact_u = expm_scaling_squaring(-1j * h2.data * 2.0)
    exact = exact_u @ rho0.data @ exact_u.conj().T

    def rk4_err(dt, stride):
        opts = IntegratorOpts(t_max=2.0, method="rk4", dt=dt, sample_stride=stride)
        return np.abs(qops.evolve(rho0, h2, [], opts).final_state.data - exact).max()

    ratio = rk4_err(0.02, 25) / rk4_err(0.01, 50)
    oks.append(12.0 <= ratio <= 20.0)
    details.append(f"rk4 dt-halving ratio {ratio:.1f} (~16)")

    # atom-exchange symmetry
    base = replace(
        apply_recipe(RegimeRecipe("ddi", 10.0)),
        g_br_i=1.05, g_ar_i=0.9, g_br_j=0.95, g_ar_j=1.1, kappa=3e-3, gamma_r=2e-5,
    )
    swapped = replace(base, g_br_i=base.g_br_j, g_ar_i=base.g_ar_j,
                      g_br_j=base.g_br_i, g_ar_j=base.g_ar_i)
    opts = IntegratorOpts(t_max=25.0, n_samples=101, rel_tol=1e-8, abs_tol=1e-12)
    ta, tb = cavity.run_exact(base, opts), cavity.run_exact(swapped, opts)
    sym = max(np.abs(ta.p_rr - tb.p_rr).max(), np.abs(ta.p_ba - tb.p_ab).max())
    oks.append(sym <= 1e-10)
    details.append(f"exchange symmetry {sym:.1e} (<= 1e-10)")

    # Fock truncation convergence on the reference constants
    trunc = _truncation_deviation()
    oks.append(trunc <= 1e-4)
    details.append(f"n_max 2 vs 3 deviation {trunc:.1e} (<= 1e-4)")

    check("criterion 8 (property suite)", all(oks), "; ".join(details))


def _truncation_deviation() -> float:
    from rydcav.presets import GAMMA_INTRINSIC, KAPPA_CAVITY

    curves = []
    for n_max in (2, 3):
        p = replace(
            apply_recipe(RegimeRecipe("vdw", 10.0)),
            kappa=KAPPA_CAVITY, gamma_r=GAMMA_INTRINSIC,
            gamma_a=GAMMA_INTRINSIC, gamma_b=GAMMA_INTRINSIC, n_max=n_max,
        )
        basis = p.basis()
        traj = qops.evolve(
            DensityMatrix.pure(basis, "r", "r", 0),
            cavity.build_hamiltonian(p),
            cavity.collapse_operators(p),
            IntegratorOpts(t_max=20.0, n_samples=81, rel_tol=1e-8, abs_tol=1e-11),
            observables={"p_rr": qops.atom_pair_projector(basis, "r", "r")},
            reduce_space=False,
        )
        curves.append(traj.expect["p_rr"].real)
    return float(np.abs(curves[0] - curves[1]).max())


def test_criterion_9_pair_shift_arbitration(jit_warm):
    # phase slope of the shipped configuration at f = 20, decays off
    recipe = RegimeRecipe("vdw", 20.0)
    opts = IntegratorOpts(t_max=500.0, n_samples=1001, rel_tol=1e-6, abs_tol=1e-10)
    traj = cavity.run_figure2(recipe, 0.0, 0.0, opts)
    a = np.vstack([traj.t, np.ones_like(traj.t)]).T
    slope = float(np.linalg.lstsq(a, traj.phi_rr, rcond=None)[0][0])

    # both candidate values evaluated at the published detunings (dw = -g_r)
    published = replace(apply_recipe(recipe), delta_a=recipe.f - 1.0)
    fo = fourth_order(published)
    dev_verbatim = abs(slope - fo.w_ij) / fo.w_ij
    dev_shorthand = abs(slope - fo.w_shorthand) / fo.w_shorthand
    agree = [dev_verbatim <= 0.05, dev_shorthand <= 0.05]
    winner = "shorthand 4/f^3" if agree[1] else "verbatim formula"
    check(
        "criterion 9 (pair-shift arbitration)",
        sum(agree) == 1,
        f"slope = {slope:.4e}; verbatim(dw=-1) = {fo.w_ij:.4e} ({dev_verbatim:.1%} off), "
        f"shorthand = {fo.w_shorthand:.4e} ({dev_shorthand:.1%} off); "
        f"exactly one agrees: {winner} governs the reference dynamics",
    )


def test_arbitration_cross_check_published_detunings(jit_warm):
    """At the published detunings (dw = -g_r) the measured slope follows the
    verbatim eliminated-state formula, not the 4/f^3 shorthand: the formula
    is correct physics; the published recipe values are what is inconsistent
    (see README)."""
    recipe = RegimeRecipe("vdw", 20.0)
    p = replace(apply_recipe(recipe), delta_a=recipe.f - 1.0)
    fo = fourth_order(p)
    opts = IntegratorOpts(
        t_max=math.pi / fo.w_ij, n_samples=601, rel_tol=1e-6, abs_tol=1e-10
    )
    traj = cavity.run_exact(p, opts)
    a = np.vstack([traj.t, np.ones_like(traj.t)]).T
    slope = float(np.linalg.lstsq(a, traj.phi_rr, rcond=None)[0][0])
    # 4th-order accuracy at f = 20 is ~6%; the shorthand is off by 10x
    assert abs(slope - fo.w_ij) / fo.w_ij < 0.10
    assert abs(slope - fo.w_shorthand) / fo.w_shorthand > 5.0


def test_overlay_error_decreases_with_f(ddi_f10, ddi_f20, ddi_f40):
    devs = []
    for traj in (ddi_f10, ddi_f20, ddi_f40):
        recipe = traj.meta["recipe"]
        reduced = reduced_overlay(traj)
        width = 6 * dressing_beat(recipe.f)
        sm_full = moving_average(traj.t, traj.p_rr, width)
        sm_red = moving_average(traj.t, reduced.p_rr, width)
        mask = traj.t <= recipe.oscillation_period
        devs.append(max_abs_difference(sm_full, sm_red, mask))
    assert devs[0] > devs[1] > devs[2]
