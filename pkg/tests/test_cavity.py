import math
from dataclasses import replace

import numpy as np
import pytest

from rydcav import cavity, qops
from rydcav.cavity import (
    RegimeRecipe,
    SystemParams,
    apply_recipe,
    build_hamiltonian,
    collapse_operators,
    exchange_parameters,
    strong_coupling_f_max,
    validate_regime,
)
from rydcav.presets import GAMMA_INTRINSIC, KAPPA_CAVITY
from rydcav.qops import BasisSpec, DensityMatrix, IntegratorOpts

TWO_PI = 2 * math.pi


class TestSystemParams:
    def test_negative_rate_rejected(self):
        with pytest.raises(ValueError):
            SystemParams(delta_a=1.0, delta_b=1.0, kappa=-0.1)

    def test_two_photon_state_required(self):
        with pytest.raises(ValueError):
            SystemParams(delta_a=1.0, delta_b=1.0, n_max=1)

    def test_near_resonant_inputs_accepted(self):
        # perturbative validity is a report, not a precondition
        p = SystemParams(delta_a=0.0, delta_b=0.5)
        build_hamiltonian(p)


class TestRecipe:
    def test_ddi_detunings(self):
        p = apply_recipe(RegimeRecipe("ddi", 10.0))
        assert p.delta_b == 10.0
        assert p.delta_a == pytest.approx(10.1)
        assert all(g == 1.0 for g in (p.g_br_i, p.g_ar_i, p.g_br_j, p.g_ar_j))

    def test_ddi_rate(self):
        assert RegimeRecipe("ddi", 10.0).nominal_rate == pytest.approx(0.1)

    @pytest.mark.parametrize("f,expected", [(10.0, 4e-3), (20.0, 5e-4)])
    def test_vdw_rate(self, f, expected):
        assert RegimeRecipe("vdw", f).nominal_rate == pytest.approx(expected)

    def test_vdw_detunings_make_recipe_self_consistent(self):
        # delta_omega = -Delta_b is the configuration whose pair shift equals
        # the nominal 4/f^3 (both terms of the eliminated-state formula at 2/f^3)
        from rydcav.effective import fourth_order

        p = apply_recipe(RegimeRecipe("vdw", 10.0))
        assert p.delta_a == 0.0
        fo = fourth_order(p)
        assert fo.w_ij == pytest.approx(4e-3)
        assert fo.w_ij == pytest.approx(fo.w_shorthand)

    def test_f_must_exceed_one(self):
        with pytest.raises(ValueError):
            RegimeRecipe("ddi", 0.5)

    def test_t_pi(self):
        assert RegimeRecipe("vdw", 10.0).t_pi == pytest.approx(math.pi / 4e-3)


class TestBuildHamiltonian:
    def test_hermitian(self):
        h = build_hamiltonian(apply_recipe(RegimeRecipe("ddi", 10.0)))
        assert np.abs(h.data - h.data.conj().T).max() == 0.0

    def test_decoupled_diagonal(self):
        p = SystemParams(delta_a=3.0, delta_b=7.0, g_br_i=0, g_ar_i=0, g_br_j=0, g_ar_j=0)
        h = build_hamiltonian(p)
        basis = p.basis()
        assert np.count_nonzero(h.data - np.diag(np.diag(h.data))) == 0
        diag = np.diag(h.data).real
        assert diag[basis.index("a", "a", 0)] == pytest.approx(6.0)
        assert diag[basis.index("b", "b", 1)] == pytest.approx(-14.0)
        assert diag[basis.index("a", "b", 2)] == pytest.approx(-4.0)
        assert diag[basis.index("r", "r", 0)] == 0.0

    def test_coupling_matrix_element(self):
        p = SystemParams(delta_a=5.0, delta_b=5.0, g_br_i=0.73)
        h = build_hamiltonian(p)
        basis = p.basis()
        el = h.data[basis.index("b", "r", 1), basis.index("r", "r", 0)]
        assert el == pytest.approx(0.73)

    @pytest.mark.parametrize("n", [1, 2])
    def test_single_atom_ladder_splitting(self, n):
        # one atom, b-r coupling only, resonant cavity: the photon ladder
        # splits by 2 sqrt(n) g (oracle: diagonalizing the 2x2 block by hand)
        g = 0.9
        p = SystemParams(delta_a=0.0, delta_b=0.0, g_br_i=g, g_ar_i=0.0,
                         g_br_j=0.0, g_ar_j=0.0)
        h = build_hamiltonian(p)
        basis = p.basis()
        i, j = basis.index("r", "sink", n - 1), basis.index("b", "sink", n)
        block = h.data[np.ix_([i, j], [i, j])]
        w = np.linalg.eigvalsh(block)
        assert w[1] - w[0] == pytest.approx(2 * math.sqrt(n) * g)
        # the block is exactly the resonant coupling, so the full spectrum
        # contains +-sqrt(n) g
        w_full = np.linalg.eigvalsh(h.data)
        assert np.min(np.abs(w_full - math.sqrt(n) * g)) < 1e-12


class TestCollapseOperators:
    def test_channel_count(self):
        p = replace(apply_recipe(RegimeRecipe("vdw", 10.0)),
                    kappa=1e-3, gamma_r=1e-5, gamma_a=1e-5, gamma_b=1e-5)
        assert len(collapse_operators(p)) == 7  # cavity + 3 levels x 2 atoms

    def test_zero_rates_empty(self):
        assert collapse_operators(apply_recipe(RegimeRecipe("vdw", 10.0))) == []


class TestValidateRegime:
    def test_paper_constants_bound(self):
        g_r = TWO_PI * 1e7
        f_max = strong_coupling_f_max(g_r, 1e3, TWO_PI * 3e4)
        assert f_max == pytest.approx((g_r / 1e3) ** (1 / 3))
        assert 35 < f_max < 45  # the quoted bound is ~40

    def test_zero_rates_unbounded(self):
        assert strong_coupling_f_max(1.0, 0.0, 0.0) == math.inf

    def test_f10_paper_rates_pass(self):
        p = replace(apply_recipe(RegimeRecipe("ddi", 10.0)),
                    kappa=KAPPA_CAVITY, gamma_r=GAMMA_INTRINSIC)
        report = validate_regime(p)
        assert report.strong_coupling_gamma
        assert report.strong_coupling_kappa
        assert report.grade_delta_b == "good"
        assert report.f_max > 10

    def test_marginal_grading(self):
        p = SystemParams(delta_a=6.0, delta_b=6.0)
        report = validate_regime(p)
        assert report.grade_delta_b == "marginal"


class TestExchangeParameters:
    def test_approaches_leading_order(self):
        devs = []
        for f in (10.0, 20.0, 40.0):
            d, offset = exchange_parameters(apply_recipe(RegimeRecipe("ddi", f)))
            devs.append(abs(d * f - 1.0))
            assert abs(offset) < 1e-3
        assert devs[0] < 0.02
        # the correction falls off as 1/f^2
        assert devs[1] < devs[0] / 3
        assert devs[2] < devs[1] / 3

    def test_asymmetric_couplings(self):
        p = replace(apply_recipe(RegimeRecipe("ddi", 20.0)), g_br_i=0.8, g_ar_j=0.9)
        d, _ = exchange_parameters(p)
        # the two exchange paths now differ; the splitting reflects their
        # quadrature mean: sqrt((d_ba^2 + d_ab^2) / 2)
        d_ba = 0.8 * 0.9 / 20.0
        d_ab = 1.0 * 1.0 / 20.0
        assert d == pytest.approx(math.sqrt((d_ba**2 + d_ab**2) / 2), rel=0.05)


class TestRunExact:
    def test_exchange_symmetry(self, jit_warm):
        base = replace(
            apply_recipe(RegimeRecipe("ddi", 10.0)),
            g_br_i=1.1, g_ar_i=0.95, g_br_j=0.9, g_ar_j=1.05,
            kappa=KAPPA_CAVITY, gamma_r=GAMMA_INTRINSIC,
        )
        swapped = replace(base, g_br_i=base.g_br_j, g_ar_i=base.g_ar_j,
                          g_br_j=base.g_br_i, g_ar_j=base.g_ar_i)
        opts = IntegratorOpts(t_max=30.0, n_samples=121, rel_tol=1e-8, abs_tol=1e-12)
        t1 = cavity.run_exact(base, opts)
        t2 = cavity.run_exact(swapped, opts)
        assert np.abs(t1.p_rr - t2.p_rr).max() < 1e-10
        assert np.abs(t1.p_ba - t2.p_ab).max() < 1e-10
        assert np.abs(t1.p_ab - t2.p_ba).max() < 1e-10

    def test_populations_match_pure_initial_state(self, jit_warm):
        # the phase-reference branch must not alter the populations
        recipe = RegimeRecipe("ddi", 10.0)
        opts = IntegratorOpts(t_max=40.0, n_samples=201, rel_tol=1e-9, abs_tol=1e-12)
        traj = cavity.run_figure2(recipe, KAPPA_CAVITY, GAMMA_INTRINSIC, opts)

        p = replace(apply_recipe(recipe), kappa=KAPPA_CAVITY,
                    gamma_r=GAMMA_INTRINSIC, gamma_a=GAMMA_INTRINSIC,
                    gamma_b=GAMMA_INTRINSIC)
        basis = p.basis()
        rho0 = DensityMatrix.pure(basis, "r", "r", 0)
        ref = qops.evolve(
            rho0, build_hamiltonian(p), collapse_operators(p), opts,
            observables={"p_rr": qops.atom_pair_projector(basis, "r", "r")},
        )
        assert np.abs(traj.p_rr - ref.expect["p_rr"].real).max() < 1e-7

    def test_fock_truncation_is_structural(self, jit_warm):
        # adding a third photon level does not enlarge the reachable space:
        # the initial excitation number caps the photon count at two
        recipe = RegimeRecipe("vdw", 10.0)
        p2 = replace(apply_recipe(recipe), kappa=KAPPA_CAVITY,
                     gamma_r=GAMMA_INTRINSIC, gamma_a=GAMMA_INTRINSIC,
                     gamma_b=GAMMA_INTRINSIC)
        p3 = replace(p2, n_max=3)
        for p in (p2, p3):
            basis = p.basis()
            rho0 = cavity.initial_state(basis)
            ls = [L.data for L in collapse_operators(p)]
            ssum = sum(ld.conj().T @ ld for ld in ls)
            idx = qops.reachable_subspace(
                rho0.data, [build_hamiltonian(p).data, ssum, *ls]
            )
            labels = [basis.labels()[k] for k in idx]
            assert len(idx) == 25
            assert max(n for _, _, n in labels) == 2

    def test_truncation_convergence_short_window(self, jit_warm):
        # direct dynamical check without subspace reduction
        recipe = RegimeRecipe("vdw", 10.0)
        opts = IntegratorOpts(t_max=15.0, n_samples=61, rel_tol=1e-8, abs_tol=1e-11)
        results = []
        for n_max in (2, 3):
            p = replace(apply_recipe(recipe), kappa=KAPPA_CAVITY,
                        gamma_r=GAMMA_INTRINSIC, gamma_a=GAMMA_INTRINSIC,
                        gamma_b=GAMMA_INTRINSIC, n_max=n_max)
            basis = p.basis()
            rho0 = DensityMatrix.pure(basis, "r", "r", 0)
            traj = qops.evolve(
                rho0, build_hamiltonian(p), collapse_operators(p), opts,
                observables={"p_rr": qops.atom_pair_projector(basis, "r", "r")},
                reduce_space=False,
            )
            results.append(traj.expect["p_rr"].real)
        assert np.abs(results[0] - results[1]).max() < 1e-4

    def test_ddi_oscillation_between_one_and_zero(self, ddi_f20_unitary):
        traj = ddi_f20_unitary
        assert traj.p_rr[0] == pytest.approx(1.0, abs=1e-9)
        assert traj.p_rr.min() < 0.01
        assert traj.p_rr.max() <= 1.0 + 1e-8
