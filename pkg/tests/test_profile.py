import numpy as np
import pytest

from beamwave.errors import HomotopyBroken, InvalidArgument, NoConvergence, TrivialSolution
from beamwave.grid import RealField, make_grid
from beamwave.nonlinearity import Nonlinearity
from beamwave.params import BEAM, BeamParameters, NlsParameters, ProfileEquation
from beamwave.profile import (HomotopyPlan, beam_plan, homotopy_solve, newton_cg_solve,
                              profile_residual, residual, seed_profile, seed_quadratic,
                              solve_beam)


def test_seeds_solve_second_order_problems():
    g = make_grid(1024, 12 * np.pi)
    for om in (0.5, 1.0):
        eq = ProfileEquation(Nonlinearity.cubic(), alpha=0.0, mu=-1.0, omega=om)
        assert np.max(np.abs(residual(seed_profile(g, om).values, eq, g))) < 1e-8
        eq = ProfileEquation(Nonlinearity.exponential(), alpha=0.0, mu=-1.0, omega=om, blend=0.0)
        assert np.max(np.abs(residual(seed_quadratic(g, om).values, eq, g))) < 1e-8


def test_beam_wave_converges_even_and_centered(wave_c1):
    w = wave_c1
    assert w.residual_sup < 1e-10
    assert np.max(np.abs(profile_residual(w).values)) < 1e-10
    assert w.centered
    phi = w.phi
    np.testing.assert_allclose(phi, phi[w.grid.reflection], atol=1e-12)
    assert np.argmax(np.abs(phi)) == w.grid.n_points // 2
    assert phi[w.grid.n_points // 2] > 0


def test_residual_from_samples_close_to_coefficients(wave_c1):
    # re-evaluating from rounded samples loses only a roundoff-level amount
    r = profile_residual(wave_c1.profile, wave_c1.equation).values
    assert np.max(np.abs(r)) < 1e-9


def test_nls_with_unit_parameters_is_the_beam_wave(grid256, wave_c1, wave_nls):
    assert wave_nls.residual_sup < 1e-10
    assert np.max(np.abs(wave_nls.phi - wave_c1.phi)) < 1e-9
    assert wave_nls.params == NlsParameters(1.0, 1.0)


def test_zero_speed_and_general_polynomial(grid256):
    w0 = solve_beam(BeamParameters(0.0), grid256)
    assert w0.residual_sup < 1e-10
    nl = Nonlinearity.polynomial(1.0, 0.5)
    w = solve_beam(BeamParameters(0.8, nonlinearity=nl), grid256)
    assert w.residual_sup < 1e-10
    assert w.equation.nonlinearity == nl


def test_exponential_family(grid256):
    w = solve_beam(BeamParameters(1.3, nonlinearity=Nonlinearity.exponential()), grid256)
    assert w.residual_sup < 1e-10
    assert w.phi[w.grid.n_points // 2] < 0


def test_translated_seed_is_recentred(wave_c1):
    g = wave_c1.grid
    shifted = RealField(np.roll(wave_c1.phi, 17), g)
    w = newton_cg_solve(shifted, wave_c1.equation)
    assert np.max(np.abs(w.phi - wave_c1.phi)) < 1e-8


def test_zero_seed_is_trivial(grid256):
    eq = BeamParameters(1.0).equation()
    with pytest.raises(TrivialSolution):
        newton_cg_solve(RealField(np.zeros(256), grid256), eq)


def test_nonpositive_symbol_cannot_converge(grid256):
    eq = ProfileEquation(Nonlinearity.cubic(), mu=2.5)
    with pytest.raises(NoConvergence):
        newton_cg_solve(seed_profile(grid256), eq)


def test_newton_step_cap(grid256):
    eq = BeamParameters(1.0).equation()
    with pytest.raises(NoConvergence):
        newton_cg_solve(seed_profile(grid256), eq, max_outer=1)


def test_plan_validation():
    start = ProfileEquation(Nonlinearity.cubic(), alpha=0.0, mu=-1.0)
    with pytest.raises(InvalidArgument):
        HomotopyPlan(start, [("mu", 0.0, 1.0, 5)])
    with pytest.raises(InvalidArgument):
        HomotopyPlan(start, [("beta", 0.0, 1.0, 5)])
    with pytest.raises(InvalidArgument):
        HomotopyPlan(start, [("alpha", 0.0, 1.0, 0)])
    plan = beam_plan(BeamParameters(1.2))
    assert plan.target() == BeamParameters(1.2).equation()


def test_broken_homotopy_reports_stage(grid256):
    start = ProfileEquation(Nonlinearity.cubic(), alpha=0.0, mu=-1.0)
    plan = HomotopyPlan(start, [("alpha", 0.0, 1.0, 10), ("mu", -1.0, 2.5, 4)], BEAM)
    with pytest.raises(HomotopyBroken) as info:
        homotopy_solve(plan, grid256)
    assert info.value.stage == 1


def test_grid_refinement_is_spectral():
    phis = [solve_beam(BeamParameters(1.0), make_grid(n, 12 * np.pi)).phi for n in (256, 512)]
    assert abs(phis[0].max() - phis[1].max()) < 1e-9
