import numpy as np
import pytest

from beamwave.errors import FredholmViolation
from beamwave.grid import RealField, beam_symbol, make_grid
from beamwave.params import BEAM, BeamParameters
from beamwave.profile import TravelingWave
from beamwave.stability import (L_MINUS, L_PLUS, assemble_operator, classify, eigen_linearization,
                                index_report, internal_modes, linearization_matrix, morse_index,
                                numerical_kernel, ranked_mode, solve_L_plus_constrained, vk_beam,
                                vk_nls)


@pytest.fixture(scope="module")
def report_c1(wave_c1):
    return eigen_linearization(wave_c1)


@pytest.fixture(scope="module")
def report_c1375(wave_c1375):
    return eigen_linearization(wave_c1375)


def _zero_wave(c, n=32):
    g = make_grid(n, 2 * np.pi)
    return TravelingWave(RealField(np.zeros(n), g), BeamParameters(c).equation(), BEAM, 0.0)


def test_zero_wave_operator_is_the_symbol():
    w = _zero_wave(1.1)
    ev = np.sort(np.linalg.eigvalsh(assemble_operator(w, L_PLUS).entries))
    np.testing.assert_allclose(ev, np.sort(beam_symbol(w.grid, 1.1)), rtol=1e-9, atol=1e-9)
    assert morse_index(assemble_operator(w)) == 0


def test_zero_wave_dispersion_relation():
    c = 0.9
    w = _zero_wave(c)
    A, _ = linearization_matrix(w)
    lam = np.linalg.eigvals(A)
    assert np.max(np.abs(lam.real)) < 1e-8
    k = w.grid.wavenumbers
    s = beam_symbol(w.grid, c)
    k = np.where(np.abs(k) == np.max(np.abs(k)), 0.0, k)  # D1 drops the Nyquist mode
    sigma = np.concatenate([c * k + np.sqrt(c * c * k * k + s), c * k - np.sqrt(c * c * k * k + s)])
    np.testing.assert_allclose(np.sort(lam.imag), np.sort(sigma), rtol=1e-7, atol=1e-7)


def test_kernels_of_L_plus_and_L_minus(wave_c1):
    g = wave_c1.grid
    Lp = assemble_operator(wave_c1, L_PLUS)
    Lm = assemble_operator(wave_c1, L_MINUS)
    d1 = np.fft.ifft(1j * g.wavenumbers * wave_c1.coefficients).real
    assert np.max(np.abs(Lp @ d1)) < 1e-7
    assert np.max(np.abs(Lm @ wave_c1.phi)) < 1e-8
    assert morse_index(Lp) == 1
    assert numerical_kernel(Lp).shape[1] == 1


def test_constrained_solve_roundtrip(wave_c1):
    g = wave_c1.grid
    Lp = assemble_operator(wave_c1)
    d1 = np.fft.ifft(1j * g.wavenumbers * wave_c1.coefficients).real
    rhs = np.exp(-g.x ** 2)  # even, hence orthogonal to phi'
    w = solve_L_plus_constrained(Lp, rhs)
    assert np.max(np.abs(Lp @ w.values - rhs)) < 1e-8
    assert abs(w.values @ d1) < 1e-8
    with pytest.raises(FredholmViolation):
        solve_L_plus_constrained(Lp, d1)


def test_vk_signs(wave_c1, wave_c1375, wave_nls):
    assert vk_beam(wave_c1) > 0
    assert vk_beam(wave_c1375) < 0
    assert vk_nls(wave_nls) < 0


def test_stable_wave_spectrum(report_c1375):
    r = report_c1375
    assert r.max_re < 1e-4
    assert r.counts == (0, 0, 0)
    assert r.index_identity_ok
    v = index_report(r)
    assert v.stable and v.n_L == 1 and v.n_D == 1


def test_unstable_wave_spectrum(report_c1):
    r = report_c1
    assert r.counts == (1, 0, 0)
    assert r.index_identity_ok
    assert abs(r.max_re - 0.885) / 0.885 < 0.05
    assert not index_report(r).stable


def test_hamiltonian_quartet_symmetry(report_c1):
    lam = report_c1.eigenvalues
    big = lam[np.abs(lam) > 1e-3]
    for target in (-big, big.conj()):
        d = np.min(np.abs(big[:, None] - target[None, :]), axis=1)
        assert np.max(d / np.maximum(1.0, np.abs(big))) < 1e-6


def test_classify_counts():
    lam = np.array([0.5, -0.5, 0.3 + 0.2j, 0.3 - 0.2j, -0.3 + 0.2j, -0.3 - 0.2j, 2j, -2j, 3j, 1e-5])
    signs = np.array([1, 1, 1, 1, 1, 1, -1, -1, 1, 1])
    assert classify(lam, signs) == (1, 1, 1)


def test_internal_modes_and_ranked_mode(wave_c1, report_c1):
    modes = internal_modes(report_c1)
    assert np.any(np.abs(modes - report_c1.max_re) < 1e-9)
    lam, v, w = ranked_mode(wave_c1)
    assert lam == pytest.approx(report_c1.max_re)
    assert v.grid.spacing * np.sum(v.values ** 2) == pytest.approx(1.0)
    assert v.values[v.grid.n_points // 2] > 0


def test_nls_spectrum(wave_nls):
    r = eigen_linearization(wave_nls)
    assert r.max_re < 1e-4
    assert r.index_identity_ok
    assert r.morse_L_plus == 1 and r.morse_L_minus == 0
