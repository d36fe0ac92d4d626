import numpy as np
import pytest

from beamwave.continuation import (BranchPoint, ContinuationCurve, Controls, Termination,
                                   branch_diagnostics, check_index_counts, eigen_transition,
                                   extend_branch, locate_transition, make_point,
                                   momentum_derivative, parameter_of)
from beamwave.errors import IndexMismatch, NoTransitionInRange
from beamwave.profile import profile_residual


def _synthetic(params, momentum, max_re=None):
    pts = [BranchPoint(p, None, 0.0, m) for p, m in zip(params, momentum)]
    if max_re is not None:
        for pt, r in zip(pts, max_re):
            pt.max_re_lambda = r
    return ContinuationCurve(pts, 1)


@pytest.fixture(scope="module")
def short_branch(wave_c1):
    return extend_branch(wave_c1, 1.1, ds=0.02, controls=Controls(ds_max=0.02))


def test_zero_length_request(wave_c1):
    curve = extend_branch(wave_c1, 1.0)
    assert len(curve) == 1
    assert curve.termination is Termination.REACHED_END


def test_short_branch_lands_on_target(short_branch):
    c = short_branch
    assert c.termination is Termination.REACHED_END
    assert c.parameters[0] == pytest.approx(1.0)
    assert c.parameters[-1] == 1.1
    assert np.all(np.diff(c.parameters) > 0)
    for pt in c.points:
        assert np.max(np.abs(profile_residual(pt.wave).values)) < 1e-9
        assert parameter_of(pt.wave) == pytest.approx(pt.parameter)


def test_branch_momentum_matches_point(short_branch):
    pt = short_branch.points[-1]
    fresh = make_point(pt.wave)
    assert fresh.diag_momentum == pytest.approx(pt.diag_momentum)
    assert pt.diag_momentum == pytest.approx(pt.parameter * pt.diag_norm)


def test_branch_runs_backwards(wave_c1):
    curve = extend_branch(wave_c1, 0.95, ds=0.02)
    assert curve.direction == -1
    assert curve.parameters[-1] == 0.95


def test_nls_branch_norm_grows_with_omega(wave_nls):
    curve = extend_branch(wave_nls, 1.2, ds=0.05)
    assert curve.termination is Termination.REACHED_END
    assert np.all(np.diff(curve.momentum) > 0)


def test_diagnostics_and_index_counts(short_branch):
    rows = branch_diagnostics(short_branch)
    assert len(rows) == len(short_branch)
    assert all(pt.max_re_lambda > 0.5 for pt in short_branch.points)
    assert all(pt.vk_value > 0 for pt in short_branch.points)
    assert len(check_index_counts(short_branch)) == len(short_branch)


def test_index_mismatch_detected():
    curve = _synthetic([1.0], [1.0])
    pt = curve.points[0]
    pt.counts, pt.vk_value, pt.n_L = (1, 0, 0), -1.0, 1
    with pytest.raises(IndexMismatch):
        check_index_counts(curve)


def test_locate_transition_on_parabola():
    p = np.linspace(1.0, 1.5, 11)
    curve = _synthetic(p, 3.0 - (p - 1.234) ** 2)
    assert locate_transition(curve) == pytest.approx(1.234, abs=1e-12)
    with pytest.raises(NoTransitionInRange):
        locate_transition(_synthetic(p, p))


def test_eigen_transition_square_root_law():
    p = np.linspace(1.2, 1.4, 21)
    re = np.sqrt(np.clip(1.33 - p, 0, None))
    curve = _synthetic(p, np.zeros_like(p), re)
    assert eigen_transition(curve) == pytest.approx(1.33, abs=1e-9)
    with pytest.raises(NoTransitionInRange):
        eigen_transition(_synthetic(p, p, np.ones_like(p)))


def test_momentum_derivative_exact_for_quartics():
    p = np.array([0.0, 0.1, 0.25, 0.3, 0.45, 0.5, 0.62])
    m = p ** 4 - 2 * p ** 2
    d = momentum_derivative(_synthetic(p, m))
    assert np.isnan(d[0]) and np.isnan(d[-1])
    np.testing.assert_allclose(d[2:-2], 4 * p[2:-2] ** 3 - 4 * p[2:-2], atol=1e-12)
