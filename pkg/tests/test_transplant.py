import numpy as np
import pytest

from rieszlab.dyadic import Cube, JumpSchedule
from rieszlab.stepweight import StepWeight
from rieszlab.weights import CascadeParams, cascade, tensorize
from rieszlab.transplant import (sign_pattern, transplant, modified_transplant,
                                 law_residual, supervisor_law_residual,
                                 unit_cell_factor, mu_tau_mass_1d,
                                 global_extension, ResolutionOverflowError)
from rieszlab.diagnostics import adjacency_constant, is_flat, a2_adjacent_unions


@pytest.fixture
def planar_sources():
    sigma = tensorize(cascade(CascadeParams(0.5, 0.05, 8)), 2)
    omega = tensorize(cascade(CascadeParams(1.0, -0.05, 8)), 2)
    return sigma, omega


def test_sign_patterns():
    assert np.array_equal(sign_pattern(Cube.unit(1), 2).values, [1, -1, 1, -1])
    assert np.array_equal(sign_pattern(Cube.unit(2), 1, 'checkerboard').values,
                          [[1, -1], [-1, 1]])
    with pytest.raises(ValueError):
        sign_pattern(Cube.unit(1), 0)


def test_transplant_of_two_step_weight():
    """E_Q u_1 = E_{S(Q)} U leaf by leaf."""
    U = StepWeight(Cube.unit(1), 1, [0.9, 1.1])
    state = transplant(Cube.unit(1), JumpSchedule([2]), U)
    assert state.t == 1
    assert np.allclose(state.stage().values, [0.9, 1.1, 0.9, 1.1])
    assert state.stage(0).values[0] == pytest.approx(1.0)


def test_unit_jumps_give_martingale_averages():
    W = cascade(CascadeParams(0.5, 0.3, 4))
    state = transplant(Cube.unit(1), JumpSchedule([1, 1, 1]), W)
    for t in range(4):
        assert np.allclose(state.stage(t).values, W.averages(t), rtol=0, atol=1e-15)


def test_constant_source_stays_constant():
    W = StepWeight.constant(Cube.unit(2), 2, 3.0)
    state = transplant(Cube.unit(2), JumpSchedule([2, 1]), W)
    for t in range(3):
        assert np.all(state.stage(t).dense() == 3.0)
    assert np.all(modified_transplant(state).stage().dense() == 3.0)


def test_transplant_laws(planar_sources):
    sigma, _ = planar_sources
    state = transplant(sigma.root, JumpSchedule([2, 3, 3]), sigma)
    assert supervisor_law_residual(state) <= 1e-12
    assert law_residual(state) <= 1e-12
    assert state.stage().depth == 8


def test_depth_cap():
    W = cascade(CascadeParams(0.5, 0.3, 4))
    with pytest.raises(ResolutionOverflowError):
        transplant(Cube.unit(1), JumpSchedule([3, 3]), W, cap=5)


def test_modified_transplant_is_flat(planar_sources):
    """Touching cubes of the modified weights compare within 1 +- tau while
    the plain transplant jumps at the edges of the jump grid."""
    sigma, omega = planar_sources
    schedule = JumpSchedule([3, 3, 3])
    plain_v = transplant(sigma.root, schedule, sigma)
    plain_u = transplant(omega.root, schedule, omega)
    mod_v, mod_u = modified_transplant(plain_v), modified_transplant(plain_u)
    for plain, state in ((plain_v, mod_v), (plain_u, mod_u)):
        touching = adjacency_constant(state.stage(), 'touching')
        assert 1.0 < touching
        assert is_flat(touching, 0.5)
        assert touching < adjacency_constant(plain.stage(), 'touching')
        assert law_residual(state) <= 1e-12
    assert a2_adjacent_unions(mod_v.stage(), mod_u.stage()) <= 81


def test_unit_cell_factors():
    """Exact (1+|x|)^-tau masses of unit cells on the line and in the plane."""
    tau = 0.1
    ratio = unit_cell_factor((0,), tau) / unit_cell_factor((1,), tau)
    assert ratio == pytest.approx((2 ** 0.9 - 1) / (3 ** 0.9 - 2 ** 0.9), rel=1e-12)
    assert ratio == pytest.approx(1.054, abs=1e-3)
    assert unit_cell_factor((-1,), tau) == pytest.approx(unit_cell_factor((0,), tau))
    assert mu_tau_mass_1d(0.0, 1.0, 1e-12) == pytest.approx(1.0, rel=1e-9)
    assert unit_cell_factor((-2, 1), tau) == pytest.approx(
        unit_cell_factor((1, 1), tau), rel=1e-12)


def test_global_extension():
    W = StepWeight.constant(Cube.unit(1), 1, 1.0)
    ext = global_extension(W, W, 0.1, L=2)
    assert ext.sigma.root.box().lower == (-2,)
    assert ext.factors.dense().shape == (4,)
    # a constant weight becomes the lattice factor profile
    assert np.allclose(ext.sigma.averages(2), ext.factors.dense())
    assert ext.tail == pytest.approx(3.0 ** -0.1)
    with pytest.raises(ValueError):
        global_extension(W, W, 0.1, L=3)
