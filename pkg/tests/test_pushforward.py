import json
import numpy as np
import pytest

from rieszlab.dyadic import Cube
from rieszlab.stepweight import StepWeight
from rieszlab.measure import Measure, lebesgue
from rieszlab.pushforward import (PLMap1D, ComposedMap, RotationMap, PowerMap,
                                  load_map, pushforward, lattice_intervals,
                                  a2_stability_check, random_pl_map,
                                  homeo_condition_check, gap_masses,
                                  cantor_instability_demo)


def test_pushforward_of_a_dirac():
    delta = Measure(points=[[0.0]], masses=[1.0])
    moved = pushforward(delta, PLMap1D.affine(1.0, 1.0))
    assert moved.kind == 'atoms'
    assert np.array_equal(moved.points, [[1.0]])
    assert moved.total_mass() == 1.0


def test_pushforward_of_lebesgue_by_dilation():
    stretched = pushforward(lebesgue(Cube.unit(1)), PLMap1D.affine(2.0))
    assert np.allclose(stretched.intervals, [[0.0, 2.0, 0.5]])
    assert stretched.total_mass() == pytest.approx(1.0)


def test_quarter_turn_of_a_density():
    W = StepWeight(Cube.unit(2), 1, np.array([[1.0, 2.0], [3.0, 4.0]]))
    turned = pushforward(Measure(density=W), RotationMap.quarter_turn(1))
    assert np.array_equal(turned.density.dense(), np.rot90(W.dense()))
    assert turned.total_mass() == pytest.approx(W.total_mass())
    with pytest.raises(ValueError):
        pushforward(Measure(density=W), RotationMap.planar(0.3))


def test_a2_under_identity_and_dilation():
    sigma = lebesgue(Cube.unit(1), 3)
    omega = Measure(intervals=[[0.0, 0.5, 2.0], [0.5, 1.0, 0.5]])
    scan = lattice_intervals(0.0, 1.0, 3)
    ident = a2_stability_check(sigma, omega, PLMap1D.identity(), scan)
    assert ident.after == ident.before
    assert ident.bound == pytest.approx(16 * ident.before)
    dilation = a2_stability_check(sigma, omega, PLMap1D.affine(2.0), scan)
    assert dilation.after == pytest.approx(ident.before / 4, rel=1e-12)


def test_homeomorphism_condition():
    power = homeo_condition_check(PowerMap(3.0))
    assert not power.bounded
    assert power.slope == pytest.approx(2 / 3, rel=1e-6)

    affine = homeo_condition_check(PLMap1D.affine(2.0, 1.0))
    assert affine.bounded
    assert affine.sup_ratio == pytest.approx(0.5)


def test_random_maps_respect_the_norm():
    rng = np.random.default_rng(0)
    for _ in range(20):
        phi = random_pl_map(rng, 4.0, 5)
        assert phi.bilipschitz_norm() <= 4.0 + 1e-9
        assert phi(0.0) == 0.0
        assert phi(1.0) == pytest.approx(phi.ys[-1])
    with pytest.raises(ValueError):
        random_pl_map(rng, 2.0)


def test_inverse_and_composition():
    rng = np.random.default_rng(4)
    phi = random_pl_map(rng, 3.0, 4)
    psi = random_pl_map(rng, 3.0, 4)
    x = np.linspace(-0.5, 1.5, 41)
    assert np.allclose(phi.inverse()(phi(x)), x, atol=1e-13)
    assert np.allclose(phi.compose(psi)(x), ComposedMap(phi, psi)(x), atol=1e-13)


def test_map_file(tmp_path):
    path = tmp_path / 'map.json'
    path.write_text(json.dumps({'kind': 'pl', 'breakpoints': [0.0, 0.5, 1.0],
                                'slopes': [1.0, 3.0]}))
    phi = load_map(path)
    assert phi(1.0) == pytest.approx(2.0)
    assert phi.bilipschitz_norm() == pytest.approx(4.0)


def test_cantor_demo():
    demo = cantor_instability_demo(depth=4)
    assert demo.sigma_pushed
    assert demo.omega_fixed
    assert demo.testing > 0
    assert demo.testing_perturbed > 0
    with pytest.raises(ValueError):
        cantor_instability_demo(depth=4, perturbed=0.05)


def test_cantor_measure():
    omega = Measure.cantor(3)
    assert len(omega.intervals) == 8
    assert len(omega.gaps) == 7
    assert omega.total_mass() == pytest.approx(1.0)
    assert omega.mass(0.0, 1 / 3) == pytest.approx(0.5)


def test_gap_mass_rules():
    gaps = Measure.cantor(2).gaps
    assert np.allclose(gap_masses(gaps, 'uniform'), 1 / 3)
    assert np.allclose(gap_masses(gaps, 'length'), [1 / 3, 1 / 9, 1 / 9])
    with pytest.raises(ValueError):
        gap_masses(gaps, 'harmonic')
