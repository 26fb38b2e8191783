import numpy as np
import pytest

from rieszlab.dyadic import Cube
from rieszlab.weights import (CascadeParams, cascade, stopping_cubes,
                              stopping_mass, hitting_probability, hitting_mc,
                              nazarov_pair, nazarov_gamma, tensorize,
                              large_doubling_variant)
from rieszlab.diagnostics import gamma_horizontal, a2_dyadic


def test_cascade_values():
    assert np.allclose(cascade(CascadeParams(1.0, 0.1, 1)).values, [0.9, 1.1])
    assert np.array_equal(cascade(CascadeParams(1.0, 0.0, 5)).values, np.ones(32))
    assert np.allclose(cascade(CascadeParams(0.5, 0.2, 2)).values,
                       [0.32, 0.48, 0.48, 0.72])


def test_cascade_rejects_bad_parameters():
    with pytest.raises(ValueError):
        cascade(CascadeParams(1.0, 1.0, 3))
    with pytest.raises(ValueError):
        cascade(CascadeParams(1.0, 0.1, 3, Cube.unit(2)))


def test_stopping_cubes():
    """The root qualifies when a >= 1/(1+eps); two low leaves never do."""
    W = cascade(CascadeParams(0.9, 0.2, 3))
    assert stopping_cubes(W, 0.2) == [Cube.unit(1)]
    assert stopping_cubes(cascade(CascadeParams(0.5, 0.2, 1)), 0.2) == []


def test_stopping_mass_matches_hitting_recursion():
    W = cascade(CascadeParams(0.5, 0.5, 10))
    assert stopping_mass(W, 0.5) == pytest.approx(
        hitting_probability(0.5, 0.5, 10), abs=1e-12)


def test_hitting_probability():
    assert hitting_probability(0.9, 0.2, 5) == 1.0
    assert hitting_probability(0.5, 0.5, 30) >= 0.5 - 1e-3
    profile = [hitting_probability(0.3, 0.4, d) for d in range(12)]
    assert all(np.diff(profile) >= 0)


def test_hitting_monte_carlo():
    """Seeded blocks reproduce exactly; a walk above threshold hits at once."""
    first = hitting_mc(0.5, 0.5, 3000, 200, seed=7)
    again = hitting_mc(0.5, 0.5, 3000, 200, seed=7)
    assert first == again
    assert first.lower <= first.estimate <= first.upper
    assert hitting_mc(0.99, 0.5, 500, 10, seed=1).estimate == 1.0


def test_nazarov_pair():
    pair = nazarov_pair(0.5, 0.1, 0.9, depth=20)
    assert pair.gamma == pytest.approx(0.1, abs=1e-6)
    assert pair.epsilon < 0.3
    assert a2_dyadic(pair.U, pair.V) <= 1 + 1e-12
    assert pair.U.mean() == pytest.approx(0.5)


def test_nazarov_pair_outside_region():
    with pytest.raises(ValueError, match='Omega'):
        nazarov_pair(0.5, 0.2, 0.9)


def test_nazarov_gamma_vanishes_with_epsilon():
    assert nazarov_gamma(0.5, 0.0, 12) == 0.0
    assert nazarov_gamma(0.5, 1e-4, 12) < 1e-6
    assert nazarov_gamma(0.5, 0.2, 12) > nazarov_gamma(0.5, 1e-2, 12)


def test_tensorization_keeps_testing_value():
    V = cascade(CascadeParams(0.5, 0.3, 6))
    U = cascade(CascadeParams(1.0, -0.3, 6))
    planar = gamma_horizontal(tensorize(V, 2), tensorize(U, 2))
    assert planar == pytest.approx(gamma_horizontal(V, U), rel=1e-12)
    flat = tensorize(cascade(CascadeParams(1.0, 0.0, 1)), 2)
    assert np.array_equal(flat.dense(), np.ones((2, 2)))


def test_large_doubling_variant():
    V = cascade(CascadeParams(1.0, -0.2, 4))
    U = cascade(CascadeParams(0.5, 0.2, 4))
    V2, U2 = large_doubling_variant(V, U, 10.0)
    top = U2.averages(1)
    assert top[1] / top[0] == pytest.approx(10.0)
    assert gamma_horizontal(U2, V2) >= 0.5 * gamma_horizontal(U, V)

    _, U1 = large_doubling_variant(V, U, 1.0)
    top = U1.averages(1)
    assert top[1] / top[0] == pytest.approx(1.0)
