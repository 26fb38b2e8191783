from fractions import Fraction
import numpy as np
import pytest

from rieszlab.dyadic import Box, Cube
from rieszlab.stepweight import StepWeight, TensorizedStepWeight
from rieszlab.weights import CascadeParams, cascade


def test_haar_coefficient_of_two_step_weight():
    W = StepWeight(Cube.unit(1), 1, [0.9, 1.1])
    assert W.haar_coefficient(Cube.unit(1)) == pytest.approx(-0.1)
    assert W.haar_level(0)[0] == pytest.approx(-0.1)


def test_constant_weight_has_no_haar_energy():
    W = StepWeight.constant(Cube.unit(2), 3, 2.5)
    spectrum = W.haar_spectrum()
    assert spectrum.energy() == 0.0
    assert spectrum.mean == 2.5


def test_tensorized_weight_is_horizontal_only():
    T = TensorizedStepWeight(Cube.unit(2), 2, [1.0, 2.0, 3.0, 4.0])
    dense = StepWeight(Cube.unit(2), 2, T.dense())
    for level in range(2):
        assert not np.any(T.haar_level(level, 'vertical'))
        assert not np.any(T.haar_level(level, 'checkerboard'))
        assert np.allclose(T.haar_level(level, 'horizontal'),
                           dense.haar_level(level, 'horizontal'), atol=1e-15)
        assert np.allclose(dense.haar_level(level, 'vertical'), 0.0, atol=1e-15)


def test_haar_reconstruction():
    W = cascade(CascadeParams(0.5, 0.3, 6))
    assert np.allclose(W.haar_spectrum().reconstruct(), W.dense(), atol=1e-13)

    P = StepWeight(Cube.unit(2), 3, np.random.default_rng(3).uniform(0.5, 2, 64))
    assert np.allclose(P.haar_spectrum().reconstruct(), P.dense(), atol=1e-13)


def test_averages_and_masses():
    W = StepWeight(Cube.unit(1), 2, [1.0, 2.0, 3.0, 4.0])
    assert np.array_equal(W.averages(1), [1.5, 3.5])
    assert W.average(Cube(1, 1, (1,))) == 3.5
    assert W.mass(Box((0,), (Fraction(1, 2),))) == pytest.approx(0.75)
    assert W.mass(Box((Fraction(1, 8),), (Fraction(3, 8),))) == pytest.approx(0.375)
    assert W.total_mass() == pytest.approx(2.5)


def test_restrict_and_refine():
    W = StepWeight(Cube.unit(1), 2, [1.0, 2.0, 3.0, 4.0])
    right = W.restrict(Cube(1, 1, (1,)))
    assert right.depth == 1
    assert np.array_equal(right.values, [3.0, 4.0])
    assert np.array_equal(W.refine(3).averages(2), W.values)
    with pytest.raises(ValueError):
        W.refine(1)

    P = StepWeight(Cube.unit(2), 1, [[1.0, 2.0], [3.0, 4.0]])
    assert np.array_equal(P.refine(2).dense(), [[1.0, 1.0, 2.0, 2.0],
                                                [1.0, 1.0, 2.0, 2.0],
                                                [3.0, 3.0, 4.0, 4.0],
                                                [3.0, 3.0, 4.0, 4.0]])


def test_value_count_is_checked():
    with pytest.raises(ValueError):
        StepWeight(Cube.unit(2), 2, np.ones(8))


def test_csv_file(tmp_path):
    """Header lines carry the root; values survive at full precision."""
    root = Cube(2, 0, None, Box.cube((-1, -1), 2))
    W = StepWeight(root, 2, np.arange(16) / 3.0)
    path = tmp_path / 'weight.csv'
    W.to_csv(path)
    assert path.read_text().startswith('# dim: 2\n# depth: 2\n')
    loaded = StepWeight.from_csv(path)
    assert loaded.root == root
    assert np.array_equal(loaded.values, W.values)


def test_quarter_turn_of_tensorized_weight():
    T = TensorizedStepWeight(Cube.unit(2), 1, [1.0, 3.0])
    assert np.array_equal(T.rot90().dense(), np.rot90(T.dense()))
