import numpy as np
import pytest

from rieszlab.singular import KernelSpec, fft_multiplier
from rieszlab.diagnostics import weak_probe, DENSE_RULE
from rieszlab.convergence import (alt_series_bound_check, exposing_coefficient,
                                  rotation_exposing, reduction_terms,
                                  reduction_expansion, riesz_square_sum,
                                  representation_table, decay_rate,
                                  hilbert_family, riesz_family)


def test_alternating_series_bound():
    flat = alt_series_bound_check(lambda x: np.ones_like(x), 5)
    assert flat.lhs == pytest.approx(0.0, abs=1e-15)

    ramp = alt_series_bound_check(lambda x: x, 6)
    assert ramp.lhs == pytest.approx(2.0 ** -7, rel=1e-12)
    assert ramp.bound == pytest.approx(2.0 ** -6)
    assert ramp.lhs <= ramp.bound
    coarse = alt_series_bound_check(lambda x: x, 5)
    assert coarse.lhs / ramp.lhs == pytest.approx(2.0, rel=1e-10)


def test_exposing_rotation():
    assert exposing_coefficient((1, 2), np.pi / 4) == pytest.approx(np.sqrt(2) / 4)

    pure = rotation_exposing((3, 0))
    assert np.array_equal(pure.rotation, np.eye(2))
    assert pure.coefficient == 1.0

    mixed = rotation_exposing((1, 1))
    assert mixed.coefficient == pytest.approx(0.5, rel=1e-6)
    assert mixed.angle == pytest.approx(np.pi / 4, abs=1e-3)

    spatial = rotation_exposing((1, 1, 1))
    R = spatial.rotation
    assert np.allclose(R.T @ R, np.eye(3), atol=1e-12)
    assert np.linalg.det(R) == pytest.approx(1.0)
    assert np.allclose(R[:, 0], np.full(3, 1 / np.sqrt(3)))
    assert spatial.coefficient == pytest.approx(3.0 ** -1.5)

    with pytest.raises(ValueError):
        rotation_exposing((0, 0))


def test_reduction_terms():
    assert reduction_terms(2, 2) == [(-1, None), (-1, (0, 2))]
    assert reduction_terms(3, 2) == [(-1, (1, 0)), (-1, (1, 2))]
    assert len(reduction_terms(4, 3)) == 1 + 2 * 2
    with pytest.raises(ValueError):
        reduction_terms(0, 2)


def test_reduction_matches_iterated_transform():
    f = np.random.default_rng(2).normal(size=(16, 16))
    direct = fft_multiplier(KernelSpec.iterated((3, 0)), f)
    assert np.allclose(reduction_expansion(3, f), direct, atol=1e-10)
    direct = fft_multiplier(KernelSpec.iterated((4, 0)), f)
    assert np.allclose(reduction_expansion(4, f), direct, atol=1e-10)


def test_riesz_square_sum_in_three_dimensions():
    n = 16
    x, y, z = np.meshgrid(*(np.arange(n) / n,) * 3, indexing='ij')
    f = np.cos(2 * np.pi * x) + np.sin(2 * np.pi * (y + z)) + 0.5 * np.cos(2 * np.pi * (x - 2 * z))
    assert np.allclose(riesz_square_sum(f), -(f - f.mean()), atol=1e-12)


def test_decay_rate():
    ks = [2, 3, 4, 5]
    assert decay_rate(ks, [3.0 * 2.0 ** -k for k in ks]) == pytest.approx(1.0)
    assert decay_rate(ks, [4.0 ** -k for k in ks]) == pytest.approx(2.0)


def test_sign_pattern_pairs_to_zero_with_constants():
    family = hilbert_family('s_k', rule=DENSE_RULE)
    pairings = weak_probe(family, lambda x: np.ones_like(x), [2, 3, 4])
    assert np.allclose(pairings, 0.0, atol=1e-13)


def test_probe_families_reject_unknown_names():
    with pytest.raises(ValueError):
        hilbert_family('t_k')
    with pytest.raises(ValueError):
        riesz_family('R2s_k')


def test_riesz_probe_grid_shapes():
    points, weights, values = riesz_family('R1s_k', rule=DENSE_RULE)(2)
    assert points.shape == (len(weights), 2)
    assert values.shape == weights.shape
    assert np.all(weights > 0)


@pytest.mark.slow
def test_representation_distance_decays():
    table = representation_table([3, 5], rule=DENSE_RULE)
    assert list(table.k) == [3, 5]
    assert table.r2_norm.iloc[1] < table.r2_norm.iloc[0]
    assert table.rep_distance.iloc[1] < table.rep_distance.iloc[0]
    assert (table.hilbert_square_mean > 0).all()
