import numpy as np
import pytest
from scipy.special import dawsn

from rieszlab.dyadic import Box, Cube
from rieszlab.stepweight import StepWeight
from rieszlab.singular import (KernelSpec, constants, hilbert_steps, hilbert_quad,
                               riesz_rect, riesz_step, riesz_quad, fft_multiplier,
                               periodization_tail)
from rieszlab.convergence import riesz_square_sum


def test_riesz_constants():
    """B_n = c_n A_n ... A_1 equals one in every dimension."""
    two = constants(2)
    assert two.c == pytest.approx(1 / (2 * np.pi))
    assert two.A == pytest.approx((np.pi, 2.0))
    assert constants(3).A[2] == pytest.approx(np.pi / 2)
    for n in range(1, 6):
        assert constants(n).B == pytest.approx(1.0, abs=1e-12)


def test_hilbert_of_intervals():
    assert hilbert_steps([-1.0, 1.0], [1.0], [0.0])[0] == pytest.approx(0.0, abs=1e-15)
    assert hilbert_steps([0.0, 1.0], [1.0], [2.0])[0] == pytest.approx(np.log(2) / np.pi)
    assert hilbert_steps([0.0, 1.0], [1.0], [2.0])[0] == pytest.approx(0.22064, abs=1e-5)


def test_hilbert_closed_form_against_qawc():
    edges = np.array([0.0, 0.25, 0.5, 1.0])
    values = np.array([1.0, 2.0, 0.5])
    for x in (-0.7, 0.1, 0.3, 0.8, 1.9):
        assert hilbert_steps(edges, values, [x])[0] == pytest.approx(
            hilbert_quad(edges, values, x), abs=1e-8)


def test_riesz_of_a_square():
    square = ((-1, -1), (1, 1))
    assert riesz_rect(1, square, (0.0, 0.0)) == pytest.approx(0.0, abs=1e-14)
    expected = constants(2).c * (2 * np.arcsinh(1) - 2 * np.arcsinh(1 / 3))
    assert riesz_rect(1, square, (2.0, 0.0)) == pytest.approx(expected, rel=1e-12)
    assert riesz_rect(2, square, (0.0, 2.0)) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(ValueError):
        riesz_rect(1, square, (1.0, 0.0))


def test_riesz_closed_form_against_cubature():
    root = Cube(2, 0, None, Box.cube((-1, -1), 2))
    W = StepWeight.constant(root, 0)
    x = np.array([2.0, 0.0])
    closed = riesz_step(KernelSpec.riesz(1, 2), W, x[None, :])[0]
    assert riesz_quad(KernelSpec.riesz(1, 2), W, x, tol=1e-10) == pytest.approx(
        closed, abs=1e-8)

    rng = np.random.default_rng(5)
    P = StepWeight(Cube.unit(2), 1, rng.uniform(0.5, 1.5, (2, 2)))
    y = np.array([0.3, 0.6])
    closed = riesz_step(KernelSpec.riesz(2, 2), P, y[None, :])[0]
    assert riesz_quad(KernelSpec.riesz(2, 2), P, y, tol=1e-9) == pytest.approx(
        closed, abs=1e-7)


def test_riesz_square_sum_is_minus_identity():
    n = 32
    x, y = np.meshgrid(np.arange(n) / n, np.arange(n) / n, indexing='ij')
    f = 0.3 + np.cos(2 * np.pi * x) + np.sin(2 * np.pi * (2 * y - x))
    assert np.allclose(riesz_square_sum(f), -(f - f.mean()), atol=1e-12)


def test_periodic_hilbert_of_gaussian():
    """H exp(-x^2) = 2 D(x) / sqrt(pi) up to the wrap-around tail."""
    L = 64.0
    n = 4096
    x = (np.arange(n) / n - 0.5) * L
    f = np.exp(-x ** 2)
    periodic = fft_multiplier(KernelSpec.hilbert(), f, (L,))
    inner = np.abs(x) <= L / 4
    err = np.abs(periodic - 2 / np.sqrt(np.pi) * dawsn(x))[inner].max()
    assert err <= periodization_tail(f, (L,))


def test_kernel_specs():
    assert KernelSpec.riesz(2, 3).label == 'R2'
    assert KernelSpec.iterated((2, 1)).label == 'R^(2,1)'
    assert KernelSpec.hilbert(delta=0.1).truncated
    with pytest.raises(ValueError):
        KernelSpec.riesz(3, 2)
    with pytest.raises(ValueError):
        KernelSpec.iterated((0, 0))
    with pytest.raises(ValueError):
        fft_multiplier(KernelSpec.hilbert(), np.ones(6))
