from fractions import Fraction
import numpy as np
import pytest

from rieszlab.dyadic import Cube, JumpSchedule
from rieszlab.stepweight import StepWeight
from rieszlab.weights import CascadeParams, cascade, tensorize
from rieszlab.transplant import transplant
from rieszlab.singular import KernelSpec
from rieszlab.quadrature import QuadratureError
from rieszlab.diagnostics import (gamma_horizontal, square_function_testing,
                                  a2_dyadic, a2_classical, a2_adjacent_unions,
                                  a_infty_char, adjacency_constant, is_flat,
                                  halo_mass, riesz_testing, testing_scan,
                                  rotation_swap, discrepancy, testing_report,
                                  rule_for_tolerance, TestingRule, DENSE_RULE)


def cascade_pair(a, eps, depth):
    return (cascade(CascadeParams(a, eps, depth)),
            cascade(CascadeParams(1.0, -eps, depth)))


def test_cascade_testing_value():
    """gamma(W(a, eps), W(1, -eps)) = a^2 (1 - (1 - eps^2)^N)."""
    assert gamma_horizontal(*cascade_pair(0.5, 0.5, 2)) == pytest.approx(0.109375)
    V, U = cascade_pair(0.4, 0.3, 8)
    assert gamma_horizontal(V, U) == pytest.approx(0.16 * (1 - 0.91 ** 8), rel=1e-12)
    assert square_function_testing(V, U) == pytest.approx(gamma_horizontal(V, U),
                                                          rel=1e-12)


def test_constant_weight_has_zero_testing_value():
    V = StepWeight.constant(Cube.unit(1), 4)
    U = cascade(CascadeParams(1.0, 0.4, 4))
    assert gamma_horizontal(V, U) == 0.0


def test_a2_of_lebesgue():
    one = StepWeight.constant(Cube.unit(2), 3)
    assert a2_dyadic(one, one) == 1.0
    assert a2_classical(one, one) == pytest.approx(1.0)
    assert a2_adjacent_unions(one, one) == pytest.approx(1.0)


def test_classical_a2_dominates_dyadic():
    V, U = cascade_pair(0.5, 0.4, 6)
    assert a2_classical(V, U, scan_depth=4) >= a2_dyadic(V, U)


def test_a_infinity_characteristic():
    assert a_infty_char(StepWeight.constant(Cube.unit(1), 2, 0.7)) == pytest.approx(1.0)
    two_valued = StepWeight(Cube.unit(1), 1, [0.4, 1.6])
    assert a_infty_char(two_valued) == pytest.approx(1.25)


def test_adjacency_constant():
    W = cascade(CascadeParams(1.0, 0.1, 4))
    assert adjacency_constant(W) == pytest.approx(1.1 / 0.9)
    assert adjacency_constant(StepWeight.constant(Cube.unit(2), 3)) == 1.0
    W = StepWeight(Cube.unit(1), 2, [1.0, 2.0, 4.0, 4.0])
    siblings = adjacency_constant(W, 'siblings')
    assert siblings == pytest.approx(8 / 3)
    assert adjacency_constant(W, 'touching') >= siblings
    assert adjacency_constant(W, 'lattice', scan_depth=2) >= siblings
    with pytest.raises(ValueError):
        adjacency_constant(W, 'diagonal')


def test_flatness():
    assert is_flat(1.2, 0.5)
    assert not is_flat(2.0, 0.5)
    assert not is_flat(1.5, 0.5)


def test_halo_mass():
    W = StepWeight.constant(Cube.unit(2), 5)
    wide = halo_mass(W, Cube.unit(2), Fraction(1, 10))
    narrow = halo_mass(W, Cube.unit(2), Fraction(1, 20))
    assert wide == pytest.approx(0.36)
    assert narrow == pytest.approx(0.19)
    with pytest.raises(ValueError):
        halo_mass(W, Cube.unit(2), Fraction(1, 64))


def test_hilbert_testing_of_lebesgue():
    """|I|^-1 int_I |H 1_I|^2 = 1/3 on the unit interval."""
    one = StepWeight.constant(Cube.unit(1), 0)
    value = riesz_testing(KernelSpec.hilbert(), one, one,
                          rule=rule_for_tolerance(1e-8)).value
    assert value == pytest.approx(1 / 3, rel=1e-4)


def test_hilbert_testing_meets_its_tolerance():
    one = StepWeight.constant(Cube.unit(1), 2)
    res = riesz_testing(KernelSpec.hilbert(), one, one, tol=1e-6)
    assert res.error <= 1e-6
    assert res.value == pytest.approx(1 / 3, rel=1e-5)


def random_pair(seed, depth=2):
    rng = np.random.default_rng(seed)
    n = 1 << depth
    return (StepWeight(Cube.unit(2), depth, rng.uniform(0.5, 1.5, (n, n))),
            StepWeight(Cube.unit(2), depth, rng.uniform(0.5, 1.5, (n, n))))


def test_error_estimate_compares_against_a_finer_rule():
    sigma, omega = random_pair(3)
    coarse = riesz_testing(KernelSpec.riesz(1, 2), sigma, omega,
                           rule=TestingRule(2, 0.25, 1))
    assert coarse.error > 0


def test_unmet_tolerance_raises():
    sigma, omega = random_pair(3)
    with pytest.raises(QuadratureError, match="tolerance"):
        riesz_testing(KernelSpec.riesz(1, 2), sigma, omega, tol=1e-12,
                      rule=TestingRule(2, 0.25, 1), refinements=1)
    with pytest.raises(QuadratureError):
        testing_scan(KernelSpec.riesz(1, 2), sigma, omega, 0, tol=1e-12,
                     rule=TestingRule(2, 0.25, 1))
    with pytest.raises(ValueError):
        rule_for_tolerance(0.0)


def test_riesz_testing_of_lebesgue_is_symmetric():
    one = StepWeight.constant(Cube.unit(2), 1)
    r1 = riesz_testing(KernelSpec.riesz(1, 2), one, one, rule=DENSE_RULE)
    r2 = riesz_testing(KernelSpec.riesz(2, 2), one, one, rule=DENSE_RULE)
    assert r1.mass == pytest.approx(1.0)
    assert r1.value > 0
    assert r1.value == pytest.approx(r2.value, rel=1e-9)


def test_testing_scan_covers_every_cube():
    one = StepWeight.constant(Cube.unit(2), 2)
    scan = testing_scan(KernelSpec.riesz(1, 2), one, one, 1, rule=DENSE_RULE)
    assert list(scan.level) == [0, 1, 1, 1, 1]
    assert (scan.value > 0).all()


def test_rotation_swaps_r1_and_r2():
    rng = np.random.default_rng(11)
    sigma = StepWeight(Cube.unit(2), 2, rng.uniform(0.5, 1.5, (4, 4)))
    omega = StepWeight(Cube.unit(2), 2, rng.uniform(0.5, 1.5, (4, 4)))
    table, deviation = rotation_swap(sigma, omega, 0, rule=DENSE_RULE)
    assert len(table) == 1
    assert deviation <= 1e-8 * max(1.0, table[['R1', 'R2']].abs().values.max())


def test_discrepancy_of_constant_pair():
    one = StepWeight.constant(Cube.unit(2), 2)
    state = transplant(Cube.unit(2), JumpSchedule([2]), one)
    disc = discrepancy(KernelSpec.riesz(1, 2), state, state, rule=DENSE_RULE)
    for term in (disc.total, disc.A, disc.B, disc.C, disc.D, disc.diagonal):
        assert term == pytest.approx(0.0, abs=1e-14)


def test_testing_report():
    V, U = cascade_pair(0.5, 0.2, 8)
    report = testing_report(V, U)
    entries = dict(report.entries())
    assert entries['gamma_horizontal'] == pytest.approx(0.25 * (1 - 0.96 ** 8))
    assert report.violations() == []
    assert report.adjacency_full >= 1
    assert report.metadata['depth'] == 8


def test_discrepancy_reports_unmet_tolerance():
    sigma = tensorize(cascade(CascadeParams(0.5, 0.3, 4)), 2)
    omega = tensorize(cascade(CascadeParams(1.0, -0.3, 4)), 2)
    state_v = transplant(Cube.unit(2), JumpSchedule([2]), sigma)
    state_u = transplant(Cube.unit(2), JumpSchedule([2]), omega)
    spec = KernelSpec.riesz(1, 2)
    with pytest.raises(QuadratureError, match='discrepancy'):
        discrepancy(spec, state_v, state_u, tol=1e-12,
                    rule=TestingRule(2, 0.25, 1), refinements=1)
    once = discrepancy(spec, state_v, state_u, tol=None,
                       rule=TestingRule(2, 0.25, 1))
    assert once.total == pytest.approx(once.A + once.B + once.C + once.D)
