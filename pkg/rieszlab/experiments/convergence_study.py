#
# RieszLab
#
# Copyright 2024 Seoul National University
#
# Permission is hereby granted, free of charge, to any person obtaining
# a copy of this software and associated documentation files (the
# “Software”), to deal in the Software without restriction, including
# without limitation the rights to use, copy, modify, merge, publish,
# distribute, sublicense, and/or sell copies of the Software, and to
# permit persons to whom the Software is furnished to do so, subject to
# the following conditions:
#
# The above copyright notice and this permission notice shall be included
# in all copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED “AS IS”, WITHOUT WARRANTY OF ANY KIND,
# EXPRESS OR IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF
# MERCHANTABILITY, FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN
# NO EVENT SHALL THE AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM,
# DAMAGES OR OTHER LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR
# OTHERWISE, ARISING FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR
# THE USE OR OTHER DEALINGS IN THE SOFTWARE.
#

from . import Experiment, ExperimentResult, int_list
from ..config import ConfigError
from ..dyadic import Cube
from ..stepweight import StepWeight
from ..singular import (KernelSpec, constants, fft_multiplier, periodization_tail,
                        hilbert_steps, hilbert_quad, riesz_step, riesz_quad)
from ..convergence import (alt_series_bound_check, rotation_exposing,
                           reduction_expansion, riesz_square_sum,
                           representation_table, decay_rate, hilbert_family,
                           riesz_family, HILBERT_FAMILIES, RIESZ_FAMILIES)
from ..diagnostics import TestingRule, weak_probe
from ..log import log
import numpy as np
import pandas as pd
from scipy.special import dawsn

EXPOSED_BETAS = [(1, 1), (2, 1), (1, 2), (3, 2), (1, 1, 1), (2, 1, 1)]

ALT_SERIES_PROBES = [
    ('x', lambda x: x, 1),
    ('sin(2 pi x)', lambda x: np.sin(2 * np.pi * x), 3),
    ('exp(-x)', lambda x: np.exp(-x), 1),
]


def band_limited(rng, size, dim, modes=4):
    """Random trigonometric polynomial of degree `modes` on the unit torus."""
    grid = np.meshgrid(*[np.arange(size) / size] * dim, indexing='ij')
    samples = np.full((size,) * dim, rng.normal())
    for _ in range(3 * dim):
        k = rng.integers(-modes, modes + 1, dim)
        phase = 2 * np.pi * sum(kj * x for kj, x in zip(k, grid))
        samples += rng.normal() * np.cos(phase) + rng.normal() * np.sin(phase)
    return samples


def gaussian_probe(points):
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        return np.exp(-(points - 0.5) ** 2)
    return np.exp(-((points - 0.5) ** 2).sum(axis=1))


def probe_rows(kind, name, k_values, rule):
    family = (hilbert_family if kind == 'hilbert' else riesz_family)(name, rule=rule)
    pairings = weak_probe(family, gaussian_probe, k_values)
    return [(kind, name, k, value) for k, value in zip(k_values, pairings)]


class ConvergenceStudy(Experiment):

    name = 'convergence-study'
    description = 'Reduction of R1 to H on sign patterns and iterated Riesz identities'
    priority = 60

    uses_seed = True

    arguments = [
        ('k_values', dict(
            type=int_list, default=[2, 3, 4, 5, 6],
            help='pattern scales 2^-k of the representation table '
                 '(default: [2, 3, 4, 5, 6])')),
        ('p', dict(
            type=float, default=2.0,
            help='exponent of the L^p distances (default: 2.0)')),
        ('grid_2d', dict(
            type=int, default=256,
            help='planar FFT grid size per axis (default: 256)')),
        ('grid_3d', dict(
            type=int, default=32,
            help='spatial FFT grid size per axis (default: 32)')),
        ('powers', dict(
            type=int_list, default=[2, 3, 5],
            help='powers N of R_1 expanded through sum R_j^2 = -I '
                 '(default: [2, 3, 5])')),
        ('alt_k', dict(
            type=int, default=6,
            help='scale of the alternating-series probes (default: 6)')),
        ('probe_k', dict(
            type=int_list, default=[2, 3, 4, 5],
            help='scales of the weak-convergence probes (default: [2, 3, 4, 5])')),
        ('oracle_points', dict(
            type=int, default=6,
            help='random evaluation points per quadrature oracle (default: 6)')),
        ('oracle_tol', dict(
            type=float, default=1e-8,
            help='allowed closed form vs quadrature deviation (default: 1e-8)')),
        ('dawson_length', dict(
            type=float, default=64.0,
            help='period of the Dawson FFT oracle (default: 64.0)')),
    ]

    def __init__(self, k_values, p, grid_2d, grid_3d, powers, alt_k, probe_k,
                 oracle_points, oracle_tol, dawson_length, _seed=None):
        self.k_values = k_values
        self.p = p
        self.grid_2d = grid_2d
        self.grid_3d = grid_3d
        self.powers = powers
        self.alt_k = alt_k
        self.probe_k = probe_k
        self.oracle_points = oracle_points
        self.oracle_tol = oracle_tol
        self.dawson_length = dawson_length
        self.seed = _seed

    @classmethod
    def validate(cls, params):
        for name in ('grid_2d', 'grid_3d'):
            size = params[name]
            if size < 8 or size & (size - 1):
                raise ConfigError(f'{name}={size} must be a power of two >= 8.')
        ks = params['k_values']
        if len(ks) < 2 or min(ks) < 1 or max(ks) > 10:
            raise ConfigError('k_values needs at least two scales in 1..10.')
        if params['p'] < 1:
            raise ConfigError('p must be >= 1.')
        if not params['powers'] or min(params['powers']) < 1:
            raise ConfigError('powers must be positive integers.')
        if not 1 <= params['alt_k'] <= 16:
            raise ConfigError('alt_k must lie in 1..16.')
        if not params['probe_k'] or min(params['probe_k']) < 1:
            raise ConfigError('probe_k must be positive integers.')
        if params['oracle_points'] < 0 or params['oracle_tol'] <= 0:
            raise ConfigError('oracle_points must be >= 0 and oracle_tol positive.')
        if params['dawson_length'] < 8:
            raise ConfigError('dawson_length must be at least 8.')

    def run(self, session):
        res = ExperimentResult(self.name)
        rng = np.random.default_rng(self.seed)
        rule = TestingRule()

        log.info('==> Riesz constants')
        for n in range(1, 5):
            B = constants(n).B
            res.add('constants', f'B[{n}]', B)
            res.check(f'constants.B_{n} = 1', abs(B - 1) <= 1e-12, 1.0, B)

        log.info('==> Symbol identities on band-limited grids')
        for dim, size in ((2, self.grid_2d), (3, self.grid_3d)):
            f = band_limited(rng, size, dim)
            squares = riesz_square_sum(f)
            err = float(np.abs(squares + (f - f.mean())).max())
            res.add('symbols', f'square_sum_residual[{dim}d]', err, 'quadrature')
            res.check(f'symbols.sum R_j^2 = -I in {dim}D', err <= 1e-10, 0.0, err)
            for N in self.powers:
                direct = fft_multiplier(KernelSpec.iterated((N,) + (0,) * (dim - 1)), f)
                err = float(np.abs(reduction_expansion(N, f) - direct).max())
                res.add('symbols', f'reduction_residual[{dim}d,N={N}]', err,
                        'quadrature')
                res.check(f'symbols.reduction of R_1^{N} in {dim}D',
                          err <= 1e-10, 0.0, err)

        log.info('==> Exposing rotations')
        rows = []
        for beta in EXPOSED_BETAS:
            exposure = rotation_exposing(beta)
            label = ','.join(map(str, beta))
            rows.append((label, exposure.angle, exposure.coefficient))
            res.add('exposing', f'coefficient[{label}]', exposure.coefficient,
                    'quadrature')
            res.check(f'exposing.rotation exposes eta_1^N for ({label})',
                      abs(exposure.coefficient) > 0, 0.0, exposure.coefficient)
        res.add_table('exposing', pd.DataFrame(
            rows, columns=['beta', 'angle', 'coefficient']))

        log.info(f'==> Alternating series at k={self.alt_k}')
        rows = []
        for label, b, pieces in ALT_SERIES_PROBES:
            check = alt_series_bound_check(b, self.alt_k, pieces)
            rows.append((label, pieces, check.lhs, check.bound, check.envelope))
            res.add('alt_series', f'envelope[{label}]', check.envelope, 'quadrature')
            res.check(f'alt_series.bound holds for {label}',
                      check.lhs <= check.bound * (1 + 1e-12), check.bound, check.lhs)
        res.add_table('alt_series', pd.DataFrame(
            rows, columns=['function', 'pieces', 'lhs', 'bound', 'envelope']))

        log.info('==> Representation of R_1 through H')
        table = representation_table(self.k_values, self.p, rule, session.executor)
        res.add_table('representation', table)
        for row in table.itertuples():
            res.add('representation', f'rep_distance[{row.k}]', row.rep_distance,
                    'quadrature')
            res.add('representation', f'r2_norm[{row.k}]', row.r2_norm, 'quadrature')
            res.add('representation', f'r1_square_mean[{row.k}]',
                    row.r1_square_mean, 'quadrature')
        res.add('representation', 'rep_decay_rate',
                decay_rate(table.k, table.rep_distance), 'quadrature')
        for column in ('rep_distance', 'r2_norm'):
            values = table[column].values
            decreasing = bool((np.diff(values) < 0).all())
            res.check(f'representation.{column} decreases in k', decreasing,
                      True, decreasing)
        gap = np.abs(table.r1_square_mean.values - 1.0)
        res.check('representation.mean of (R_1 s_k)^2 approaches 1',
                  gap[-1] < gap[0], float(gap[0]), float(gap[-1]))

        log.info('==> Weak-convergence probes')
        tasks = [(probe_rows, ('hilbert', name, self.probe_k, rule))
                 for name in HILBERT_FAMILIES]
        tasks += [(probe_rows, ('riesz', name, self.probe_k, rule))
                  for name in RIESZ_FAMILIES]
        rows = [row for chunk in session.run(tasks, 'Weak probes') for row in chunk]
        probes = pd.DataFrame(rows, columns=['kind', 'family', 'k', 'pairing'])
        res.add_table('weak_probes', probes)
        pattern = probes[probes.family == 's_k'].pairing.abs().values
        res.check('weak_probes.sign patterns tend to zero weakly',
                  pattern[-1] < pattern[0], float(pattern[0]), float(pattern[-1]))

        if self.oracle_points > 0:
            self.run_oracles(res, rng)
        return res

    def run_oracles(self, res, rng):
        log.info('==> Closed forms against quadrature')
        edges = np.linspace(0.0, 1.0, 9)
        values = rng.uniform(0.5, 1.5, 8)
        xs = rng.uniform(-0.5, 1.5, self.oracle_points)
        closed = hilbert_steps(edges, values, xs)
        quad = np.array([hilbert_quad(edges, values, x) for x in xs])
        err = float(np.abs(closed - quad).max())
        res.add('oracles', 'hilbert_deviation', err, 'quadrature')
        res.check('oracles.Hilbert closed form matches QAWC',
                  err <= self.oracle_tol, self.oracle_tol, err)

        W = StepWeight(Cube.unit(2), 2, rng.uniform(0.5, 1.5, (4, 4)))
        points = rng.uniform(-0.25, 1.25, (self.oracle_points, 2))
        for j in (1, 2):
            spec = KernelSpec.riesz(j, 2)
            closed = riesz_step(spec, W, points)
            quad = np.array([riesz_quad(spec, W, x, tol=0.1 * self.oracle_tol)
                             for x in points])
            err = float(np.abs(closed - quad).max())
            res.add('oracles', f'riesz{j}_deviation', err, 'quadrature')
            res.check(f'oracles.R_{j} closed form matches cubature',
                      err <= self.oracle_tol, self.oracle_tol, err)

        # H exp(-x^2) = 2 dawsn(x) / sqrt(pi) on the line
        L = self.dawson_length
        n = 1 << int(np.ceil(np.log2(64 * L)))
        x = (np.arange(n) / n - 0.5) * L
        f = np.exp(-x ** 2)
        periodic = fft_multiplier(KernelSpec.hilbert(), f, (L,))
        inner = np.abs(x) <= L / 4
        err = float(np.abs(periodic - 2 / np.sqrt(np.pi) * dawsn(x))[inner].max())
        tail = float(periodization_tail(f, (L,)))
        res.add('oracles', 'dawson_deviation', err, 'quadrature')
        res.add('oracles', 'dawson_tail', tail, 'quadrature')
        res.check('oracles.periodic Hilbert transform of a Gaussian within the '
                  'wrap-around bound', err <= tail, tail, err)
