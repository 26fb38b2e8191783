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
from ..weights import (CascadeParams, cascade, stopping_mass, stopping_cubes,
                       hitting_probability, hitting_mc)
from ..diagnostics import (gamma_horizontal, square_function_testing,
                           adjacency_constant, a_infty_char)
from ..log import log
import numpy as np
import pandas as pd


def cascade_pair(a, eps, depth):
    """W_N(a, J, eps) and its reflected partner W_N(1, J, -eps)."""
    return (cascade(CascadeParams(a, eps, depth)),
            cascade(CascadeParams(1.0, -eps, depth)))


def growth_point(a, eps, depth):
    V, U = cascade_pair(a, eps, depth)
    gamma = gamma_horizontal(V, U)
    return depth, gamma, gamma / V.mean(), a * a * (1 - (1 - eps * eps) ** depth)


class CascadeStudy(Experiment):

    name = 'cascade-study'
    description = 'Multiplicative cascades, stopping cubes and hitting probabilities'
    priority = 10

    uses_seed = True

    arguments = [
        ('a', dict(
            type=float, default=0.5,
            help='cascade mean a in (0, 1] (default: 0.5)')),
        ('epsilon', dict(
            type=float, default=0.5,
            help='cascade strength epsilon in (0, 1) (default: 0.5)')),
        ('depth', dict(
            type=int, default=12,
            help='cascade depth N of the testing pair (default: 12)')),
        ('stop_depth', dict(
            type=int, default=20,
            help='depth of the stopping-cube scan (default: 20)')),
        ('trials', dict(
            type=int, default=100000,
            help='Monte Carlo walks; 0 skips the simulation (default: 100000)')),
        ('horizon', dict(
            type=int, default=1000,
            help='number of steps per simulated walk (default: 1000)')),
        ('growth_depths', dict(
            type=int_list, default=[2, 4, 6, 8, 10, 12],
            help='depths of the testing-value growth profile '
                 '(default: [2, 4, 6, 8, 10, 12])')),
    ]

    def __init__(self, a, epsilon, depth, stop_depth, trials, horizon,
                 growth_depths, _seed=None):
        self.a = a
        self.epsilon = epsilon
        self.depth = depth
        self.stop_depth = stop_depth
        self.trials = trials
        self.horizon = horizon
        self.growth_depths = growth_depths
        self.seed = _seed

    @classmethod
    def validate(cls, params):
        if not 0 < params['a'] <= 1:
            raise ConfigError(f'a={params["a"]} must lie in (0, 1].')
        if not 0 < params['epsilon'] < 1:
            raise ConfigError(f'epsilon={params["epsilon"]} must lie in (0, 1).')
        for name in ('depth', 'stop_depth'):
            if not 1 <= params[name] <= 24:
                raise ConfigError(f'{name}={params[name]} must lie in 1..24.')
        if params['trials'] < 0 or params['horizon'] < 1:
            raise ConfigError('trials must be >= 0 and horizon >= 1.')

    def run(self, session):
        res = ExperimentResult(self.name)
        a, eps = self.a, self.epsilon

        log.info('==> Cascade testing value')
        V, U = cascade_pair(a, eps, self.depth)
        gamma = gamma_horizontal(V, U)
        closed = a * a * (1 - (1 - eps * eps) ** self.depth)
        res.add('cascade', 'gamma', gamma)
        res.add('cascade', 'gamma_closed_form', closed)
        res.add('cascade', 'square_function_testing', square_function_testing(V, U)
                if self.depth <= 12 else gamma)
        res.add('cascade', 'mean', V.mean())
        res.add('cascade', 'adjacency', adjacency_constant(V))
        res.add('cascade', 'a_infty', a_infty_char(V))
        res.check('cascade.gamma matches a^2(1-(1-eps^2)^N)',
                  abs(gamma - closed) <= 1e-12, closed, gamma)
        res.check('cascade.mean preserved', abs(V.mean() - a) <= 1e-12 * a, a, V.mean())
        bound = (1 + eps) / (1 - eps)
        res.check('cascade.adjacency within (1+eps)/(1-eps)',
                  adjacency_constant(V) <= bound * (1 + 1e-12), bound,
                  adjacency_constant(V))
        spectrum = V.haar_spectrum()
        residual = float(np.abs(spectrum.reconstruct() - V.dense()).max())
        res.add('cascade', 'haar_reconstruction_residual', residual)
        res.check('cascade.Haar reconstruction', residual <= 1e-12, 0.0, residual)

        log.info('==> Stopping cubes')
        W = cascade(CascadeParams(a, eps, self.stop_depth))
        mass = stopping_mass(W, eps)
        exact = hitting_probability(a, eps, self.stop_depth)
        res.add('stopping', 'mass', mass)
        res.add('stopping', 'hitting_probability', exact)
        res.add('stopping', 'cubes', len(stopping_cubes(W, eps)))
        res.check('stopping.mass equals the hitting recursion',
                  abs(mass - exact) <= 1e-12, exact, mass)
        profile = [(d, hitting_probability(a, eps, d))
                   for d in range(0, self.stop_depth + 1)]
        res.add_table('stopping_profile',
                      pd.DataFrame(profile, columns=['depth', 'hitting_probability']))

        if self.trials > 0:
            log.info(f'==> Monte Carlo hitting estimate ({self.trials} walks)')
            est = hitting_mc(a, eps, self.trials, self.horizon, self.seed,
                             session.executor)
            target = hitting_probability(a, eps, self.horizon)
            res.add('hitting', 'estimate', est.estimate, 'monte-carlo')
            res.add('hitting', 'lower', est.lower, 'monte-carlo')
            res.add('hitting', 'upper', est.upper, 'monte-carlo')
            res.add('hitting', 'recursion', target)
            res.check('hitting.estimate within 3 sigma of the recursion',
                      abs(est.estimate - target) <= 3 * est.sigma + 1e-12,
                      target, est.estimate)
            res.check('hitting.estimate consistent with P >= a',
                      est.estimate + 3 * est.sigma >= a, a, est.estimate)

        log.info('==> Testing-value growth profile')
        points = session.run([(growth_point, (a, eps, d)) for d in self.growth_depths],
                             'Growth profile')
        res.add_table('growth', pd.DataFrame(
            points, columns=['depth', 'gamma', 'gamma_over_mean', 'closed_form']))
        return res
