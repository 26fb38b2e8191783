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

"""Supervisor transplantation of dyadic weights.

Stage t of a transplanted weight is constant on the jump-grid cubes K_t and
carries, on each of them, the source average over its supervisor S(Q). The
stages are produced by the Haar difference formula and checked against a
direct gather of the source averages before they are stored.
"""

from collections import namedtuple
import numpy as np
import pylru
from .dyadic import (Cube, Box, JumpSchedule, supervisor_index_table,
                     induced_grid_masks, repeat_cells)
from .stepweight import (StepWeight, TensorizedStepWeight, block_mean,
                         direction_mask)
from .quadrature import adaptive_cubature
from .log import log

DEFAULT_DEPTH_CAP = 24

GlobalExtension = namedtuple('GlobalExtension', [
    'sigma', 'omega', 'factors', 'tail'])

AdaptiveSchedule = namedtuple('AdaptiveSchedule', [
    'schedule', 'state_v', 'state_u', 'trials'])

_cell_mass_cache = pylru.lrucache(4096)


class ResolutionOverflowError(ValueError):
    pass


class TransplantLawError(RuntimeError):
    pass


class SignPattern(StepWeight):

    def __init__(self, root, depth, values, direction):
        super().__init__(root, depth, values)
        self.direction = direction


def parity_signs(count):
    """+1 on even indices, -1 on odd ones."""
    return np.where(np.arange(count) % 2 == 0, 1.0, -1.0)


def sign_pattern(Q, k, direction='horizontal'):
    if k < 1:
        raise ValueError('Sign patterns need k >= 1.')
    mask = direction_mask(direction, Q.dim)
    n = 1 << k
    values = np.ones((n,) * Q.dim)
    for axis in range(Q.dim):
        if mask >> axis & 1:
            shape = [1] * Q.dim
            shape[axis] = n
            values = values * parity_signs(n).reshape(shape)
    return SignPattern(Q, k, values, mask)


class TransplantState:

    def __init__(self, root, schedule, source, stages=None,
                 cap=DEFAULT_DEPTH_CAP, modified=False):
        if source.root != root:
            raise ValueError('The source weight must live on the root cube.')
        self.root = root
        self.schedule = schedule
        self.source = source
        self.cap = cap
        self.modified = modified
        if stages is None:
            stages = [_constant_like(source, root, source.mean())]
        if len(stages) != len(schedule) + 1:
            raise ValueError('A state needs exactly one stage per jump plus one.')
        self.stages = stages

    def __repr__(self):
        return (f'TransplantState(schedule={self.schedule}, t={self.t}, '
                f'modified={self.modified})')

    @property
    def t(self):
        return len(self.stages) - 1

    @property
    def dim(self):
        return self.root.dim

    def stage(self, t=None):
        return self.stages[self.t if t is None else t]

    def increment(self, t):
        """u_{t+1} - u_t at the resolution of K_{t+1}."""
        fine = self.stages[t + 1]
        coarse = self.stages[t].refine(fine.depth)
        if isinstance(fine, TensorizedStepWeight):
            return TensorizedStepWeight(self.root, fine.depth,
                                        fine.profile - coarse.profile, fine.axis)
        return StepWeight(self.root, fine.depth, fine.dense() - coarse.dense())


def _constant_like(source, root, value):
    if isinstance(source, TensorizedStepWeight):
        return TensorizedStepWeight(root, 0, [value], source.axis)
    return StepWeight.constant(root, 0, value)


def gathered_averages(source, schedule, t):
    """E_{S(Q)} source for every Q in K_t (per-axis profile if tensorized)."""
    table = supervisor_index_table(schedule, t)
    if isinstance(source, TensorizedStepWeight):
        return source.profile_averages(t)[table]
    return source.averages(t)[np.ix_(*[table] * source.dim)]


def _check_law(formula, exact, source, what):
    scale = max(float(np.abs(source.values).max()), 1e-300)
    err = float(np.abs(formula - exact).max())
    if err > 1e-12 * scale:
        raise TransplantLawError(
            f'{what}: difference formula deviates from the supervisor '
            f'averages by {err:.3g}.')


def _dense_increment(source, schedule, t, k):
    """Haar difference formula terms on K_{t+1}, all directions summed."""
    dim = source.dim
    table = supervisor_index_table(schedule, t)
    volume = float(source.root.volume) / (1 << (dim * t))
    n_next = 1 << schedule.cumulative(t + 1)
    parity = parity_signs(n_next)
    total = np.zeros((n_next,) * dim)
    for mask in range(1, 1 << dim):
        coef = source.haar_level(t, mask) / np.sqrt(volume)
        coef = repeat_cells(np.asarray(coef)[np.ix_(*[table] * dim)], 1 << k)
        for axis in range(dim):
            if mask >> axis & 1:
                shape = [1] * dim
                shape[axis] = n_next
                coef = coef * parity.reshape(shape)
        total += coef
    return total


def transplant_step(state, k_next):
    if state.modified:
        raise ValueError('Modified states cannot be extended.')
    t = state.t
    source = state.source
    schedule = state.schedule.extended(k_next)
    top = schedule.cumulative(t + 1)
    if top > state.cap:
        raise ResolutionOverflowError(
            f'Stage {t + 1} needs cumulative depth {top}, above the cap '
            f'{state.cap}.')
    if source.depth < t + 1:
        raise ValueError(f'Source depth {source.depth} is too coarse for '
                         f'stage {t + 1}.')

    current = state.stages[-1]
    exact = gathered_averages(source, schedule, t + 1)
    if isinstance(source, TensorizedStepWeight):
        pairs = source.profile_averages(t + 1).reshape(-1, 2)
        coef = 0.5 * (pairs[:, 0] - pairs[:, 1])
        coef = coef[supervisor_index_table(schedule, t)]
        formula = (np.repeat(current.profile, 1 << k_next)
                   + np.repeat(coef, 1 << k_next) * parity_signs(exact.size))
        _check_law(formula, exact, source, f'stage {t + 1}')
        stage = TensorizedStepWeight(state.root, top, exact, source.axis)
    else:
        formula = (repeat_cells(current.dense(), 1 << k_next)
                   + _dense_increment(source, schedule, t, k_next))
        _check_law(formula, exact, source, f'stage {t + 1}')
        stage = StepWeight(state.root, top, exact)
    return TransplantState(state.root, schedule, source,
                           state.stages + [stage], state.cap)


def transplant(root, schedule, source, cap=DEFAULT_DEPTH_CAP):
    state = TransplantState(root, JumpSchedule([]), source, cap=cap)
    for k in schedule:
        state = transplant_step(state, k)
    return state


def modified_transplant(state):
    """Rebuild the stages with sign patterns switched off on transition cubes.

    Inside a transition cube R the modified weight keeps the value of its
    K-parent, E_{S(pi_K R)} U; off transition cubes it agrees with the plain
    transplant.
    """
    source = state.source
    if isinstance(source, TensorizedStepWeight):
        source = StepWeight(source.root, source.depth, source.dense())
    schedule = state.schedule
    dim = state.dim
    stages = [StepWeight.constant(state.root, 0, source.mean())]
    expected = stages[0].dense()
    for t in range(len(schedule)):
        k = schedule.jumps[t]
        _, induced = induced_grid_masks(dim, schedule, t + 1)
        formula = (repeat_cells(stages[-1].dense(), 1 << k)
                   + _dense_increment(source, schedule, t, k) * induced)
        expected = np.where(induced, gathered_averages(source, schedule, t + 1),
                            repeat_cells(expected, 1 << k))
        _check_law(formula, expected, source, f'modified stage {t + 1}')
        stages.append(StepWeight(state.root, schedule.cumulative(t + 1), expected))
    modified = TransplantState(state.root, schedule, source, stages,
                               state.cap, modified=True)
    residual = law_residual(modified)
    if residual > 1e-12 * max(float(np.abs(source.values).max()), 1e-300):
        raise TransplantLawError(
            f'Modified stages are not constant between jump levels '
            f'(deviation {residual:.3g}).')
    return modified


def _stage_array(weight):
    if isinstance(weight, TensorizedStepWeight):
        return weight.profile
    return weight.dense()


def law_residual(state):
    """Largest deviation of final-stage dyadic averages from the stage values.

    For every dyadic level L of the final stage, averages over D_L must equal
    the values of the last stage t with cumulative(t) <= L.
    """
    levels = state.schedule.levels()
    final = _stage_array(state.stages[-1])
    top = levels[-1]
    worst = 0.0
    for level in range(top + 1):
        t = max(i for i, lv in enumerate(levels) if lv <= level)
        expected = _stage_array(state.stages[t])
        expected = repeat_cells(expected, 1 << (level - levels[t]))
        actual = block_mean(final, 1 << (top - level))
        worst = max(worst, float(np.abs(actual - expected).max()))
    return worst


def supervisor_law_residual(state):
    """max |E_Q u_t - E_{S(Q)} U| over Q in K_t, for every stored stage."""
    worst = 0.0
    for t in range(state.t + 1):
        exact = gathered_averages(state.source, state.schedule, t)
        worst = max(worst, float(np.abs(_stage_array(state.stages[t])
                                        - exact).max()))
    return worst


# Global extension

def mu_tau_mass_1d(a, b, tau):
    """Exact integral of (1+|x|)^-tau over [a, b]."""
    def antiderivative(x):
        return np.sign(x) * ((1 + abs(x)) ** (1 - tau) - 1) / (1 - tau)
    return float(antiderivative(b) - antiderivative(a))


def unit_cell_factor(alpha, tau, tol=1e-10):
    """a_alpha: mean of (1+|x|)^-tau over the unit cell alpha + [0,1]^n."""
    if len(alpha) == 1:
        return mu_tau_mass_1d(alpha[0], alpha[0] + 1, tau)
    # |x| is invariant under coordinate reflections and permutations
    canonical = tuple(sorted(a if a >= 0 else -a - 1 for a in alpha))
    key = (float(tau), canonical)
    if key not in _cell_mass_cache:
        lower = np.array(canonical, dtype=float)
        value, _ = adaptive_cubature(
            lambda x: (1.0 + np.linalg.norm(x, axis=1)) ** -tau,
            lower, lower + 1.0, tol)
        _cell_mass_cache[key] = value
    return _cell_mass_cache[key]


def _reflect_and_tile(weight, window):
    dim = weight.dim
    values = weight.dense()
    for axis in range(dim):
        values = np.concatenate([values, np.flip(values, axis=axis)], axis=axis)
    n = weight.cells_per_axis
    count = 2 * window * n
    index = (np.arange(count) + window * n) % (2 * n)
    return values[np.ix_(*[index] * dim)]


def global_extension(sigma, omega, tau, L=8):
    """Reflect, tile over [-L, L]^n and multiply by the lattice factor phi_tau.

    The window [-L, L)^n is the root of the extended step weights, so its
    2L unit cells per axis must form a dyadic grid: L is a power of two.
    """
    if L < 1:
        raise ValueError(f'Window half-width L={L} is too small (need L >= 1).')
    if L & (L - 1):
        raise ValueError(f'Window half-width L={L} must be a power of two.')
    if not 0 < tau < 1:
        raise ValueError(f'tau must lie in (0, 1), got {tau}.')
    unit = Box.cube((0,) * sigma.dim, 1)
    for weight in (sigma, omega):
        if weight.root.box() != unit:
            raise ValueError('Global extension expects weights on [0,1]^n.')
    if sigma.depth != omega.depth:
        raise ValueError('sigma and omega must share their resolution.')

    dim = sigma.dim
    depth = sigma.depth
    window_depth = (2 * L).bit_length() - 1
    root = Cube(dim, 0, None, Box.cube((-L,) * dim, 2 * L))
    alphas = np.arange(-L, L)
    factors = np.empty((2 * L,) * dim)
    for alpha in np.ndindex(*factors.shape):
        factors[alpha] = unit_cell_factor(tuple(int(alphas[i]) for i in alpha), tau)
    fine = repeat_cells(factors, 1 << depth)
    log.debug(f'global_extension: {factors.size} lattice factors, '
              f'tau={tau}, L={L}')

    def extend(weight):
        return StepWeight(root, window_depth + depth,
                          _reflect_and_tile(weight, L) * fine)

    return GlobalExtension(extend(sigma), extend(omega),
                           StepWeight(root, window_depth, factors),
                           (1.0 + L) ** -tau)


# Adaptive choice of jumps

def adaptive_schedule(source_v, source_u, stages, k_min=2, residual_fraction=0.1,
                      cap=16, tol=1e-6, executor=None):
    """Double each jump until the discrepancy residual is a small part of
    the diagonal prediction, or the depth cap would be exceeded."""
    from .diagnostics import discrepancy
    from .singular import KernelSpec

    root = source_v.root
    state_v = TransplantState(root, JumpSchedule([]), source_v, cap=cap)
    state_u = TransplantState(root, JumpSchedule([]), source_u, cap=cap)
    spec = KernelSpec.riesz(1, root.dim)
    trials = []
    for t in range(stages):
        base = state_v.schedule.cumulative(t)
        k = k_min
        while True:
            next_v = transplant_step(state_v, k)
            next_u = transplant_step(state_u, k)
            disc = discrepancy(spec, next_v, next_u, root, t, tol,
                               executor=executor)
            trials.append((t, k, disc))
            log.info(f' * stage {t + 1}: k={k} diagonal={disc.diagonal:.6g} '
                     f'residual={disc.residual:.3g}')
            settled = abs(disc.residual) <= residual_fraction * abs(disc.diagonal)
            if settled or base + 2 * k > cap:
                break
            k *= 2
        state_v, state_u = next_v, next_u
    return AdaptiveSchedule(state_v.schedule, state_v, state_u, trials)

