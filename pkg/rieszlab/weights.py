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

from collections import namedtuple
import numpy as np
from scipy.stats import norm
from .dyadic import Cube, Box
from .stepweight import StepWeight, TensorizedStepWeight
from .log import log

# Tolerance on the log-scale stopping threshold; shared by every stopping
# decision so that array scans and the up-count recursion agree.
STOP_LOG_TOL = 1e-12

MC_BLOCK_SIZE = 1 << 16
MC_STEP_CHUNK = 64

CascadeParams = namedtuple('CascadeParams', ['a', 'epsilon', 'N', 'J'],
                           defaults=(None,))

HittingEstimate = namedtuple('HittingEstimate', [
    'estimate', 'lower', 'upper', 'sigma', 'hits', 'trials'])

NazarovPair = namedtuple('NazarovPair', [
    'V', 'U', 'epsilon', 'depth', 'gamma', 'blend'])


class TargetUnreachableError(ValueError):

    def __init__(self, message, bracket):
        super().__init__(message)
        self.bracket = bracket


def cascade(params):
    a, eps, depth, root = params
    root = Cube.unit(1) if root is None else root
    if root.dim != 1:
        raise ValueError('Cascades are one-dimensional.')
    if abs(eps) >= 1:
        raise ValueError(f'|epsilon| must be < 1, got {eps}.')
    if a <= 0:
        raise ValueError(f'The cascade mean must be positive, got {a}.')
    values = np.full(1, float(a))
    factors = np.array([1.0 - eps, 1.0 + eps])
    for _ in range(depth):
        values = np.outer(values, factors).ravel()
    return StepWeight(root, depth, values)


def crosses_threshold(a, eps, ups, downs):
    """Whether a * (1+eps)**ups * (1-eps)**downs >= 1 / (1+eps)."""
    logavg = np.log(a) + ups * np.log1p(eps) + downs * np.log1p(-eps)
    return logavg >= -np.log1p(eps) - STOP_LOG_TOL


def stopping_levels(weight, epsilon):
    """Per-leaf level of the stopping cube containing it, or -1."""
    threshold = -np.log1p(epsilon) - STOP_LOG_TOL
    dim = weight.dim
    levels = np.full((1,) * dim, -1, dtype=np.int64)
    for level in range(weight.depth + 1):
        if level:
            for axis in range(dim):
                levels = np.repeat(levels, 2, axis=axis)
        with np.errstate(divide='ignore'):
            hits = np.log(weight.averages(level)) >= threshold
        levels[hits & (levels < 0)] = level
    return levels


def stopping_cubes(weight, epsilon):
    """Maximal dyadic cubes I of the root with E_I W >= 1/(1+epsilon)."""
    levels = stopping_levels(weight, epsilon)
    cubes = []
    for level in range(weight.depth + 1):
        # leaves of one stopping cube share its level; sample block corners
        step = 1 << (weight.depth - level)
        corners = levels[(slice(None, None, step),) * weight.dim]
        for idx in np.argwhere(corners == level):
            cubes.append(Cube(weight.dim, weight.root.level + level,
                              tuple((r << level) + int(k)
                                    for r, k in zip(weight.root.index, idx)),
                              weight.root.root))
    return cubes


def stopping_mass(weight, epsilon):
    if epsilon <= 0:
        raise ValueError('The stopping mass needs epsilon > 0.')
    return float((stopping_levels(weight, epsilon) >= 0).mean())


def hitting_probability(a, eps, depth):
    """Exact P(T_a <= depth) by recursion over up-step counts."""
    if not 0 < eps < 1:
        raise ValueError(f'epsilon must lie in (0, 1), got {eps}.')
    alive = np.array([1.0])
    if crosses_threshold(a, eps, 0, 0):
        return 1.0
    hit = 0.0
    for level in range(1, depth + 1):
        nxt = np.zeros(level + 1)
        nxt[:-1] += 0.5 * alive
        nxt[1:] += 0.5 * alive
        ups = np.arange(level + 1)
        crossing = crosses_threshold(a, eps, ups, level - ups)
        hit += float(nxt[crossing].sum())
        nxt[crossing] = 0.0
        alive = nxt
    return hit


def hitting_block(a, eps, size, horizon, seed, block):
    """Number of walks in one seeded block that reach the threshold."""
    rng = np.random.Generator(
        np.random.Philox(np.random.SeedSequence([seed, block])))
    target = -np.log1p(eps) - np.log(a) - STOP_LOG_TOL
    up, down = np.log1p(eps), np.log1p(-eps)
    logy = np.zeros(size)
    hit = np.full(size, 0.0 >= target)
    for start in range(0, horizon, MC_STEP_CHUNK):
        alive = np.flatnonzero(~hit)
        if alive.size == 0:
            break
        steps = min(MC_STEP_CHUNK, horizon - start)
        moves = np.where(rng.integers(0, 2, size=(alive.size, steps)) == 1,
                         up, down)
        path = logy[alive, None] + np.cumsum(moves, axis=1)
        hit[alive] = (path >= target).any(axis=1)
        logy[alive] = path[:, -1]
    return int(hit.sum())


def wilson_interval(hits, trials, confidence=0.95):
    z = norm.ppf(0.5 + confidence / 2)
    p = hits / trials
    denom = 1 + z ** 2 / trials
    center = (p + z ** 2 / (2 * trials)) / denom
    half = z / denom * np.sqrt(p * (1 - p) / trials + z ** 2 / (4 * trials ** 2))
    return center - half, center + half, half / z


def hitting_mc(a, eps, trials, horizon, seed, executor=None):
    if trials < 1:
        raise ValueError('At least one trial is required.')
    if not 0 < eps < 1:
        raise ValueError(f'epsilon must lie in (0, 1), got {eps}.')
    sizes = [min(MC_BLOCK_SIZE, trials - start)
             for start in range(0, trials, MC_BLOCK_SIZE)]
    if executor is None:
        counts = [hitting_block(a, eps, size, horizon, seed, block)
                  for block, size in enumerate(sizes)]
    else:
        jobs = [executor.submit(hitting_block, a, eps, size, horizon, seed, block)
                for block, size in enumerate(sizes)]
        counts = [job.result() for job in jobs]
    hits = sum(counts)
    lower, upper, sigma = wilson_interval(hits, trials)
    return HittingEstimate(hits / trials, lower, upper, sigma, hits, trials)


def nazarov_gamma(x1, eps, depth):
    """Testing value gamma(U, V; J) of the stopped cascade pair, by recursion.

    Cubes that have not stopped contribute |I| A^2 eps^2 each; a stopping
    cube I0 at level l0 contributes |I0| A0^2 (1 - (1 - eps^2)^(depth - l0))
    from the reflected cascade inside it.
    """
    if eps == 0:
        return 0.0
    alive = np.array([1.0])
    gamma = 0.0
    damp = 1.0 - eps * eps
    for level in range(depth + 1):
        if level:
            nxt = np.zeros(level + 1)
            nxt[:-1] += 0.5 * alive
            nxt[1:] += 0.5 * alive
            alive = nxt
        ups = np.arange(level + 1)
        avg = x1 * (1 + eps) ** ups * (1 - eps) ** (level - ups)
        crossing = crosses_threshold(x1, eps, ups, level - ups)
        gamma += float((alive[crossing] * avg[crossing] ** 2).sum()) * (
            1.0 - damp ** (depth - level))
        alive = np.where(crossing, 0.0, alive)
        if level < depth:
            gamma += float((alive * avg ** 2).sum()) * eps * eps
    return gamma


def _stopped_pair_arrays(x1, eps_values, eps_stop, depth):
    """Leaf values of U = W(x1, eps_values) and the stopped reflected V.

    Stopping cubes are chosen with ``eps_stop``; values use ``eps_values``.
    """
    u = np.full(1, float(x1))
    v = np.ones(1)
    ups = np.zeros(1, dtype=np.int64)
    inside = crosses_threshold(x1, eps_stop, ups, 0)
    ufac = np.array([1.0 - eps_values, 1.0 + eps_values])
    vfac = np.array([1.0 + eps_values, 1.0 - eps_values])
    for level in range(1, depth + 1):
        u = np.outer(u, ufac).ravel()
        v = (v[:, None] * np.where(inside[:, None], vfac, 1.0)).ravel()
        ups = (ups[:, None] + np.array([0, 1])).ravel()
        inside = np.repeat(inside, 2) | crosses_threshold(
            x1, eps_stop, ups, level - ups)
    return u, v


def _build_pair(x1, eps_values, eps_stop, depth, root):
    u, v = _stopped_pair_arrays(x1, eps_values, eps_stop, depth)
    return StepWeight(root, depth, v), StepWeight(root, depth, u)


def nazarov_pair(x1, x3, tau, depth=20, tol=1e-8, root=None):
    """One-dimensional pair (V, U) with gamma(U, V; J) = x3 and A2 <= 1.

    U is the cascade W(x1, J, eps); V is 1 off the stopping cubes of U and
    the reflected cascade W(1, I, -eps) inside each stopping cube I. The
    strength eps < tau/3 is found by bisection on gamma.
    """
    from .diagnostics import gamma_horizontal

    if not 0 < x1 < 1:
        raise ValueError(f'x1 must lie in (0, 1), got {x1}.')
    if not 0 < x3 < x1 / 4:
        raise ValueError(f'(x1, x3) = ({x1}, {x3}) is outside the region '
                         'Omega: need 0 < x3 < x1/4.')
    if not 0 < tau < 1:
        raise ValueError(f'tau must lie in (0, 1), got {tau}.')
    root = Cube.unit(1) if root is None else root

    lo, hi = 0.0, tau / 3 * (1 - 1e-9)
    g_lo, g_hi = 0.0, nazarov_gamma(x1, hi, depth)
    if g_hi < x3:
        raise TargetUnreachableError(
            f'Testing value {x3} is unreachable at depth {depth} with '
            f'eps < tau/3: achieved bracket [{g_lo:.6g}, {g_hi:.6g}].',
            (g_lo, g_hi))

    eps, gamma = hi, g_hi
    while abs(gamma - x3) > tol and hi - lo > 1e-14:
        mid = 0.5 * (lo + hi)
        g_mid = nazarov_gamma(x1, mid, depth)
        if g_mid < x3:
            lo, g_lo = mid, g_mid
        else:
            hi, g_hi = mid, g_mid
        eps, gamma = (mid, g_mid)
    log.debug(f'nazarov_pair: eps={eps:.12g} gamma={gamma:.12g} '
              f'bracket=[{lo:.3g}, {hi:.3g}]')

    if abs(gamma - x3) <= tol:
        V, U = _build_pair(x1, eps, eps, depth, root)
        gamma = gamma_horizontal(U, V, root)
        return NazarovPair(V, U, eps, depth, gamma, None)

    # gamma jumps across x3 where a stopping cube appears; blend the two
    # reflected weights built over the same U.
    V_hi, U = _build_pair(x1, hi, hi, depth, root)
    V_lo, _ = _build_pair(x1, hi, lo, depth, root)
    gamma_hi = gamma_horizontal(U, V_hi, root)
    gamma_lo = gamma_horizontal(U, V_lo, root)
    if not gamma_lo <= x3 <= gamma_hi:
        raise TargetUnreachableError(
            f'Bisection collapsed without bracketing {x3}: '
            f'[{gamma_lo:.12g}, {gamma_hi:.12g}].', (gamma_lo, gamma_hi))
    theta = (x3 - gamma_lo) / (gamma_hi - gamma_lo)
    V = StepWeight(root, depth, theta * V_hi.values + (1 - theta) * V_lo.values)
    return NazarovPair(V, U, hi, depth, gamma_horizontal(U, V, root), theta)


def tensorize(weight, dim, axis=0):
    """Extend a 1D weight constantly in the remaining coordinates."""
    if weight.dim != 1:
        raise ValueError('Only one-dimensional weights can be tensorized.')
    if dim < 2:
        raise ValueError('Tensorization needs dim >= 2.')
    box = weight.root.root
    root = Cube(dim, weight.root.level, weight.root.index * dim,
                Box.cube(box.lower * dim, box.lengths[0]))
    return TensorizedStepWeight(root, weight.depth, weight.values, axis)


def large_doubling_variant(V, U, M):
    """Glue the pair to a right neighbour carrying M times its averages."""
    if M < 1:
        raise ValueError(f'M must be >= 1, got {M}.')
    if V.dim != 1 or U.dim != 1:
        raise ValueError('The large-doubling variant is one-dimensional.')
    if V.root != U.root or V.depth != U.depth:
        raise ValueError('V and U must share root and depth.')
    box = U.root.box()
    root = Cube(1, 0, None, Box.cube(box.lower, 2 * box.lengths[0]))

    def glue(weight):
        right = np.full(weight.values.size, M * weight.mean())
        return StepWeight(root, weight.depth + 1,
                          np.concatenate([weight.values, right]))

    return glue(V), glue(U)
