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

"""Testing, doubling and A2 functionals of weight pairs.

Everything here is exact for step data except the Riesz testing integrals,
which are integrated with graded Gauss-Legendre rules inside every cell of
the testing cube (see :class:`TestingRule`).
"""

from collections import namedtuple
from itertools import product
import numpy as np
import pandas as pd
import pylru

from .dyadic import Cube, grandchildren, halo
from .stepweight import (StepWeight, TensorizedStepWeight, HORIZONTAL,
                         block_mean, interleave_children)
from .singular import (KernelSpec, TensorTransform, GridTransform, constants,
                       graded_offsets)
from .quadrature import QuadratureError, composite_rule, graded_edges
from .log import log

ADJACENCY_MODES = ('siblings', 'touching', 'lattice')

TestingRule = namedtuple('TestingRule', ['order', 'ratio', 'levels'],
                         defaults=(6, 0.25, 6))
DENSE_RULE = TestingRule(4, 0.25, 4)

TestingValue = namedtuple('TestingValue', ['value', 'error', 'mass'])

Discrepancy = namedtuple('Discrepancy', [
    'total', 'A', 'B', 'C', 'D', 'diagonal', 'residual'])

_testing_cache = pylru.lrucache(1024)

REFINEMENTS = 3


def rule_for_tolerance(tol, order=6, ratio=0.25):
    """Graded rule whose innermost panels are below tol relative to a cell."""
    if not tol > 0:
        raise ValueError(f'Quadrature tolerance must be positive, got {tol}.')
    levels = int(np.ceil(np.log(1.0 / tol) / np.log(1.0 / ratio))) + 2
    return TestingRule(order, ratio, max(levels, 3))


def refined_rule(rule):
    return rule._replace(order=rule.order + 2, levels=rule.levels + 1)


def to_tolerance(evaluate, rule, tol, what, refinements=REFINEMENTS):
    """Refine ``rule`` until two successive values agree within tol.

    ``evaluate(rule)`` returns a scalar or a tuple of terms; agreement is
    measured in the largest term, relative to max(1, size). Returns the
    value on the finest rule used, its error estimate and that rule.
    """
    value = np.asarray(evaluate(rule), dtype=float)
    error = np.inf
    for _ in range(refinements):
        rule = refined_rule(rule)
        finer = np.asarray(evaluate(rule), dtype=float)
        error = float(np.abs(finer - value).max())
        value = finer
        if error <= tol * max(1.0, float(np.abs(value).max())):
            return value, error, rule
    raise QuadratureError(
        f'{what} did not reach tolerance {tol:g} after {refinements} '
        f'refinements (last change {error:.3g}).')


class TestingReport(namedtuple('TestingReport', [
        'gamma_horizontal', 'a2_dyadic', 'a2_classical', 'a_infty_sigma',
        'a_infty_omega', 'adjacency_dyadic', 'adjacency_full',
        'riesz_testing', 'discrepancies', 'metadata'])):

    def violations(self):
        found = []
        if self.a2_dyadic > self.a2_classical:
            found.append('a2_dyadic exceeds a2_classical')
        for name in ('adjacency_dyadic', 'adjacency_full'):
            if getattr(self, name) < 1:
                found.append(f'{name} below 1')
        scalars = [self.gamma_horizontal, self.a2_dyadic, self.a2_classical,
                   self.a_infty_sigma, self.a_infty_omega]
        scalars += list(self.riesz_testing.values())
        if not all(np.isfinite(v) and v >= 0 for v in scalars):
            found.append('non-finite or negative entry')
        return found

    def entries(self):
        rows = [(name, getattr(self, name)) for name in self._fields[:7]]
        rows += [(f'riesz_testing[{key}]', value)
                 for key, value in sorted(self.riesz_testing.items())]
        for t, disc in enumerate(self.discrepancies):
            rows += [(f'discrepancy[{t}].{f}', getattr(disc, f))
                     for f in Discrepancy._fields]
        return rows


def _same_tensor(V, U):
    return (isinstance(V, TensorizedStepWeight)
            and isinstance(U, TensorizedStepWeight) and V.axis == U.axis)


def _check_common(V, U):
    if V.root != U.root or V.depth != U.depth:
        raise ValueError('The weights must share their root and resolution.')


def _restrict(weight, Q):
    rel = Q.level - weight.root.level
    if rel > weight.depth:
        weight = weight.refine(rel)
    return weight.restrict(Q)


def _localize(V, U, J):
    _check_common(V, U)
    if J is None or J == V.root:
        return V, U, V.root
    return V.restrict(J), U.restrict(J), J


def _pair_arrays(V, U):
    """Leaf arrays, reduced to the profiles when both weights are tensorized
    along the same axis (cube averages then only see that axis)."""
    if _same_tensor(V, U):
        return V.profile, U.profile
    return V.dense(), U.dense()


def _horizontal_energy(V, U, level):
    """Sum over I in D_level of <V, h_I^horizontal>^2 E_I U."""
    if _same_tensor(V, U):
        if V.axis != 0:
            return 0.0
        pairs = V.profile_averages(level + 1).reshape(-1, 2)
        diff2 = (pairs[:, 0] - pairs[:, 1]) ** 2
        avg = U.profile_averages(level)
        volume = float(V.root.volume) / (1 << (V.dim * level))
        count = 1 << (level * (V.dim - 1))
        return count * volume / 4 * float(diff2 @ avg)
    coef = np.asarray(V.haar_level(level, HORIZONTAL))
    return float((coef ** 2 * U.averages(level)).sum())


def gamma_horizontal(V, U, J=None):
    """|J|^-1 sum over I in D(J) of <V, h_I^horizontal>^2 E_I U."""
    V, U, J = _localize(V, U, J)
    total = sum(_horizontal_energy(V, U, level) for level in range(V.depth))
    return total / float(J.volume)


def horizontal_energy_levels(V, U, J=None):
    """Per-level contributions to |J| gamma_horizontal."""
    V, U, J = _localize(V, U, J)
    return [_horizontal_energy(V, U, level) for level in range(V.depth)]


def square_function_testing(V, U, J=None):
    """Testing quotient of the localized horizontal square function.

    Builds S_J(1_J V)^2 = sum_I <V, h_I>^2 / |I| 1_I cube by cube and
    integrates it against U; equals gamma_horizontal.
    """
    V, U, J = _localize(V, U, J)
    n = V.cells_per_axis
    S2 = np.zeros((n,) * V.dim)
    for level in range(V.depth):
        size = n >> level
        for cube in grandchildren(J, level):
            coef = V.haar_coefficient(cube, HORIZONTAL)
            index = cube.relative_index(J)
            block = tuple(slice(i * size, (i + 1) * size) for i in index)
            S2[block] += coef ** 2 / float(cube.volume)
    return float((S2 * U.dense()).sum()) * V.cell_volume() / float(J.volume)


def a2_dyadic(V, U, J=None):
    V, U, J = _localize(V, U, J)
    v, u = _pair_arrays(V, U)
    best = 0.0
    for level in range(V.depth + 1):
        factor = 1 << (V.depth - level)
        best = max(best, float((block_mean(v, factor) * block_mean(u, factor)).max()))
    return best


def _window_means(values, m):
    """Averages over every m x ... x m window of cells."""
    out = np.asarray(values, dtype=float)
    for axis in range(out.ndim):
        cs = np.cumsum(out, axis=axis)
        pad = [(0, 0)] * out.ndim
        pad[axis] = (1, 0)
        cs = np.pad(cs, pad)
        n = cs.shape[axis]
        out = (np.take(cs, np.arange(m, n), axis=axis)
               - np.take(cs, np.arange(0, n - m), axis=axis)) / m
    return out


def a2_classical(V, U, J=None, scan_depth=None):
    """sup of (E_P V)(E_P U) over the dyadic cubes of J together with every
    cube whose corners lie on the 2^-scan_depth lattice of J."""
    V, U, J = _localize(V, U, J)
    scan_depth = V.depth if scan_depth is None else scan_depth
    if not 0 <= scan_depth <= V.depth:
        raise ValueError(f'Scan depth {scan_depth} exceeds the resolution '
                         f'{V.depth}.')
    v, u = _pair_arrays(V, U)
    factor = 1 << (V.depth - scan_depth)
    v, u = block_mean(v, factor), block_mean(u, factor)
    best = a2_dyadic(V, U)
    for m in range(1, (1 << scan_depth) + 1):
        best = max(best, float((_window_means(v, m) * _window_means(u, m)).max()))
    return best


def a2_adjacent_unions(V, U, J=None):
    """sup of (E_I V)(E_I U) over unions I of 2^n adjacent dyadic cubes."""
    V, U, J = _localize(V, U, J)
    v, u = _pair_arrays(V, U)
    best = 0.0
    for level in range(1, V.depth + 1):
        factor = 1 << (V.depth - level)
        best = max(best, float((_window_means(block_mean(v, factor), 2)
                                * _window_means(block_mean(u, factor), 2)).max()))
    return best


def a_infty_char(W, J=None):
    """sup over dyadic Q of (E_Q W) exp(E_Q ln(1/W))."""
    if J is not None and J != W.root:
        W = W.restrict(J)
    values = W.profile if isinstance(W, TensorizedStepWeight) else W.dense()
    if (values <= 0).any():
        log.warning('a_infty_char: weight vanishes on a cell; the A_infinity '
                    'characteristic is infinite.')
        return np.inf
    logs = np.log(values)
    best = 1.0
    for level in range(W.depth + 1):
        factor = 1 << (W.depth - level)
        ratio = block_mean(values, factor) * np.exp(-block_mean(logs, factor))
        best = max(best, float(ratio.max()))
    return best


def _ratio_extremes(a, b):
    with np.errstate(divide='ignore', invalid='ignore'):
        ratio = np.maximum(a / b, b / a)
    return float(np.nanmax(ratio)) if ratio.size else 1.0


def _shifted_pairs(values, step):
    """Ratios of entries at index offsets step * e, e in {-1,0,1}^n."""
    best = 1.0
    ndim = values.ndim
    for e in product((-1, 0, 1), repeat=ndim):
        # each unordered pair once: first nonzero offset positive
        if not any(e) or next(c for c in e if c) < 0:
            continue
        src, dst = [], []
        for c, n in zip(e, values.shape):
            shift = c * step
            if abs(shift) >= n:
                break
            src.append(slice(max(0, -shift), n - max(0, shift)))
            dst.append(slice(max(0, shift), n - max(0, -shift)))
        else:
            best = max(best, _ratio_extremes(values[tuple(src)],
                                             values[tuple(dst)]))
    return best


def adjacency_constant(W, mode='siblings', relative_to=None, scan_depth=None):
    """Largest ratio of averages over adjacent equal cubes inside the root.

    ``siblings`` compares dyadic children of a common parent, ``touching``
    all dyadic cubes of one level whose closures meet, and ``lattice`` all
    touching cubes with corners on the 2^-scan_depth lattice.
    """
    if mode not in ADJACENCY_MODES:
        raise ValueError(f'Unknown adjacency mode {mode!r}.')
    if relative_to is not None and relative_to != W.root:
        W = W.restrict(relative_to)
    values = W.profile if isinstance(W, TensorizedStepWeight) else W.dense()
    depth = W.depth
    best = 1.0
    if mode == 'siblings':
        for level in range(1, depth + 1):
            children = interleave_children(block_mean(values, 1 << (depth - level)))
            axes = tuple(range(1, 2 * values.ndim, 2))
            with np.errstate(divide='ignore', invalid='ignore'):
                ratio = children.max(axis=axes) / children.min(axis=axes)
            best = max(best, float(ratio.max()))
    elif mode == 'touching':
        for level in range(1, depth + 1):
            best = max(best, _shifted_pairs(
                block_mean(values, 1 << (depth - level)), 1))
    else:
        scan_depth = depth if scan_depth is None else scan_depth
        if not 0 <= scan_depth <= depth:
            raise ValueError(f'Scan depth {scan_depth} exceeds the resolution '
                             f'{depth}.')
        grid = block_mean(values, 1 << (depth - scan_depth))
        for m in range(1, (1 << scan_depth) // 2 + 1):
            best = max(best, _shifted_pairs(_window_means(grid, m), m))
    return best


def is_flat(adjacency, tau):
    return bool(adjacency < 1 + tau and 1 / adjacency > 1 - tau)


def halo_mass(W, P, delta, Q=None):
    """Exact W-mass of the delta-halo of P (inside Q, or inside P)."""
    if float(delta) * float(P.side) < W.cell_side():
        raise ValueError(f'Halo of width {float(delta) * float(P.side):.3g} is '
                         f'thinner than the resolution {W.cell_side():.3g}.')
    return sum(W.mass(box) for box in halo(P, delta, Q))


# Riesz testing integrals

def _as_weight(measure):
    return getattr(measure, 'density', measure)


def _tensor_like(weight, axis):
    if isinstance(weight, TensorizedStepWeight):
        return weight if weight.axis == axis else None
    values = weight.dense()
    if np.ptp(values) == 0:
        return TensorizedStepWeight(weight.root, weight.depth,
                                    np.full(weight.cells_per_axis,
                                            values.flat[0]), axis)
    return None


def _align(spec, weights):
    """Common resolution and evaluation layout for weights on one cube."""
    depth = max(w.depth for w in weights)
    weights = [w.refine(depth) for w in weights]
    dim = weights[0].dim
    if dim == 1:
        if spec.kind != 'hilbert':
            raise ValueError(f'{spec.label} does not act on 1D weights.')
        return '1d', weights
    if spec.kind != 'riesz' or spec.dim != dim:
        raise ValueError(f'{spec.label} does not act on {dim}D weights.')
    if dim != 2:
        raise ValueError('Riesz testing integrals are implemented in the plane.')
    axes = [w.axis for w in weights if isinstance(w, TensorizedStepWeight)]
    if axes:
        tensors = [_tensor_like(w, axes[0]) for w in weights]
        if all(t is not None for t in tensors):
            return 'tensor', tensors
    return 'dense', weights


def _cells(layout, weight):
    if layout == '1d':
        return weight.dense()
    if layout == 'tensor':
        return weight.profile[:, None]
    return weight.dense()


def _transform_blocks(spec, layout, sources, side, rule):
    """Yield (quadrature weights, [T f for f in sources]) node block by block.

    Nodes sit at graded relative offsets inside every cell of the cube, so
    weights broadcast against the cell arrays returned by ``_cells``.
    """
    n = sources[0].cells_per_axis
    h = side / n
    offsets, weights = graded_offsets(rule.order, rule.ratio, rule.levels)
    if layout == '1d':
        transforms = [TensorTransform('hilbert', f.dense(), 0.0, h) for f in sources]
        for o, w in zip(offsets, weights):
            yield w * h, [T.evaluate(0, n, [o])[0] for T in transforms]
    elif layout == 'tensor':
        j = spec.axis if sources[0].axis == 0 else 3 - spec.axis
        ys, yw = composite_rule(
            graded_edges(0.0, side, 'both', rule.ratio, rule.levels), rule.order)
        transforms = [TensorTransform(f'riesz{j}', f.profile, 0.0, h, (0.0, side))
                      for f in sources]
        for o, w in zip(offsets, weights):
            yield (w * h) * yw[None, :], [T.evaluate(0, n, [o], ys)[0]
                                          for T in transforms]
    else:
        transforms = [GridTransform(spec.axis, f.dense(), h) for f in sources]
        for (o1, w1), (o2, w2) in product(zip(offsets, weights), repeat=2):
            yield w1 * w2 * h * h, [T.evaluate((0, 0), (n, n), (o1, o2))
                                    for T in transforms]


def _testing_integral(spec, layout, sigma, omega, side, rule):
    key = None
    if layout != 'dense':
        key = (spec, layout, getattr(sigma, 'axis', 0), side, rule,
               _cells(layout, sigma).tobytes(), _cells(layout, omega).tobytes())
        if key in _testing_cache:
            return _testing_cache[key]
    cells = _cells(layout, omega)
    total = 0.0
    for weights, (values,) in _transform_blocks(spec, layout, [sigma], side, rule):
        total += float((weights * values ** 2 * cells).sum())
    if key is not None:
        _testing_cache[key] = total
    return total


def riesz_testing(spec, sigma, omega, Q=None, tol=None, rule=None,
                  estimate_error=True, refinements=REFINEMENTS):
    """(1/|Q|_sigma) integral over Q of |T(1_Q sigma)|^2 d omega.

    With ``tol`` the rule (``rule_for_tolerance(tol)`` unless given) is
    refined until two successive values agree within tol, and
    QuadratureError is raised when that takes more than ``refinements``
    steps. Without it the value comes from ``rule`` alone and the error is
    its distance to the next finer rule.
    """
    sigma, omega = _as_weight(sigma), _as_weight(omega)
    Q = sigma.root if Q is None else Q
    layout, (s, w) = _align(spec, [_restrict(sigma, Q), _restrict(omega, Q)])
    mass = s.total_mass()
    if mass <= 0:
        raise ValueError(f'{Q} carries no sigma-mass.')
    side = float(Q.side)

    def evaluate(r):
        return _testing_integral(spec, layout, s, w, side, r) / mass

    if tol is not None:
        rule = rule_for_tolerance(tol) if rule is None else rule
        value, error, _ = to_tolerance(
            evaluate, rule, tol, f'{spec.label} testing on {Q}', refinements)
        return TestingValue(float(value), error, mass)
    if rule is None:
        rule = DENSE_RULE if layout == 'dense' else TestingRule()
    value = evaluate(rule)
    error = np.nan
    if estimate_error:
        error = abs(value - evaluate(refined_rule(rule)))
    return TestingValue(value, error, mass)


def _testing_job(spec, sigma, omega, Q, tol, rule):
    return riesz_testing(spec, sigma, omega, Q, tol, rule,
                         estimate_error=tol is not None).value


def testing_scan(spec, sigma, omega, scan_depth, tol=None, rule=None,
                 executor=None):
    """Testing values over every dyadic cube of the root down to scan_depth."""
    sigma, omega = _as_weight(sigma), _as_weight(omega)
    cubes = [Q for level in range(scan_depth + 1)
             for Q in grandchildren(sigma.root, level)]
    args = [(spec, sigma, omega, Q, tol, rule) for Q in cubes]
    if executor is None:
        values = [_testing_job(*a) for a in args]
    else:
        values = list(executor.map(_testing_job, *zip(*args)))
    return pd.DataFrame({
        'level': [Q.level - sigma.root.level for Q in cubes],
        'index': [','.join(map(str, Q.relative_index(sigma.root))) for Q in cubes],
        'value': values})


def quarter_turn_cube(cube, root):
    """Image of a dyadic cube under the quarter turn x -> (-x2, x1) about
    the center of the root."""
    rel = cube.level - root.level
    n = 1 << rel
    i1, i2 = cube.relative_index(root)[:2]
    index = (n - 1 - i2, i1) + tuple(cube.relative_index(root)[2:])
    return Cube(root.dim, cube.level,
                tuple((r << rel) + i for r, i in zip(root.index, index)),
                root.root)


def rotation_swap(sigma, omega, scan_depth, tol=None, rule=None,
                  executor=None):
    """R_1 and R_2 testing tables before and after a quarter turn.

    Returns the merged table and the largest swap deviation
    max |R1(Q) - R2'(rot Q)|, |R2(Q) - R1'(rot Q)|.
    """
    sigma, omega = _as_weight(sigma), _as_weight(omega)
    if sigma.dim != 2:
        raise ValueError('The rotation swap is a planar check.')
    r1, r2 = KernelSpec.riesz(1, 2), KernelSpec.riesz(2, 2)
    rot_sigma, rot_omega = sigma.rot90(), omega.rot90()
    cubes = [Q for level in range(scan_depth + 1)
             for Q in grandchildren(sigma.root, level)]
    args = []
    for Q in cubes:
        Qr = quarter_turn_cube(Q, sigma.root)
        args += [(r1, sigma, omega, Q, tol, rule),
                 (r2, sigma, omega, Q, tol, rule),
                 (r1, rot_sigma, rot_omega, Qr, tol, rule),
                 (r2, rot_sigma, rot_omega, Qr, tol, rule)]
    if executor is None:
        values = [_testing_job(*a) for a in args]
    else:
        values = list(executor.map(_testing_job, *zip(*args)))
    values = np.array(values).reshape(-1, 4)
    table = pd.DataFrame({
        'level': [Q.level - sigma.root.level for Q in cubes],
        'index': [','.join(map(str, Q.relative_index(sigma.root))) for Q in cubes],
        'R1': values[:, 0], 'R2': values[:, 1],
        'R1_rotated': values[:, 2], 'R2_rotated': values[:, 3]})
    deviation = float(max(np.abs(values[:, 0] - values[:, 3]).max(),
                          np.abs(values[:, 1] - values[:, 2]).max()))
    return table, deviation


def discrepancy(spec, state_v, state_u, Q=None, t=None, tol=1e-6, rule=None,
                executor=None, refinements=REFINEMENTS):
    """Stage-t change of the testing integral and its four-term split.

    Disc = int (T v_{t+1})^2 u_{t+1} - int (T v_t)^2 u_t = A + B + C + D with
    delta = v_{t+1} - v_t, eta = u_{t+1} - u_t and
    A = int (T delta)^2 u_{t+1}, B = 2 int T delta T v_t u_t,
    C = 2 int T delta T v_t eta, D = int (T v_t)^2 eta; all transforms act on
    1_Q times the weight. On the root, the R_1 (or H) diagonal prediction is
    B_n^2 times the level-t horizontal energy of the sources.

    The terms are refined to ``tol`` as in :func:`riesz_testing`; a None
    tol evaluates them once on ``rule``.
    """
    root = state_v.root
    Q = root if Q is None else Q
    t = state_v.t - 1 if t is None else t
    if not 0 <= t < min(state_v.t, state_u.t):
        raise ValueError(f'Stages {t} and {t + 1} are not both available.')
    weights = [_restrict(w, Q) for w in (state_v.stage(t), state_v.stage(t + 1),
                                         state_u.stage(t), state_u.stage(t + 1))]
    layout, (v0, v1, u0, u1) = _align(spec, weights)
    if rule is None:
        if layout == 'dense':
            rule = DENSE_RULE
        else:
            rule = TestingRule() if tol is None else rule_for_tolerance(tol)
    c0, c1 = _cells(layout, u0), _cells(layout, u1)
    eta = c1 - c0
    side = float(Q.side)

    def evaluate(r):
        A = B = C = D = 0.0
        for w, (R0, R1) in _transform_blocks(spec, layout, [v0, v1], side, r):
            Rd = R1 - R0
            A += float((w * Rd ** 2 * c1).sum())
            B += 2 * float((w * Rd * R0 * c0).sum())
            C += 2 * float((w * Rd * R0 * eta).sum())
            D += float((w * R0 ** 2 * eta).sum())
        return A, B, C, D

    if tol is None:
        A, B, C, D = evaluate(rule)
    else:
        terms, _, _ = to_tolerance(evaluate, rule, tol,
                                   f'Stage {t} discrepancy on {Q}', refinements)
        A, B, C, D = map(float, terms)
    total = A + B + C + D

    diagonal = np.nan
    if Q == root:
        first_axis = spec.kind == 'hilbert' or spec.axis == 1
        diagonal = 0.0
        if first_axis:
            B_n = constants(root.dim).B
            diagonal = B_n ** 2 * _horizontal_energy(state_v.source,
                                                     state_u.source, t)
    log.debug(f'discrepancy t={t}: A={A:.6g} B={B:.6g} C={C:.6g} D={D:.6g} '
              f'diagonal={diagonal:.6g}')
    return Discrepancy(total, A, B, C, D, diagonal, total - diagonal)


def weak_probe(family, g, k_list):
    """Pairings <f_k, g> for the grid functions produced by ``family(k)``.

    ``family(k)`` returns (points, weights, values); ``g`` maps points to
    values.
    """
    pairings = []
    for k in k_list:
        points, weights, values = family(k)
        pairings.append(float(np.sum(weights * values * g(points))))
    return pairings


def testing_report(V, U, J=None, scan_depth=None, riesz=(), rule=None,
                   discrepancies=()):
    """All pair functionals of (V, U) on J in one record."""
    V, U, J = _localize(V, U, J)
    scan = min(V.depth, 6 if V.dim == 1 else 4) if scan_depth is None else scan_depth
    testing = {}
    for spec in riesz:
        testing[spec.label] = riesz_testing(spec, V, U, J, rule=rule,
                                            estimate_error=False).value
    return TestingReport(
        gamma_horizontal=gamma_horizontal(V, U),
        a2_dyadic=a2_dyadic(V, U),
        a2_classical=a2_classical(V, U, scan_depth=scan),
        a_infty_sigma=a_infty_char(V),
        a_infty_omega=a_infty_char(U),
        adjacency_dyadic=max(adjacency_constant(V), adjacency_constant(U)),
        adjacency_full=max(adjacency_constant(V, 'lattice', scan_depth=scan),
                           adjacency_constant(U, 'lattice', scan_depth=scan)),
        riesz_testing=testing,
        discrepancies=list(discrepancies),
        metadata={'depth': V.depth, 'scan_depth': scan, 'root': str(J)})
