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
import pandas as pd
from scipy.optimize import minimize_scalar

from .singular import (KernelSpec, TensorTransform, constants, fft_multiplier,
                       graded_offsets)
from .quadrature import composite_rule, graded_edges
from .diagnostics import TestingRule

AltSeriesCheck = namedtuple('AltSeriesCheck', ['lhs', 'bound', 'envelope'])
Exposure = namedtuple('Exposure', ['rotation', 'angle', 'coefficient'])
GridFunction = namedtuple('GridFunction', ['points', 'weights', 'values'])
RepresentationPoint = namedtuple('RepresentationPoint', [
    'k', 'rep_distance', 'r2_norm', 'r1_square_mean', 'hilbert_square_mean'])

HILBERT_FAMILIES = ('s_k', 'Hs_k', 's_k*Hs_k', '(Hs_k)^2-1_I', 'mixed')
RIESZ_FAMILIES = ('R1s_k', '(R1s_k)^2-B^2*1_P')


def parity(index):
    return np.where(np.asarray(index) % 2 == 0, 1.0, -1.0)


def alt_series_bound_check(b, k, pieces=1, order=16):
    """|int_0^1 b s_k| against pieces * 2^-k * sup|b|.

    ``b`` is integrated cell by cell with a Gauss-Legendre rule of the given
    order; the ratio of the two sides is returned as the measured envelope.
    """
    n = 1 << k
    nodes, weights = composite_rule(np.linspace(0.0, 1.0, n + 1), order)
    values = np.asarray(b(nodes), dtype=float)
    cells = (values * weights).reshape(n, order).sum(axis=1)
    lhs = abs(float(parity(np.arange(n)) @ cells))
    sup = float(np.abs(np.concatenate([values, np.asarray(b(np.array([0.0, 1.0])),
                                                           dtype=float)])).max())
    bound = pieces * sup / n
    return AltSeriesCheck(lhs, bound, lhs / bound if bound else 0.0)


def exposing_coefficient(beta, theta):
    """Coefficient of eta_1^N in xi^beta after the planar rotation by theta."""
    b1, b2 = beta
    return np.cos(theta) ** b1 * np.sin(theta) ** b2


def rotation_exposing(beta, samples=256):
    """Rotation under which xi^beta contains the monomial eta_1^N.

    The eta_1^N coefficient of the rotated monomial is prod_j w_j^beta_j with
    w the first column of the rotation.
    """
    beta = tuple(int(b) for b in beta)
    order = sum(beta)
    if order < 1 or any(b < 0 for b in beta):
        raise ValueError('Need a multi-index with |beta| >= 1.')
    dim = len(beta)
    if beta[0] == order:
        return Exposure(np.eye(dim), 0.0, 1.0)
    if dim == 2:
        thetas = np.linspace(0.0, np.pi / 2, samples + 1)
        coeffs = np.abs(exposing_coefficient(beta, thetas))
        best = int(np.argmax(coeffs))
        step = thetas[1] - thetas[0]
        res = minimize_scalar(lambda th: -abs(exposing_coefficient(beta, th)),
                              bounds=(max(thetas[best] - step, 0.0),
                                      min(thetas[best] + step, np.pi / 2)),
                              method='bounded')
        theta = float(res.x)
        c, s = np.cos(theta), np.sin(theta)
        rotation = np.array([[c, -s], [s, c]])
        coefficient = float(exposing_coefficient(beta, theta))
    else:
        omega = np.sqrt(np.array(beta, dtype=float) / order)
        v = np.eye(dim)[0] - omega
        rotation = np.eye(dim) - 2 * np.outer(v, v) / (v @ v)
        rotation[:, -1] *= -1
        theta = None
        coefficient = float(np.prod(omega ** np.array(beta)))
    if coefficient == 0:
        raise ValueError(f'No exposing rotation found for {beta}.')
    return Exposure(rotation, theta, coefficient)


def reduction_terms(N, dim):
    """Signed terms of R_1^N rewritten through sum_j R_j^2 = -I.

    R_1^N = (-1)^m R_1^(N-2m) + sum_{k=1..m} (-1)^k sum_{j>=2} R_1^(N-2k) R_j^2
    with m = N // 2. Each term is (sign, beta); beta None is the identity.
    """
    if N < 1 or dim < 1:
        raise ValueError('Need N >= 1 and dim >= 1.')
    m = N // 2
    rest = N - 2 * m
    head = None if rest == 0 else (rest,) + (0,) * (dim - 1)
    terms = [((-1) ** m, head)]
    for k in range(1, m + 1):
        for j in range(1, dim):
            beta = [0] * dim
            beta[0] = N - 2 * k
            beta[j] = 2
            terms.append(((-1) ** k, tuple(beta)))
    return terms


def reduction_expansion(N, samples, lengths=None):
    """R_1^N applied term by term through the reduction formula.

    The identity term acts on the mean-zero part, like every multiplier.
    """
    samples = np.asarray(samples, dtype=float)
    total = np.zeros_like(samples)
    for sign, beta in reduction_terms(N, samples.ndim):
        if beta is None:
            total += sign * (samples - samples.mean())
        else:
            total += sign * fft_multiplier(KernelSpec.iterated(beta), samples, lengths)
    return total


def riesz_square_sum(samples, lengths=None):
    samples = np.asarray(samples, dtype=float)
    n = samples.ndim
    total = np.zeros_like(samples)
    for j in range(1, n + 1):
        spec = KernelSpec.riesz(j, n)
        total += fft_multiplier(spec, fft_multiplier(spec, samples, lengths), lengths)
    return total


def _y_rule(window, rule):
    parts = []
    cuts = sorted({window[0], 0.0, 1.0, window[1]})
    for a, b in zip(cuts, cuts[1:]):
        toward = 'both' if (a, b) == (0.0, 1.0) else ('right' if b == 0.0 else 'left')
        parts.append(composite_rule(graded_edges(a, b, toward, rule.ratio,
                                                 rule.levels), rule.order))
    return (np.concatenate([p[0] for p in parts]),
            np.concatenate([p[1] for p in parts]))


def representation_study(k, p=2.0, window=(-0.5, 1.5), rule=None):
    """Desk-scale check of the R_1 to H reduction for the horizontal pattern.

    With s_k the horizontal sign pattern of P = [0,1]^2 at scale 2^-k:
    ``rep_distance`` is |R_1 s_k - B_2 (H s_k^{P_1}) x 1_{P'}| and ``r2_norm``
    is |R_2 s_k|, both in L^p of the window squared; ``r1_square_mean`` is
    <(R_1 s_k)^2, 1_P> / |P| and ``hilbert_square_mean`` the 1D analogue.
    """
    rule = TestingRule() if rule is None else rule
    if not (window[0] < 0 and window[1] > 1):
        raise ValueError('The window must contain [0, 1] in its interior.')
    n = 1 << k
    h = 1.0 / n
    first = int(np.floor(window[0] * n))
    count = int(np.ceil(window[1] * n)) - first
    profile = parity(np.arange(n))
    B = constants(2).B
    r1 = TensorTransform('riesz1', profile, 0.0, h, (0.0, 1.0))
    r2 = TensorTransform('riesz2', profile, 0.0, h, (0.0, 1.0))
    hilbert = TensorTransform('hilbert', profile, 0.0, h)
    offsets, ow = graded_offsets(rule.order, rule.ratio, rule.levels)
    ys, yw = _y_rule(window, rule)
    inside_y = ((ys > 0) & (ys < 1)).astype(float)
    cells = first + np.arange(count)
    inside_x = ((cells >= 0) & (cells < n)).astype(float)

    rep = r2_acc = r1_sq = h_sq = 0.0
    for o, w in zip(offsets, ow):
        R1 = r1.evaluate(first, count, [o], ys)[0]
        R2 = r2.evaluate(first, count, [o], ys)[0]
        H = hilbert.evaluate(first, count, [o])[0]
        weight = w * h * yw[None, :]
        rep += float((weight * np.abs(R1 - B * H[:, None] * inside_y) ** p).sum())
        r2_acc += float((weight * np.abs(R2) ** p).sum())
        r1_sq += float((weight * R1 ** 2 * inside_x[:, None] * inside_y).sum())
        h_sq += float(w * h * (H ** 2 * inside_x).sum())
    return RepresentationPoint(k, rep ** (1 / p), r2_acc ** (1 / p), r1_sq, h_sq)


def representation_table(k_values, p=2.0, rule=None, executor=None):
    if executor is None:
        points = [representation_study(k, p, rule=rule) for k in k_values]
    else:
        points = list(executor.map(representation_study, k_values,
                                   [p] * len(k_values), [(-0.5, 1.5)] * len(k_values),
                                   [rule] * len(k_values)))
    return pd.DataFrame(points, columns=RepresentationPoint._fields)


def decay_rate(ks, values):
    """Fitted exponent r in values ~ C 2^(-r k)."""
    slope = np.polyfit(np.asarray(ks, dtype=float), np.log2(values), 1)[0]
    return float(-slope)


# Weak-convergence probe families

def _cell_nodes(k, window, rule):
    n = 1 << k
    h = 1.0 / n
    first = int(np.floor(window[0] * n))
    count = int(np.ceil(window[1] * n)) - first
    offsets, ow = graded_offsets(rule.order, rule.ratio, rule.levels)
    return n, h, first, count, offsets, ow


def _pattern(cells, n, shift):
    idx = cells - shift * n
    return np.where((idx >= 0) & (idx < n), parity(idx), 0.0)


def hilbert_family(name, window=(-1.0, 3.0), rule=None):
    """Generator k -> GridFunction for the 1D probe families.

    s_k is the sign pattern on I = [0, 1]; the mixed family is
    s_k^I (H s_k^J)(H s_k^K) with J = [1, 2] and K = [2, 3].
    """
    if name not in HILBERT_FAMILIES:
        raise ValueError(f'Unknown probe family {name!r}.')
    rule = TestingRule() if rule is None else rule

    def generate(k):
        n, h, first, count, offsets, ow = _cell_nodes(k, window, rule)
        cells = first + np.arange(count)
        points = ((cells[None, :] + offsets[:, None]) * h).ravel()
        weights = np.repeat(ow * h, count)

        def H(shift):
            T = TensorTransform('hilbert', parity(np.arange(n)), shift, h)
            return T.evaluate(first - shift * n, count, offsets)

        def s(shift):
            return np.broadcast_to(_pattern(cells, n, shift), (len(offsets), count))

        if name == 's_k':
            values = s(0)
        elif name == 'Hs_k':
            values = H(0)
        elif name == 's_k*Hs_k':
            values = s(0) * H(0)
        elif name == '(Hs_k)^2-1_I':
            values = H(0) ** 2 - np.abs(s(0))
        else:
            values = s(0) * H(1) * H(2)
        return GridFunction(points, weights, np.asarray(values).ravel())

    return generate


def riesz_family(name, window=(-0.5, 1.5), rule=None):
    """Generator k -> GridFunction over the window squared for R_1 probes."""
    if name not in RIESZ_FAMILIES:
        raise ValueError(f'Unknown probe family {name!r}.')
    rule = TestingRule() if rule is None else rule
    B = constants(2).B

    def generate(k):
        n, h, first, count, offsets, ow = _cell_nodes(k, window, rule)
        ys, yw = _y_rule(window, rule)
        cells = first + np.arange(count)
        T = TensorTransform('riesz1', parity(np.arange(n)), 0.0, h, (0.0, 1.0))
        values = T.evaluate(first, count, offsets, ys)
        if name != 'R1s_k':
            inside = (np.abs(_pattern(cells, n, 0))[:, None]
                      * ((ys > 0) & (ys < 1))[None, :])
            values = values ** 2 - B ** 2 * inside
        x1 = (cells[None, :] + offsets[:, None]) * h
        shape = values.shape
        points = np.stack([np.broadcast_to(x1[:, :, None], shape).ravel(),
                           np.broadcast_to(ys[None, None, :], shape).ravel()], axis=1)
        weights = (ow[:, None, None] * h * yw[None, None, :]
                   * np.ones((1, count, 1))).ravel()
        return GridFunction(points, weights, values.ravel())

    return generate
