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

import heapq
from itertools import count
import numpy as np
from numpy.polynomial.legendre import leggauss
import pylru

_rule_cache = pylru.lrucache(128)


class QuadratureError(RuntimeError):
    pass


def gauss_legendre(order):
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    order = int(order)
    if order < 1:
        raise ValueError('Quadrature order must be positive.')
    if order not in _rule_cache:
        nodes, weights = leggauss(order)
        nodes.setflags(write=False)
        weights.setflags(write=False)
        _rule_cache[order] = nodes, weights
    return _rule_cache[order]


def mapped_rule(order, a, b):
    nodes, weights = gauss_legendre(order)
    half = 0.5 * (b - a)
    return a + half * (nodes + 1.0), half * weights


def composite_rule(edges, order):
    """Gauss-Legendre rule of the given order on every interval of ``edges``."""
    edges = np.asarray(edges, dtype=float)
    nodes, weights = gauss_legendre(order)
    left, right = edges[:-1, None], edges[1:, None]
    half = 0.5 * (right - left)
    return (left + half * (nodes + 1.0)).ravel(), (half * weights).ravel()


def graded_edges(a, b, toward='both', ratio=0.25, levels=20):
    """Geometric mesh on [a, b] refined toward one or both endpoints."""
    if not a < b:
        raise ValueError('Empty interval.')
    if toward == 'both':
        mid = 0.5 * (a + b)
        left = graded_edges(a, mid, 'left', ratio, levels)
        right = graded_edges(mid, b, 'right', ratio, levels)
        return np.concatenate([left, right[1:]])
    steps = (b - a) * ratio ** np.arange(levels, 0, -1)
    if toward == 'left':
        return np.concatenate([[a], a + steps, [b]])
    if toward == 'right':
        return np.concatenate([[a], (b - steps)[::-1], [b]])
    raise ValueError(f'Unknown grading direction {toward!r}.')


def product_rule(rules):
    """Tensor product of 1D (nodes, weights) rules as (points, weights)."""
    grids = np.meshgrid(*[nodes for nodes, _ in rules], indexing='ij')
    points = np.stack([g.ravel() for g in grids], axis=-1)
    weights = np.ones(1)
    for _, w in rules:
        weights = np.multiply.outer(weights, w).ravel()
    return points, weights


def tensor_rule(order, lower, upper):
    return product_rule([mapped_rule(order, a, b) for a, b in zip(lower, upper)])


def _box_integral(f, lower, upper, order):
    points, weights = tensor_rule(order, lower, upper)
    return float(weights @ np.asarray(f(points), dtype=float))


def _split(lower, upper):
    dim = lower.size
    mid = 0.5 * (lower + upper)
    for code in range(1 << dim):
        upper_half = np.array([(code >> j) & 1 for j in range(dim)], dtype=bool)
        yield (np.where(upper_half, mid, lower), np.where(upper_half, upper, mid))


def adaptive_cubature(f, lower, upper, tol, order=8, max_boxes=20000):
    """Globally adaptive tensor Gauss-Legendre cubature.

    ``f`` maps an (N, dim) array of points to N values. Each box is scored by
    the difference between its own rule and the sum over its children; the
    worst box is bisected until the summed estimate drops below ``tol``.
    Returns (value, error estimate).
    """
    lower = np.atleast_1d(np.asarray(lower, dtype=float))
    upper = np.atleast_1d(np.asarray(upper, dtype=float))
    ticket = count()

    def assess(lo, hi, coarse):
        children = [(clo, chi, _box_integral(f, clo, chi, order))
                    for clo, chi in _split(lo, hi)]
        fine = sum(value for _, _, value in children)
        return abs(fine - coarse), fine, children

    coarse = _box_integral(f, lower, upper, order)
    err, fine, children = assess(lower, upper, coarse)
    heap = [(-err, next(ticket), fine, children)]
    total, error = fine, err
    n_boxes = 1
    while error > tol:
        if n_boxes >= max_boxes:
            raise QuadratureError(
                f'Adaptive cubature stopped at {n_boxes} boxes with error '
                f'estimate {error:.3g} > {tol:.3g}.')
        children = heapq.heappop(heap)[3]
        for clo, chi, value in children:
            cerr, cfine, grandkids = assess(clo, chi, value)
            heapq.heappush(heap, (-cerr, next(ticket), cfine, grandkids))
            n_boxes += 1
        total = sum(item[2] for item in heap)
        error = -sum(item[0] for item in heap)
    return total, error
