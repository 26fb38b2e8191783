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
from itertools import product
import numpy as np
from scipy import fft as sp_fft
from scipy import signal
from scipy.integrate import quad
from scipy.special import gamma as gamma_fn

from .quadrature import adaptive_cubature, composite_rule, graded_edges

RieszConstants = namedtuple('RieszConstants', ['n', 'c', 'A', 'B'])


class KernelSpec(namedtuple('KernelSpec',
                            ['kind', 'dim', 'axis', 'beta', 'delta', 'R'])):
    """Hilbert, Riesz or iterated Riesz kernel with truncation radii.

    ``axis`` is 1-based for Riesz kernels. ``delta`` and ``R`` are the inner
    and outer radii of the hard cutoff used by principal-value quadrature.
    """

    @classmethod
    def hilbert(cls, delta=0.0, R=np.inf):
        return cls._make_checked('hilbert', 1, 1, None, delta, R)

    @classmethod
    def riesz(cls, j, n, delta=0.0, R=np.inf):
        if not 1 <= j <= n:
            raise ValueError(f'Riesz axis {j} outside 1..{n}.')
        return cls._make_checked('riesz', n, j, None, delta, R)

    @classmethod
    def iterated(cls, beta, delta=0.0, R=np.inf):
        beta = tuple(int(b) for b in beta)
        if any(b < 0 for b in beta) or sum(beta) < 1:
            raise ValueError('Iterated Riesz transforms need a multi-index '
                             'with |beta| >= 1.')
        return cls._make_checked('iterated', len(beta), None, beta, delta, R)

    @classmethod
    def _make_checked(cls, kind, dim, axis, beta, delta, R):
        if delta < 0 or not R > delta:
            raise ValueError('Truncation radii need 0 <= delta < R.')
        return cls(kind, dim, axis, beta, float(delta), float(R))

    @property
    def label(self):
        if self.kind == 'hilbert':
            return 'H'
        if self.kind == 'riesz':
            return f'R{self.axis}'
        return 'R^(' + ','.join(map(str, self.beta)) + ')'

    @property
    def truncated(self):
        return self.delta > 0 or np.isfinite(self.R)

    def symbol(self, xi):
        """Fourier symbol on a stack of frequency grids ``xi[j]``."""
        xi = [np.asarray(x, dtype=float) for x in xi]
        norm = np.sqrt(sum(x ** 2 for x in xi))
        zero = norm == 0
        norm = np.where(zero, 1.0, norm)
        if self.kind == 'hilbert':
            sym = -1j * np.sign(xi[0])
        elif self.kind == 'riesz':
            sym = -1j * xi[self.axis - 1] / norm
        else:
            order = sum(self.beta)
            sym = (-1j) ** order * np.ones_like(norm, dtype=complex)
            for x, b in zip(xi, self.beta):
                sym = sym * (x / norm) ** b
        return np.where(zero, 0.0, sym)


def constants(n):
    """c_n, A_1..A_n and B_n = c_n A_n ... A_1."""
    if n < 1:
        raise ValueError('Dimension must be at least 1.')
    c = gamma_fn(0.5 * (n + 1)) / np.pi ** (0.5 * (n + 1))
    A = [np.pi, 2.0]
    for k in range(3, n + 1):
        A.append(A[k - 3] * (k - 2) / (k - 1))
    A = tuple(A[:n])
    return RieszConstants(n, float(c), A, float(c * np.prod(A)))


def asinh_pv(u, s):
    """asinh(s/|u|), continued by sign(s) ln|s| on u = 0.

    The continuation drops a divergent term that cancels whenever values
    are differenced along a common u.
    """
    u = np.abs(np.asarray(u, dtype=float))
    s = np.asarray(s, dtype=float)
    with np.errstate(divide='ignore', invalid='ignore'):
        regular = np.arcsinh(s / np.where(u > 0, u, 1.0))
        degenerate = np.sign(s) * np.log(np.abs(s))
    return np.where(u > 0, regular, degenerate)


def _step_jumps(values):
    padded = np.concatenate([[0.0], np.asarray(values, dtype=float), [0.0]])
    return np.diff(padded)


def hilbert_steps(edges, values, x):
    """H of the step function with ``values`` on the cells of ``edges``.

    Exact: H f(x) = (1/pi) sum_p (v_p - v_{p-1}) ln|x - xi_p|.
    """
    edges = np.asarray(edges, dtype=float)
    jumps = _step_jumps(values)
    x = np.asarray(x, dtype=float)
    with np.errstate(divide='ignore', invalid='ignore'):
        logs = np.log(np.abs(x[..., None] - edges))
        terms = np.where(jumps == 0, 0.0, jumps * logs)
    return terms.sum(axis=-1) / np.pi


def _grid_edges(W, axis):
    lower, upper = W.root.box().as_float()
    return np.linspace(lower[axis], upper[axis], W.cells_per_axis + 1)


def hilbert_step(W, x):
    if W.dim != 1:
        raise ValueError('hilbert_step needs a 1D weight.')
    return hilbert_steps(_grid_edges(W, 0), W.dense(), x)


def hilbert_quad(edges, values, x):
    """Hilbert transform of step data through scipy's Cauchy-weight QAWC."""
    total = 0.0
    for a, b, v in zip(edges[:-1], edges[1:], values):
        if v == 0:
            continue
        if a < x < b:
            part = quad(lambda y: 1.0, a, b, weight='cauchy', wvar=x)[0]
        else:
            part = quad(lambda y: 1.0 / (y - x), a, b, epsabs=1e-13,
                        epsrel=1e-13)[0]
        total -= v * part
    return total / np.pi


def riesz_steps(j, edges1, edges2, values, points, chunk=4096):
    """R_j (j = 1, 2) of a 2D step function, summed over grid corners.

    Cell (p, q) of ``values`` covers [edges1[p], edges1[p+1]] x
    [edges2[q], edges2[q+1]].
    """
    if j not in (1, 2):
        raise ValueError('Closed-form Riesz transforms are 2D.')
    c2 = constants(2).c
    padded = np.pad(np.asarray(values, dtype=float), 1)
    corners = -np.diff(np.diff(padded, axis=0), axis=1)
    p, q = np.nonzero(corners)
    weights = corners[p, q]
    xi = np.asarray(edges1, dtype=float)[p]
    eta = np.asarray(edges2, dtype=float)[q]
    points = np.atleast_2d(np.asarray(points, dtype=float))
    out = np.empty(len(points))
    for start in range(0, len(points), chunk):
        block = points[start:start + chunk]
        u = block[:, :1] - xi
        s = block[:, 1:2] - eta
        G = asinh_pv(u, s) if j == 1 else asinh_pv(s, u)
        out[start:start + chunk] = c2 * (G @ weights)
    return out


def _on_boundary(lower, upper, x):
    inside = np.all((x >= lower) & (x <= upper))
    on_face = np.any((x == lower) | (x == upper))
    return bool(inside and on_face)


def riesz_rect(j, rect, x):
    """Closed form of R_j 1_rect(x) in the plane."""
    lower = np.asarray([float(v) for v in rect[0]])
    upper = np.asarray([float(v) for v in rect[1]])
    x = np.asarray(x, dtype=float)
    if lower.size != 2 or x.size != 2:
        raise ValueError('riesz_rect works in the plane.')
    if _on_boundary(lower, upper, x):
        raise ValueError(f'Point {tuple(x)} lies on the rectangle boundary.')
    values = np.ones((1, 1))
    return float(riesz_steps(j, [lower[0], upper[0]], [lower[1], upper[1]],
                             values, x[None, :])[0])


def riesz_step(spec, W, points):
    """Exact transform of a 1D (Hilbert) or 2D (Riesz) step weight."""
    if spec.kind == 'hilbert':
        return hilbert_step(W, np.asarray(points, dtype=float))
    if spec.kind != 'riesz' or W.dim != 2:
        raise ValueError(f'No closed form for {spec.label} in dimension '
                         f'{W.dim}.')
    return riesz_steps(spec.axis, _grid_edges(W, 0), _grid_edges(W, 1),
                       W.dense(), points)


def _kernel(spec, x):
    c = constants(spec.dim).c
    j = 0 if spec.kind == 'hilbert' else spec.axis - 1

    def evaluate(points):
        y = x - points
        r = np.sqrt(np.sum(y ** 2, axis=1))
        val = c * y[:, j] / r ** (spec.dim + 1)
        if spec.truncated:
            val = np.where((r > spec.delta) & (r < spec.R), val, 0.0)
        return val
    return evaluate


def _punctured_cell(lower, upper, x):
    """Boxes tiling the cell minus the largest cube centered at ``x``."""
    radius = float(np.min(np.minimum(x - lower, upper - x)))
    if radius <= 0:
        raise ValueError(f'Point {tuple(x)} lies on a cell boundary.')
    cuts = [sorted({lo, xc - radius, xc + radius, hi})
            for lo, xc, hi in zip(lower, x, upper)]
    boxes = []
    for pieces in product(*[range(len(c) - 1) for c in cuts]):
        lo = np.array([c[i] for c, i in zip(cuts, pieces)])
        hi = np.array([c[i + 1] for c, i in zip(cuts, pieces)])
        if np.allclose(0.5 * (lo + hi), x) and np.allclose(hi - lo, 2 * radius):
            continue
        boxes.append((lo, hi))
    return boxes


def riesz_quad(spec, W, x, tol=1e-8, order=8, max_boxes=20000,
               return_error=False):
    """Principal value of the truncated kernel against W by cubature.

    The largest cube centered at ``x`` inside its own cell contributes
    nothing by oddness and is cut out; everything else is integrated cell
    by cell with adaptive tensor Gauss-Legendre.
    """
    if spec.kind == 'iterated':
        raise ValueError('Iterated Riesz transforms go through fft_multiplier.')
    if spec.dim != W.dim:
        raise ValueError(f'{spec.label} is {spec.dim}D but the weight is '
                         f'{W.dim}D.')
    x = np.asarray(x, dtype=float).reshape(W.dim)
    kernel = _kernel(spec, x)
    root_lo = W.root.box().as_float()[0]
    side = W.cell_side()
    values = W.dense()
    own = np.floor((x - root_lo) / side).astype(int)
    jobs = []
    for index in zip(*np.nonzero(values)):
        lo = root_lo + side * np.asarray(index)
        hi = lo + side
        if tuple(index) == tuple(own):
            jobs.extend((blo, bhi, values[index])
                        for blo, bhi in _punctured_cell(lo, hi, x))
        else:
            jobs.append((lo, hi, values[index]))
    if not jobs:
        return (0.0, 0.0) if return_error else 0.0
    share = tol / len(jobs)
    total = error = 0.0
    for lo, hi, v in jobs:
        val, err = adaptive_cubature(kernel, lo, hi, share / abs(v), order,
                                     max_boxes)
        total += v * val
        error += abs(v) * err
    return (total, error) if return_error else total


def _check_power_of_two(shape):
    for size in shape:
        if size < 1 or size & (size - 1):
            raise ValueError(f'Grid size {size} is not a power of two.')


def frequency_grids(shape, lengths):
    freqs = [sp_fft.fftfreq(size, d=length / size)
             for size, length in zip(shape, lengths)]
    return np.meshgrid(*freqs, indexing='ij')


def fft_multiplier(spec, samples, lengths=None, workers=None):
    """Apply the transform as a Fourier multiplier on the periodic grid."""
    samples = np.asarray(samples)
    if samples.ndim != spec.dim:
        raise ValueError(f'{spec.label} acts on {spec.dim}D grids, got '
                         f'{samples.ndim}D samples.')
    _check_power_of_two(samples.shape)
    lengths = (1.0,) * samples.ndim if lengths is None else tuple(lengths)
    symbol = spec.symbol(frequency_grids(samples.shape, lengths))
    out = sp_fft.ifftn(symbol * sp_fft.fftn(samples, workers=workers),
                       workers=workers)
    return out.real if np.isrealobj(samples) else out


def periodization_tail(samples, lengths=None):
    """Size of the wrap-around error: c_n |f|_1 / (L/2)^n."""
    samples = np.asarray(samples)
    lengths = (1.0,) * samples.ndim if lengths is None else tuple(lengths)
    cell = np.prod([L / n for L, n in zip(lengths, samples.shape)])
    half = 0.5 * min(lengths)
    return constants(samples.ndim).c * np.abs(samples).sum() * cell / half ** samples.ndim


def graded_offsets(order=6, ratio=0.25, levels=6):
    """Relative nodes and weights on (0, 1), graded toward both ends."""
    return composite_rule(graded_edges(0.0, 1.0, 'both', ratio, levels), order)


class TensorTransform:
    """H s, R_1 or R_2 of s(x_1) 1_[c,d](x_2) for a step profile s.

    The profile lives on uniform cells of width ``h`` starting at ``x0``.
    Evaluation happens at fixed relative offsets inside uniform target
    cells of the same width, so every offset becomes one discrete
    convolution of the profile jumps against a sampled kernel.
    """

    def __init__(self, kind, profile, x0, h, interval=None):
        if kind not in ('hilbert', 'riesz1', 'riesz2'):
            raise ValueError(f'Unknown tensor transform {kind!r}.')
        if kind != 'hilbert' and interval is None:
            raise ValueError('Riesz tensor transforms need the x2 interval.')
        self.kind = kind
        self.x0 = float(x0)
        self.h = float(h)
        self.interval = interval
        self.jumps = _step_jumps(profile)

    def kernel(self, u, y=None):
        if self.kind == 'hilbert':
            return np.log(np.abs(u)) / np.pi
        c2 = constants(2).c
        c, d = self.interval
        if self.kind == 'riesz1':
            return c2 * (asinh_pv(u, y - d) - asinh_pv(u, y - c))
        return c2 * (asinh_pv(y - d, u) - asinh_pv(y - c, u))

    def evaluate(self, first, count, offsets, ys=None):
        """Values at x1 = x0 + (first + i + o) h for i < count.

        Returns an array indexed (offset, cell) for the Hilbert transform and
        (offset, cell, y) for the Riesz transforms.
        """
        n = len(self.jumps) - 1
        m = np.arange(first - n, first + count)
        out = []
        for o in np.atleast_1d(offsets):
            u = (m + o) * self.h
            if self.kind == 'hilbert':
                conv = signal.fftconvolve(self.jumps, self.kernel(u))
            else:
                ys = np.asarray(ys, dtype=float)
                K = self.kernel(u[:, None], ys[None, :])
                conv = signal.fftconvolve(self.jumps[:, None], K, axes=0)
            out.append(conv[n:n + count])
        return np.array(out)


class GridTransform:
    """R_1 or R_2 of a 2D step function on uniform square cells.

    Same scheme as TensorTransform with the corner weights of the step
    function convolved against the closed-form corner kernel.
    """

    def __init__(self, j, values, h):
        if j not in (1, 2):
            raise ValueError('Grid transforms are R_1 or R_2 in the plane.')
        self.j = j
        self.h = float(h)
        padded = np.pad(np.asarray(values, dtype=float), 1)
        self.corners = -np.diff(np.diff(padded, axis=0), axis=1)

    def evaluate(self, first, count, offset):
        """Values at x = ((first + i + offset) h) per axis, i < count."""
        c2 = constants(2).c
        n1, n2 = (size - 1 for size in self.corners.shape)
        u = (np.arange(first[0] - n1, first[0] + count[0]) + offset[0]) * self.h
        s = (np.arange(first[1] - n2, first[1] + count[1]) + offset[1]) * self.h
        if self.j == 1:
            G = asinh_pv(u[:, None], s[None, :])
        else:
            G = asinh_pv(s[None, :], u[:, None])
        conv = signal.fftconvolve(self.corners, c2 * G)
        return conv[n1:n1 + count[0], n2:n2 + count[1]]
