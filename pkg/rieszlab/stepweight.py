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

"""Piecewise-constant weights on dyadic grids and their Haar analysis.

Values are stored as an n-dimensional array of shape (2**depth,) * dim with
array axis j running along coordinate x_{j+1}. Haar directions are bit masks
1 .. 2**dim - 1 over the axes; mask 1 is the horizontal direction.
"""

from itertools import product
import numpy as np
import pandas as pd
from .dyadic import Cube, Box, repeat_cells

DIRECTION_NAMES_2D = {1: 'horizontal', 2: 'vertical', 3: 'checkerboard'}
HORIZONTAL = 1


def direction_mask(direction, dim):
    if isinstance(direction, str):
        if direction == 'horizontal':
            return HORIZONTAL
        names = {v: k for k, v in DIRECTION_NAMES_2D.items()}
        if dim != 2 or direction not in names:
            raise ValueError(f'Unsupported direction {direction!r} for dim {dim}.')
        return names[direction]
    mask = int(direction)
    if not 1 <= mask < (1 << dim):
        raise ValueError(f'Unsupported direction {direction!r} for dim {dim}.')
    return mask


def direction_name(mask, dim):
    if dim == 2:
        return DIRECTION_NAMES_2D[mask]
    if mask == HORIZONTAL:
        return 'horizontal'
    return 'axes-' + ''.join(str(j + 1) for j in range(dim) if mask >> j & 1)


def child_signs(mask, dim):
    """sign_A(theta) laid out as an array of shape (2,) * dim."""
    signs = np.ones((2,) * dim)
    for axis in range(dim):
        if mask >> axis & 1:
            shape = [1] * dim
            shape[axis] = 2
            signs = signs * np.array([1.0, -1.0]).reshape(shape)
    return signs


def block_mean(values, factor):
    """Mean over consecutive blocks of ``factor`` cells along every axis."""
    if factor == 1:
        return np.asarray(values, dtype=float)
    shape = []
    for n in values.shape:
        shape.extend([n // factor, factor])
    axes = tuple(range(1, 2 * values.ndim, 2))
    return values.reshape(shape).mean(axis=axes)


def interleave_children(values):
    """Split every axis of an array of shape (2N,)*dim into (N, 2) pairs."""
    shape = []
    for n in values.shape:
        shape.extend([n // 2, 2])
    return values.reshape(shape)


def axis_overlaps(lower, upper, count, lo, hi):
    edges = np.linspace(lower, upper, count + 1)
    return np.clip(np.minimum(edges[1:], hi) - np.maximum(edges[:-1], lo), 0, None)


class StepWeight:

    def __init__(self, root, depth, values):
        self.root = root
        self.depth = int(depth)
        if self.depth < 0:
            raise ValueError('Depth must be nonnegative.')
        shape = (1 << self.depth,) * root.dim
        values = np.asarray(values, dtype=float)
        if values.shape != shape:
            if values.size != int(np.prod(shape)):
                raise ValueError(f'Expected {np.prod(shape)} values for depth '
                                 f'{self.depth} in dimension {root.dim}, '
                                 f'got {values.size}.')
            values = values.reshape(shape)
        self.values = values

    def __repr__(self):
        return (f'{type(self).__name__}(root={self.root}, depth={self.depth}, '
                f'mean={self.mean():.6g})')

    @classmethod
    def constant(cls, root, depth=0, value=1.0):
        return cls(root, depth, np.full((1 << depth,) * root.dim, float(value)))

    @property
    def dim(self):
        return self.root.dim

    @property
    def cells_per_axis(self):
        return 1 << self.depth

    def cell_side(self):
        return float(self.root.side) / self.cells_per_axis

    def cell_volume(self):
        return float(self.root.volume) / self.cells_per_axis ** self.dim

    def dense(self):
        return np.ascontiguousarray(self.values)

    def mean(self):
        return float(self.values.mean())

    def total_mass(self):
        return self.mean() * float(self.root.volume)

    def is_nonnegative(self):
        return bool((self.values >= 0).all())

    def averages(self, level):
        """Averages over the cubes of D_level(root), as an array."""
        if not 0 <= level <= self.depth:
            raise ValueError(f'Level {level} outside 0..{self.depth}.')
        return block_mean(self.values, 1 << (self.depth - level))

    def _locate(self, cube):
        if not cube.is_descendant_of(self.root):
            raise ValueError(f'{cube} is not inside the root {self.root}.')
        return cube.level - self.root.level, cube.relative_index(self.root)

    def average(self, cube):
        rel, index = self._locate(cube)
        if rel >= self.depth:
            shift = rel - self.depth
            return float(self.values[tuple(i >> shift for i in index)])
        size = 1 << (self.depth - rel)
        block = tuple(slice(i * size, (i + 1) * size) for i in index)
        return float(self.values[block].mean())

    def mass(self, region=None):
        """Exact mass of a Box or Cube (total mass without a region)."""
        if region is None:
            return self.total_mass()
        box = region.box() if isinstance(region, Cube) else region
        lower, upper = self.root.box().as_float()
        lo, hi = box.as_float()
        overlaps = [axis_overlaps(lower[j], upper[j], self.cells_per_axis,
                                  lo[j], hi[j]) for j in range(self.dim)]
        return self._contract(overlaps)

    def _contract(self, overlaps):
        acc = self.values
        for weights in reversed(overlaps):
            acc = acc @ weights
        return float(acc)

    def refine(self, depth):
        if depth < self.depth:
            raise ValueError('Refinement cannot reduce depth.')
        return StepWeight(self.root, depth,
                          repeat_cells(self.values, 1 << (depth - self.depth)))

    def restrict(self, cube):
        rel, index = self._locate(cube)
        if rel > self.depth:
            raise ValueError(f'{cube} is finer than the resolution.')
        size = 1 << (self.depth - rel)
        block = tuple(slice(i * size, (i + 1) * size) for i in index)
        return StepWeight(cube, self.depth - rel, np.array(self.values[block]))

    def rot90(self):
        """Quarter turn about the root center, x -> (-x2, x1) in the first plane."""
        if self.dim < 2:
            raise ValueError('Quarter turns need dim >= 2.')
        return StepWeight(self.root, self.depth,
                          np.rot90(self.values, 1, axes=(0, 1)).copy())

    def value_at(self, x):
        lower, upper = self.root.box().as_float()
        x = np.asarray(x, dtype=float)
        if np.any(x < lower) or np.any(x >= upper):
            return 0.0
        idx = np.floor((x - lower) / self.cell_side()).astype(int)
        idx = np.minimum(idx, self.cells_per_axis - 1)
        return float(self.values[tuple(idx)])

    def cell_cube(self, index):
        return Cube(self.dim, self.root.level + self.depth,
                    tuple((r << self.depth) + int(i)
                          for r, i in zip(self.root.index, index)),
                    self.root.root)

    # Haar analysis

    def haar_level(self, level, direction=HORIZONTAL):
        """Coefficients <W, h_Q^A> for all Q in D_level(root)."""
        if not 0 <= level < self.depth:
            raise ValueError(f'Haar level {level} requires depth > {level}.')
        mask = direction_mask(direction, self.dim)
        children = interleave_children(self.averages(level + 1))
        signs = child_signs(mask, self.dim)
        shape = []
        for _ in range(self.dim):
            shape.extend([1, 2])
        weighted = children * signs.reshape(shape)
        summed = weighted.sum(axis=tuple(range(1, 2 * self.dim, 2)))
        volume = float(self.root.volume) / (1 << (self.dim * level))
        return summed * np.sqrt(volume) / (1 << self.dim)

    def haar_coefficient(self, cube, direction=HORIZONTAL):
        rel, index = self._locate(cube)
        if rel >= self.depth:
            raise ValueError(f'{cube} is not coarser than the resolution '
                             f'{self.depth}.')
        mask = direction_mask(direction, self.dim)
        size = 1 << (self.depth - rel - 1)
        total = 0.0
        for theta in range(1 << self.dim):
            sign = -1.0 if bin(theta & mask).count('1') % 2 else 1.0
            block = tuple(slice((2 * i + (theta >> j & 1)) * size,
                                (2 * i + (theta >> j & 1) + 1) * size)
                          for j, i in enumerate(index))
            total += sign * self.values[block].mean()
        return total * np.sqrt(float(cube.volume)) / (1 << self.dim)

    def haar_spectrum(self):
        coefficients = {}
        for level in range(self.depth):
            for mask in range(1, 1 << self.dim):
                coefficients[level, mask] = self.haar_level(level, mask)
        return HaarSpectrum(self.root, self.depth, self.mean(), coefficients)

    # CSV format: '#'-prefixed header lines followed by a value column

    def to_csv(self, path):
        with open(path, 'w') as f:
            print(f'# dim: {self.dim}', file=f)
            print(f'# depth: {self.depth}', file=f)
            print(f'# root: {self.root}', file=f)
            pd.DataFrame({'value': self.dense().ravel()}).to_csv(
                f, index=False, float_format='%.17g')

    @classmethod
    def from_csv(cls, path):
        header = {}
        with open(path) as f:
            for line in f:
                if not line.startswith('#'):
                    break
                key, value = line[1:].split(':', 1)
                header[key.strip()] = value.strip()
        root = Cube.parse(header['root'])
        values = pd.read_csv(path, comment='#')['value'].to_numpy(dtype=float)
        depth = int(header['depth'])
        if int(header['dim']) != root.dim:
            raise ValueError(f'{path}: dimension header does not match root.')
        return cls(root, depth, values)


class TensorizedStepWeight(StepWeight):
    """Step weight depending on a single coordinate.

    Only the one-axis profile is stored; ``values`` is a read-only broadcast
    view, so deep grids cost memory proportional to one axis.
    """

    def __init__(self, root, depth, profile, axis=0):
        self.root = root
        self.depth = int(depth)
        self.axis = int(axis)
        profile = np.asarray(profile, dtype=float).ravel()
        if profile.size != 1 << self.depth:
            raise ValueError(f'Profile must have {1 << self.depth} entries.')
        if not 0 <= self.axis < root.dim:
            raise ValueError(f'Axis {axis} outside 0..{root.dim - 1}.')
        self.profile = profile
        shape = [1] * root.dim
        shape[self.axis] = profile.size
        self.values = np.broadcast_to(profile.reshape(shape),
                                      (profile.size,) * root.dim)

    @classmethod
    def from_1d(cls, weight, root, axis=0):
        if weight.dim != 1:
            raise ValueError('Tensorization needs a one-dimensional profile.')
        return cls(root, weight.depth, weight.values, axis)

    def profile_weight(self):
        """The one-dimensional StepWeight along the tensorized axis."""
        lo = self.root.root.lower[self.axis]
        side = self.root.root.lengths[0]
        root1d = Cube(1, self.root.level, (self.root.index[self.axis],),
                      Box.cube((lo,), side))
        return StepWeight(root1d, self.depth, self.profile)

    def mean(self):
        return float(self.profile.mean())

    def _broadcast(self, profile):
        shape = [1] * self.dim
        shape[self.axis] = profile.size
        return np.broadcast_to(profile.reshape(shape), (profile.size,) * self.dim)

    def averages(self, level):
        if not 0 <= level <= self.depth:
            raise ValueError(f'Level {level} outside 0..{self.depth}.')
        return self._broadcast(block_mean(self.profile, 1 << (self.depth - level)))

    def profile_averages(self, level):
        return block_mean(self.profile, 1 << (self.depth - level))

    def average(self, cube):
        rel, index = self._locate(cube)
        i = index[self.axis]
        if rel >= self.depth:
            return float(self.profile[i >> (rel - self.depth)])
        size = 1 << (self.depth - rel)
        return float(self.profile[i * size:(i + 1) * size].mean())

    def _contract(self, overlaps):
        total = float(self.profile @ overlaps[self.axis])
        for axis, weights in enumerate(overlaps):
            if axis != self.axis:
                total *= float(weights.sum())
        return total

    def refine(self, depth):
        if depth < self.depth:
            raise ValueError('Refinement cannot reduce depth.')
        return TensorizedStepWeight(
            self.root, depth, np.repeat(self.profile, 1 << (depth - self.depth)),
            self.axis)

    def restrict(self, cube):
        rel, index = self._locate(cube)
        if rel > self.depth:
            raise ValueError(f'{cube} is finer than the resolution.')
        size = 1 << (self.depth - rel)
        i = index[self.axis]
        return TensorizedStepWeight(cube, self.depth - rel,
                                    self.profile[i * size:(i + 1) * size].copy(),
                                    self.axis)

    def rot90(self):
        if self.dim != 2:
            return super().rot90()
        if self.axis == 0:
            return TensorizedStepWeight(self.root, self.depth, self.profile.copy(), 1)
        return TensorizedStepWeight(self.root, self.depth, self.profile[::-1].copy(), 0)

    def haar_level(self, level, direction=HORIZONTAL):
        mask = direction_mask(direction, self.dim)
        if not 0 <= level < self.depth:
            raise ValueError(f'Haar level {level} requires depth > {level}.')
        n = 1 << level
        if mask != 1 << self.axis:
            return np.zeros((n,) * self.dim)
        pairs = self.profile_averages(level + 1).reshape(n, 2)
        volume = float(self.root.volume) / (1 << (self.dim * level))
        coef = (pairs[:, 0] - pairs[:, 1]) * np.sqrt(volume) / 2
        shape = [1] * self.dim
        shape[self.axis] = n
        return np.broadcast_to(coef.reshape(shape), (n,) * self.dim)


class HaarSpectrum:
    """Mean plus Haar coefficients keyed by (relative level, direction mask)."""

    def __init__(self, root, depth, mean, coefficients):
        self.root = root
        self.depth = depth
        self.mean = mean
        self.coefficients = coefficients

    def __getitem__(self, key):
        cube, direction = key
        mask = direction_mask(direction, self.root.dim)
        rel = cube.level - self.root.level
        if not cube.is_descendant_of(self.root) or rel >= self.depth:
            raise KeyError(key)
        return float(self.coefficients[rel, mask][cube.relative_index(self.root)])

    def items(self):
        for (level, mask), coef in sorted(self.coefficients.items()):
            for index in product(range(1 << level), repeat=self.root.dim):
                cube = Cube(self.root.dim, self.root.level + level,
                            tuple((r << level) + i
                                  for r, i in zip(self.root.index, index)),
                            self.root.root)
                yield (cube, mask), float(coef[index])

    def energy(self, mask=None):
        return float(sum((coef ** 2).sum()
                         for (_, m), coef in self.coefficients.items()
                         if mask is None or m == mask))

    def reconstruct(self):
        dim = self.root.dim
        values = np.full((1,) * dim, self.mean)
        for level in range(self.depth):
            n = 1 << level
            volume = float(self.root.volume) / (1 << (dim * level))
            values = interleave_children(repeat_cells(values, 2)).copy()
            coef_shape, sign_shape = [], []
            for _ in range(dim):
                coef_shape.extend([n, 1])
                sign_shape.extend([1, 2])
            for mask in range(1, 1 << dim):
                coef = self.coefficients[level, mask]
                values += (np.asarray(coef).reshape(coef_shape)
                           * child_signs(mask, dim).reshape(sign_shape)
                           / np.sqrt(volume))
            values = values.reshape((2 * n,) * dim)
        return values

