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

"""Positive measures: step densities, finite atoms and interval densities.

Interval measures are 1D densities constant on disjoint intervals that need
not sit on a dyadic grid; they carry pushforwards of step densities and the
depth-truncated middle-thirds Cantor measure.
"""

from collections import namedtuple
from fractions import Fraction
import json
import numpy as np

from .dyadic import Box, Cube
from .stepweight import StepWeight

Gap = namedtuple('Gap', ['level', 'index', 'lower', 'upper'])


class Measure:

    def __init__(self, density=None, points=None, masses=None, intervals=None,
                 gaps=None):
        given = [density is not None, points is not None, intervals is not None]
        if sum(given) != 1:
            raise ValueError('A measure is a density, atoms or intervals.')
        self.density = density
        self.points = None
        self.masses = None
        self.intervals = None
        self.gaps = gaps or []
        if points is not None:
            points = np.atleast_2d(np.asarray(points, dtype=float))
            if points.shape[0] == 1 and np.ndim(masses) == 1 and len(masses) > 1:
                points = points.T
            masses = np.asarray(masses, dtype=float).ravel()
            if len(points) != len(masses):
                raise ValueError('Every atom needs one mass.')
            if (masses <= 0).any():
                raise ValueError('Atom masses must be positive.')
            if len({tuple(p) for p in points}) != len(points):
                raise ValueError('Atoms must be distinct.')
            self.points, self.masses = points, masses
        if intervals is not None:
            intervals = np.asarray(intervals, dtype=float).reshape(-1, 3)
            order = np.argsort(intervals[:, 0], kind='stable')
            intervals = intervals[order]
            if (intervals[:, 1] <= intervals[:, 0]).any():
                raise ValueError('Intervals must have positive length.')
            if (intervals[1:, 0] < intervals[:-1, 1]).any():
                raise ValueError('Intervals must be disjoint.')
            if (intervals[:, 2] < 0).any():
                raise ValueError('Densities must be nonnegative.')
            self.intervals = intervals

    def __repr__(self):
        return f'Measure(kind={self.kind}, mass={self.total_mass():.6g})'

    @classmethod
    def from_density(cls, weight):
        return cls(density=weight)

    @classmethod
    def atoms(cls, points, masses):
        return cls(points=points, masses=masses)

    @classmethod
    def cantor(cls, depth):
        """Unit-mass middle-thirds measure truncated at the given depth."""
        if not 0 <= depth <= 16:
            raise ValueError(f'Cantor depth {depth} outside 0..16.')
        # exact triadic endpoints, so shared endpoints round to the same float
        lows = [Fraction(0)]
        length = Fraction(1)
        gaps = []
        for level in range(1, depth + 1):
            third = length / 3
            gaps += [Gap(level, j, float(lo + third), float(lo + 2 * third))
                     for j, lo in enumerate(lows)]
            lows = [v for lo in lows for v in (lo, lo + 2 * third)]
            length = third
        density = float(1 / (length * len(lows)))
        return cls(intervals=[(float(lo), float(lo + length), density) for lo in lows],
                   gaps=gaps)

    @property
    def kind(self):
        if self.density is not None:
            return 'density'
        return 'atoms' if self.points is not None else 'intervals'

    @property
    def dim(self):
        if self.density is not None:
            return self.density.dim
        return self.points.shape[1] if self.points is not None else 1

    def total_mass(self):
        if self.density is not None:
            return self.density.total_mass()
        if self.points is not None:
            return float(self.masses.sum())
        return float(((self.intervals[:, 1] - self.intervals[:, 0])
                      * self.intervals[:, 2]).sum())

    def mass(self, lower, upper):
        """Mass of the half-open box [lower, upper)."""
        lower = np.atleast_1d(np.asarray(lower, dtype=float))
        upper = np.atleast_1d(np.asarray(upper, dtype=float))
        if self.density is not None:
            return self.density.mass(Box(lower, upper))
        if self.points is not None:
            inside = np.all((self.points >= lower) & (self.points < upper), axis=1)
            return float(self.masses[inside].sum())
        lo, hi, dens = self.intervals.T
        overlap = np.clip(np.minimum(hi, upper[0]) - np.maximum(lo, lower[0]), 0, None)
        return float(overlap @ dens)

    def masses_of(self, lowers, uppers):
        """Vectorized 1D mass of many half-open intervals."""
        lowers = np.asarray(lowers, dtype=float)
        uppers = np.asarray(uppers, dtype=float)
        if self.dim != 1:
            raise ValueError('Interval masses need a 1D measure.')
        if self.points is not None:
            x = self.points[:, 0]
            inside = (x[None, :] >= lowers[:, None]) & (x[None, :] < uppers[:, None])
            return inside.astype(float) @ self.masses
        lo, hi, dens = self.as_intervals().intervals.T
        overlap = np.clip(np.minimum(hi[None, :], uppers[:, None])
                          - np.maximum(lo[None, :], lowers[:, None]), 0, None)
        return overlap @ dens

    def support(self):
        if self.density is not None:
            return self.density.root.box().as_float()
        if self.points is not None:
            return self.points.min(axis=0), self.points.max(axis=0)
        return (self.intervals[:1, 0], self.intervals[-1:, 1])

    def as_intervals(self):
        """1D density or interval measure as an interval measure."""
        if self.intervals is not None:
            return self
        if self.density is None or self.density.dim != 1:
            raise ValueError('Only 1D densities convert to intervals.')
        lower, upper = self.density.root.box().as_float()
        edges = np.linspace(lower[0], upper[0], self.density.cells_per_axis + 1)
        return Measure(intervals=np.stack([edges[:-1], edges[1:],
                                           self.density.dense()], axis=1))

    def rebin(self, root, depth):
        """Step density on D_depth(root) with the exact cell averages."""
        if self.points is not None:
            raise ValueError('Atoms have no density to re-bin.')
        if self.dim != 1:
            if self.density is not None and self.density.root == root:
                return self.density.refine(depth) if depth >= self.density.depth \
                    else StepWeight(root, depth, self.density.averages(depth))
            raise ValueError('Re-binning is implemented for 1D measures.')
        lower, upper = root.box().as_float()
        edges = np.linspace(lower[0], upper[0], (1 << depth) + 1)
        cell = (upper[0] - lower[0]) / (1 << depth)
        return StepWeight(root, depth, self.masses_of(edges[:-1], edges[1:]) / cell)

    def equals(self, other):
        """Exact equality of two atom or interval measures."""
        if self.kind != other.kind:
            return False
        if self.points is not None:
            a = np.lexsort(self.points.T[::-1])
            b = np.lexsort(other.points.T[::-1])
            return (np.array_equal(self.points[a], other.points[b])
                    and np.array_equal(self.masses[a], other.masses[b]))
        if self.intervals is not None:
            return np.array_equal(self.intervals, other.intervals)
        return (self.density.root == other.density.root
                and np.array_equal(self.density.dense(), other.density.dense()))

    def to_dict(self):
        if self.points is not None:
            return {'kind': 'atoms', 'points': self.points.tolist(),
                    'masses': self.masses.tolist()}
        if self.intervals is not None:
            return {'kind': 'intervals', 'intervals': self.intervals.tolist()}
        raise ValueError('Densities serialize in the StepWeight CSV format.')

    def to_json(self, path):
        with open(path, 'w') as f:
            json.dump(self.to_dict(), f, indent=2)

    @classmethod
    def from_dict(cls, data):
        if data['kind'] == 'atoms':
            return cls(points=data['points'], masses=data['masses'])
        if data['kind'] == 'intervals':
            return cls(intervals=data['intervals'])
        raise ValueError(f'Unknown measure kind {data["kind"]!r}.')

    @classmethod
    def from_json(cls, path):
        with open(path) as f:
            return cls.from_dict(json.load(f))


def lebesgue(root, depth=0):
    return Measure(density=StepWeight.constant(root, depth, 1.0))


def interval_root(lower, upper):
    """Smallest dyadic 1D root cube with a dyadic corner covering [lower, upper]."""
    side = 2.0 ** np.ceil(np.log2(max(upper - lower, 2.0 ** -30)))
    while True:
        corner = np.floor(lower / side) * side
        if corner + side >= upper:
            return Cube(1, 0, None, Box.cube((corner,), side))
        side *= 2
