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

"""Exact combinatorics of dyadic grids.

Cubes carry integer indices relative to a root box whose corners are exact
fractions, so adjacency, supervisor and transition computations never touch
floating point. Child positions are encoded as bit vectors: bit j of a
location code is set when the child occupies the upper half of axis j.
"""

from collections import namedtuple
from fractions import Fraction
from itertools import product
import numpy as np

LOCATION_LABELS = {
    1: {0: '-', 1: '+'},
    2: {0: 'SW', 1: 'SE', 2: 'NW', 3: 'NE'},
}


def exact(value):
    """Exact rational for ``value``; decimal literals keep their decimal value."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(float(value)))
    return Fraction(value)


def is_dyadic(value):
    den = Fraction(value).denominator
    return den & (den - 1) == 0


class Box(namedtuple('Box', ['lower', 'upper'])):
    """Half-open axis-parallel box prod_j [lower_j, upper_j)."""

    __slots__ = ()

    def __new__(cls, lower, upper):
        lower = tuple(exact(v) for v in lower)
        upper = tuple(exact(v) for v in upper)
        if len(lower) != len(upper) or not lower:
            raise ValueError('Box corners must have the same positive dimension.')
        if any(lo >= hi for lo, hi in zip(lower, upper)):
            raise ValueError(f'Empty box: {lower} .. {upper}')
        return super().__new__(cls, lower, upper)

    @classmethod
    def cube(cls, corner, side):
        side = exact(side)
        return cls(corner, tuple(exact(c) + side for c in corner))

    @property
    def dim(self):
        return len(self.lower)

    @property
    def lengths(self):
        return tuple(hi - lo for lo, hi in zip(self.lower, self.upper))

    @property
    def volume(self):
        vol = Fraction(1)
        for length in self.lengths:
            vol *= length
        return vol

    @property
    def center(self):
        return tuple((lo + hi) / 2 for lo, hi in zip(self.lower, self.upper))

    def is_cube(self):
        return len(set(self.lengths)) == 1

    def contains(self, other):
        return all(lo <= olo and ohi <= hi for lo, hi, olo, ohi in
                   zip(self.lower, self.upper, other.lower, other.upper))

    def intersect(self, other):
        lower = tuple(max(a, b) for a, b in zip(self.lower, other.lower))
        upper = tuple(min(a, b) for a, b in zip(self.upper, other.upper))
        if any(lo >= hi for lo, hi in zip(lower, upper)):
            return None
        return Box(lower, upper)

    def closures_intersect(self, other):
        return all(lo <= ohi and olo <= hi for lo, hi, olo, ohi in
                   zip(self.lower, self.upper, other.lower, other.upper))

    def as_float(self):
        return (np.array([float(v) for v in self.lower]),
                np.array([float(v) for v in self.upper]))


class Cube(namedtuple('Cube', ['dim', 'level', 'index', 'root'])):
    """Dyadic subcube of a root box, identified by level and integer index."""

    __slots__ = ()

    def __new__(cls, dim, level=0, index=None, root=None):
        if dim < 1:
            raise ValueError('Cube dimension must be positive.')
        if level < 0:
            raise ValueError('Cube level must be nonnegative.')
        index = (0,) * dim if index is None else tuple(int(i) for i in index)
        if root is None:
            root = Box.cube((0,) * dim, 1)
        if len(index) != dim or root.dim != dim:
            raise ValueError('Index and root must match the cube dimension.')
        if any(not 0 <= i < (1 << level) for i in index):
            raise ValueError(f'Index {index} out of range for level {level}.')
        if not root.is_cube():
            raise ValueError('The root box must be a cube.')
        if not all(is_dyadic(v) for v in root.lower + root.upper):
            raise ValueError('Root corners must be dyadic rationals.')
        return super().__new__(cls, dim, int(level), index, root)

    @classmethod
    def unit(cls, dim, level=0, index=None):
        return cls(dim, level, index)

    @classmethod
    def parse(cls, text):
        fields = dict(tok.split(':', 1) for tok in text.split())
        dim = int(fields['d'])
        level = int(fields['l'])
        index = tuple(int(v) for v in fields['i'].split(','))
        corner, side = fields['root'].split(';')
        corner = tuple(Fraction(v) for v in corner.split(','))
        return cls(dim, level, index, Box.cube(corner, Fraction(side)))

    def __str__(self):
        corner = ','.join(str(v) for v in self.root.lower)
        return (f'd:{self.dim} l:{self.level} '
                f'i:{",".join(map(str, self.index))} '
                f'root:{corner};{self.root.lengths[0]}')

    serialize = __str__

    @property
    def side(self):
        return self.root.lengths[0] / (1 << self.level)

    @property
    def volume(self):
        return self.side ** self.dim

    @property
    def corner(self):
        side = self.side
        return tuple(lo + i * side for lo, i in zip(self.root.lower, self.index))

    def box(self):
        return Box.cube(self.corner, self.side)

    def location(self):
        """Location code of this cube within its dyadic parent."""
        return sum((i & 1) << j for j, i in enumerate(self.index))

    def child(self, code):
        index = tuple((i << 1) | ((code >> j) & 1)
                      for j, i in enumerate(self.index))
        return Cube(self.dim, self.level + 1, index, self.root)

    def children(self):
        return [self.child(code) for code in range(1 << self.dim)]

    def parent(self):
        if self.level == 0:
            raise ValueError('The root cube has no dyadic parent.')
        return self.ancestor(self.level - 1)

    def ancestor(self, level):
        if not 0 <= level <= self.level:
            raise ValueError(f'No ancestor at level {level}.')
        shift = self.level - level
        return Cube(self.dim, level, tuple(i >> shift for i in self.index),
                    self.root)

    def is_descendant_of(self, other):
        if self.root != other.root or self.level < other.level:
            return False
        return self.ancestor(other.level).index == other.index

    def relative_index(self, ancestor):
        shift = self.level - ancestor.level
        return tuple(i - (a << shift)
                     for i, a in zip(self.index, ancestor.index))

    def as_root(self):
        """The geometric box of this cube, usable as a level-0 root."""
        return Cube(self.dim, 0, None, self.box())


class LocationVector(tuple):

    def labels(self, dim):
        names = LOCATION_LABELS.get(dim)
        if names is None:
            return tuple(format(code, f'0{dim}b')[::-1] for code in self)
        return tuple(names[code] for code in self)


class JumpSchedule:
    """Increasing jump sequence k_1, ..., k_m of the supervisor grid."""

    def __init__(self, jumps):
        self.jumps = tuple(int(k) for k in jumps)
        if any(k < 1 for k in self.jumps):
            raise ValueError(f'Jumps must be positive integers: {self.jumps}')

    def __len__(self):
        return len(self.jumps)

    def __iter__(self):
        return iter(self.jumps)

    def __eq__(self, other):
        return isinstance(other, JumpSchedule) and self.jumps == other.jumps

    def __hash__(self):
        return hash(self.jumps)

    def __repr__(self):
        return f'JumpSchedule({list(self.jumps)})'

    def cumulative(self, t):
        if not 0 <= t <= len(self.jumps):
            raise ValueError(f'Stage {t} outside 0..{len(self.jumps)}.')
        return sum(self.jumps[:t])

    def levels(self):
        return [self.cumulative(t) for t in range(len(self.jumps) + 1)]

    def extended(self, k):
        return JumpSchedule(self.jumps + (k,))


def grandchildren(cube, k):
    if k < 0:
        raise ValueError('Relative depth must be nonnegative.')
    base = [i << k for i in cube.index]
    return [Cube(cube.dim, cube.level + k,
                 tuple(b + o for b, o in zip(base, offsets)), cube.root)
            for offsets in product(range(1 << k), repeat=cube.dim)]


def adjacent(cube1, cube2):
    # Equal side and touching closures; a cube is not adjacent to itself.
    if cube1.dim != cube2.dim or cube1.side != cube2.side:
        return False
    box1, box2 = cube1.box(), cube2.box()
    if box1 == box2:
        return False
    return box1.closures_intersect(box2)


def location_vector(cube, ancestor):
    if not cube.is_descendant_of(ancestor):
        raise ValueError(f'{cube} is not a descendant of {ancestor}.')
    codes = []
    for shift in range(cube.level - ancestor.level - 1, -1, -1):
        codes.append(sum(((i >> shift) & 1) << j
                         for j, i in enumerate(cube.index)))
    return LocationVector(codes)


def jump_grid_level(root, schedule, t):
    return grandchildren(root, schedule.cumulative(t))


def jump_stage(cube, root, schedule):
    """Stage t with cube in K_t, or ValueError when cube is off the jump grid."""
    if not cube.is_descendant_of(root):
        raise ValueError(f'{cube} does not lie under the root {root}.')
    relative = cube.level - root.level
    levels = schedule.levels()
    if relative not in levels:
        raise ValueError(f'{cube} is not in the jump grid of {schedule}.')
    return levels.index(relative)


def jump_parent(cube, root, schedule):
    t = jump_stage(cube, root, schedule)
    if t == 0:
        raise ValueError('The root has no jump-grid parent.')
    return cube.ancestor(root.level + schedule.cumulative(t - 1))


def supervisor_index_table(schedule, t):
    """Per-axis supervisor index s(i) for every index i of K_t."""
    levels = schedule.levels()
    top = levels[t]
    idx = np.arange(1 << top, dtype=np.int64)
    table = np.zeros_like(idx)
    for ell in range(1, t + 1):
        theta = (idx >> (top - levels[ell])) & 1
        table |= theta << (t - ell)
    return table


def supervisor(cube, root, schedule):
    t = jump_stage(cube, root, schedule)
    levels = schedule.levels()
    top = levels[t]
    index = []
    for i, r in zip(cube.relative_index(root), root.index):
        s = 0
        for ell in range(1, t + 1):
            s |= ((i >> (top - levels[ell])) & 1) << (t - ell)
        index.append((r << t) + s)
    return Cube(root.dim, root.level + t, tuple(index), root.root)


def repeat_cells(array, factor):
    for axis in range(array.ndim):
        array = np.repeat(array, factor, axis=axis)
    return array


def induced_grid_masks(dim, schedule, t):
    """Masks (transition, induced) over the cells of K_t.

    A cell R of K_s is a transition cell when its K-parent is in the induced
    grid and its dyadic parent touches the boundary of that K-parent. The
    induced grid keeps the remaining children of induced cells.
    """
    if t < 1:
        raise ValueError('The root has no transition cubes (t must be >= 1).')
    levels = schedule.levels()
    induced = np.ones((1,) * dim, dtype=bool)
    transition = None
    for s in range(1, t + 1):
        k = schedule.jumps[s - 1]
        n = 1 << levels[s]
        edge = (1 << (k - 1)) - 1
        rel = (np.arange(n) >> 1) & edge
        touch = (rel == 0) | (rel == edge)
        touching = np.zeros((n,) * dim, dtype=bool)
        for axis in range(dim):
            shape = [1] * dim
            shape[axis] = n
            touching = touching | touch.reshape(shape)
        parent = repeat_cells(induced, 1 << k)
        transition = parent & touching
        induced = parent & ~touching
    return transition, induced


TransitionGrid = namedtuple('TransitionGrid', ['transition', 'induced'])


def transition_cubes(root, schedule, t):
    transition, induced = induced_grid_masks(root.dim, schedule, t)
    level = root.level + schedule.cumulative(t)
    shift = schedule.cumulative(t)

    def to_cubes(mask):
        return [Cube(root.dim, level,
                     tuple((r << shift) + int(i) for r, i in zip(root.index, idx)),
                     root.root)
                for idx in np.argwhere(mask)]

    return TransitionGrid(to_cubes(transition), to_cubes(induced))


class Halo:
    """Disjoint union of boxes with exact corners."""

    def __init__(self, boxes, container):
        self.boxes = boxes
        self.container = container

    def __iter__(self):
        return iter(self.boxes)

    def __len__(self):
        return len(self.boxes)

    def measure(self):
        return sum((box.volume for box in self.boxes), Fraction(0))


def _as_box(region):
    return region.box() if isinstance(region, Cube) else region


def halo(P, delta, Q=None):
    """Points of Q within delta * side(P) of the boundary of P in some axis.

    Without Q the halo is taken inside P itself.
    """
    delta = exact(delta)
    if not 0 < delta < Fraction(1, 2):
        raise ValueError(f'delta must lie in (0, 1/2), got {delta}.')
    pbox = _as_box(P)
    qbox = pbox if Q is None else _as_box(Q)
    if not pbox.is_cube():
        raise ValueError('P must be a cube.')
    if not qbox.contains(pbox):
        raise ValueError('P must lie inside Q.')

    width = delta * pbox.lengths[0]
    axis_pieces = []
    for a, b, lo, hi in zip(pbox.lower, pbox.upper, qbox.lower, qbox.upper):
        cuts = {lo, hi}
        cuts.update(c for c in (a - width, a + width, b - width, b + width)
                    if lo < c < hi)
        cuts = sorted(cuts)
        pieces = []
        for c0, c1 in zip(cuts, cuts[1:]):
            mid = (c0 + c1) / 2
            pieces.append((c0, c1, abs(mid - a) < width or abs(mid - b) < width))
        axis_pieces.append(pieces)

    boxes = []
    for combo in product(*axis_pieces):
        if any(near for _, _, near in combo):
            boxes.append(Box([c0 for c0, _, _ in combo],
                             [c1 for _, c1, _ in combo]))
    return Halo(boxes, qbox)
