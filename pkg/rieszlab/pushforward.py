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
import json
import numpy as np

from .dyadic import Box, Cube
from .measure import Measure
from .quadrature import gauss_legendre
from .stepweight import StepWeight
from .log import log

StabilityCheck = namedtuple('StabilityCheck', ['before', 'after', 'bound', 'constant'])
HomeoCheck = namedtuple('HomeoCheck', ['sup_ratio', 'bounded', 'slope', 'table'])
TransferCheck = namedtuple('TransferCheck', ['before', 'after', 'bound'])
CantorDemo = namedtuple('CantorDemo', [
    'depth', 'placement', 'perturbed', 'bilipschitz', 'sigma_pushed', 'omega_fixed',
    'testing', 'testing_dual', 'testing_perturbed', 'testing_dual_perturbed'])

MASS_RULES = ('geometric', 'length', 'uniform')


class PLMap1D:
    """Continuous strictly increasing piecewise-linear map of the line.

    The map is given by knots (x_i, y_i); beyond the outer knots it continues
    with the outer slopes. Pieces with slope one and no shift return their
    arguments unchanged, so identity regions are mapped exactly.
    """

    def __init__(self, xs, ys):
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if xs.ndim != 1 or xs.shape != ys.shape or len(xs) < 2:
            raise ValueError('A PL map needs at least two matching knots.')
        if (np.diff(xs) <= 0).any() or (np.diff(ys) <= 0).any():
            raise ValueError('A PL map must be strictly increasing.')
        self.xs, self.ys = xs, ys
        self.slopes = np.diff(ys) / np.diff(xs)
        self._identity = (self.slopes == 1.0) & (ys[:-1] == xs[:-1])

    @classmethod
    def from_slopes(cls, breakpoints, slopes, shift=0.0):
        """Phi(x) = shift + int_{b_0}^x slope, one slope per piece between breakpoints."""
        breakpoints = np.asarray(breakpoints, dtype=float)
        slopes = np.asarray(slopes, dtype=float)
        if len(slopes) != len(breakpoints) - 1:
            raise ValueError('Need one slope per piece between breakpoints.')
        if (slopes <= 0).any():
            raise ValueError('Slopes must be positive.')
        ys = shift + np.concatenate([[0.0], np.cumsum(slopes * np.diff(breakpoints))])
        return cls(breakpoints, ys)

    @classmethod
    def affine(cls, slope, shift=0.0):
        return cls([0.0, 1.0], [shift, shift + slope])

    @classmethod
    def identity(cls):
        return cls([0.0, 1.0], [0.0, 1.0])

    def __repr__(self):
        return f'PLMap1D(knots={len(self.xs)}, bilip={self.bilipschitz_norm():.6g})'

    @property
    def dim(self):
        return 1

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        piece = np.clip(np.searchsorted(self.xs, x, side='right') - 1,
                        0, len(self.slopes) - 1)
        y = self.ys[piece] + self.slopes[piece] * (x - self.xs[piece])
        return np.where(self._identity[piece], x, y)

    def inverse(self):
        return PLMap1D(self.ys, self.xs)

    def bilipschitz_norm(self):
        return float(self.slopes.max() + (1.0 / self.slopes).max())

    def compose(self, inner):
        """Materialized self o inner as one PL map."""
        xs = np.union1d(inner.xs, inner.inverse()(self.xs))
        return PLMap1D(xs, self(inner(xs)))

    def to_dict(self):
        return {'kind': 'pl', 'breakpoints': self.xs.tolist(),
                'slopes': self.slopes.tolist(), 'shift': float(self.ys[0])}


class ComposedMap:
    """Pointwise composition outer(inner(x)) of two maps."""

    def __init__(self, outer, inner):
        self.outer, self.inner = outer, inner

    @property
    def dim(self):
        return self.inner.dim

    def __call__(self, x):
        return self.outer(self.inner(x))

    def inverse(self):
        return ComposedMap(self.inner.inverse(), self.outer.inverse())

    def bilipschitz_norm(self):
        if isinstance(self.outer, PLMap1D) and isinstance(self.inner, PLMap1D):
            return self.outer.compose(self.inner).bilipschitz_norm()
        return self.outer.bilipschitz_norm() * self.inner.bilipschitz_norm()


class RotationMap:

    def __init__(self, matrix, quarter_turns=None):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError('A rotation needs a square matrix.')
        if not np.allclose(matrix @ matrix.T, np.eye(len(matrix)), atol=1e-12):
            raise ValueError('Rotation matrix is not orthogonal.')
        if abs(np.linalg.det(matrix) - 1.0) > 1e-12:
            raise ValueError('Rotation matrix must have determinant 1.')
        self.matrix = matrix
        self.quarter_turns = quarter_turns

    @classmethod
    def quarter_turn(cls, k=1, dim=2):
        """k quarter turns x -> (-x2, x1) in the first coordinate plane."""
        k %= 4
        matrix = np.eye(dim)
        turn = np.rint(np.linalg.matrix_power(np.array([[0.0, -1.0], [1.0, 0.0]]), k))
        matrix[:2, :2] = turn
        return cls(matrix, quarter_turns=k)

    @classmethod
    def planar(cls, theta):
        c, s = np.cos(theta), np.sin(theta)
        return cls([[c, -s], [s, c]])

    @property
    def dim(self):
        return len(self.matrix)

    def __call__(self, x):
        return np.asarray(x, dtype=float) @ self.matrix.T

    def inverse(self):
        k = None if self.quarter_turns is None else (-self.quarter_turns) % 4
        return RotationMap(self.matrix.T, quarter_turns=k)

    def bilipschitz_norm(self):
        return 2.0

    def to_dict(self):
        return {'kind': 'rotation', 'matrix': self.matrix.tolist()}


class PowerMap:
    """x -> sign(x)|x|^p, a homeomorphism of the line that is not biLipschitz."""

    def __init__(self, p):
        if p <= 0:
            raise ValueError('The power must be positive.')
        self.p = float(p)

    @property
    def dim(self):
        return 1

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.sign(x) * np.abs(x) ** self.p

    def inverse(self):
        return PowerMap(1.0 / self.p)

    def bilipschitz_norm(self):
        return float('inf')


def map_from_dict(data):
    kind = data.get('kind')
    if kind == 'pl':
        return PLMap1D.from_slopes(data['breakpoints'], data['slopes'], data.get('shift', 0.0))
    if kind == 'rotation':
        return RotationMap(data['matrix'])
    if kind == 'power':
        return PowerMap(data['p'])
    raise ValueError(f'Unknown map kind {kind!r}.')


def load_map(path):
    with open(path) as f:
        return map_from_dict(json.load(f))


def _push_intervals(intervals, phi):
    """Interval density under an increasing PL map, split at the map's knots."""
    pieces = []
    for lo, hi, dens in intervals:
        cuts = phi.xs[(phi.xs > lo) & (phi.xs < hi)]
        edges = np.concatenate([[lo], cuts, [hi]])
        images = phi(edges)
        slopes = np.diff(images) / np.diff(edges)
        for a, b, s in zip(images[:-1], images[1:], slopes):
            pieces.append((a, b, dens if s == 1.0 else dens / s))
    return pieces


def pushforward(mu, phi):
    """The measure B -> mu(phi^-1(B))."""
    if isinstance(phi, ComposedMap):
        return pushforward(pushforward(mu, phi.inner), phi.outer)
    if phi.dim != mu.dim:
        raise ValueError(f'A {phi.dim}D map cannot push a {mu.dim}D measure.')
    if mu.kind == 'atoms':
        points = np.asarray(phi(mu.points), dtype=float).reshape(mu.points.shape)
        return Measure(points=points, masses=mu.masses.copy())
    if isinstance(phi, RotationMap):
        if mu.kind != 'density' or phi.quarter_turns is None:
            raise ValueError('Densities rotate by exact quarter turns only.')
        return Measure(density=_quarter_turn_density(mu.density, phi))
    if isinstance(phi, PLMap1D):
        return Measure(intervals=_push_intervals(mu.as_intervals().intervals, phi))
    raise ValueError(f'Cannot push {mu.kind} measures through {type(phi).__name__}.')


def _quarter_turn_density(weight, phi):
    lower, upper = weight.root.box().as_float()
    corners = phi(np.array([lower, upper]))
    root = Cube(weight.dim, 0, None,
                Box.cube(tuple(corners.min(axis=0)), weight.root.side))
    rotated = weight
    for _ in range(phi.quarter_turns):
        rotated = rotated.rot90()
    return StepWeight(root, rotated.depth, rotated.dense())


def lattice_intervals(lower, upper, depth):
    """All intervals [a, b) with endpoints on the lattice of spacing 2^-depth (upper - lower)."""
    edges = np.linspace(lower, upper, (1 << depth) + 1)
    i, j = np.triu_indices(len(edges), k=1)
    return edges[i], edges[j]


def a2_scan(sigma, omega, lowers, uppers):
    """sup over the family of sigma(P) omega(P) / |P|^2."""
    lowers = np.asarray(lowers, dtype=float)
    uppers = np.asarray(uppers, dtype=float)
    if lowers.size == 0:
        raise ValueError('The scan family is empty.')
    lengths = uppers - lowers
    return float((sigma.masses_of(lowers, uppers) * omega.masses_of(lowers, uppers)
                  / lengths ** 2).max())


def a2_stability_check(sigma, omega, phi, scan, matched=True):
    """A2 over the scan family before, and over its image family after, pushforward.

    ``scan`` is a pair of arrays of interval endpoints. The measured constant
    is after / (L^4n before) with L the biLipschitz norm of ``phi``.
    """
    lowers, uppers = (np.asarray(a, dtype=float) for a in scan)
    if lowers.size == 0:
        raise ValueError('The scan family is empty.')
    sigma = sigma if sigma.kind == 'atoms' else sigma.as_intervals()
    omega = omega if omega.kind == 'atoms' else omega.as_intervals()
    before = a2_scan(sigma, omega, lowers, uppers)
    if matched:
        lowers, uppers = phi(lowers), phi(uppers)
    after = a2_scan(pushforward(sigma, phi), pushforward(omega, phi), lowers, uppers)
    bound = phi.bilipschitz_norm() ** (4 * phi.dim) * before
    return StabilityCheck(before, after, bound, after / bound if bound else 0.0)


def random_pl_map(rng, max_norm=4.0, pieces=6, lower=0.0, upper=1.0):
    """Random PL map of [lower, upper] with biLipschitz norm at most max_norm."""
    if max_norm <= 2:
        raise ValueError('The biLipschitz norm of a map is at least 2.')
    # slopes in [r, 1/r] keep max s + max 1/s <= 2/r
    r = 2.0 / max_norm
    breakpoints = np.sort(rng.uniform(lower, upper, pieces - 1))
    breakpoints = np.concatenate([[lower], breakpoints, [upper]])
    slopes = np.exp(rng.uniform(np.log(r), -np.log(r), pieces))
    return PLMap1D.from_slopes(breakpoints, slopes, shift=lower)


def homeo_condition_check(phi, family=None, sweep=12, threshold=0.1,
                          sigma=None, omega=None):
    """sup |phi^-1(Q)| / |Q| over a family of intervals, with a divergence verdict.

    The default family is the sweep Q = [0, 2^-j), j = 0..sweep; the verdict
    fits the log-log slope of the ratio against 1/|Q| over that sweep. With
    sigma and omega given, the A2 transfer bound C1^2 before is also checked
    over the family.
    """
    inverse = phi.inverse()
    sweep_lo = np.zeros(sweep + 1)
    sweep_hi = 2.0 ** -np.arange(sweep + 1)
    sweep_ratio = (inverse(sweep_hi) - inverse(sweep_lo)) / (sweep_hi - sweep_lo)
    if family is None:
        lowers, uppers, ratios = sweep_lo, sweep_hi, sweep_ratio
    else:
        lowers, uppers = (np.asarray(a, dtype=float) for a in family)
        ratios = (inverse(uppers) - inverse(lowers)) / (uppers - lowers)
    slope = float(np.polyfit(np.log(1.0 / sweep_hi), np.log(sweep_ratio), 1)[0])
    bounded = slope < threshold
    sup_ratio = float(ratios.max())
    if not bounded:
        log.debug(f'Inverse-image ratio grows like |Q|^-{slope:.3f}.')
    table = np.stack([lowers, uppers, ratios], axis=1)
    check = HomeoCheck(sup_ratio, bounded, slope, table)
    if sigma is None or omega is None:
        return check
    pre_lo, pre_hi = inverse(lowers), inverse(uppers)
    products = sigma.masses_of(pre_lo, pre_hi) * omega.masses_of(pre_lo, pre_hi)
    before = float((products / (pre_hi - pre_lo) ** 2).max())
    after = float((products / (uppers - lowers) ** 2).max())
    return check, TransferCheck(before, after, sup_ratio ** 2 * before)


def gap_masses(gaps, rule='geometric'):
    if rule not in MASS_RULES:
        raise ValueError(f'Unknown mass rule {rule!r}; choose from {MASS_RULES}.')
    levels = np.array([g.level for g in gaps], dtype=float)
    if rule == 'geometric':
        return 4.0 ** -levels / 2.0 ** (levels - 1)
    if rule == 'length':
        return 3.0 ** -levels
    return np.full(len(gaps), 1.0 / len(gaps))


def gap_atoms(gaps, placement, rule='geometric'):
    lower = np.array([g.lower for g in gaps])
    upper = np.array([g.upper for g in gaps])
    return Measure(points=lower + placement * (upper - lower),
                   masses=gap_masses(gaps, rule))


def gap_map(gaps, placement, perturbed):
    """PL map fixing every gap endpoint and moving each in-gap placement to the perturbed one."""
    knots_x, knots_y = [], []
    for g in sorted(gaps, key=lambda g: g.lower):
        width = g.upper - g.lower
        knots_x += [g.lower, g.lower + placement * width, g.upper]
        knots_y += [g.lower, g.lower + perturbed * width, g.upper]
    knots_x = [0.0] + knots_x + [1.0]
    knots_y = [0.0] + knots_y + [1.0]
    return PLMap1D(knots_x, knots_y)


def _hilbert_of_atoms(atoms, x):
    out = np.zeros_like(x)
    z = atoms.points[:, 0]
    for start in range(0, len(x), 2048):
        chunk = x[start:start + 2048]
        out[start:start + 2048] = (atoms.masses[None, :]
                                   / (chunk[:, None] - z[None, :])).sum(axis=1)
    return out / np.pi


def _hilbert_of_intervals(mu, x):
    lo, hi, dens = mu.intervals.T
    logs = np.log(np.abs((x[:, None] - lo[None, :]) / (x[:, None] - hi[None, :])))
    return logs @ dens / np.pi


def atom_interval_testing(atoms, mu, order=16):
    """Hilbert testing pair on [0, 1) for atoms against an interval density.

    Returns (int |H(atoms)|^2 dmu / atoms([0,1)), sum m_z H(mu)(z)^2 / mu([0,1))).
    Atoms sit at positive distance from the support of ``mu``.
    """
    nodes, weights = gauss_legendre(order)
    lo, hi, dens = mu.intervals.T
    half = (hi - lo) / 2
    x = ((lo + hi) / 2)[:, None] + half[:, None] * nodes[None, :]
    w = (half * dens)[:, None] * weights[None, :]
    H = _hilbert_of_atoms(atoms, x.ravel())
    testing = float((w.ravel() * H ** 2).sum()) / atoms.mass(0.0, 1.0)
    Hmu = _hilbert_of_intervals(mu, atoms.points[:, 0])
    dual = float(atoms.masses @ Hmu ** 2) / mu.mass(0.0, 1.0)
    return testing, dual


def cantor_instability_demo(depth=8, placement=0.5, perturbed=0.25, band=0.1,
                            rule='geometric', order=16):
    """Cantor measure against gap atoms at two in-gap placements.

    The map between the two atom configurations fixes every gap endpoint, so
    it leaves the Cantor measure untouched; the Hilbert testing values of the
    two pairs are reported at the given finite depth.
    """
    if not 1 <= depth <= 12:
        raise ValueError(f'Cantor depth {depth} outside 1..12.')
    if not 0 < band < 0.5:
        raise ValueError('The separation band must lie in (0, 1/2).')
    for name, c in (('placement', placement), ('perturbed placement', perturbed)):
        if not band < c < 1 - band:
            raise ValueError(f'The {name} {c} violates the separation band '
                             f'({band}, {1 - band}).')
    omega = Measure.cantor(depth)
    sigma = gap_atoms(omega.gaps, placement, rule)
    sigma_perturbed = gap_atoms(omega.gaps, perturbed, rule)
    phi = gap_map(omega.gaps, placement, perturbed)
    sigma_pushed = pushforward(sigma, phi).equals(sigma_perturbed)
    omega_fixed = pushforward(omega, phi).equals(omega)
    testing, dual = atom_interval_testing(sigma, omega, order)
    testing_p, dual_p = atom_interval_testing(sigma_perturbed, omega, order)
    return CantorDemo(depth, placement, perturbed, phi.bilipschitz_norm(),
                      sigma_pushed, omega_fixed, testing, dual, testing_p, dual_p)
