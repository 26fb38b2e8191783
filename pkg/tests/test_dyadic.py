from collections import Counter
from fractions import Fraction
from itertools import product
import pytest

from rieszlab.dyadic import (Box, Cube, JumpSchedule, adjacent, grandchildren,
                             halo, jump_grid_level, jump_parent, location_vector,
                             supervisor, transition_cubes)


def interval(level, index):
    return Cube(1, level, (index,))


def test_grandchildren():
    """Bisection of the unit interval and the 4^k count in the plane."""
    halves = grandchildren(Cube.unit(1), 1)
    assert [c.box() for c in halves] == [
        Box((0,), (Fraction(1, 2),)), Box((Fraction(1, 2),), (1,))]
    assert len(grandchildren(Cube.unit(2), 2)) == 16
    Q = Cube(2, 1, (1, 0))
    assert grandchildren(Q, 0) == [Q]


def test_adjacency_of_equal_cubes():
    assert adjacent(interval(1, 0), interval(1, 1))
    assert not adjacent(interval(2, 0), interval(2, 2))
    # [1/4, 1/2) and [1/2, 3/4) touch without being siblings
    assert adjacent(interval(2, 1), interval(2, 2))
    assert not adjacent(interval(2, 1), interval(2, 1))
    assert not adjacent(interval(1, 0), interval(2, 2))


def test_location_vector():
    root = Cube.unit(2)
    assert location_vector(Cube(2, 2, (0, 0)), root).labels(2) == ('SW', 'SW')
    assert location_vector(root, root) == ()
    assert location_vector(interval(2, 3), Cube.unit(1)).labels(1) == ('+', '+')
    with pytest.raises(ValueError):
        location_vector(Cube.unit(1), interval(1, 0))


def test_jump_grid_levels():
    root = Cube.unit(2)
    level1 = jump_grid_level(root, JumpSchedule([2]), 1)
    assert len(level1) == 16
    assert all(c.side == Fraction(1, 4) for c in level1)
    assert jump_grid_level(root, JumpSchedule([2]), 0) == [root]
    assert (jump_grid_level(root, JumpSchedule([1, 1]), 2)
            == grandchildren(root, 2))


def test_supervisor():
    """Supervisors follow the last location code of each jump."""
    root = Cube.unit(2)
    assert supervisor(Cube(2, 2, (0, 0)), root, JumpSchedule([2])) \
        == Cube(2, 1, (0, 0))
    Q = Cube(2, 2, (2, 3))
    assert supervisor(Q, root, JumpSchedule([1, 1])) == Q
    with pytest.raises(ValueError):
        supervisor(Cube(2, 1, (0, 0)), root, JumpSchedule([2]))


def test_transition_cubes_1d():
    root = Cube.unit(1)
    grid = transition_cubes(root, JumpSchedule([3]), 1)
    lowers = sorted(c.box().lower[0] for c in grid.transition)
    assert lowers == [0, Fraction(1, 8), Fraction(3, 4), Fraction(7, 8)]
    assert len(grid.induced) == 4

    grid = transition_cubes(root, JumpSchedule([1]), 1)
    assert len(grid.transition) == 2
    assert grid.induced == []


def test_halo_measure():
    """Boundary strip of the unit square and of an interval inside [-1, 2]."""
    assert halo(Cube.unit(2), Fraction(1, 10)).measure() == Fraction(9, 25)
    assert (halo(Cube.unit(2), Fraction(1, 20)).measure()
            < halo(Cube.unit(2), Fraction(1, 10)).measure())

    strip = halo(Cube.unit(1), Fraction(1, 10), Box((-1,), (2,)))
    assert sorted((b.lower[0], b.upper[0]) for b in strip) == [
        (Fraction(-1, 10), Fraction(1, 10)), (Fraction(9, 10), Fraction(11, 10))]
    assert strip.measure() == Fraction(2, 5)


def test_halo_rejects_wide_delta():
    with pytest.raises(ValueError):
        halo(Cube.unit(2), Fraction(1, 2))


def test_jump_schedule():
    schedule = JumpSchedule([2, 3, 3])
    assert schedule.levels() == [0, 2, 5, 8]
    assert schedule.extended(1) == JumpSchedule([2, 3, 3, 1])
    with pytest.raises(ValueError):
        JumpSchedule([2, 0])


def test_cube_text_form():
    Q = Cube(2, 3, (5, 2), Box.cube((Fraction(-1, 2), 0), 2))
    assert Cube.parse(str(Q)) == Q
    with pytest.raises(ValueError):
        Cube(1, 0, None, Box.cube((Fraction(1, 3),), 1))


GRIDS = [(1, [2, 3, 3]), (1, [1, 2, 3]), (2, [2, 3]), (2, [3, 2])]


@pytest.mark.parametrize('dim, jumps', GRIDS)
def test_jump_grid_partitions_the_root(dim, jumps):
    root, schedule = Cube.unit(dim), JumpSchedule(jumps)
    for t in range(len(jumps) + 1):
        cubes = jump_grid_level(root, schedule, t)
        assert len(set(cubes)) == len(cubes) == 1 << (dim * schedule.cumulative(t))
        assert all(root.box().contains(Q.box()) for Q in cubes)
        assert sum(Q.volume for Q in cubes) == root.volume


@pytest.mark.parametrize('dim, jumps', GRIDS)
def test_supervisor_commutes_with_parents(dim, jumps):
    """S(pi_K Q) = pi_D S(Q) on every level of the jump grid."""
    root, schedule = Cube.unit(dim), JumpSchedule(jumps)
    for t in range(1, len(jumps) + 1):
        for Q in jump_grid_level(root, schedule, t):
            assert (supervisor(jump_parent(Q, root, schedule), root, schedule)
                    == supervisor(Q, root, schedule).parent())


@pytest.mark.parametrize('dim, jumps', GRIDS)
def test_supervisor_preimages_are_balanced(dim, jumps):
    root, schedule = Cube.unit(dim), JumpSchedule(jumps)
    for t in range(1, len(jumps) + 1):
        cubes = jump_grid_level(root, schedule, t)
        counts = Counter(supervisor(Q, root, schedule) for Q in cubes)
        assert set(counts) == set(grandchildren(root, t))
        assert set(counts.values()) == {1 << (dim * (schedule.cumulative(t) - t))}
        for S, count in counts.items():
            assert count * cubes[0].volume / S.volume == 1


# jumps of at least 3 leave non-transition cubes on every level
@pytest.mark.parametrize('dim, jumps', [(1, [3, 3]), (1, [4, 3]), (2, [3, 3])])
def test_adjacent_induced_cubes_share_their_jump_parent(dim, jumps):
    root, schedule = Cube.unit(dim), JumpSchedule(jumps)
    for t in range(1, len(jumps) + 1):
        induced = set(transition_cubes(root, schedule, t).induced)
        pairs = 0
        for R in induced:
            for step in product((-1, 0, 1), repeat=dim):
                index = tuple(i + s for i, s in zip(R.index, step))
                if any(not 0 <= i < (1 << R.level) for i in index):
                    continue
                K = Cube(dim, R.level, index, R.root)
                if K in induced and adjacent(R, K):
                    pairs += 1
                    assert (jump_parent(K, root, schedule)
                            == jump_parent(R, root, schedule))
        assert pairs > 0
