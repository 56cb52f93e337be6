from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import membership_groups
from vrmulticast import ViewState, build_partition, tiles_for_direction, total_tiles
from vrmulticast.geometry import GridConfig


def test_single_user(grid):
    p = build_partition(grid, [(1, 4)])
    assert len(p) == 1
    assert p.groups[0].receivers == (0,)
    assert p.groups[0].tiles == tiles_for_direction(grid, (1, 4))
    assert total_tiles(p) == len(tiles_for_direction(grid, (1, 4)))


def test_identical_users(grid):
    p = build_partition(grid, [(2, 9), (2, 9)])
    assert len(p) == 1
    assert p.groups[0].receivers == (0, 1)
    assert total_tiles(p) == len(tiles_for_direction(grid, (2, 9)))


def test_partial_overlap_matches_membership_scan(grid):
    x = [(1, 1), (1, 4)]
    p = build_partition(grid, x)
    expected = membership_groups([tiles_for_direction(grid, d) for d in x])
    assert {frozenset(g.receivers): g.n_tiles for g in p} == expected
    assert [g.receivers for g in p] == [(0,), (1,), (0, 1)]


def test_disjoint_users(grid):
    x = [(1, 1), (1, 19)]  # opposite yaw, 180 degrees apart
    p = build_partition(grid, x)
    assert total_tiles(p) == sum(len(tiles_for_direction(grid, d)) for d in x)


def test_canonical_order_by_receiver_mask(grid):
    p = build_partition(grid, [(1, 1), (1, 3), (2, 20)])
    masks = [sum(1 << k for k in g.receivers) for g in p]
    assert masks == sorted(masks)


state = st.lists(st.tuples(st.integers(1, 2), st.integers(1, 36)), min_size=1, max_size=5)


@given(state)
def test_partition_properties(x):
    grid = GridConfig()
    p = build_partition(grid, x)
    sets = [set(tiles_for_direction(grid, d)) for d in x]
    seen = set()
    for g in p:
        assert g.tiles and g.receivers
        assert seen.isdisjoint(g.tiles)
        seen.update(g.tiles)
        for t in g.tiles:
            assert {k for k, s in enumerate(sets) if t in s} == set(g.receivers)
    assert seen == set().union(*sets)
    assert len({g.receivers for g in p}) == len(p)
    assert {frozenset(g.receivers): g.n_tiles for g in p} == membership_groups(sets)


@given(state, st.randoms(use_true_random=False))
def test_user_permutation_invariance(x, rnd):
    grid = GridConfig()
    perm = list(range(len(x)))
    rnd.shuffle(perm)
    p = build_partition(grid, x)
    q = build_partition(grid, [x[i] for i in perm])
    relabel = lambda recv: tuple(sorted(perm[k] for k in recv))  # noqa: E731
    assert sorted((g.n_tiles, g.receivers) for g in p) == sorted(
        (g.n_tiles, relabel(g.receivers)) for g in q
    )


@given(state)
def test_total_tiles_bounded_by_sum(x):
    grid = GridConfig()
    sets = [set(tiles_for_direction(grid, d)) for d in x]
    total = total_tiles(build_partition(grid, x))
    assert total <= sum(map(len, sets))
    disjoint = all(a.isdisjoint(b) for a, b in combinations(sets, 2))
    assert (total == sum(map(len, sets))) == disjoint


def test_view_state_needs_a_user():
    with pytest.raises(ValueError):
        ViewState(())
