import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import raster_tiles
from vrmulticast import GridConfig, ViewingDirection, direction_center, tiles_for_direction
from vrmulticast.errors import DomainError
from vrmulticast.geometry import Tile, all_directions, tile_mask

# Frozen from raster_tiles at 0.1 degree resolution (36 x 2 reference grid, direction (1, 1)).
REF_D11_ROWS = list(range(1, 11))
REF_D11_COLS = [1, 2, 3, 4, 5, 6, 26, 27, 28, 29, 30]


@pytest.mark.parametrize(
    "grid, d, expected",
    [
        (GridConfig(n_h=36, n_v=2), (1, 1), (5.0, 45.0)),
        (GridConfig(n_h=36, n_v=2), (2, 36), (355.0, 135.0)),
        (GridConfig(n_h=8, n_v=4), (3, 5), (202.5, 112.5)),
    ],
)
def test_direction_center(grid, d, expected):
    assert direction_center(grid, ViewingDirection(*d)) == expected


@pytest.mark.parametrize("d", [(0, 1), (3, 1), (1, 37), (1, 0)])
def test_direction_out_of_range(grid, d):
    with pytest.raises(DomainError):
        direction_center(grid, d)


@pytest.mark.parametrize(
    "kwargs",
    [dict(n_h=0), dict(fov_h=0), dict(fov_h=361), dict(fov_v=181), dict(margin=-1)],
)
def test_grid_validation(kwargs):
    with pytest.raises(DomainError):
        GridConfig(**kwargs)


@pytest.mark.parametrize("v_h, v_v", [(1, 1), (7, 3), (30, 15)])
def test_full_sphere_fov_returns_every_tile(v_h, v_v):
    g = GridConfig(n_h=5, n_v=3, v_h=v_h, v_v=v_v, fov_h=360, fov_v=180, margin=0)
    for d in all_directions(g):
        assert len(tiles_for_direction(g, d)) == v_h * v_v


def test_reference_direction_11_matches_raster(grid):
    got = tiles_for_direction(grid, (1, 1))
    assert set(got) == raster_tiles(grid, 5.0, 45.0)
    assert got == tuple(Tile(r, c) for r in REF_D11_ROWS for c in REF_D11_COLS)


def test_boundary_touching_tiles_are_excluded():
    # 4 x 2 tiles of 90 degrees; FoV 90 x 90 centered at (45, 45) covers tile (1, 1) exactly
    g = GridConfig(n_h=4, n_v=2, v_h=4, v_v=2, fov_h=90, fov_v=90, margin=0)
    assert tiles_for_direction(g, (1, 1)) == (Tile(1, 1),)


def test_wraparound_and_pole_clipping():
    g = GridConfig(n_h=4, n_v=2, v_h=4, v_v=2, fov_h=100, fov_v=100, margin=0)
    # center (45, 45): yaw span [-5, 95] wraps into the last column, pitch clips at 0
    assert tiles_for_direction(g, (1, 1)) == (
        Tile(1, 1), Tile(1, 2), Tile(1, 4), Tile(2, 1), Tile(2, 2), Tile(2, 4)
    )


def test_small_grid_all_directions_match_raster(small_grid):
    for d in all_directions(small_grid):
        yaw, pitch = direction_center(small_grid, d)
        assert set(tiles_for_direction(small_grid, d)) == raster_tiles(small_grid, yaw, pitch)


def test_output_sorted_and_mask_consistent(grid):
    for d in all_directions(grid)[:10]:
        tiles = tiles_for_direction(grid, d)
        assert list(tiles) == sorted(set(tiles))
        assert tile_mask(grid, d).bit_count() == len(tiles)


directions = st.tuples(st.integers(1, 2), st.integers(1, 36))


@given(directions, st.integers(0, 5))
def test_shift_equivariance(d, k):
    # shifting by 6 directions (60 degrees) is exactly 5 tile columns on the 36 x 2 reference grid
    g = GridConfig()
    base = tiles_for_direction(g, d)
    shifted = tiles_for_direction(g, (d[0], (d[1] - 1 + 6 * k) % 36 + 1))
    moved = {Tile(t.row, (t.col - 1 + 5 * k) % 30 + 1) for t in base}
    assert set(shifted) == moved


@given(directions, st.floats(0, 40), st.floats(0, 40))
def test_margin_monotone(d, m1, m2):
    lo, hi = sorted((m1, m2))
    a = set(tiles_for_direction(GridConfig(margin=lo), d))
    b = set(tiles_for_direction(GridConfig(margin=hi), d))
    assert a <= b


@given(directions, st.floats(10, 350), st.floats(10, 170))
def test_unexpanded_fov_is_covered(d, fov_h, fov_v):
    g = GridConfig(fov_h=fov_h, fov_v=fov_v, margin=0)
    tiles = set(tiles_for_direction(g, d))
    yaw, pitch = direction_center(g, d)
    # sample points inside the FoV and check each lies in a returned tile
    for fx in (-0.499, -0.25, 0.0, 0.25, 0.499):
        for fy in (-0.499, 0.0, 0.499):
            x = (yaw + fx * fov_h) % 360
            y = pitch + fy * fov_v
            if not 0 <= y < 180:
                continue
            tile = Tile(int(y // (180 / g.v_v)) + 1, int(x // (360 / g.v_h)) + 1)
            assert tile in tiles


def test_deterministic(grid):
    assert tiles_for_direction(grid, (2, 17)) == tiles_for_direction(grid, (2, 17))
