"""Viewing directions, FoV rectangles and the tiles each viewer needs.

Angles are in degrees on the equirectangular frame: yaw in [0, 360) wraps,
pitch in [0, 180] is measured from the top edge and never wraps. Interval
arithmetic runs on exact rationals so that FoV edges landing exactly on a
tile boundary are classified consistently (touching is not intersecting).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

from .errors import DomainError

__all__ = [
    "GridConfig",
    "ViewingDirection",
    "Tile",
    "direction_center",
    "tiles_for_direction",
    "tile_mask",
    "tile_index",
    "tiles_from_mask",
    "all_directions",
]


class ViewingDirection(NamedTuple):
    """1-based grid position: ``row`` in 1..n_v (vertical), ``col`` in 1..n_h."""

    row: int
    col: int


class Tile(NamedTuple):
    """1-based tile position: ``row`` in 1..v_v, ``col`` in 1..v_h."""

    row: int
    col: int


@dataclass(frozen=True)
class GridConfig:
    """Viewing-direction grid, tiling grid and FoV size.

    Defaults are the 36 x 2 directions, 30 x 15 tiles, 100 x 100 degree FoV
    with a 15 degree margin on every side.
    """

    n_h: int = 36
    n_v: int = 2
    v_h: int = 30
    v_v: int = 15
    fov_h: float = 100.0
    fov_v: float = 100.0
    margin: float = 15.0

    def __post_init__(self):
        for name in ("n_h", "n_v", "v_h", "v_v"):
            if int(getattr(self, name)) != getattr(self, name) or getattr(self, name) < 1:
                raise DomainError(f"{name} must be a positive integer")
        if not 0 < self.fov_h <= 360:
            raise DomainError("fov_h must lie in (0, 360]")
        if not 0 < self.fov_v <= 180:
            raise DomainError("fov_v must lie in (0, 180]")
        if not self.margin >= 0:
            raise DomainError("margin must be >= 0")

    @property
    def n_directions(self) -> int:
        return self.n_h * self.n_v

    @property
    def n_tiles(self) -> int:
        return self.v_h * self.v_v

    def check(self, d: ViewingDirection) -> None:
        d = ViewingDirection(*d)
        if not (1 <= d.row <= self.n_v and 1 <= d.col <= self.n_h):
            raise DomainError(
                f"direction {tuple(d)} outside the {self.n_v} x {self.n_h} grid"
            )


def all_directions(cfg: GridConfig) -> list[ViewingDirection]:
    """Every direction of the grid, row-major."""
    return [
        ViewingDirection(r, c)
        for r in range(1, cfg.n_v + 1)
        for c in range(1, cfg.n_h + 1)
    ]


def _center(cfg: GridConfig, d: ViewingDirection) -> tuple[Fraction, Fraction]:
    cfg.check(d)
    yaw = (d.col - Fraction(1, 2)) * 360 / cfg.n_h
    pitch = (d.row - Fraction(1, 2)) * 180 / cfg.n_v
    return yaw, pitch


def direction_center(cfg: GridConfig, d: ViewingDirection) -> tuple[float, float]:
    """Cell-center (yaw, pitch) of a viewing direction, in degrees."""
    yaw, pitch = _center(cfg, ViewingDirection(*d))
    return float(yaw), float(pitch)


def tile_index(cfg: GridConfig, tile: Tile) -> int:
    """Row-major 0-based position of a tile, used as its bit in tile masks."""
    return (tile.row - 1) * cfg.v_h + (tile.col - 1)


def tiles_from_mask(cfg: GridConfig, mask: int) -> tuple[Tile, ...]:
    out = []
    while mask:
        low = mask & -mask
        idx = low.bit_length() - 1
        out.append(Tile(idx // cfg.v_h + 1, idx % cfg.v_h + 1))
        mask ^= low
    return tuple(out)


def _overlaps(a0, a1, b0, b1) -> bool:
    return min(a1, b1) - max(a0, b0) > 0


@lru_cache(maxsize=None)
def _columns_rows(cfg: GridConfig, d: ViewingDirection):
    yaw, pitch = _center(cfg, d)
    half_w = (Fraction(cfg.fov_h) + 2 * Fraction(cfg.margin)) / 2
    half_h = (Fraction(cfg.fov_v) + 2 * Fraction(cfg.margin)) / 2
    tile_w = Fraction(360, cfg.v_h)
    tile_h = Fraction(180, cfg.v_v)

    if 2 * half_w >= 360:
        cols = list(range(1, cfg.v_h + 1))
    else:
        left, right = yaw - half_w, yaw + half_w
        cols = [
            c
            for c in range(1, cfg.v_h + 1)
            if any(
                _overlaps((c - 1) * tile_w, c * tile_w, left + k, right + k)
                for k in (-360, 0, 360)
            )
        ]

    if 2 * half_h >= 180:
        # a window as tall as the sphere sees pole to pole wherever it points
        top, bottom = Fraction(0), Fraction(180)
    else:
        top = max(pitch - half_h, Fraction(0))
        bottom = min(pitch + half_h, Fraction(180))
    rows = [
        r
        for r in range(1, cfg.v_v + 1)
        if _overlaps((r - 1) * tile_h, r * tile_h, top, bottom)
    ]
    return tuple(cols), tuple(rows)


def tiles_for_direction(cfg: GridConfig, d: ViewingDirection) -> tuple[Tile, ...]:
    """Tiles whose rectangle meets the margin-expanded FoV with positive area.

    The result is sorted row-major. Horizontal overlap is taken modulo 360,
    the vertical extent is clipped to [0, 180]. An expanded window at least
    360 wide or 180 tall spans every column or every row respectively.
    """
    d = ViewingDirection(*d)
    cols, rows = _columns_rows(cfg, d)
    return tuple(Tile(r, c) for r in rows for c in cols)


@lru_cache(maxsize=None)
def _mask(cfg: GridConfig, d: ViewingDirection) -> int:
    m = 0
    for t in tiles_for_direction(cfg, d):
        m |= 1 << tile_index(cfg, t)
    return m


def tile_mask(cfg: GridConfig, d: ViewingDirection) -> int:
    """Bitmask form of :func:`tiles_for_direction` (bit = row-major tile index)."""
    return _mask(cfg, ViewingDirection(*d))
