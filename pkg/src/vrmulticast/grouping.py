"""Disjoint multicast partition of the requested tiles."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DomainError
from .geometry import GridConfig, Tile, ViewingDirection, tile_mask, tiles_from_mask

__all__ = [
    "ViewState",
    "MulticastGroup",
    "MulticastPartition",
    "build_partition",
    "total_tiles",
]


@dataclass(frozen=True)
class ViewState:
    """Viewing direction of every user; user ``k`` is ``directions[k]``."""

    directions: tuple[ViewingDirection, ...]

    def __post_init__(self):
        dirs = tuple(ViewingDirection(*d) for d in self.directions)
        if not dirs:
            raise DomainError("a view state needs at least one user")
        object.__setattr__(self, "directions", dirs)

    @classmethod
    def of(cls, directions: Iterable[Sequence[int]]) -> "ViewState":
        return cls(tuple(directions))

    def __len__(self):
        return len(self.directions)

    def __iter__(self):
        return iter(self.directions)


@dataclass(frozen=True)
class MulticastGroup:
    """Tiles sent once to ``receivers`` (0-based user indices)."""

    tiles: tuple[Tile, ...]
    receivers: tuple[int, ...]

    @property
    def n_tiles(self) -> int:
        return len(self.tiles)

    @property
    def n_receivers(self) -> int:
        return len(self.receivers)


@dataclass(frozen=True)
class MulticastPartition:
    groups: tuple[MulticastGroup, ...]

    def __len__(self):
        return len(self.groups)

    def __iter__(self):
        return iter(self.groups)

    @property
    def tile_counts(self) -> tuple[int, ...]:
        return tuple(g.n_tiles for g in self.groups)

    @property
    def receiver_sets(self) -> tuple[tuple[int, ...], ...]:
        return tuple(g.receivers for g in self.groups)


def _bits(mask: int) -> tuple[int, ...]:
    return tuple(k for k in range(mask.bit_length()) if mask >> k & 1)


def partition_masks(cfg: GridConfig, x: ViewState) -> list[tuple[int, int]]:
    """Return ``(receiver_mask, tile_mask)`` pairs sorted by receiver mask.

    Starts from one class holding every requested tile and splits each class
    by every user's tile set in turn, so the result is the set of equivalence
    classes of ``tile -> {users requesting it}``.
    """
    for d in x:
        cfg.check(d)
    masks = [tile_mask(cfg, d) for d in x]
    union = 0
    for m in masks:
        union |= m
    classes = {0: union}
    for k, m in enumerate(masks):
        refined = {}
        for recv, tiles in classes.items():
            inside = tiles & m
            outside = tiles & ~m
            if inside:
                refined[recv | 1 << k] = inside
            if outside:
                refined[recv] = outside
        classes = refined
    return sorted(classes.items())


def build_partition(cfg: GridConfig, x: ViewState) -> MulticastPartition:
    """Group tiles by the exact set of users that request them.

    Groups are ordered by receiver bitmask (bit ``k`` = user ``k``), which is
    a total order here because every receiver set occurs at most once.
    """
    if not isinstance(x, ViewState):
        x = ViewState.of(x)
    return MulticastPartition(
        tuple(
            MulticastGroup(tiles_from_mask(cfg, tiles), _bits(recv))
            for recv, tiles in partition_masks(cfg, x)
        )
    )


def total_tiles(p: MulticastPartition) -> int:
    """Number of tile transmissions the partition needs (each tile once)."""
    return sum(g.n_tiles for g in p.groups)
