"""Reference schemes: optimal unicast and equal-time multicast.

Unicast serves every user its own tile set in a shared frame with the same
optimal time/power rule as the multicast solver, so overlapping tiles are
sent once per viewer. Equal-time multicast keeps the multicast groups but
gives every transmitted tile the same airtime (group time proportional to
its tile count) and only optimizes power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .energy import (
    LN2,
    Allocation,
    ChannelState,
    ScenarioConfig,
    group_min_channel,
    power_from_time,
    solve_counts,
    solve_state,
)
from .errors import DomainError
from .geometry import GridConfig, tile_mask, tiles_for_direction
from .grouping import MulticastGroup, MulticastPartition, ViewState, partition_masks
from .quality import SEARCH_BUDGET, max_total_tiles, optimal_quality
from .special import DEFAULT_TOL, Tolerance

__all__ = [
    "SCHEMES",
    "unicast_partition",
    "unicast_energy",
    "equal_time_counts",
    "equal_time_energy",
    "equal_time_max_rate",
    "baseline_qualities",
    "scheme_energy",
    "SchemeEnergy",
]

SCHEMES = ("proposed", "baseline1", "baseline2")


def unicast_partition(grid: GridConfig, x: ViewState) -> MulticastPartition:
    """One group per user holding that user's full tile set."""
    return MulticastPartition(
        tuple(
            MulticastGroup(tiles_for_direction(grid, d), (k,))
            for k, d in enumerate(x)
        )
    )


def unicast_energy(
    cfg: ScenarioConfig,
    grid: GridConfig,
    x: ViewState,
    h: ChannelState,
    tol: Tolerance = DEFAULT_TOL,
) -> Allocation:
    return solve_state(cfg, unicast_partition(grid, x), h, tol)


def equal_time_counts(cfg: ScenarioConfig, counts, h_mins) -> Allocation:
    total = sum(counts)
    times = np.array([cfg.frame_s * s / total for s in counts])
    powers = np.array(
        [power_from_time(cfg, s, h, t) for s, h, t in zip(counts, h_mins, times)]
    )
    return Allocation(times, powers, math.nan)


def equal_time_energy(
    cfg: ScenarioConfig, part: MulticastPartition, h: ChannelState
) -> Allocation:
    """Multicast with airtime split in proportion to tile counts."""
    return equal_time_counts(cfg, part.tile_counts, group_min_channel(part, h))


def equal_time_max_rate(
    cfg: ScenarioConfig,
    counts: Sequence[int],
    h_mins: Sequence[float],
    e_limit: float,
) -> float:
    """Largest rate whose equal-time energy in this state stays within ``e_limit``.

    With per-tile equal airtime every group runs at ``D * sum(S) / B`` bit/s/Hz,
    so the energy is ``(2^(D sum(S)/B) - 1) * T * n0 * sum(S_i/sum(S) / H_i)``
    and inverts in closed form.
    """
    if not e_limit > 0:
        raise DomainError("energy budget must be positive")
    total = sum(counts)
    weight = sum(s / total / h for s, h in zip(counts, h_mins))
    scale = cfg.frame_s * cfg.noise_w * weight
    return cfg.bandwidth_hz * math.log1p(e_limit / scale) / (LN2 * total)


def baseline_qualities(
    cfg: ScenarioConfig,
    grid: GridConfig,
    users: int,
    e_limit: float,
    channel_values: Sequence[float],
    budget: int = SEARCH_BUDGET,
) -> dict[str, float]:
    """Worst-case-feasible encoding rate of each reference scheme.

    Unicast transmits ``sum_k |Phi_k|`` tiles, maximized by putting every
    user on the direction with the most tiles. Equal-time multicast is
    evaluated at the state with the most distinct tiles and every channel at
    its minimum, which is where its energy peaks.
    """
    h_min = min(channel_values)
    widest = max(
        tile_mask(grid, d).bit_count()
        for d in ((r, c) for r in range(1, grid.n_v + 1) for c in range(1, grid.n_h + 1))
    )
    b1 = optimal_quality(cfg, e_limit, h_min, users * widest)
    worst = max_total_tiles(grid, users, budget).state
    counts = [m.bit_count() for _, m in partition_masks(grid, worst)]
    b2 = equal_time_max_rate(cfg, counts, [h_min] * len(counts), e_limit)
    return {"baseline1": b1, "baseline2": b2}


def _group_channels(recv_masks, powers):
    return [min(powers[k] for k in range(len(powers)) if r >> k & 1) for r in recv_masks]


def scheme_energy(
    scheme: str,
    cfg: ScenarioConfig,
    grid: GridConfig,
    x: ViewState,
    h: ChannelState,
    tol: Tolerance = DEFAULT_TOL,
) -> float:
    """Energy one scheme spends on one state, without building tile lists."""
    if scheme == "baseline1":
        counts = [tile_mask(grid, d).bit_count() for d in x]
        return solve_counts(cfg, counts, h.powers, tol).energy
    groups = partition_masks(grid, x)
    counts = [m.bit_count() for _, m in groups]
    h_mins = _group_channels([r for r, _ in groups], h.powers)
    if scheme == "proposed":
        return solve_counts(cfg, counts, h_mins, tol).energy
    if scheme == "baseline2":
        return equal_time_counts(cfg, counts, h_mins).energy
    raise DomainError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


@dataclass(frozen=True)
class SchemeEnergy:
    """Picklable ``(x, h) -> energy`` callable for the expectation engine."""

    scheme: str
    cfg: ScenarioConfig
    grid: GridConfig
    tol: Tolerance = DEFAULT_TOL

    def __call__(self, x: ViewState, h: ChannelState) -> float:
        return scheme_energy(self.scheme, self.cfg, self.grid, x, h, self.tol)
