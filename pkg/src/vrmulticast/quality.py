"""Maximum per-tile encoding rate under a per-state energy budget."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .energy import Allocation, ChannelState, ScenarioConfig, solve_state
from .errors import DomainError
from .geometry import GridConfig, all_directions, tile_mask
from .grouping import MulticastPartition, ViewState
from .special import DEFAULT_TOL, Tolerance

__all__ = [
    "QualityLevels",
    "QualityResult",
    "MaxTiles",
    "SEARCH_BUDGET",
    "max_total_tiles",
    "optimal_quality",
    "allocations_at_quality",
    "snap_to_level",
    "solve_quality",
]

log = logging.getLogger(__name__)

SEARCH_BUDGET = 2_000_000


@dataclass(frozen=True)
class QualityLevels:
    """Available encoding rates (bit/s), strictly increasing."""

    rates: tuple[float, ...]

    def __post_init__(self):
        rates = tuple(float(r) for r in self.rates)
        if not rates or rates[0] <= 0 or any(b <= a for a, b in zip(rates, rates[1:])):
            raise DomainError("quality levels must be positive and strictly increasing")
        object.__setattr__(self, "rates", rates)


class MaxTiles(NamedTuple):
    """Largest union of requested tiles over all view states.

    ``exact`` is False when the combination count exceeded the search budget
    and ``count`` is only a lower bound found by sampling and greedy search.
    """

    count: int
    state: ViewState
    exact: bool
    evaluated: int


def _unique_directions(cfg: GridConfig):
    seen = {}
    for d in all_directions(cfg):
        seen.setdefault(tile_mask(cfg, d), d)
    # all_directions is row-major, so first occurrences keep lexicographic order
    return [(d, m) for m, d in seen.items()]


def _exhaustive(cfg: GridConfig, users: int, cands):
    n_tiles = cfg.n_tiles
    masks = [m for _, m in cands]
    pops = [m.bit_count() for m in masks]
    widest = max(pops)
    best = [-1, None]
    evaluated = 0

    def dfs(start, depth, union, chosen):
        nonlocal evaluated
        if depth == users:
            evaluated += 1
            c = union.bit_count()
            if c > best[0]:
                best[0], best[1] = c, tuple(chosen)
            return
        remaining = users - depth
        for i in range(start, len(masks)):
            if best[0] == n_tiles:
                return
            new = union | masks[i]
            if min(n_tiles, new.bit_count() + (remaining - 1) * widest) <= best[0]:
                continue
            chosen.append(i)
            dfs(i, depth + 1, new, chosen)
            chosen.pop()

    dfs(0, 0, 0, [])
    return best[0], best[1], evaluated


def _approximate(cfg: GridConfig, users: int, cands, samples: int, seed: int):
    masks = [m for _, m in cands]
    best_count, best_idx = -1, None

    def consider(idx):
        nonlocal best_count, best_idx
        union = 0
        for i in idx:
            union |= masks[i]
        c = union.bit_count()
        key = tuple(sorted(idx))
        if c > best_count or (c == best_count and key < best_idx):
            best_count, best_idx = c, key

    for first in range(len(masks)):
        idx = [first]
        union = masks[first]
        while len(idx) < users:
            gains = [(union | m).bit_count() for m in masks]
            nxt = int(np.argmax(gains))
            idx.append(nxt)
            union |= masks[nxt]
        consider(idx)
    rng = np.random.default_rng(seed)
    for row in rng.integers(0, len(masks), size=(samples, users)):
        consider(row.tolist())
    return best_count, best_idx, len(masks) + samples


def max_total_tiles(
    cfg: GridConfig,
    users: int,
    budget: int = SEARCH_BUDGET,
    samples: int = 100_000,
    seed: int = 0,
) -> MaxTiles:
    """Maximum over view states of the number of distinct tiles requested.

    Searches multisets of directions exhaustively (the union ignores user
    order) with branch-and-bound pruning, when the multiset count fits in
    ``budget``. Ties go to the lexicographically smallest state.
    """
    if users < 1:
        raise DomainError("need at least one user")
    cands = _unique_directions(cfg)
    combos = math.comb(len(cands) + users - 1, users)
    if combos <= budget:
        count, idx, evaluated = _exhaustive(cfg, users, cands)
        exact = True
    else:
        log.warning(
            "%d direction multisets exceed the search budget %d; "
            "max_total_tiles returns a lower bound",
            combos,
            budget,
        )
        count, idx, evaluated = _approximate(cfg, users, cands, samples, seed)
        exact = False
    state = ViewState(tuple(cands[i][0] for i in idx))
    return MaxTiles(count, state, exact, evaluated)


def optimal_quality(
    cfg: ScenarioConfig, e_limit: float, h_min_global: float, max_tiles: int
) -> float:
    """Largest encoding rate whose worst-case minimum energy fits ``e_limit``.

    The binding state is the one with the most tiles at the weakest channel,
    where the energy has the equal-channel closed form; inverting it gives
    the rate. ``cfg.rate_bps`` is ignored.
    """
    if not e_limit > 0:
        raise DomainError("energy budget must be positive")
    if max_tiles < 1:
        raise DomainError("max_tiles must be >= 1")
    snr = e_limit * h_min_global / (cfg.noise_w * cfg.frame_s)
    return cfg.bandwidth_hz * math.log1p(snr) / (math.log(2.0) * max_tiles)


def allocations_at_quality(
    cfg: ScenarioConfig,
    d_star: float,
    part: MulticastPartition,
    h: ChannelState,
    tol: Tolerance = DEFAULT_TOL,
) -> Allocation:
    """Minimum-energy allocation of one state when every tile is sent at ``d_star``."""
    return solve_state(cfg.with_rate(d_star), part, h, tol)


def snap_to_level(d_star: float, levels: QualityLevels) -> Optional[float]:
    """Highest available rate not above ``d_star``; None if even the lowest is too high."""
    feasible = [r for r in levels.rates if r <= d_star]
    return feasible[-1] if feasible else None


@dataclass(frozen=True)
class QualityResult:
    d_star: float
    d_snapped: Optional[float]
    worst_state: ViewState
    exact: bool
    scenario: ScenarioConfig

    def allocation(self, part: MulticastPartition, h: ChannelState, tol=DEFAULT_TOL):
        """Allocation for any state at the optimal rate."""
        return solve_state(self.scenario, part, h, tol)


def solve_quality(
    cfg: ScenarioConfig,
    grid: GridConfig,
    users: int,
    e_limit: float,
    channel_values: Sequence[float],
    levels: Optional[QualityLevels] = None,
    budget: int = SEARCH_BUDGET,
) -> QualityResult:
    mt = max_total_tiles(grid, users, budget)
    d_star = optimal_quality(cfg, e_limit, min(channel_values), mt.count)
    snapped = snap_to_level(d_star, levels) if levels is not None else None
    return QualityResult(d_star, snapped, mt.state, mt.exact, cfg.with_rate(d_star))
