"""Random system states and expectations over them.

Viewing directions are i.i.d. Zipf over the direction grid, ranking
direction (row, col) as ``(col - 1) * n_v + row``; channel gains are i.i.d.
draws from a finite set ``factor * path_loss``.

Monte-Carlo runs are split into fixed-size batches. Batch ``b`` draws from
``PCG64(SeedSequence([seed, b]))``: uniforms are mapped through inverse
CDFs, so two distributions sampled with the same seed see common random
numbers, and the result does not depend on how batches are scheduled.
"""

from __future__ import annotations

import itertools
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Iterator, Sequence

import numpy as np

from .energy import ChannelState, Estimate
from .errors import DomainError
from .geometry import GridConfig, ViewingDirection
from .grouping import ViewState

__all__ = [
    "StateDistribution",
    "ENUMERATION_LIMIT",
    "zipf_pmf",
    "rng_for_batch",
    "sample_states",
    "sample_state",
    "enumerate_states",
    "expectation",
    "expectation_detail",
]

log = logging.getLogger(__name__)

ENUMERATION_LIMIT = 1_000_000


def zipf_pmf(gamma: float, n: int) -> np.ndarray:
    """Zipf probabilities ``r^-gamma / sum_i i^-gamma`` for ranks 1..n."""
    if n < 1 or not gamma >= 0:
        raise DomainError("zipf_pmf needs n >= 1 and gamma >= 0")
    w = np.arange(1, n + 1, dtype=float) ** -float(gamma)
    return w / math.fsum(w)


@dataclass(frozen=True)
class StateDistribution:
    grid: GridConfig = GridConfig()
    users: int = 3
    gamma: float = 0.8
    path_loss: float = 1e-6
    channel_factors: tuple[float, ...] = (0.5, 1.5)
    channel_probs: tuple[float, ...] = (0.5, 0.5)
    independent: bool = True

    def __post_init__(self):
        if self.users < 1:
            raise DomainError("need at least one user")
        if not self.gamma >= 0:
            raise DomainError("Zipf exponent must be >= 0")
        if len(self.channel_factors) != len(self.channel_probs) or not self.channel_factors:
            raise DomainError("one probability per channel value")
        if any(not f > 0 for f in self.channel_factors) or not self.path_loss > 0:
            raise DomainError("channel powers must be positive")
        if any(p < 0 for p in self.channel_probs) or abs(math.fsum(self.channel_probs) - 1) > 1e-12:
            raise DomainError("channel probabilities must sum to 1")
        if not self.independent:
            raise DomainError(
                "only independent directions and channels can be sampled; "
                "pass explicit weighted states for correlated models"
            )

    def with_(self, **changes) -> "StateDistribution":
        return replace(self, **changes)

    @property
    def channel_values(self) -> tuple[float, ...]:
        return tuple(f * self.path_loss for f in self.channel_factors)

    def ranked_directions(self) -> list[ViewingDirection]:
        """Directions in Zipf-rank order (rank 1 first)."""
        g = self.grid
        return [ViewingDirection(r, c) for c in range(1, g.n_h + 1) for r in range(1, g.n_v + 1)]

    def direction_pmf(self) -> np.ndarray:
        return zipf_pmf(self.gamma, self.grid.n_directions)

    @property
    def support_size(self) -> int:
        return (self.grid.n_directions * len(self.channel_factors)) ** self.users


def rng_for_batch(seed: int, batch: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, batch])))


def _inverse_cdf(pmf, u):
    cdf = np.cumsum(pmf)
    return np.minimum(np.searchsorted(cdf, u, side="right"), len(pmf) - 1)


def sample_states(
    dist: StateDistribution, n: int, rng: np.random.Generator
) -> list[tuple[ViewState, ChannelState]]:
    """Draw ``n`` i.i.d. states (directions, then channels, per user)."""
    u_dir = rng.random((n, dist.users))
    u_ch = rng.random((n, dist.users))
    dirs = dist.ranked_directions()
    d_idx = _inverse_cdf(dist.direction_pmf(), u_dir)
    h_idx = _inverse_cdf(np.asarray(dist.channel_probs), u_ch)
    values = dist.channel_values
    return [
        (
            ViewState(tuple(dirs[i] for i in d_row)),
            ChannelState(tuple(values[j] for j in h_row)),
        )
        for d_row, h_row in zip(d_idx, h_idx)
    ]


def sample_state(dist: StateDistribution, rng: np.random.Generator):
    return sample_states(dist, 1, rng)[0]


def enumerate_states(
    dist: StateDistribution,
) -> Iterator[tuple[float, ViewState, ChannelState]]:
    """Every state with its probability, directions outermost."""
    dirs = dist.ranked_directions()
    pd = dist.direction_pmf()
    values = dist.channel_values
    ph = dist.channel_probs
    h_combos = [
        (math.prod(ph[j] for j in combo), ChannelState(tuple(values[j] for j in combo)))
        for combo in itertools.product(range(len(values)), repeat=dist.users)
    ]
    for combo in itertools.product(range(len(dirs)), repeat=dist.users):
        wx = math.prod(pd[i] for i in combo)
        x = ViewState(tuple(dirs[i] for i in combo))
        for wh, h in h_combos:
            yield wx * wh, x, h


def _run_batch(dist, fns, seed, batch, n):
    states = sample_states(dist, n, rng_for_batch(seed, batch))
    sums, sumsqs, secs = [], [], []
    for fn in fns:
        t0 = time.perf_counter()
        vals = [fn(x, h) for x, h in states]
        secs.append(time.perf_counter() - t0)
        sums.append(math.fsum(vals))
        sumsqs.append(math.fsum(v * v for v in vals))
    return sums, sumsqs, secs


def expectation_detail(
    dist: StateDistribution,
    fns: Sequence[Callable[[ViewState, ChannelState], float]],
    *,
    exact: bool | None = None,
    samples: int = 100_000,
    seed: int = 0,
    enumeration_limit: int = ENUMERATION_LIMIT,
    batch_size: int = 1000,
    workers: int = 1,
) -> tuple[list[Estimate], list[float]]:
    """Expectations of several state functions plus the seconds spent in each.

    ``exact=None`` enumerates whenever the support fits ``enumeration_limit``;
    ``exact=True`` asks for enumeration but falls back to sampling (with a
    warning) above the limit; ``exact=False`` always samples.
    """
    fns = list(fns)
    enumerate_ok = dist.support_size <= enumeration_limit
    if exact and not enumerate_ok:
        log.warning(
            "support of %d states exceeds the enumeration limit %d; sampling instead",
            dist.support_size,
            enumeration_limit,
        )
    if (exact is None or exact) and enumerate_ok:
        acc = [[] for _ in fns]
        secs = [0.0] * len(fns)
        for w, x, h in enumerate_states(dist):
            for j, fn in enumerate(fns):
                t0 = time.perf_counter()
                acc[j].append(w * fn(x, h))
                secs[j] += time.perf_counter() - t0
        n = dist.support_size
        return [Estimate(math.fsum(a), 0.0, n, True) for a in acc], secs

    if samples < 1:
        raise DomainError("need at least one sample")
    sizes = [batch_size] * (samples // batch_size)
    if samples % batch_size:
        sizes.append(samples % batch_size)
    args = [(dist, fns, seed, b, n) for b, n in enumerate(sizes)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_batch, *zip(*args)))
    else:
        results = [_run_batch(*a) for a in args]

    estimates, secs = [], []
    for j in range(len(fns)):
        s = math.fsum(r[0][j] for r in results)
        s2 = math.fsum(r[1][j] for r in results)
        mean = s / samples
        if samples > 1:
            var = max(s2 / samples - mean * mean, 0.0) * samples / (samples - 1)
            se = math.sqrt(var / samples)
        else:
            se = math.nan
        estimates.append(Estimate(mean, se, samples, False))
        secs.append(math.fsum(r[2][j] for r in results))
    return estimates, secs


def expectation(dist, fns, **kwargs) -> list[Estimate]:
    """Expectation of each ``fn(x, h)`` under ``dist``; see :func:`expectation_detail`."""
    return expectation_detail(dist, fns, **kwargs)[0]
