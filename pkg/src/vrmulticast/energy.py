"""Minimum-energy time and power allocation at a fixed per-tile encoding rate.

For one realization of viewing directions and channels the optimum has a
closed form: group ``i`` gets time

    t_i = S_i D T ln2 / (B u_i),   u_i = 1 + W(lam H_i,min / (n0 e) - 1/e)

and power ``p_i = n0 (e^{u_i} - 1) / H_i,min``, with the dual multiplier
``lam`` fixed by requiring the times to fill the frame. ``u_i`` is the
group's spectral efficiency in nats/s/Hz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ConvergenceError, DomainError, RateOverflowError
from .grouping import MulticastPartition, total_tiles
from .special import DEFAULT_TOL, Tolerance, bisect_decreasing, lambert_w0_shifted

__all__ = [
    "ScenarioConfig",
    "ChannelState",
    "Allocation",
    "Estimate",
    "MAX_BITS_PER_SYMBOL",
    "group_min_channel",
    "power_from_time",
    "solve_counts",
    "solve_state",
    "equal_channel_energy",
    "energy_bounds",
    "expected_energy",
]

LN2 = math.log(2.0)
MAX_BITS_PER_SYMBOL = 1000.0
FRAME_SLACK = 1e-9


@dataclass(frozen=True)
class ScenarioConfig:
    """Link and video parameters; defaults are 10 MHz, 1 nW noise, 0.1 s frame."""

    bandwidth_hz: float = 10e6
    noise_w: float = 1e-9
    frame_s: float = 0.1
    rate_bps: float = 30561.0

    def __post_init__(self):
        for name in ("bandwidth_hz", "noise_w", "frame_s", "rate_bps"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")

    def with_rate(self, rate_bps: float) -> "ScenarioConfig":
        return ScenarioConfig(self.bandwidth_hz, self.noise_w, self.frame_s, rate_bps)


@dataclass(frozen=True)
class ChannelState:
    """Channel power gain of every user (linear)."""

    powers: tuple[float, ...]

    def __post_init__(self):
        powers = tuple(float(h) for h in self.powers)
        if not powers or any(not h > 0 for h in powers):
            raise DomainError("channel powers must be positive")
        object.__setattr__(self, "powers", powers)

    @classmethod
    def of(cls, powers: Sequence[float]) -> "ChannelState":
        return cls(tuple(powers))

    def __len__(self):
        return len(self.powers)


@dataclass
class Allocation:
    """Per-group transmission times (s) and powers (W) for one state."""

    times: np.ndarray
    powers: np.ndarray
    lam: float
    energy: float = field(init=False)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.powers = np.asarray(self.powers, dtype=float)
        self.energy = math.fsum(self.times * self.powers)


class Estimate(NamedTuple):
    """Expectation estimate; ``stderr`` is 0 for exact enumeration."""

    mean: float
    stderr: float
    samples: int
    exact: bool


def group_min_channel(part: MulticastPartition, h: ChannelState) -> tuple[float, ...]:
    """Weakest receiver channel of every group."""
    return tuple(min(h.powers[k] for k in g.receivers) for g in part.groups)


def _check_bits(bits):
    if not bits <= MAX_BITS_PER_SYMBOL:
        need = f"{bits:.4g}" if math.isfinite(bits) else f"more than {MAX_BITS_PER_SYMBOL:g}"
        raise RateOverflowError(
            f"a group needs {need} bit/s/Hz (limit {MAX_BITS_PER_SYMBOL:g}); "
            "the encoding rate is too high for the bandwidth and frame"
        )


def power_from_time(cfg: ScenarioConfig, s_i: int, h_min: float, t_i: float) -> float:
    """Smallest power that delivers ``s_i`` tiles in time ``t_i`` to a receiver with gain ``h_min``."""
    if not t_i > 0:
        raise DomainError("transmission time must be positive")
    bits = s_i * cfg.rate_bps * cfg.frame_s / (cfg.bandwidth_hz * t_i)
    _check_bits(bits)
    return cfg.noise_w / h_min * math.expm1(LN2 * bits)


def _powers_from_times(cfg, counts, h_mins, times):
    return np.array(
        [power_from_time(cfg, s, h, t) for s, h, t in zip(counts, h_mins, times)]
    )


@lru_cache(maxsize=1 << 16)
def _solve_sorted(cfg: ScenarioConfig, tol: Tolerance, counts, h_mins):
    B, n0, T, D = cfg.bandwidth_hz, cfg.noise_w, cfg.frame_s, cfg.rate_bps
    _check_bits(D * sum(counts) / B)
    # time share of group i is c_i / u_i
    c = [s * D * LN2 / B for s in counts]
    g = [h / n0 for h in h_mins]

    def time_fraction(lam):
        return math.fsum(ci / lambert_w0_shifted(lam * gi) for ci, gi in zip(c, g))

    # With every u_i equal to sum(c) the shares sum to 1, so the root lies in
    # [q / max(g), q / min(g)] with q = (C - 1) e^C + 1; start at the top end.
    C = math.fsum(c)
    q = C * C / 2 if C < 1e-4 else (C - 1.0) * math.exp(C) + 1.0
    lam = bisect_decreasing(time_fraction, 1.0, q / min(g), tol)
    u = np.array([lambert_w0_shifted(lam * gi) for gi in g])
    for ui in u:
        _check_bits(ui / LN2)
    times = np.array(c) * T / u
    powers = n0 * np.expm1(u) / np.array(h_mins)

    total = math.fsum(times)
    residual = abs(total / T - 1.0)
    if residual > FRAME_SLACK:
        raise ConvergenceError("frame-filling condition not met", residual)
    # Fill the frame exactly (from below) and recompute powers so every rate
    # constraint binds; the energy gradient along the frame is -lam, so this
    # removes the first-order error left by the bisection stopping rule.
    times = times * (T / total)
    while math.fsum(times) > T:
        times = np.nextafter(times, 0.0)
    powers = _powers_from_times(cfg, counts, h_mins, times)
    return lam, tuple(times), tuple(powers)


def solve_counts(
    cfg: ScenarioConfig,
    counts: Sequence[int],
    h_mins: Sequence[float],
    tol: Tolerance = DEFAULT_TOL,
) -> Allocation:
    """Optimal allocation given per-group tile counts and weakest channels.

    Solutions are cached on the sorted ``(count, h_min)`` signature; groups
    are returned in the caller's order.
    """
    if len(counts) != len(h_mins) or not counts:
        raise DomainError("need one channel per group and at least one group")
    if any(s < 1 for s in counts) or any(not h > 0 for h in h_mins):
        raise DomainError("tile counts must be >= 1 and channels positive")
    order = sorted(range(len(counts)), key=lambda i: (counts[i], h_mins[i]))
    lam, times, powers = _solve_sorted(
        cfg,
        tol,
        tuple(int(counts[i]) for i in order),
        tuple(float(h_mins[i]) for i in order),
    )
    t = np.empty(len(order))
    p = np.empty(len(order))
    t[order] = times
    p[order] = powers
    return Allocation(t, p, lam)


def solve_state(
    cfg: ScenarioConfig,
    part: MulticastPartition,
    h: ChannelState,
    tol: Tolerance = DEFAULT_TOL,
) -> Allocation:
    """Minimum-energy allocation for one (directions, channels) realization."""
    if not part.groups:
        raise DomainError("empty partition")
    return solve_counts(cfg, part.tile_counts, group_min_channel(part, h), tol)


def equal_channel_energy(cfg: ScenarioConfig, n_tiles: int, h: float) -> float:
    """Minimum energy when every receiver has the same channel gain ``h``."""
    bits = cfg.rate_bps * n_tiles / cfg.bandwidth_hz
    _check_bits(bits)
    return cfg.noise_w * cfg.frame_s / h * math.expm1(LN2 * bits)


def energy_bounds(
    cfg: ScenarioConfig,
    part: MulticastPartition,
    h_min_global: float,
    h_max_global: float,
) -> tuple[float, float]:
    """Lower and upper bound on the minimum energy over every channel draw."""
    if not 0 < h_min_global <= h_max_global:
        raise DomainError("need 0 < h_min_global <= h_max_global")
    n = total_tiles(part)
    return (
        equal_channel_energy(cfg, n, h_max_global),
        equal_channel_energy(cfg, n, h_min_global),
    )


def expected_energy(cfg, dist, tol: Tolerance = DEFAULT_TOL, **sampling) -> Estimate:
    """Average minimum energy over the random state.

    Exact when the state space has at most ``enumeration_limit`` points,
    otherwise a seeded Monte-Carlo mean. ``sampling`` is forwarded to
    :func:`vrmulticast.states.expectation`.
    """
    from .baselines import SchemeEnergy
    from .states import expectation

    (est,) = expectation(dist, [SchemeEnergy("proposed", cfg, dist.grid, tol)], **sampling)
    return est
