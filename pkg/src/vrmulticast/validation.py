"""Invariant checks on randomly drawn states, shared by the CLI and the tests."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .baselines import equal_time_energy, unicast_energy
from .energy import LN2, Allocation, ScenarioConfig, energy_bounds, group_min_channel, solve_state
from .grouping import MulticastPartition, build_partition
from .special import DEFAULT_TOL
from .states import StateDistribution, rng_for_batch, sample_states

__all__ = ["frame_residual", "rate_residuals", "CheckResult", "run_checks"]

ROUNDING = 1e-12


def frame_residual(cfg: ScenarioConfig, alloc: Allocation) -> float:
    """``sum(t) / T - 1``; feasible allocations are <= 0."""
    return math.fsum(alloc.times) / cfg.frame_s - 1.0


def rate_residuals(cfg, part: MulticastPartition, h_mins, alloc: Allocation) -> np.ndarray:
    """Delivered over required bits minus one, per group, at the weakest receiver."""
    delivered = (
        alloc.times
        * cfg.bandwidth_hz
        * np.log1p(alloc.powers * np.asarray(h_mins) / cfg.noise_w)
        / LN2
    )
    need = np.asarray(part.tile_counts) * cfg.rate_bps * cfg.frame_s
    return delivered / need - 1.0


@dataclass
class CheckResult:
    name: str
    checked: int = 0
    failed: int = 0
    worst: float = 0.0

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def record(self, passed: bool, value: float = 0.0) -> None:
        self.checked += 1
        self.failed += not passed
        self.worst = max(self.worst, value)

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"{status} {self.name}: {self.checked - self.failed}/{self.checked} (worst {self.worst:.3e})"


def run_checks(
    cfg: ScenarioConfig,
    dist: StateDistribution,
    instances: int = 200,
    seed: int = 0,
    tol=DEFAULT_TOL,
) -> list[CheckResult]:
    """Solve ``instances`` sampled states and test the optimality invariants."""
    checks = {
        n: CheckResult(n)
        for n in ("frame", "rate_binding", "bounds", "unicast_dominance", "equal_time_dominance")
    }
    lo_h, hi_h = min(dist.channel_values), max(dist.channel_values)
    for x, h in sample_states(dist, instances, rng_for_batch(seed, 0)):
        part = build_partition(dist.grid, x)
        alloc = solve_state(cfg, part, h, tol)
        e = alloc.energy

        fr = frame_residual(cfg, alloc)
        checks["frame"].record(-1e-9 <= fr <= 0.0, abs(fr))
        rr = np.abs(rate_residuals(cfg, part, group_min_channel(part, h), alloc)).max()
        checks["rate_binding"].record(rr <= 1e-9, rr)

        lower, upper = energy_bounds(cfg, part, lo_h, hi_h)
        gap = max((lower - e) / e, (e - upper) / e, 0.0)
        checks["bounds"].record(gap <= ROUNDING, gap)

        e1 = unicast_energy(cfg, dist.grid, x, h, tol).energy
        checks["unicast_dominance"].record(e <= e1 * (1 + ROUNDING), max((e - e1) / e, 0.0))
        e2 = equal_time_energy(cfg, part, h).energy
        checks["equal_time_dominance"].record(e <= e2 * (1 + ROUNDING), max((e - e2) / e, 0.0))
    return list(checks.values())
