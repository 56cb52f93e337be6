"""Parameter sweeps comparing the proposed allocation with the reference schemes."""

from __future__ import annotations

import csv
import io
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, TextIO

from .baselines import SCHEMES, SchemeEnergy, baseline_qualities
from .energy import Allocation, ScenarioConfig
from .errors import DomainError
from .grouping import MulticastPartition
from .quality import SEARCH_BUDGET, max_total_tiles, optimal_quality
from .special import DEFAULT_TOL, Tolerance
from .states import StateDistribution, expectation_detail

__all__ = [
    "SweepSpec",
    "SweepRow",
    "SWEEP_HEADER",
    "ALLOCATION_HEADER",
    "run_sweep",
    "write_sweep_csv",
    "write_allocation_csv",
    "fmt",
]

log = logging.getLogger(__name__)

SWEEP_HEADER = ("sweep_param", "value", "scheme", "objective", "stderr", "samples", "wall_ms")
ALLOCATION_HEADER = ("group", "tiles", "receivers", "t_s", "p_w", "energy_j")

SOLVER_ERRORS = (ArithmeticError, RuntimeError, ValueError)


def fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".12g")
    return str(x)


@dataclass(frozen=True)
class SweepSpec:
    """What to sweep and how to estimate each point.

    ``param`` is ``"gamma"`` (Zipf exponent) or ``"d"`` (path loss).
    ``exact=None`` enumerates when the state space is small enough.
    """

    param: str
    values: tuple[float, ...]
    schemes: tuple[str, ...] = SCHEMES
    objective: str = "energy"
    exact: Optional[bool] = None
    samples: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if self.param not in ("gamma", "d"):
            raise DomainError("sweep parameter must be 'gamma' or 'd'")
        if not self.values:
            raise DomainError("sweep needs at least one value")
        if self.objective not in ("energy", "quality"):
            raise DomainError("objective must be 'energy' or 'quality'")
        if self.samples < 1:
            raise DomainError("samples must be >= 1")
        bad = set(self.schemes) - set(SCHEMES)
        if bad or not self.schemes:
            raise DomainError(f"unknown schemes {sorted(bad)}")


@dataclass
class SweepRow:
    sweep_param: str
    value: float
    scheme: str
    objective: float
    stderr: float
    samples: int
    wall_ms: float
    error: Optional[str] = field(default=None, compare=False)

    def cells(self):
        return [fmt(getattr(self, k)) for k in SWEEP_HEADER]


def _dist_at(dist: StateDistribution, param: str, value: float) -> StateDistribution:
    if param == "gamma":
        return dist.with_(gamma=value)
    return dist.with_(path_loss=value)


def _energy_rows(spec, scenario, dist, tol, workers, batch_size):
    for value in spec.values:
        dv = _dist_at(dist, spec.param, value)
        for scheme in spec.schemes:
            t0 = time.perf_counter()
            try:
                (est,), _ = expectation_detail(
                    dv,
                    [SchemeEnergy(scheme, scenario, dv.grid, tol)],
                    exact=spec.exact,
                    samples=spec.samples,
                    seed=spec.seed,
                    batch_size=batch_size,
                    workers=workers,
                )
            except SOLVER_ERRORS as exc:
                log.error("%s=%g %s failed: %s", spec.param, value, scheme, exc)
                yield SweepRow(spec.param, value, scheme, math.nan, math.nan, 0,
                               1e3 * (time.perf_counter() - t0), repr(exc))
                continue
            yield SweepRow(spec.param, value, scheme, est.mean, est.stderr, est.samples,
                           1e3 * (time.perf_counter() - t0))


def _quality_rows(spec, scenario, dist, e_limit, budget):
    if e_limit is None:
        raise DomainError("a quality sweep needs an energy budget")
    mt = max_total_tiles(dist.grid, dist.users, budget)
    if not mt.exact:
        log.warning("max tile count is a lower bound; qualities are optimistic")
    for value in spec.values:
        dv = _dist_at(dist, spec.param, value)
        t0 = time.perf_counter()
        try:
            rates = baseline_qualities(scenario, dv.grid, dv.users, e_limit,
                                       dv.channel_values, budget)
            rates["proposed"] = optimal_quality(scenario, e_limit, min(dv.channel_values),
                                                mt.count)
        except SOLVER_ERRORS as exc:
            log.error("%s=%g failed: %s", spec.param, value, exc)
            for scheme in spec.schemes:
                yield SweepRow(spec.param, value, scheme, math.nan, math.nan, 0,
                               1e3 * (time.perf_counter() - t0), repr(exc))
            continue
        wall = 1e3 * (time.perf_counter() - t0)
        for scheme in spec.schemes:
            yield SweepRow(spec.param, value, scheme, rates[scheme], 0.0, mt.evaluated, wall)


def run_sweep(
    spec: SweepSpec,
    scenario: ScenarioConfig,
    dist: StateDistribution,
    *,
    e_limit: Optional[float] = None,
    tol: Tolerance = DEFAULT_TOL,
    workers: int = 1,
    batch_size: int = 1000,
    budget: int = SEARCH_BUDGET,
) -> list[SweepRow]:
    """One row per (swept value, scheme).

    Energy sweeps report the average minimum energy (J) at
    ``scenario.rate_bps``; quality sweeps report the worst-case-feasible
    encoding rate (bit/s) under ``e_limit``. A failing cell gets a NaN
    objective and its diagnostic in ``row.error``; other cells still run.
    """
    if spec.objective == "energy":
        return list(_energy_rows(spec, scenario, dist, tol, workers, batch_size))
    return list(_quality_rows(spec, scenario, dist, e_limit, budget))


def write_sweep_csv(rows: Iterable[SweepRow], out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for row in rows:
        w.writerow(row.cells())


def write_allocation_csv(
    part: MulticastPartition, alloc: Allocation, out: TextIO
) -> None:
    """Per-group dump: tile count, receivers (space separated), time, power, energy."""
    w = csv.writer(out, lineterminator="\n")
    w.writerow(ALLOCATION_HEADER)
    for i, (g, t, p) in enumerate(zip(part.groups, alloc.times, alloc.powers)):
        w.writerow([i, g.n_tiles, " ".join(map(str, g.receivers)),
                    fmt(float(t)), fmt(float(p)), fmt(float(t * p))])


def rows_to_text(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    write_sweep_csv(rows, buf)
    return buf.getvalue()
