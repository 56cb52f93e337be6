"""Optimal TDMA multicast of tiled 360-degree video."""

from .baselines import (
    SCHEMES,
    baseline_qualities,
    equal_time_energy,
    equal_time_max_rate,
    unicast_energy,
    unicast_partition,
)
from .energy import (
    Allocation,
    ChannelState,
    Estimate,
    ScenarioConfig,
    energy_bounds,
    equal_channel_energy,
    expected_energy,
    group_min_channel,
    power_from_time,
    solve_counts,
    solve_state,
)
from .errors import (
    ContractViolation,
    ConvergenceError,
    DomainError,
    NoRootError,
    RateOverflowError,
)
from .geometry import (
    GridConfig,
    Tile,
    ViewingDirection,
    direction_center,
    tiles_for_direction,
)
from .grouping import MulticastGroup, MulticastPartition, ViewState, build_partition, total_tiles
from .quality import (
    QualityLevels,
    QualityResult,
    allocations_at_quality,
    max_total_tiles,
    optimal_quality,
    snap_to_level,
    solve_quality,
)
from .special import Tolerance, bisect_decreasing, lambert_w0
from .states import StateDistribution, expectation, sample_state, sample_states, zipf_pmf

__version__ = "0.1.0"
