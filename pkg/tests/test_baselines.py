import pytest

from conftest import channels, random_instance
from vrmulticast import (
    ViewState,
    baseline_qualities,
    build_partition,
    equal_time_energy,
    equal_time_max_rate,
    max_total_tiles,
    optimal_quality,
    solve_counts,
    solve_state,
    tiles_for_direction,
    unicast_energy,
    unicast_partition,
)
from vrmulticast.baselines import SchemeEnergy, equal_time_counts, scheme_energy
from vrmulticast.errors import DomainError
from vrmulticast.states import StateDistribution, rng_for_batch, sample_states


def test_unicast_partition_shape(grid):
    x = ViewState.of([(1, 1), (1, 2), (2, 30)])
    p = unicast_partition(grid, x)
    assert len(p) == 3
    for k, (g, d) in enumerate(zip(p, x)):
        assert g.receivers == (k,)
        assert g.tiles == tiles_for_direction(grid, d)


def test_unicast_equals_multicast_single_user(scenario, grid):
    x = ViewState.of([(2, 7)])
    h = channels(8e-7)
    a = unicast_energy(scenario, grid, x, h).energy
    b = solve_state(scenario, build_partition(grid, x), h).energy
    assert a == pytest.approx(b, rel=1e-12)


def test_unicast_costs_more_for_identical_viewers(scenario, grid):
    x = ViewState.of([(1, 5), (1, 5)])
    h = channels(5e-7, 1.5e-6)
    assert unicast_energy(scenario, grid, x, h).energy > solve_state(scenario, build_partition(grid, x), h).energy


def test_disjoint_viewers_unicast_equals_multicast(scenario, grid):
    x = ViewState.of([(1, 1), (1, 19)])
    h = channels(1e-6, 1e-6)
    assert sum(unicast_partition(grid, x).tile_counts) == sum(build_partition(grid, x).tile_counts)
    assert unicast_energy(scenario, grid, x, h).energy == pytest.approx(
        solve_state(scenario, build_partition(grid, x), h).energy, rel=1e-12
    )


def test_equal_time_single_group(scenario, grid):
    p = build_partition(grid, [(1, 9)])
    h = channels(3e-7)
    et = equal_time_energy(scenario, p, h)
    assert et.times[0] == scenario.frame_s
    assert et.energy == pytest.approx(solve_state(scenario, p, h).energy, rel=1e-12)


def test_equal_time_collapses_with_equal_channels(scenario, grid):
    p = build_partition(grid, [(1, 1), (1, 3), (2, 4)])
    h = channels(1e-6, 1e-6, 1e-6)
    assert equal_time_energy(scenario, p, h).energy == pytest.approx(
        solve_state(scenario, p, h).energy, rel=1e-12
    )


def test_equal_time_never_beats_optimum(scenario, rng):
    for _ in range(100):
        counts, h_mins = random_instance(rng, 6)
        assert solve_counts(scenario, counts, h_mins).energy <= equal_time_counts(
            scenario, counts, h_mins
        ).energy * (1 + 1e-12)


def test_equal_time_max_rate_inverts_energy(scenario):
    counts, h_mins = [40, 12, 77], [5e-7, 1.5e-6, 1.5e-6]
    d = equal_time_max_rate(scenario, counts, h_mins, 0.02)
    assert equal_time_counts(scenario.with_rate(d), counts, h_mins).energy == pytest.approx(0.02, rel=1e-12)
    with pytest.raises(DomainError):
        equal_time_max_rate(scenario, counts, h_mins, 0.0)


def test_baseline_qualities_single_user(scenario, grid):
    q = baseline_qualities(scenario, grid, 1, 0.1, [0.5e-6, 1.5e-6])
    d = optimal_quality(scenario, 0.1, 0.5e-6, max_total_tiles(grid, 1).count)
    assert q["baseline1"] == pytest.approx(d, rel=1e-12)
    assert q["baseline2"] == pytest.approx(d, rel=1e-12)


@pytest.mark.parametrize("users", [2, 3, 4])
def test_baseline_qualities_dominated(scenario, grid, users):
    q = baseline_qualities(scenario, grid, users, 0.1, [0.5e-6, 1.5e-6])
    d = optimal_quality(scenario, 0.1, 0.5e-6, max_total_tiles(grid, users).count)
    assert q["baseline1"] <= d * (1 + 1e-12)
    if users > 2:
        # two users fit 2 x 120 tiles without overlap, so unicast only loses from three on
        assert q["baseline1"] < d
    assert q["baseline2"] <= d * (1 + 1e-12)


def test_baseline2_quality_feasible_on_every_sampled_state(scenario, grid):
    rate = baseline_qualities(scenario, grid, 3, 0.1, [0.5e-6, 1.5e-6])["baseline2"]
    dist = StateDistribution(grid=grid, users=3, gamma=0.0)
    for x, h in sample_states(dist, 300, rng_for_batch(5, 0)):
        e = scheme_energy("baseline2", scenario.with_rate(rate), grid, x, h)
        assert e <= 0.1 * (1 + 1e-9)


def test_scheme_energy_matches_structured_calls(scenario, grid):
    dist = StateDistribution(grid=grid, users=3)
    for x, h in sample_states(dist, 50, rng_for_batch(1, 0)):
        p = build_partition(grid, x)
        assert SchemeEnergy("proposed", scenario, grid)(x, h) == solve_state(scenario, p, h).energy
        assert SchemeEnergy("baseline2", scenario, grid)(x, h) == equal_time_energy(scenario, p, h).energy
        assert SchemeEnergy("baseline1", scenario, grid)(x, h) == pytest.approx(
            unicast_energy(scenario, grid, x, h).energy, rel=1e-15
        )
        e = solve_state(scenario, p, h).energy
        assert e <= unicast_energy(scenario, grid, x, h).energy * (1 + 1e-12)
        assert e <= equal_time_energy(scenario, p, h).energy * (1 + 1e-12)


def test_unknown_scheme(scenario, grid):
    with pytest.raises(DomainError):
        scheme_energy("magic", scenario, grid, ViewState.of([(1, 1)]), channels(1e-6))
