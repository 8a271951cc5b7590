import pytest
from hypothesis import given, settings, strategies as st

from shapeform.generate import (
    GenParams,
    UnplaceableConfigurationError,
    generate_scenario,
    random_tree_configuration,
    _grid_tree,
)
from shapeform.model import planar_distance, validate_scenario


def test_same_seed_same_scenario():
    params = GenParams(n_spots=30, seed=42)
    assert generate_scenario(params) == generate_scenario(params)


def test_different_seed_different_scenario():
    assert generate_scenario(GenParams(n_spots=30, seed=1)) != \
        generate_scenario(GenParams(n_spots=30, seed=2))


@settings(max_examples=30)
@given(st.integers(min_value=1, max_value=60), st.integers(min_value=0, max_value=10_000))
def test_generated_scenarios_validate(n, seed):
    scenario = generate_scenario(GenParams(n_spots=n, seed=seed))
    validate_scenario(scenario)
    assert len(scenario.modules) == n
    assert len(scenario.target.spots) == n


def test_equal_config_size_partitions_exactly():
    scenario = generate_scenario(GenParams(n_spots=100, equal_config_size=25, seed=0))
    assert len(scenario.configurations) == 4
    assert all(len(c.member_ids) == 25 for c in scenario.configurations)
    assert len(scenario.modules) == 100
    assert not [m for m in scenario.modules if m.is_singleton]


def test_equal_config_size_remainder_becomes_singletons():
    scenario = generate_scenario(GenParams(n_spots=50, equal_config_size=20, seed=1))
    assert len(scenario.configurations) == 2
    singles = [m for m in scenario.modules if m.is_singleton]
    assert len(singles) == 10


def test_singletons_only_mode():
    scenario = generate_scenario(GenParams(n_spots=40, singletons_only=True, seed=5))
    assert scenario.configurations == ()
    assert all(m.is_singleton for m in scenario.modules)


def test_module_override():
    scenario = generate_scenario(GenParams(n_spots=10, n_modules=15, seed=2))
    assert len(scenario.modules) == 15
    assert len(scenario.target.spots) == 10


@settings(max_examples=20)
@given(st.integers(min_value=2, max_value=80), st.integers(min_value=0, max_value=5000))
def test_config_members_sit_on_unit_offsets(n, seed):
    scenario = generate_scenario(GenParams(n_spots=n, seed=seed))
    for config in scenario.configurations:
        poses = {m: next(mod.pose for mod in scenario.modules if mod.id == m)
                 for m in config.member_ids}
        for a, b in config.edges:
            assert planar_distance(poses[a], poses[b]) == pytest.approx(1.0)


def test_degree_cap_respected_in_generated_trees():
    scenario = generate_scenario(GenParams(n_spots=80, seed=7))
    adjacency = scenario.target.adjacency()
    assert max(len(v) for v in adjacency.values()) <= 3


def test_unplaceable_with_impossible_degree_cap():
    import random
    with pytest.raises(UnplaceableConfigurationError):
        _grid_tree(5, random.Random(0), max_degree=1)


def test_random_tree_configuration_helper():
    config = random_tree_configuration(6, seed=4)
    assert len(config.member_ids) == 6
    assert len(config.edges) == 5
    with pytest.raises(ValueError):
        random_tree_configuration(1, seed=0)


def test_arena_bounds_for_anchor_positions():
    scenario = generate_scenario(GenParams(n_spots=20, singletons_only=True, seed=11))
    for module in scenario.modules:
        assert 0.0 <= module.pose.x <= 15.0
        assert 0.0 <= module.pose.y <= 15.0
        assert 0.0 <= module.pose.theta <= 3.15
