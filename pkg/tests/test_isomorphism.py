import pytest
from hypothesis import given, settings, strategies as st

from shapeform.isomorphism import (
    DegenerateInputError,
    FULL,
    MCS,
    best_embeddings,
    enumerate_full_embeddings,
    enumerate_mcs_embeddings,
    order_embeddings,
)
from shapeform.metrics import spot_values
from shapeform.model import (
    Configuration,
    Module,
    Pose,
    Scenario,
    ScenarioIndex,
    TargetConfiguration,
    validate_scenario,
)

from conftest import (
    adjacency,
    config_from_edges,
    path_target,
    random_trees,
    target_from_edges,
)
from oracles import brute_full_embeddings, brute_mcs_size, is_edge_preserving

UNBOUNDED = 10 ** 9


def values_for(target):
    return spot_values(target)


def star_config(leaves, first_id=0):
    center = first_id
    members = [center] + [first_id + i for i in range(1, leaves + 1)]
    edges = [(center, m) for m in members[1:]]
    return config_from_edges(members, edges)


def test_two_module_config_into_three_path():
    target = path_target(3)
    config = config_from_edges([10, 11], [(10, 11)])
    found = enumerate_full_embeddings(config, target, values_for(target), UNBOUNDED)
    assert len(found) == 4
    images = {frozenset(e.mapping.values()) for e in found}
    assert images == {frozenset({0, 1}), frozenset({1, 2})}
    assert all(e.kind == FULL for e in found)


def test_identical_paths_two_orientations():
    target = path_target(5)
    config = config_from_edges(range(5), [(i - 1, i) for i in range(1, 5)])
    found = enumerate_full_embeddings(config, target, values_for(target), UNBOUNDED)
    assert len(found) == 2


def test_star_into_path_has_no_full_embedding():
    target = path_target(6)
    config = star_config(3)
    assert enumerate_full_embeddings(config, target, values_for(target), UNBOUNDED) == []


def test_star_mcs_into_path_leaves_one_module():
    target = path_target(5)
    config = star_config(3)  # 4 modules, degree-3 center
    found = enumerate_mcs_embeddings(config, target, values_for(target), UNBOUNDED)
    assert found
    assert all(e.kind == MCS and e.size == 3 for e in found)


def test_config_larger_than_target_maps_partially():
    target = path_target(3)
    config = config_from_edges(range(5), [(i - 1, i) for i in range(1, 5)])
    found = enumerate_mcs_embeddings(config, target, values_for(target), UNBOUNDED)
    assert found
    assert all(e.size == 3 for e in found)
    assert enumerate_full_embeddings(config, target, values_for(target), UNBOUNDED) == []


def test_degenerate_inputs_raise():
    target = path_target(2)
    config = config_from_edges([0, 1], [(0, 1)])
    with pytest.raises(DegenerateInputError):
        enumerate_mcs_embeddings(config, TargetConfiguration(spots=()), {}, 5)
    with pytest.raises(DegenerateInputError):
        best_embeddings(Configuration(id=0, member_ids=(), edges=frozenset(),
                                      leader_id=0), target, values_for(target), 5)


def test_extra_leaf_blocked_by_degree_drops_one():
    # path target; config is a path with one extra leaf forcing degree 3
    target = path_target(6)
    edges = [(0, 1), (1, 2), (2, 3), (1, 4)]
    config = config_from_edges(range(5), edges)
    found = enumerate_mcs_embeddings(config, target, values_for(target), UNBOUNDED)
    assert found
    assert all(e.size == 4 for e in found)


def test_max_embeddings_caps_output():
    target = path_target(8)
    config = config_from_edges([0, 1], [(0, 1)])
    capped = enumerate_full_embeddings(config, target, values_for(target), 5)
    assert len(capped) == 5
    everything = enumerate_full_embeddings(config, target, values_for(target), UNBOUNDED)
    assert len(everything) == 14  # 7 edges, two orientations each
    assert [e.mapping for e in capped] == [e.mapping for e in everything[:5]]


@given(random_trees(min_nodes=1, max_nodes=8), random_trees(min_nodes=1, max_nodes=8))
def test_full_embeddings_match_brute_force(config_tree, target_tree):
    cn, config_edges = config_tree
    tn, target_edges = target_tree
    config = config_from_edges(range(cn), config_edges)
    target = target_from_edges(tn, target_edges)
    found = enumerate_full_embeddings(config, target, values_for(target), UNBOUNDED)
    got = {frozenset(e.mapping.items()) for e in found}
    expected = brute_full_embeddings(adjacency(cn, config_edges),
                                     adjacency(tn, target_edges))
    assert got == expected
    assert len(found) == len(got)  # no duplicates


@settings(max_examples=40)
@given(random_trees(min_nodes=1, max_nodes=7), random_trees(min_nodes=1, max_nodes=7))
def test_mcs_size_matches_brute_force(config_tree, target_tree):
    cn, config_edges = config_tree
    tn, target_edges = target_tree
    config = config_from_edges(range(cn), config_edges)
    target = target_from_edges(tn, target_edges)
    found = enumerate_mcs_embeddings(config, target, values_for(target), UNBOUNDED)
    expected = brute_mcs_size(adjacency(cn, config_edges), adjacency(tn, target_edges))
    assert found
    assert found[0].size == expected
    assert len({e.size for e in found}) == 1


@given(random_trees(min_nodes=2, max_nodes=7), random_trees(min_nodes=2, max_nodes=7))
def test_outputs_are_injective_edge_preserving_connected(config_tree, target_tree):
    cn, config_edges = config_tree
    tn, target_edges = target_tree
    config = config_from_edges(range(cn), config_edges)
    target = target_from_edges(tn, target_edges)
    config_adj = adjacency(cn, config_edges)
    target_adj = adjacency(tn, target_edges)
    for emb in best_embeddings(config, target, values_for(target), 50):
        mapping = dict(emb.mapping)
        assert len(set(mapping.values())) == len(mapping)
        assert is_edge_preserving(mapping, config_adj, target_adj)
        mapped = set(mapping)
        start = next(iter(mapped))
        seen, stack = {start}, [start]
        while stack:
            v = stack.pop()
            for w in config_adj[v]:
                if w in mapped and w not in seen:
                    seen.add(w)
                    stack.append(w)
        assert seen == mapped


@given(random_trees(min_nodes=2, max_nodes=7), random_trees(min_nodes=2, max_nodes=7),
       st.integers(min_value=1, max_value=10))
def test_enumeration_deterministic(config_tree, target_tree, cap):
    cn, config_edges = config_tree
    tn, target_edges = target_tree
    config = config_from_edges(range(cn), config_edges)
    target = target_from_edges(tn, target_edges)
    values = values_for(target)
    first = best_embeddings(config, target, values, cap)
    second = best_embeddings(config, target, values, cap)
    assert [e.mapping for e in first] == [e.mapping for e in second]


def test_order_embeddings_by_utility_then_spot_sum():
    target = path_target(4, x0=0.0)
    config = config_from_edges([0, 1], [(0, 1)])
    modules = (Module(0, Pose(0.0, 1.0), config_id=0),
               Module(1, Pose(1.0, 1.0), config_id=0))
    scenario = validate_scenario(Scenario(
        modules=modules,
        configurations=(config_from_edges([0, 1], [(0, 1)]),),
        target=target))
    index = ScenarioIndex.build(scenario)
    values = values_for(target)
    embeddings = enumerate_full_embeddings(config, target, values, UNBOUNDED)
    ordered = order_embeddings(embeddings, values, index, None)
    from shapeform.utility import block_utility
    utilities = [block_utility(e.mapping, values, index, None, scenario.cost_params)
                 for e in ordered]
    assert utilities == sorted(utilities, reverse=True)
    for first, second in zip(ordered, ordered[1:]):
        u1 = block_utility(first.mapping, values, index, None, scenario.cost_params)
        u2 = block_utility(second.mapping, values, index, None, scenario.cost_params)
        if u1 == pytest.approx(u2, abs=1e-12):
            assert sum(first.mapping.values()) <= sum(second.mapping.values())
