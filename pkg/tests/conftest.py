from __future__ import annotations

import math
import random

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from shapeform.model import (
    AlgoParams,
    Configuration,
    CostParams,
    Module,
    Pose,
    Scenario,
    Spot,
    TargetConfiguration,
    normalize_edge,
    validate_scenario,
)

settings.register_profile(
    "suite", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("suite")


def tree_edges_from_seed(n: int, seed: int, max_degree: int = 3) -> list[tuple[int, int]]:
    """Random labelled tree on 0..n-1 with a degree cap (attachment model)."""
    rng = random.Random(seed)
    edges = []
    degree = [0] * n
    for node in range(1, n):
        parent = rng.choice([p for p in range(node) if degree[p] < max_degree])
        edges.append((parent, node))
        degree[parent] += 1
        degree[node] += 1
    return edges


def adjacency(n: int, edges) -> dict[int, set[int]]:
    adj: dict[int, set[int]] = {v: set() for v in range(n)}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    return adj


@st.composite
def random_trees(draw, min_nodes=1, max_nodes=8, max_degree=3):
    n = draw(st.integers(min_value=min_nodes, max_value=max_nodes))
    seed = draw(st.integers(min_value=0, max_value=2 ** 20))
    return n, tree_edges_from_seed(n, seed, max_degree)


def path_target(n: int, x0: float = 0.0, y: float = 0.0,
                spacing: float = 1.0) -> TargetConfiguration:
    spots = []
    for i in range(n):
        neighbors = frozenset(j for j in (i - 1, i + 1) if 0 <= j < n)
        spots.append(Spot(id=i, pose=Pose(x0 + i * spacing, y), neighbor_ids=neighbors))
    return TargetConfiguration(spots=tuple(spots))


def star_target(leaves: int, center_id: int = 0) -> TargetConfiguration:
    spots = [Spot(id=center_id, pose=Pose(0.0, 0.0),
                  neighbor_ids=frozenset(range(1, leaves + 1)))]
    for i in range(1, leaves + 1):
        angle = 2 * math.pi * i / leaves
        spots.append(Spot(id=i, pose=Pose(math.cos(angle), math.sin(angle)),
                          neighbor_ids=frozenset({center_id})))
    return TargetConfiguration(spots=tuple(spots))


def target_from_edges(n: int, edges, coords=None) -> TargetConfiguration:
    adj = adjacency(n, edges)
    spots = []
    for i in range(n):
        x, y = coords[i] if coords else (float(i), 0.0)
        spots.append(Spot(id=i, pose=Pose(x, y), neighbor_ids=frozenset(adj[i])))
    return TargetConfiguration(spots=tuple(spots))


def config_from_edges(members, edges, config_id=0, leader=None) -> Configuration:
    leader = leader if leader is not None else min(members)
    return Configuration(id=config_id, member_ids=tuple(members),
                         edges=frozenset(normalize_edge(a, b) for a, b in edges),
                         leader_id=leader)


def singleton_scenario(positions, target, seed=0, cost_params=None,
                       algo_params=None) -> Scenario:
    """Scenario of unconnected modules at the given (x, y) positions."""
    modules = tuple(Module(id=i, pose=Pose(x, y)) for i, (x, y) in enumerate(positions))
    return validate_scenario(Scenario(
        modules=modules, configurations=(), target=target,
        cost_params=cost_params or CostParams(),
        algo_params=algo_params or AlgoParams(), seed=seed))


@st.composite
def singleton_scenarios(draw, min_modules=1, max_modules=6, extra_modules=0):
    """Random singleton-only scenario with as many spots as modules."""
    n = draw(st.integers(min_value=min_modules, max_value=max_modules))
    seed = draw(st.integers(min_value=0, max_value=2 ** 20))
    rng = random.Random(seed)
    edges = tree_edges_from_seed(n, seed)
    coords = {}
    placed = {0: (0.0, 0.0)}
    for a, b in edges:
        px, py = placed[a]
        for dx, dy in rng.sample([(1, 0), (-1, 0), (0, 1), (0, -1)], 4):
            cell = (px + dx, py + dy)
            if cell not in placed.values():
                placed[b] = cell
                break
        else:
            placed[b] = (px + rng.random(), py + 1.0)
    coords = placed
    target = target_from_edges(n, edges, coords)
    positions = [(rng.uniform(-8, 8), rng.uniform(-8, 8))
                 for _ in range(n + extra_modules)]
    return singleton_scenario(positions, target, seed=seed)


@pytest.fixture
def three_path_target():
    return path_target(3)
