"""Core domain types for configuration-formation scenarios.

A scenario bundles robot modules (some connected into tree-shaped
configurations, some singletons), a target shape given as a tree of
spots, and the cost/algorithm parameters used by the planner.  All
types are immutable once validated and safe to share between runs.
"""

from __future__ import annotations

import math
import warnings
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence


class ScenarioError(ValueError):
    """A scenario violates a structural invariant."""


class NotATreeError(ScenarioError):
    """A member/edge set does not form a single connected tree."""


class DegreeExceededError(ScenarioError):
    """A module or spot exceeds the connector degree cap."""


class DuplicateIdError(ScenarioError):
    """An id is reused where uniqueness is required."""


class DanglingReferenceError(ScenarioError):
    """A reference points at an id that does not exist."""


class AsymmetricNeighborError(ScenarioError):
    """Spot a lists b as a neighbor but b does not list a."""


@dataclass(frozen=True)
class Pose:
    """Planar pose. theta is an orientation in [0, pi]; it is carried for
    completeness but no cost or ranking depends on it."""

    x: float
    y: float
    theta: float = 0.0


def planar_distance(a: Pose, b: Pose) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


@dataclass(frozen=True)
class Module:
    id: int
    pose: Pose
    config_id: Optional[int] = None

    @property
    def is_singleton(self) -> bool:
        return self.config_id is None


@dataclass(frozen=True)
class Configuration:
    """A set of modules physically connected as a tree.

    ``member_ids`` keeps file order; ``edges`` holds normalized (low, high)
    module-id pairs.  The leader's pose stands for the configuration's pose.
    """

    id: int
    member_ids: tuple[int, ...]
    edges: frozenset[tuple[int, int]]
    leader_id: int

    def adjacency(self) -> dict[int, frozenset[int]]:
        adj: dict[int, set[int]] = {m: set() for m in self.member_ids}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return {m: frozenset(ns) for m, ns in adj.items()}


@dataclass(frozen=True)
class Spot:
    id: int
    pose: Pose
    neighbor_ids: frozenset[int]


@dataclass(frozen=True)
class TargetConfiguration:
    spots: tuple[Spot, ...]

    def spot_by_id(self) -> dict[int, Spot]:
        return {s.id: s for s in self.spots}

    def adjacency(self) -> dict[int, frozenset[int]]:
        return {s.id: s.neighbor_ids for s in self.spots}


@dataclass(frozen=True)
class CostParams:
    """Cost constants.  Locomotion must dominate at arena scale and docking
    must cost more than undocking; validation warns when it does not."""

    alpha_loc: float = 1.0
    c_dock: float = 0.1
    c_undock: float = 0.05


@dataclass(frozen=True)
class AlgoParams:
    max_eviction_depth: int = 3
    max_embeddings: int = 20
    max_degree: int = 3


@dataclass(frozen=True)
class Scenario:
    modules: tuple[Module, ...]
    configurations: tuple[Configuration, ...]
    target: TargetConfiguration
    cost_params: CostParams = CostParams()
    algo_params: AlgoParams = AlgoParams()
    seed: int = 0


def normalize_edge(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a <= b else (b, a)


def choose_leader(members: Sequence[Module]) -> int:
    """Leader = member closest to the centroid of the member positions,
    ties broken by lowest module id."""
    cx = sum(m.pose.x for m in members) / len(members)
    cy = sum(m.pose.y for m in members) / len(members)
    return min(members, key=lambda m: (math.hypot(m.pose.x - cx, m.pose.y - cy), m.id)).id


def _check_pose(pose: Pose, what: str) -> None:
    if not (math.isfinite(pose.x) and math.isfinite(pose.y)):
        raise ScenarioError(f"{what}: position must be finite, got ({pose.x}, {pose.y})")
    if not (math.isfinite(pose.theta) and 0.0 <= pose.theta <= math.pi):
        raise ScenarioError(f"{what}: theta must lie in [0, pi], got {pose.theta}")


def _check_tree(node_ids: Sequence[int], edges: Iterable[tuple[int, int]],
                what: str, max_degree: int) -> None:
    nodes = set(node_ids)
    edge_set = set()
    degree = {n: 0 for n in nodes}
    adj: dict[int, list[int]] = {n: [] for n in nodes}
    for a, b in edges:
        if a == b:
            raise NotATreeError(f"{what}: self-loop on {a}")
        if a not in nodes or b not in nodes:
            raise DanglingReferenceError(f"{what}: edge ({a}, {b}) references unknown id")
        e = normalize_edge(a, b)
        if e in edge_set:
            raise NotATreeError(f"{what}: duplicate edge {e}")
        edge_set.add(e)
        degree[a] += 1
        degree[b] += 1
        adj[a].append(b)
        adj[b].append(a)
    for n, d in degree.items():
        if d > max_degree:
            raise DegreeExceededError(f"{what}: node {n} has degree {d} > {max_degree}")
    if len(edge_set) != len(nodes) - 1:
        raise NotATreeError(
            f"{what}: {len(edge_set)} edges for {len(nodes)} nodes (tree needs n-1)")
    if nodes:
        start = next(iter(nodes))
        seen = {start}
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        if len(seen) != len(nodes):
            raise NotATreeError(f"{what}: not connected ({len(seen)}/{len(nodes)} reachable)")


def validate_scenario(scenario: Scenario) -> Scenario:
    """Check every structural invariant; return the scenario unchanged.

    Raises a ``ScenarioError`` subclass naming the first violation found.
    """
    if not scenario.modules:
        raise ScenarioError("scenario needs at least one module")
    cp = scenario.cost_params
    if cp.alpha_loc <= 0 or cp.c_dock < 0 or cp.c_undock < 0:
        raise ScenarioError("cost params must satisfy alpha_loc > 0, c_dock >= 0, c_undock >= 0")
    if cp.c_dock <= cp.c_undock:
        warnings.warn("expected c_dock > c_undock; docking should cost more than undocking",
                      stacklevel=2)
    ap = scenario.algo_params
    if ap.max_eviction_depth < 0:
        raise ScenarioError("max_eviction_depth must be >= 0")
    if ap.max_embeddings < 1:
        raise ScenarioError("max_embeddings must be >= 1")
    if ap.max_degree < 1:
        raise ScenarioError("max_degree must be >= 1")

    module_by_id: dict[int, Module] = {}
    for m in scenario.modules:
        if m.id < 0:
            raise ScenarioError(f"module id must be non-negative, got {m.id}")
        if m.id in module_by_id:
            raise DuplicateIdError(f"duplicate module id {m.id}")
        _check_pose(m.pose, f"module {m.id}")
        module_by_id[m.id] = m

    config_by_id: dict[int, Configuration] = {}
    claimed: dict[int, int] = {}
    for c in scenario.configurations:
        if c.id in config_by_id:
            raise DuplicateIdError(f"duplicate configuration id {c.id}")
        config_by_id[c.id] = c
        if len(c.member_ids) < 2:
            raise ScenarioError(f"configuration {c.id} needs at least 2 members")
        if len(set(c.member_ids)) != len(c.member_ids):
            raise DuplicateIdError(f"configuration {c.id} repeats a member id")
        for mid in c.member_ids:
            if mid not in module_by_id:
                raise DanglingReferenceError(
                    f"configuration {c.id} references unknown module {mid}")
            if mid in claimed:
                raise DuplicateIdError(
                    f"module {mid} appears in configurations {claimed[mid]} and {c.id}")
            claimed[mid] = c.id
            if module_by_id[mid].config_id != c.id:
                raise DanglingReferenceError(
                    f"module {mid} is listed in configuration {c.id} "
                    f"but carries config_id {module_by_id[mid].config_id}")
        if c.leader_id not in c.member_ids:
            raise DanglingReferenceError(
                f"configuration {c.id}: leader {c.leader_id} is not a member")
        _check_tree(c.member_ids, c.edges, f"configuration {c.id}", ap.max_degree)
    for m in scenario.modules:
        if m.config_id is not None and m.config_id not in config_by_id:
            raise DanglingReferenceError(
                f"module {m.id} references unknown configuration {m.config_id}")

    spot_ids = set()
    for s in scenario.target.spots:
        if s.id < 0:
            raise ScenarioError(f"spot id must be non-negative, got {s.id}")
        if s.id in spot_ids:
            raise DuplicateIdError(f"duplicate spot id {s.id}")
        spot_ids.add(s.id)
        _check_pose(s.pose, f"spot {s.id}")
    spot_by_id = scenario.target.spot_by_id()
    pairs = []
    for s in scenario.target.spots:
        for n in s.neighbor_ids:
            if n == s.id:
                raise NotATreeError(f"spot {s.id} lists itself as neighbor")
            if n not in spot_by_id:
                raise DanglingReferenceError(f"spot {s.id} references unknown neighbor {n}")
            if s.id not in spot_by_id[n].neighbor_ids:
                raise AsymmetricNeighborError(
                    f"spot {s.id} lists {n} as neighbor but not vice versa")
            if s.id < n:
                pairs.append((s.id, n))
    if scenario.target.spots:
        _check_tree(sorted(spot_ids), pairs, "target", ap.max_degree)

    return scenario


@dataclass(frozen=True)
class ScenarioIndex:
    """Read-only lookups derived from a validated scenario.

    ``module_links`` maps every module to its neighbors in its initial
    configuration (empty for singletons); the planner treats these as the
    reference links when deciding dock/undock charges, even after the
    module is disconnected mid-plan.
    """

    scenario: Scenario
    module_by_id: Mapping[int, Module]
    spot_by_id: Mapping[int, Spot]
    config_by_id: Mapping[int, Configuration]
    module_links: Mapping[int, frozenset[int]]
    spot_neighbors: Mapping[int, frozenset[int]]
    singleton_ids: tuple[int, ...]
    sorted_spots: tuple[int, ...]
    n_modules: int

    @staticmethod
    def build(scenario: Scenario) -> "ScenarioIndex":
        module_by_id = {m.id: m for m in scenario.modules}
        spot_by_id = scenario.target.spot_by_id()
        config_by_id = {c.id: c for c in scenario.configurations}
        links: dict[int, frozenset[int]] = {m.id: frozenset() for m in scenario.modules}
        for c in scenario.configurations:
            links.update(c.adjacency())
        singletons = tuple(sorted(m.id for m in scenario.modules if m.is_singleton))
        return ScenarioIndex(
            scenario=scenario,
            module_by_id=module_by_id,
            spot_by_id=spot_by_id,
            config_by_id=config_by_id,
            module_links=links,
            spot_neighbors=scenario.target.adjacency(),
            singleton_ids=singletons,
            sorted_spots=tuple(sorted(spot_by_id)),
            n_modules=len(scenario.modules),
        )

    @property
    def cost_params(self) -> CostParams:
        return self.scenario.cost_params

    @property
    def algo_params(self) -> AlgoParams:
        return self.scenario.algo_params

    def sorted_spot_ids(self) -> tuple[int, ...]:
        return self.sorted_spots
