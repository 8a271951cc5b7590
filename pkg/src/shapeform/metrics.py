"""Spot valuation and distance-based ranking.

The value of a spot is its share of shortest paths: the number of
shortest paths between other spot pairs that pass through it, divided by
the total number of shortest paths between those pairs.  On a tree every
pair has exactly one path, so the value reduces to the fraction of pairs
whose path crosses the spot; the computation below handles general
graphs via per-source BFS accumulation so non-tree targets still get
sensible values.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from .model import ScenarioIndex, TargetConfiguration


class EmptyTargetError(ValueError):
    """The target has no spots."""


def spot_values(target: TargetConfiguration) -> dict[int, float]:
    """Map every spot id to its value in [0, 1].

    For spot v the numerator counts shortest paths between pairs {j, k}
    (v not an endpoint) passing through v, the denominator counts all
    shortest paths between such pairs.  A single-spot target values its
    spot at 0; so do both ends of a two-spot target (no third-party pairs).
    """
    if not target.spots:
        raise EmptyTargetError("cannot value spots of an empty target")
    ids = sorted(s.id for s in target.spots)
    if len(ids) == 1:
        return {ids[0]: 0.0}
    adj = target.adjacency()

    # Per source s: BFS gives path counts sigma(s, v) and the shortest-path
    # DAG.  continuations[v] = number of DAG paths from v to any strictly
    # later vertex; sigma(s, v) * continuations[v] then counts the shortest
    # (s, t) paths with v strictly between s and t.
    through = {v: 0.0 for v in ids}
    row_sigma = {v: 0.0 for v in ids}
    total_sigma = 0.0
    for s in ids:
        dist = {s: 0}
        sigma = {s: 1.0}
        successors: dict[int, list[int]] = {s: []}
        order = [s]
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w in sorted(adj[v]):
                if w not in dist:
                    dist[w] = dist[v] + 1
                    sigma[w] = 0.0
                    successors[w] = []
                    order.append(w)
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    successors[v].append(w)
        continuations = {v: 0.0 for v in order}
        for v in reversed(order):
            for w in successors[v]:
                continuations[v] += 1.0 + continuations[w]
        for v in order:
            if v != s:
                through[v] += sigma[v] * continuations[v]
        row_sigma[s] = sum(sigma[t] for t in order if t != s)
        total_sigma += row_sigma[s]
    total_sigma /= 2.0  # ordered -> unordered pairs

    values = {}
    for v in ids:
        denom = total_sigma - row_sigma[v]
        values[v] = (through[v] / 2.0) / denom if denom > 0 else 0.0
    return values


def target_center(target: TargetConfiguration) -> tuple[float, float]:
    """Arithmetic mean of the spot positions."""
    if not target.spots:
        raise EmptyTargetError("cannot compute the center of an empty target")
    n = len(target.spots)
    return (sum(s.pose.x for s in target.spots) / n,
            sum(s.pose.y for s in target.spots) / n)


CONFIGURATION = "configuration"
SINGLETON = "singleton"


@dataclass(frozen=True)
class RankedEntity:
    kind: str  # CONFIGURATION or SINGLETON
    entity_id: int
    distance: float


def rank_entities(index: ScenarioIndex, center: tuple[float, float]) -> list[RankedEntity]:
    """Order all singletons and configurations by distance to the center.

    A configuration's distance is measured from its leader.  Exact ties put
    configurations before singletons, then lower ids first.
    """
    cx, cy = center
    entities = []
    for cid in sorted(index.config_by_id):
        leader = index.module_by_id[index.config_by_id[cid].leader_id]
        d = math.hypot(leader.pose.x - cx, leader.pose.y - cy)
        entities.append(RankedEntity(CONFIGURATION, cid, d))
    for mid in index.singleton_ids:
        pose = index.module_by_id[mid].pose
        d = math.hypot(pose.x - cx, pose.y - cy)
        entities.append(RankedEntity(SINGLETON, mid, d))
    entities.sort(key=lambda e: (e.distance, 0 if e.kind == CONFIGURATION else 1, e.entity_id))
    return entities
