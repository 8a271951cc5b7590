"""Market-based assignment baseline and an exact-optimal reference.

The auction treats every module as a singleton: modules bid for their
best-value spot, raising its price by (best minus second-best plus
epsilon) each time, until nobody is displaced.  The fixed point is
within ``n * epsilon`` of the optimal total utility.  Each bid counts as
one broadcast so message totals compare directly with the planner's.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .model import ScenarioIndex, planar_distance


class NonTerminationError(RuntimeError):
    """The auction exceeded its round budget; epsilon is misconfigured."""


@dataclass(frozen=True)
class AuctionParams:
    epsilon: Optional[float] = None  # None: utility range / (spots + 1)
    max_rounds: int = 1_000_000


@dataclass(frozen=True)
class AuctionResult:
    assignment: dict[int, int]  # spot id -> module id
    rounds: int
    broadcast_count: int
    total_utility: float
    epsilon: float


def default_epsilon(utilities: np.ndarray, n_spots: int) -> float:
    span = float(utilities.max() - utilities.min()) if utilities.size else 1.0
    return max(span, 1e-9) / (n_spots + 1)


def singleton_utility_matrix(index: ScenarioIndex,
                             values: Mapping[int, float]) -> tuple[list[int], list[int], np.ndarray]:
    """Utility of every module for every spot with all modules treated as
    singletons: spot value minus locomotion minus full docking at the spot."""
    params = index.cost_params
    module_ids = sorted(index.module_by_id)
    spot_ids = sorted(index.spot_by_id)
    matrix = np.empty((len(module_ids), len(spot_ids)))
    for i, mid in enumerate(module_ids):
        pose = index.module_by_id[mid].pose
        for j, sid in enumerate(spot_ids):
            spot = index.spot_by_id[sid]
            matrix[i, j] = (values[sid]
                            - params.alpha_loc * planar_distance(pose, spot.pose)
                            - params.c_dock * len(spot.neighbor_ids))
    return module_ids, spot_ids, matrix


def _forward_auction(utilities: np.ndarray, epsilon: float,
                     max_rounds: int) -> tuple[dict[int, int], int]:
    """Gauss-Seidel forward auction; requires bidders <= items.
    Returns {bidder index: item index} and the number of bids placed."""
    n_bidders, n_items = utilities.shape
    assert n_bidders <= n_items
    prices = np.zeros(n_items)
    owner: dict[int, int] = {}  # item -> bidder
    assigned: dict[int, int] = {}  # bidder -> item
    queue = deque(range(n_bidders))
    bids = 0
    while queue:
        bidder = queue.popleft()
        bids += 1
        if bids > max_rounds:
            raise NonTerminationError(f"auction passed {max_rounds} bids without settling")
        net = utilities[bidder] - prices
        best = int(net.argmax())
        best_value = net[best]
        if n_items > 1:
            net[best] = -np.inf
            second_value = net.max()
        else:
            second_value = best_value - 1.0
        prices[best] += best_value - second_value + epsilon
        previous = owner.get(best)
        if previous is not None:
            del assigned[previous]
            queue.append(previous)
        owner[best] = bidder
        assigned[bidder] = best
    return assigned, bids


def auction_assign(module_ids: Sequence[int], spot_ids: Sequence[int],
                   utilities: np.ndarray,
                   params: AuctionParams = AuctionParams()) -> AuctionResult:
    """Assign modules to spots by iterative bidding.

    ``utilities[i, j]`` is module ``module_ids[i]``'s utility for spot
    ``spot_ids[j]``.  With more modules than spots the roles reverse
    internally (spots bid for modules) so that bidding terminates; the
    result always covers min(modules, spots) pairs.
    """
    if params.epsilon is not None and params.epsilon <= 0:
        raise ValueError("epsilon must be positive")
    epsilon = params.epsilon if params.epsilon is not None \
        else default_epsilon(utilities, len(spot_ids))
    if len(module_ids) <= len(spot_ids):
        assigned, bids = _forward_auction(utilities, epsilon, params.max_rounds)
        assignment = {spot_ids[j]: module_ids[i] for i, j in assigned.items()}
        total = float(sum(utilities[i, j] for i, j in assigned.items()))
    else:
        assigned, bids = _forward_auction(utilities.T, epsilon, params.max_rounds)
        assignment = {spot_ids[j]: module_ids[i] for j, i in assigned.items()}
        total = float(sum(utilities[i, j] for j, i in assigned.items()))
    return AuctionResult(assignment=assignment, rounds=bids, broadcast_count=bids,
                         total_utility=total, epsilon=epsilon)


def optimal_assignment(utilities: np.ndarray) -> tuple[dict[int, int], float]:
    """Utility-maximizing injective assignment of rows to columns.

    Exact for any size; returns ({row: column}, total utility) covering
    min(rows, columns) pairs.
    """
    rows, cols = linear_sum_assignment(utilities, maximize=True)
    assignment = {int(r): int(c) for r, c in zip(rows, cols)}
    total = float(utilities[rows, cols].sum())
    return assignment, total
