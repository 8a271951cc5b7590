"""Spot selection: singleton allocation with bounded eviction, and block
allocation for connected configurations.

All decisions read and write one shared ``AllocationState``; turns are
strictly sequential, so no locking exists here.  Selections of block
members are permanent — only singleton selections can be evicted, and an
accepted eviction must strictly raise the combined utility of the two
modules involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Optional

from .isomorphism import Embedding, MCS, best_embeddings, order_embeddings
from .metrics import target_center
from .model import ScenarioIndex, Spot, TargetConfiguration
from .utility import module_spot_utility

SINGLETON = "singleton"
BLOCK_MEMBER = "block_member"

POSITION_BROADCAST = "POSITION_BROADCAST"
SELECTION_BROADCAST = "SELECTION_BROADCAST"
NO_SPOT_FOUND = "NO_SPOT_FOUND"
DISCONNECT = "DISCONNECT"
OCCUPIED_BROADCAST = "OCCUPIED_BROADCAST"


@dataclass(frozen=True)
class AllocationEvent:
    tick: int
    actor: str
    event_type: str
    payload: Mapping


@dataclass(frozen=True)
class DisconnectionRecord:
    module_id: int
    config_id: int
    severed_links: tuple[tuple[int, int], ...]


class AllocationState:
    """Mutable record of who selected what, plus the broadcast log."""

    def __init__(self) -> None:
        self.selections: dict[int, int] = {}  # spot id -> module id
        self._spot_by_module: dict[int, int] = {}
        self.selector_kind: dict[int, str] = {}
        self.disconnections: list[DisconnectionRecord] = []
        self.event_log: list[AllocationEvent] = []
        self.on_event: Optional[Callable[[], None]] = None

    def selector_of(self, spot_id: int) -> Optional[int]:
        return self.selections.get(spot_id)

    def spot_of(self, module_id: int) -> Optional[int]:
        return self._spot_by_module.get(module_id)

    def select(self, spot_id: int, module_id: int, kind: str) -> None:
        assert spot_id not in self.selections, f"spot {spot_id} already selected"
        assert module_id not in self._spot_by_module, f"module {module_id} already holds a spot"
        self.selections[spot_id] = module_id
        self._spot_by_module[module_id] = spot_id
        self.selector_kind[module_id] = kind

    def unselect(self, module_id: int) -> int:
        spot_id = self._spot_by_module.pop(module_id)
        del self.selections[spot_id]
        del self.selector_kind[module_id]
        return spot_id

    def log(self, actor: str, event_type: str, payload: Mapping) -> None:
        self.event_log.append(AllocationEvent(tick=len(self.event_log), actor=actor,
                                              event_type=event_type, payload=payload))
        if self.on_event is not None:
            self.on_event()


@dataclass(frozen=True)
class PlanContext:
    """Everything a selection decision needs: scenario lookups, spot values
    and the derived target center.

    Utilities of modules without initial links do not depend on the evolving
    selections (nothing can be preserved, docking is charged per target
    link), so they are computed once and cached along with the implied spot
    preference order.
    """

    index: ScenarioIndex
    values: Mapping[int, float]
    center: tuple[float, float]
    _fixed_utility: dict[int, dict[int, float]]
    _fixed_order: dict[int, list[int]]

    @staticmethod
    def build(index: ScenarioIndex, values: Mapping[int, float]) -> "PlanContext":
        return PlanContext(index=index, values=values,
                           center=target_center(index.scenario.target),
                           _fixed_utility={}, _fixed_order={})

    def utility(self, module_id: int, spot_id: int, state: AllocationState) -> float:
        if not self.index.module_links[module_id]:
            return self._linkless_table(module_id)[spot_id]
        return module_spot_utility(self.index.module_by_id[module_id],
                                   self.index.spot_by_id[spot_id],
                                   self.values, self.index, state,
                                   self.index.cost_params)

    def _linkless_table(self, module_id: int) -> dict[int, float]:
        table = self._fixed_utility.get(module_id)
        if table is None:
            module = self.index.module_by_id[module_id]
            params = self.index.cost_params
            table = {
                spot.id: module_spot_utility(module, spot, self.values, self.index,
                                             None, params)
                for spot in self.index.spot_by_id.values()
            }
            self._fixed_utility[module_id] = table
        return table

    def preference_order(self, module_id: int, state: AllocationState) -> list[int]:
        """Spot ids in descending utility, ties by lower id."""
        if not self.index.module_links[module_id]:
            order = self._fixed_order.get(module_id)
            if order is None:
                table = self._linkless_table(module_id)
                order = sorted(table, key=lambda s: (-table[s], s))
                self._fixed_order[module_id] = order
            return order
        return sorted(self.index.sorted_spot_ids(),
                      key=lambda s: (-self.utility(module_id, s, state), s))


@dataclass
class BlockResult:
    config_id: int
    embedding: Optional[Embedding]
    placed: dict[int, int]  # module id -> spot id
    disconnected: tuple[int, ...]
    evicted: tuple[int, ...]


def evict(curr_id: int, block_id: int, depth: int, state: AllocationState,
          ctx: PlanContext, chain: list[tuple[int, int]]) -> bool:
    """Try to cancel ``block_id``'s selection so ``curr_id`` can take it.

    Succeeds only when the combined utility of (curr at the contested spot,
    blocker at its best alternative) strictly beats leaving things as they
    are, and the alternative spot is free or can itself be freed within the
    remaining recursion budget.  On success the blocker's selection is
    removed and (module, freed spot) appended to ``chain``; the caller
    re-runs allocation for evicted modules once its own selection is
    recorded, or restores the pairs to roll the attempt back.
    """
    if depth >= ctx.index.algo_params.max_eviction_depth:
        return False
    assert state.selector_kind.get(block_id) == SINGLETON, \
        "only singleton selections can be evicted"
    contested = state.spot_of(block_id)
    candidates = [s for s in ctx.index.sorted_spot_ids()
                  if s != contested
                  and state.selector_kind.get(state.selector_of(s)) != BLOCK_MEMBER]
    if not candidates:
        return False
    block_best = max(candidates, key=lambda s: (ctx.utility(block_id, s, state), -s))
    curr_alt = max(candidates, key=lambda s: (ctx.utility(curr_id, s, state), -s))
    gain = ctx.utility(curr_id, contested, state) + ctx.utility(block_id, block_best, state)
    keep = ctx.utility(curr_id, curr_alt, state) + ctx.utility(block_id, contested, state)
    if not gain > keep:
        return False
    holder = state.selector_of(block_best)
    if holder is None:
        freed = True
    elif state.selector_kind.get(holder) == SINGLETON:
        freed = evict(block_id, holder, depth + 1, state, ctx, chain)
    else:
        freed = False  # block members are immovable
    if freed:
        freed_spot = state.unselect(block_id)
        chain.append((block_id, freed_spot))
        return True
    return False


def spot_allocation(module_id: int, state: AllocationState, ctx: PlanContext) -> Optional[int]:
    """Select a spot for a singleton module; returns the spot id or ``None``.

    Spots are tried in descending utility (ties: lower spot id).  A spot
    held by another singleton is contested through ``evict``; evicted
    modules re-run their own allocation straight away, before this module's
    selection broadcast goes out.  If nothing is selectable a NO_SPOT_FOUND
    broadcast is logged and ``None`` returned.
    """
    actor = f"module:{module_id}"
    for spot_id in ctx.preference_order(module_id, state):
        holder = state.selector_of(spot_id)
        if holder is None:
            state.select(spot_id, module_id, SINGLETON)
            state.log(actor, SELECTION_BROADCAST,
                      {"selections": {str(spot_id): module_id}})
            return spot_id
        if state.selector_kind.get(holder) != SINGLETON:
            continue
        chain: list[tuple[int, int]] = []
        if evict(module_id, holder, 0, state, ctx, chain):
            state.select(spot_id, module_id, SINGLETON)
            for evicted_id, _ in reversed(chain):  # direct blocker first
                spot_allocation(evicted_id, state, ctx)
            state.log(actor, SELECTION_BROADCAST,
                      {"selections": {str(spot_id): module_id}})
            return spot_id
    state.log(actor, NO_SPOT_FOUND, {"module": module_id})
    return None


def _rerun_evicted(chains: list[list[tuple[int, int]]], state: AllocationState,
                   ctx: PlanContext) -> list[int]:
    evicted: list[int] = []
    for chain in chains:
        evicted.extend(module_id for module_id, _ in reversed(chain))
    for module_id in evicted:
        spot_allocation(module_id, state, ctx)
    return evicted


def _disconnect(module_id: int, config_id: int, remaining: set[int],
                state: AllocationState, ctx: PlanContext) -> None:
    """Record the departure of a member from its configuration."""
    links = ctx.index.module_links[module_id]
    severed = tuple(sorted((min(module_id, other), max(module_id, other))
                           for other in links if other in remaining))
    remaining.discard(module_id)
    state.disconnections.append(DisconnectionRecord(module_id=module_id,
                                                    config_id=config_id,
                                                    severed_links=severed))
    state.log(f"module:{module_id}", DISCONNECT,
              {"module": module_id, "config": config_id,
               "severed_links": [list(link) for link in severed]})


def _center_distance_order(module_ids, ctx: PlanContext) -> list[int]:
    cx, cy = ctx.center
    return sorted(module_ids,
                  key=lambda m: (math.hypot(ctx.index.module_by_id[m].pose.x - cx,
                                            ctx.index.module_by_id[m].pose.y - cy), m))


def _available_target(index: ScenarioIndex, state: AllocationState) -> TargetConfiguration:
    """The target minus spots held by block members.

    Committed blocks are immovable, so a configuration searches for
    embeddings in what is left (a forest); spots held by singletons remain
    candidates because their holders can be evicted.
    """
    available = {s for s in index.spot_by_id
                 if state.selector_kind.get(state.selector_of(s)) != BLOCK_MEMBER}
    spots = tuple(Spot(id=s.id, pose=s.pose,
                       neighbor_ids=s.neighbor_ids & frozenset(available))
                  for s in index.scenario.target.spots if s.id in available)
    return TargetConfiguration(spots=spots)


def block_allocation(config_id: int, state: AllocationState, ctx: PlanContext) -> BlockResult:
    """Select a set of adjacent spots for a whole configuration.

    Candidate embeddings come from the part of the target not yet held by
    block members and are tried in descending block utility.  An embedding
    commits only if every conflicting spot is freed by evicting its
    singleton holder; eviction attempts of a rejected embedding are rolled
    back before the next one is tried.  If every embedding is blocked the
    best one is taken anyway: members whose spots cannot be freed are
    disconnected and fall back to singleton allocation, as do members left
    unmatched by a maximum-common-subtree embedding (those go in order of
    their distance from the target center).
    """
    index = ctx.index
    config = index.config_by_id[config_id]
    actor = f"configuration:{config_id}"
    members = set(config.member_ids)
    remaining = set(config.member_ids)

    available = _available_target(index, state)
    embeddings = []
    if available.spots:
        embeddings = best_embeddings(config, available, ctx.values,
                                     index.algo_params.max_embeddings)
    if not embeddings:
        # pathological: nothing in common with the target; scatter everyone
        order = _center_distance_order(members, ctx)
        for module_id in order:
            _disconnect(module_id, config_id, remaining, state, ctx)
        for module_id in order:
            spot_allocation(module_id, state, ctx)
        return BlockResult(config_id=config_id, embedding=None, placed={},
                           disconnected=tuple(order), evicted=())
    ordered = order_embeddings(embeddings, ctx.values, index, state)

    def conflicts(embedding: Embedding) -> list[tuple[int, int]]:
        # (spot, member) pairs whose spot somebody else holds, in spot order
        return sorted((spot, module) for module, spot in embedding.mapping.items()
                      if state.selector_of(spot) is not None)

    def commit(embedding: Embedding, chains: list[list[tuple[int, int]]],
               disconnected: list[int]) -> BlockResult:
        placed = {m: s for m, s in embedding.mapping.items() if m not in disconnected}
        for module_id, spot_id in sorted(placed.items()):
            state.select(spot_id, module_id, BLOCK_MEMBER)
        if placed:
            state.log(actor, SELECTION_BROADCAST,
                      {"selections": {str(s): m for m, s in sorted(placed.items())}})
        evicted = _rerun_evicted(chains, state, ctx)
        for module_id in disconnected:
            _disconnect(module_id, config_id, remaining, state, ctx)
        for module_id in disconnected:
            spot_allocation(module_id, state, ctx)
        unmatched: list[int] = []
        if embedding.kind == MCS:
            unmatched = _center_distance_order(members - set(embedding.mapping), ctx)
            for module_id in unmatched:
                _disconnect(module_id, config_id, remaining, state, ctx)
            for module_id in unmatched:
                spot_allocation(module_id, state, ctx)
        return BlockResult(config_id=config_id, embedding=embedding, placed=placed,
                           disconnected=tuple(disconnected) + tuple(unmatched),
                           evicted=tuple(evicted))

    for embedding in ordered:
        chains: list[list[tuple[int, int]]] = []
        committable = True
        for spot_id, member_id in conflicts(embedding):
            holder = state.selector_of(spot_id)
            if holder is None:
                continue  # already freed by an earlier chain of this attempt
            if state.selector_kind.get(holder) != SINGLETON:
                committable = False
                break
            chain: list[tuple[int, int]] = []
            if evict(member_id, holder, 0, state, ctx, chain):
                chains.append(chain)
            else:
                committable = False
                break
        if committable:
            return commit(embedding, chains, disconnected=[])
        # roll the failed attempt back, most recent removal first
        for chain in reversed(chains):
            for module_id, spot_id in reversed(chain):
                state.select(spot_id, module_id, SINGLETON)

    # Every embedding resisted: take the best one, shedding blocked members.
    best = ordered[0]
    chains = []
    blocked: list[int] = []
    for spot_id, member_id in conflicts(best):
        holder = state.selector_of(spot_id)
        if holder is None:
            continue
        if state.selector_kind.get(holder) != SINGLETON:
            blocked.append(member_id)
            continue
        chain = []
        if evict(member_id, holder, 0, state, ctx, chain):
            chains.append(chain)
        else:
            blocked.append(member_id)
    return commit(best, chains, disconnected=sorted(blocked))
