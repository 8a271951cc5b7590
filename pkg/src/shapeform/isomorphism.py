"""Tree embeddings of configurations into the target.

A full embedding maps every module of a configuration onto spots so that
connected modules land on adjacent spots.  When no full embedding exists
the engine falls back to maximum common subtree embeddings: the largest
connected piece of the configuration that fits somewhere in the target.

Both cases run on one memoized rooted-matching recursion: ``best`` gives
the largest common rooted subtree for a (module, spot) root pair, and the
enumerator walks only branches that the memo table says can reach the
requested size, so it never dead-ends.  Search starts from target spots
in descending value order and stops as soon as the embedding cap is hit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, TYPE_CHECKING

from .model import Configuration, ScenarioIndex, TargetConfiguration
from .utility import block_utility

if TYPE_CHECKING:
    from .allocation import AllocationState

FULL = "full"
MCS = "mcs"


class DegenerateInputError(ValueError):
    """Embedding requested for an empty configuration or target."""


@dataclass(frozen=True)
class Embedding:
    """Injective, edge-preserving map from module ids to spot ids."""

    mapping: Mapping[int, int]
    kind: str  # FULL or MCS

    @property
    def size(self) -> int:
        return len(self.mapping)

    def key(self) -> frozenset:
        return frozenset(self.mapping.items())


def _assert_valid(mapping: Mapping[int, int],
                  config_adj: Mapping[int, frozenset[int]],
                  target_adj: Mapping[int, frozenset[int]]) -> None:
    assert len(set(mapping.values())) == len(mapping), "embedding not injective"
    mapped = set(mapping)
    for a in mapped:
        for b in config_adj[a]:
            if b in mapped:
                assert mapping[b] in target_adj[mapping[a]], \
                    f"edge ({a}, {b}) not preserved"
    # mapped set must be connected within the configuration
    if mapped:
        stack = [next(iter(mapped))]
        seen = set(stack)
        while stack:
            v = stack.pop()
            for w in config_adj[v]:
                if w in mapped and w not in seen:
                    seen.add(w)
                    stack.append(w)
        assert seen == mapped, "mapped modules not connected"


def _assign_max(weights: list[list[int]], i: int, used: int) -> int:
    """Best total over injective partial assignments of children to slots."""
    if i == len(weights):
        return 0
    best = _assign_max(weights, i + 1, used)  # leave child i unmapped
    for j, w in enumerate(weights[i]):
        if used & (1 << j):
            continue
        got = w + _assign_max(weights, i + 1, used | (1 << j))
        if got > best:
            best = got
    return best


class _PairSearch:
    """Shared memo over rooted (module, spot) states for one config/target pair."""

    def __init__(self, config: Configuration, target: TargetConfiguration,
                 values: Mapping[int, float]):
        self.config_adj = {m: tuple(sorted(ns)) for m, ns in config.adjacency().items()}
        self.target_adj = {s: tuple(sorted(ns)) for s, ns in target.adjacency().items()}
        self.module_order = sorted(config.member_ids)
        # target roots visited in descending value, ties by lower spot id
        self.spot_order = sorted(self.target_adj, key=lambda s: (-values.get(s, 0.0), s))
        self._best: dict[tuple, int] = {}
        # state -> (cap used, list was complete, mappings); prefixes of the
        # canonical enumeration order, safe to reuse for any smaller cap
        self._enum: dict[tuple, tuple[int, bool, list[dict[int, int]]]] = {}

    def best(self, c: int, pc: Optional[int], u: int, pu: Optional[int]) -> int:
        """Max size of a common rooted subtree mapping c -> u, entered from
        (pc, pu)."""
        key = (c, pc, u, pu)
        cached = self._best.get(key)
        if cached is not None:
            return cached
        self._best[key] = 1  # cycle-safe placeholder; trees never revisit
        children = [x for x in self.config_adj[c] if x != pc]
        slots = [y for y in self.target_adj[u] if y != pu]
        if children and slots:
            weights = [[self.best(ci, c, uj, u) for uj in slots] for ci in children]
            result = 1 + _assign_max(weights, 0, 0)
        else:
            result = 1
        self._best[key] = result
        return result

    def enumerate(self, c: int, pc: Optional[int], u: int, pu: Optional[int],
                  size: int, floor: int = -1, cap: int = 1 << 30) -> list[dict[int, int]]:
        """Up to ``cap`` mappings of exactly ``size`` modules rooted at c -> u,
        in canonical order (skip branch first, then slots ascending, larger
        child shares first).

        ``floor`` excludes modules with smaller ids; enumerating each root
        module with ``floor`` set to its own id makes it the minimum of every
        mapping it emits, so no mapping is ever produced twice across roots.
        Results are memoized; a stored list is reusable when it was computed
        with at least the requested cap or ran to completion.
        """
        if size < 1 or size > self.best(c, pc, u, pu):
            return []
        state = (c, pc, u, pu, size, floor)
        hit = self._enum.get(state)
        if hit is not None:
            stored_cap, complete, mappings = hit
            if complete or stored_cap >= cap:
                return mappings[:cap]
        if size == 1:
            out = [{c: u}]
            self._enum[state] = (cap, True, out)
            return out
        children = [x for x in self.config_adj[c] if x != pc and x >= floor]
        slots = [y for y in self.target_adj[u] if y != pu]
        caps = [[self.best(ci, c, uj, u) for uj in slots] for ci in children]
        suffix = [0] * (len(children) + 1)
        for i in range(len(children) - 1, -1, -1):
            suffix[i] = suffix[i + 1] + (max(caps[i]) if slots else 0)
        split_memo: dict[tuple[int, int, int], list[dict[int, int]]] = {}

        def splits(i: int, remaining: int, used: int) -> list[dict[int, int]]:
            if remaining > suffix[i]:
                return []
            if i == len(children):
                return [{}] if remaining == 0 else []
            key = (i, remaining, used)
            cached = split_memo.get(key)
            if cached is not None:
                return cached
            res = list(splits(i + 1, remaining, used))  # child i stays behind
            ci = children[i]
            for j, uj in enumerate(slots):
                if len(res) >= cap:
                    break
                if used & (1 << j):
                    continue
                hi = min(caps[i][j], remaining)
                lo = max(1, remaining - suffix[i + 1])
                for s in range(hi, lo - 1, -1):
                    rests = splits(i + 1, remaining - s, used | (1 << j))
                    if not rests:
                        continue
                    for head in self.enumerate(ci, c, uj, u, s, floor, cap):
                        for rest in rests:
                            res.append({**head, **rest})
                            if len(res) >= cap:
                                break
                        if len(res) >= cap:
                            break
                    if len(res) >= cap:
                        break
            res = res[:cap]
            split_memo[key] = res
            return res

        out = [{**part, c: u} for part in splits(0, size - 1, 0)]
        self._enum[state] = (cap, len(out) < cap, out)
        return out

    def max_common_size(self) -> int:
        cap = min(len(self.module_order), len(self.spot_order))
        k_max = 0
        for u in self.spot_order:
            for m in self.module_order:
                k = self.best(m, None, u, None)
                if k > k_max:
                    k_max = k
                    if k_max == cap:
                        return k_max
        return k_max

    def collect(self, size: int, kind: str, limit: int) -> list[Embedding]:
        """Gather up to ``limit`` distinct embeddings of the given size,
        stopping as soon as the cap is reached.  Root spots are visited in
        descending value order, every module serving as root in turn, so a
        capped collection concentrates on the most valuable region first;
        with a large enough limit every embedding is produced exactly once.
        """
        out: list[Embedding] = []
        seen: set[frozenset] = set()
        for u in self.spot_order:
            for m in self.module_order:
                if self.best(m, None, u, None) < size:
                    continue
                for mapping in self.enumerate(m, None, u, None, size, floor=m, cap=limit):
                    key = frozenset(mapping.items())
                    if key in seen:
                        continue
                    seen.add(key)
                    _assert_valid(mapping, self.config_adj, self.target_adj)
                    out.append(Embedding(mapping=mapping, kind=kind))
                    if len(out) >= limit:
                        return out
        return out


def enumerate_full_embeddings(config: Configuration, target: TargetConfiguration,
                              values: Mapping[int, float],
                              max_embeddings: int = 20) -> list[Embedding]:
    """Up to ``max_embeddings`` distinct whole-configuration embeddings.

    Distinct mappings count separately even when they cover the same spots
    (two orientations of one image differ in utility).  Empty result means
    no full embedding exists.
    """
    if not config.member_ids or not target.spots:
        return []
    if len(config.member_ids) > len(target.spots):
        return []
    search = _PairSearch(config, target, values)
    return search.collect(len(config.member_ids), FULL, max_embeddings)


def enumerate_mcs_embeddings(config: Configuration, target: TargetConfiguration,
                             values: Mapping[int, float],
                             max_embeddings: int = 20) -> list[Embedding]:
    """Up to ``max_embeddings`` maximum common subtree embeddings.

    All returned embeddings share the maximum achievable size; the mapped
    modules always form a connected piece of the configuration.  Handles
    configurations larger than the target by the same recursion (the size
    is then capped by the spot count).
    """
    if not config.member_ids or not target.spots:
        raise DegenerateInputError("embedding requires a non-empty configuration and target")
    search = _PairSearch(config, target, values)
    k_max = search.max_common_size()
    kind = MCS if k_max < len(config.member_ids) else FULL
    return search.collect(k_max, kind, max_embeddings)


def best_embeddings(config: Configuration, target: TargetConfiguration,
                    values: Mapping[int, float],
                    max_embeddings: int = 20) -> list[Embedding]:
    """Full embeddings when any exist, else maximum common subtree embeddings,
    sharing one memo table across both phases."""
    if not config.member_ids or not target.spots:
        raise DegenerateInputError("embedding requires a non-empty configuration and target")
    search = _PairSearch(config, target, values)
    n = len(config.member_ids)
    if n <= len(target.spots):
        full = search.collect(n, FULL, max_embeddings)
        if full:
            return full
    k_max = search.max_common_size()
    return search.collect(k_max, MCS, max_embeddings)


def order_embeddings(embeddings: list[Embedding], values: Mapping[int, float],
                     index: ScenarioIndex,
                     state: Optional["AllocationState"]) -> list[Embedding]:
    """Sort by block utility, highest first; ties prefer the smaller sum of
    image spot ids (stable, so enumeration order breaks exact ties)."""
    params = index.cost_params

    def sort_key(e: Embedding):
        return (-block_utility(e.mapping, values, index, state, params),
                sum(e.mapping.values()))

    return sorted(embeddings, key=sort_key)
