"""Random scenario generation.

Modules are partitioned into singletons and random trees of bounded
size; singleton positions and tree anchor positions are drawn uniformly
over the arena, tree members sit on unit offsets around their anchor,
and the target is a unit-spaced random tree.  Everything is driven by a
single seed so a scenario regenerates identically.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Optional

from .model import (
    AlgoParams,
    Configuration,
    CostParams,
    Module,
    Pose,
    Scenario,
    Spot,
    TargetConfiguration,
    choose_leader,
    normalize_edge,
    validate_scenario,
)


class UnplaceableConfigurationError(RuntimeError):
    """A tree could not be laid out on the unit grid within the retry budget."""


@dataclass(frozen=True)
class GenParams:
    n_spots: int
    n_modules: Optional[int] = None  # defaults to n_spots
    arena: tuple[float, float] = (16.0, 16.0)
    config_size_range: tuple[int, int] = (2, 10)
    equal_config_size: Optional[int] = None
    singletons_only: bool = False
    seed: int = 0
    cost_params: CostParams = CostParams()
    algo_params: AlgoParams = AlgoParams()

    def module_count(self) -> int:
        return self.n_modules if self.n_modules is not None else self.n_spots


_OFFSETS = ((1, 0), (-1, 0), (0, 1), (0, -1))


def _bounding_radius(n: int) -> int:
    """Half-width of the square box a compact n-node shape is grown in."""
    side = math.ceil(math.sqrt(n)) + 1
    return (side + 1) // 2


def _grid_tree(n: int, rng: random.Random, max_degree: int,
               attempts: int = 50, compact: bool = False,
               ) -> tuple[list[tuple[int, int]], dict[int, tuple[int, int]]]:
    """Random tree on 0..n-1 grown directly on the unit grid.

    Each new node attaches to a uniformly chosen (placed node, free adjacent
    cell) pair among nodes below the degree cap, so edges, degree bound and a
    self-avoiding unit layout all hold by construction.  ``compact`` confines
    growth to a small bounding box around the origin, which keeps large
    shapes blob-like instead of sprawling.  Growth can wall itself in; that
    is rare and handled by retrying.
    """
    if max_degree < 2 and n > 2:
        raise UnplaceableConfigurationError("cannot grow a tree with degree cap < 2")
    radius = _bounding_radius(n) if compact else None
    for _ in range(attempts):
        edges: list[tuple[int, int]] = []
        layout = {0: (0, 0)}
        occupied = {(0, 0)}
        degree = [0] * n
        stuck = False
        for node in range(1, n):
            options = []
            for placed_node, (px, py) in layout.items():
                if degree[placed_node] >= max_degree:
                    continue
                for dx, dy in _OFFSETS:
                    cell = (px + dx, py + dy)
                    if cell in occupied:
                        continue
                    if radius is not None and max(abs(cell[0]), abs(cell[1])) > radius:
                        continue
                    options.append((placed_node, cell))
            if not options:
                stuck = True
                break
            parent, cell = options[rng.randrange(len(options))]
            layout[node] = cell
            occupied.add(cell)
            edges.append((parent, node))
            degree[parent] += 1
            degree[node] += 1
        if not stuck:
            return edges, layout
    raise UnplaceableConfigurationError(
        f"could not grow a {n}-node tree after {attempts} attempts")


def _chunked_grid_tree(n: int, chunk_size: int, rng: random.Random, max_degree: int,
                       attempts: int = 50,
                       ) -> tuple[list[tuple[int, int]], dict[int, tuple[int, int]],
                                  list[tuple[int, ...]]]:
    """Grid tree of n nodes assembled from glued connected chunks.

    Chunks of ``chunk_size`` (plus single-node chunks for any remainder) are
    grown one after another, each attached to the existing structure by
    exactly one edge, so the chunk shapes partition the tree.  Growth is
    confined to a compact bounding box.  Returns (edges, layout, chunks);
    edges between chunks are the glue edges.
    """
    sizes = [chunk_size] * (n // chunk_size) + [1] * (n % chunk_size)
    radius = _bounding_radius(n)
    for _ in range(attempts):
        layout: dict[int, tuple[int, int]] = {}
        occupied: set[tuple[int, int]] = set()
        degree: dict[int, int] = {}
        edges: list[tuple[int, int]] = []
        chunks: list[tuple[int, ...]] = []
        next_id = 0
        stuck = False
        for chunk_index, size in enumerate(sizes):
            members: list[int] = []

            def attach_options(hosts):
                options = []
                for host in hosts:
                    if degree[host] >= max_degree:
                        continue
                    hx, hy = layout[host]
                    for dx, dy in _OFFSETS:
                        cell = (hx + dx, hy + dy)
                        if cell in occupied:
                            continue
                        if max(abs(cell[0]), abs(cell[1])) > radius:
                            continue
                        options.append((host, cell))
                return options

            if chunk_index == 0:
                layout[0] = (0, 0)
                occupied.add((0, 0))
                degree[0] = 0
                members.append(0)
                next_id = 1
            else:
                options = attach_options(layout.keys())  # glue edge to anything built
                if not options:
                    stuck = True
                    break
                host, cell = options[rng.randrange(len(options))]
                node = next_id
                next_id += 1
                layout[node] = cell
                occupied.add(cell)
                degree[node] = 1
                degree[host] += 1
                edges.append((host, node))
                members.append(node)
            while len(members) < size:
                options = attach_options(members)  # grow within the chunk
                if not options:
                    stuck = True
                    break
                host, cell = options[rng.randrange(len(options))]
                node = next_id
                next_id += 1
                layout[node] = cell
                occupied.add(cell)
                degree[node] = 1
                degree[host] += 1
                edges.append((host, node))
                members.append(node)
            if stuck:
                break
            chunks.append(tuple(members))
        if not stuck:
            return edges, layout, chunks
    raise UnplaceableConfigurationError(
        f"could not assemble a {n}-node tree from size-{chunk_size} chunks "
        f"after {attempts} attempts")


def random_tree_configuration(size: int, seed: int, max_degree: int = 3,
                              config_id: int = 0) -> Configuration:
    """A bare random tree configuration (no poses), for embedding benchmarks."""
    if size < 2:
        raise ValueError("a configuration needs at least 2 modules")
    rng = random.Random(seed)
    edges, _ = _grid_tree(size, rng, max_degree)
    return Configuration(id=config_id,
                         member_ids=tuple(range(size)),
                         edges=frozenset(normalize_edge(a, b) for a, b in edges),
                         leader_id=0)


def _partition_sizes(total: int, params: GenParams, rng: random.Random) -> list[int]:
    if params.singletons_only:
        return [1] * total
    lo, hi = params.config_size_range
    if lo < 2:
        raise ValueError("config sizes must be at least 2")
    sizes = []
    remaining = total
    while remaining > 0:
        if remaining < lo or rng.random() < 0.5:
            sizes.append(1)
            remaining -= 1
        else:
            size = rng.randint(lo, min(hi, remaining))
            sizes.append(size)
            remaining -= size
    return sizes


def _generate_equal_sized(params: GenParams, rng: random.Random) -> Scenario:
    """Equal-config-size (reproduction) mode.

    The target is a ladder: a spine path with a tooth on most spine nodes,
    tiled by identical windows of the configuration size.  Initial
    configurations are window-shaped blocks staged around the build site
    next to their window, inner windows first, so the ranked, utility-driven
    selection re-packs them cleanly.  Each configuration independently
    mutates some teeth (one tooth traded for a two-link tooth) with a
    probability that grows with configuration size; a mutated tooth tip has
    no counterpart in the ladder, which is what forces disconnections, so
    their rate rises with block size.
    """
    width, height = params.arena
    k = params.equal_config_size
    assert k is not None and k >= 2
    n = params.n_spots
    n_chunks = min(n // k, params.module_count() // k)
    # window = spine segment with teeth on every interior slot and bare ends;
    # that pattern cannot embed across a window boundary, so blocks land
    # exactly on windows and the tiling survives greedy selection
    spine_per_chunk = (k + 2 + (k % 2)) // 2
    teeth_per_chunk = k - spine_per_chunk
    remainder_spots = n - n_chunks * k
    # remainder beyond the chunk windows becomes bare tail spine
    spine_len = n_chunks * spine_per_chunk + remainder_spots
    cx, cy = width / 2.0, height / 2.0
    x0 = cx - (spine_len - 1) / 2.0

    def tooth_slot(spine_index: int) -> bool:
        chunk, slot = divmod(spine_index, spine_per_chunk)
        return chunk < n_chunks and 1 <= slot <= teeth_per_chunk

    neighbor_sets: dict[int, set[int]] = {}
    poses: dict[int, Pose] = {}
    for i in range(spine_len):
        neighbor_sets.setdefault(i, set())
        poses[i] = Pose(x0 + i, cy)
        if i > 0:
            neighbor_sets[i].add(i - 1)
            neighbor_sets[i - 1].add(i)
    next_spot = spine_len
    for i in range(spine_len):
        if tooth_slot(i):
            poses[next_spot] = Pose(x0 + i, cy + 1.0)
            neighbor_sets[next_spot] = {i}
            neighbor_sets[i].add(next_spot)
            next_spot += 1
    spots = tuple(Spot(id=i, pose=poses[i], neighbor_ids=frozenset(neighbor_sets[i]))
                  for i in sorted(poses))

    # stage blocks next to their window, innermost windows first
    chunk_order = sorted(range(n_chunks),
                         key=lambda c: (abs((c + 0.5) * spine_per_chunk - spine_len / 2.0), c))
    mutate_prob = min(1.0, (k * k) / 10000.0)
    modules: list[Module] = []
    configurations: list[Configuration] = []
    next_module = 0
    for rank, chunk in enumerate(chunk_order):
        slots = list(range(1, teeth_per_chunk + 1))
        n_mut = min(sum(1 for _ in slots if rng.random() < mutate_prob), len(slots) // 2)
        chosen = rng.sample(slots, 2 * n_mut) if n_mut else []
        extended = set(chosen[:n_mut])
        removed = set(chosen[n_mut:])

        cells: list[tuple[float, float]] = [(float(j), 0.0) for j in range(spine_per_chunk)]
        edges: list[tuple[int, int]] = [(j - 1, j) for j in range(1, spine_per_chunk)]
        for slot in slots:
            if slot in removed:
                continue
            base_index = len(cells)
            cells.append((float(slot), 1.0))
            edges.append((slot, base_index))
            if slot in extended:
                cells.append((float(slot), 2.0))
                edges.append((base_index, base_index + 1))

        gap = 3.0 + 0.6 * rank + rng.uniform(-0.1, 0.1)
        anchor_x = x0 + chunk * spine_per_chunk + (spine_per_chunk - 1) / 2.0 \
            + rng.uniform(-0.3, 0.3)
        anchor_y = cy - gap
        mid = (spine_per_chunk - 1) / 2.0
        members = [Module(id=next_module + i,
                          pose=Pose(anchor_x + cell[0] - mid, anchor_y - cell[1],
                                    rng.uniform(0.0, math.pi)),
                          config_id=rank)
                   for i, cell in enumerate(cells)]
        configurations.append(Configuration(
            id=rank,
            member_ids=tuple(m.id for m in members),
            edges=frozenset(normalize_edge(next_module + a, next_module + b)
                            for a, b in edges),
            leader_id=choose_leader(members)))
        modules.extend(members)
        next_module += len(cells)
    for extra in range(params.module_count() - next_module):
        gap = 3.0 + 0.6 * (n_chunks + extra)
        modules.append(Module(id=next_module,
                              pose=Pose(rng.uniform(x0, x0 + spine_len - 1), cy - gap,
                                        rng.uniform(0.0, math.pi))))
        next_module += 1

    scenario = Scenario(modules=tuple(modules),
                        configurations=tuple(configurations),
                        target=TargetConfiguration(spots=spots),
                        cost_params=params.cost_params,
                        algo_params=params.algo_params,
                        seed=params.seed)
    return validate_scenario(scenario)


def generate_scenario(params: GenParams) -> Scenario:
    """Build a validated random scenario from the parameters and seed."""
    if params.n_spots < 1:
        raise ValueError("n_spots must be >= 1")
    rng = random.Random(params.seed)
    max_degree = params.algo_params.max_degree
    width, height = params.arena
    if params.equal_config_size is not None and not params.singletons_only:
        return _generate_equal_sized(params, rng)
    draw_x = lambda: rng.uniform(0.0, width - 1.0)
    draw_y = lambda: rng.uniform(0.0, height - 1.0)

    modules: list[Module] = []
    configurations: list[Configuration] = []
    next_module = 0
    next_config = 0
    for size in _partition_sizes(params.module_count(), params, rng):
        if size == 1:
            modules.append(Module(id=next_module,
                                  pose=Pose(draw_x(), draw_y(), rng.uniform(0.0, math.pi))))
            next_module += 1
            continue
        edges, layout = _grid_tree(size, rng, max_degree)
        anchor = (draw_x(), draw_y())
        member_ids = tuple(range(next_module, next_module + size))
        members = []
        for local in range(size):
            dx, dy = layout[local]
            members.append(Module(id=next_module + local,
                                  pose=Pose(anchor[0] + dx, anchor[1] + dy,
                                            rng.uniform(0.0, math.pi)),
                                  config_id=next_config))
        leader = choose_leader(members)
        configurations.append(Configuration(
            id=next_config,
            member_ids=member_ids,
            edges=frozenset(normalize_edge(next_module + a, next_module + b)
                            for a, b in edges),
            leader_id=leader))
        modules.extend(members)
        next_module += size
        next_config += 1

    target_edges, target_layout = _grid_tree(params.n_spots, rng, max_degree, compact=True)
    target_anchor = (draw_x(), draw_y())
    neighbor_sets: dict[int, set[int]] = {i: set() for i in range(params.n_spots)}
    for a, b in target_edges:
        neighbor_sets[a].add(b)
        neighbor_sets[b].add(a)
    spots = tuple(Spot(id=i,
                       pose=Pose(target_anchor[0] + target_layout[i][0],
                                 target_anchor[1] + target_layout[i][1]),
                       neighbor_ids=frozenset(neighbor_sets[i]))
                  for i in range(params.n_spots))

    scenario = Scenario(modules=tuple(modules),
                        configurations=tuple(configurations),
                        target=TargetConfiguration(spots=spots),
                        cost_params=params.cost_params,
                        algo_params=params.algo_params,
                        seed=params.seed)
    return validate_scenario(scenario)
