"""Translation-invariant broadcast schedules and their verification.

A schedule is one routing tree on offsets: every nonzero offset ``d`` gets
the direction of the last hop into it, so item ``s`` reaches node ``s + d``
from node ``s + parent(d)`` at step ``|d|``.  Translating the same tree to
every source gives the whole all-to-all broadcast.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, Mapping

import numpy as np

from .counting import ENUMERATION_BUDGET
from .numtheory import BudgetExceeded
from .torus import (
    Coord,
    Direction,
    TorusShape,
    all_nodes,
    diameter,
    directions,
    from_index,
    norm,
    ring_distance,
    sphere,
    step,
    to_index,
)

SIMULATION_BUDGET = 10**4
STRATEGIES = ("any", "nearest")
MAX_VIOLATIONS = 50


class InvalidTree(ValueError):
    def __init__(self, message: str, offset: Coord | None = None):
        super().__init__(message)
        self.offset = offset


def admissible_directions(offset: Coord, shape: TorusShape, strategy: str = "any") -> frozenset[Direction]:
    """Directions ``e`` for which ``offset - e`` is one hop closer to the reference.

    With ``strategy="nearest"`` only axes with the smallest nonzero ring
    distance are kept.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    dists = [ring_distance(c, 0, shape.k) for c in offset]
    if not any(dists):
        raise ValueError("the zero offset has no arrival direction")
    axes = [i for i, d in enumerate(dists) if d]
    if strategy == "nearest":
        nearest = min(dists[i] for i in axes)
        axes = [i for i in axes if dists[i] == nearest]
    out = set()
    for i in axes:
        if 2 * dists[i] == shape.k:
            out.update({Direction(i + 1, 1), Direction(i + 1, -1)})
        else:
            c = offset[i] % shape.k
            out.add(Direction(i + 1, 1 if c <= shape.half else -1))
    return frozenset(out)


def parent_offset(offset: Coord, direction: Direction, shape: TorusShape) -> Coord:
    return step(offset, Direction(direction.axis, -direction.sign), shape)


def _check_tree(shape: TorusShape, arrival: Mapping[Coord, Direction]) -> None:
    zero = shape.reference
    valid = directions(shape)
    expected = set(all_nodes(shape))
    expected.discard(zero)
    extra = sorted(set(arrival) - expected)
    if extra:
        raise InvalidTree(f"offset {list(extra[0])} is not a canonical nonzero offset", extra[0])
    missing = sorted(expected - set(arrival))
    if missing:
        raise InvalidTree(f"missing offset {list(missing[0])} ({len(missing)} missing)", missing[0])
    for offset in sorted(arrival):
        e = arrival[offset]
        if e not in valid:
            raise InvalidTree(f"offset {list(offset)}: invalid direction {tuple(e)}", offset)
        if norm(parent_offset(offset, e, shape), shape) != norm(offset, shape) - 1:
            raise InvalidTree(
                f"offset {list(offset)}: arrival along {e} does not come from a closer node", offset
            )


@dataclass(frozen=True, eq=False)
class RoutingTree:
    shape: TorusShape
    arrival: Mapping[Coord, Direction]

    def __post_init__(self) -> None:
        normalized = {tuple(o): Direction(*e) for o, e in self.arrival.items()}
        _check_tree(self.shape, normalized)
        object.__setattr__(self, "arrival", dict(sorted(normalized.items())))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RoutingTree):
            return NotImplemented
        return self.shape == other.shape and self.arrival == other.arrival

    def __len__(self) -> int:
        return len(self.arrival)

    def parent(self, offset: Coord) -> Coord:
        return parent_offset(offset, self.arrival[offset], self.shape)

    def levels(self) -> dict[int, list[Coord]]:
        out: dict[int, list[Coord]] = {}
        for offset in self.arrival:
            out.setdefault(norm(offset, self.shape), []).append(offset)
        return dict(sorted(out.items()))

    def path_to(self, offset: Coord) -> list[Coord]:
        """Offsets visited from the reference to ``offset``."""
        path = [offset]
        while any(path[-1]):
            path.append(self.parent(path[-1]))
        return path[::-1]


@dataclass(frozen=True)
class InfeasibleWitness:
    """Why the balanced construction fails at one step."""

    step: int
    sphere_size: int
    divisor: int
    deficit: int
    reason: str

    def __str__(self) -> str:
        return (
            f"step {self.step}: {self.reason} "
            f"(|sphere({self.step})| = {self.sphere_size}, 2n = {self.divisor}, deficit {self.deficit})"
        )

    def to_dict(self) -> dict:
        return {
            "step": self.step,
            "sphere_size": self.sphere_size,
            "divisor": self.divisor,
            "deficit": self.deficit,
            "reason": self.reason,
        }


def _quota_match(options: list[list[int]], n_dirs: int, quota: int) -> tuple[list[int | None], int]:
    """Assign each item one of its options, at most ``quota`` items per option.

    Augmenting paths run over the option side only (at most 2n vertices);
    ``movers[e][f]`` holds the items currently on ``e`` that could move to
    ``f``.  Items are placed in order; ties go to the lowest index.
    """
    load = [0] * n_dirs
    movers: list[list[set[int]]] = [[set() for _ in range(n_dirs)] for _ in range(n_dirs)]
    assign: list[int | None] = [None] * len(options)
    unplaced = 0

    def place(item: int, e: int) -> None:
        assign[item] = e
        for f in options[item]:
            if f != e:
                movers[e][f].add(item)

    def lift(item: int, e: int) -> None:
        for f in options[item]:
            if f != e:
                movers[e][f].discard(item)

    for item, opts in enumerate(options):
        came_from: dict[int, tuple[int | None, int]] = {}
        queue: deque[int] = deque()
        for e in opts:
            came_from[e] = (None, item)
            queue.append(e)
        found = None
        while queue:
            e = queue.popleft()
            if load[e] < quota:
                found = e
                break
            for f in range(n_dirs):
                if f not in came_from and movers[e][f]:
                    came_from[f] = (e, min(movers[e][f]))
                    queue.append(f)
        if found is None:
            unplaced += 1
            continue
        load[found] += 1
        e = found
        while True:
            prev, moved = came_from[e]
            if prev is not None:
                lift(moved, prev)
            place(moved, e)
            if prev is None:
                break
            e = prev
    return assign, unplaced


def build_balanced_tree(
    shape: TorusShape, budget: int = ENUMERATION_BUDGET, strategy: str = "any"
) -> RoutingTree | InfeasibleWitness:
    """Routing tree whose arrivals split every sphere evenly over the 2n directions.

    Each level is solved on its own: every offset at distance ``t`` picks an
    admissible direction, each direction taking exactly ``|sphere(t)| / 2n``
    offsets.
    """
    if shape.node_count > budget:
        raise BudgetExceeded(f"{shape.node_count} nodes exceed the budget {budget}")
    dirs = directions(shape)
    index = {e: i for i, e in enumerate(dirs)}
    arrival: dict[Coord, Direction] = {}
    for t in range(1, diameter(shape) + 1):
        level = sphere(shape, t)
        size = len(level)
        if size % len(dirs):
            return InfeasibleWitness(t, size, len(dirs), size % len(dirs), "sphere size not divisible by 2n")
        options = [sorted(index[e] for e in admissible_directions(o, shape, strategy)) for o in level]
        assign, unplaced = _quota_match(options, len(dirs), size // len(dirs))
        if unplaced:
            return InfeasibleWitness(t, size, len(dirs), unplaced, "no balanced assignment of arrival directions")
        arrival.update((o, dirs[a]) for o, a in zip(level, assign))
    return RoutingTree(shape, arrival)


@dataclass(frozen=True)
class LinkLoadProfile:
    """Arrivals per direction at each step; ``loads[t - 1][e]``."""

    shape: TorusShape
    loads: tuple[dict[Direction, int], ...]

    @property
    def balanced(self) -> bool:
        return all(len(set(step.values())) == 1 for step in self.loads)

    def per_step(self) -> list[int]:
        """Common per-direction load at each step; needs a balanced profile."""
        if not self.balanced:
            raise ValueError("profile is not balanced")
        return [next(iter(step.values())) for step in self.loads]

    def to_dict(self) -> dict:
        return {
            "k": self.shape.k,
            "n": self.shape.n,
            "balanced": self.balanced,
            "steps": [
                {"step": t, "loads": {str(e): c for e, c in step.items()}}
                for t, step in enumerate(self.loads, start=1)
            ],
        }


def link_loads(tree: RoutingTree) -> LinkLoadProfile:
    dirs = directions(tree.shape)
    loads = []
    for t, level in tree.levels().items():
        counts = dict.fromkeys(dirs, 0)
        for offset in level:
            counts[tree.arrival[offset]] += 1
        loads.append(counts)
    return LinkLoadProfile(tree.shape, tuple(loads))


class _IndexedTorus:
    """Integer-indexed node arrays used by the simulator."""

    def __init__(self, shape: TorusShape):
        k, n = shape.k, shape.n
        self.shape = shape
        self.size = shape.node_count
        # standard coordinates, axis 1 most significant, matching torus.to_index
        self.coords = np.indices((k,) * n).reshape(n, -1).T.astype(np.int64)
        self.strides = k ** np.arange(n - 1, -1, -1, dtype=np.int64)
        self.ring = np.minimum(np.arange(k), k - np.arange(k))
        self.dirs = directions(shape)
        self.neighbor = np.empty((self.size, len(self.dirs)), dtype=np.int64)
        for j, e in enumerate(self.dirs):
            moved = self.coords.copy()
            moved[:, e.axis - 1] = (moved[:, e.axis - 1] + e.sign) % k
            self.neighbor[:, j] = moved @ self.strides

    def translate(self, offset: Coord) -> np.ndarray:
        """Index of ``s + offset`` for every node ``s``."""
        return ((self.coords + np.asarray(offset, dtype=np.int64)) % self.shape.k) @ self.strides

    def distances(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        diff = (self.coords[a] - self.coords[b]) % self.shape.k
        return self.ring[diff].sum(axis=1)


@dataclass
class Simulation:
    """Outcome of running a tree as a store-and-forward all-to-all broadcast.

    ``arrival_step[x, s]`` is the step at which node ``x`` first held item
    ``s`` (0 for its own item, -1 if never).  ``link_load[t - 1, x, j]``
    counts items sent by node ``x`` along direction ``j`` at step ``t``.
    """

    shape: TorusShape
    steps: int
    arrival_step: np.ndarray
    link_load: np.ndarray
    duplicates: list[tuple[Coord, Coord, str]] = field(default_factory=list)
    out_of_order: list[tuple[Coord, Coord, str]] = field(default_factory=list)
    wrong_distance: list[tuple[Coord, Coord, str]] = field(default_factory=list)
    duplicate_count: int = 0
    out_of_order_count: int = 0
    wrong_distance_count: int = 0
    transcript: list[tuple[int, np.ndarray, np.ndarray, np.ndarray, np.ndarray]] | None = None

    def held_counts(self, after_step: int) -> np.ndarray:
        """Items held by each node once ``after_step`` steps have run."""
        held = (self.arrival_step >= 0) & (self.arrival_step <= after_step)
        return held.sum(axis=1)

    def inventory(self, node: Coord) -> set[Coord]:
        row = self.arrival_step[to_index(node, self.shape)]
        return {from_index(int(i), self.shape) for i in np.flatnonzero(row >= 0)}

    def transcript_lines(self) -> Iterator[tuple[int, Coord, Direction, Coord]]:
        """``(step, sender, direction, item)`` for every single delivery."""
        if self.transcript is None:
            raise ValueError("simulation ran without record_transcript")
        dirs = directions(self.shape)
        for t, sender, dir_index, _receiver, item in self.transcript:
            for x, j, s in zip(sender.tolist(), dir_index.tolist(), item.tolist()):
                yield t, from_index(x, self.shape), dirs[j], from_index(s, self.shape)

    def transcript_size(self) -> int:
        if self.transcript is None:
            raise ValueError("simulation ran without record_transcript")
        return sum(len(item) for *_, item in self.transcript)


def _note(bucket: list, node: int, item: int, detail: str, shape: TorusShape) -> None:
    if len(bucket) < MAX_VIOLATIONS:
        bucket.append((from_index(node, shape), from_index(item, shape), detail))


def simulate(
    shape: TorusShape,
    tree: RoutingTree,
    budget: int = SIMULATION_BUDGET,
    record_transcript: bool = False,
) -> Simulation:
    """Play the broadcast step by step over the physical links.

    At step ``t`` every source ``s`` pushes its item across the link
    ``s + parent(d) -> neighbor along arrival(d)`` for each offset ``d`` at
    distance ``t``.  The receiving node is looked up in the adjacency table,
    not derived from ``d``, and every delivery is checked against what the
    sender and receiver hold at that moment.
    """
    if tree.shape != shape:
        raise ValueError(f"tree is for {tree.shape}, not {shape}")
    if shape.node_count > budget:
        raise BudgetExceeded(f"{shape.node_count} nodes exceed the simulation budget {budget}")
    torus = _IndexedTorus(shape)
    size = torus.size
    steps = diameter(shape)
    dir_index = {e: j for j, e in enumerate(torus.dirs)}
    arrival = np.full((size, size), -1, dtype=np.int16)
    sources = np.arange(size)
    arrival[sources, sources] = 0
    link_load = np.zeros((steps, size, len(torus.dirs)), dtype=np.int64)
    sim = Simulation(shape, steps, arrival, link_load, transcript=[] if record_transcript else None)

    for t, level in tree.levels().items():
        for offset in level:
            e = tree.arrival[offset]
            j = dir_index[e]
            sender = torus.translate(tree.parent(offset))
            receiver = torus.neighbor[sender, j]
            # translation is a bijection, so senders are distinct
            link_load[t - 1, sender, j] += 1
            if record_transcript:
                sim.transcript.append((t, sender, np.full(size, j), receiver, sources))

            held = arrival[sender, sources]
            bad = (held < 0) | (held >= t)
            if bad.any():
                sim.out_of_order_count += int(bad.sum())
                for i in np.flatnonzero(bad)[:MAX_VIOLATIONS]:
                    _note(sim.out_of_order, int(receiver[i]), int(i), f"step {t}: sender did not hold the item", shape)

            dup = arrival[receiver, sources] >= 0
            if dup.any():
                sim.duplicate_count += int(dup.sum())
                for i in np.flatnonzero(dup)[:MAX_VIOLATIONS]:
                    _note(sim.duplicates, int(receiver[i]), int(i), f"step {t}: item received again", shape)
            fresh = ~dup
            arrival[receiver[fresh], sources[fresh]] = t

            far = torus.distances(receiver, sources) != t
            if far.any():
                sim.wrong_distance_count += int(far.sum())
                for i in np.flatnonzero(far)[:MAX_VIOLATIONS]:
                    _note(sim.wrong_distance, int(receiver[i]), int(i), f"arrived at step {t}, not at its distance", shape)
    return sim


@dataclass
class VerificationReport:
    nodup_ok: bool
    shortest_ok: bool
    balance_ok: bool
    steps: int
    violations: list[tuple[Coord, Coord, str]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.nodup_ok and self.shortest_ok and self.balance_ok

    def to_dict(self) -> dict:
        return {
            "nodup_ok": self.nodup_ok,
            "shortest_ok": self.shortest_ok,
            "balance_ok": self.balance_ok,
            "steps": self.steps,
            "passed": self.passed,
            "violations": [
                {"node": list(node), "source": list(src), "detail": detail} for node, src, detail in self.violations
            ],
        }


def verify_schedule(shape: TorusShape, tree: RoutingTree, budget: int = SIMULATION_BUDGET) -> VerificationReport:
    """Check a tree by full simulation: no duplicate receipt, every item
    along a shortest path, and equal load on every directed link at every step."""
    sim = simulate(shape, tree, budget)
    violations = sim.duplicates + sim.out_of_order + sim.wrong_distance

    missing = np.argwhere(sim.arrival_step < 0)
    for x, s in missing[:MAX_VIOLATIONS]:
        _note(violations, int(x), int(s), "never received", shape)

    unbalanced = []
    for t in range(sim.steps):
        loads = sim.link_load[t]
        if loads.min() != loads.max():
            unbalanced.append(t + 1)
            if len(violations) < MAX_VIOLATIONS:
                violations.append(
                    (shape.reference, shape.reference, f"step {t + 1}: link loads range {loads.min()}..{loads.max()}")
                )
    reached = sim.arrival_step.max(initial=0)
    return VerificationReport(
        nodup_ok=sim.duplicate_count == 0,
        shortest_ok=sim.out_of_order_count == 0 and sim.wrong_distance_count == 0 and len(missing) == 0,
        balance_ok=not unbalanced,
        steps=int(reached),
        violations=violations[:MAX_VIOLATIONS],
    )
