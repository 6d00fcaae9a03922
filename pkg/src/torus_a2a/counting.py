"""Node counts per (t, p, v) class, by enumeration and by symmetry factoring.

The factored count splits a class into ``C(n, p)`` choices of the axes that
attain the minimum, a sign factor, and a weighted count of the value
patterns left on the remaining ``n - p`` free axes.  Free axes must sit
strictly above the minimum, so they range over ``v+1 .. k//2``.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass, field
from math import comb
from typing import Iterator

import numpy as np

from .numtheory import BudgetExceeded
from .torus import ClassKey, TorusShape, diameter

ENUMERATION_BUDGET = 10**6


@dataclass(frozen=True)
class ClassTable:
    shape: TorusShape
    entries: dict[ClassKey, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for key, count in self.entries.items():
            if count <= 0:
                raise ValueError(f"class {tuple(key)} has non-positive count {count}")

    def total(self) -> int:
        return sum(self.entries.values())

    def keys(self) -> list[ClassKey]:
        return sorted(self.entries)

    def rows(self) -> list[dict[str, int]]:
        return [dict(t=key.t, p=key.p, v=key.v, count=self.entries[key]) for key in self.keys()]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=["t", "p", "v", "count"], lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.rows())
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(self.rows(), sort_keys=True)


def class_table_oracle(shape: TorusShape, budget: int = ENUMERATION_BUDGET) -> ClassTable:
    """Tally the class of every non-reference node by full enumeration."""
    if shape.node_count > budget:
        raise BudgetExceeded(f"{shape.node_count} nodes exceed the enumeration budget {budget}")
    k, n = shape.k, shape.n
    ring = np.minimum(np.arange(k), k - np.arange(k))
    # one row per node, one column per axis, holding ring distances to 0
    grid = np.indices((k,) * n).reshape(n, -1).T
    dists = ring[grid]
    t = dists.sum(axis=1)
    v = dists.min(axis=1)
    p = (dists == v[:, None]).sum(axis=1)
    keep = t > 0
    keys, counts = np.unique(np.stack([t[keep], p[keep], v[keep]], axis=1), axis=0, return_counts=True)
    entries = {ClassKey(*map(int, key)): int(c) for key, c in zip(keys, counts)}
    return ClassTable(shape, entries)


def sign_multiplicity(value: int, shape: TorusShape) -> int:
    """How many signed coordinates share this ring distance: 2, or 1 for 0 and k/2."""
    if not 0 <= value <= shape.half:
        raise ValueError(f"ring distance {value} outside 0..{shape.half}")
    return 2 if 0 < value and 2 * value != shape.k else 1


def symmetry_factor(shape: TorusShape, p: int, v: int) -> int:
    """Sign factor of a class: ``sign_multiplicity(v)**p``, times ``2**(n-p)``
    for odd ``k`` where every free axis is signed and the free-axis count
    stays unweighted."""
    g = sign_multiplicity(v, shape) ** p
    if shape.k % 2:
        g *= 2 ** (shape.n - p)
    return g


def _key_in_range(shape: TorusShape, key: ClassKey) -> bool:
    return 1 <= key.p <= shape.n and 0 <= key.v <= shape.half and key.t >= 0


def bounded_compositions(total: int, parts: int, lo: int, hi: int) -> int:
    """Number of tuples of ``parts`` integers in ``[lo, hi]`` summing to ``total``."""
    if parts == 0:
        return int(total == 0)
    if lo > hi:
        return 0
    # shift to [0, width) and apply inclusion-exclusion on the upper bound
    rest = total - parts * lo
    width = hi - lo + 1
    count = 0
    for j in range(parts + 1):
        r = rest - j * width
        if r < 0:
            break
        count += (-1) ** j * comb(parts, j) * comb(r + parts - 1, parts - 1)
    return count


def n_quadrant(shape: TorusShape, key: ClassKey) -> int:
    """Weighted count of free-axis patterns of a class.

    Counts tuples ``y`` of length ``n - p`` with ``v+1 <= y_i <= k//2`` and
    ``sum(y) == t - p*v``.  For odd ``k`` this is a plain count; for even
    ``k`` each pattern weighs ``2**(number of non-boundary entries)``, and the
    sum is taken over the number ``h`` of entries on the boundary ``k/2``.
    """
    if not _key_in_range(shape, key):
        return 0
    free = shape.n - key.p
    target = key.t - key.p * key.v
    lo, half = key.v + 1, shape.half
    if shape.k % 2:
        return bounded_compositions(target, free, lo, half)
    if lo > half:
        return int(free == 0 and target == 0)
    return sum(
        comb(free, h) * 2 ** (free - h) * bounded_compositions(target - h * half, free - h, lo, half - 1)
        for h in range(free + 1)
    )


def free_patterns(shape: TorusShape, key: ClassKey) -> Iterator[tuple[int, ...]]:
    """Every free-axis pattern counted by :func:`n_quadrant`, in lexicographic order."""
    if not _key_in_range(shape, key):
        return
    target = key.t - key.p * key.v
    for y in itertools.product(range(key.v + 1, shape.half + 1), repeat=shape.n - key.p):
        if sum(y) == target:
            yield y


def n_quadrant_by_boundary(shape: TorusShape, key: ClassKey) -> dict[int, tuple[int, int]]:
    """Group the patterns of :func:`n_quadrant` by the number ``h`` of free
    axes sitting on the boundary value ``k//2``.

    Returns ``{h: (per-pattern weight, pattern count)}``; the per-pattern
    weight is ``2**(n-p-h)`` for even ``k`` and 1 for odd ``k``.
    """
    groups: dict[int, tuple[int, int]] = {}
    for y in free_patterns(shape, key):
        h = y.count(shape.half)
        weight = 1 if shape.k % 2 else 2 ** (len(y) - h)
        groups[h] = (weight, groups.get(h, (weight, 0))[1] + 1)
    return dict(sorted(groups.items()))


def class_count_factored(shape: TorusShape, key: ClassKey) -> int:
    """Nodes in class ``key`` without enumerating the torus."""
    if not _key_in_range(shape, key):
        return 0
    return comb(shape.n, key.p) * symmetry_factor(shape, key.p, key.v) * n_quadrant(shape, key)


def class_bounds(shape: TorusShape, p: int, v: int) -> tuple[int, int] | None:
    """Smallest and largest distance a (p, v) class can occupy, or None if empty."""
    if p < shape.n and v + 1 > shape.half:
        return None
    if p == shape.n and v == 0:
        return None  # only the reference node
    free = shape.n - p
    return p * v + free * (v + 1), p * v + free * shape.half


def class_table_factored(shape: TorusShape) -> ClassTable:
    """The full class table from the factored counts; no node enumeration."""
    entries = {}
    for p in range(1, shape.n + 1):
        for v in range(shape.half + 1):
            bounds = class_bounds(shape, p, v)
            if bounds is None:
                continue
            for t in range(bounds[0], bounds[1] + 1):
                count = class_count_factored(shape, ClassKey(t, p, v))
                if count:
                    entries[ClassKey(t, p, v)] = count
    return ClassTable(shape, dict(sorted(entries.items())))


def sphere_sizes(shape: TorusShape) -> list[int]:
    """``|sphere(t)|`` for ``t = 0..diameter`` from the per-axis generating polynomial."""
    axis = [1] + [sign_multiplicity(d, shape) for d in range(1, shape.half + 1)]
    sizes = [1]
    for _ in range(shape.n):
        nxt = [0] * (len(sizes) + shape.half)
        for i, a in enumerate(sizes):
            for j, b in enumerate(axis):
                nxt[i + j] += a * b
        sizes = nxt
    assert len(sizes) == diameter(shape) + 1
    return sizes
