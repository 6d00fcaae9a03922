"""Model of the k-ary n-dimensional torus.

Nodes are tuples of centered coordinates in ``[-k//2, k//2]``.  For even
``k`` the value ``-k/2`` names the same ring position as ``+k/2``; the
positive form is canonical.  The reference node is the all-zero tuple.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

Coord = tuple[int, ...]

# node indices are held in int64 arrays by the simulator
MAX_NODE_COUNT = 2**63 - 1


class ShapeError(ValueError):
    """Raised for an invalid torus shape or a coordinate that does not fit it."""


@dataclass(frozen=True, order=True)
class TorusShape:
    k: int
    n: int

    def __post_init__(self) -> None:
        for name in ("k", "n"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise ShapeError(f"{name} must be an integer, got {value!r}")
        if self.k < 3:
            raise ShapeError(f"arity k must be >= 3, got {self.k}")
        if self.n < 1:
            raise ShapeError(f"dimension n must be >= 1, got {self.n}")
        if self.k**self.n > MAX_NODE_COUNT:
            raise ShapeError(f"{self.k}^{self.n} nodes do not fit a 64-bit index")

    @property
    def half(self) -> int:
        """Largest ring distance, ``k // 2``."""
        return self.k // 2

    @property
    def node_count(self) -> int:
        return self.k**self.n

    @property
    def degree(self) -> int:
        return 2 * self.n

    @property
    def diameter(self) -> int:
        return diameter(self)

    @property
    def reference(self) -> Coord:
        return (0,) * self.n

    def centered_values(self) -> range:
        """Canonical centered values of one coordinate, ascending."""
        lo = -self.half if self.k % 2 else -(self.half - 1)
        return range(lo, self.half + 1)


class Direction(NamedTuple):
    """A link direction: 1-based ``axis`` and ``sign`` of +1 or -1."""

    axis: int
    sign: int

    def __str__(self) -> str:
        return f"{'+' if self.sign > 0 else '-'}{self.axis}"


class ClassKey(NamedTuple):
    """Distance ``t``, multiplicity ``p`` and value ``v`` of the minimal ring distance."""

    t: int
    p: int
    v: int


def directions(shape: TorusShape) -> list[Direction]:
    """All 2n directions ordered by (axis, sign)."""
    return [Direction(axis, sign) for axis in range(1, shape.n + 1) for sign in (-1, 1)]


def canonical(value: int, k: int) -> int:
    """Map any integer ring position to its canonical centered value."""
    c = value % k
    return c - k if c > k // 2 else c


def node(coords: Sequence[int], shape: TorusShape) -> Coord:
    """Canonical centered coordinate tuple for ``coords``.

    Accepts standard (``0..k-1``) or centered input, or any integer alias.
    """
    if len(coords) != shape.n:
        raise ShapeError(f"expected {shape.n} coordinates, got {len(coords)}")
    return tuple(canonical(int(c), shape.k) for c in coords)


def is_canonical(coords: Sequence[int], shape: TorusShape) -> bool:
    if len(coords) != shape.n:
        return False
    values = shape.centered_values()
    return all(c in values for c in coords)


def ring_distance(a: int, b: int, k: int) -> int:
    d = abs(a - b) % k
    return min(d, k - d)


def distance(x: Sequence[int], y: Sequence[int], shape: TorusShape) -> int:
    if len(x) != shape.n or len(y) != shape.n:
        raise ShapeError(
            f"dimension mismatch: {len(x)} and {len(y)} coordinates on a {shape.n}-dimensional torus"
        )
    return sum(ring_distance(a, b, shape.k) for a, b in zip(x, y))


def norm(x: Sequence[int], shape: TorusShape) -> int:
    """Distance from the reference node."""
    return sum(ring_distance(c, 0, shape.k) for c in x)


def diameter(shape: TorusShape) -> int:
    return shape.n * shape.half


def step(x: Sequence[int], direction: Direction, shape: TorusShape) -> Coord:
    """The neighbor of ``x`` one hop along ``direction``."""
    i = direction.axis - 1
    moved = list(x)
    moved[i] = canonical(moved[i] + direction.sign, shape.k)
    return tuple(moved)


def neighbors(x: Sequence[int], shape: TorusShape) -> set[Coord]:
    x = node(x, shape)
    return {step(x, d, shape) for d in directions(shape)}


def subtract(x: Sequence[int], y: Sequence[int], shape: TorusShape) -> Coord:
    """Offset ``x - y`` on the torus, canonicalized."""
    return tuple(canonical(a - b, shape.k) for a, b in zip(x, y))


def add(x: Sequence[int], y: Sequence[int], shape: TorusShape) -> Coord:
    return tuple(canonical(a + b, shape.k) for a, b in zip(x, y))


def all_nodes(shape: TorusShape) -> Iterator[Coord]:
    """Every node in lexicographic order of centered coordinates."""
    return itertools.product(shape.centered_values(), repeat=shape.n)


def sphere(shape: TorusShape, t: int) -> list[Coord]:
    """Nodes at distance exactly ``t`` from the reference, lexicographically sorted."""
    if not 0 <= t <= diameter(shape):
        raise ValueError(f"distance {t} outside 0..{diameter(shape)}")
    values = list(shape.centered_values())
    half = shape.half
    out: list[Coord] = []

    def extend(prefix: list[int], remaining: int, axes_left: int) -> None:
        if axes_left == 0:
            if remaining == 0:
                out.append(tuple(prefix))
            return
        for c in values:
            r = remaining - abs(c)
            if 0 <= r <= half * (axes_left - 1):
                prefix.append(c)
                extend(prefix, r, axes_left - 1)
                prefix.pop()

    extend([], t, shape.n)
    return out


def class_of(x: Sequence[int], shape: TorusShape) -> ClassKey:
    """(t, p, v) class of a node.

    The reference node gets the degenerate key ``(0, n, 0)``; tables of
    classes leave it out.
    """
    dists = [ring_distance(c, 0, shape.k) for c in node(x, shape)]
    v = min(dists)
    return ClassKey(sum(dists), dists.count(v), v)


def to_index(x: Sequence[int], shape: TorusShape) -> int:
    """Mixed-radix index of a node, using standard coordinates ``0..k-1``."""
    index = 0
    for c in x:
        index = index * shape.k + c % shape.k
    return index


def from_index(index: int, shape: TorusShape) -> Coord:
    digits = []
    for _ in range(shape.n):
        index, r = divmod(index, shape.k)
        digits.append(canonical(r, shape.k))
    return tuple(reversed(digits))
