from collections import deque
from itertools import product

import pytest
from hypothesis import given, strategies as st

from torus_a2a.torus import (
    ClassKey,
    Direction,
    ShapeError,
    TorusShape,
    all_nodes,
    canonical,
    class_of,
    diameter,
    directions,
    distance,
    from_index,
    neighbors,
    node,
    norm,
    ring_distance,
    sphere,
    to_index,
)

SMALL_SHAPES = [TorusShape(k, n) for k in range(3, 11) for n in range(1, 9) if k**n <= 10**4]


@st.composite
def shape_and_nodes(draw, count=2):
    k = draw(st.integers(3, 9))
    n = draw(st.integers(1, 4))
    shape = TorusShape(k, n)
    coords = st.lists(st.integers(0, k - 1), min_size=n, max_size=n).map(lambda c: node(c, shape))
    return (shape, *[draw(coords) for _ in range(count)])


@pytest.mark.parametrize("k,n", [(2, 3), (1, 1), (0, 2), (5, 0), (3, -1)])
def test_shape_rejects_degenerate(k, n):
    with pytest.raises(ShapeError):
        TorusShape(k, n)


def test_shape_rejects_overflow_and_non_integers():
    with pytest.raises(ShapeError):
        TorusShape(10, 19)
    with pytest.raises(ShapeError):
        TorusShape(5.0, 2)
    with pytest.raises(ShapeError):
        TorusShape(True, 2)
    assert TorusShape(10, 18).node_count == 10**18


@pytest.mark.parametrize("a,b,k,expected", [(0, 4, 5, 1), (0, 2, 5, 2), (1, 3, 4, 2)])
def test_ring_distance(a, b, k, expected):
    assert ring_distance(a, b, k) == expected
    assert ring_distance(b, a, k) == expected


def test_distance_examples():
    s = TorusShape(5, 2)
    assert distance((0, 0), (2, 2), s) == 4
    assert distance((0, 0), node((3, 3), s), s) == 4
    assert distance((0, 0), (3, 3), s) == 4
    assert distance((1, -2), (1, -2), s) == 0
    with pytest.raises(ShapeError):
        distance((0, 0), (0, 0, 0), s)


@pytest.mark.parametrize("k,n,expected", [(5, 3, 6), (4, 2, 4), (3, 1, 1)])
def test_diameter(k, n, expected):
    shape = TorusShape(k, n)
    assert diameter(shape) == expected
    assert max(norm(x, shape) for x in all_nodes(shape)) == expected


def test_neighbors_examples():
    assert neighbors((0, 0), TorusShape(5, 2)) == {(1, 0), (-1, 0), (0, 1), (0, -1)}
    # (2,0) on the 4-ring: +1 wraps to 3 = -1
    assert neighbors((2, 0), TorusShape(4, 2)) == {(1, 0), (-1, 0), (2, 1), (2, -1)}


def test_neighbors_match_standard_adjacency():
    # oracle: differ by +-1 mod k in exactly one standard digit
    shape = TorusShape(4, 2)
    std = list(product(range(4), repeat=2))
    for x in std:
        expect = {
            node(y, shape)
            for y in std
            if sum((a - b) % 4 != 0 for a, b in zip(x, y)) == 1
            and all((a - b) % 4 in (0, 1, 3) for a, b in zip(x, y))
        }
        assert neighbors(node(x, shape), shape) == expect


@pytest.mark.parametrize("shape", [s for s in SMALL_SHAPES if s.node_count <= 2000], ids=str)
def test_neighbors_degree_and_symmetry(shape):
    for x in all_nodes(shape):
        nb = neighbors(x, shape)
        assert len(nb) == 2 * shape.n
        for y in nb:
            assert distance(x, y, shape) == 1
            assert x in neighbors(y, shape)


def _bfs(shape, source):
    seen = {source: 0}
    queue = deque([source])
    while queue:
        x = queue.popleft()
        for y in neighbors(x, shape):
            if y not in seen:
                seen[y] = seen[x] + 1
                queue.append(y)
    return seen


@pytest.mark.parametrize("shape", SMALL_SHAPES, ids=str)
def test_distance_equals_bfs_hops(shape):
    hops = _bfs(shape, shape.reference)
    assert len(hops) == shape.node_count
    for x, h in hops.items():
        assert distance(shape.reference, x, shape) == h <= diameter(shape)


@pytest.mark.parametrize("shape", [s for s in SMALL_SHAPES if s.node_count <= 128], ids=str)
def test_distance_equals_bfs_all_pairs(shape):
    for x in all_nodes(shape):
        hops = _bfs(shape, x)
        for y, h in hops.items():
            assert distance(x, y, shape) == h


@given(shape_and_nodes(count=3))
def test_distance_is_a_metric(data):
    shape, x, y, z = data
    assert distance(x, y, shape) == distance(y, x, shape)
    assert (distance(x, y, shape) == 0) == (x == y)
    assert distance(x, z, shape) <= distance(x, y, shape) + distance(y, z, shape)
    assert distance(x, y, shape) <= diameter(shape)


def test_sphere_examples():
    s = TorusShape(5, 2)
    assert len(sphere(s, 1)) == 4
    assert sphere(s, 4) == [(-2, -2), (-2, 2), (2, -2), (2, 2)]
    with pytest.raises(ValueError):
        sphere(s, 5)
    with pytest.raises(ValueError):
        sphere(s, -1)


@pytest.mark.parametrize("shape", SMALL_SHAPES, ids=str)
def test_spheres_partition_nodes(shape):
    by_distance = {}
    for x in all_nodes(shape):
        by_distance.setdefault(norm(x, shape), []).append(x)
    spheres = [sphere(shape, t) for t in range(diameter(shape) + 1)]
    assert sum(map(len, spheres)) == shape.node_count
    for t, members in enumerate(spheres):
        assert members == sorted(by_distance[t])


def test_class_of_examples():
    s = TorusShape(5, 2)
    assert class_of((2, 1), s) == ClassKey(3, 1, 1)
    assert class_of((1, 1), s) == ClassKey(2, 2, 1)
    for k in (3, 5, 7, 9):
        assert class_of((1, 0), TorusShape(k, 2)) == ClassKey(1, 1, 0)
    assert class_of((0, 0), s) == ClassKey(0, 2, 0)


@pytest.mark.parametrize("shape", [s for s in SMALL_SHAPES if s.node_count <= 5000], ids=str)
def test_class_cells_partition_non_reference_nodes(shape):
    cells = {}
    for x in all_nodes(shape):
        if any(x):
            key = class_of(x, shape)
            assert key.t == norm(x, shape)
            assert key.p * key.v + (shape.n - key.p) * (key.v + 1) <= key.t
            assert key.t <= key.p * key.v + (shape.n - key.p) * shape.half
            cells.setdefault(key, []).append(x)
    assert sum(map(len, cells.values())) == shape.node_count - 1


@pytest.mark.parametrize("k", range(3, 12))
def test_canonical_round_trip(k):
    shape = TorusShape(k, 1)
    seen = {}
    for std in range(k):
        for alias in (std, std - k, std + k):
            c = canonical(alias, k)
            assert c in shape.centered_values()
            seen.setdefault(std, set()).add(c)
    assert all(len(v) == 1 for v in seen.values())
    assert len({next(iter(v)) for v in seen.values()}) == k
    if k % 2 == 0:
        assert canonical(-k // 2, k) == k // 2


def test_index_round_trip():
    shape = TorusShape(4, 3)
    for i, x in enumerate(all_nodes(shape)):
        assert from_index(to_index(x, shape), shape) == x
    assert sorted(to_index(x, shape) for x in all_nodes(shape)) == list(range(64))


def test_directions():
    dirs = directions(TorusShape(5, 3))
    assert len(set(dirs)) == 6
    assert dirs[0] == Direction(1, -1)
