"""Acceptance suite.  Run ``pytest tests/test_acceptance.py`` to get one
PASS/FAIL line per criterion in the terminal summary."""

import time
from math import factorial

import pytest

from torus_a2a import numtheory as nt
from torus_a2a.cli import EXIT_BUDGET, EXIT_NEGATIVE, EXIT_OK, EXIT_USAGE, main
from torus_a2a.counting import class_count_factored, class_table_factored, class_table_oracle, n_quadrant
from torus_a2a.feasibility import cross_validate
from torus_a2a.schedule import InfeasibleWitness, RoutingTree, build_balanced_tree, verify_schedule
from torus_a2a.schedule_io import dumps_schedule, loads_schedule
from torus_a2a.torus import ClassKey, TorusShape

GRID_BUDGET = 10**5
GRID = [TorusShape(k, n) for k in range(3, 10) for n in range(1, 9) if k**n <= GRID_BUDGET]
SCHEDULE_GRID = [s for s in GRID if s.node_count <= 10**4]
CRITERION_8 = "byte-stable schedule round trip and the CLI exit-code matrix"
FEASIBLE_SCHEDULES = {(3, 1), (5, 1), (7, 1), (9, 1), (3, 2), (5, 2), (7, 2), (9, 2), (3, 4), (5, 4), (7, 4), (3, 8), (9, 4)}


def exact_valuation(q, m):
    e = 0
    while m % q == 0:
        m //= q
        e += 1
    return e


@pytest.mark.criterion(1, "feasibility grid: three predicates agree, feasible set is odd k x {1,2,4,8}")
def test_criterion_1_grid():
    start = time.perf_counter()
    grid = cross_validate(range(3, 10), range(1, 9), node_budget=GRID_BUDGET)
    elapsed = time.perf_counter() - start
    assert [row.shape for row in grid.rows] == GRID
    assert all(row.enumerated for row in grid.rows)
    assert grid.disagreements == []
    expected = sorted((s.k, s.n) for s in GRID if s.k % 2 == 1 and s.n in (1, 2, 4, 8))
    assert grid.feasible_cells() == expected
    assert elapsed < 60


@pytest.mark.criterion(2, "factored class counts equal enumerated counts on the whole grid")
def test_criterion_2_factorization():
    for shape in GRID:
        oracle = class_table_oracle(shape)
        for key, count in oracle.entries.items():
            assert class_count_factored(shape, key) == count, (shape, key)
        assert class_table_factored(shape).entries == oracle.entries, shape


@pytest.mark.criterion(3, "sequence prefix sums and the q=3 listings s0..s3")
def test_criterion_3_sequence():
    start = time.perf_counter()
    assert nt.s_sequence(3, 0) == [1]
    assert nt.s_sequence(3, 1) == [1, 1, 2]
    assert nt.s_sequence(3, 2) == [1, 1, 2, 1, 1, 2, 1, 1, 3]
    assert nt.s_sequence(3, 3) == [int(c) for c in "112112113112112113112112114"]
    for q in (2, 3, 5):
        for r in range(0, 5):
            seq = nt.s_sequence(q, r)
            assert len(seq) == q**r
            prefix = 0
            for m in range(1, q**r + 1):
                prefix += seq[m - 1]
                assert prefix == sum(m // q**i for i in range(r + 1))
                assert prefix == nt.s_partial_sum(q, m)
    assert time.perf_counter() - start < 1


@pytest.mark.criterion(4, "factorial valuation equals the exponent in exact p!")
def test_criterion_4_legendre():
    start = time.perf_counter()
    for q in (2, 3, 5, 7, 11, 13):
        for p in range(0, 301):
            assert nt.valuation_factorial(q, p) == exact_valuation(q, factorial(p)), (q, p)
    assert time.perf_counter() - start < 5


@pytest.mark.criterion(5, "carries equal binomial valuations; borrows counted over every digit")
def test_criterion_5_kummer():
    for q in (2, 3, 5, 7):
        for n in range(0, 301):
            for p in range(0, n + 1):
                assert nt.carries_in_addition(p, n - p, q) == nt.valuation(q, nt.binomial(n, p)), (q, n, p)
    assert nt.floor_sum(6, 3) == 2
    assert nt.floor_sum_by_digits(10, 4, 3) == 2
    top_of_p = len(nt.digits(4, 3)) - 1
    assert nt.floor_sum_by_digits(10, 4, 3, max_position=top_of_p) == 3


@pytest.mark.criterion(6, "free-axis count is 1 at the smallest distance of every odd-k class")
def test_criterion_6_smallest_distance_count():
    checked = 0
    for shape in GRID:
        if shape.k % 2 == 0:
            continue
        for p in range(1, shape.n + 1):
            for v in range(0, shape.half + 1):
                t = shape.n * (v + 1) - p
                if t <= shape.diameter:
                    assert n_quadrant(shape, ClassKey(t, p, v)) == 1, (shape, p, v)
                    checked += 1
    assert checked > 0


@pytest.mark.criterion(7, "balanced schedules on every feasible shape, witnesses elsewhere")
def test_criterion_7_construction():
    start = time.perf_counter()
    built = set()
    for shape in SCHEDULE_GRID:
        result = build_balanced_tree(shape)
        if shape.k % 2 == 1 and shape.n in (1, 2, 4, 8):
            assert isinstance(result, RoutingTree), shape
            report = verify_schedule(shape, result)
            assert report.nodup_ok and report.shortest_ok and report.balance_ok, shape
            assert report.steps == shape.n * (shape.k // 2), shape
            built.add((shape.k, shape.n))
        else:
            assert isinstance(result, InfeasibleWitness), shape
    assert built == FEASIBLE_SCHEDULES
    assert time.perf_counter() - start < 120


@pytest.mark.criterion(8, CRITERION_8)
def test_criterion_8_determinism(tmp_path, capsys):
    for k, n in [(5, 2), (3, 4), (7, 2)]:
        shape = TorusShape(k, n)
        first, second = tmp_path / f"a{k}{n}.json", tmp_path / f"b{k}{n}.json"
        assert main(["schedule", str(k), str(n), "--out", str(first), "--format", "json"]) == EXIT_OK
        assert main(["schedule", str(k), str(n), "--out", str(second), "--format", "json"]) == EXIT_OK
        text = first.read_bytes()
        assert text == second.read_bytes()
        tree = loads_schedule(text.decode())
        assert tree == build_balanced_tree(shape)
        assert dumps_schedule(tree).encode() == text
        assert main(["verify", str(first)]) == EXIT_OK
    capsys.readouterr()


@pytest.mark.criterion(8, CRITERION_8)
def test_criterion_8_exit_codes(tmp_path, capsys):
    sched = tmp_path / "s.json"
    assert main(["feasible", "5", "2"]) == EXIT_OK
    assert main(["feasible", "4", "2", "--format", "json"]) == EXIT_NEGATIVE
    assert main(["feasible", "2", "3"]) == EXIT_USAGE
    assert main(["classes", "5", "2", "--format", "csv"]) == EXIT_OK
    assert main(["classes", "4", "2"]) == EXIT_OK
    assert main(["classes", "9", "8", "--max-nodes", "1000"]) == EXIT_BUDGET
    assert main(["schedule", "5", "2", "--out", str(sched)]) == EXIT_OK
    assert main(["verify", str(sched), "--format", "json"]) == EXIT_OK
    assert '"loads": [1, 2, 2, 1]' in capsys.readouterr().out
    assert main(["schedule", "3", "3", "--out", str(tmp_path / "x.json")]) == EXIT_NEGATIVE
    lines = sched.read_text().splitlines()
    del lines[7]
    broken = tmp_path / "broken.json"
    broken.write_text("\n".join(lines) + "\n")
    assert main(["verify", str(broken)]) == EXIT_USAGE
    assert "missing offset" in capsys.readouterr().err
    assert main(["scan", "--k", "5..5", "--n", "2..2"]) == EXIT_OK
    assert main(["scan", "--k", "3..9", "--n", "1..8", "--max-nodes", "100000", "--format", "csv"]) == EXIT_OK
    assert main(["scan", "--k", "9..9", "--n", "8..8", "--max-nodes", "10", "--format", "csv"]) == EXIT_OK
    assert capsys.readouterr().out.endswith("k,n,nodes,brute,analytic,theorem,first_witness\n")
    assert main(["numtheory", "seq", "3", "2"]) == EXIT_OK
    assert main(["numtheory", "legendre", "3", "9"]) == EXIT_OK
    assert main(["numtheory", "carries", "3", "4", "6"]) == EXIT_OK
    assert capsys.readouterr().out == "1 1 2 1 1 2 1 1 3\n4\ncarries=1 valuation=1\n"
    assert main(["numtheory", "carries", "4", "4", "6"]) == EXIT_USAGE
