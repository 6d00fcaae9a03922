"""Three independent verdicts on whether a torus admits an optimal broadcast.

* brute force: every enumerated class count must be divisible by the 2n
  incoming links of a node;
* analytic: q-adic valuations of the factored counts at the extremal
  distances of each class, with no node enumeration;
* closed form: ``n`` a power of two and ``k`` odd.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from .counting import ENUMERATION_BUDGET, class_bounds, class_count_factored, class_table_oracle
from .numtheory import is_power_of_two, prime_factors, valuation
from .torus import ClassKey, TorusShape


@dataclass(frozen=True)
class DivisibilityWitness:
    key: ClassKey
    count: int
    divisor: int

    def __post_init__(self) -> None:
        if self.count % self.divisor == 0:
            raise ValueError(f"{self.divisor} divides {self.count}; not a witness")

    def to_dict(self) -> dict:
        return {"t": self.key.t, "p": self.key.p, "v": self.key.v, "count": self.count, "divisor": self.divisor}

    def __str__(self) -> str:
        t, p, v = self.key
        return f"t={t};p={p};v={v};count={self.count};divisor={self.divisor}"


@dataclass(frozen=True)
class AnalyticViolation:
    """A class whose factored count at ``key.t`` lacks a power of ``prime`` needed by 2n."""

    key: ClassKey
    prime: int
    have: int
    need: int


@dataclass
class FeasibilityReport:
    shape: TorusShape
    verdict_bruteforce: bool | None
    verdict_analytic: bool
    verdict_theorem: bool
    witnesses: list[DivisibilityWitness] = field(default_factory=list)

    @property
    def enumerated(self) -> bool:
        return self.verdict_bruteforce is not None

    @property
    def verdicts(self) -> list[bool]:
        out = [self.verdict_analytic, self.verdict_theorem]
        if self.enumerated:
            out.insert(0, self.verdict_bruteforce)
        return out

    @property
    def agree(self) -> bool:
        return len(set(self.verdicts)) == 1

    @property
    def feasible(self) -> bool:
        return all(self.verdicts)

    def to_dict(self) -> dict:
        return {
            "k": self.shape.k,
            "n": self.shape.n,
            "nodes": self.shape.node_count,
            "enumerated": self.enumerated,
            "brute": self.verdict_bruteforce,
            "analytic": self.verdict_analytic,
            "theorem": self.verdict_theorem,
            "agree": self.agree,
            "witnesses": [w.to_dict() for w in self.witnesses],
        }


def divisibility_witnesses(shape: TorusShape, budget: int = ENUMERATION_BUDGET) -> list[DivisibilityWitness]:
    """Every enumerated class whose count 2n does not divide, smallest key first."""
    table = class_table_oracle(shape, budget)
    divisor = shape.degree
    return [
        DivisibilityWitness(key, table.entries[key], divisor)
        for key in table.keys()
        if table.entries[key] % divisor
    ]


def analytic_violations(shape: TorusShape) -> list[AnalyticViolation]:
    """Valuation check of each nonempty (p, v) class at its two extremal distances.

    At the smallest distance every free axis sits at ``v+1`` and the weighted
    pattern count is minimal (1 for odd k); at the largest every free axis
    sits on the boundary, where even-k patterns lose their sign factor.
    """
    two_n = shape.degree
    needs = {q: valuation(q, two_n) for q in prime_factors(two_n)}
    out = []
    for p in range(1, shape.n + 1):
        for v in range(shape.half + 1):
            bounds = class_bounds(shape, p, v)
            if bounds is None:
                continue
            for t in sorted(set(bounds)):
                key = ClassKey(t, p, v)
                count = class_count_factored(shape, key)
                for q, need in needs.items():
                    have = valuation(q, count)
                    if have < need:
                        out.append(AnalyticViolation(key, q, have, need))
    return out


def analytic_feasible(shape: TorusShape) -> bool:
    return not analytic_violations(shape)


def theorem_predicate(shape: TorusShape) -> bool:
    return is_power_of_two(shape.n) and shape.k % 2 == 1


def divisibility_report(shape: TorusShape, budget: int = ENUMERATION_BUDGET) -> FeasibilityReport:
    """All three verdicts.  Beyond ``budget`` the brute-force verdict is None."""
    if shape.node_count <= budget:
        witnesses = divisibility_witnesses(shape, budget)
        brute: bool | None = not witnesses
    else:
        witnesses, brute = [], None
    return FeasibilityReport(
        shape=shape,
        verdict_bruteforce=brute,
        verdict_analytic=analytic_feasible(shape),
        verdict_theorem=theorem_predicate(shape),
        witnesses=witnesses,
    )


GRID_FIELDS = ["k", "n", "nodes", "brute", "analytic", "theorem", "first_witness"]


@dataclass
class GridReport:
    rows: list[FeasibilityReport]

    @property
    def disagreements(self) -> list[FeasibilityReport]:
        return [r for r in self.rows if not r.agree]

    @property
    def all_agree(self) -> bool:
        return not self.disagreements

    def feasible_cells(self) -> list[tuple[int, int]]:
        return [(r.shape.k, r.shape.n) for r in self.rows if r.feasible]

    def records(self) -> list[dict]:
        return [
            {
                "k": r.shape.k,
                "n": r.shape.n,
                "nodes": r.shape.node_count,
                "brute": r.verdict_bruteforce,
                "analytic": r.verdict_analytic,
                "theorem": r.verdict_theorem,
                "first_witness": str(r.witnesses[0]) if r.witnesses else "",
            }
            for r in self.rows
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=GRID_FIELDS, lineterminator="\n")
        writer.writeheader()
        for rec in self.records():
            writer.writerow({key: str(val).lower() if isinstance(val, bool) else val for key, val in rec.items()})
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(self.records(), sort_keys=True)


def cross_validate(k_range, n_range, node_budget: int = 10**5) -> GridReport:
    """Run the three predicates on every ``(k, n)`` with ``k**n <= node_budget``.

    Rows are sorted by ``(k, n)``.
    """
    rows = []
    for k in sorted(k_range):
        for n in sorted(n_range):
            if k**n > node_budget:
                continue
            rows.append(divisibility_report(TorusShape(k, n), node_budget))
    return GridReport(rows)

