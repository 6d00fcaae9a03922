"""Optimal all-port all-to-all broadcast on k-ary n-dimensional tori."""

from .counting import ClassTable, class_count_factored, class_table_factored, class_table_oracle, n_quadrant
from .feasibility import FeasibilityReport, analytic_feasible, cross_validate, divisibility_report, theorem_predicate
from .schedule import RoutingTree, build_balanced_tree, link_loads, simulate, verify_schedule
from .torus import ClassKey, Direction, TorusShape, class_of, diameter, distance, neighbors, sphere

__all__ = [
    "ClassKey",
    "ClassTable",
    "Direction",
    "FeasibilityReport",
    "RoutingTree",
    "TorusShape",
    "analytic_feasible",
    "build_balanced_tree",
    "class_count_factored",
    "class_of",
    "class_table_factored",
    "class_table_oracle",
    "cross_validate",
    "diameter",
    "distance",
    "divisibility_report",
    "link_loads",
    "n_quadrant",
    "neighbors",
    "simulate",
    "sphere",
    "theorem_predicate",
    "verify_schedule",
]
