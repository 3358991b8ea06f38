"""Exact reference solvers for small instances.

Used by the test suite to anchor solver outcomes: a structure-aware
optimizer for the meeting-scheduling shape and a full enumerator as the
independent cross-check.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from udcop.model import Instance, solution_cost

DEFAULT_ENUM_LIMIT = 10 ** 6


class SearchSpaceError(ValueError):
    """The assignment space exceeds the enumeration limit."""


@dataclass(frozen=True)
class OracleResult:
    assignment: tuple[int, ...]
    cost: float


def exact_optimum_dms(inst: Instance) -> OracleResult:
    """Optimum over all-equal assignments: argmin_v Σ_i unary_i(v), ties
    toward the smallest value. O(n*d)."""
    common = set(inst.domains[0])
    for dom in inst.domains[1:]:
        common &= set(dom)
    if not common:
        raise ValueError("agents share no common value; no all-equal assignment exists")
    best_v = None
    best_cost = math.inf
    for v in sorted(common):
        cost = sum(inst.unary_cost(i, v) for i in range(inst.n))
        if cost < best_cost:
            best_v, best_cost = v, cost
    return OracleResult(assignment=(best_v,) * inst.n, cost=best_cost)


def exact_optimum_enum(inst: Instance, limit: int = DEFAULT_ENUM_LIMIT) -> OracleResult:
    """Optimum by full enumeration of the assignment space.

    Iterates domains in ascending order and keeps the first strict
    improvement, so ties resolve to the lexicographically smallest
    optimal assignment.
    """
    size = 1
    for dom in inst.domains:
        size *= len(dom)
        if size > limit:
            raise SearchSpaceError(
                f"assignment space exceeds the limit of {limit} (≥ {size})")
    best: tuple[int, ...] | None = None
    best_cost = math.inf
    for assignment in itertools.product(*(sorted(dom) for dom in inst.domains)):
        cost = solution_cost(inst, assignment)
        if cost < best_cost:
            best, best_cost = assignment, cost
    return OracleResult(assignment=best, cost=best_cost)
