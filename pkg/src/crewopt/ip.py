"""Best-first branch-and-bound integerization over a fixed pairing pool.

Node relaxations reuse the covering LP; branching fixes the most fractional
column in or out.  The search keeps an exact integer incumbent (seeded by a
greedy cover so a solution exists even at a zero time limit) and terminates
either when the bound gap closes or at the time limit.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .legalgen import build_duty_graph, enumerate_all_pairings, enumerate_duties
from .lp import LpSolveError, effective_cost
from .model import (
    CostModel,
    CoverageError,
    FlightNetwork,
    Money,
    Pairing,
    RuleSet,
    Solution,
)

INTEGRALITY_TOL = 1e-6
BOUND_TOL = 1e-6
STATUS_OPTIMAL = "optimal"
STATUS_TIME_LIMITED = "time_limited"


@dataclass(frozen=True)
class IntegerizeResult:
    solution: Solution
    status: str
    lp_bound: float  # root relaxation value, cents


def integerize(pairings: Sequence[Pairing], num_flights: int,
               deadhead_penalty: Money,
               time_limit_s: Optional[float] = None) -> IntegerizeResult:
    """Minimize pairing costs plus deadhead penalties over 0/1 selections
    covering every flight.

    Returns the incumbent solution, whether the search proved optimality
    before the time limit, and the root LP bound.
    """
    deadline = None if time_limit_s is None else time.monotonic() + time_limit_s
    pool = _canonical_pool(pairings)
    flight_sets = [p.flight_set for p in pool]
    covered_all: set[int] = set().union(*flight_sets) if flight_sets else set()
    missing = [i for i in range(1, num_flights + 1) if i not in covered_all]
    if missing:
        raise CoverageError(missing)

    costs = np.array([effective_cost(p, deadhead_penalty) for p in pool],
                     dtype=float)
    A = _matrix(pool, num_flights)
    constant = float(num_flights * deadhead_penalty)

    incumbent_idx = _greedy_cover(pool, flight_sets, costs, num_flights)
    incumbent_obj = _exact_objective(pool, incumbent_idx, num_flights,
                                     deadhead_penalty)

    root = _node_relaxation(A, costs, frozenset(), frozenset(),
                            num_flights, len(pool))
    if root is None:
        raise LpSolveError("root relaxation infeasible despite coverage")
    root_bound = root[0] - constant
    lp_bound = root_bound

    status = STATUS_OPTIMAL
    heap: list = []
    counter = 0
    heapq.heappush(heap, (root_bound, counter, frozenset(), frozenset(), root))

    while heap:
        if deadline is not None and time.monotonic() >= deadline:
            status = STATUS_TIME_LIMITED
            break
        bound, _, fixed_in, fixed_out, relax = heapq.heappop(heap)
        if bound >= incumbent_obj - BOUND_TOL:
            break  # best-first: every open node is at least as bad
        obj_free, x, free = relax
        branch_j = _most_fractional(x, free, pool)
        if branch_j is None:
            chosen = sorted(fixed_in | {j for xj, j in zip(x, free) if xj > 0.5})
            value = _exact_objective(pool, chosen, num_flights, deadhead_penalty)
            if value < incumbent_obj:
                incumbent_obj, incumbent_idx = value, chosen
            continue
        for child_in, child_out in (
            (fixed_in | {branch_j}, fixed_out),
            (fixed_in, fixed_out | {branch_j}),
        ):
            child = _node_relaxation(A, costs, child_in, child_out,
                                     num_flights, len(pool))
            if child is None:
                continue
            child_bound = child[0] - constant
            if child_bound >= incumbent_obj - BOUND_TOL:
                continue
            counter += 1
            heapq.heappush(heap, (child_bound, counter, child_in,
                                  child_out, child))

    solution = _assemble(pool, incumbent_idx, num_flights, deadhead_penalty)
    return IntegerizeResult(solution=solution, status=status, lp_bound=lp_bound)


def exact_small_oracle(network: FlightNetwork, rules: RuleSet, model: CostModel,
                       deadhead_penalty: Money,
                       guard_pairings: int = 50_000) -> Solution:
    """Exhaustive optimum for desk-sized instances: enumerate every legal
    pairing, then integerize without a time limit.

    Refuses when enumeration exceeds the guard; raises CoverageError when the
    network admits no legal cover.
    """
    duty_set = enumerate_duties(network, rules)
    graph = build_duty_graph(duty_set, rules)
    pool = enumerate_all_pairings(duty_set, graph, network, rules, model,
                                  cap=guard_pairings + 1)
    if len(pool) > guard_pairings:
        raise RuntimeError(
            f"instance too large for the exact oracle (> {guard_pairings} pairings)")
    result = integerize(pool, network.num_flights, deadhead_penalty,
                        time_limit_s=None)
    if result.status != STATUS_OPTIMAL:
        raise RuntimeError("exact oracle did not terminate optimally")
    return result.solution


def _canonical_pool(pairings: Sequence[Pairing]) -> list[Pairing]:
    unique = {p.signature: p for p in pairings}
    return [unique[s] for s in sorted(unique)]


def _matrix(pool: Sequence[Pairing], num_flights: int) -> sparse.csc_matrix:
    rows, cols = [], []
    for j, p in enumerate(pool):
        for fid in p.flight_ids:
            rows.append(fid - 1)
            cols.append(j)
    return sparse.csc_matrix((np.ones(len(rows)), (rows, cols)),
                             shape=(num_flights, len(pool)))


def _greedy_cover(pool, flight_sets, costs, num_flights) -> list[int]:
    """Deterministic cost-effectiveness greedy cover; the initial incumbent."""
    uncovered = set(range(1, num_flights + 1))
    chosen: list[int] = []
    while uncovered:
        best_j, best_key = None, None
        for j, fs in enumerate(flight_sets):
            gain = len(fs & uncovered)
            if gain == 0:
                continue
            key = (costs[j] / gain, pool[j].signature)
            if best_key is None or key < best_key:
                best_j, best_key = j, key
        if best_j is None:
            raise CoverageError(sorted(uncovered))
        chosen.append(best_j)
        uncovered -= flight_sets[best_j]
    return sorted(chosen)


def _node_relaxation(A, costs, fixed_in, fixed_out, num_flights, pool_size):
    """LP over the free columns and still-uncovered rows.

    Returns (objective incl. fixed columns, x over free, free indices) or
    None when infeasible.
    """
    free = [j for j in range(pool_size)
            if j not in fixed_in and j not in fixed_out]
    covered_rows = set()
    for j in fixed_in:
        covered_rows.update(A.indices[A.indptr[j]:A.indptr[j + 1]])
    rows = [i for i in range(num_flights) if i not in covered_rows]
    fixed_cost = float(sum(costs[j] for j in fixed_in))
    if not rows:
        return fixed_cost, np.zeros(len(free)), free
    sub = A[:, free][rows, :] if free else None
    if sub is None or sub.shape[1] == 0:
        return None
    res = linprog(costs[free], A_ub=-sub.tocsr(), b_ub=-np.ones(len(rows)),
                  bounds=(0, None), method="highs-ds")
    if res.status == 2:
        return None
    if res.status != 0:
        raise LpSolveError(f"node relaxation failed: {res.message}")
    x = np.maximum(res.x, 0.0)
    return fixed_cost + float(costs[free] @ x), x, free


def _most_fractional(x, free, pool) -> Optional[int]:
    best_j, best_key = None, None
    for xj, j in zip(x, free):
        if xj <= INTEGRALITY_TOL or xj >= 1.0 - INTEGRALITY_TOL:
            continue
        key = (abs(xj - 0.5), pool[j].signature)
        if best_key is None or key < best_key:
            best_j, best_key = j, key
    return best_j


def _exact_objective(pool, chosen, num_flights, deadhead_penalty) -> int:
    coverage = 0
    for j in chosen:
        coverage += pool[j].num_flights
    return (sum(pool[j].cost for j in chosen)
            + deadhead_penalty * (coverage - num_flights))


def _assemble(pool, chosen, num_flights, deadhead_penalty) -> Solution:
    selected = [pool[j] for j in chosen]
    coverage: dict[int, int] = {}
    for p in selected:
        for fid in p.flight_ids:
            coverage[fid] = coverage.get(fid, 0) + 1
    deadheads = sum(coverage.values()) - num_flights
    objective = sum(p.cost for p in selected) + deadhead_penalty * deadheads
    return Solution(
        pairings=tuple(sorted(selected, key=lambda p: p.signature)),
        objective=objective,
        deadheads=deadheads,
        coverage=coverage,
    )
