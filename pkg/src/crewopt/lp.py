"""Restricted master LP: primal covering relaxation and its flight-price dual.

Both solves go through HiGHS dual simplex, which returns vertex solutions
whose KKT residuals on integer-cent data sit far below the contract
tolerances.  Every solve self-checks its contract (coverage feasibility,
0 <= x <= 1, dual feasibility, strong duality) and records the outcome in a
module-level registry that the acceptance suite inspects.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .model import CoverageError, Money, Pairing

SUPPORT_TOLERANCE = 1e-9
FEAS_TOL = 1e-7
DUALITY_REL_TOL = 1e-6


class LpSolveError(RuntimeError):
    """The underlying solver failed to return an optimal solution."""


class LpContractError(AssertionError):
    """A solved LP violated one of its stated output contracts."""


@dataclass
class ContractStats:
    solves: int = 0
    violations: dict = field(default_factory=dict)

    def record(self, name: str) -> None:
        self.violations[name] = self.violations.get(name, 0) + 1

    @property
    def total_violations(self) -> int:
        return sum(self.violations.values())

    def reset(self) -> None:
        self.solves = 0
        self.violations = {}


CONTRACT_STATS = ContractStats()


@dataclass(frozen=True)
class PrimalSolution:
    """Optimal x for the covering relaxation, plus its positive support."""

    x: np.ndarray
    objective: float  # cents
    support_indices: tuple[int, ...]
    support: tuple[Pairing, ...]
    support_x: tuple[float, ...]


@dataclass(frozen=True)
class DualSolution:
    """Flight dual prices y (y[i-1] prices flight i) and the dual objective."""

    y: np.ndarray
    objective: float  # cents

    def price(self, flight_id: int) -> float:
        return float(self.y[flight_id - 1])


def effective_cost(pairing: Pairing, deadhead_penalty: Money) -> int:
    """Column cost in the deadhead-expanded objective: c_j plus the penalty
    paid once per covered flight."""
    return pairing.cost + deadhead_penalty * pairing.num_flights


def _coverage_matrix(pairings: Sequence[Pairing], num_flights: int) -> sparse.csr_matrix:
    rows, cols = [], []
    for j, p in enumerate(pairings):
        for fid in p.flight_ids:
            rows.append(fid - 1)
            cols.append(j)
    data = np.ones(len(rows))
    return sparse.csr_matrix((data, (rows, cols)),
                             shape=(num_flights, len(pairings)))


def solve_primal(pairings: Sequence[Pairing], num_flights: int,
                 deadhead_penalty: Money) -> PrimalSolution:
    """Minimize sum((c_j + psi*|a_j|) x_j) - F*psi  s.t.  A x >= 1, x >= 0.

    The input must jointly cover all flights (the restricted master is kept
    feasible by construction); otherwise CoverageError is raised.
    """
    if not pairings:
        raise CoverageError(list(range(1, num_flights + 1)))
    covered: set[int] = set()
    for p in pairings:
        covered.update(p.flight_ids)
    missing = [i for i in range(1, num_flights + 1) if i not in covered]
    if missing:
        raise CoverageError(missing)

    A = _coverage_matrix(pairings, num_flights)
    c = np.array([effective_cost(p, deadhead_penalty) for p in pairings],
                 dtype=float)
    res = linprog(c, A_ub=-A, b_ub=-np.ones(num_flights),
                  bounds=(0, None), method="highs-ds")
    if res.status != 0:
        raise LpSolveError(f"primal solve failed: {res.message}")
    x = np.maximum(res.x, 0.0)
    objective = float(c @ x) - float(num_flights * deadhead_penalty)

    CONTRACT_STATS.solves += 1
    coverage = A @ x
    if coverage.min() < 1.0 - FEAS_TOL:
        CONTRACT_STATS.record("coverage")
        raise LpContractError(f"coverage violated: min {coverage.min()}")
    if x.max() > 1.0 + FEAS_TOL:
        CONTRACT_STATS.record("box")
        raise LpContractError(f"x exceeds 1: max {x.max()}")

    support_idx = tuple(int(j) for j in np.flatnonzero(x > SUPPORT_TOLERANCE))
    return PrimalSolution(
        x=x,
        objective=objective,
        support_indices=support_idx,
        support=tuple(pairings[j] for j in support_idx),
        support_x=tuple(float(x[j]) for j in support_idx),
    )


def solve_dual(support: Sequence[Pairing], num_flights: int,
               deadhead_penalty: Money,
               primal_objective: Optional[float] = None) -> DualSolution:
    """Maximize sum(y_i) - F*psi over the dual constraints of the support
    columns only, mirroring the primal/dual two-solve structure.

    When ``primal_objective`` is supplied, strong duality is asserted.
    """
    if num_flights < 1:
        raise ValueError("num_flights must be >= 1")
    if not support:
        raise ValueError("support must not be empty")
    covered: set[int] = set()
    for p in support:
        covered.update(p.flight_ids)
    missing = [i for i in range(1, num_flights + 1) if i not in covered]
    if missing:
        # An uncovered flight would make its dual price unbounded.
        raise CoverageError(missing)

    A = _coverage_matrix(support, num_flights)
    rhs = np.array([effective_cost(p, deadhead_penalty) for p in support],
                   dtype=float)
    res = linprog(-np.ones(num_flights), A_ub=A.T.tocsr(), b_ub=rhs,
                  bounds=(0, None), method="highs-ds")
    if res.status != 0:
        raise LpSolveError(f"dual solve failed: {res.message}")
    y = np.maximum(res.x, 0.0)
    objective = float(y.sum()) - float(num_flights * deadhead_penalty)

    CONTRACT_STATS.solves += 1
    slack = A.T @ y - rhs
    if slack.max() > FEAS_TOL:
        CONTRACT_STATS.record("dual-feasibility")
        raise LpContractError(f"dual infeasible on support: {slack.max()}")
    if primal_objective is not None:
        gap = abs(objective - primal_objective)
        if gap > DUALITY_REL_TOL * max(1.0, abs(primal_objective)):
            CONTRACT_STATS.record("strong-duality")
            raise LpContractError(
                f"duality gap {gap} between Z_d={objective} and Z_p={primal_objective}")
    return DualSolution(y=y, objective=objective)
