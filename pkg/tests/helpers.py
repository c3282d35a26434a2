"""Independent brute-force oracles shared by the test suite.

These deliberately avoid the production enumeration/pricing code paths:
pairings come from bitmask subset enumeration filtered by the legality
validator, LP optima from vertex enumeration, IP optima from subset
enumeration.
"""

from itertools import combinations

import numpy as np

from crewopt.model import validate_pairing


def brute_force_pairings(network, rules, model):
    """Every legal pairing, by checking each time-ordered flight subset.

    Legal sequences are strictly departure-ordered (gaps are non-negative and
    flights have positive duration), so subsets in canonical order cover the
    whole sequence space.
    """
    flights = network.flights  # already sorted by (departure, id)
    n = len(flights)
    found = {}
    for base in network.crew_bases:
        for mask in range(1, 1 << n):
            candidate = [flights[k].id for k in range(n) if mask >> k & 1]
            verdict = validate_pairing(candidate, base, network, rules, model)
            if verdict.ok:
                found[verdict.pairing.signature] = verdict.pairing
    return found


def brute_force_lp(columns, num_flights):
    """Exact covering-LP optimum by enumerating polyhedron vertices.

    columns: list of (cost, flight_id_set).  Solves
    min c.x s.t. sum_j a_ij x_j >= 1, x >= 0 by trying every choice of
    n active constraints among the coverage rows and nonnegativity bounds.
    Only practical for a handful of columns.
    """
    n = len(columns)
    rows = []
    for i in range(1, num_flights + 1):
        rows.append(("cover", np.array([1.0 if i in c[1] else 0.0 for c in columns]), 1.0))
    for j in range(n):
        bound = np.zeros(n)
        bound[j] = 1.0
        rows.append(("bound", bound, 0.0))
    c = np.array([float(col[0]) for col in columns])

    best_val, best_x = None, None
    for combo in combinations(range(len(rows)), n):
        A = np.array([rows[k][1] for k in combo])
        b = np.array([rows[k][2] for k in combo])
        if abs(np.linalg.det(A)) < 1e-9:
            continue
        x = np.linalg.solve(A, b)
        if (x < -1e-9).any():
            continue
        cover = np.array([rows[k][1] for k in range(num_flights)])
        if (cover @ x < 1.0 - 1e-9).any():
            continue
        val = float(c @ x)
        if best_val is None or val < best_val - 1e-9:
            best_val, best_x = val, x
    return best_val, best_x


def brute_force_ip(pairings, num_flights, deadhead_penalty):
    """Exact set-covering IP optimum by enumerating all column subsets."""
    best_val, best_subset = None, None
    n = len(pairings)
    for mask in range(1, 1 << n):
        chosen = [pairings[j] for j in range(n) if mask >> j & 1]
        covered = {}
        for p in chosen:
            for fid in p.flight_ids:
                covered[fid] = covered.get(fid, 0) + 1
        if len(covered) < num_flights:
            continue
        deadheads = sum(covered.values()) - num_flights
        val = sum(p.cost for p in chosen) + deadhead_penalty * deadheads
        if best_val is None or val < best_val:
            best_val, best_subset = val, chosen
    return best_val, best_subset
