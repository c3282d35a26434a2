"""Duty pre-enumeration, the overnight-connection graph, and pairing enumeration.

Duties are enumerated once per instance; pairings are then produced on demand
by depth-first extension over the duty graph, restricted to whatever duty or
flight subset a pricing strategy asks for.  All output orders are canonical
(duties by (start, signature), pairings by signature), so results do not
depend on traversal scheduling.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .model import (
    CostModel,
    Duty,
    FlightNetwork,
    Pairing,
    RuleSet,
    validate_pairing,
)

# Memory-safety cap per enumeration call; truncation happens in canonical
# DFS order before the final signature sort.
DEFAULT_PAIRING_CAP = 2_000_000


@dataclass(frozen=True)
class DutySet:
    """All legal duties of an instance, in canonical order."""

    duties: tuple[Duty, ...]
    by_base: dict[str, tuple[int, ...]]
    by_flight: dict[int, tuple[int, ...]]

    def __len__(self) -> int:
        return len(self.duties)


@dataclass(frozen=True)
class DutyGraph:
    """Edges (d1 -> d2) where d2 can follow d1 after a legal overnight rest."""

    successors: dict[int, tuple[int, ...]]


def enumerate_duties(network: FlightNetwork, rules: RuleSet) -> DutySet:
    """Enumerate every flight sequence that is a legal duty.

    A sequence qualifies when consecutive legs connect at the same airport
    with a sit inside [min_sit, max_sit], and the whole sequence respects the
    flights-per-duty, elapsed and flying limits.
    """
    flights = network.flights
    by_origin: dict[str, list[int]] = {}
    for idx, f in enumerate(flights):
        by_origin.setdefault(f.origin, []).append(idx)
    dep_times = {a: [flights[i].departure for i in idxs]
                 for a, idxs in by_origin.items()}

    def sit_successors(idx: int) -> list[int]:
        f = flights[idx]
        cands = by_origin.get(f.destination)
        if not cands:
            return []
        times = dep_times[f.destination]
        lo = bisect_left(times, f.arrival + rules.min_sit)
        hi = bisect_right(times, f.arrival + rules.max_sit)
        return cands[lo:hi]

    duties: list[Duty] = []

    def emit(seq: list[int], flying: int) -> None:
        first, last = flights[seq[0]], flights[seq[-1]]
        duties.append(Duty(
            flight_ids=tuple(flights[i].id for i in seq),
            start=first.departure - rules.briefing,
            end=last.arrival + rules.debriefing,
            flying=flying,
            origin=first.origin,
            destination=last.destination,
        ))

    def extend(seq: list[int], flying: int) -> None:
        emit(seq, flying)
        if len(seq) >= rules.max_flights_per_duty:
            return
        duty_start = flights[seq[0]].departure - rules.briefing
        for nxt in sit_successors(seq[-1]):
            g = flights[nxt]
            # Successors are departure-sorted, so once even a zero-length leg
            # would blow the elapsed limit, later candidates cannot fit.
            if (g.departure + 1 + rules.debriefing) - duty_start > rules.max_duty_elapsed:
                break
            if (g.arrival + rules.debriefing) - duty_start > rules.max_duty_elapsed:
                continue
            new_flying = flying + g.flying_time
            if new_flying > rules.max_duty_flying:
                continue
            seq.append(nxt)
            extend(seq, new_flying)
            seq.pop()

    for idx, f in enumerate(flights):
        elapsed = f.flying_time + rules.briefing + rules.debriefing
        if elapsed > rules.max_duty_elapsed or f.flying_time > rules.max_duty_flying:
            continue
        extend([idx], f.flying_time)

    duties.sort(key=lambda d: (d.start, d.signature))
    by_base: dict[str, list[int]] = {b: [] for b in network.crew_bases}
    by_flight: dict[int, list[int]] = {f.id: [] for f in network.flights}
    for i, d in enumerate(duties):
        if d.origin in by_base:
            by_base[d.origin].append(i)
        for fid in d.flight_ids:
            by_flight[fid].append(i)
    return DutySet(
        duties=tuple(duties),
        by_base={b: tuple(v) for b, v in by_base.items()},
        by_flight={fid: tuple(v) for fid, v in by_flight.items()},
    )


def build_duty_graph(duty_set: DutySet, rules: RuleSet) -> DutyGraph:
    """Connect d1 -> d2 whenever d2 departs where d1 ended and the rest gap
    (d2.start - d1.end) lies inside [min_overnight, max_overnight]."""
    duties = duty_set.duties
    by_origin: dict[str, list[int]] = {}
    for idx, d in enumerate(duties):
        by_origin.setdefault(d.origin, []).append(idx)
    start_times = {a: [duties[i].start for i in idxs]
                   for a, idxs in by_origin.items()}

    successors: dict[int, tuple[int, ...]] = {}
    for idx, d in enumerate(duties):
        cands = by_origin.get(d.destination)
        if not cands:
            successors[idx] = ()
            continue
        times = start_times[d.destination]
        lo = bisect_left(times, d.end + rules.min_overnight)
        hi = bisect_right(times, d.end + rules.max_overnight)
        successors[idx] = tuple(cands[lo:hi])
    return DutyGraph(successors=successors)


def enumerate_pairings_from_duties(
    seed_duties: Iterable[int],
    duty_set: DutySet,
    graph: DutyGraph,
    network: FlightNetwork,
    rules: RuleSet,
    model: CostModel,
    cap: int = DEFAULT_PAIRING_CAP,
) -> list[Pairing]:
    """All legal pairings whose duties all belong to ``seed_duties``.

    Depth-first extension over the duty graph restricted to the seed set,
    starting from duties that depart a crew base and closing only at that
    base.  Every emitted pairing is built through the legality validator.
    Output is sorted by signature.
    """
    seed = set(seed_duties)
    if not seed:
        return []
    duties = duty_set.duties
    bases = set(network.crew_bases)
    starts = sorted(i for i in seed if duties[i].origin in bases)

    out: list[Pairing] = []
    path: list[int] = []

    def dfs(idx: int, base: str, first_start: int) -> bool:
        """Returns False once the cap is hit to unwind the recursion."""
        path.append(idx)
        d = duties[idx]
        if d.destination == base:
            candidate = [fid for k in path for fid in duties[k].flight_ids]
            verdict = validate_pairing(candidate, base, network, rules, model)
            if verdict.ok:
                out.append(verdict.pairing)
                if len(out) >= cap:
                    path.pop()
                    return False
        if len(path) < rules.max_duties_per_pairing and not (
                rules.forbid_same_city_overnight and d.destination == base):
            for nxt in graph.successors[idx]:
                if nxt not in seed:
                    continue
                if duties[nxt].end - first_start > rules.max_tafb:
                    continue
                if not dfs(nxt, base, first_start):
                    path.pop()
                    return False
        path.pop()
        return True

    for s in starts:
        d = duties[s]
        if d.end - d.start > rules.max_tafb:
            continue
        if not dfs(s, d.origin, d.start):
            break
    out.sort(key=lambda p: p.signature)
    return out


def enumerate_pairings_covering_flights(
    flight_subset: Iterable[int],
    duty_set: DutySet,
    graph: DutyGraph,
    network: FlightNetwork,
    rules: RuleSet,
    model: CostModel,
    cap: int = DEFAULT_PAIRING_CAP,
) -> list[Pairing]:
    """Pairings built only from duties whose flights all lie in the subset."""
    allowed = set(flight_subset)
    if not allowed:
        return []
    touched: set[int] = set()
    for fid in allowed:
        touched.update(duty_set.by_flight.get(fid, ()))
    seed = [i for i in sorted(touched)
            if all(fid in allowed for fid in duty_set.duties[i].flight_ids)]
    return enumerate_pairings_from_duties(
        seed, duty_set, graph, network, rules, model, cap=cap)


def enumerate_all_pairings(
    duty_set: DutySet,
    graph: DutyGraph,
    network: FlightNetwork,
    rules: RuleSet,
    model: CostModel,
    cap: int = DEFAULT_PAIRING_CAP,
) -> list[Pairing]:
    return enumerate_pairings_from_duties(
        range(len(duty_set)), duty_set, graph, network, rules, model, cap=cap)
