"""Domain model: flights, legality rules, costing, duties, pairings, solutions.

All money amounts are integer cents and all durations are integer minutes,
so threshold comparisons elsewhere in the solver are exact.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

Money = int  # integer cents
Minutes = int  # integer minutes since the schedule epoch

MINUTES_PER_DAY = 1440

# Violation tags, in the order the constraint classes are checked.
VIOLATION_CONNECTION_CITY = "connection-city"
VIOLATION_START_END_CITY = "start-end-city"
VIOLATION_SIT_TIME = "sit-time"
VIOLATION_OVERNIGHT_REST = "overnight-rest"
VIOLATION_DUTY = "duty-limit"
VIOLATION_TAFB = "tafb"
VIOLATION_SPECIAL = "same-city-overnight"


class UnknownFlightError(ValueError):
    """A candidate references a flight id that is not in the network."""


class CoverageError(ValueError):
    """A pairing collection fails to cover every flight."""

    def __init__(self, missing: Sequence[int]):
        self.missing = tuple(sorted(missing))
        super().__init__(f"flights not covered by any pairing: {self.missing}")


@dataclass(frozen=True)
class Flight:
    """One scheduled flight leg."""

    id: int
    origin: str
    destination: str
    departure: Minutes
    arrival: Minutes

    def __post_init__(self):
        if self.id < 1:
            raise ValueError(f"flight id must be >= 1, got {self.id}")
        if self.arrival <= self.departure:
            raise ValueError(f"flight {self.id}: arrival must be after departure")
        if self.origin == self.destination:
            raise ValueError(f"flight {self.id}: origin equals destination")

    @property
    def flying_time(self) -> Minutes:
        return self.arrival - self.departure


@dataclass(frozen=True)
class FlightNetwork:
    """Immutable timetable: flights plus the crew bases they are flown from.

    ``flights`` is strictly ordered by (departure, id); flight ids are dense
    1..F.  This canonical ordering is the tie-break used everywhere downstream,
    which is what makes repeated runs reproducible.
    """

    flights: tuple[Flight, ...]
    crew_bases: tuple[str, ...]
    schedule_days: int

    @classmethod
    def build(
        cls,
        flights: Iterable[Flight],
        crew_bases: Iterable[str],
        schedule_days: Optional[int] = None,
    ) -> "FlightNetwork":
        ordered = tuple(sorted(flights, key=lambda f: (f.departure, f.id)))
        if not ordered:
            raise ValueError("a network needs at least 1 flight")
        ids = sorted(f.id for f in ordered)
        if ids != list(range(1, len(ordered) + 1)):
            raise ValueError("flight ids must be dense 1..F without duplicates")
        bases = tuple(sorted(set(crew_bases)))
        if not bases:
            raise ValueError("at least one crew base is required")
        airports = {f.origin for f in ordered} | {f.destination for f in ordered}
        unknown = [b for b in bases if b not in airports]
        if unknown:
            raise ValueError(f"crew bases not touched by any flight: {unknown}")
        spanned = (max(f.arrival for f in ordered) - 1) // MINUTES_PER_DAY + 1
        if schedule_days is None:
            schedule_days = spanned
        elif schedule_days < spanned:
            raise ValueError(
                f"schedule_days={schedule_days} but flights span {spanned} days"
            )
        return cls(flights=ordered, crew_bases=bases, schedule_days=schedule_days)

    @cached_property
    def _by_id(self) -> dict[int, Flight]:
        return {f.id: f for f in self.flights}

    @property
    def num_flights(self) -> int:
        return len(self.flights)

    @cached_property
    def airports(self) -> frozenset[str]:
        return frozenset({f.origin for f in self.flights} | {f.destination for f in self.flights})

    def flight(self, flight_id: int) -> Flight:
        try:
            return self._by_id[flight_id]
        except KeyError:
            raise UnknownFlightError(f"unknown flight id {flight_id}") from None


@dataclass(frozen=True)
class RuleSet:
    """Legality parameters.

    Defaults are typical regulatory magnitudes; callers that care about a
    specific regime should pass every field explicitly (tests do).
    """

    min_sit: Minutes = 30
    max_sit: Minutes = 240
    min_overnight: Minutes = 540
    max_overnight: Minutes = 1440
    briefing: Minutes = 45
    debriefing: Minutes = 30
    max_flights_per_duty: int = 6
    max_duty_elapsed: Minutes = 840
    max_duty_flying: Minutes = 480
    max_duties_per_pairing: int = 4
    max_tafb: Minutes = 5760
    forbid_same_city_overnight: bool = False
    guaranteed_hours_per_duty: Minutes = 240

    def __post_init__(self):
        durations = (
            self.min_sit, self.max_sit, self.min_overnight, self.max_overnight,
            self.briefing, self.debriefing, self.max_duty_elapsed,
            self.max_duty_flying, self.max_tafb, self.guaranteed_hours_per_duty,
        )
        if any(d < 0 for d in durations):
            raise ValueError("durations must be >= 0")
        if not (self.min_sit <= self.max_sit < self.min_overnight <= self.max_overnight):
            raise ValueError("need min_sit <= max_sit < min_overnight <= max_overnight")
        if self.max_flights_per_duty < 1 or self.max_duties_per_pairing < 1:
            raise ValueError("counts must be >= 1")


@dataclass(frozen=True)
class CostModel:
    """Cost parameters, all in integer cents.

    Hourly rates apply per 60 minutes with floor division, so costs stay
    integral.  Aircraft-change soft cost is charged per within-duty
    connection (the timetable carries no tail numbers).
    """

    flying_rate: Money = 5000
    hotel_cost: Money = 8000
    meal_rate: Money = 350
    excess_pay_rate: Money = 4000
    deadhead_penalty: Money = 100000
    soft_cost_aircraft_change: Money = 0

    def __post_init__(self):
        rates = (
            self.flying_rate, self.hotel_cost, self.meal_rate,
            self.excess_pay_rate, self.deadhead_penalty,
            self.soft_cost_aircraft_change,
        )
        if any(r < 0 for r in rates):
            raise ValueError("cost rates must be >= 0")

    def flying_cost(self, flight: Flight) -> Money:
        return per_hour(self.flying_rate, flight.flying_time)


def per_hour(rate: Money, minutes: Minutes) -> Money:
    """Charge an hourly rate for a duration, keeping integer cents."""
    return rate * minutes // 60


@dataclass(frozen=True)
class Duty:
    """A flight sequence worked in a single working day.

    ``start`` includes briefing before the first departure and ``end``
    includes debriefing after the last arrival; overnight rest is measured
    between one duty's ``end`` and the next duty's ``start``.
    """

    flight_ids: tuple[int, ...]
    start: Minutes
    end: Minutes
    flying: Minutes
    origin: str
    destination: str

    @property
    def elapsed(self) -> Minutes:
        return self.end - self.start

    @property
    def base_airports(self) -> tuple[str, str]:
        return (self.origin, self.destination)

    @property
    def signature(self) -> tuple[int, ...]:
        return self.flight_ids

    @property
    def num_flights(self) -> int:
        return len(self.flight_ids)


@dataclass(frozen=True)
class Pairing:
    """A legal base-to-base sequence of duties; the column object of the solver.

    ``signature`` (the ordered flight-id tuple) is the canonical identity and
    the tie-break key for every sort in the system.
    """

    duties: tuple[Duty, ...]
    crew_base: str
    flight_ids: tuple[int, ...]
    cost: Money
    tafb: Minutes

    @property
    def signature(self) -> tuple[int, ...]:
        return self.flight_ids

    @cached_property
    def flight_set(self) -> frozenset[int]:
        return frozenset(self.flight_ids)

    @property
    def num_duties(self) -> int:
        return len(self.duties)

    @property
    def num_flights(self) -> int:
        return len(self.flight_ids)

    @property
    def overnights(self) -> int:
        return len(self.duties) - 1


@dataclass(frozen=True)
class LegalityVerdict:
    """Outcome of validating a candidate flight sequence.

    Either ``pairing`` is set (legal) or ``violation`` names the first
    violated constraint class.
    """

    pairing: Optional[Pairing] = None
    violation: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.pairing is not None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class Solution:
    """A set-covering solution: selected pairings plus the recomputed objective."""

    pairings: tuple[Pairing, ...]
    objective: Money
    deadheads: int
    coverage: dict[int, int] = field(compare=False, repr=False, default_factory=dict)

    @classmethod
    def build(cls, pairings: Sequence[Pairing], network: FlightNetwork,
              deadhead_penalty: Money) -> "Solution":
        objective, deadheads, coverage = _objective_with_coverage(
            pairings, network, deadhead_penalty)
        ordered = tuple(sorted(pairings, key=lambda p: p.signature))
        return cls(pairings=ordered, objective=objective,
                   deadheads=deadheads, coverage=coverage)


def pairing_cost(duties: Sequence[Duty], tafb: Minutes, overnights: int,
                 model: CostModel, rules: RuleSet) -> Money:
    """Total cost of a pairing given its constituent duties.

    Components: hourly flying pay, hotel per overnight, hourly meal allowance
    over TAFB, excess pay topping each duty up to the guaranteed hours, and
    the per-connection aircraft-change soft cost.
    """
    if not duties:
        raise ValueError("a pairing needs at least one duty")
    total_elapsed = sum(d.elapsed for d in duties)
    if tafb < total_elapsed:
        raise ValueError("tafb cannot be smaller than total duty elapsed time")
    flying_total = sum(d.flying for d in duties)
    excess = sum(max(0, rules.guaranteed_hours_per_duty - d.flying) for d in duties)
    connections = sum(d.num_flights - 1 for d in duties)
    return (
        per_hour(model.flying_rate, flying_total)
        + model.hotel_cost * overnights
        + per_hour(model.meal_rate, tafb)
        + per_hour(model.excess_pay_rate, excess)
        + model.soft_cost_aircraft_change * connections
    )


def validate_pairing(candidate: Sequence[int], base: str, network: FlightNetwork,
                     rules: RuleSet, model: CostModel) -> LegalityVerdict:
    """Check every legality constraint class on an ordered flight-id sequence.

    Classes are checked in a fixed order so the reported violation is
    deterministic: connection city, start and end city, sit/overnight windows,
    duty limits, TAFB, and the same-city-overnight rule when enabled.

    A gap between consecutive flights is a sit when it fits inside
    [min_sit, max_sit]; anything longer is treated as an overnight attempt and
    judged against [min_overnight, max_overnight] after subtracting the
    debriefing and briefing that bracket the duty break.

    Raises UnknownFlightError for ids outside the network (an input error,
    distinct from illegality).
    """
    if not candidate:
        raise ValueError("candidate flight list is empty")
    flights = [network.flight(i) for i in candidate]

    for cur, nxt in zip(flights, flights[1:]):
        if cur.destination != nxt.origin:
            return LegalityVerdict(violation=VIOLATION_CONNECTION_CITY)

    if flights[0].origin != base or flights[-1].destination != base:
        return LegalityVerdict(violation=VIOLATION_START_END_CITY)

    # Split into duties at overnight gaps.
    duty_breaks: list[int] = []  # index k: break between flights[k] and flights[k+1]
    for k, (cur, nxt) in enumerate(zip(flights, flights[1:])):
        gap = nxt.departure - cur.arrival
        if gap < rules.min_sit:
            return LegalityVerdict(violation=VIOLATION_SIT_TIME)
        if gap <= rules.max_sit:
            continue
        rest = gap - rules.debriefing - rules.briefing
        if not (rules.min_overnight <= rest <= rules.max_overnight):
            return LegalityVerdict(violation=VIOLATION_OVERNIGHT_REST)
        duty_breaks.append(k)

    duties = _build_duties(flights, duty_breaks, rules)
    for duty in duties:
        if duty.num_flights > rules.max_flights_per_duty:
            return LegalityVerdict(violation=VIOLATION_DUTY)
        if duty.elapsed > rules.max_duty_elapsed:
            return LegalityVerdict(violation=VIOLATION_DUTY)
        if duty.flying > rules.max_duty_flying:
            return LegalityVerdict(violation=VIOLATION_DUTY)
    if len(duties) > rules.max_duties_per_pairing:
        return LegalityVerdict(violation=VIOLATION_DUTY)

    tafb = duties[-1].end - duties[0].start
    if tafb > rules.max_tafb:
        return LegalityVerdict(violation=VIOLATION_TAFB)

    if rules.forbid_same_city_overnight:
        for duty in duties[:-1]:
            if duty.destination == base:
                return LegalityVerdict(violation=VIOLATION_SPECIAL)

    overnights = len(duties) - 1
    cost = pairing_cost(duties, tafb, overnights, model, rules)
    pairing = Pairing(
        duties=tuple(duties),
        crew_base=base,
        flight_ids=tuple(candidate),
        cost=cost,
        tafb=tafb,
    )
    return LegalityVerdict(pairing=pairing)


def _build_duties(flights: Sequence[Flight], duty_breaks: Sequence[int],
                  rules: RuleSet) -> list[Duty]:
    duties = []
    begin = 0
    for cut in list(duty_breaks) + [len(flights) - 1]:
        chunk = flights[begin:cut + 1]
        duties.append(Duty(
            flight_ids=tuple(f.id for f in chunk),
            start=chunk[0].departure - rules.briefing,
            end=chunk[-1].arrival + rules.debriefing,
            flying=sum(f.flying_time for f in chunk),
            origin=chunk[0].origin,
            destination=chunk[-1].destination,
        ))
        begin = cut + 1
    return duties


def solution_objective(pairings: Sequence[Pairing], network: FlightNetwork,
                       deadhead_penalty: Money) -> tuple[Money, int]:
    """Objective of a covering solution: pairing costs plus deadhead penalties.

    Raises CoverageError (listing the missing flight ids) if any flight is
    left uncovered.
    """
    objective, deadheads, _ = _objective_with_coverage(
        pairings, network, deadhead_penalty)
    return objective, deadheads


def _objective_with_coverage(pairings: Sequence[Pairing], network: FlightNetwork,
                             deadhead_penalty: Money) -> tuple[Money, int, dict[int, int]]:
    coverage: Counter[int] = Counter()
    for p in pairings:
        coverage.update(p.flight_ids)
    missing = [f.id for f in network.flights if coverage[f.id] == 0]
    if missing:
        raise CoverageError(missing)
    deadheads = sum(coverage.values()) - network.num_flights
    objective = sum(p.cost for p in pairings) + deadhead_penalty * deadheads
    return objective, deadheads, dict(coverage)
