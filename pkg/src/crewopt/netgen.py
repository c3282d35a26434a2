"""Seeded synthetic timetable generator plus instance file I/O.

Networks are built from base-anchored rotations (out-and-back and
through-the-hub loops), so every generated instance is feasible by
construction: the rotations themselves form a partition of the flights into
legal pairings, which the generator verifies before returning.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .model import (
    MINUTES_PER_DAY,
    CostModel,
    Flight,
    FlightNetwork,
    Minutes,
    Pairing,
    RuleSet,
    validate_pairing,
)

FORMAT_HEADER = "# crewopt instance v1"


class NetworkGenerationError(RuntimeError):
    """Raised when no feasible timetable could be constructed."""


class ParseError(ValueError):
    def __init__(self, line_no: Optional[int], message: str):
        self.line_no = line_no
        where = f"line {line_no}: " if line_no is not None else ""
        super().__init__(f"{where}{message}")


@dataclass(frozen=True)
class NetworkParams:
    num_flights: int
    num_crew_bases: int = 1
    num_hubs: int = 1
    num_spokes_per_hub: int = 2
    days: int = 1
    hub_turn_mean: Minutes = 75
    seed: int = 0

    def __post_init__(self):
        if self.num_hubs < 1:
            raise ValueError("num_hubs must be >= 1")
        if self.num_flights < 2:
            raise ValueError("num_flights must be >= 2")
        if self.num_crew_bases < 1:
            raise ValueError("num_crew_bases must be >= 1")
        max_bases = self.num_hubs + self.num_hubs * self.num_spokes_per_hub
        if self.num_crew_bases > max_bases:
            raise ValueError("more crew bases than airports")
        if self.days < 1:
            raise ValueError("days must be >= 1")
        if self.num_spokes_per_hub < 0:
            raise ValueError("num_spokes_per_hub must be >= 0")


@dataclass(frozen=True)
class _Rotation:
    """A planned base-to-base loop; legs become flights."""

    base: str
    stops: tuple[str, ...]  # airports visited between departure and return
    day: int


def generate_network(params: NetworkParams,
                     rules: Optional[RuleSet] = None) -> FlightNetwork:
    network, _ = generate_network_with_witness(params, rules)
    return network


def generate_network_with_witness(
    params: NetworkParams, rules: Optional[RuleSet] = None,
) -> tuple[FlightNetwork, list[Pairing]]:
    """Generate a network and the partition of its flights into legal pairings
    that certifies feasibility."""
    rules = rules or RuleSet()
    rng = np.random.default_rng(params.seed)

    hubs = [f"H{h:02d}" for h in range(params.num_hubs)]
    spokes = {h: [f"S{i:02d}{k:02d}" for k in range(params.num_spokes_per_hub)]
              for i, h in enumerate(hubs)}
    all_airports = hubs + [s for h in hubs for s in spokes[h]]
    bases = all_airports[: params.num_crew_bases]
    if len(all_airports) < 2:
        raise NetworkGenerationError(
            "need at least 2 airports; increase num_hubs or num_spokes_per_hub")

    rotations = _plan_rotations(params, rng, hubs, spokes, bases)

    flights: list[tuple[int, str, str, int, int]] = []  # (order, orig, dest, dep, arr)
    witness_groups: list[tuple[str, list[int]]] = []  # (base, flight orders)
    order = 0
    for rot in rotations:
        legs = _time_rotation(rot, rng, params, rules)
        members = []
        for origin, destination, dep, arr in legs:
            flights.append((order, origin, destination, dep, arr))
            members.append(order)
            order += 1
        witness_groups.append((rot.base, members))

    # Assign dense ids in canonical (departure, creation order) order.
    ranked = sorted(flights, key=lambda rec: (rec[3], rec[0]))
    order_to_id = {rec[0]: i + 1 for i, rec in enumerate(ranked)}
    flight_objs = [
        Flight(id=order_to_id[o], origin=org, destination=dst,
               departure=dep, arrival=arr)
        for (o, org, dst, dep, arr) in flights
    ]
    network = FlightNetwork.build(flight_objs, bases, schedule_days=params.days)

    model = CostModel()
    witness = []
    for base, members in witness_groups:
        candidate = [order_to_id[o] for o in members]
        verdict = validate_pairing(candidate, base, network, rules, model)
        if not verdict.ok:
            raise NetworkGenerationError(
                f"constructed rotation from {base} violates {verdict.violation}")
        witness.append(verdict.pairing)
    return network, witness


def _plan_rotations(params: NetworkParams, rng: np.random.Generator,
                    hubs: list[str], spokes: dict[str, list[str]],
                    bases: list[str]) -> list[_Rotation]:
    """Split the flight budget into 2/3/4-leg rotations across bases and days."""
    if params.num_flights < 2 * len(bases):
        raise NetworkGenerationError(
            f"{params.num_flights} flights cannot touch all "
            f"{len(bases)} crew bases (need >= 2 per base)")

    # Round-trip targets for each base: own spokes first, then other hubs.
    p2_targets = {}
    for b in bases:
        own = spokes.get(b, [])
        other_hubs = [h for h in hubs if h != b]
        targets = own + other_hubs
        if not targets:
            targets = [a for a in (hubs + [s for h in hubs for s in spokes[h]])
                       if a != b]
        if not targets:
            raise NetworkGenerationError(f"no destination reachable from base {b}")
        p2_targets[b] = itertools.cycle(targets)

    # Through-the-hub loops: base -> hub -> spoke -> hub -> base.
    p4_combos = [(h, s) for h in hubs for s in spokes[h]]
    p4_cycle = itertools.cycle(p4_combos) if p4_combos else None

    base_cycle = itertools.cycle(bases)
    day_cycle = itertools.cycle(range(params.days))
    rotations: list[_Rotation] = []
    remaining = params.num_flights
    odd = remaining % 2 == 1

    while remaining > 0:
        base = next(base_cycle)
        day = next(day_cycle)
        if odd and remaining >= 3:
            # One triangle absorbs the odd leg.
            first = next(p2_targets[base])
            second = next(p2_targets[base])
            while second == first:
                second = next(p2_targets[base])
            rotations.append(_Rotation(base=base, stops=(first, second), day=day))
            remaining -= 3
            odd = False
            continue
        use_p4 = (
            p4_cycle is not None
            and remaining >= 4
            and remaining != 5  # never strand a single leg
            and rng.random() < 0.35
        )
        if use_p4:
            hub, spoke = next(p4_cycle)
            if hub == base:
                rotations.append(_Rotation(base=base, stops=(spoke,), day=day))
                remaining -= 2
            else:
                rotations.append(_Rotation(base=base, stops=(hub, spoke, hub), day=day))
                remaining -= 4
        else:
            target = next(p2_targets[base])
            rotations.append(_Rotation(base=base, stops=(target,), day=day))
            remaining -= 2
    return rotations


def _time_rotation(rot: _Rotation, rng: np.random.Generator,
                   params: NetworkParams, rules: RuleSet,
                   attempts: int = 64) -> list[tuple[str, str, int, int]]:
    """Draw leg times for one rotation so it forms a single legal duty
    landing back at base on its own day."""
    route = [rot.base, *rot.stops, rot.base]
    num_legs = len(route) - 1
    day_start = rot.day * MINUTES_PER_DAY

    fly_hi = min(140, max(60, rules.max_duty_flying // max(2, num_legs)))
    turn_lo = max(rules.min_sit, 1)
    turn_hi = min(rules.max_sit, max(turn_lo + 1, 110))
    for _ in range(attempts):
        fly = [int(rng.integers(55, fly_hi + 1)) for _ in range(num_legs)]
        turns = []
        for _ in range(num_legs - 1):
            t = int(round(rng.normal(params.hub_turn_mean,
                                     max(5.0, params.hub_turn_mean / 4))))
            turns.append(min(max(t, turn_lo), turn_hi))
        span = sum(fly) + sum(turns)
        latest_dep = MINUTES_PER_DAY - 1 - span
        if latest_dep < 300:
            continue
        dep0 = day_start + int(rng.integers(300, min(latest_dep, 840) + 1))
        if sum(fly) > rules.max_duty_flying:
            continue
        if span + rules.briefing + rules.debriefing > rules.max_duty_elapsed:
            continue
        legs = []
        t = dep0
        for k in range(num_legs):
            arr = t + fly[k]
            legs.append((route[k], route[k + 1], t, arr))
            t = arr + (turns[k] if k < num_legs - 1 else 0)
        return legs
    raise NetworkGenerationError(
        f"could not fit a {num_legs}-leg rotation from {rot.base} inside "
        "the duty elapsed/flying limits")


def save_network(network: FlightNetwork, path: Union[str, Path]) -> None:
    Path(path).write_text(network_to_text(network))


def network_to_text(network: FlightNetwork) -> str:
    lines = [
        FORMAT_HEADER,
        f"days {network.schedule_days}",
        "airports " + " ".join(sorted(network.airports)),
        "bases " + " ".join(network.crew_bases),
        f"flights {network.num_flights}",
    ]
    for f in network.flights:
        lines.append(f"{f.id} {f.origin} {f.destination} {f.departure} {f.arrival}")
    return "\n".join(lines) + "\n"


def load_network(path: Union[str, Path]) -> FlightNetwork:
    return network_from_text(Path(path).read_text())


def network_from_text(text: str) -> FlightNetwork:
    """Parse the line-oriented instance format; malformed rows report their line."""
    header: dict[str, object] = {}
    flights: list[Flight] = []
    expected: Optional[int] = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        key = fields[0]
        if key in ("days", "flights"):
            if len(fields) != 2 or not fields[1].isdigit():
                raise ParseError(line_no, f"{key} needs one integer value")
            header[key] = int(fields[1])
            if key == "flights":
                expected = int(fields[1])
            continue
        if key in ("airports", "bases"):
            header[key] = fields[1:]
            continue
        # flight row: id origin destination departure arrival
        if len(fields) != 5:
            raise ParseError(line_no, "flight rows need 5 fields: "
                             "id origin destination departure arrival")
        try:
            fid, dep, arr = int(fields[0]), int(fields[3]), int(fields[4])
        except ValueError:
            raise ParseError(line_no, "id/departure/arrival must be integers") from None
        try:
            flights.append(Flight(id=fid, origin=fields[1], destination=fields[2],
                                  departure=dep, arrival=arr))
        except ValueError as exc:
            raise ParseError(line_no, str(exc)) from None

    for required in ("airports", "bases", "flights"):
        if required not in header:
            raise ParseError(None, f"missing {required!r} header line")
    if expected is not None and expected != len(flights):
        raise ParseError(None, f"header declares {expected} flights, "
                         f"found {len(flights)}")
    declared = set(header["airports"])  # type: ignore[arg-type]
    used = {f.origin for f in flights} | {f.destination for f in flights}
    if not used <= declared:
        raise ParseError(None, f"flights use undeclared airports: "
                         f"{sorted(used - declared)}")
    bases = list(header["bases"])  # type: ignore[arg-type]
    if not set(bases) <= declared:
        raise ParseError(None, "bases must be declared airports")
    if len(flights) < 2:
        raise ParseError(None, "an instance needs at least 2 flights")
    try:
        return FlightNetwork.build(flights, bases,
                                   schedule_days=header.get("days"))  # type: ignore[arg-type]
    except ValueError as exc:
        raise ParseError(None, str(exc)) from None
