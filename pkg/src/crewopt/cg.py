"""Pricing strategies for the column-generation heuristic.

Four generators feed each LP iteration, run in a fixed order and merged:

* deadhead reduction: random duty sample, negative-reduced-cost pairings,
  then a greedy zero-deadhead subset plus alternatives for the complementary
  flights of the touched support pairings;
* crew-utilization enhancement: promising flights harvested per flight-count
  category of the support, re-combined, filtered to above-median utilization;
* archiving: pairings from earlier iterations re-inducted by ranking their
  consecutive flight-pairs with a flight-pair-level reduced-cost estimator;
* random exploration: a plain random duty sample, negative reduced cost only.

Each strategy draws its sizing integer from a splittable generator keyed by
(seed, interaction, iteration, strategy), from the half of [0, threshold]
selected once per iteration, so runs are reproducible and strategies can be
toggled without perturbing one another.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from .legalgen import (
    DEFAULT_PAIRING_CAP,
    DutyGraph,
    DutySet,
    enumerate_pairings_covering_flights,
    enumerate_pairings_from_duties,
)
from .lp import DualSolution, PrimalSolution, effective_cost
from .model import CostModel, Flight, FlightNetwork, Money, Pairing, RuleSet

STRATEGY_CODES = {"half": 0, "D": 1, "U": 2, "A": 3, "R": 4, "calibration": 5}


class CgInvariantError(AssertionError):
    pass


@dataclass
class CgdStats:
    """Zero-deadhead contract bookkeeping for the deadhead-reduction strategy."""

    calls: int = 0
    violations: int = 0

    def reset(self) -> None:
        self.calls = 0
        self.violations = 0


CGD_STATS = CgdStats()


def strategy_rng(seed: int, interaction: int, iteration: int, tag: str) -> np.random.Generator:
    """Independent, reproducible stream per (run seed, T, t, strategy)."""
    return np.random.default_rng([seed, interaction, iteration, STRATEGY_CODES[tag]])


def draw_random(rng: np.random.Generator, threshold: int, half: str) -> int:
    """Random integer from the selected half of [0, threshold]."""
    mid = threshold // 2
    if half == "lower":
        lo, hi = 0, mid
    elif half == "upper":
        lo, hi = mid, threshold
    else:
        raise ValueError(f"half must be 'lower' or 'upper', got {half!r}")
    return int(rng.integers(lo, hi + 1))


@dataclass(frozen=True)
class StrategyThresholds:
    """Upper bounds for the per-strategy sizing draws."""

    th_d: int
    th_u: int
    th_a: int
    th_r: int
    half_selector: str = "lower"

    def __post_init__(self):
        if min(self.th_d, self.th_u, self.th_a, self.th_r) < 1:
            raise ValueError("thresholds must be >= 1")
        if self.half_selector not in ("lower", "upper"):
            raise ValueError("half_selector must be 'lower' or 'upper'")

    @classmethod
    def desk_defaults(cls, num_duties: int, num_bases: int,
                      num_flights: int) -> "StrategyThresholds":
        per_base = max(1, math.ceil(num_duties / max(1, num_bases) / 10))
        return cls(th_d=per_base, th_u=max(1, math.ceil(num_flights / 4)),
                   th_a=50, th_r=per_base)

    def with_half(self, half: str) -> "StrategyThresholds":
        return replace(self, half_selector=half)


class Archive:
    """Pairings from past iterations, indexed by consecutive flight-pair.

    Buckets hold distinct pairings by signature; growth is monotone.
    """

    def __init__(self):
        self.by_pair: dict[tuple[int, int], dict[tuple[int, ...], Pairing]] = {}

    def add(self, pairing: Pairing) -> None:
        ids = pairing.flight_ids
        for m, n in zip(ids, ids[1:]):
            self.by_pair.setdefault((m, n), {})[pairing.signature] = pairing

    def update(self, pairings: Iterable[Pairing]) -> None:
        for p in pairings:
            self.add(p)

    @property
    def num_pairs(self) -> int:
        return len(self.by_pair)

    @property
    def num_entries(self) -> int:
        return sum(len(bucket) for bucket in self.by_pair.values())


@dataclass(frozen=True)
class CgBatch:
    """Per-strategy outputs and their deduplicated, signature-sorted union."""

    from_cgd: tuple[Pairing, ...]
    from_cgu: tuple[Pairing, ...]
    from_cga: tuple[Pairing, ...]
    from_cgr: tuple[Pairing, ...]
    merged: tuple[Pairing, ...]

    @classmethod
    def assemble(cls, cgd, cgu, cga, cgr) -> "CgBatch":
        merged = {p.signature: p for part in (cgd, cgu, cga, cgr) for p in part}
        return cls(
            from_cgd=tuple(cgd), from_cgu=tuple(cgu),
            from_cga=tuple(cga), from_cgr=tuple(cgr),
            merged=tuple(merged[s] for s in sorted(merged)),
        )

    @property
    def sizes(self) -> dict[str, int]:
        return {"cgd": len(self.from_cgd), "cgu": len(self.from_cgu),
                "cga": len(self.from_cga), "cgr": len(self.from_cgr),
                "merged": len(self.merged)}


def reduced_cost(pairing: Pairing, duals: DualSolution,
                 deadhead_penalty: Money) -> tuple[float, float]:
    """Reduced cost of a column and its dual component.

    mu_j = (c_j + psi * |flights_j|) - sum of flight prices;
    the second return value is that dual sum.
    """
    mud = float(sum(duals.price(f) for f in pairing.flight_ids))
    return float(effective_cost(pairing, deadhead_penalty)) - mud, mud


def crew_utilization_ratio(pairing: Pairing, rules: RuleSet,
                           basis: str = "flying") -> float:
    """Mean worked-to-permissible ratio over the pairing's duties, in (0, 1].

    ``basis`` selects flying hours against the flying cap (default) or
    elapsed time against the elapsed cap.
    """
    if basis == "flying":
        ratios = [d.flying / max(1, rules.max_duty_flying) for d in pairing.duties]
    elif basis == "elapsed":
        ratios = [d.elapsed / max(1, rules.max_duty_elapsed) for d in pairing.duties]
    else:
        raise ValueError(f"unknown utilization basis {basis!r}")
    return min(1.0, sum(ratios) / len(ratios))


def reduced_cost_estimator(f_m: Flight, f_n: Flight, duals: DualSolution,
                           model: CostModel) -> float:
    """Flight-pair analogue of the reduced cost: flying costs minus prices."""
    return float(
        model.flying_cost(f_m) + model.flying_cost(f_n)
        - duals.price(f_m.id) - duals.price(f_n.id)
    )


def _sample_duties_per_base(duty_set: DutySet, count: int,
                            rng: np.random.Generator) -> list[int]:
    """Up to ``count`` duty indices per crew base, without replacement."""
    chosen: list[int] = []
    if count <= 0:
        return chosen
    for base in sorted(duty_set.by_base):
        idxs = duty_set.by_base[base]
        k = min(count, len(idxs))
        if k == 0:
            continue
        picks = rng.choice(len(idxs), size=k, replace=False)
        chosen.extend(idxs[i] for i in picks)
    return sorted(chosen)


def _negative_only(pairings: Sequence[Pairing], duals: DualSolution,
                   deadhead_penalty: Money) -> list[tuple[float, Pairing]]:
    out = []
    for p in pairings:
        mu, _ = reduced_cost(p, duals, deadhead_penalty)
        if mu < 0:
            out.append((mu, p))
    return out


def cgd_generate(
    duty_set: DutySet,
    graph: DutyGraph,
    network: FlightNetwork,
    rules: RuleSet,
    model: CostModel,
    support: Sequence[Pairing],
    duals: DualSolution,
    deadhead_penalty: Money,
    thresholds: StrategyThresholds,
    rng: np.random.Generator,
    cap: int = DEFAULT_PAIRING_CAP,
) -> list[Pairing]:
    """Deadhead-reduction strategy.

    Samples duties per base, keeps negative-reduced-cost pairings, extracts a
    greedy zero-deadhead subset in ascending reduced-cost order, then also
    offers alternatives over the complementary flights of the support
    pairings touched by that subset.
    """
    count = draw_random(rng, thresholds.th_d, thresholds.half_selector)
    seed = _sample_duties_per_base(duty_set, count, rng)
    candidates = enumerate_pairings_from_duties(
        seed, duty_set, graph, network, rules, model, cap=cap)
    negatives = _negative_only(candidates, duals, deadhead_penalty)
    negatives.sort(key=lambda item: (item[0], item[1].signature))

    zero_deadhead: list[Pairing] = []
    covered: set[int] = set()
    for _, p in negatives:
        if covered.isdisjoint(p.flight_set):
            zero_deadhead.append(p)
            covered.update(p.flight_set)

    CGD_STATS.calls += 1
    if sum(p.num_flights for p in zero_deadhead) != len(covered):
        CGD_STATS.violations += 1
        raise CgInvariantError("zero-deadhead subset covers a flight twice")

    complement: set[int] = set()
    for p in support:
        if p.flight_set & covered:
            complement.update(p.flight_set - covered)
    alternatives = enumerate_pairings_covering_flights(
        complement, duty_set, graph, network, rules, model, cap=cap)
    keep = {p.signature: p for p in zero_deadhead}
    for mu, p in _negative_only(alternatives, duals, deadhead_penalty):
        keep[p.signature] = p
    return [keep[s] for s in sorted(keep)]


def cgu_generate(
    primal: PrimalSolution,
    duals: DualSolution,
    duty_set: DutySet,
    graph: DutyGraph,
    network: FlightNetwork,
    rules: RuleSet,
    model: CostModel,
    deadhead_penalty: Money,
    thresholds: StrategyThresholds,
    rng: np.random.Generator,
    basis: str = "flying",
    cap: int = DEFAULT_PAIRING_CAP,
) -> list[Pairing]:
    """Crew-utilization enhancement strategy.

    Harvests flights from the support, category by flight-count, preferring
    pairings with a high dual component, then keeps only the re-combined
    pairings whose utilization ratio reaches the candidate median.
    """
    target = draw_random(rng, thresholds.th_u, thresholds.half_selector)
    by_count: dict[int, list[tuple[Pairing, float]]] = {}
    for p, x in zip(primal.support, primal.support_x):
        by_count.setdefault(p.num_flights, []).append((p, x))
    if not by_count:
        return []
    k_min, k_max = min(by_count), max(by_count)
    quota = target if k_max == k_min else target / (k_max - k_min)

    harvest: set[int] = set()
    remaining = sorted(by_count)
    while len(harvest) < target and remaining:
        pick = int(rng.integers(0, len(remaining)))
        k = remaining.pop(pick)
        entries = by_count[k]
        ranked = sorted(
            entries,
            key=lambda e: (-reduced_cost(e[0], duals, deadhead_penalty)[1],
                           -e[1], e[0].signature),
        )
        counter = 0
        for p, _ in ranked:
            harvest.update(p.flight_set)
            counter += p.num_flights
            if counter >= quota:
                break

    candidates = enumerate_pairings_covering_flights(
        harvest, duty_set, graph, network, rules, model, cap=cap)
    negatives = [p for _, p in _negative_only(candidates, duals, deadhead_penalty)]
    if not negatives:
        return []
    gammas = [crew_utilization_ratio(p, rules, basis) for p in negatives]
    median = sorted(gammas)[(len(gammas) - 1) // 2]  # lower median
    out = [p for p, g in zip(negatives, gammas) if g >= median]
    out.sort(key=lambda p: p.signature)
    return out


def cga_update_and_generate(
    archive: Archive,
    newly_seen: Sequence[Pairing],
    duals: DualSolution,
    network: FlightNetwork,
    model: CostModel,
    deadhead_penalty: Money,
    thresholds: StrategyThresholds,
    rng: np.random.Generator,
) -> tuple[Archive, list[Pairing]]:
    """Archiving strategy.

    Folds the previous iteration's input pairings into the archive, ranks
    flight-pairs by the reduced-cost estimator, then re-inducts up to
    ``Random`` random pairings per bucket until ``Random**2`` are selected.
    """
    archive.update(newly_seen)
    count = draw_random(rng, thresholds.th_a, thresholds.half_selector)

    keyed = []
    for (m, n) in archive.by_pair:
        eta = reduced_cost_estimator(network.flight(m), network.flight(n),
                                     duals, model)
        keyed.append((eta, (m, n)))
    keyed.sort()

    selected: dict[tuple[int, ...], Pairing] = {}
    for _, key in keyed:
        bucket = sorted(archive.by_pair[key].values(), key=lambda p: p.signature)
        k = min(count, len(bucket))
        if k > 0:
            picks = rng.choice(len(bucket), size=k, replace=False)
            for i in sorted(picks):
                selected[bucket[i].signature] = bucket[i]
        if len(selected) >= count * count:
            break

    out = [p for _, p in _negative_only(list(selected.values()), duals,
                                        deadhead_penalty)]
    out.sort(key=lambda p: p.signature)
    return archive, out


def cgr_generate(
    duty_set: DutySet,
    graph: DutyGraph,
    network: FlightNetwork,
    rules: RuleSet,
    model: CostModel,
    duals: DualSolution,
    deadhead_penalty: Money,
    thresholds: StrategyThresholds,
    rng: np.random.Generator,
    cap: int = DEFAULT_PAIRING_CAP,
    threshold_override: Optional[int] = None,
) -> list[Pairing]:
    """Random exploration: a duty sample per base, negative reduced cost only."""
    threshold = threshold_override if threshold_override is not None else thresholds.th_r
    count = draw_random(rng, threshold, thresholds.half_selector)
    seed = _sample_duties_per_base(duty_set, count, rng)
    candidates = enumerate_pairings_from_duties(
        seed, duty_set, graph, network, rules, model, cap=cap)
    out = [p for _, p in _negative_only(candidates, duals, deadhead_penalty)]
    out.sort(key=lambda p: p.signature)
    return out


@dataclass
class CgContext:
    """Everything one heuristic invocation needs, bundled for reuse."""

    duty_set: DutySet
    graph: DutyGraph
    network: FlightNetwork
    rules: RuleSet
    model: CostModel
    deadhead_penalty: Money
    primal: PrimalSolution
    duals: DualSolution
    archive: Archive
    newly_seen: Sequence[Pairing]
    thresholds: StrategyThresholds
    seed: int
    interaction: int
    iteration: int
    enabled: frozenset[str] = frozenset("DUAR")
    utilization_basis: str = "flying"
    cap: int = DEFAULT_PAIRING_CAP
    cgr_threshold_override: Optional[int] = field(default=None)


def cg_heuristic(ctx: CgContext) -> CgBatch:
    """Run the enabled strategies in D, U, A, R order and merge their output.

    The archive is always folded forward, even when the archiving strategy is
    not enabled for this run, so ablations stay comparable.
    """
    rng = lambda tag: strategy_rng(ctx.seed, ctx.interaction, ctx.iteration, tag)

    cgd: list[Pairing] = []
    if "D" in ctx.enabled:
        cgd = cgd_generate(ctx.duty_set, ctx.graph, ctx.network, ctx.rules,
                           ctx.model, ctx.primal.support, ctx.duals,
                           ctx.deadhead_penalty, ctx.thresholds, rng("D"),
                           cap=ctx.cap)
    cgu: list[Pairing] = []
    if "U" in ctx.enabled:
        cgu = cgu_generate(ctx.primal, ctx.duals, ctx.duty_set, ctx.graph,
                           ctx.network, ctx.rules, ctx.model,
                           ctx.deadhead_penalty, ctx.thresholds, rng("U"),
                           basis=ctx.utilization_basis, cap=ctx.cap)
    if "A" in ctx.enabled:
        _, cga = cga_update_and_generate(ctx.archive, ctx.newly_seen, ctx.duals,
                                         ctx.network, ctx.model,
                                         ctx.deadhead_penalty, ctx.thresholds,
                                         rng("A"))
    else:
        ctx.archive.update(ctx.newly_seen)
        cga = []
    cgr: list[Pairing] = []
    if "R" in ctx.enabled:
        cgr = cgr_generate(ctx.duty_set, ctx.graph, ctx.network, ctx.rules,
                           ctx.model, ctx.duals, ctx.deadhead_penalty,
                           ctx.thresholds, rng("R"), cap=ctx.cap,
                           threshold_override=ctx.cgr_threshold_override)
    return CgBatch.assemble(cgd, cgu, cga, cgr)
