import pytest
from hypothesis import given, strategies as st

from crewopt.model import (
    VIOLATION_CONNECTION_CITY,
    VIOLATION_DUTY,
    VIOLATION_OVERNIGHT_REST,
    VIOLATION_SIT_TIME,
    VIOLATION_SPECIAL,
    VIOLATION_START_END_CITY,
    VIOLATION_TAFB,
    CostModel,
    CoverageError,
    Duty,
    Flight,
    FlightNetwork,
    RuleSet,
    UnknownFlightError,
    pairing_cost,
    per_hour,
    solution_objective,
    validate_pairing,
)


def make_duty(flying, num_flights=1, start=0, elapsed=None):
    end = start + (elapsed if elapsed is not None else flying)
    return Duty(flight_ids=tuple(range(1, num_flights + 1)), start=start,
                end=end, flying=flying, origin="A", destination="B")


class TestTypes:
    def test_flight_invariants(self):
        with pytest.raises(ValueError):
            Flight(id=1, origin="A", destination="B", departure=100, arrival=100)
        with pytest.raises(ValueError):
            Flight(id=1, origin="A", destination="A", departure=0, arrival=60)

    def test_ruleset_window_chain(self):
        with pytest.raises(ValueError):
            RuleSet(min_sit=100, max_sit=50)
        with pytest.raises(ValueError):
            RuleSet(max_sit=600, min_overnight=540)
        with pytest.raises(ValueError):
            RuleSet(max_flights_per_duty=0)

    def test_cost_model_rejects_negative_rates(self):
        with pytest.raises(ValueError):
            CostModel(flying_rate=-1)

    def test_network_requires_dense_ids(self):
        flights = [
            Flight(id=1, origin="A", destination="B", departure=0, arrival=60),
            Flight(id=3, origin="B", destination="A", departure=120, arrival=180),
        ]
        with pytest.raises(ValueError):
            FlightNetwork.build(flights, ["A"])

    def test_network_base_must_be_touched(self):
        flights = [
            Flight(id=1, origin="A", destination="B", departure=0, arrival=60),
            Flight(id=2, origin="B", destination="A", departure=120, arrival=180),
        ]
        with pytest.raises(ValueError):
            FlightNetwork.build(flights, ["Z"])

    def test_network_sorted_and_days(self, round_trip_network):
        deps = [f.departure for f in round_trip_network.flights]
        assert deps == sorted(deps)
        assert round_trip_network.schedule_days == 1
        assert round_trip_network.airports == {"BASE", "X"}


class TestValidatePairing:
    def test_single_flight_fails_end_city(self, round_trip_network, rules, cost_model):
        verdict = validate_pairing([1], "BASE", round_trip_network, rules, cost_model)
        assert not verdict.ok
        assert verdict.violation == VIOLATION_START_END_CITY

    def test_round_trip_is_legal(self, round_trip_network, rules, cost_model):
        # Hand check: gap 60 in [30, 240] -> one duty; 2 flights <= 6;
        # elapsed (660+30)-(480-45)=255 <= 840; flying 120 <= 480; tafb 255.
        verdict = validate_pairing([1, 2], "BASE", round_trip_network, rules, cost_model)
        assert verdict.ok
        p = verdict.pairing
        assert p.num_duties == 1
        assert p.tafb == 255
        assert p.duties[0].flying == 120
        assert p.flight_ids == (1, 2)
        # flying 5000*120//60 + meal 350*255//60 + excess 4000*120//60
        assert p.cost == 10000 + 1487 + 8000

    def test_min_sit_violation(self, round_trip_network, cost_model, rules):
        import dataclasses
        tight = dataclasses.replace(rules, min_sit=90)
        verdict = validate_pairing([1, 2], "BASE", round_trip_network, tight, cost_model)
        assert verdict.violation == VIOLATION_SIT_TIME

    def test_connection_city_checked_first(self, round_trip_network, rules, cost_model):
        # f1 -> f1 breaks the connection chain and also the sit window; the
        # connection-city class must win because it is checked first.
        verdict = validate_pairing([1, 1], "BASE", round_trip_network, rules, cost_model)
        assert verdict.violation == VIOLATION_CONNECTION_CITY

    def test_unknown_flight_is_input_error(self, round_trip_network, rules, cost_model):
        with pytest.raises(UnknownFlightError):
            validate_pairing([1, 99], "BASE", round_trip_network, rules, cost_model)
        with pytest.raises(ValueError):
            validate_pairing([], "BASE", round_trip_network, rules, cost_model)

    def test_overnight_split_and_rest_window(self, two_day_network, rules, cost_model):
        # Gap f2->f3 is 1920-660=1260; rest 1260-30-45=1185 in [540, 1440].
        verdict = validate_pairing([1, 2, 3, 4], "BASE", two_day_network, rules, cost_model)
        assert verdict.ok
        assert verdict.pairing.num_duties == 2
        assert verdict.pairing.overnights == 1

    def test_rest_too_short(self, two_day_network, cost_model, rules):
        import dataclasses
        # Rest of 1185 now falls below a 1200-minute floor.
        strict = dataclasses.replace(rules, min_overnight=1200, max_sit=240)
        verdict = validate_pairing([1, 2, 3, 4], "BASE", two_day_network, strict, cost_model)
        assert verdict.violation == VIOLATION_OVERNIGHT_REST

    def test_same_city_overnight_rule(self, two_day_network, cost_model, rules):
        import dataclasses
        special = dataclasses.replace(rules, forbid_same_city_overnight=True)
        # The overnight happens at BASE itself (duty 1 returns home).
        verdict = validate_pairing([1, 2, 3, 4], "BASE", two_day_network, special, cost_model)
        assert verdict.violation == VIOLATION_SPECIAL

    def test_duty_limits(self, two_day_network, cost_model, rules):
        import dataclasses
        capped = dataclasses.replace(rules, max_duties_per_pairing=1)
        verdict = validate_pairing([1, 2, 3, 4], "BASE", two_day_network, capped, cost_model)
        assert verdict.violation == VIOLATION_DUTY

    def test_tafb_limit(self, two_day_network, cost_model, rules):
        import dataclasses
        short = dataclasses.replace(rules, max_tafb=600)
        verdict = validate_pairing([1, 2, 3, 4], "BASE", two_day_network, short, cost_model)
        assert verdict.violation == VIOLATION_TAFB

    def test_validator_is_pure(self, round_trip_network, rules, cost_model):
        a = validate_pairing([1, 2], "BASE", round_trip_network, rules, cost_model)
        b = validate_pairing([1, 2], "BASE", round_trip_network, rules, cost_model)
        assert a == b


class TestPairingCost:
    def test_zero_model(self, rules):
        model = CostModel(0, 0, 0, 0, 0, 0)
        duty = make_duty(flying=120, elapsed=200)
        assert pairing_cost([duty], tafb=200, overnights=0,
                            model=model, rules=rules) == 0

    def test_excess_pay_example(self):
        # flying 2h at 100/h plus excess (5h-2h) at 10/h -> 200 + 30.
        model = CostModel(flying_rate=100, hotel_cost=0, meal_rate=0,
                          excess_pay_rate=10, deadhead_penalty=0,
                          soft_cost_aircraft_change=0)
        rules = RuleSet(guaranteed_hours_per_duty=300)
        duty = make_duty(flying=120, elapsed=200)
        assert pairing_cost([duty], tafb=200, overnights=0,
                            model=model, rules=rules) == 230

    def test_two_duty_example(self):
        # flying (3h+4h) at 50/h + hotel 80 + excess (4h-3h) at 20/h -> 450.
        model = CostModel(flying_rate=50, hotel_cost=80, meal_rate=0,
                          excess_pay_rate=20, deadhead_penalty=0,
                          soft_cost_aircraft_change=0)
        rules = RuleSet(guaranteed_hours_per_duty=240)
        duties = [make_duty(flying=180, elapsed=200),
                  make_duty(flying=240, elapsed=250, start=800)]
        assert pairing_cost(duties, tafb=1050, overnights=1,
                            model=model, rules=rules) == 450

    def test_preconditions(self, rules, cost_model):
        with pytest.raises(ValueError):
            pairing_cost([], tafb=0, overnights=0, model=cost_model, rules=rules)
        duty = make_duty(flying=100, elapsed=100)
        with pytest.raises(ValueError):
            pairing_cost([duty], tafb=50, overnights=0, model=cost_model, rules=rules)

    @given(bump=st.integers(min_value=0, max_value=10_000))
    def test_monotone_in_flying_rate(self, bump):
        rules = RuleSet()
        lo = CostModel(flying_rate=1000)
        hi = CostModel(flying_rate=1000 + bump)
        duty = make_duty(flying=137, elapsed=300)
        assert (pairing_cost([duty], 300, 0, hi, rules)
                >= pairing_cost([duty], 300, 0, lo, rules))

    def test_per_hour_floor(self):
        assert per_hour(100, 90) == 150
        assert per_hour(100, 59) == 98  # floor, stays integral


class TestSolutionObjective:
    def _pairing(self, network, ids, rules, model):
        verdict = validate_pairing(ids, "BASE", network, rules, model)
        assert verdict.ok
        return verdict.pairing

    def test_partition_has_no_deadheads(self, round_trip_network, rules, cost_model):
        p = self._pairing(round_trip_network, [1, 2], rules, cost_model)
        objective, deadheads = solution_objective([p], round_trip_network, 1000)
        assert objective == p.cost
        assert deadheads == 0

    def test_single_overlap(self, rules, cost_model):
        flights = [
            Flight(id=1, origin="BASE", destination="X", departure=480, arrival=540),
            Flight(id=2, origin="X", destination="BASE", departure=600, arrival=660),
            Flight(id=3, origin="X", destination="BASE", departure=700, arrival=760),
        ]
        net = FlightNetwork.build(flights, ["BASE"])
        a = self._pairing(net, [1, 2], rules, cost_model)
        b = self._pairing(net, [1, 3], rules, cost_model)
        objective, deadheads = solution_objective([a, b], net, 1000)
        assert deadheads == 1
        assert objective == a.cost + b.cost + 1000

    def test_missing_flight_errors(self, round_trip_network, rules, cost_model):
        with pytest.raises(CoverageError) as err:
            solution_objective([], round_trip_network, 1000)
        assert err.value.missing == (1, 2)

    @given(psi=st.integers(min_value=0, max_value=10**6))
    def test_linear_in_deadhead_penalty(self, psi):
        rules, model = RuleSet(), CostModel()
        flights = [
            Flight(id=1, origin="BASE", destination="X", departure=480, arrival=540),
            Flight(id=2, origin="X", destination="BASE", departure=600, arrival=660),
            Flight(id=3, origin="X", destination="BASE", departure=700, arrival=760),
        ]
        net = FlightNetwork.build(flights, ["BASE"])
        a = self._pairing(net, [1, 2], rules, model)
        b = self._pairing(net, [1, 3], rules, model)
        z0, dh = solution_objective([a, b], net, 0)
        z, dh2 = solution_objective([a, b], net, psi)
        assert dh2 == dh == 1
        assert z == z0 + psi * dh
