import pytest

from crewopt.model import CostModel, Flight, FlightNetwork, RuleSet


@pytest.fixture
def rules():
    return RuleSet(
        min_sit=30,
        max_sit=240,
        min_overnight=540,
        max_overnight=1440,
        briefing=45,
        debriefing=30,
        max_flights_per_duty=6,
        max_duty_elapsed=840,
        max_duty_flying=480,
        max_duties_per_pairing=4,
        max_tafb=5760,
        forbid_same_city_overnight=False,
        guaranteed_hours_per_duty=240,
    )


@pytest.fixture
def cost_model():
    return CostModel(
        flying_rate=5000,
        hotel_cost=8000,
        meal_rate=350,
        excess_pay_rate=4000,
        deadhead_penalty=100000,
        soft_cost_aircraft_change=0,
    )


@pytest.fixture
def round_trip_network():
    """BASE->X 08:00-09:00 and X->BASE 10:00-11:00: the canonical 2-flight
    round trip used throughout the hand-checked examples."""
    flights = [
        Flight(id=1, origin="BASE", destination="X", departure=480, arrival=540),
        Flight(id=2, origin="X", destination="BASE", departure=600, arrival=660),
    ]
    return FlightNetwork.build(flights, ["BASE"])


@pytest.fixture
def two_day_network():
    """Two round trips on consecutive days, overnight-connectable at X."""
    flights = [
        Flight(id=1, origin="BASE", destination="X", departure=480, arrival=540),
        Flight(id=2, origin="X", destination="BASE", departure=600, arrival=660),
        Flight(id=3, origin="BASE", destination="X", departure=1920, arrival=1980),
        Flight(id=4, origin="X", destination="BASE", departure=2040, arrival=2100),
    ]
    return FlightNetwork.build(flights, ["BASE"])
