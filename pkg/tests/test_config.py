import pytest

from crewopt.config import ConfigError, load_config, parse_config
from crewopt.model import CostModel, RuleSet


def test_defaults_from_empty_document():
    rules, cost = parse_config("")
    assert rules == RuleSet()
    assert cost == CostModel()


def test_overrides():
    rules, cost = parse_config(
        """
rules:
  min_sit: 20
  max_sit: 300
cost:
  flying_rate: 7000
  deadhead_penalty: 50000
"""
    )
    assert rules.min_sit == 20
    assert rules.max_sit == 300
    assert cost.flying_rate == 7000
    assert cost.deadhead_penalty == 50000
    assert cost.hotel_cost == CostModel().hotel_cost


def test_unknown_key_is_error():
    with pytest.raises(ConfigError, match="unknown keys"):
        parse_config("rules:\n  min_sitt: 10\n")
    with pytest.raises(ConfigError, match="unknown config sections"):
        parse_config("rulez:\n  min_sit: 10\n")


def test_non_integer_value_rejected():
    with pytest.raises(ConfigError):
        parse_config("cost:\n  flying_rate: fast\n")


def test_invalid_combination_reported():
    with pytest.raises(ConfigError, match="invalid 'rules'"):
        parse_config("rules:\n  min_sit: 500\n  max_sit: 100\n")


def test_load_from_file(tmp_path):
    path = tmp_path / "params.yaml"
    path.write_text("rules:\n  briefing: 60\n")
    rules, _ = load_config(path)
    assert rules.briefing == 60
