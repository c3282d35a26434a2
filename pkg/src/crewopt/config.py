"""Loading of rule and cost parameters from a YAML config document.

One document carries both parameter groups::

    rules:
      min_sit: 30          # minutes
      max_sit: 240
    cost:
      flying_rate: 5000    # cents per hour

Unknown keys are errors, so typos never silently fall back to defaults.
"""

from __future__ import annotations

import dataclasses
from pathlib import Path
from typing import Union

import yaml

from .model import CostModel, RuleSet


class ConfigError(ValueError):
    pass


_SECTIONS = {"rules": RuleSet, "cost": CostModel}


def parse_config(text: str) -> tuple[RuleSet, CostModel]:
    """Parse a YAML document into (RuleSet, CostModel); absent keys keep defaults."""
    raw = yaml.safe_load(text)
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("config document must be a mapping")
    unknown_sections = set(raw) - set(_SECTIONS)
    if unknown_sections:
        raise ConfigError(f"unknown config sections: {sorted(unknown_sections)}")
    built = {}
    for section, cls in _SECTIONS.items():
        entries = raw.get(section) or {}
        if not isinstance(entries, dict):
            raise ConfigError(f"section {section!r} must be a mapping")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(entries) - known
        if unknown:
            raise ConfigError(f"unknown keys in {section!r}: {sorted(unknown)}")
        for key, value in entries.items():
            if isinstance(value, bool):
                continue
            if not isinstance(value, int):
                raise ConfigError(f"{section}.{key} must be an integer, got {value!r}")
        try:
            built[section] = cls(**entries)
        except ValueError as exc:
            raise ConfigError(f"invalid {section!r} values: {exc}") from exc
    return built["rules"], built["cost"]


def load_config(path: Union[str, Path]) -> tuple[RuleSet, CostModel]:
    return parse_config(Path(path).read_text())
