"""Questionnaire-driven interpretation of a measured induration.

Risk factors collected from the patient questionnaire select the positivity
threshold (5, 10, or 15 mm); a diameter at or above the threshold reads
positive. Rules are evaluated in ascending-threshold order with first match
winning, ending in a catch-all 15 mm rule, so adding risk factors can never
raise a patient's threshold.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from enum import Enum
from pathlib import Path

from .errors import FileReadError, InputError

QUESTIONNAIRE_FIELDS = (
    "hiv_positive",
    "recent_tb_contact",
    "immunosuppressed",
    "organ_transplant",
    "fibrotic_chest_xray",
    "recent_immigrant_high_burden",
    "injection_drug_use",
    "high_risk_congregate_resident",
    "mycobacteriology_lab_worker",
    "child_under_4",
    "lived_low_incidence_area",
)


@dataclass(frozen=True)
class Questionnaire:
    """Patient risk-factor answers; every field must be answered explicitly."""

    hiv_positive: bool
    recent_tb_contact: bool
    immunosuppressed: bool
    organ_transplant: bool
    fibrotic_chest_xray: bool
    recent_immigrant_high_burden: bool
    injection_drug_use: bool
    high_risk_congregate_resident: bool
    mycobacteriology_lab_worker: bool
    child_under_4: bool
    lived_low_incidence_area: bool

    def __post_init__(self):
        for f in fields(self):
            if not isinstance(getattr(self, f.name), bool):
                raise ValueError(f"questionnaire field {f.name} must be a boolean")

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in QUESTIONNAIRE_FIELDS}

    @classmethod
    def from_dict(cls, d: dict) -> "Questionnaire":
        """Parse the flat JSON-object exchange form.

        Raises:
            InputError: missing, unknown, or non-boolean fields.
        """
        missing = [name for name in QUESTIONNAIRE_FIELDS if name not in d]
        if missing:
            raise InputError(f"questionnaire missing fields: {', '.join(missing)}")
        unknown = [key for key in d if key not in QUESTIONNAIRE_FIELDS]
        if unknown:
            raise InputError(f"questionnaire has unknown fields: {', '.join(unknown)}")
        bad = [name for name in QUESTIONNAIRE_FIELDS if not isinstance(d[name], bool)]
        if bad:
            raise InputError(f"questionnaire fields must be booleans: {', '.join(bad)}")
        return cls(**{name: d[name] for name in QUESTIONNAIRE_FIELDS})

    @classmethod
    def all_false(cls) -> "Questionnaire":
        return cls(**{name: False for name in QUESTIONNAIRE_FIELDS})


@dataclass(frozen=True)
class ThresholdRule:
    """One rule: matches when any listed questionnaire field is true.

    An empty ``any_of`` matches every questionnaire (the catch-all).
    """

    rule_id: str
    threshold_mm: int
    any_of: tuple[str, ...] = ()

    def __post_init__(self):
        if self.threshold_mm not in (5, 10, 15):
            raise ValueError("threshold must be 5, 10, or 15 mm")
        for name in self.any_of:
            if name not in QUESTIONNAIRE_FIELDS:
                raise ValueError(f"unknown questionnaire field in rule: {name}")

    def matches(self, q: Questionnaire) -> bool:
        if not self.any_of:
            return True
        return any(getattr(q, name) for name in self.any_of)


@dataclass(frozen=True)
class RuleTable:
    """Ordered threshold rules; first match wins."""

    rules: tuple[ThresholdRule, ...]

    def __post_init__(self):
        if not self.rules:
            raise ValueError("rule table cannot be empty")
        thresholds = [r.threshold_mm for r in self.rules]
        if thresholds != sorted(thresholds):
            raise ValueError("rules must be ordered by ascending threshold")
        if self.rules[-1].any_of or self.rules[-1].threshold_mm != 15:
            raise ValueError("final rule must be a 15 mm catch-all")
        ids = [r.rule_id for r in self.rules]
        if len(set(ids)) != len(ids):
            raise ValueError("rule ids must be unique")

    def to_dict(self) -> dict:
        return {
            "rules": [
                {
                    "rule_id": r.rule_id,
                    "threshold_mm": r.threshold_mm,
                    "any_of": list(r.any_of),
                }
                for r in self.rules
            ]
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RuleTable":
        try:
            rules = tuple(
                ThresholdRule(
                    rule_id=str(r["rule_id"]),
                    threshold_mm=int(r["threshold_mm"]),
                    any_of=tuple(r.get("any_of", ())),
                )
                for r in d["rules"]
            )
            return cls(rules)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad rule table: {exc}") from exc

    @classmethod
    def load(cls, path: str | Path) -> "RuleTable":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise FileReadError(f"cannot read {path}: {exc}") from exc
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON: {exc}") from exc


#: CDC-style risk grouping. The 10 mm group includes having lived in a low
#: incidence TB area, mirroring the questionnaire checkbox this toolkit's
#: capture flow exposes.
DEFAULT_RULES = RuleTable(
    (
        ThresholdRule(
            "high-risk-5mm",
            5,
            (
                "hiv_positive",
                "recent_tb_contact",
                "immunosuppressed",
                "organ_transplant",
                "fibrotic_chest_xray",
            ),
        ),
        ThresholdRule(
            "moderate-risk-10mm",
            10,
            (
                "recent_immigrant_high_burden",
                "injection_drug_use",
                "high_risk_congregate_resident",
                "mycobacteriology_lab_worker",
                "child_under_4",
                "lived_low_incidence_area",
            ),
        ),
        ThresholdRule("default-15mm", 15),
    )
)


class TstResult(Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


@dataclass(frozen=True)
class Assessment:
    diameter_mm: float
    threshold_mm: int
    result: TstResult
    rule_id: str

    def __post_init__(self):
        expected = (
            TstResult.POSITIVE
            if self.diameter_mm >= self.threshold_mm
            else TstResult.NEGATIVE
        )
        if self.result is not expected:
            raise ValueError("result inconsistent with diameter and threshold")

    def to_dict(self) -> dict:
        return {
            "diameter_mm": self.diameter_mm,
            "threshold_mm": self.threshold_mm,
            "result": self.result.value,
            "rule_id": self.rule_id,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Assessment":
        return cls(
            diameter_mm=float(d["diameter_mm"]),
            threshold_mm=int(d["threshold_mm"]),
            result=TstResult(d["result"]),
            rule_id=str(d["rule_id"]),
        )


def determine_threshold(
    q: Questionnaire, rules: RuleTable = DEFAULT_RULES
) -> tuple[int, str]:
    """Threshold and rule id of the first rule matching the questionnaire."""
    for rule in rules.rules:
        if rule.matches(q):
            return rule.threshold_mm, rule.rule_id
    raise AssertionError("unreachable: rule table ends in a catch-all")


def classify(
    diameter_mm: float, q: Questionnaire, rules: RuleTable = DEFAULT_RULES
) -> Assessment:
    """Classify a measured diameter: positive iff it reaches the threshold."""
    if diameter_mm < 0:
        raise ValueError("diameter must be non-negative")
    threshold, rule_id = determine_threshold(q, rules)
    result = TstResult.POSITIVE if diameter_mm >= threshold else TstResult.NEGATIVE
    return Assessment(diameter_mm, threshold, result, rule_id)
