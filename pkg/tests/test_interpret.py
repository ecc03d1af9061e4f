from __future__ import annotations

import itertools
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tstkit.errors import InputError
from tstkit.interpret import (
    DEFAULT_RULES,
    QUESTIONNAIRE_FIELDS,
    Questionnaire,
    RuleTable,
    ThresholdRule,
    TstResult,
    classify,
    determine_threshold,
)

FIVE_MM_FLAGS = (
    "hiv_positive",
    "recent_tb_contact",
    "immunosuppressed",
    "organ_transplant",
    "fibrotic_chest_xray",
)
TEN_MM_FLAGS = (
    "recent_immigrant_high_burden",
    "injection_drug_use",
    "high_risk_congregate_resident",
    "mycobacteriology_lab_worker",
    "child_under_4",
    "lived_low_incidence_area",
)


def q_with(**flags) -> Questionnaire:
    d = {name: False for name in QUESTIONNAIRE_FIELDS}
    d.update(flags)
    return Questionnaire(**d)


def expected_threshold(q: Questionnaire) -> int:
    # independent restatement of the risk grouping
    if any(getattr(q, f) for f in FIVE_MM_FLAGS):
        return 5
    if any(getattr(q, f) for f in TEN_MM_FLAGS):
        return 10
    return 15


class TestDetermineThreshold:
    def test_all_false_catch_all(self):
        assert determine_threshold(q_with()) == (15, "default-15mm")

    def test_low_incidence_checkbox_gives_10(self):
        t, rule = determine_threshold(q_with(lived_low_incidence_area=True))
        assert t == 10

    def test_first_match_precedence(self):
        q = q_with(hiv_positive=True, lived_low_incidence_area=True)
        t, _ = determine_threshold(q)
        assert t == 5

    def test_exhaustive_all_questionnaires(self):
        thresholds_seen = set()
        for bits in itertools.product([False, True], repeat=len(QUESTIONNAIRE_FIELDS)):
            q = Questionnaire(**dict(zip(QUESTIONNAIRE_FIELDS, bits)))
            t, _ = determine_threshold(q)
            assert t == expected_threshold(q)
            thresholds_seen.add(t)
        assert thresholds_seen == {5, 10, 15}


class TestClassify:
    def test_fig4_middle_9_23_negative(self):
        a = classify(9.23, q_with(lived_low_incidence_area=True))
        assert a.threshold_mm == 10 and a.result is TstResult.NEGATIVE

    def test_fig4_left_15_00_positive(self):
        a = classify(15.00, q_with())
        assert a.threshold_mm == 15 and a.result is TstResult.POSITIVE

    def test_fig4_right_4_97_negative(self):
        a = classify(4.97, q_with(hiv_positive=True))
        assert a.threshold_mm == 5 and a.result is TstResult.NEGATIVE

    def test_boundary_equal_is_positive(self):
        for t, q in ((5, q_with(hiv_positive=True)),
                     (10, q_with(child_under_4=True)),
                     (15, q_with())):
            assert classify(float(t), q).result is TstResult.POSITIVE

    def test_negative_diameter_rejected(self):
        with pytest.raises(ValueError):
            classify(-0.1, q_with())

    @given(st.floats(0, 30, allow_nan=False), st.floats(0, 30, allow_nan=False),
           st.integers(0, 2**11 - 1))
    @settings(max_examples=300)
    def test_monotonic_in_diameter(self, d1, d2, qbits):
        lo, hi = sorted((d1, d2))
        q = Questionnaire(
            **{f: bool(qbits >> i & 1) for i, f in enumerate(QUESTIONNAIRE_FIELDS)}
        )
        if classify(lo, q).result is TstResult.POSITIVE:
            assert classify(hi, q).result is TstResult.POSITIVE

    def test_adding_risk_flags_never_raises_threshold(self):
        rng = random.Random(99)
        for _ in range(500):
            bits = [rng.random() < 0.3 for _ in QUESTIONNAIRE_FIELDS]
            q1 = Questionnaire(**dict(zip(QUESTIONNAIRE_FIELDS, bits)))
            extra = rng.randrange(len(QUESTIONNAIRE_FIELDS))
            bits2 = list(bits)
            bits2[extra] = True
            q2 = Questionnaire(**dict(zip(QUESTIONNAIRE_FIELDS, bits2)))
            assert determine_threshold(q2)[0] <= determine_threshold(q1)[0]


class TestQuestionnaireJson:
    def test_round_trip(self):
        q = q_with(hiv_positive=True, child_under_4=True)
        assert Questionnaire.from_dict(q.to_dict()) == q

    def test_missing_field_rejected(self):
        d = q_with().to_dict()
        del d["hiv_positive"]
        with pytest.raises(InputError):
            Questionnaire.from_dict(d)

    def test_unknown_field_rejected(self):
        d = q_with().to_dict()
        d["smoker"] = True
        with pytest.raises(InputError):
            Questionnaire.from_dict(d)

    def test_non_boolean_rejected(self):
        d = q_with().to_dict()
        d["hiv_positive"] = "yes"
        with pytest.raises(InputError):
            Questionnaire.from_dict(d)


class TestRuleTableConfig:
    def test_load_from_file(self, tmp_path):
        path = tmp_path / "rules.json"
        path.write_text(json.dumps(DEFAULT_RULES.to_dict()))
        assert RuleTable.load(path) == DEFAULT_RULES

    def test_descending_threshold_rejected(self):
        with pytest.raises(ValueError):
            RuleTable(
                (
                    ThresholdRule("a", 10, ("child_under_4",)),
                    ThresholdRule("b", 5, ("hiv_positive",)),
                    ThresholdRule("c", 15),
                )
            )

    def test_missing_catch_all_rejected(self):
        with pytest.raises(ValueError):
            RuleTable((ThresholdRule("a", 5, ("hiv_positive",)),))

    def test_unknown_field_rejected(self):
        with pytest.raises(ValueError):
            ThresholdRule("a", 5, ("not_a_field",))

    def test_custom_table_first_match(self):
        table = RuleTable(
            (
                ThresholdRule("kids", 5, ("child_under_4",)),
                ThresholdRule("fallback", 15),
            )
        )
        assert determine_threshold(q_with(child_under_4=True), table) == (5, "kids")
        assert determine_threshold(q_with(hiv_positive=True), table)[0] == 15
