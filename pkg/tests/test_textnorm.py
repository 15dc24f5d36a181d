from __future__ import annotations

import json
import unicodedata

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alignkit.errors import ConfigError
from alignkit.textnorm import (
    ARABIC_HARAKAT,
    FoldCase,
    MapChars,
    NormRuleSet,
    RemoveClass,
    StripPunct,
    load_rule_set,
    normalize,
    parse_rule_set,
)

_EMPTY = NormRuleSet("und")
_ARABIC = NormRuleSet("ar", (RemoveClass(ARABIC_HARAKAT), StripPunct()))
_FOLDING = NormRuleSet("en", (FoldCase(), StripPunct()))


def test_whitespace_collapse_always_on():
    assert normalize("  a \t b\n\nc  ", _EMPTY) == "a b c"
    assert normalize(" x y", _EMPTY) == "x y"  # unicode spaces too


def test_empty_input():
    assert normalize("", _EMPTY) == ""
    assert normalize("   \n ", _EMPTY) == ""


def test_nfc_applied_before_rules():
    # decomposed e + combining acute must compose, so a mapping keyed on
    # the composed character fires either way
    rs = NormRuleSet("fr", (MapChars((("é", "e"),)),))
    assert normalize("café", rs) == "cafe"
    assert normalize("café", rs) == "cafe"


def test_case_fold_off_by_default():
    assert normalize("MiXeD Case", _EMPTY) == "MiXeD Case"


def test_case_fold_rule():
    assert normalize("STRASSE strasse Straße", _FOLDING) == "strasse strasse strasse"


def test_strip_punct():
    assert normalize("well, then: yes!", _FOLDING) == "well then yes"
    # punctuation only -> empty
    assert normalize("?!...", _FOLDING) == ""


def test_harakat_removal_enumerated():
    # derive the expectation by filtering the configured class directly
    text = "اَلْكِتَابُ"
    want = "".join(c for c in text if c not in set(ARABIC_HARAKAT))
    assert normalize(text, _ARABIC) == want
    assert len(normalize(text, _ARABIC)) == 6


def test_rules_apply_in_order():
    # fold first makes the mapping on the lowercase form fire
    rs1 = NormRuleSet("x", (FoldCase(), MapChars((("a", "b"),))))
    rs2 = NormRuleSet("x", (MapChars((("a", "b"),)), FoldCase()))
    assert normalize("A", rs1) == "b"
    assert normalize("A", rs2) == "a"


def test_map_pairs_sequential():
    rs = NormRuleSet("x", (MapChars((("a", "b"), ("b", "c"))),))
    assert normalize("ab", rs) == "cc"


class TestIdempotence:
    @settings(max_examples=300)
    @given(st.text(max_size=80))
    def test_empty_set(self, s):
        once = normalize(s, _EMPTY)
        assert normalize(once, _EMPTY) == once

    @settings(max_examples=300)
    @given(st.text(max_size=80))
    def test_folding_set(self, s):
        once = normalize(s, _FOLDING)
        assert normalize(once, _FOLDING) == once

    @settings(max_examples=300)
    @given(st.text(alphabet=st.characters(min_codepoint=0x20, max_codepoint=0x06FF), max_size=80))
    def test_arabic_set(self, s):
        once = normalize(s, _ARABIC)
        assert normalize(once, _ARABIC) == once


@given(st.text(max_size=80))
def test_removal_only_never_lengthens(s):
    # NFC can shrink but not grow scalar count for these inputs; removal
    # and collapse only delete
    out = normalize(s, _ARABIC)
    assert len(out) <= len(unicodedata.normalize("NFC", s))


class TestParsing:
    def test_roundtrip(self):
        doc = _ARABIC.describe()
        again = parse_rule_set(doc)
        assert again == _ARABIC

    def test_loads_from_file(self, tmp_path):
        p = tmp_path / "rules.json"
        p.write_text(json.dumps(_FOLDING.describe()), encoding="utf-8")
        rs = load_rule_set(p)
        assert rs == _FOLDING
        assert rs.language_code == "en"

    def test_ranges(self):
        rs = parse_rule_set(
            {"language": "ar", "rules": [{"kind": "remove_class", "ranges": [["064B", "0652"]]}]}
        )
        assert rs.rules[0] == RemoveClass(ARABIC_HARAKAT)

    def test_unknown_kind_names_the_rule(self):
        with pytest.raises(ConfigError, match="rule 1"):
            parse_rule_set(
                {"language": "x", "rules": [{"kind": "fold_case"}, {"kind": "nope"}]}
            )

    def test_bad_pairs_rejected(self):
        with pytest.raises(ConfigError, match="rule 0"):
            parse_rule_set({"language": "x", "rules": [{"kind": "map", "pairs": [["a"]]}]})
        with pytest.raises(ConfigError, match="rule 0"):
            parse_rule_set({"language": "x", "rules": [{"kind": "map", "pairs": []}]})

    def test_missing_language_rejected(self):
        with pytest.raises(ConfigError):
            parse_rule_set({"rules": []})

    def test_missing_file_is_config_error(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_rule_set(tmp_path / "absent.json")

    def test_bad_json_is_config_error(self, tmp_path):
        p = tmp_path / "broken.json"
        p.write_text("{not json", encoding="utf-8")
        with pytest.raises(ConfigError, match="not valid JSON"):
            load_rule_set(p)
