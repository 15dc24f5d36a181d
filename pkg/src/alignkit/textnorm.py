"""Declarative, language-tagged text normalization.

A rule set is data, not code: an ordered list of small rule
descriptors that can be serialized to JSON, reviewed by a linguist,
and applied identically at corpus-build time and at evaluation time.
Applying a rule set is idempotent for every set shipped or loadable
here, and a second application is a cheap no-op in practice.

Order of operations, fixed:

1. Unicode canonical composition (NFC), so rules always see composed
   characters and cannot be bypassed by decomposed input.
2. The rules, in their configured order.
3. Whitespace collapse (always on): all runs of Unicode whitespace
   become a single ASCII space, leading/trailing whitespace dropped.

Case folding is a rule like any other and is OFF unless a rule set
asks for it: for most target languages case carries no information,
but for bicameral scripts folding is a lossy choice someone should
make explicitly.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

from .errors import ConfigError

__all__ = [
    "RemoveClass",
    "MapChars",
    "FoldCase",
    "StripPunct",
    "NormRuleSet",
    "normalize",
    "parse_rule_set",
    "load_rule_set",
    "ARABIC_HARAKAT",
]

# Arabic vowel/annotation marks: fathatan through sukun.
ARABIC_HARAKAT = "".join(chr(cp) for cp in range(0x064B, 0x0653))


@dataclass(frozen=True)
class RemoveClass:
    """Delete every codepoint in an explicitly configured class."""

    chars: str

    def apply(self, text: str) -> str:
        return text.translate(dict.fromkeys(map(ord, self.chars)))


@dataclass(frozen=True)
class MapChars:
    """Replace substrings pairwise, in the configured order.

    Pairs are applied sequentially, so later pairs see the output of
    earlier ones; keep targets out of earlier sources if that matters.
    """

    pairs: tuple[tuple[str, str], ...]

    def apply(self, text: str) -> str:
        for src, dst in self.pairs:
            text = text.replace(src, dst)
        return text


@dataclass(frozen=True)
class FoldCase:
    """Unicode case folding (str.casefold)."""

    def apply(self, text: str) -> str:
        return text.casefold()


@dataclass(frozen=True)
class StripPunct:
    """Delete every codepoint whose Unicode category is punctuation (P*)."""

    def apply(self, text: str) -> str:
        return "".join(c for c in text if not unicodedata.category(c).startswith("P"))


Rule = Union[RemoveClass, MapChars, FoldCase, StripPunct]

_RULE_KINDS = {
    "remove_class": RemoveClass,
    "map": MapChars,
    "fold_case": FoldCase,
    "strip_punct": StripPunct,
}


@dataclass(frozen=True)
class NormRuleSet:
    """An ordered normalization recipe for one language."""

    language_code: str
    rules: tuple[Rule, ...] = field(default_factory=tuple)

    def describe(self) -> dict:
        """Serializable form; `parse_rule_set(describe())` round-trips."""
        out: list[dict] = []
        for rule in self.rules:
            if isinstance(rule, RemoveClass):
                out.append({"kind": "remove_class", "chars": rule.chars})
            elif isinstance(rule, MapChars):
                out.append({"kind": "map", "pairs": [list(p) for p in rule.pairs]})
            elif isinstance(rule, FoldCase):
                out.append({"kind": "fold_case"})
            else:
                out.append({"kind": "strip_punct"})
        return {"language": self.language_code, "rules": out}


def normalize(text: str, ruleset: NormRuleSet) -> str:
    """Apply a rule set: NFC, then each rule in order, then whitespace collapse."""
    text = unicodedata.normalize("NFC", text)
    for rule in ruleset.rules:
        text = rule.apply(text)
    return " ".join(text.split())


def _parse_remove_class(idx: int, spec: dict) -> RemoveClass:
    chars = spec.get("chars", "")
    if not isinstance(chars, str):
        raise ConfigError(f"rule {idx}: 'chars' must be a string")
    ranges = spec.get("ranges", [])
    if not isinstance(ranges, list):
        raise ConfigError(f"rule {idx}: 'ranges' must be a list of [lo, hi] hex pairs")
    extra = []
    for r in ranges:
        if not (isinstance(r, list) and len(r) == 2):
            raise ConfigError(f"rule {idx}: range entries must be [lo, hi] pairs")
        try:
            lo, hi = int(r[0], 16), int(r[1], 16)
        except (TypeError, ValueError):
            raise ConfigError(f"rule {idx}: range bounds must be hex codepoints") from None
        if lo > hi:
            raise ConfigError(f"rule {idx}: empty range {r[0]}..{r[1]}")
        extra.append("".join(chr(cp) for cp in range(lo, hi + 1)))
    cls = chars + "".join(extra)
    if not cls:
        raise ConfigError(f"rule {idx}: remove_class with nothing to remove")
    return RemoveClass(cls)


def _parse_map(idx: int, spec: dict) -> MapChars:
    pairs = spec.get("pairs")
    if not isinstance(pairs, list) or not pairs:
        raise ConfigError(f"rule {idx}: 'map' needs a non-empty 'pairs' list")
    out = []
    for p in pairs:
        if not (isinstance(p, list) and len(p) == 2 and all(isinstance(s, str) for s in p)):
            raise ConfigError(f"rule {idx}: map pairs must be [from, to] strings")
        if p[0] == "":
            raise ConfigError(f"rule {idx}: map source must be non-empty")
        out.append((p[0], p[1]))
    return MapChars(tuple(out))


def parse_rule_set(doc: dict) -> NormRuleSet:
    """Build a rule set from its dict form, validating every descriptor."""
    if not isinstance(doc, dict):
        raise ConfigError("rule set must be a JSON object")
    language = doc.get("language")
    if not isinstance(language, str) or not language:
        raise ConfigError("rule set needs a non-empty 'language'")
    raw_rules = doc.get("rules", [])
    if not isinstance(raw_rules, list):
        raise ConfigError("'rules' must be a list")
    rules: list[Rule] = []
    for idx, spec in enumerate(raw_rules):
        if not isinstance(spec, dict):
            raise ConfigError(f"rule {idx}: not an object")
        kind = spec.get("kind")
        if kind not in _RULE_KINDS:
            raise ConfigError(f"rule {idx}: unknown kind {kind!r}")
        if kind == "remove_class":
            rules.append(_parse_remove_class(idx, spec))
        elif kind == "map":
            rules.append(_parse_map(idx, spec))
        elif kind == "fold_case":
            rules.append(FoldCase())
        else:
            rules.append(StripPunct())
    return NormRuleSet(language_code=language, rules=tuple(rules))


def load_rule_set(path: str | Path) -> NormRuleSet:
    """Load and validate a JSON rule-set file."""
    p = Path(path)
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"rule set file not found: {p}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"rule set {p} is not valid JSON: {e}") from None
    return parse_rule_set(doc)
