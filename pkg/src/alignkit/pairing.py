"""Match audio sessions to transcript documents via fuzzy metadata.

Sessions rarely share a clean join key: dates appear in mixed formats,
titles drift ("Session 14 Budget" vs "Budget Session 14"), and document
numbers are sometimes missing. Scoring combines whatever fields both sides
actually have — exact date match, exact document number, and title edit
similarity — with the weights renormalized over the present fields.

Assignment is greedy one-to-one by descending score. That is deliberately
not optimal bipartite matching: per-batch lists are small, and a greedy
order is deterministic and easy to explain when an operator asks why two
sessions were paired.

A candidate pair is only *validated* once a short transcription sample of
the audio shares enough vocabulary with the document (distinct-token
overlap), which catches systematic metadata errors like off-by-one dates.
"""
from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from .aligner import TranscriptDoc
from .errors import ConfigError, DataError, IncomparableError, InconclusiveError
from .metrics import levenshtein
from .textnorm import FoldCase, NormRuleSet, StripPunct, normalize

DEFAULT_DATE_FORMATS: tuple[str, ...] = (
    "%Y-%m-%d",
    "%d/%m/%Y",
    "%d.%m.%Y",
    "%Y%m%d",
    "%d %B %Y",
)

_TITLE_RULES = NormRuleSet(language_code="und", rules=(FoldCase(), StripPunct()))


def parse_session_date(
    raw: str, formats: Sequence[str] = DEFAULT_DATE_FORMATS
) -> dt.date | None:
    """First format that parses wins; None when nothing does (the caller
    degrades to title/number matching rather than failing)."""
    text = raw.strip()
    if not text:
        return None
    for fmt in formats:
        try:
            return dt.datetime.strptime(text, fmt).date()
        except ValueError:
            continue
    return None


@dataclass(frozen=True)
class SessionMeta:
    """What we know about one session from its source listing."""

    source_id: str
    session_date: dt.date | None = None
    title: str | None = None
    doc_number: str | None = None
    url: str | None = None

    def __post_init__(self) -> None:
        if not self.source_id:
            raise DataError("source_id must be non-empty")
        if self.session_date is None and self.title is None and self.doc_number is None:
            raise DataError(
                f"session metadata for {self.source_id!r} has no date, title, "
                "or document number to match on"
            )


@dataclass(frozen=True)
class PairWeights:
    date: float = 0.5
    doc_number: float = 0.3
    title: float = 0.2

    def __post_init__(self) -> None:
        for name in ("date", "doc_number", "title"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} weight must be >= 0")
        if abs(self.date + self.doc_number + self.title - 1.0) > 1e-9:
            raise ConfigError("pair weights must sum to 1")


@dataclass(frozen=True)
class PairCandidate:
    audio_meta: SessionMeta
    transcript_meta: SessionMeta
    score: float
    validated: bool = False


@dataclass(frozen=True)
class PairingResult:
    pairs: tuple[PairCandidate, ...]
    unpaired_audio: tuple[SessionMeta, ...]
    unpaired_transcripts: tuple[SessionMeta, ...]


def _norm_title(title: str) -> str:
    return normalize(title, _TITLE_RULES)


def _title_similarity(a: str, b: str) -> float | None:
    na, nb = _norm_title(a), _norm_title(b)
    longest = max(len(na), len(nb))
    if longest == 0:
        return None  # nothing left to compare after normalization
    return 1.0 - levenshtein(na, nb) / longest


def pair_score(a: SessionMeta, b: SessionMeta, weights: PairWeights | None = None) -> float:
    """Weighted match score in [0, 1] over the fields both metas carry."""
    w = weights or PairWeights()
    parts: list[tuple[float, float]] = []
    if a.session_date is not None and b.session_date is not None:
        parts.append((w.date, 1.0 if a.session_date == b.session_date else 0.0))
    if a.doc_number is not None and b.doc_number is not None:
        parts.append((w.doc_number, 1.0 if a.doc_number.strip() == b.doc_number.strip() else 0.0))
    if a.title is not None and b.title is not None:
        sim = _title_similarity(a.title, b.title)
        if sim is not None:
            parts.append((w.title, sim))
    total_weight = sum(wt for wt, _ in parts)
    if total_weight <= 0:
        raise IncomparableError(
            f"sessions {a.source_id!r} and {b.source_id!r} share no comparable metadata fields"
        )
    return sum(wt * s for wt, s in parts) / total_weight


def validate_pair(
    sample_hyps: Iterable[str], doc: TranscriptDoc, min_overlap: float = 0.3
) -> tuple[float, bool]:
    """Vocabulary check: fraction of distinct sample tokens present in the
    document. Duplicated tokens in the sample do not change the result."""
    sample_tokens: set[str] = set()
    for hyp in sample_hyps:
        sample_tokens.update(hyp.split())
    if not sample_tokens:
        raise InconclusiveError("no tokens in transcription sample; cannot validate pair")
    doc_tokens = set(doc.text.split())
    overlap = len(sample_tokens & doc_tokens) / len(sample_tokens)
    return overlap, overlap >= min_overlap


def pair_sessions(
    audio_list: Sequence[SessionMeta],
    transcript_list: Sequence[SessionMeta],
    weights: PairWeights | None = None,
    accept_threshold: float = 0.6,
) -> PairingResult:
    """Greedy one-to-one assignment by descending score."""
    if not audio_list or not transcript_list:
        raise DataError("both session lists must be non-empty")
    scored: list[tuple[float, int, int]] = []
    for i, a in enumerate(audio_list):
        for j, t in enumerate(transcript_list):
            try:
                s = pair_score(a, t, weights)
            except IncomparableError:
                continue
            scored.append((s, i, j))
    # descending score; ties resolved by list order for determinism
    scored.sort(key=lambda x: (-x[0], x[1], x[2]))
    used_a: set[int] = set()
    used_t: set[int] = set()
    pairs: list[PairCandidate] = []
    for s, i, j in scored:
        if s < accept_threshold:
            break
        if i in used_a or j in used_t:
            continue
        used_a.add(i)
        used_t.add(j)
        pairs.append(PairCandidate(audio_list[i], transcript_list[j], s))
    return PairingResult(
        pairs=tuple(pairs),
        unpaired_audio=tuple(a for i, a in enumerate(audio_list) if i not in used_a),
        unpaired_transcripts=tuple(t for j, t in enumerate(transcript_list) if j not in used_t),
    )


def validated_candidate(
    candidate: PairCandidate,
    sample_hyps: Iterable[str],
    doc: TranscriptDoc,
    min_overlap: float = 0.3,
) -> tuple[PairCandidate, float]:
    """Run the vocabulary check and stamp the outcome onto the candidate."""
    overlap, passed = validate_pair(sample_hyps, doc, min_overlap)
    return replace(candidate, validated=passed), overlap
