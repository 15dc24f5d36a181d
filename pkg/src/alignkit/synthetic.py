"""Seeded synthetic corpora for tests, demos, and benchmarks.

Everything downstream — alignment, refinement, manifests, the CLI — needs
realistic inputs: sessions with speech regions, a transcript document that
concatenates what was actually said, per-segment "audio" carrying the true
text, and source metadata for pairing. This module fabricates all of it
from a single seed, so any run can be reproduced bit-exactly.

Segment difficulty follows a three-way mixture: a small fraction of clean
recordings (difficulty 0, transcribed verbatim), a bulk of ordinary ones
(difficulty 1), and a tail of hard ones (amplified channel rates) that an
initial low-quality transcriber cannot align but an improved one can.
"""
from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .aligner import TranscriptDoc
from .errors import ConfigError
from .pairing import SessionMeta
from .segmenter import Segment, SpeechRegion
from .transcriber import NoiseParams, SimAudio, transcribe

_LETTERS = "abcdefghijklmnopqrstuvwxyz"
CHANNEL_ALPHABET = _LETTERS + " "


def _rng(seed: int, salt: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.array([seed, salt], dtype=np.uint64)))


def _lexicon(rng: np.random.Generator, size: int) -> list[str]:
    words = []
    for _ in range(size):
        n = int(rng.integers(2, 10))
        words.append("".join(_LETTERS[c] for c in rng.integers(0, 26, size=n)))
    return words


@dataclass(frozen=True)
class CorpusSpec:
    """Shape parameters for a generated corpus."""

    n_sessions: int = 10
    segments_per_session: tuple[int, int] = (30, 50)
    words_per_segment: tuple[int, int] = (10, 16)
    seconds_per_char: float = 0.25
    clean_fraction: float = 0.08
    hard_fraction: float = 0.12
    hard_difficulty: tuple[float, float] = (2.0, 4.0)
    lexicon_size: int = 400
    gap_seconds: float = 1.5
    base_date: dt.date = dt.date(2021, 1, 4)
    source_id: str = "synth"

    def __post_init__(self) -> None:
        if self.n_sessions < 1:
            raise ConfigError("n_sessions must be >= 1")
        for name in ("segments_per_session", "words_per_segment"):
            lo, hi = getattr(self, name)
            if not (1 <= lo <= hi):
                raise ConfigError(f"{name} must be an increasing range from >= 1")
        if self.seconds_per_char <= 0:
            raise ConfigError("seconds_per_char must be positive")
        if self.clean_fraction + self.hard_fraction > 1:
            raise ConfigError("clean_fraction + hard_fraction must be <= 1")
        if self.gap_seconds <= 1.0:
            raise ConfigError(
                "gap_seconds must exceed the segmenter merge gap (1.0 s) so "
                "generated regions survive segmentation unchanged"
            )


@dataclass(frozen=True)
class SyntheticSession:
    session_id: str
    doc: TranscriptDoc
    segments: tuple[Segment, ...]
    audios: tuple[SimAudio, ...]
    regions: tuple[SpeechRegion, ...]
    true_spans: tuple[tuple[int, int], ...]
    audio_meta: SessionMeta
    transcript_meta: SessionMeta


@dataclass(frozen=True)
class SyntheticCorpus:
    seed: int
    spec: CorpusSpec
    sessions: tuple[SyntheticSession, ...]

    def pool(self) -> list[tuple[Segment, SimAudio]]:
        out: list[tuple[Segment, SimAudio]] = []
        for sess in self.sessions:
            out.extend(zip(sess.segments, sess.audios))
        return out

    def docs(self) -> dict[str, TranscriptDoc]:
        return {s.session_id: s.doc for s in self.sessions}

    @property
    def total_hours(self) -> float:
        return sum(seg.duration for s in self.sessions for seg in s.segments) / 3600.0


def _difficulty(rng: np.random.Generator, spec: CorpusSpec) -> float:
    u = rng.random()
    if u < spec.clean_fraction:
        return 0.0
    if u < spec.clean_fraction + spec.hard_fraction:
        lo, hi = spec.hard_difficulty
        return float(lo + (hi - lo) * rng.random())
    return 1.0


def make_corpus(seed: int, spec: CorpusSpec | None = None) -> SyntheticCorpus:
    spec = spec or CorpusSpec()
    rng = _rng(seed, 0)
    lex = _lexicon(rng, spec.lexicon_size)
    sessions: list[SyntheticSession] = []
    stream_counter = 0
    seg_lo, seg_hi = spec.segments_per_session
    w_lo, w_hi = spec.words_per_segment
    for s in range(spec.n_sessions):
        session_id = f"{spec.source_id}-{s:04d}"
        n_seg = int(rng.integers(seg_lo, seg_hi + 1))
        texts: list[str] = []
        for _ in range(n_seg):
            k = int(rng.integers(w_lo, w_hi + 1))
            idx = rng.integers(0, len(lex), size=k)
            texts.append(" ".join(lex[i] for i in idx))
        doc_text = " ".join(texts)
        # char span of each segment's text inside the concatenated document
        spans: list[tuple[int, int]] = []
        off = 0
        for t in texts:
            spans.append((off, len(t)))
            off += len(t) + 1
        segments: list[Segment] = []
        audios: list[SimAudio] = []
        regions: list[SpeechRegion] = []
        t0 = 0.0
        for i, text in enumerate(texts):
            dur = min(30.0, max(3.0, len(text) * spec.seconds_per_char))
            regions.append(SpeechRegion(t0, t0 + dur))
            segments.append(Segment(session_id, i, t0, t0 + dur))
            audios.append(
                SimAudio(text, stream_id=stream_counter, difficulty=_difficulty(rng, spec))
            )
            stream_counter += 1
            t0 += dur + spec.gap_seconds
        w1, w2 = lex[int(rng.integers(0, len(lex)))], lex[int(rng.integers(0, len(lex)))]
        date = spec.base_date + dt.timedelta(days=s)
        sessions.append(
            SyntheticSession(
                session_id=session_id,
                doc=TranscriptDoc(session_id, doc_text),
                segments=tuple(segments),
                audios=tuple(audios),
                regions=tuple(regions),
                true_spans=tuple(spans),
                audio_meta=SessionMeta(
                    source_id=f"{spec.source_id}-audio-{s:04d}",
                    session_date=date,
                    title=f"Session {s + 1} {w1} {w2}",
                    doc_number=str(s + 1),
                ),
                transcript_meta=SessionMeta(
                    source_id=f"{spec.source_id}-doc-{s:04d}",
                    session_date=date,
                    title=f"{w1} {w2} Session {s + 1}",
                    doc_number=str(s + 1),
                ),
            )
        )
    return SyntheticCorpus(seed=seed, spec=spec, sessions=tuple(sessions))


@dataclass(frozen=True)
class PlantedCase:
    """One transcript with a known true span and a noisy hypothesis of it."""

    doc: TranscriptDoc
    hyp: str
    true_offset: int
    true_len: int
    noise: float


def planted_case(
    seed: int,
    index: int,
    *,
    doc_chars: int = 5000,
    span_words: tuple[int, int] = (10, 16),
    noise: float = 0.1,
) -> PlantedCase:
    """Build one alignment test case keyed by (seed, index)."""
    rng = _rng(seed, index + 1)
    lex = _lexicon(rng, 200)
    words: list[str] = []
    total = 0
    while total < doc_chars:
        w = lex[int(rng.integers(0, len(lex)))]
        words.append(w)
        total += len(w) + 1
    k = int(rng.integers(span_words[0], span_words[1] + 1))
    k = min(k, len(words))
    start_word = int(rng.integers(0, len(words) - k + 1))
    prefix = " ".join(words[:start_word])
    offset = len(prefix) + 1 if prefix else 0
    span_text = " ".join(words[start_word : start_word + k])
    if noise > 0:
        params = NoiseParams(
            sub_rate=0.6 * noise,
            ins_rate=0.2 * noise,
            del_rate=0.2 * noise,
            alphabet=CHANNEL_ALPHABET,
            seed=seed,
        )
        hyp = transcribe(span_text, params, index)
    else:
        hyp = span_text
    return PlantedCase(
        doc=TranscriptDoc(f"case-{index}", " ".join(words)),
        hyp=hyp,
        true_offset=offset,
        true_len=len(span_text),
        noise=noise,
    )


def planted_cases(
    seed: int, count: int, *, doc_chars: int = 5000, noise: float = 0.1
) -> Iterator[PlantedCase]:
    for i in range(count):
        yield planted_case(seed, i, doc_chars=doc_chars, noise=noise)
