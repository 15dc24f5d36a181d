"""Iterative alignment refinement.

Pass 1 transcribes and aligns the whole pool with the initial transcriber.
Whatever clears the CER threshold is banked — those matches are frozen and
never revisited — and the retained hours feed the transcriber's learning
curve. Each later pass re-transcribes only the residual pool with the
improved transcriber and tries again. The loop stops at max_passes or when
a pass adds less than min_relative_gain of the hours already banked.

The transcript side never changes between passes: only the transcriber
does. `refine` asserts document stability across passes to keep that
contract honest.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .aligner import AlignmentMatch, AlignParams, TranscriptDoc, align_session
from .errors import ConfigError, DataError
from .segmenter import Segment
from .transcriber import SimAudio, Transcriber, TranscriberFactory

PoolItem = tuple[Segment, SimAudio]


@dataclass(frozen=True)
class PassReport:
    """Yield accounting for one pass.

    retained_hours is cumulative through this pass; new_hours is what this
    pass added on top of the prior ones. relative_gain = new_hours divided
    by the cumulative hours before the pass — None for pass 1, where there
    is no prior yield to compare against.
    """

    pass_index: int
    retained_hours: float
    new_hours: float
    residual_hours: float
    relative_gain: float | None
    skipped_segments: int = 0

    def __post_init__(self) -> None:
        if self.pass_index < 1:
            raise DataError("pass_index is 1-based")
        for name in ("retained_hours", "new_hours", "residual_hours"):
            if getattr(self, name) < -1e-9:
                raise DataError(f"{name} must be nonnegative")


@dataclass(frozen=True)
class RefineConfig:
    transcriber: TranscriberFactory
    align_params: AlignParams = field(default_factory=AlignParams)
    max_passes: int = 3
    min_relative_gain: float = 0.02
    workers: int = 1

    def __post_init__(self) -> None:
        if self.max_passes < 1:
            raise ConfigError("max_passes must be >= 1")
        if not (0.0 <= self.min_relative_gain < math.inf):
            raise ConfigError("min_relative_gain must be a nonnegative rate")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")


@dataclass(frozen=True)
class RefineOutcome:
    reports: tuple[PassReport, ...]
    retained: tuple[AlignmentMatch, ...]


def _check_pool(pool: Sequence[PoolItem]) -> None:
    seen: set[tuple[str, int]] = set()
    for seg, _ in pool:
        key = (seg.session_id, seg.index)
        if key in seen:
            raise DataError(f"duplicate pool segment {key}")
        seen.add(key)


def _pool_hours(pool: Sequence[PoolItem]) -> float:
    return sum(seg.duration for seg, _ in pool) / 3600.0


def _docs_digest(docs: Mapping[str, TranscriptDoc]) -> str:
    h = hashlib.sha256()
    for sid in sorted(docs):
        h.update(sid.encode())
        h.update(b"\x00")
        h.update(docs[sid].text.encode())
        h.update(b"\x01")
    return h.hexdigest()


def run_pass(
    pool: Sequence[PoolItem],
    docs: Mapping[str, TranscriptDoc],
    transcriber: Transcriber,
    align_params: AlignParams,
    *,
    workers: int = 1,
    pass_index: int = 1,
) -> tuple[list[AlignmentMatch], PassReport]:
    """Transcribe and align one pool sweep with a fixed transcriber."""
    _check_pool(pool)
    by_session: dict[str, list[PoolItem]] = {}
    skipped = 0
    for seg, audio in pool:
        if seg.session_id not in docs:
            skipped += 1
            continue
        by_session.setdefault(seg.session_id, []).append((seg, audio))
    matches: list[AlignmentMatch] = []
    retained_seconds = 0.0
    for sid in sorted(by_session):
        items = [(seg, transcriber.transcribe(audio)) for seg, audio in by_session[sid]]
        session_matches, sy = align_session(items, docs[sid], align_params, workers=workers)
        matches.extend(session_matches)
        retained_seconds += sy.retained_seconds
    retained_hours = retained_seconds / 3600.0
    total_hours = _pool_hours(pool)
    return matches, PassReport(
        pass_index=pass_index,
        retained_hours=retained_hours,
        new_hours=retained_hours,
        residual_hours=total_hours - retained_hours,
        relative_gain=None,
        skipped_segments=skipped,
    )


def run_refinement(
    pool: Sequence[PoolItem],
    docs: Mapping[str, TranscriptDoc],
    config: RefineConfig,
) -> RefineOutcome:
    """The full loop; returns per-pass reports plus all retained matches."""
    _check_pool(pool)
    digest0 = _docs_digest(docs)
    pool_hours = _pool_hours(pool)
    residual = list(pool)
    reports: list[PassReport] = []
    retained_all: list[AlignmentMatch] = []
    cumulative_hours = 0.0
    for k in range(1, config.max_passes + 1):
        if k > 1 and _docs_digest(docs) != digest0:
            raise DataError("transcript documents changed between passes")
        transcriber = config.transcriber(cumulative_hours, k)
        matches, _ = run_pass(
            residual,
            docs,
            transcriber,
            config.align_params,
            workers=config.workers,
            pass_index=k,
        )
        retained_keys = {(m.session_id, m.index) for m in matches if m.retained}
        new_hours = (
            sum(seg.duration for seg, _ in residual if (seg.session_id, seg.index) in retained_keys)
            / 3600.0
        )
        before = cumulative_hours
        cumulative_hours += new_hours
        if k == 1:
            gain = None
        elif before > 0:
            gain = new_hours / before
        else:
            gain = math.inf if new_hours > 0 else 0.0
        skipped = sum(1 for seg, _ in residual if seg.session_id not in docs)
        reports.append(
            PassReport(
                pass_index=k,
                retained_hours=cumulative_hours,
                new_hours=new_hours,
                residual_hours=pool_hours - cumulative_hours,
                relative_gain=gain,
                skipped_segments=skipped,
            )
        )
        retained_all.extend(m for m in matches if m.retained)
        residual = [
            (seg, audio)
            for seg, audio in residual
            if (seg.session_id, seg.index) not in retained_keys
        ]
        if gain is not None and gain < config.min_relative_gain:
            break
    return RefineOutcome(reports=tuple(reports), retained=tuple(retained_all))


def refine(
    pool: Sequence[PoolItem],
    docs: Mapping[str, TranscriptDoc],
    config: RefineConfig,
) -> list[PassReport]:
    """Reports-only view of run_refinement."""
    return list(run_refinement(pool, docs, config).reports)
