"""Released-dataset surface: per-segment records, filtering, splitting, stats.

A manifest is a line-delimited UTF-8 file, one JSON object per segment,
carrying the ground-truth span, the hypothesis that aligned it, the exact
CER as an integer pair (edit_distance, ref_len — the float field is derived
and informational), provenance, and pass-through quality metadata. Absent
optional values are explicit nulls, never zeros.

Filtering is a pure conjunction over optional predicate fields and is
idempotent. Splitting is session-atomic: a session's records never straddle
the train/test boundary, which costs exactness in the 95/5 ratio when
session sizes don't divide evenly — the train side gets as close to
round(N * fraction) as whole sessions allow.
"""
from __future__ import annotations

import datetime as dt
import json
import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .aligner import AlignmentMatch, TranscriptDoc
from .errors import ConfigError, DataError, SplitInfeasibleError
from .metrics import CerValue
from .segmenter import Segment


@dataclass(frozen=True)
class ManifestRecord:
    audio_ref: str
    session_id: str
    segment_index: int
    ground_truth: str
    asr_hypothesis: str
    cer: CerValue
    language_code: str
    duration: float
    source_id: str
    retained: bool
    session_date: dt.date | None = None
    quality_score: float | None = None
    snr_db: float | None = None

    def __post_init__(self) -> None:
        if not self.audio_ref:
            raise DataError("audio_ref must be non-empty")
        if not self.session_id:
            raise DataError("session_id must be non-empty")
        if self.segment_index < 0:
            raise DataError("segment_index must be >= 0")
        if not self.ground_truth:
            raise DataError("ground_truth must be non-empty")
        if not self.language_code:
            raise DataError("language_code must be non-empty")
        if not (math.isfinite(self.duration) and self.duration > 0):
            raise DataError(f"duration must be positive, got {self.duration!r}")
        if not isinstance(self.cer, CerValue):
            raise DataError("cer must be a CerValue")


def record_from_match(
    doc: TranscriptDoc,
    segment: Segment,
    hypothesis: str,
    match: AlignmentMatch,
    *,
    language_code: str,
    source_id: str,
    session_date: dt.date | None = None,
    quality_score: float | None = None,
    snr_db: float | None = None,
    audio_ref: str | None = None,
) -> ManifestRecord:
    """Assemble a record from one aligned segment; ground truth is the
    matched document span, never the hypothesis."""
    span = doc.text[match.span_offset : match.span_offset + match.span_len]
    return ManifestRecord(
        audio_ref=audio_ref or f"{segment.session_id}/{segment.index:05d}",
        session_id=segment.session_id,
        segment_index=segment.index,
        ground_truth=span,
        asr_hypothesis=hypothesis,
        cer=match.cer,
        language_code=language_code,
        duration=segment.duration,
        source_id=source_id,
        retained=match.retained,
        session_date=session_date,
        quality_score=quality_score,
        snr_db=snr_db,
    )


# --- serialization ---------------------------------------------------------


def record_to_dict(r: ManifestRecord) -> dict:
    return {
        "audio_ref": r.audio_ref,
        "session_id": r.session_id,
        "segment_index": r.segment_index,
        "ground_truth": r.ground_truth,
        "asr_hypothesis": r.asr_hypothesis,
        "edit_distance": r.cer.edit_distance,
        "ref_len": r.cer.ref_len,
        "cer": r.cer.value,
        "language_code": r.language_code,
        "duration": r.duration,
        "source_id": r.source_id,
        "retained": r.retained,
        "session_date": r.session_date.isoformat() if r.session_date else None,
        "quality_score": r.quality_score,
        "snr_db": r.snr_db,
    }


def record_from_dict(d: dict) -> ManifestRecord:
    try:
        raw_date = d.get("session_date")
        return ManifestRecord(
            audio_ref=d["audio_ref"],
            session_id=d["session_id"],
            segment_index=d["segment_index"],
            ground_truth=d["ground_truth"],
            asr_hypothesis=d["asr_hypothesis"],
            cer=CerValue(d["edit_distance"], d["ref_len"]),
            language_code=d["language_code"],
            duration=d["duration"],
            source_id=d["source_id"],
            retained=d["retained"],
            session_date=dt.date.fromisoformat(raw_date) if raw_date else None,
            quality_score=d.get("quality_score"),
            snr_db=d.get("snr_db"),
        )
    except KeyError as e:
        raise DataError(f"manifest record missing field {e.args[0]!r}") from e


def write_manifest(records: Iterable[ManifestRecord], path: str | Path) -> int:
    """Single-writer append to a temp file, finished by an atomic rename."""
    path = Path(path)
    count = 0
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            for r in records:
                f.write(json.dumps(record_to_dict(r), ensure_ascii=False, separators=(",", ":")))
                f.write("\n")
                count += 1
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return count


def read_manifest(path: str | Path) -> list[ManifestRecord]:
    records: list[ManifestRecord] = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                d = json.loads(line)
            except json.JSONDecodeError as e:
                raise DataError(f"{path}:{lineno}: not valid JSON: {e}") from e
            try:
                records.append(record_from_dict(d))
            except DataError as e:
                raise DataError(f"{path}:{lineno}: {e}") from e
    return records


# --- filtering -------------------------------------------------------------


@dataclass(frozen=True)
class FilterPredicate:
    """Conjunction of optional per-field conditions; empty predicate is the
    identity. max_cer is strict (cer.value < max_cer), matching the
    retention rule; date_range bounds are inclusive."""

    max_cer: float | None = None
    min_duration: float | None = None
    max_duration: float | None = None
    min_quality: float | None = None
    language: str | None = None
    source: str | None = None
    date_range: tuple[dt.date | None, dt.date | None] | None = None

    def admits(self, r: ManifestRecord) -> bool:
        if self.max_cer is not None and not r.cer.is_below(self.max_cer):
            return False
        if self.min_duration is not None and r.duration < self.min_duration:
            return False
        if self.max_duration is not None and r.duration > self.max_duration:
            return False
        if self.min_quality is not None:
            if r.quality_score is None or r.quality_score < self.min_quality:
                return False
        if self.language is not None and r.language_code != self.language:
            return False
        if self.source is not None and r.source_id != self.source:
            return False
        if self.date_range is not None:
            lo, hi = self.date_range
            if r.session_date is None:
                return False
            if lo is not None and r.session_date < lo:
                return False
            if hi is not None and r.session_date > hi:
                return False
        return True


def filter_records(
    records: Sequence[ManifestRecord], predicate: FilterPredicate
) -> list[ManifestRecord]:
    """Exactly the records satisfying the conjunction, input order kept."""
    return [r for r in records if predicate.admits(r)]


# --- splitting -------------------------------------------------------------


@dataclass(frozen=True)
class SplitParams:
    train_fraction: float = 0.95
    seed: int = 0

    def __post_init__(self) -> None:
        if not (0.0 < self.train_fraction < 1.0):
            raise ConfigError(f"train_fraction must be in (0, 1), got {self.train_fraction}")
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2**64):
            raise ConfigError("seed must be a 64-bit unsigned integer")


def split_records(
    records: Sequence[ManifestRecord], params: SplitParams
) -> tuple[list[ManifestRecord], list[ManifestRecord]]:
    """Deterministic session-atomic train/test partition.

    Sessions are shuffled by seed and assigned first-fit to the train side
    until round(N * train_fraction) records are reached; every record of a
    session lands on the same side.
    """
    if not records:
        raise DataError("cannot split an empty record set")
    sessions = sorted({r.session_id for r in records})
    if len(sessions) < 2:
        raise SplitInfeasibleError(
            "need at least 2 distinct sessions for a session-atomic split, "
            f"got {len(sessions)}"
        )
    sizes = {sid: 0 for sid in sessions}
    for r in records:
        sizes[r.session_id] += 1
    target = round(len(records) * params.train_fraction)
    rng = np.random.Generator(np.random.Philox(key=np.array([params.seed, 0x51D], dtype=np.uint64)))
    order = [sessions[i] for i in rng.permutation(len(sessions))]
    train_sessions: set[str] = set()
    filled = 0
    for sid in order:
        if filled + sizes[sid] <= target:
            train_sessions.add(sid)
            filled += sizes[sid]
    if not train_sessions:
        # degenerate shapes (e.g. every session bigger than the target):
        # keep both sides non-empty rather than returning an empty train
        train_sessions.add(order[0])
    if len(train_sessions) == len(sessions):
        train_sessions.discard(order[-1])
    train = [r for r in records if r.session_id in train_sessions]
    test = [r for r in records if r.session_id not in train_sessions]
    return train, test


# --- statistics ------------------------------------------------------------

DURATION_BIN_S = 1.0
DURATION_RANGE = (0.0, 30.0)
CER_BIN = 0.01
CER_RANGE = (0.0, 0.30)
QUALITY_BIN = 0.1
QUALITY_RANGE = (0.0, 5.0)


def _histogram(values: list[float], lo: float, hi: float, width: float) -> tuple[list[int], int]:
    nbins = int(round((hi - lo) / width))
    bins = [0] * nbins
    overflow = 0
    for v in values:
        if v < lo or v > hi:
            overflow += 1
            continue
        idx = min(int((v - lo) / width), nbins - 1)
        bins[idx] += 1
    return bins, overflow


def _lower_median(values: list[float]) -> float | None:
    if not values:
        return None
    return sorted(values)[(len(values) - 1) // 2]


@dataclass(frozen=True)
class StatsReport:
    count: int
    total_hours: float
    duration_histogram: tuple[int, ...]
    duration_overflow: int
    cer_histogram: tuple[int, ...]
    cer_overflow: int
    quality_histogram: tuple[int, ...]
    quality_overflow: int
    median_duration: float | None
    median_cer: float | None
    median_quality: float | None
    zero_cer_fraction: float


def stats(records: Sequence[ManifestRecord]) -> StatsReport:
    durations = [r.duration for r in records]
    cers = [r.cer.value for r in records]
    qualities = [r.quality_score for r in records if r.quality_score is not None]
    dur_bins, dur_over = _histogram(durations, *DURATION_RANGE, DURATION_BIN_S)
    cer_bins, cer_over = _histogram(cers, *CER_RANGE, CER_BIN)
    q_bins, q_over = _histogram(qualities, *QUALITY_RANGE, QUALITY_BIN)
    zero = sum(1 for r in records if r.cer.edit_distance == 0)
    return StatsReport(
        count=len(records),
        total_hours=math.fsum(durations) / 3600.0,
        duration_histogram=tuple(dur_bins),
        duration_overflow=dur_over,
        cer_histogram=tuple(cer_bins),
        cer_overflow=cer_over,
        quality_histogram=tuple(q_bins),
        quality_overflow=q_over,
        median_duration=_lower_median(durations),
        median_cer=_lower_median(cers),
        median_quality=_lower_median(qualities),
        zero_cer_fraction=zero / len(records) if records else 0.0,
    )


def render_stats(report: StatsReport, width: int = 40) -> str:
    """Plain-text rendering for terminals and logs."""

    def bar(count: int, peak: int) -> str:
        if peak == 0:
            return ""
        return "#" * max(1 if count else 0, round(count / peak * width))

    lines = [
        f"records        {report.count}",
        f"total hours    {report.total_hours:.3f}",
        f"median dur     {report.median_duration if report.median_duration is not None else '-'}",
        f"median cer     {report.median_cer if report.median_cer is not None else '-'}",
        f"median quality {report.median_quality if report.median_quality is not None else '-'}",
        f"zero-cer share {report.zero_cer_fraction:.4f}",
        "",
        "duration (1 s bins, 0-30 s)",
    ]
    peak = max(report.duration_histogram, default=0)
    for i, c in enumerate(report.duration_histogram):
        if c:
            lines.append(f"  {i:2d}-{i + 1:2d} s  {c:6d} {bar(c, peak)}")
    lines.append("")
    lines.append("cer (0.01 bins, 0-0.30)")
    peak = max(report.cer_histogram, default=0)
    for i, c in enumerate(report.cer_histogram):
        if c:
            lines.append(f"  {i / 100:.2f}-{(i + 1) / 100:.2f}  {c:6d} {bar(c, peak)}")
    if report.cer_overflow:
        lines.append(f"  >0.30      {report.cer_overflow:6d}")
    return "\n".join(lines)
