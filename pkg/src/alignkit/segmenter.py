"""Cut voice-activity regions into utterance-sized segments.

Input is the output of a VAD pass: sorted, non-overlapping speech
regions in session seconds. Output is a list of segments whose
wall-clock durations all lie in [min_dur, max_dur], cut preferentially
at natural silences so sentences tend to survive intact.

The procedure, region stream -> segments:

1. Regions separated by more than `merge_gap` never share a segment;
   they split the stream into independent groups. Gaps up to
   `merge_gap` may be bridged, which is how a too-short region gets
   merged with its neighbor.
2. A group spanning less than `min_dur` cannot produce a legal segment
   and is dropped (counted, never silently).
3. Within a group, cuts are chosen greedily from the segment start:
   silences of at least `min_silence_gap` whose position lands the
   duration inside [target_low, target_high] are preferred (longest
   silence first, ties to the latest); failing that, the earliest
   usable silence before `max_dur`; failing that, a forced cut at
   exactly `max_dur` into speech. A forced cut backs off just enough
   to keep the remainder at least `min_dur`, so no cut ever strands an
   illegal residue.

Durations are wall-clock (`end - start`) including any bridged short
silences, because downstream ASR consumes the clip as cut.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ConfigError, DataError

__all__ = [
    "SpeechRegion",
    "SegmenterParams",
    "Segment",
    "SegmentationResult",
    "segment_session",
]


@dataclass(frozen=True)
class SpeechRegion:
    """One VAD speech interval, in session seconds."""

    start: float
    end: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.start) and math.isfinite(self.end)):
            raise DataError(f"region bounds must be finite, got [{self.start}, {self.end}]")
        if self.start < 0:
            raise DataError(f"region start must be >= 0, got {self.start}")
        if self.end <= self.start:
            raise DataError(f"region must have end > start, got [{self.start}, {self.end}]")

    @property
    def duration(self) -> float:
        return self.end - self.start


@dataclass(frozen=True)
class SegmenterParams:
    min_dur: float = 3.0
    max_dur: float = 30.0
    target_low: float = 10.0
    target_high: float = 20.0
    min_silence_gap: float = 0.3
    merge_gap: float = 1.0

    def __post_init__(self) -> None:
        if not 0 < self.min_dur <= self.target_low <= self.target_high <= self.max_dur:
            raise ConfigError(
                "need 0 < min_dur <= target_low <= target_high <= max_dur, got "
                f"{self.min_dur}/{self.target_low}/{self.target_high}/{self.max_dur}"
            )
        if self.max_dur < 2 * self.min_dur:
            # forced-cut back-off can only keep both pieces legal when a
            # max-length piece may shrink by min_dur and stay above min_dur
            raise ConfigError("max_dur must be at least 2 * min_dur")
        if self.min_silence_gap <= 0:
            raise ConfigError("min_silence_gap must be > 0")
        if self.merge_gap < 0:
            raise ConfigError("merge_gap must be >= 0")


@dataclass(frozen=True)
class Segment:
    """One emitted cut, in the same second convention as the input regions."""

    session_id: str
    index: int
    start: float
    end: float

    @property
    def duration(self) -> float:
        return self.end - self.start


@dataclass(frozen=True)
class SegmentationResult:
    segments: tuple[Segment, ...]
    dropped_regions: int
    dropped_seconds: float


def _validate_regions(regions: Sequence[SpeechRegion]) -> None:
    for i in range(1, len(regions)):
        prev, cur = regions[i - 1], regions[i]
        if cur.start < prev.start:
            raise DataError(
                f"regions not sorted: region {i} starts at {cur.start} "
                f"before region {i - 1} at {prev.start}"
            )
        if cur.start < prev.end:
            raise DataError(
                f"regions overlap: region {i - 1} [{prev.start}, {prev.end}] and "
                f"region {i} [{cur.start}, {cur.end}]"
            )


def _groups(regions: Sequence[SpeechRegion], merge_gap: float) -> Iterable[list[SpeechRegion]]:
    group: list[SpeechRegion] = []
    for r in regions:
        if group and r.start - group[-1].end > merge_gap:
            yield group
            group = []
        group.append(r)
    if group:
        yield group


def _cut_group(group: Sequence[SpeechRegion], params: SegmenterParams) -> list[tuple[float, float]]:
    """Cut one group into (start, end) pieces, all within duration bounds.

    The group spans at least min_dur when this is called.
    """
    gend = group[-1].end
    # silences inside the group that are wide enough to cut at
    gaps = [
        (group[i].end, group[i + 1].start)
        for i in range(len(group) - 1)
        if group[i + 1].start - group[i].end >= params.min_silence_gap
    ]
    pieces: list[tuple[float, float]] = []
    cs = group[0].start
    while gend - cs > params.max_dur:
        in_band = None  # (gap_len, gap_start, gap_end), best so far
        after_band = None
        for gs, ge in gaps:
            t = gs - cs
            if t <= 0 or gend - ge < params.min_dur:
                continue  # behind us, or would strand an illegal remainder
            if params.target_low <= t <= params.target_high:
                key = (ge - gs, t)
                if in_band is None or key > (in_band[0], in_band[1] - cs):
                    in_band = (ge - gs, gs, ge)
            elif params.target_high < t <= params.max_dur and after_band is None:
                after_band = (gs, ge)  # gaps are sorted, first hit is earliest
        if in_band is not None:
            _, gs, ge = in_band
            pieces.append((cs, gs))
            cs = ge
        elif after_band is not None:
            gs, ge = after_band
            pieces.append((cs, gs))
            cs = ge
        else:
            # no usable silence: cut into speech at max_dur, backing off
            # so the remainder keeps at least min_dur of wall clock
            p = min(cs + params.max_dur, gend - params.min_dur)
            # float rounding can push either derived duration a few ulps
            # past its bound; nudge down until both hold exactly
            while p - cs > params.max_dur or gend - p < params.min_dur:
                p = math.nextafter(p, cs)
            pieces.append((cs, p))
            cs = p
    pieces.append((cs, gend))
    return pieces


def segment_session(
    regions: Sequence[SpeechRegion],
    params: SegmenterParams,
    session_id: str = "",
) -> SegmentationResult:
    """Segment one session's VAD regions.

    Returns the emitted segments plus an exact account of dropped
    material: the regions belonging to groups too short to yield a
    legal segment.
    """
    regions = list(regions)
    _validate_regions(regions)
    segments: list[Segment] = []
    dropped_regions = 0
    dropped_seconds = 0.0
    index = 0
    for group in _groups(regions, params.merge_gap):
        span = group[-1].end - group[0].start
        if span < params.min_dur:
            dropped_regions += len(group)
            dropped_seconds += sum(r.duration for r in group)
            continue
        for start, end in _cut_group(group, params):
            segments.append(Segment(session_id=session_id, index=index, start=start, end=end))
            index += 1
    return SegmentationResult(
        segments=tuple(segments),
        dropped_regions=dropped_regions,
        dropped_seconds=dropped_seconds,
    )
