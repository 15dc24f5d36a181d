"""Locate the transcript span each ASR hypothesis was read from.

The search objective is fixed: over all candidate spans (offset,
length) of the document, with length between ceil(0.7 * len(hyp)) and
floor(1.3 * len(hyp)), find the span minimizing CER(hyp, span), ties
broken by smaller offset then smaller length. `align_exhaustive`
scores the whole candidate set and is the reference; it stays fast
enough for tests because provably-worse spans can be cut off early
without changing the argmin.

`align_coarse_to_fine` is the production path: a coarse pass slides a
window of length len(hyp) at half-window stride, scoring each window
with a capped bit-parallel distance that abandons early, then an
exhaustive pass searches only around the best two coarse anchors
(two, so a near-duplicate passage elsewhere cannot shadow the true
one). The coarse cap is (cer_threshold + stride_ratio/2 +
coarse_margin) per character: the stride/2 term admits windows that
miss the true span start by up to half a window, which a plain
threshold cap would wrongly abandon.

Documents with `fragments` restrict the search to each fragment
(clip-level transcripts); spans never straddle a fragment boundary.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .errors import ConfigError, DataError, NoCandidateError
from .metrics import CerValue
from .segmenter import Segment

__all__ = [
    "TranscriptDoc",
    "AlignParams",
    "AlignmentMatch",
    "SessionYield",
    "align_exhaustive",
    "align_coarse_to_fine",
    "align_session",
    "exhaustive_candidate_count",
]


@dataclass(frozen=True)
class TranscriptDoc:
    """A session's (normalized) transcript text.

    `fragments` marks (offset, length) windows when the transcript is
    really a collection of per-clip texts; alignment then never crosses
    a fragment boundary.
    """

    session_id: str
    text: str
    fragments: tuple[tuple[int, int], ...] | None = None

    def __post_init__(self) -> None:
        if self.fragments is not None:
            prev_end = 0
            for k, (off, length) in enumerate(self.fragments):
                if length <= 0 or off < 0:
                    raise DataError(f"fragment {k}: bad bounds ({off}, {length})")
                if off < prev_end:
                    raise DataError(f"fragment {k} overlaps or is out of order")
                if off + length > len(self.text):
                    raise DataError(f"fragment {k} extends past the document end")
                prev_end = off + length

    @property
    def char_count(self) -> int:
        return len(self.text)


@dataclass(frozen=True)
class AlignParams:
    cer_threshold: float = 0.3
    span_len_min_ratio: float = 0.7
    span_len_max_ratio: float = 1.3
    coarse_stride_ratio: float = 0.5
    fine_radius: int | None = None  # None: use the hypothesis length
    coarse_margin: float = 0.05

    def __post_init__(self) -> None:
        if not 0 < self.cer_threshold <= 1:
            raise ConfigError(f"cer_threshold must be in (0, 1], got {self.cer_threshold}")
        if not 0 < self.span_len_min_ratio <= 1 <= self.span_len_max_ratio:
            raise ConfigError("need 0 < span_len_min_ratio <= 1 <= span_len_max_ratio")
        if not 0 < self.coarse_stride_ratio <= 1:
            raise ConfigError("coarse_stride_ratio must be in (0, 1]")
        if self.fine_radius is not None and self.fine_radius < 0:
            raise ConfigError("fine_radius must be >= 0")
        if self.coarse_margin < 0:
            raise ConfigError("coarse_margin must be >= 0")


@dataclass(frozen=True)
class AlignmentMatch:
    session_id: str
    index: int
    span_offset: int
    span_len: int
    cer: CerValue
    retained: bool
    candidates: int = 0  # candidate spans the search scored or bounded


@dataclass(frozen=True)
class SessionYield:
    retained_count: int
    retained_seconds: float
    total_seconds: float
    retention_rate: float
    skipped: int = 0


def _codes(s: str) -> np.ndarray:
    return np.frombuffer(s.encode("utf-32-le"), dtype=np.uint32)


@lru_cache(maxsize=32)
def _doc_arrays(doc: TranscriptDoc) -> tuple[np.ndarray, np.ndarray]:
    codes = _codes(doc.text)
    alpha = np.unique(codes)
    tidx = np.searchsorted(alpha, codes).astype(np.int32)
    return alpha, tidx


def _build_peq(hyp: str, alpha: np.ndarray) -> tuple[np.ndarray, int]:
    codes = _codes(hyp)
    m = codes.shape[0]
    nwords = (m + 63) // 64
    peq = np.zeros((alpha.shape[0] + 1, nwords), dtype=np.uint64)
    idx = np.searchsorted(alpha, codes)
    for i in range(m):
        k = idx[i]
        if k < alpha.shape[0] and alpha[k] == codes[i]:
            peq[k, i >> 6] |= np.uint64(1) << np.uint64(i & 63)
    return peq, m


def fast_edit_distance(a: str, b: str) -> int:
    """Exact edit distance via the bit-parallel kernel.

    Same value as metrics.levenshtein, but ~64 characters per machine word,
    so strings far beyond the reach of the two-row DP stay cheap.
    """
    if not a:
        return len(b)
    if not b:
        return len(a)
    bcodes = _codes(b)
    alpha = np.unique(bcodes)
    tidx = np.searchsorted(alpha, bcodes).astype(np.int32)
    peq, m = _build_peq(a, alpha)
    return int(_kernels.window_distance(peq, m, tidx, 0, tidx.shape[0], m + len(b)))


def _span_bounds(m: int, params: AlignParams) -> tuple[int, int]:
    # the 1e-9 keeps float noise like 0.7 * 30 == 21.000000000000004
    # from shifting an integer bound
    lmin = max(1, math.ceil(m * params.span_len_min_ratio - 1e-9))
    lmax = max(lmin, math.floor(m * params.span_len_max_ratio + 1e-9))
    return lmin, lmax


def _count_range(n: int, off_lo: int, off_hi: int, lmin: int, lmax: int) -> int:
    total = 0
    for o in range(off_lo, off_hi + 1):
        lcap = min(lmax, n - o)
        if lcap < lmin:
            break
        total += lcap - lmin + 1
    return total


def exhaustive_candidate_count(doc_len: int, hyp_len: int, params: AlignParams) -> int:
    """How many (offset, length) spans the exhaustive search scores on a
    contiguous document. Closed-form companion to `align_exhaustive`."""
    lmin, lmax = _span_bounds(hyp_len, params)
    if doc_len < lmin:
        return 0
    return _count_range(doc_len, 0, doc_len - lmin, lmin, lmax)


def _ranges_of(doc: TranscriptDoc) -> list[tuple[int, int]]:
    if doc.fragments is not None:
        return list(doc.fragments)
    return [(0, len(doc.text))]


def _finish(
    doc: TranscriptDoc,
    index: int,
    params: AlignParams,
    best: np.ndarray,
    best_base: int,
    evaluated: int,
) -> AlignmentMatch:
    if best[0] < 0:
        raise NoCandidateError(
            f"no candidate span fits in session {doc.session_id!r} "
            f"(document too short for this hypothesis)"
        )
    value = CerValue(int(best[0]), int(best[2]))
    return AlignmentMatch(
        session_id=doc.session_id,
        index=index,
        span_offset=best_base + int(best[1]),
        span_len=int(best[2]),
        cer=value,
        retained=value.is_below(params.cer_threshold),
        candidates=evaluated,
    )


def align_exhaustive(
    hyp: str,
    doc: TranscriptDoc,
    params: AlignParams = AlignParams(),
    index: int = 0,
) -> AlignmentMatch:
    """Score the full candidate set. Reference implementation."""
    if not hyp:
        raise DataError("align: empty hypothesis")
    alpha, tidx = _doc_arrays(doc)
    peq, m = _build_peq(hyp, alpha)
    lmin, lmax = _span_bounds(m, params)
    best = np.array([-1, -1, -1], dtype=np.int64)
    best_base = 0
    evaluated = 0
    for foff, flen in _ranges_of(doc):
        if flen < lmin:
            continue
        snapshot = (best[0], best[1], best[2])
        evaluated += _kernels.span_scan(
            peq, m, tidx[foff : foff + flen], flen, 0, flen - lmin, lmin, lmax, best
        )
        if (best[0], best[1], best[2]) != snapshot:
            best_base = foff
    return _finish(doc, index, params, best, best_base, evaluated)


def _merge_ranges(ranges: list[tuple[int, int]]) -> list[tuple[int, int]]:
    ranges.sort()
    merged: list[tuple[int, int]] = []
    for lo, hi in ranges:
        if merged and lo <= merged[-1][1] + 1:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return merged


def align_coarse_to_fine(
    hyp: str,
    doc: TranscriptDoc,
    params: AlignParams = AlignParams(),
    index: int = 0,
) -> AlignmentMatch:
    """Two-stage search: windowed coarse anchors, then exhaustive
    scoring in a radius around the best two anchors only."""
    if not hyp:
        raise DataError("align: empty hypothesis")
    alpha, tidx = _doc_arrays(doc)
    peq, m = _build_peq(hyp, alpha)
    lmin, lmax = _span_bounds(m, params)
    stride = max(1, round(m * params.coarse_stride_ratio))
    # A window can sit up to stride/2 short of the true span; re-aligning
    # costs up to 2 edits per shifted character, so the slack term is the
    # full stride ratio on top of the retention threshold.
    cap = math.ceil(
        (params.cer_threshold + params.coarse_stride_ratio + params.coarse_margin) * m
    )
    radius = m if params.fine_radius is None else params.fine_radius
    best = np.array([-1, -1, -1], dtype=np.int64)
    best_base = 0
    evaluated = 0
    for foff, flen in _ranges_of(doc):
        if flen < lmin:
            continue
        sub = tidx[foff : foff + flen]
        snapshot = (best[0], best[1], best[2])
        if flen < m:
            # no full window fits; the fragment is already anchor-sized
            evaluated += _kernels.span_scan(peq, m, sub, flen, 0, flen - lmin, lmin, lmax, best)
        else:
            off1, d1, off2, d2, nwin = _kernels.coarse_scan(peq, m, sub, flen, stride, cap)
            evaluated += nwin
            ranges = []
            for anchor in (off1, off2):
                if anchor >= 0:
                    ranges.append(
                        (max(0, anchor - radius), min(flen - lmin, anchor + radius))
                    )
            for lo, hi in _merge_ranges(ranges):
                if lo <= hi:
                    evaluated += _kernels.span_scan(peq, m, sub, flen, lo, hi, lmin, lmax, best)
        if (best[0], best[1], best[2]) != snapshot:
            best_base = foff
    return _finish(doc, index, params, best, best_base, evaluated)


AlignEngine = Callable[..., AlignmentMatch]


def _align_one(
    item: tuple[Segment, str],
    doc: TranscriptDoc,
    params: AlignParams,
    engine: AlignEngine,
) -> AlignmentMatch | None:
    segment, hyp = item
    if not hyp:
        return None
    try:
        return engine(hyp, doc, params, index=segment.index)
    except NoCandidateError:
        return None


def align_session(
    items: Sequence[tuple[Segment, str]],
    doc: TranscriptDoc,
    params: AlignParams = AlignParams(),
    workers: int = 1,
    engine: AlignEngine = align_coarse_to_fine,
) -> tuple[list[AlignmentMatch], SessionYield]:
    """Align each (segment, hypothesis) pair against one document.

    Segments are independent; with workers > 1 they are scored on a
    thread pool (the kernels drop the GIL) and results are re-assembled
    in input order, so the output is identical for any worker count.
    Segments with an empty hypothesis or no candidate span are skipped
    and counted, not fatal.
    """
    if workers < 1:
        raise ConfigError("workers must be >= 1")
    if workers == 1 or len(items) <= 1:
        results = [_align_one(it, doc, params, engine) for it in items]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda it: _align_one(it, doc, params, engine), items))
    matches: list[AlignmentMatch] = []
    retained_count = 0
    retained_seconds = 0.0
    total_seconds = 0.0
    skipped = 0
    for (segment, _), match in zip(items, results):
        total_seconds += segment.duration
        if match is None:
            skipped += 1
            continue
        matches.append(match)
        if match.retained:
            retained_count += 1
            retained_seconds += segment.duration
    rate = retained_seconds / total_seconds if total_seconds > 0 else 0.0
    return matches, SessionYield(
        retained_count=retained_count,
        retained_seconds=retained_seconds,
        total_seconds=total_seconds,
        retention_rate=rate,
        skipped=skipped,
    )
