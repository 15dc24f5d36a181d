from __future__ import annotations

import datetime as dt
import json
import math

import pytest

from alignkit.aligner import AlignmentMatch, TranscriptDoc
from alignkit.errors import ConfigError, DataError, SplitInfeasibleError
from alignkit.manifest import (
    FilterPredicate,
    ManifestRecord,
    SplitParams,
    filter_records,
    read_manifest,
    record_from_match,
    render_stats,
    split_records,
    stats,
    write_manifest,
)
from alignkit.metrics import CerValue
from alignkit.segmenter import Segment


def _rec(
    sid: str = "s-0",
    idx: int = 0,
    edit: int = 1,
    ref: int = 10,
    dur: float = 10.0,
    **kw,
) -> ManifestRecord:
    kw.setdefault("audio_ref", f"{sid}/{idx:05d}")
    kw.setdefault("ground_truth", "x" * ref)
    kw.setdefault("asr_hypothesis", "y" * ref)
    kw.setdefault("language_code", "und")
    kw.setdefault("source_id", "src")
    kw.setdefault("retained", CerValue(edit, ref).is_below(0.3))
    return ManifestRecord(
        session_id=sid,
        segment_index=idx,
        cer=CerValue(edit, ref),
        duration=dur,
        **kw,
    )


class TestRoundTrip:
    def test_write_read_identity(self, tmp_path):
        records = [
            _rec("s-0", 0, 0, 12, session_date=dt.date(2021, 5, 1), quality_score=3.2),
            _rec("s-0", 1, 3, 10, snr_db=-2.5),
            _rec("s-1", 0, 2, 7, ground_truth="héllo wörld", asr_hypothesis="hello"),
        ]
        path = tmp_path / "m.jsonl"
        assert write_manifest(records, path) == 3
        assert read_manifest(path) == records

    def test_absent_values_are_explicit_nulls(self, tmp_path):
        path = tmp_path / "m.jsonl"
        write_manifest([_rec()], path)
        raw = json.loads(path.read_text().splitlines()[0])
        assert raw["quality_score"] is None
        assert raw["snr_db"] is None
        assert raw["session_date"] is None

    def test_exact_cer_survives_round_trip(self, tmp_path):
        # 1/3 is not a float; the integer pair must carry the exactness
        r = _rec(edit=1, ref=3)
        path = tmp_path / "m.jsonl"
        write_manifest([r], path)
        back = read_manifest(path)[0]
        assert back.cer.edit_distance == 1 and back.cer.ref_len == 3
        assert back.cer.as_fraction() == r.cer.as_fraction()

    def test_read_errors_carry_line_numbers(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"audio_ref": "a"}\n', encoding="utf-8")
        with pytest.raises(DataError, match="1"):
            read_manifest(path)
        path.write_text("not json\n", encoding="utf-8")
        with pytest.raises(DataError, match="not valid JSON"):
            read_manifest(path)

    def test_record_validation(self):
        with pytest.raises(DataError):
            _rec(dur=0.0)
        with pytest.raises(DataError):
            _rec(ground_truth="")
        with pytest.raises(DataError):
            _rec(language_code="")


class TestRecordFromMatch:
    def test_ground_truth_is_doc_span_not_hypothesis(self):
        doc = TranscriptDoc("s-9", "abcdefghij klmnopqrst")
        seg = Segment("s-9", 4, 10.0, 22.0)
        match = AlignmentMatch("s-9", 4, 11, 10, CerValue(2, 10), True)
        rec = record_from_match(doc, seg, "klm-nop-qst", match, language_code="und", source_id="src")
        assert rec.ground_truth == "klmnopqrst"
        assert rec.asr_hypothesis == "klm-nop-qst"
        assert rec.duration == pytest.approx(12.0)
        assert rec.audio_ref == "s-9/00004"
        assert rec.retained


class TestFilter:
    def test_empty_predicate_is_identity(self):
        records = [_rec(idx=i, edit=i, ref=10) for i in range(5)]
        assert filter_records(records, FilterPredicate()) == records

    def test_max_cer_strict_boundary(self):
        records = [
            _rec(idx=0, edit=2, ref=10),   # 0.2  -> kept
            _rec(idx=1, edit=3, ref=10),   # 0.3  -> dropped (strict)
            _rec(idx=2, edit=29, ref=100), # 0.29 -> kept
            _rec(idx=3, edit=31, ref=100), # 0.31 -> dropped
        ]
        got = filter_records(records, FilterPredicate(max_cer=0.3))
        assert [r.segment_index for r in got] == [0, 2]

    def test_min_quality_hand_counted(self):
        qualities = [None, 1.0, 2.86, 2.87, 2.88, 3.5, 4.9, None, 2.9, 0.2]
        records = [_rec(idx=i, quality_score=q) for i, q in enumerate(qualities)]
        got = filter_records(records, FilterPredicate(min_quality=2.87))
        assert [r.segment_index for r in got] == [3, 4, 5, 6, 8]

    def test_duration_language_source_date(self):
        records = [
            _rec("a", 0, dur=5.0, session_date=dt.date(2021, 1, 1)),
            _rec("a", 1, dur=25.0, session_date=dt.date(2021, 6, 1)),
            _rec("b", 0, dur=15.0, language_code="arz", session_date=dt.date(2021, 3, 1)),
        ]
        assert len(filter_records(records, FilterPredicate(min_duration=10))) == 2
        assert len(filter_records(records, FilterPredicate(max_duration=10))) == 1
        assert len(filter_records(records, FilterPredicate(language="arz"))) == 1
        assert len(filter_records(records, FilterPredicate(source="src"))) == 3
        got = filter_records(
            records,
            FilterPredicate(date_range=(dt.date(2021, 2, 1), dt.date(2021, 7, 1))),
        )
        assert len(got) == 2

    def test_missing_optional_field_fails_condition(self):
        records = [_rec(idx=0), _rec(idx=1, session_date=dt.date(2021, 1, 1))]
        got = filter_records(records, FilterPredicate(date_range=(None, None)))
        assert [r.segment_index for r in got] == [1]

    def test_idempotence(self):
        records = [_rec(idx=i, edit=i % 4, ref=10, dur=3.0 + i) for i in range(20)]
        pred = FilterPredicate(max_cer=0.25, min_duration=5.0)
        once = filter_records(records, pred)
        twice = filter_records(once, pred)
        assert once == twice


class TestSplit:
    def _records(self, n_sessions=20, per_session=5):
        return [
            _rec(f"s-{s:03d}", i, dur=10.0)
            for s in range(n_sessions)
            for i in range(per_session)
        ]

    def test_partition_laws(self):
        records = self._records()
        train, test = split_records(records, SplitParams(seed=3))
        assert len(train) == round(len(records) * 0.95) == 95
        assert len(test) == 5
        ids = lambda rs: {(r.session_id, r.segment_index) for r in rs}
        assert ids(train) | ids(test) == ids(records)
        assert ids(train) & ids(test) == set()
        assert {r.session_id for r in train} & {r.session_id for r in test} == set()

    def test_deterministic(self):
        records = self._records()
        p = SplitParams(seed=42)
        assert split_records(records, p) == split_records(records, p)

    def test_seeds_differ_but_both_valid(self):
        records = self._records(n_sessions=30)
        a = split_records(records, SplitParams(seed=1))
        b = split_records(records, SplitParams(seed=2))
        for train, test in (a, b):
            assert len(train) + len(test) == len(records)
            assert {r.session_id for r in train} & {r.session_id for r in test} == set()
        assert a != b  # overwhelmingly likely with 30 sessions

    def test_single_session_infeasible(self):
        records = [_rec("only", i) for i in range(10)]
        with pytest.raises(SplitInfeasibleError):
            split_records(records, SplitParams())
        with pytest.raises(DataError):
            split_records([], SplitParams())

    def test_both_sides_nonempty_even_when_sizes_fight(self):
        # two sessions of 50: target 95 can't be hit; split must still
        # produce a valid 50/50 partition, not an empty side
        records = self._records(n_sessions=2, per_session=50)
        train, test = split_records(records, SplitParams(seed=0))
        assert len(train) == 50 and len(test) == 50

    def test_params_validated(self):
        with pytest.raises(ConfigError):
            SplitParams(train_fraction=0.0)
        with pytest.raises(ConfigError):
            SplitParams(train_fraction=1.0)
        with pytest.raises(ConfigError):
            SplitParams(seed=-1)


class TestStats:
    def test_empty(self):
        report = stats([])
        assert report.count == 0
        assert report.total_hours == 0.0
        assert sum(report.duration_histogram) == 0
        assert report.median_cer is None
        assert report.zero_cer_fraction == 0.0

    def test_median_cer_middle_element(self):
        records = [
            _rec(idx=0, edit=0, ref=100),
            _rec(idx=1, edit=11, ref=100),
            _rec(idx=2, edit=29, ref=100),
        ]
        report = stats(records)
        assert report.median_cer == pytest.approx(0.11)
        assert report.zero_cer_fraction == pytest.approx(1 / 3)

    def test_lower_median_for_even_counts(self):
        records = [_rec(idx=i, dur=d) for i, d in enumerate([4.0, 8.0, 16.0, 28.0])]
        assert stats(records).median_duration == 8.0

    def test_total_hours_matches_sum(self):
        records = [_rec(idx=i, dur=3.0 + (i % 27)) for i in range(500)]
        want = math.fsum(r.duration for r in records) / 3600
        assert abs(stats(records).total_hours - want) <= want * 1e-6

    def test_histogram_binning(self):
        records = [
            _rec(idx=0, dur=3.5),    # bin 3
            _rec(idx=1, dur=29.99),  # bin 29
            _rec(idx=2, dur=30.0),   # clamps into bin 29
            _rec(idx=3, edit=5, ref=10, dur=10.0),  # cer 0.5 -> overflow
        ]
        report = stats(records)
        assert report.duration_histogram[3] == 1
        assert report.duration_histogram[29] == 2
        assert len(report.duration_histogram) == 30
        assert len(report.cer_histogram) == 30
        assert report.cer_overflow == 1

    def test_quality_none_skipped(self):
        records = [_rec(idx=0), _rec(idx=1, quality_score=2.87)]
        report = stats(records)
        assert sum(report.quality_histogram) == 1
        assert report.median_quality == 2.87

    def test_render_smoke(self):
        records = [_rec(idx=i, edit=i % 3, ref=10, dur=5.0 + i % 20) for i in range(50)]
        text = render_stats(stats(records))
        assert "records        50" in text
        assert "duration" in text and "cer" in text
