"""Operator command surface for the corpus pipeline.

One subcommand per stage, file handoffs between stages, no hidden state:
`segment` turns VAD regions into segments, `align` matches hypothesis text
to transcript spans and emits both match records and a dataset manifest,
`refine` drives the multi-pass loop, and `filter`/`split`/`stats` operate
on manifests. Every stage writes its fully-resolved configuration into the
output directory before doing any work, and finishes each output with an
atomic rename so a crashed run never leaves half-written files behind.

Exit codes are a fixed contract for scripting: 0 success, 1 configuration
or usage error, 2 data error, 3 internal error.
"""
from __future__ import annotations

import argparse
import dataclasses
import datetime as dt
import json
import os
import sys
import tempfile
from pathlib import Path
from typing import Any, Callable, Iterable

from . import __version__
from .aligner import (
    AlignmentMatch,
    AlignParams,
    TranscriptDoc,
    align_coarse_to_fine,
    align_exhaustive,
    align_session,
)
from .errors import ConfigError, CorpusError, DataError
from .manifest import (
    FilterPredicate,
    SplitParams,
    filter_records,
    read_manifest,
    record_from_match,
    render_stats,
    split_records,
    stats,
    write_manifest,
)
from .pairing import SessionMeta, pair_sessions, parse_session_date
from .refinement import RefineConfig, run_refinement
from .segmenter import Segment, SegmenterParams, SpeechRegion, segment_session
from .textnorm import NormRuleSet, load_rule_set, normalize
from .transcriber import (
    LearningCurve,
    NoiseParams,
    SimAudio,
    learning_curve_transcriber,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


# --- file helpers ----------------------------------------------------------


def _read_jsonl(path: str) -> Iterable[tuple[int, dict]]:
    try:
        f = open(path, encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot open {path}: {e}") from e
    with f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                d = json.loads(line)
            except json.JSONDecodeError as e:
                raise DataError(f"{path}:{lineno}: not valid JSON: {e}") from e
            if not isinstance(d, dict):
                raise DataError(f"{path}:{lineno}: expected an object per line")
            yield lineno, d


def _field(d: dict, name: str, where: str) -> Any:
    if name not in d:
        raise DataError(f"{where}: missing field {name!r}")
    return d[name]


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_jsonl(path: Path, rows: Iterable[dict]) -> None:
    _atomic_write(
        path,
        "".join(json.dumps(r, ensure_ascii=False, separators=(",", ":")) + "\n" for r in rows),
    )


def _write_json(path: Path, obj: Any) -> None:
    _atomic_write(path, json.dumps(obj, ensure_ascii=False, indent=2, sort_keys=True) + "\n")


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _jsonable(obj: Any) -> Any:
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {k: _jsonable(v) for k, v in dataclasses.asdict(obj).items()}
    if isinstance(obj, dt.date):
        return obj.isoformat()
    if isinstance(obj, (list, tuple)):
        return [_jsonable(x) for x in obj]
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    return obj


def _write_stage_config(out: Path, stage: str, paths: dict, params: dict) -> None:
    """Resolved provenance, written before any stage work starts."""
    _write_json(
        out / f"{stage}.config.json",
        {"stage": stage, "paths": paths, "params": _jsonable(params)},
    )


# --- input readers ---------------------------------------------------------


def _read_regions(path: str) -> dict[str, list[SpeechRegion]]:
    regions: dict[str, list[SpeechRegion]] = {}
    for lineno, d in _read_jsonl(path):
        where = f"{path}:{lineno}"
        sid = _field(d, "session_id", where)
        regions.setdefault(sid, []).append(
            SpeechRegion(float(_field(d, "start", where)), float(_field(d, "end", where)))
        )
    return regions


def _read_segments(path: str) -> list[Segment]:
    out = []
    for lineno, d in _read_jsonl(path):
        where = f"{path}:{lineno}"
        out.append(
            Segment(
                _field(d, "session_id", where),
                int(_field(d, "index", where)),
                float(_field(d, "start", where)),
                float(_field(d, "end", where)),
            )
        )
    return out


def _read_docs(path: str) -> dict[str, TranscriptDoc]:
    docs: dict[str, TranscriptDoc] = {}
    for lineno, d in _read_jsonl(path):
        where = f"{path}:{lineno}"
        sid = _field(d, "session_id", where)
        if sid in docs:
            raise DataError(f"{where}: duplicate transcript for session {sid!r}")
        frags = d.get("fragments")
        docs[sid] = TranscriptDoc(
            sid,
            _field(d, "text", where),
            fragments=tuple(tuple(x) for x in frags) if frags else None,
        )
    return docs


def _read_hypotheses(path: str) -> dict[tuple[str, int], str]:
    hyps: dict[tuple[str, int], str] = {}
    for lineno, d in _read_jsonl(path):
        where = f"{path}:{lineno}"
        key = (_field(d, "session_id", where), int(_field(d, "index", where)))
        if key in hyps:
            raise DataError(f"{where}: duplicate hypothesis for segment {key}")
        hyps[key] = _field(d, "text", where)
    return hyps


def _read_audio(path: str) -> list[tuple[Segment, SimAudio]]:
    pool = []
    for lineno, d in _read_jsonl(path):
        where = f"{path}:{lineno}"
        seg = Segment(
            _field(d, "session_id", where),
            int(_field(d, "index", where)),
            float(_field(d, "start", where)),
            float(_field(d, "end", where)),
        )
        audio = SimAudio(
            true_text=_field(d, "true_text", where),
            stream_id=int(_field(d, "stream_id", where)),
            difficulty=float(d.get("difficulty", 1.0)),
        )
        pool.append((seg, audio))
    return pool


def _read_metadata(path: str) -> list[SessionMeta]:
    metas = []
    for lineno, d in _read_jsonl(path):
        where = f"{path}:{lineno}"
        raw_date = d.get("session_date")
        metas.append(
            SessionMeta(
                source_id=_field(d, "source_id", where),
                session_date=parse_session_date(raw_date) if raw_date else None,
                title=d.get("title"),
                doc_number=d.get("doc_number"),
                url=d.get("url"),
            )
        )
    return metas


def _match_row(m: AlignmentMatch) -> dict:
    return {
        "session_id": m.session_id,
        "index": m.index,
        "span_offset": m.span_offset,
        "span_len": m.span_len,
        "edit_distance": m.cer.edit_distance,
        "ref_len": m.cer.ref_len,
        "retained": m.retained,
    }


# --- commands --------------------------------------------------------------


def cmd_normalize(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    if args.rules:
        ruleset = load_rule_set(args.rules)
    else:
        ruleset = NormRuleSet(language_code="und", rules=())
    _write_stage_config(
        out,
        "normalize",
        {"in": args.infile, "rules": args.rules, "out_dir": str(out)},
        {"rules": ruleset.describe()},
    )
    try:
        text = Path(args.infile).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot open {args.infile}: {e}") from e
    lines = [normalize(line, ruleset) for line in text.splitlines()]
    _atomic_write(out / "normalized.txt", "\n".join(lines) + ("\n" if lines else ""))
    print(f"normalized {len(lines)} lines -> {out / 'normalized.txt'}")
    return EXIT_OK


def cmd_segment(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    params = SegmenterParams(
        min_dur=args.min_dur,
        max_dur=args.max_dur,
        target_low=args.target_low,
        target_high=args.target_high,
        min_silence_gap=args.min_silence_gap,
        merge_gap=args.merge_gap,
    )
    _write_stage_config(
        out, "segment", {"regions": args.regions, "out_dir": str(out)}, {"segmenter": params}
    )
    regions = _read_regions(args.regions)
    rows = []
    report = {}
    for sid in sorted(regions):
        result = segment_session(regions[sid], params, sid)
        for seg in result.segments:
            rows.append(
                {"session_id": sid, "index": seg.index, "start": seg.start, "end": seg.end}
            )
        report[sid] = {
            "segments": len(result.segments),
            "dropped_regions": result.dropped_regions,
            "dropped_seconds": result.dropped_seconds,
        }
    _write_jsonl(out / "segments.jsonl", rows)
    _write_json(out / "segment_report.json", report)
    print(f"wrote {len(rows)} segments across {len(regions)} sessions -> {out}")
    return EXIT_OK


def cmd_pair(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    _write_stage_config(
        out,
        "pair",
        {
            "audio_meta": args.audio_meta,
            "transcript_meta": args.transcript_meta,
            "out_dir": str(out),
        },
        {"accept_threshold": args.accept_threshold},
    )
    audio = _read_metadata(args.audio_meta)
    trans = _read_metadata(args.transcript_meta)
    result = pair_sessions(audio, trans, accept_threshold=args.accept_threshold)
    _write_jsonl(
        out / "pairs.jsonl",
        (
            {
                "audio_source_id": p.audio_meta.source_id,
                "transcript_source_id": p.transcript_meta.source_id,
                "score": p.score,
                "validated": p.validated,
            }
            for p in result.pairs
        ),
    )
    _write_jsonl(
        out / "unpaired.jsonl",
        [{"side": "audio", "source_id": m.source_id} for m in result.unpaired_audio]
        + [{"side": "transcript", "source_id": m.source_id} for m in result.unpaired_transcripts],
    )
    print(
        f"paired {len(result.pairs)}; unpaired audio {len(result.unpaired_audio)}, "
        f"transcripts {len(result.unpaired_transcripts)} -> {out}"
    )
    return EXIT_OK


def _align_params(args: argparse.Namespace) -> AlignParams:
    return AlignParams(cer_threshold=args.cer_threshold)


def cmd_align(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    params = _align_params(args)
    _write_stage_config(
        out,
        "align",
        {
            "segments": args.segments,
            "hypotheses": args.hypotheses,
            "transcripts": args.transcripts,
            "out_dir": str(out),
        },
        {
            "align": params,
            "engine": args.engine,
            "workers": args.workers,
            "seed": args.seed,
            "language": args.language,
            "source_id": args.source_id,
        },
    )
    docs = _read_docs(args.transcripts)
    segments = _read_segments(args.segments)
    hyps = _read_hypotheses(args.hypotheses)
    by_session: dict[str, list[tuple[Segment, str]]] = {}
    unknown_sessions = 0
    for seg in segments:
        if seg.session_id not in docs:
            unknown_sessions += 1
            continue
        hyp = hyps.get((seg.session_id, seg.index), "")
        by_session.setdefault(seg.session_id, []).append((seg, hyp))

    engine = align_exhaustive if args.engine == "exhaustive" else align_coarse_to_fine
    matches: list[AlignmentMatch] = []
    manifest_rows = []
    session_yields = {}
    for sid in sorted(by_session):
        items = by_session[sid]
        sess_matches, sy = align_session(
            items, docs[sid], params, workers=args.workers, engine=engine
        )
        matches.extend(sess_matches)
        session_yields[sid] = {
            "retained_count": sy.retained_count,
            "retained_seconds": sy.retained_seconds,
            "total_seconds": sy.total_seconds,
            "retention_rate": sy.retention_rate,
            "skipped": sy.skipped,
        }
        seg_by_index = {seg.index: seg for seg, _ in items}
        for m in sess_matches:
            manifest_rows.append(
                record_from_match(
                    docs[sid],
                    seg_by_index[m.index],
                    hyps.get((sid, m.index), ""),
                    m,
                    language_code=args.language,
                    source_id=args.source_id,
                )
            )
    matches.sort(key=lambda m: (m.session_id, m.index))
    manifest_rows.sort(key=lambda r: (r.session_id, r.segment_index))
    _write_jsonl(out / "matches.jsonl", (_match_row(m) for m in matches))
    write_manifest(manifest_rows, out / "manifest.jsonl")
    retained = sum(1 for m in matches if m.retained)
    _write_json(
        out / "yield.json",
        {
            "sessions": session_yields,
            "segments_total": len(segments),
            "segments_aligned": len(matches),
            "segments_retained": retained,
            "segments_without_session": unknown_sessions,
        },
    )
    print(f"aligned {len(matches)} segments, retained {retained} -> {out}")
    return EXIT_OK


def _load_transcriber_config(path: str) -> LearningCurve:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigError(f"cannot open {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: not valid JSON: {e}") from e
    try:
        initial = NoiseParams(
            sub_rate=raw["sub_rate"],
            ins_rate=raw["ins_rate"],
            del_rate=raw["del_rate"],
            alphabet=raw.get("alphabet", NoiseParams(0, 0, 0).alphabet),
            seed=raw.get("seed", 0),
        )
    except KeyError as e:
        raise ConfigError(f"{path}: missing transcriber field {e.args[0]!r}") from e
    return LearningCurve(
        initial_rates=initial,
        floor_rate=raw.get("floor_rate", 0.05),
        halving_hours=raw.get("halving_hours", 1.0),
    )


def cmd_refine(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    curve = _load_transcriber_config(args.transcriber_config)
    params = _align_params(args)
    config = RefineConfig(
        transcriber=learning_curve_transcriber(curve),
        align_params=params,
        max_passes=args.max_passes,
        min_relative_gain=args.min_relative_gain,
        workers=args.workers,
    )
    _write_stage_config(
        out,
        "refine",
        {
            "audio": args.audio,
            "transcripts": args.transcripts,
            "transcriber_config": args.transcriber_config,
            "out_dir": str(out),
        },
        {
            "align": params,
            "curve": curve,
            "max_passes": args.max_passes,
            "min_relative_gain": args.min_relative_gain,
            "workers": args.workers,
        },
    )
    pool = _read_audio(args.audio)
    docs = _read_docs(args.transcripts)
    outcome = run_refinement(pool, docs, config)
    _write_jsonl(
        out / "passes.jsonl",
        (
            {
                "pass": r.pass_index,
                "retained_hours": r.retained_hours,
                "new_hours": r.new_hours,
                "residual_hours": r.residual_hours,
                "relative_gain": r.relative_gain,
                "skipped_segments": r.skipped_segments,
            }
            for r in outcome.reports
        ),
    )
    retained = sorted(outcome.retained, key=lambda m: (m.session_id, m.index))
    _write_jsonl(out / "retained.jsonl", (_match_row(m) for m in retained))
    _write_json(
        out / "summary.json",
        [
            {
                "pass": r.pass_index,
                "retained_hours": r.retained_hours,
                "new_hours": r.new_hours,
                "residual_hours": r.residual_hours,
                "relative_gain": r.relative_gain,
            }
            for r in outcome.reports
        ],
    )
    last = outcome.reports[-1]
    print(
        f"{len(outcome.reports)} passes, {last.retained_hours:.2f} h retained, "
        f"{last.residual_hours:.2f} h residual -> {out}"
    )
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    _write_stage_config(out, "stats", {"manifest": args.manifest, "out_dir": str(out)}, {})
    records = read_manifest(args.manifest)
    report = stats(records)
    _write_json(out / "stats.json", _jsonable(report))
    rendering = render_stats(report)
    _atomic_write(out / "stats.txt", rendering + "\n")
    print(rendering)
    return EXIT_OK


def cmd_filter(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    date_range = None
    if args.date_from or args.date_to:
        try:
            date_range = (
                dt.date.fromisoformat(args.date_from) if args.date_from else None,
                dt.date.fromisoformat(args.date_to) if args.date_to else None,
            )
        except ValueError as e:
            raise ConfigError(f"bad date bound: {e}") from e
    predicate = FilterPredicate(
        max_cer=args.max_cer,
        min_duration=args.min_duration,
        max_duration=args.max_duration,
        min_quality=args.min_quality,
        language=args.language,
        source=args.source,
        date_range=date_range,
    )
    _write_stage_config(
        out, "filter", {"manifest": args.manifest, "out_dir": str(out)}, {"predicate": predicate}
    )
    records = read_manifest(args.manifest)
    kept = filter_records(records, predicate)
    write_manifest(kept, out / "filtered.jsonl")
    print(f"kept {len(kept)} of {len(records)} records -> {out / 'filtered.jsonl'}")
    return EXIT_OK


def cmd_split(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    params = SplitParams(train_fraction=args.train_fraction, seed=args.seed)
    _write_stage_config(
        out, "split", {"manifest": args.manifest, "out_dir": str(out)}, {"split": params}
    )
    records = read_manifest(args.manifest)
    train, test = split_records(records, params)
    write_manifest(train, out / "train.jsonl")
    write_manifest(test, out / "test.jsonl")
    print(f"train {len(train)} / test {len(test)} records -> {out}")
    return EXIT_OK


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="alignkit",
        description="Align noisy transcription against official transcripts and package the result.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, fn: Callable, help_: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(fn=fn)
        sp.add_argument("--out-dir", required=True, help="stage output directory")
        return sp

    sp = add("normalize", cmd_normalize, "normalize a text file line by line")
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--rules", help="JSON rule-set file; omit for collapse-only")

    sp = add("segment", cmd_segment, "cut VAD speech regions into segments")
    sp.add_argument("--regions", required=True)
    sp.add_argument("--min-dur", type=float, default=3.0)
    sp.add_argument("--max-dur", type=float, default=30.0)
    sp.add_argument("--target-low", type=float, default=10.0)
    sp.add_argument("--target-high", type=float, default=20.0)
    sp.add_argument("--min-silence-gap", type=float, default=0.3)
    sp.add_argument("--merge-gap", type=float, default=1.0)

    sp = add("pair", cmd_pair, "match audio sessions to transcripts by metadata")
    sp.add_argument("--audio-meta", required=True)
    sp.add_argument("--transcript-meta", required=True)
    sp.add_argument("--accept-threshold", type=float, default=0.6)

    sp = add("align", cmd_align, "align hypotheses against transcript documents")
    sp.add_argument("--segments", required=True)
    sp.add_argument("--hypotheses", required=True)
    sp.add_argument("--transcripts", required=True)
    sp.add_argument("--cer-threshold", type=float, default=0.3)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--engine", choices=("coarse", "exhaustive"), default="coarse")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--language", default="und")
    sp.add_argument("--source-id", default="cli")

    sp = add("refine", cmd_refine, "multi-pass alignment with a learning transcriber")
    sp.add_argument("--audio", required=True, help="simulated audio pool (JSONL)")
    sp.add_argument("--transcripts", required=True)
    sp.add_argument("--transcriber-config", required=True)
    sp.add_argument("--max-passes", type=int, default=3)
    sp.add_argument("--min-relative-gain", type=float, default=0.02)
    sp.add_argument("--cer-threshold", type=float, default=0.3)
    sp.add_argument("--workers", type=int, default=1)

    sp = add("stats", cmd_stats, "distribution statistics over a manifest")
    sp.add_argument("--manifest", required=True)

    sp = add("filter", cmd_filter, "filter a manifest by quality predicates")
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--max-cer", type=float)
    sp.add_argument("--min-duration", type=float)
    sp.add_argument("--max-duration", type=float)
    sp.add_argument("--min-quality", type=float)
    sp.add_argument("--language")
    sp.add_argument("--source")
    sp.add_argument("--date-from")
    sp.add_argument("--date-to")

    sp = add("split", cmd_split, "session-atomic train/test split")
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--train-fraction", type=float, default=0.95)
    sp.add_argument("--seed", type=int, default=0)

    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 0 for --help/--version, 2 for usage errors; fold
        # usage errors into the config exit code
        return EXIT_OK if not e.code else EXIT_CONFIG
    try:
        return args.fn(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except CorpusError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except Exception as e:  # pragma: no cover - defensive
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
