"""The whole pipeline through the command-line interface.

Generates the bundled demo fixture (a small deterministic synthetic
corpus written out in the documented file formats), then drives every
stage the way an operator would: segment, pair, align, refine, filter,
split, stats. Each stage leaves its resolved configuration next to its
outputs, so a finished directory tree documents how it was produced.

Run from the repository root:  python3 demos/06_full_pipeline_cli.py
Outputs land in ./demo_run/ (safe to delete).
"""
from __future__ import annotations

import json
from pathlib import Path

from alignkit.cli import main
from alignkit.synthetic import CorpusSpec, make_corpus
from alignkit.transcriber import NoiseParams, SimulatedTranscriber

ROOT = Path("demo_run")
FIXTURE = ROOT / "fixture"

# --- 1. write the fixture files --------------------------------------------
# Everything below is the documented interchange format (docs/FORMATS.md):
# one JSON object per line, UTF-8, field names as shown.

FIXTURE.mkdir(parents=True, exist_ok=True)
corpus = make_corpus(
    seed=5, spec=CorpusSpec(n_sessions=3, segments_per_session=(8, 12), source_id="fix")
)
asr = SimulatedTranscriber(NoiseParams(0.06, 0.02, 0.02, seed=11))


def jsonl(name: str, rows) -> Path:
    path = FIXTURE / name
    path.write_text(
        "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows), encoding="utf-8"
    )
    return path


def meta_row(meta) -> dict:
    return {
        "source_id": meta.source_id,
        "session_date": meta.session_date.isoformat() if meta.session_date else None,
        "title": meta.title,
        "doc_number": meta.doc_number,
    }


regions = jsonl("regions.jsonl", ({"session_id": s.session_id, "start": r.start, "end": r.end}
                                  for s in corpus.sessions for r in s.regions))
transcripts = jsonl("transcripts.jsonl", ({"session_id": s.session_id, "text": s.doc.text}
                                          for s in corpus.sessions))
hypotheses = jsonl("hypotheses.jsonl", (
    {"session_id": g.session_id, "index": g.index, "text": asr.transcribe(a)}
    for s in corpus.sessions for g, a in zip(s.segments, s.audios)))
audio = jsonl("audio.jsonl", (
    {"session_id": g.session_id, "index": g.index, "start": g.start, "end": g.end,
     "true_text": a.true_text, "difficulty": a.difficulty, "stream_id": a.stream_id}
    for s in corpus.sessions for g, a in zip(s.segments, s.audios)))
audio_meta = jsonl("audio_meta.jsonl", (meta_row(s.audio_meta) for s in corpus.sessions))
transcript_meta = jsonl("transcript_meta.jsonl",
                        (meta_row(s.transcript_meta) for s in corpus.sessions))
tconfig = FIXTURE / "transcriber.json"
tconfig.write_text(json.dumps({"sub_rate": 0.06, "ins_rate": 0.02, "del_rate": 0.02,
                               "seed": 9, "floor_rate": 0.05, "halving_hours": 0.05}))
print(f"fixture written to {FIXTURE}/\n")

# --- 2. drive the stages ---------------------------------------------------


def run(*argv: str) -> None:
    print(f"$ alignkit {' '.join(argv)}")
    rc = main(list(argv))
    assert rc == 0, f"exit code {rc}"
    print()


run("segment", "--regions", str(regions), "--out-dir", str(ROOT / "segmented"))

run("pair", "--audio-meta", str(audio_meta), "--transcript-meta", str(transcript_meta),
    "--out-dir", str(ROOT / "paired"))

run("align", "--segments", str(ROOT / "segmented" / "segments.jsonl"),
    "--hypotheses", str(hypotheses), "--transcripts", str(transcripts),
    "--source-id", "fix", "--out-dir", str(ROOT / "aligned"))

run("refine", "--audio", str(audio), "--transcripts", str(transcripts),
    "--transcriber-config", str(tconfig), "--out-dir", str(ROOT / "refined"))

manifest = ROOT / "aligned" / "manifest.jsonl"
run("filter", "--manifest", str(manifest), "--max-cer", "0.3",
    "--out-dir", str(ROOT / "filtered"))

run("split", "--manifest", str(ROOT / "filtered" / "filtered.jsonl"),
    "--train-fraction", "0.7", "--out-dir", str(ROOT / "split"))

run("stats", "--manifest", str(ROOT / "split" / "train.jsonl"),
    "--out-dir", str(ROOT / "reported"))

print("done; inspect demo_run/*/ - every stage wrote a *.config.json")
print("provenance file next to its outputs")
