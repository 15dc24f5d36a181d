"""Cutting a long session into utterance-sized segments.

Voice-activity detection gives speech regions with silences between
them. The segmenter merges regions across short silences, prefers to
cut inside real silences near the target length, forces a cut at the
duration ceiling when a speaker never pauses, and drops isolated
blips too short to make a legal segment.
"""
from __future__ import annotations

from alignkit import SegmenterParams, SpeechRegion, segment_session

params = SegmenterParams()  # 3-30 s bounds, 10-20 s target band
print(f"bounds [{params.min_dur}, {params.max_dur}] s, "
      f"target [{params.target_low}, {params.target_high}] s\n")


def show(title: str, regions: list[SpeechRegion]) -> None:
    result = segment_session(regions, params, session_id="demo")
    print(title)
    for r in regions:
        print(f"  region  {r.start:7.2f} - {r.end:7.2f}  ({r.duration:5.2f} s)")
    for seg in result.segments:
        print(f"  segment {seg.start:7.2f} - {seg.end:7.2f}  ({seg.duration:5.2f} s)")
    if result.dropped_regions:
        print(f"  dropped {result.dropped_regions} region(s), "
              f"{result.dropped_seconds:.2f} s of audio")
    print()


# Ordinary conversation: medium regions separated by clear silences.
# Cuts land inside silences, so segment boundaries never split speech.
show("conversational silences", [
    SpeechRegion(0.0, 8.0),
    SpeechRegion(8.4, 14.9),
    SpeechRegion(15.5, 23.0),
    SpeechRegion(23.2, 31.0),
])

# A filibuster: 95 seconds with no pause at all. The segmenter has no
# silence to use, so it cuts into speech at exactly the 30 s ceiling,
# backing off on the last cut just enough to keep the tail legal.
show("no silences at all", [SpeechRegion(0.0, 95.0)])

# Isolated blips shorter than min_dur with nothing nearby to merge
# into are dropped - and the drop is reported, not silent.
show("unmergeable blip", [
    SpeechRegion(0.0, 12.0),
    SpeechRegion(50.0, 51.2),
    SpeechRegion(80.0, 93.0),
])

# The same blip next to a neighbor merges instead: the 0.8 s gap is
# below the merge threshold, so the pair forms one group.
show("mergeable blip", [
    SpeechRegion(0.0, 12.0),
    SpeechRegion(12.8, 14.0),
])
