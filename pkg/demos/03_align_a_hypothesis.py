"""Finding where a noisy hypothesis lives inside a long transcript.

The core question of the pipeline: given an ASR hypothesis for one
audio segment and the official transcript of the whole session, which
transcript span did the segment speak? The exhaustive search scores
every plausible (offset, length) span; the two-stage search scores a
thin slice of them and agrees with the reference wherever it matters.
"""
from __future__ import annotations

import time

from alignkit import AlignParams, align_coarse_to_fine, align_exhaustive
from alignkit.aligner import exhaustive_candidate_count
from alignkit.synthetic import planted_case

# A synthetic case plants a known span inside a generated transcript
# and corrupts a copy of it at a chosen character-noise rate.
case = planted_case(seed=40, index=7, doc_chars=20000, noise=0.25)
print(f"transcript: {len(case.doc.text)} chars")
print(f"true span:  offset {case.true_offset}, {case.true_len} chars")
print(f"hypothesis: {case.hyp[:60]!r}...\n")

params = AlignParams()  # retention threshold: CER < 0.3

t0 = time.perf_counter()
exh = align_exhaustive(case.hyp, case.doc, params)
t1 = time.perf_counter()
c2f = align_coarse_to_fine(case.hyp, case.doc, params)
t2 = time.perf_counter()

for name, match, dt in (("exhaustive", exh, t1 - t0), ("coarse-to-fine", c2f, t2 - t1)):
    print(
        f"{name:15} offset={match.span_offset:6d} len={match.span_len:4d} "
        f"cer={match.cer.value:.3f} retained={match.retained!s:5} "
        f"candidates={match.candidates:9d}  {dt * 1000:7.1f} ms"
    )

total = exhaustive_candidate_count(len(case.doc.text), len(case.hyp), params)
print(
    f"\nthe two-stage search scored {c2f.candidates / total:.2%} of the "
    f"{total} spans the exhaustive search considers"
)
print(f"recovered text: {case.doc.text[c2f.span_offset:c2f.span_offset + 50]!r}...")

# The CER stays exact end to end: the match carries the integer pair,
# so a 0.3 threshold means the fraction 3/10, not the float 0.3.
print(f"\nexact rate: {c2f.cer.edit_distance}/{c2f.cer.ref_len} "
      f"(= {c2f.cer.value:.4f}), below 0.3? {c2f.cer.is_below(0.3)}")
