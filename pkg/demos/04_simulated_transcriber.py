"""The simulated recognition channel and its learning curve.

Without a real ASR system in the loop, the pipeline is exercised with
a character channel: independent substitutions, insertions and
deletions at configured rates, deterministic per (seed, stream). A
learning curve then models what retraining on retained hours does to
those rates: each halving-period of data cuts the excess error in half
toward a floor.
"""
from __future__ import annotations

from alignkit import LearningCurve, NoiseParams, fast_edit_distance, improved_params, transcribe

text = "the committee will now hear evidence from the first witness " * 40
params = NoiseParams(sub_rate=0.06, ins_rate=0.02, del_rate=0.02, seed=42)

# Determinism: the same stream position replays the same corruption;
# a different position gives an independent draw.
a = transcribe(text, params, stream_pos=0)
b = transcribe(text, params, stream_pos=0)
c = transcribe(text, params, stream_pos=1)
print("same stream reproduces:   ", a == b)
print("different stream differs: ", a != c)

# Calibration: the empirical character error rate tracks the total
# configured rate (0.10 here) closely on long text.
rate = fast_edit_distance(a, text) / len(text)
print(f"configured total rate 0.100, measured CER {rate:.3f} "
      f"over {len(text)} chars")
print("sample:", a[:70] + "...\n")

# The learning curve: retraining on h hours moves the total rate to
#   floor + (initial - floor) * 2^(-h / halving_hours)
# with the sub/ins/del mixture preserved proportionally.
curve = LearningCurve(initial_rates=params, floor_rate=0.02, halving_hours=50.0)
print("hours retained -> total error rate")
for hours in (0.0, 25.0, 50.0, 100.0, 200.0, 1000.0):
    print(f"  {hours:7.0f}       {curve.rate_after(hours):.4f}")
print("(one halving period: half the excess above the floor is gone)")

# improved_params rebuilds a full parameter set at some point on the
# curve, keeping the sub/ins/del mixture proportional.
after = improved_params(curve, retained_hours=100.0)
print(f"\nafter 100 h: sub={after.sub_rate:.4f} ins={after.ins_rate:.4f} "
      f"del={after.del_rate:.4f} (total {after.total_rate:.4f})")
