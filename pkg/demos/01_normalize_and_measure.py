"""Normalization rules and error-rate basics.

Text comparison only works after both sides agree on trivia: case,
punctuation, diacritics, whitespace. This demo builds a small rule set,
shows what it does to messy input, and then measures character error
rates between a reference and progressively worse hypotheses.
"""
from __future__ import annotations

from alignkit import CerValue, cer, levenshtein, normalize
from alignkit.textnorm import FoldCase, MapChars, NormRuleSet, RemoveClass, StripPunct

# A rule set is declarative data: an ordered list of rules plus the
# language tag it was written for. Rules run in order, and whitespace
# collapse + strip always run last.
rules = NormRuleSet(
    language_code="de",
    rules=(
        FoldCase(),
        MapChars(pairs=(("ä", "ae"), ("ö", "oe"), ("ü", "ue"), ("ß", "ss"))),
        StripPunct(),
        RemoveClass(chars="́̀"),  # stray combining accents
    ),
)

messy = "  Über den   Wolken —  muß die Freiheit wohl grenzenlos sein!  "
clean = normalize(messy, rules)
print("raw:       ", repr(messy))
print("normalized:", repr(clean))

# Edit distance counts single-character insertions, deletions and
# substitutions. CER divides by the reference length, and the library
# keeps the integer pair so threshold checks stay exact.
reference = "die freiheit ist grenzenlos"
for hyp in (
    reference,
    "die freiheit ist grenzenlo",     # one deletion
    "die freiheit war grenzenlos",    # one word swapped
    "freiheit grenzenlos",            # heavily truncated
):
    value = cer(hyp, reference)
    print(
        f"d={levenshtein(hyp, reference):2d}  "
        f"cer={value.value:.3f}  below 0.3? {value.is_below(0.3)!s:5}  {hyp!r}"
    )

# The exact-boundary behavior matters for filtering: 3 edits over a
# 10-character reference is NOT below a 0.3 threshold.
boundary = CerValue(edit_distance=3, ref_len=10)
print("3/10 below 0.3?", boundary.is_below(0.3))
