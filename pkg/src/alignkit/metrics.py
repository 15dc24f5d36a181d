"""Edit distance and character error rate.

Everything downstream that decides whether a segment is kept goes
through `CerValue.is_below`; no other module restates the retention
comparison. Distances are counted over Unicode scalar values (what
Python string iteration yields), so no encoding or combining-mark
tricks can change a score.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ConfigError, DataError

__all__ = ["CerValue", "levenshtein", "banded_levenshtein", "cer"]


@dataclass(frozen=True)
class CerValue:
    """A character error rate stored as the integer pair that defines it.

    Keeping (edit_distance, ref_len) instead of the float quotient makes
    threshold comparisons exact and lets aggregations re-derive rates
    without accumulated rounding.
    """

    edit_distance: int
    ref_len: int

    def __post_init__(self) -> None:
        if self.ref_len < 1:
            raise DataError("CerValue requires ref_len >= 1")
        if self.edit_distance < 0:
            raise DataError("CerValue requires edit_distance >= 0")

    @property
    def value(self) -> float:
        return self.edit_distance / self.ref_len

    def as_fraction(self) -> Fraction:
        return Fraction(self.edit_distance, self.ref_len)

    def is_below(self, threshold: float | str) -> bool:
        """Strict comparison ``rate < threshold``, exact at the boundary.

        The threshold is read as the decimal it prints as, so a record
        with edit_distance/ref_len == 3/10 is *not* below 0.3 even
        though ``float(0.3)`` is not exactly 3/10 in binary.
        """
        return Fraction(self.edit_distance, self.ref_len) < Fraction(str(threshold))


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance between two strings.

    Plain two-row dynamic program in O(len(a) * len(b)) time and
    O(min) space. This is the reference implementation the fast search
    kernels are tested against.
    """
    # cheap reductions first
    if a == b:
        return 0
    # strip common prefix and suffix; they never affect the distance
    lo = 0
    na, nb = len(a), len(b)
    while lo < na and lo < nb and a[lo] == b[lo]:
        lo += 1
    hi = 0
    while hi < na - lo and hi < nb - lo and a[na - 1 - hi] == b[nb - 1 - hi]:
        hi += 1
    a = a[lo : na - hi]
    b = b[lo : nb - hi]
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(a) < len(b):
        a, b = b, a  # iterate rows over the longer string
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cost = prev[j - 1] + (ca != cb)  # substitution / match
            dele = prev[j] + 1
            ins = cur[j - 1] + 1
            best = cost if cost < dele else dele
            cur.append(ins if ins < best else best)
        prev = cur
    return prev[-1]


def banded_levenshtein(a: str, b: str, band: int) -> int | None:
    """Edit distance restricted to the diagonal band |i - j| <= band.

    Returns the exact distance whenever it is <= band, and None when
    the true distance exceeds the band. The band caps both runtime and
    the answer: cells outside the band cannot lie on any path of cost
    <= band.
    """
    if band < 0:
        raise ConfigError("band must be >= 0")
    na, nb = len(a), len(b)
    if abs(na - nb) > band:
        return None  # length gap alone already exceeds the band
    if a == b:
        return 0
    if not a or not b:
        d = max(na, nb)
        return d if d <= band else None
    big = band + 1
    prev = [j if j <= band else big for j in range(nb + 1)]
    for i in range(1, na + 1):
        lo = max(1, i - band)
        hi = min(nb, i + band)
        cur = [big] * (nb + 1)
        row_min = big
        if i <= band:
            cur[0] = i
            row_min = i
        ca = a[i - 1]
        for j in range(lo, hi + 1):
            cost = prev[j - 1] + (ca != b[j - 1])
            dele = prev[j] + 1
            ins = cur[j - 1] + 1
            best = cost if cost < dele else dele
            if ins < best:
                best = ins
            if best > big:
                best = big
            cur[j] = best
            if best < row_min:
                row_min = best
        if row_min > band:
            return None  # every continuation can only grow
        prev = cur
    d = prev[nb]
    return d if d <= band else None


def cer(hyp: str, ref: str) -> CerValue:
    """Character error rate of a hypothesis against a reference.

    Normalized by the reference length; an empty reference has no
    defined rate and raises.
    """
    if len(ref) == 0:
        raise DataError("cer: reference is empty")
    return CerValue(levenshtein(hyp, ref), len(ref))
