"""Bit-parallel edit-distance kernels for the span search.

The inner loops implement Myers' bit-vector recurrence (block form, so
patterns longer than 64 characters work), compiled with numba. One
text character costs ceil(m/64) word operations instead of a DP row,
which is what makes scanning a million-character transcript at every
stride position practical.

Strings enter as int32 arrays of alphabet indices; `peq` is the match
table: `peq[c, w]` has bit i%64 of word w set when pattern position i
holds character c. Bits at and above the pattern length are always
zero in every row, so the junk bits of the final carry word never leak
into scores.

Correctness of every kernel is pinned against the pure-Python dynamic
program in `metrics` by randomized tests, including pattern lengths
around the 64-bit word boundaries.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_MSB = np.uint64(0x8000000000000000)
_ONE = np.uint64(1)
_FULL = np.uint64(0xFFFFFFFFFFFFFFFF)


@njit(cache=True, nogil=True)
def window_distance(peq, m, text, off, wlen, cap):
    """lev(pattern, text[off:off+wlen]) if <= cap, else cap + 1.

    Global alignment: the score starts at m and tracks the last DP row,
    with +1 shifted in at the horizontal boundary (row zero costs j).
    Abandons mid-window as soon as even a perfect tail could not get
    back under the cap.
    """
    nwords = peq.shape[1]
    PV = np.empty(nwords, dtype=np.uint64)
    MV = np.zeros(nwords, dtype=np.uint64)
    for w in range(nwords):
        PV[w] = _FULL
    topmask = _ONE << np.uint64((m - 1) & 63)
    score = m
    for j in range(wlen):
        c = text[off + j]
        hin = 1
        for w in range(nwords):
            Eq = peq[c, w]
            Pv = PV[w]
            Mv = MV[w]
            if hin < 0:
                Eq |= _ONE
            Xv = Eq | Mv
            Xh = (((Eq & Pv) + Pv) ^ Pv) | Eq
            Ph = Mv | ~(Xh | Pv)
            Mh = Pv & Xh
            hout = 0
            if w == nwords - 1:
                if Ph & topmask:
                    hout = 1
                elif Mh & topmask:
                    hout = -1
            else:
                if Ph & _MSB:
                    hout = 1
                elif Mh & _MSB:
                    hout = -1
            Ph = Ph << _ONE
            Mh = Mh << _ONE
            if hin > 0:
                Ph |= _ONE
            elif hin < 0:
                Mh |= _ONE
            PV[w] = Mh | ~(Xv | Ph)
            MV[w] = Ph & Xv
            hin = hout
        score += hin
        if score - (wlen - j - 1) > cap:
            return cap + 1
    if score > cap:
        return cap + 1
    return score


@njit(cache=True, nogil=True)
def coarse_scan(peq, m, text, n, stride, cap):
    """Probe fixed-length windows on a stride grid; keep the best two.

    Returns (off1, d1, off2, d2, windows_probed). Distances are capped
    at cap + 1. Ties go to the earlier offset; the two kept offsets are
    always distinct (off2 is -1 when fewer than two windows exist).
    """
    off1 = -1
    d1 = cap + 2
    off2 = -1
    d2 = cap + 2
    nwin = 0
    off = 0
    last = n - m
    while off <= last:
        d = window_distance(peq, m, text, off, m, cap)
        nwin += 1
        if d < d1:
            off2 = off1
            d2 = d1
            off1 = off
            d1 = d
        elif d < d2:
            off2 = off
            d2 = d
        if off == last:
            break
        off += stride
        if off > last:
            off = last  # final end-aligned window
    return off1, d1, off2, d2, nwin


@njit(cache=True, nogil=True)
def span_scan(peq, m, text, n, off_lo, off_hi, lmin, lmax, best):
    """Score every span (offset o, length L) with o in [off_lo, off_hi],
    L in [lmin, min(lmax, n - o)], keeping the running best.

    `best` is an int64 triple [distance, offset, length] updated in
    place; distance -1 means "no best yet". The winner is the lowest
    rate distance/L, ties broken by smaller offset then smaller L,
    which falls out of scanning offsets and lengths in ascending order
    with strict improvement.

    A candidate is only replaced by a strictly better rate, so spans
    proven worse by the running bound can be abandoned without
    touching the result. Returns the number of candidate spans in the
    scanned range (counting abandoned ones: they were scored by bound).
    """
    nwords = peq.shape[1]
    PV = np.empty(nwords, dtype=np.uint64)
    MV = np.empty(nwords, dtype=np.uint64)
    topmask = _ONE << np.uint64((m - 1) & 63)
    evaluated = 0
    for o in range(off_lo, off_hi + 1):
        lcap = n - o
        if lcap > lmax:
            lcap = lmax
        if lcap < lmin:
            break  # offsets only get shorter from here
        evaluated += lcap - lmin + 1
        for w in range(nwords):
            PV[w] = _FULL
            MV[w] = np.uint64(0)
        score = m
        bd = best[0]
        bl = best[2]
        for j in range(1, lcap + 1):
            c = text[o + j - 1]
            hin = 1
            for w in range(nwords):
                Eq = peq[c, w]
                Pv = PV[w]
                Mv = MV[w]
                if hin < 0:
                    Eq |= _ONE
                Xv = Eq | Mv
                Xh = (((Eq & Pv) + Pv) ^ Pv) | Eq
                Ph = Mv | ~(Xh | Pv)
                Mh = Pv & Xh
                hout = 0
                if w == nwords - 1:
                    if Ph & topmask:
                        hout = 1
                    elif Mh & topmask:
                        hout = -1
                else:
                    if Ph & _MSB:
                        hout = 1
                    elif Mh & _MSB:
                        hout = -1
                Ph = Ph << _ONE
                Mh = Mh << _ONE
                if hin > 0:
                    Ph |= _ONE
                elif hin < 0:
                    Mh |= _ONE
                PV[w] = Mh | ~(Xv | Ph)
                MV[w] = Ph & Xv
                hin = hout
            score += hin
            if j >= lmin:
                if bd < 0 or score * bl < bd * j:
                    best[0] = score
                    best[1] = o
                    best[2] = j
                    bd = score
                    bl = j
            if bd >= 0:
                # even losing one edit per remaining column cannot
                # produce a strictly better rate than the current best
                if (score - (lcap - j)) * bl >= bd * lcap:
                    break
    return evaluated
