"""Vectorised double-double arithmetic (about 32 significant digits).

Only what the Bessel J series needs: error-free sum and product, and the
usual sloppy add, multiply and divide built on them. Every function takes
and returns (hi, lo) pairs of numpy arrays or floats.
"""

import numpy as np

_SPLITTER = 134217729.0  # 2**27 + 1


def two_sum(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def quick_two_sum(a, b):
    # requires |a| >= |b|
    s = a + b
    return s, b - (s - a)


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def dd_add(ah, al, bh, bl):
    sh, sl = two_sum(ah, bh)
    th, tl = two_sum(al, bl)
    sl = sl + th
    sh, sl = quick_two_sum(sh, sl)
    sl = sl + tl
    return quick_two_sum(sh, sl)


def dd_mul(ah, al, bh, bl):
    ph, pl = two_prod(ah, bh)
    pl = pl + (ah * bl + al * bh)
    return quick_two_sum(ph, pl)


def dd_div(ah, al, bh, bl):
    q1 = ah / bh
    ph, pl = two_prod(q1, bh)
    pl = pl + q1 * bl
    rh, rl = two_sum(ah, -ph)
    rl = rl - pl + al
    q2 = (rh + rl) / bh
    return quick_two_sum(q1, q2)


def to_float(hi, lo):
    return np.asarray(hi) + np.asarray(lo)
