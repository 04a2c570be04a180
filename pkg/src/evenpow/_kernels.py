"""Compiled inner loops for the sieve and the rotation orbit.

All kernels release the GIL so that thread pools get real parallelism.
Limb layout matches :mod:`evenpow.residue`: little-endian base-10**18
limbs in a ``uint64`` array.  Products of two limbs overflow 64 bits, so
:func:`mul_mod_inplace` splits each limb into two base-10**9 halves.
"""

import numpy as np
from numba import njit

_B = np.uint64(10**18)
_H = np.uint64(10**9)
_TEN = np.uint64(10)
_FOUR = np.uint64(4)
_ONE = np.uint64(1)
_ZERO = np.uint64(0)
_ALL = np.uint64(0xFFFFFFFFFFFFFFFF)


@njit(nogil=True, cache=True)
def all_le4(state):
    for i in range(state.shape[0]):
        v = state[i]
        while v != _ZERO:
            if v % _TEN > _FOUR:
                return False
            v //= _TEN
    return True


@njit(nogil=True, cache=True)
def double_inplace(state, top):
    carry = _ZERO
    n = state.shape[0]
    for i in range(n):
        x = state[i] + state[i] + carry
        if x >= _B:
            x -= _B
            carry = _ONE
        else:
            carry = _ZERO
        state[i] = x
    state[n - 1] %= top


@njit(nogil=True, cache=True)
def mul_mod_inplace(state, mult_halves, top, halves, cols):
    """state <- state * mult mod 10**D.  ``mult_halves`` is precomputed."""
    n = state.shape[0]
    m = 2 * n
    for i in range(n):
        halves[2 * i] = state[i] % _H
        halves[2 * i + 1] = state[i] // _H
    for k in range(m):
        cols[k] = _ZERO
    for i in range(m):
        x = halves[i]
        if x == _ZERO:
            continue
        for j in range(m - i):
            cols[i + j] += x * mult_halves[j]
    carry = _ZERO
    for k in range(m):
        s = cols[k] + carry
        cols[k] = s % _H
        carry = s // _H
    for i in range(n):
        state[i] = cols[2 * i] + cols[2 * i + 1] * _H
    state[n - 1] %= top


@njit(nogil=True, cache=True)
def scan_doubling(state, top, count, out):
    """Test ``count`` consecutive exponents, doubling between them.

    Returns ``(found, processed)``.  Offsets of passing exponents go to
    ``out``; if it fills up the scan stops early with ``state`` holding the
    residue of the next untested exponent.
    """
    found = 0
    for i in range(count):
        if state[0] % _TEN <= _FOUR and all_le4(state):
            out[found] = i
            found += 1
            if found == out.shape[0]:
                double_inplace(state, top)
                return found, i + 1
        double_inplace(state, top)
    return found, count


@njit(nogil=True, cache=True)
def scan_stride(state, mult_halves, top, count, out):
    """Like :func:`scan_doubling`, advancing by a fixed multiplier."""
    n = state.shape[0]
    halves = np.empty(2 * n, dtype=np.uint64)
    cols = np.empty(2 * n, dtype=np.uint64)
    found = 0
    for i in range(count):
        if state[0] % _TEN <= _FOUR and all_le4(state):
            out[found] = i
            found += 1
            if found == out.shape[0]:
                mul_mod_inplace(state, mult_halves, top, halves, cols)
                return found, i + 1
        mul_mod_inplace(state, mult_halves, top, halves, cols)
    return found, count


@njit(nogil=True, cache=True)
def _add192(a2, a1, a0, b2, b1, b0):
    """(a2,a1,a0) + (b2,b1,b0) mod 2**192 with carry out of the top word."""
    s0 = a0 + b0
    c = _ONE if s0 < a0 else _ZERO
    t1 = a1 + b1
    c1 = _ONE if t1 < a1 else _ZERO
    s1 = t1 + c
    if s1 < t1:
        c1 = _ONE
    t2 = a2 + b2
    c2 = _ONE if t2 < a2 else _ZERO
    s2 = t2 + c1
    if s2 < t2:
        c2 = _ONE
    return s2, s1, s0, c2


@njit(nogil=True, cache=True)
def _member(x, lo, hi, start, stop):
    """Half-open membership of x in sorted disjoint [lo, hi) runs."""
    a = start
    b = stop
    while a < b:
        mid = (a + b) >> 1
        if lo[mid] <= x:
            a = mid + 1
        else:
            b = mid
    idx = a - 1
    return idx >= start and x < hi[idx]


@njit(nogil=True, cache=True)
def orbit_count(x0, c_words, k_max, d_cap, lo, hi, offsets, hits_out):
    """Walk k = 1..k_max of the rotation by c starting at phase x0.

    ``x0`` and ``c_words`` are 192-bit fractions as (hi, mid, lo) words.
    Membership compares only the top word of the phase against endpoint
    arrays, which is exact because endpoints carry no lower bits.
    ``lo``/``hi`` hold the interval sets for depths 1..d_cap back to back,
    depth d occupying ``offsets[d-1]:offsets[d]``.

    Returns ``(hit_count, truncated, ambiguous_k)``; ``ambiguous_k`` is
    nonzero when some k*c lies too close to an integer for the digit count
    to be trusted.  Hit k values are written to ``hits_out`` while room
    remains.
    """
    c2 = c_words[0]
    c1 = c_words[1]
    c0 = c_words[2]
    p2 = x0[0]
    p1 = x0[1]
    p0 = x0[2]
    f2 = _ZERO
    f1 = _ZERO
    f0 = _ZERO
    whole = 0
    hits = 0
    truncated = False
    for k in range(1, k_max + 1):
        f2, f1, f0, carry = _add192(f2, f1, f0, c2, c1, c0)
        whole += np.int64(carry)
        # floor(k*c) is only reliable when frac(k*C) is not within k ulps of 1
        if f2 == _ALL and f1 == _ALL:
            return hits, truncated, k
        p2, p1, p0, _ = _add192(p2, p1, p0, c2, c1, c0)
        d = whole + 1
        if d > d_cap:
            d = d_cap
            truncated = True
        if _member(p2, lo, hi, offsets[d - 1], offsets[d]):
            if hits < hits_out.shape[0]:
                hits_out[hits] = k
            hits += 1
    return hits, truncated, 0
