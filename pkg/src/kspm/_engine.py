"""Hot loops for stabilization and avalanches.

Everything here works in the height-difference representation on plain
Python lists of non-negative ints, mutated in place; the public modules
wrap these in immutable value types.  The firing rule for parameter p at
column i (legal iff b[i] > p) is

    b[i-1] += p   (absent for i = 0)
    b[i]   -= p + 1
    b[i+p] += 1

which conserves the grain count sum((i+1) * b[i]).

The strategy loops below track the number of currently enabled columns
exactly (each firing touches three cells, so the count is maintained in
O(1)), which lets them terminate without a final full-width scan.  The
leftmost loop additionally exploits locality: after firing column i the
only column below i that can have become enabled is i - 1, so the scan
cursor backs up by at most one step per firing.

`relax` is a batched variant used for large single-pile runs: one pass
fires every enabled column as often as its current value allows, which is
a legal interleaving of single firings (firing another column never
disables a pending one), so by confluence it reaches the same fixed point
with the same per-column firing counts.  It is vectorized with numpy;
with the grain count capped at 2**40 every intermediate value stays far
below the int64 range.
"""

from __future__ import annotations

import math
import random

import numpy as np

from .errors import WorkLimitExceeded

DEFAULT_WORK_LIMIT = 10**10

# Largest supported grain count.  Keeps the numpy path safely inside
# int64 (transients are bounded by 2N) and makes resource use predictable.
GRAIN_LIMIT = 1 << 40

# Below this many grains the plain-Python leftmost loop beats numpy setup.
_RELAX_CUTOFF = 4096

# Largest dense array the batched path may preallocate (cells).  Huge p
# blows up the width bound (p+1)*sqrt(N); those runs fire rarely and are
# cheap in the plain loop, which grows storage to the actual width only.
_RELAX_MAX_CELLS = 1 << 25


def trim(b: list[int]) -> None:
    """Drop trailing zeros in place (the implicit 0^omega tail)."""
    while b and not b[-1]:
        b.pop()


def support_cap(extra: int, grains: int, p: int) -> int:
    """Upper bound for how far a pile of `grains` can spread.

    A stable pile with no plateau longer than p+1 has width below
    (p+1)*sqrt(N) + p + 1, and the rightmost grain position only ever
    grows, so transient configurations fit too.
    """
    return extra + (p + 1) * (math.isqrt(grains) + 1) + 2 * p + 4


def leftmost(b: list[int], p: int, limit: int, shots: list[int] | None = None) -> int:
    """Fire the smallest enabled column until stable.  Returns total firings."""
    pp1 = p + 1
    m = len(b)
    enabled = 0
    for v in b:
        if v > p:
            enabled += 1
    total = 0
    pos = 0
    if shots is not None and len(shots) < m:
        shots.extend([0] * (m - len(shots)))
    while enabled:
        v = b[pos]
        while v <= p:
            pos += 1
            v = b[pos]
        i = pos
        total += 1
        if total > limit:
            raise WorkLimitExceeded(f"firing budget {limit} exceeded")
        nv = v - pp1
        b[i] = nv
        if nv <= p:
            enabled -= 1
        if i:
            j = i - 1
            ov = b[j]
            if ov:
                # ov <= p here (no enabled column below the leftmost one),
                # so ov + p > p: column j just became enabled.
                b[j] = ov + p
                enabled += 1
                pos = j
            else:
                b[j] = p
        ip = i + p
        if ip >= m:
            b.extend([0] * (ip + 1 - m))
            if shots is not None:
                shots.extend([0] * (ip + 1 - m))
            m = ip + 1
        ov = b[ip]
        b[ip] = ov + 1
        if ov == p:
            enabled += 1
        if shots is not None:
            shots[i] += 1
    trim(b)
    return total


def rightmost(b: list[int], p: int, limit: int, shots: list[int] | None = None) -> int:
    """Fire the largest enabled column until stable.  Returns total firings."""
    pp1 = p + 1
    m = len(b)
    enabled = 0
    for v in b:
        if v > p:
            enabled += 1
    total = 0
    pos = m - 1
    if shots is not None and len(shots) < m:
        shots.extend([0] * (m - len(shots)))
    while enabled:
        v = b[pos]
        while v <= p:
            pos -= 1
            v = b[pos]
        i = pos
        total += 1
        if total > limit:
            raise WorkLimitExceeded(f"firing budget {limit} exceeded")
        nv = v - pp1
        b[i] = nv
        if nv <= p:
            enabled -= 1
        if i:
            j = i - 1
            ov = b[j]
            if ov > p:
                b[j] = ov + p  # was already enabled, stays enabled
            elif ov:
                b[j] = ov + p
                enabled += 1
            else:
                b[j] = p
        ip = i + p
        if ip >= m:
            b.extend([0] * (ip + 1 - m))
            if shots is not None:
                shots.extend([0] * (ip + 1 - m))
            m = ip + 1
        ov = b[ip]
        b[ip] = ov + 1
        if ov == p:
            # columns right of i were stable, so ov <= p
            enabled += 1
        if shots is not None:
            shots[i] += 1
        pos = ip  # every enabled column is now <= i + p
    trim(b)
    return total


def randomized(
    b: list[int], p: int, limit: int, seed: int, shots: list[int] | None = None
) -> int:
    """Fire uniformly among enabled columns (seeded).  Returns total firings."""
    rng = random.Random(seed)
    rnd = rng.random
    pp1 = p + 1
    m = len(b)
    enabled = [i for i, v in enumerate(b) if v > p]
    where = [-1] * m
    for idx, col in enumerate(enabled):
        where[col] = idx
    total = 0
    if shots is not None and len(shots) < m:
        shots.extend([0] * (m - len(shots)))
    while enabled:
        n = len(enabled)
        j = int(rnd() * n)
        if j == n:  # guard against float rounding
            j = n - 1
        i = enabled[j]
        total += 1
        if total > limit:
            raise WorkLimitExceeded(f"firing budget {limit} exceeded")
        nv = b[i] - pp1
        b[i] = nv
        if nv <= p:
            w = where[i]
            last = enabled[-1]
            enabled[w] = last
            where[last] = w
            enabled.pop()
            where[i] = -1
        if i:
            k = i - 1
            ov = b[k]
            b[k] = ov + p if ov else p
            if ov and ov <= p:
                where[k] = len(enabled)
                enabled.append(k)
        ip = i + p
        if ip >= m:
            grow = ip + 1 - m
            b.extend([0] * grow)
            where.extend([-1] * grow)
            if shots is not None:
                shots.extend([0] * grow)
            m = ip + 1
        ov = b[ip]
        b[ip] = ov + 1
        if ov == p:
            where[ip] = len(enabled)
            enabled.append(ip)
        if shots is not None:
            shots[i] += 1
    trim(b)
    return total


def leftmost_avalanche(
    b: list[int], p: int, limit: int = DEFAULT_WORK_LIMIT
) -> list[int]:
    """Leftmost firing sequence for a stable pile that just received a grain.

    `b` must be stable except possibly at column 0 and is mutated to the
    resulting fixed point.  Returns the fired columns in firing order.
    """
    if not b or b[0] <= p:
        trim(b)
        return []
    fired: list[int] = []
    append = fired.append
    pp1 = p + 1
    m = len(b)
    enabled = 1
    pos = 0
    while enabled:
        v = b[pos]
        while v <= p:
            pos += 1
            v = b[pos]
        i = pos
        append(i)
        if len(fired) > limit:
            raise WorkLimitExceeded(f"firing budget {limit} exceeded")
        nv = v - pp1
        b[i] = nv
        if nv <= p:
            enabled -= 1
        if i:
            j = i - 1
            ov = b[j]
            if ov:
                b[j] = ov + p
                enabled += 1
                pos = j
            else:
                b[j] = p
        ip = i + p
        if ip >= m:
            b.extend([0] * (ip + 1 - m))
            m = ip + 1
        ov = b[ip]
        b[ip] = ov + 1
        if ov == p:
            enabled += 1
    trim(b)
    return fired


def relax(b0: list[int], grains: int, p: int, limit: int) -> tuple[list[int], list[int], int]:
    """Batched stabilization: returns (fixed point, per-column firings, total).

    Equivalent to any sequential strategy by confluence; used as the fast
    path for single-pile runs with many grains.
    """
    pp1 = p + 1
    cap = support_cap(len(b0), grains, p)
    arr = np.zeros(cap, dtype=np.int64)
    arr[: len(b0)] = b0
    shots = np.zeros(cap, dtype=np.int64)
    total = 0
    while True:
        t = arr // pp1
        fired = int(t.sum())
        if not fired:
            break
        total += fired
        if total > limit:
            raise WorkLimitExceeded(f"firing budget {limit} exceeded")
        shots += t
        arr -= t * pp1
        arr[:-1] += p * t[1:]
        arr[p:] += t[:-p]
    if arr[-(p + 2) :].any():
        raise AssertionError("relaxation spilled past the proven support bound")
    b = arr.tolist()
    trim(b)
    s = shots.tolist()
    trim(s)
    return b, s, total


def pile_with_shots(grains: int, p: int, limit: int) -> tuple[list[int], list[int], int]:
    """Fixed point and shot vector of a single pile of `grains` on column 0."""
    if grains < _RELAX_CUTOFF or support_cap(1, grains, p) > _RELAX_MAX_CELLS:
        b = [grains] if grains else []
        shots: list[int] = []
        total = leftmost(b, p, limit, shots)
        trim(shots)
        return b, shots, total
    return relax([grains], grains, p, limit)


def max_plateau_over_trajectory(grains: int, p: int, limit: int) -> int:
    """Longest plateau over every configuration of the leftmost run from a pile.

    A plateau of length L (L >= 2 equal-height non-empty columns) is a run
    of L-1 zeros in the height differences strictly inside the support, so
    the check only has to look at cells that just became zero or at tail
    zeros that the support just grew over.  Returns the plateau length (1
    if no plateau ever appears).
    """
    b = [grains] if grains else []
    pp1 = p + 1
    m = len(b)
    enabled = 1 if grains > p else 0
    pos = 0
    last = 0 if grains else -1  # index of last nonzero cell
    max_run = 0  # longest qualifying zero run seen so far
    total = 0
    while enabled:
        v = b[pos]
        while v <= p:
            pos += 1
            v = b[pos]
        i = pos
        total += 1
        if total > limit:
            raise WorkLimitExceeded(f"firing budget {limit} exceeded")
        nv = v - pp1
        b[i] = nv
        if nv <= p:
            enabled -= 1
        if i:
            j = i - 1
            ov = b[j]
            if ov:
                b[j] = ov + p
                enabled += 1
                pos = j
            else:
                b[j] = p
        ip = i + p
        if ip >= m:
            b.extend([0] * (ip + 1 - m))
            m = ip + 1
        ov = b[ip]
        b[ip] = ov + 1
        if ov == p:
            enabled += 1
        # the support end never retreats: zeroing b[i] at i == last always
        # comes with b[i + p] turning nonzero
        prev_last = last
        if ip > last:
            last = ip
        if not nv and i < last:
            lo = i
            while lo and not b[lo - 1]:
                lo -= 1
            hi = i
            while not b[hi + 1]:
                hi += 1
            run = hi - lo + 1
            if run > max_run:
                max_run = run
        if ip > prev_last + 1:
            # cells between the old and new support end turned into an
            # in-support zero run
            hi = ip - 1
            lo = hi
            while lo and not b[lo - 1]:
                lo -= 1
            run = hi - lo + 1
            if run > max_run:
                max_run = run
    return max_run + 1 if max_run else 1
