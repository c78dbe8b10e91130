"""Incremental fixed-point computation through leftmost avalanches.

Instead of collapsing a pile of N grains in one go, the fixed points
pi(1), pi(2), ... can be built one grain at a time: add a grain on
column 0 of pi(k-1), then fire leftmost until stable, which lands exactly
on pi(k).  The firing sequence of that relaxation is the k-th avalanche;
it fires each column at most once.

A *hole* of an avalanche is a skipped column with a fired right neighbor.
The density column L'(p,k) is where the avalanche stops skipping: from
L'(p,k) up to its largest column everything fires.  L(p,N) aggregates the
maximum of L'(p,k) over k <= N.

`incremental_scan` streams one record per grain to an observer and keeps
only the current pile in memory, so scans up to millions of grains need
memory proportional to the support width, not to N.  Observer callbacks
run on the scan's own thread of control and must not assume reentrancy;
the scan itself is inherently sequential in k, but distinct scans are
independent and can run concurrently.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Callable, IO, Optional

from . import _engine
from .core import Configuration, DEFAULT_WORK_LIMIT, GRAIN_LIMIT, Params
from .errors import InvalidParameter, NotStable


@dataclass(frozen=True)
class Avalanche:
    """Columns fired (in order) while absorbing the k-th grain."""

    k: int
    fired: tuple[int, ...]

    @property
    def fired_set(self) -> frozenset[int]:
        return frozenset(self.fired)

    @property
    def max_fired(self) -> Optional[int]:
        return max(self.fired) if self.fired else None

    def to_json(self) -> str:
        return json.dumps({"k": self.k, "fired": list(self.fired)}, separators=(",", ":"))

    @classmethod
    def from_json(cls, payload: str) -> "Avalanche":
        obj = json.loads(payload)
        return cls(obj["k"], tuple(obj["fired"]))


@dataclass(frozen=True)
class DensityReport:
    """Where the k-th avalanche becomes a dense block of firings."""

    k: int
    l_prime: int
    max_fired: Optional[int]


@dataclass(frozen=True)
class ScanSummary:
    grains: int
    params: Params
    l_global: int
    total_firings: int
    max_avalanche: int
    final: Configuration


Observer = Callable[[int, Avalanche, Configuration], None]


def add_grain(c: Configuration) -> Configuration:
    """One more grain on column 0 (b_0 + 1)."""
    if c.grain_count() >= GRAIN_LIMIT:
        raise InvalidParameter("grain count would exceed limit 2**40")
    b = (c.diffs[0] + 1,) + c.diffs[1:] if c.diffs else (1,)
    return Configuration._trusted(b, c.params)


def run_avalanche(
    c: Configuration, k: int, work_limit: int = DEFAULT_WORK_LIMIT
) -> tuple[Avalanche, Configuration]:
    """Add a grain to the stable pile `c` and relax leftmost.

    When c = pi(k-1) the result is (k-th avalanche, pi(k)).
    """
    if not c.is_stable():
        raise NotStable("avalanches start from a stable configuration")
    b = list(c.diffs)
    if b:
        b[0] += 1
    else:
        b = [1]
    fired = _engine.leftmost_avalanche(b, c.params.p, work_limit)
    return Avalanche(k, tuple(fired)), Configuration._trusted(tuple(b), c.params)


def holes(a: Avalanche) -> list[int]:
    """Ascending positions i with i not fired but i+1 fired."""
    if not a.fired:
        return []
    cols = sorted(a.fired)
    return [v - 1 for j, v in enumerate(cols) if v and (j == 0 or cols[j - 1] != v - 1)]


def density_column(a: Avalanche) -> DensityReport:
    """L'(p,k): one past the largest hole (0 when the avalanche has none)."""
    return DensityReport(a.k, _lprime(a.fired), a.max_fired)


def _lprime(fired) -> int:
    # start of the rightmost maximal run of consecutive fired columns
    if not fired:
        return 0
    cols = sorted(fired)
    start = cols[-1]
    for v in reversed(cols[:-1]):
        if v != start - 1:
            break
        start = v
    return start


def incremental_scan(
    grains: int,
    params: Params,
    sink: Optional[Observer] = None,
    work_limit: int = DEFAULT_WORK_LIMIT,
) -> ScanSummary:
    """Build pi(1) .. pi(grains) one grain at a time.

    Streams (k, k-th avalanche, pi(k)) to `sink` when given.  The summary
    carries L(p, N) and aggregate statistics; the per-k data exists only
    transiently.
    """
    if grains < 1:
        raise InvalidParameter(f"grain count must be >= 1, got {grains}")
    if grains > GRAIN_LIMIT:
        raise InvalidParameter(f"grain count {grains} exceeds limit 2**40")
    p = params.p
    b: list[int] = []
    l_global = 0
    total = 0
    max_avalanche = 0
    budget = work_limit
    for k in range(1, grains + 1):
        if b:
            b[0] += 1
        else:
            b = [1]
        fired = _engine.leftmost_avalanche(b, p, budget)
        budget -= len(fired)
        total += len(fired)
        if len(fired) > max_avalanche:
            max_avalanche = len(fired)
        lp = _lprime(fired)
        if lp > l_global:
            l_global = lp
        if sink is not None:
            sink(k, Avalanche(k, tuple(fired)), Configuration._trusted(tuple(b), params))
    final = Configuration._trusted(tuple(b), params)
    return ScanSummary(grains, params, l_global, total, max_avalanche, final)


def global_density(grains: int, params: Params, work_limit: int = DEFAULT_WORK_LIMIT) -> int:
    """L(p, N): max of L'(p, k) over k <= N."""
    return incremental_scan(grains, params, None, work_limit).l_global


class ScanCsvWriter:
    """Observer that appends one CSV row per grain.

    Columns: k, fired_count, max_fired, l_prime, support_width; max_fired
    is left empty for an avalanche that fired nothing.
    """

    HEADER = ("k", "fired_count", "max_fired", "l_prime", "support_width")

    def __init__(self, stream: IO[str]):
        self._writer = csv.writer(stream, lineterminator="\n")
        self._writer.writerow(self.HEADER)

    def __call__(self, k: int, a: Avalanche, c: Configuration) -> None:
        mf = a.max_fired
        self._writer.writerow(
            (k, len(a.fired), "" if mf is None else mf, _lprime(a.fired), c.width())
        )
