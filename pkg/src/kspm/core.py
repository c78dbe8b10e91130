"""Sand pile configurations and the KSPM(p) firing rule.

A pile is an ultimately null sequence of column heights; we store it as
the sequence of height differences b_i = h_i - h_{i+1}, which is the
representation every other module works with.  Column i may fire exactly
when b_i > p; a firing moves p grains one step each onto the p columns to
the right, i.e.

    b[i-1] += p   (absent for i = 0)
    b[i]   -= p + 1
    b[i+p] += 1

The rewriting system has the diamond property, so from any configuration
a unique fixed point is reached and the number of firings is the same for
every strategy.  `stabilize` exposes leftmost, rightmost, and seeded
random strategies so that this strong convergence can be exercised rather
than assumed.

Values are immutable after construction and all operations are pure, so
they can be shared freely across threads; parallelism belongs above this
module (e.g. independent (p, N) sweeps).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Union

from . import _engine
from .errors import (
    FiringNotEnabled,
    IndexOutOfRange,
    InvalidParameter,
    NotMonotone,
)

DEFAULT_WORK_LIMIT = _engine.DEFAULT_WORK_LIMIT
GRAIN_LIMIT = _engine.GRAIN_LIMIT

LEFTMOST = "leftmost"
RIGHTMOST = "rightmost"


@dataclass(frozen=True)
class Params:
    """Model parameter: p grains fall at each firing."""

    p: int

    def __post_init__(self) -> None:
        if not isinstance(self.p, int) or self.p < 1:
            raise InvalidParameter(f"p must be a positive integer, got {self.p!r}")


@dataclass(frozen=True)
class RandomStrategy:
    """Fire uniformly among enabled columns, driven by a seeded PRNG."""

    seed: int


Strategy = Union[str, RandomStrategy]


@dataclass(frozen=True)
class HeightProfile:
    """Column heights: non-increasing, ultimately null."""

    heights: tuple[int, ...]

    def __post_init__(self) -> None:
        hs = tuple(int(v) for v in self.heights)
        while hs and hs[-1] == 0:
            hs = hs[:-1]
        object.__setattr__(self, "heights", hs)
        prev = None
        for h in hs:
            if h < 0:
                raise InvalidParameter(f"negative height {h}")
            if prev is not None and h > prev:
                raise NotMonotone(f"heights increase: {prev} -> {h}")
            prev = h

    def to_configuration(self, params: Params) -> "Configuration":
        hs = self.heights
        diffs = [hs[i] - (hs[i + 1] if i + 1 < len(hs) else 0) for i in range(len(hs))]
        return Configuration(tuple(diffs), params)


@dataclass(frozen=True)
class Configuration:
    """Height-difference form of a pile, trailing zeros trimmed."""

    diffs: tuple[int, ...]
    params: Params

    def __post_init__(self) -> None:
        ds = tuple(int(v) for v in self.diffs)
        while ds and ds[-1] == 0:
            ds = ds[:-1]
        for v in ds:
            if v < 0:
                raise InvalidParameter(f"negative height difference {v}")
        object.__setattr__(self, "diffs", ds)

    # -- constructors ------------------------------------------------

    @classmethod
    def of(cls, diffs: Iterable[int], params: Params) -> "Configuration":
        return cls(tuple(diffs), params)

    @classmethod
    def _trusted(cls, diffs: tuple[int, ...], params: Params) -> "Configuration":
        # engine output is already normalized non-negative ints; skip the
        # per-element validation, which would dominate streaming scans
        obj = object.__new__(cls)
        object.__setattr__(obj, "diffs", diffs)
        object.__setattr__(obj, "params", params)
        return obj

    @classmethod
    def single_pile(cls, grains: int, params: Params) -> "Configuration":
        """The initial configuration: all grains stacked on column 0."""
        if grains < 0:
            raise InvalidParameter(f"grain count must be >= 0, got {grains}")
        if grains > GRAIN_LIMIT:
            raise InvalidParameter(f"grain count {grains} exceeds limit 2**40")
        return cls((grains,) if grains else (), params)

    # -- basic queries -----------------------------------------------

    @property
    def p(self) -> int:
        return self.params.p

    def width(self) -> int:
        """Number of columns before the all-zero tail."""
        return len(self.diffs)

    def is_stable(self) -> bool:
        p = self.params.p
        return all(v <= p for v in self.diffs)

    def enabled_columns(self) -> list[int]:
        p = self.params.p
        return [i for i, v in enumerate(self.diffs) if v > p]

    def grain_count(self) -> int:
        """Total grains sum((i+1) * b_i); invariant under firing."""
        return sum((i + 1) * v for i, v in enumerate(self.diffs))

    def heights(self) -> HeightProfile:
        hs = []
        acc = 0
        for v in reversed(self.diffs):
            acc += v
            hs.append(acc)
        return HeightProfile(tuple(reversed(hs)))

    # -- dynamics ----------------------------------------------------

    def fire(self, i: int) -> "Configuration":
        """Apply the rule at column i.  Requires b_i > p."""
        if i < 0:
            raise IndexOutOfRange(f"column index must be >= 0, got {i}")
        p = self.params.p
        ds = self.diffs
        v = ds[i] if i < len(ds) else 0
        if v <= p:
            raise FiringNotEnabled(f"column {i} has b={v} <= p={p}")
        b = list(ds) + [0] * (i + p + 1 - len(ds))
        b[i] -= p + 1
        if i:
            b[i - 1] += p
        b[i + p] += 1
        return Configuration(tuple(b), self.params)

    # -- serialization -----------------------------------------------

    def to_json(self) -> str:
        return json.dumps({"p": self.params.p, "diffs": list(self.diffs)}, separators=(",", ":"))

    @classmethod
    def from_json(cls, payload: str) -> "Configuration":
        obj = json.loads(payload)
        return cls(tuple(obj["diffs"]), Params(obj["p"]))

    def to_text(self) -> str:
        return " ".join(str(v) for v in self.diffs)

    @classmethod
    def from_text(cls, text: str, params: Params) -> "Configuration":
        parts = text.split()
        return cls(tuple(int(v) for v in parts), params)


def stabilize(
    c: Configuration,
    strategy: Strategy = LEFTMOST,
    work_limit: int = DEFAULT_WORK_LIMIT,
) -> tuple[Configuration, int]:
    """Run the pile to its fixed point; returns (fixed point, total firings).

    Both results are strategy-independent (strong convergence); the
    strategy only selects the firing order actually executed.
    """
    if c.grain_count() > GRAIN_LIMIT:
        raise InvalidParameter("grain count exceeds limit 2**40")
    b = list(c.diffs)
    p = c.params.p
    if strategy == LEFTMOST:
        total = _engine.leftmost(b, p, work_limit)
    elif strategy == RIGHTMOST:
        total = _engine.rightmost(b, p, work_limit)
    elif isinstance(strategy, RandomStrategy):
        total = _engine.randomized(b, p, work_limit, strategy.seed)
    else:
        raise InvalidParameter(f"unknown strategy {strategy!r}")
    return Configuration._trusted(tuple(b), c.params), total


def fixed_point(
    grains: int, params: Params, work_limit: int = DEFAULT_WORK_LIMIT
) -> Configuration:
    """Fixed point of `grains` stacked on column 0."""
    if grains < 0:
        raise InvalidParameter(f"grain count must be >= 0, got {grains}")
    if grains > GRAIN_LIMIT:
        raise InvalidParameter(f"grain count {grains} exceeds limit 2**40")
    b, _, _ = _engine.pile_with_shots(grains, params.p, work_limit)
    return Configuration._trusted(tuple(b), params)
