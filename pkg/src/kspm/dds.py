"""Shot vectors and the derived integer dynamical systems.

The shot vector (a_i) counts how often each column fired on the way from
the single pile to its fixed point.  With the boundary convention
a_{-p} = N and a_i = 0 for -p < i < 0 (column 0 starts with all N units
of height difference), the fixed point and the shot vector are linked by

    b_n = a_{n-p} - (p+1) a_n + p a_{n+1}        for every n >= 0,

so  a_{n+1} = (-a_{n-p} + (p+1) a_n + b_n) / p  in exact integers: the
division is forced by a congruence, which also pins b_n down to one value
(or to {0, p} when the congruence is already satisfied).

Sliding windows of the shot vector evolve linearly.  X_n holds the p+1
counts a_{n-p} .. a_n; one step shifts the window and appends the exact
quotient above.  Changing basis and projecting out one component turns
this into the averaging system on Z^p,

    Y_{n+1} = shift up, append mean(Y_n) + b_n / p,

whose state Y_n is the vector of consecutive shot-vector differences.
All dynamics here stay in exact integer arithmetic; floating point
appears only in `spectrum`, which checks the eigenvalue claims behind the
contraction argument (roots of R, spectral radius of the mean-centered
step matrix).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _engine
from .core import Configuration, DEFAULT_WORK_LIMIT, GRAIN_LIMIT, Params
from .errors import (
    Inconsistent,
    IndexOutOfRange,
    InvalidParameter,
    NonIntegral,
    NumericalFailure,
)


@dataclass(frozen=True)
class ShotVector:
    """Per-column firing counts for the pile of `grains` on column 0."""

    counts: tuple[int, ...]
    grains: int
    params: Params

    def a(self, i: int) -> int:
        """Count at index i, honoring the boundary convention below 0."""
        if i >= 0:
            return self.counts[i] if i < len(self.counts) else 0
        if i == -self.params.p:
            return self.grains
        if i > -self.params.p:
            return 0
        raise IndexOutOfRange(f"index {i} below -p = {-self.params.p}")

    def height_diff(self, n: int) -> int:
        """b_n of the fixed point, reconstructed from the firing counts."""
        p = self.params.p
        return self.a(n - p) - (p + 1) * self.a(n) + p * self.a(n + 1)

    def fixed_point(self) -> Configuration:
        """Rebuild pi(N) from the counts alone (independent of simulation)."""
        width = len(self.counts) + self.params.p
        diffs = [self.height_diff(n) for n in range(width)]
        return Configuration(tuple(diffs), self.params)

    def x_vector(self, n: int) -> "XVector":
        p = self.params.p
        return XVector(tuple(self.a(n - p + j) for j in range(p + 1)))

    def avg_vector(self, n: int) -> "AvgVector":
        p = self.params.p
        return AvgVector(
            tuple(self.a(n - p + j + 1) - self.a(n - p + j) for j in range(p))
        )


@dataclass(frozen=True)
class XVector:
    """Window (a_{n-p}, ..., a_n) of the shot vector."""

    entries: tuple[int, ...]


@dataclass(frozen=True)
class AvgVector:
    """Consecutive shot-vector differences (may be negative)."""

    entries: tuple[int, ...]

    def is_constant(self) -> bool:
        return all(v == self.entries[0] for v in self.entries)

    def mean_numerator(self) -> int:
        """Sum of entries: the mean times p, kept exact."""
        return sum(self.entries)


@dataclass(frozen=True)
class SpectrumReport:
    """Numerical check of the contraction eigenvalues for one p."""

    p: int
    roots: tuple[complex, ...]
    max_modulus: float
    distinct: bool
    dm_eigenvalues: tuple[complex, ...]
    dm_max_error: float

    def modulus_bound(self) -> float:
        return (self.p - 1) / self.p


def _pile(
    grains: int, params: Params, work_limit: int = DEFAULT_WORK_LIMIT
) -> tuple[Configuration, ShotVector]:
    """Fixed point and shot vector from a single stabilization run."""
    if grains < 0:
        raise InvalidParameter(f"grain count must be >= 0, got {grains}")
    if grains > GRAIN_LIMIT:
        raise InvalidParameter(f"grain count {grains} exceeds limit 2**40")
    b, shots, _ = _engine.pile_with_shots(grains, params.p, work_limit)
    return (
        Configuration._trusted(tuple(b), params),
        ShotVector(tuple(shots), grains, params),
    )


def shot_vector(
    grains: int, params: Params, work_limit: int = DEFAULT_WORK_LIMIT
) -> ShotVector:
    """Firing counts accumulated while stabilizing the single pile."""
    return _pile(grains, params, work_limit)[1]


def reconstruct_b(a_nm_p: int, a_n: int, params: Params) -> set[int]:
    """Possible b_n values given the counts at n-p and n.

    The congruence -a_{n-p} + (p+1) a_n + b_n = 0 (mod p) pins b_n to a
    single value in 0..p, except when the residue is 0, where both 0 and
    p remain possible.
    """
    p = params.p
    r = (a_nm_p - (p + 1) * a_n) % p
    return {0, p} if r == 0 else {r}


def x_step(x: XVector, b_n: int, params: Params) -> XVector:
    """One move of the window system: shift left, append the new count."""
    p = params.p
    if len(x.entries) != p + 1:
        raise InvalidParameter(f"window must have p+1 = {p + 1} entries")
    if not 0 <= b_n <= p:
        raise InvalidParameter(f"b must be in 0..{p}, got {b_n}")
    num = -x.entries[0] + (p + 1) * x.entries[-1] + b_n
    if num % p:
        raise NonIntegral(f"({x.entries[0]}, {x.entries[-1]}, b={b_n}) leaves Z")
    return XVector(x.entries[1:] + (num // p,))


def avg_step(y: AvgVector, b_n: int, params: Params) -> AvgVector:
    """One move of the averaging system: shift up, append mean + b/p."""
    p = params.p
    if len(y.entries) != p:
        raise InvalidParameter(f"state must have p = {p} entries")
    if not 0 <= b_n <= p:
        raise InvalidParameter(f"b must be in 0..{p}, got {b_n}")
    num = sum(y.entries) + b_n
    if num % p:
        raise NonIntegral(f"sum {sum(y.entries)} with b={b_n} leaves Z")
    return AvgVector(y.entries[1:] + (num // p,))


def x_to_avg(x: XVector) -> AvgVector:
    """Basis change + projection: consecutive differences of the window."""
    e = x.entries
    return AvgVector(tuple(e[j + 1] - e[j] for j in range(len(e) - 1)))


def avg_trajectory(
    grains: int, params: Params, work_limit: int = DEFAULT_WORK_LIMIT
) -> list[AvgVector]:
    """Y_0, Y_1, ... driven by the fixed point's height differences.

    Y_0 = (-N, 0, ..., 0, a_0); each entry is cross-checked against the
    matching difference slice of the simulated shot vector, so a mismatch
    (Inconsistent) means a bug, not bad input.  The trajectory runs to
    width + p, by which point it is the constant zero vector.
    """
    if grains < 1:
        raise InvalidParameter(f"grain count must be >= 1, got {grains}")
    pi, sv = _pile(grains, params, work_limit)
    return _trajectory_of(pi, sv, params)


def _trajectory_of(pi: Configuration, sv: ShotVector, params: Params) -> list[AvgVector]:
    diffs = pi.diffs
    stop = len(diffs) + params.p
    y = sv.avg_vector(0)
    traj = [y]
    for n in range(stop):
        b_n = diffs[n] if n < len(diffs) else 0
        y = avg_step(y, b_n, params)
        if y != sv.avg_vector(n + 1):
            raise Inconsistent(f"averaging step and shot-vector slice differ at n={n + 1}")
        traj.append(y)
    return traj


def first_constant_index(traj) -> int | None:
    """Smallest n with Y_n constant; None if absent (an anomaly)."""
    for n, y in enumerate(traj):
        if y.is_constant():
            return n
    return None


def averaging_matrix(p: int) -> np.ndarray:
    """The linear part of the averaging step (shift + mean row)."""
    m = np.zeros((p, p))
    for i in range(p - 1):
        m[i, i + 1] = 1.0
    m[p - 1, :] = 1.0 / p
    return m


def mean_centering_matrix(p: int) -> np.ndarray:
    """Projection sending a vector to its differences from its mean."""
    return np.eye(p) - np.full((p, p), 1.0 / p)


def spectrum(params: Params, tolerance: float = 1e-9) -> SpectrumReport:
    """Roots of R(x) = x^{p-1} + ((p-1)/p) x^{p-2} + ... + 1/p, plus the
    eigenvalues of the mean-centered step matrix.

    The claims under test: the p-1 roots are pairwise distinct with
    modulus at most (p-1)/p, and the centered matrix's eigenvalues are
    exactly {0} plus those roots (hence a contraction).  `distinct` and
    `dm_max_error` report the outcome; callers assert against their own
    tolerances.  Roots come from the companion-matrix eigenproblem, which
    is robust at the degrees used here.
    """
    p = params.p
    if p == 1:
        return SpectrumReport(1, (), 0.0, True, (0.0 + 0.0j,), 0.0)
    coeffs = [(p - j) / p for j in range(p)]  # leading 1, then (p-1)/p ... 1/p
    try:
        roots = np.roots(coeffs)
        dm = mean_centering_matrix(p) @ averaging_matrix(p)
        dm_eig = np.linalg.eigvals(dm)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(str(exc)) from exc
    roots = tuple(sorted(map(complex, roots), key=lambda z: (z.real, z.imag)))
    if len(roots) != p - 1:
        raise NumericalFailure(f"expected {p - 1} roots, found {len(roots)}")
    max_modulus = max(abs(z) for z in roots)
    distinct = all(
        abs(roots[i] - roots[j]) > tolerance
        for i in range(len(roots))
        for j in range(i + 1, len(roots))
    )
    # match the multiset {0} + roots against the computed eigenvalues
    expected = [0j] + list(roots)
    eig = sorted(map(complex, dm_eig), key=lambda z: (z.real, z.imag))
    err = _multiset_distance(expected, eig)
    return SpectrumReport(p, roots, float(max_modulus), distinct, tuple(eig), err)


def _multiset_distance(expected: list[complex], got: list[complex]) -> float:
    """Greedy nearest matching; adequate for well-separated eigenvalues."""
    remaining = list(got)
    worst = 0.0
    for z in expected:
        best = min(range(len(remaining)), key=lambda i: abs(remaining[i] - z))
        worst = max(worst, abs(remaining[best] - z))
        remaining.pop(best)
    return worst
