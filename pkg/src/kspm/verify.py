"""Sweep-style verification suites behind `kspm verify` and the tests.

Each suite runs a family of checks over (p, N) ranges and reports a
CheckResult per cell: pass/fail, a human-readable detail, and a
serializable counterexample on failure.  Suites are deterministic
(random strategies derive their seeds from an explicit base seed) and
sequential; cells are independent, so callers may shard them if they
want parallelism.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import _engine, analysis, avalanche, dds
from .core import (
    Configuration,
    DEFAULT_WORK_LIMIT,
    Params,
    RIGHTMOST,
    fixed_point,
    stabilize,
)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    counterexample: Optional[dict] = None
    data: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}: {self.name} {self.detail}"


def check_confluence(
    p: int,
    n_max: int,
    seeds: int = 10,
    base_seed: int = 0,
    work_limit: int = DEFAULT_WORK_LIMIT,
) -> CheckResult:
    """Leftmost, rightmost, and seeded random runs must all agree."""
    name = f"confluence p={p}"
    for grains in range(1, n_max + 1):
        ref = [grains]
        ref_total = _engine.leftmost(ref, p, work_limit)
        alt = [grains]
        alt_total = _engine.rightmost(alt, p, work_limit)
        if alt != ref or alt_total != ref_total:
            return CheckResult(
                name,
                False,
                f"rightmost diverges at N={grains}",
                {"p": p, "N": grains, "strategy": "rightmost",
                 "expected": ref, "actual": alt,
                 "expected_total": ref_total, "actual_total": alt_total},
            )
        for s in range(seeds):
            rnd = [grains]
            rnd_total = _engine.randomized(rnd, p, work_limit, base_seed + s)
            if rnd != ref or rnd_total != ref_total:
                return CheckResult(
                    name,
                    False,
                    f"random seed {base_seed + s} diverges at N={grains}",
                    {"p": p, "N": grains, "strategy": "random", "seed": base_seed + s,
                     "expected": ref, "actual": rnd,
                     "expected_total": ref_total, "actual_total": rnd_total},
                )
    return CheckResult(name, True, f"N<=n_max={n_max}, {seeds} random seeds: identical")


def check_plateau(p: int, n_max: int, work_limit: int = DEFAULT_WORK_LIMIT) -> CheckResult:
    """No plateau longer than p+1 anywhere on any leftmost trajectory."""
    name = f"plateau p={p}"
    bound = p + 1
    worst = 1
    for grains in range(1, n_max + 1):
        longest = _engine.max_plateau_over_trajectory(grains, p, work_limit)
        if longest > worst:
            worst = longest
        if longest > bound:
            return CheckResult(
                name,
                False,
                f"plateau of length {longest} > {bound} on the run from N={grains}",
                {"p": p, "N": grains, "max_plateau": longest, "bound": bound},
            )
    return CheckResult(
        name, True, f"N<=n_max={n_max}: longest plateau {worst} <= {bound}",
        data={"worst": worst},
    )


def check_support(p: int, n_max: int, work_limit: int = DEFAULT_WORK_LIMIT) -> CheckResult:
    """Strict sqrt bounds on the fixed-point width for every N <= n_max."""
    name = f"support p={p}"
    params = Params(p)
    b: list[int] = []
    budget = work_limit
    for k in range(1, n_max + 1):
        if b:
            b[0] += 1
        else:
            b = [1]
        fired = _engine.leftmost_avalanche(b, p, budget)
        budget -= len(fired)
        report = analysis.support_bounds(k, p, len(b))
        if not report.holds:
            return CheckResult(
                name,
                False,
                f"width {report.width} outside ({report.lower:.3f}, {report.upper:.3f}) at N={k}",
                {"p": p, "N": k, "width": report.width,
                 "lower": report.lower, "upper": report.upper},
            )
    return CheckResult(name, True, f"N<=n_max={n_max}: all widths strictly inside bounds")


def check_spectrum(p_max: int, tolerance: float = 1e-9, dm_tolerance: float = 1e-7) -> CheckResult:
    """Distinct roots, modulus bound, and centered-matrix eigenvalues."""
    name = f"spectrum p<={p_max}"
    worst_margin = -1.0
    worst_dm = 0.0
    for p in range(2, p_max + 1):
        report = dds.spectrum(Params(p), tolerance)
        margin = report.max_modulus - report.modulus_bound()
        worst_margin = max(worst_margin, margin)
        worst_dm = max(worst_dm, report.dm_max_error)
        if not report.distinct:
            return CheckResult(
                name, False, f"roots not pairwise distinct at p={p}",
                {"p": p, "roots": [[z.real, z.imag] for z in report.roots]},
            )
        if margin > tolerance:
            return CheckResult(
                name, False,
                f"max modulus {report.max_modulus:.12f} exceeds (p-1)/p at p={p}",
                {"p": p, "max_modulus": report.max_modulus, "bound": report.modulus_bound()},
            )
        if report.dm_max_error > dm_tolerance:
            return CheckResult(
                name, False,
                f"centered-step eigenvalues off by {report.dm_max_error:.3e} at p={p}",
                {"p": p, "dm_max_error": report.dm_max_error},
            )
    return CheckResult(
        name, True,
        f"roots distinct, modulus within {tolerance:.0e} of bound, "
        f"eigenvalue error <= {worst_dm:.2e}",
    )


def check_waves(p: int, grains: int, work_limit: int = DEFAULT_WORK_LIMIT) -> CheckResult:
    """Matcher soundness and the subset relation on one fixed point."""
    name = f"waves p={p} N={grains}"
    params = Params(p)
    c = fixed_point(grains, params, work_limit)
    report = analysis.wave_report(c)
    i1, i2 = report.theorem1_index, report.theorem2_index
    if i1 is None or i2 is None:
        return CheckResult(name, False, "no matching suffix on a stable pile",
                           {"p": p, "N": grains, "diffs": list(c.diffs)})
    if i2 < i1:
        return CheckResult(name, False, f"tight index {i2} below loose index {i1}",
                           {"p": p, "N": grains, "theorem1_index": i1, "theorem2_index": i2})
    rebuilt = rebuild_suffix(report.decomposition, p)
    if tuple(c.diffs[i2:]) != rebuilt:
        return CheckResult(name, False, "decomposition does not regenerate the suffix",
                           {"p": p, "N": grains, "index": i2,
                            "decomposition": [list(x) for x in report.decomposition]})
    detail = (
        f"theorem1_index={i1} theorem2_index={i2} "
        f"decomposition={'+'.join(f'0^{z}W^{w}' for z, w in report.decomposition) or 'empty'} "
        f"nontrivial={str(report.nontrivial).lower()}"
    )
    return CheckResult(name, True, detail,
                       data={"theorem1_index": i1, "theorem2_index": i2,
                             "decomposition": report.decomposition, "width": c.width()})


def rebuild_suffix(decomposition, p: int) -> tuple[int, ...]:
    """Regenerate height differences from (zero-run, wave count) pairs."""
    wave = tuple(range(p, 0, -1))
    out: list[int] = []
    for z, w in decomposition:
        out.extend([0] * z)
        out.extend(wave * w)
    return tuple(out)


def check_linkage(p: int, grains_list, work_limit: int = DEFAULT_WORK_LIMIT) -> CheckResult:
    """From the first constant averaging state, the loose wave form holds."""
    name = f"linkage p={p}"
    params = Params(p)
    grains_list = list(grains_list)
    for grains in grains_list:
        traj = dds.avg_trajectory(grains, params, work_limit)
        idx = dds.first_constant_index(traj)
        if idx is None:
            return CheckResult(name, False, f"no constant averaging state for N={grains}",
                               {"p": p, "N": grains})
        c = fixed_point(grains, params, work_limit)
        if not analysis.matches_theorem1_at(c, idx):
            return CheckResult(
                name, False,
                f"suffix from first constant index {idx} not wavy for N={grains}",
                {"p": p, "N": grains, "first_constant_index": idx, "diffs": list(c.diffs)},
            )
    n_lo = min(grains_list)
    n_hi = max(grains_list)
    return CheckResult(name, True, f"{len(grains_list)} piles in [{n_lo}, {n_hi}] linked")


def check_density(p: int, n_max: int, work_limit: int = DEFAULT_WORK_LIMIT) -> CheckResult:
    """Avalanche density column against the previous pile's emergence index.

    For every k <= n_max: L'(p, k) <= emergence_index(pi(k-1)) + p + 1.
    Also records the running maximum L(p, N) at power-of-two checkpoints.
    """
    name = f"density p={p}"
    params = Params(p)
    b: list[int] = []
    l_global = 0
    budget = work_limit
    checkpoints: dict[int, int] = {}
    prev_emergence = 0  # empty pile matches everywhere
    for k in range(1, n_max + 1):
        if b:
            b[0] += 1
        else:
            b = [1]
        fired = _engine.leftmost_avalanche(b, p, budget)
        budget -= len(fired)
        lp = avalanche._lprime(fired)
        bound = prev_emergence + p + 1
        if lp > bound:
            return CheckResult(
                name, False,
                f"L'={lp} > emergence(pi({k - 1})) + p + 1 = {bound} at k={k}",
                {"p": p, "k": k, "l_prime": lp, "bound": bound,
                 "prev_emergence": prev_emergence, "fired": fired},
            )
        if lp > l_global:
            l_global = lp
        if k & (k - 1) == 0:
            checkpoints[k] = l_global
        cfg = Configuration._trusted(tuple(b), params)
        prev_emergence = analysis.emergence_index(cfg)
    checkpoints[n_max] = l_global
    return CheckResult(
        name, True,
        f"k<=n_max={n_max}: every avalanche dense within p+1 of the previous emergence; "
        f"L(p,{n_max})={l_global}",
        data={"l_global": l_global, "checkpoints": checkpoints},
    )


def emergence_sweep(p: int, grain_values, work_limit: int = DEFAULT_WORK_LIMIT):
    """Rows (N, p, emergence_index, first_constant_Y_index, width, L_global)
    for each requested N, from a single grain-by-grain scan.

    Shot counts are accumulated from the avalanche records, so the
    averaging trajectory at each checkpoint comes for free.
    """
    wanted = sorted(set(grain_values))
    params = Params(p)
    b: list[int] = []
    shots: list[int] = []
    l_global = 0
    budget = work_limit
    rows = []
    targets = iter(wanted)
    nxt = next(targets, None)
    for k in range(1, (wanted[-1] if wanted else 0) + 1):
        if b:
            b[0] += 1
        else:
            b = [1]
        fired = _engine.leftmost_avalanche(b, p, budget)
        budget -= len(fired)
        for col in fired:
            if col >= len(shots):
                shots.extend([0] * (col + 1 - len(shots)))
            shots[col] += 1
        lp = avalanche._lprime(fired)
        if lp > l_global:
            l_global = lp
        if k == nxt:
            pi = Configuration._trusted(tuple(b), params)
            sv = dds.ShotVector(tuple(shots), k, params)
            traj = dds._trajectory_of(pi, sv, params)
            rows.append(
                (
                    k,
                    p,
                    analysis.emergence_index(pi),
                    dds.first_constant_index(traj),
                    pi.width(),
                    l_global,
                )
            )
            nxt = next(targets, None)
    return rows


def check_recurrence(p: int, n_max: int, work_limit: int = DEFAULT_WORK_LIMIT) -> CheckResult:
    """Grain-by-grain pile equals the from-scratch fixed point for every k."""
    name = f"recurrence p={p}"
    params = Params(p)
    current = Configuration((), params)
    for k in range(1, n_max + 1):
        # rightmost on purpose: a different strategy than the scan engine
        stepped, _ = stabilize(avalanche.add_grain(current), RIGHTMOST, work_limit)
        scratch = fixed_point(k, params, work_limit)
        if stepped != scratch:
            return CheckResult(
                name, False, f"incremental and from-scratch piles differ at k={k}",
                {"p": p, "k": k, "incremental": list(stepped.diffs),
                 "scratch": list(scratch.diffs)},
            )
        current = stepped
    return CheckResult(name, True, f"k<=n_max={n_max}: incremental piles match from-scratch")
