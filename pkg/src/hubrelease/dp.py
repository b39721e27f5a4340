"""Finite-horizon stochastic dynamic program for the release decision.

Backward induction over states (step k, hub count n) with forced release
at the deadline.  This solver never looks at the threshold formula; it is
kept independent on purpose so the two can be checked against each other.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .arrival import ArrivalDistribution
from .stopping import RewardParams, Threshold

# An occupancy cap makes the state space finite.  It is only sound when the
# count has effectively no chance of reaching it, so configs are rejected
# unless the probability of exceeding the cap within the horizon stays
# below this bound.
CAP_TOLERANCE = 1e-9


def cap_violation_probability(
    dist: ArrivalDistribution, horizon: int, max_count: int
) -> float:
    """P(count exceeds max_count within `horizon` steps, starting from one vehicle).

    The un-released count is nondecreasing, so this is the chance that one
    initial vehicle plus `horizon` i.i.d. arrival draws ever pass the cap.
    Computed exactly by repeated convolution with an absorbing overflow bin.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    if max_count < 1:
        raise ValueError(f"max_count must be >= 1, got {max_count}")
    pmf = np.asarray(dist.probabilities)
    if dist.support_max == 0:
        return 0.0
    probs = np.zeros(max_count + 1)
    probs[1] = 1.0
    absorbed = 0.0
    for _ in range(horizon):
        full = np.convolve(probs, pmf)
        absorbed += float(full[max_count + 1 :].sum())
        probs = full[: max_count + 1]
    return absorbed


def suggest_max_count(
    dist: ArrivalDistribution, horizon: int, tol: float = CAP_TOLERANCE
) -> int:
    """Smallest occupancy cap whose violation probability is below tol."""
    if not 0 < tol < 1:
        raise ValueError(f"tol must be in (0, 1), got {tol!r}")
    if dist.support_max == 0:
        return 1
    # Generous upper bound: mean growth plus a 12-sigma cushion is far past
    # any 1e-9 quantile of a sum of bounded i.i.d. counts.
    spread = 12.0 * np.sqrt(max(horizon * dist.variance, 1.0))
    bound = int(np.ceil(1 + horizon * dist.mean + spread)) + dist.support_max + 2
    pmf = np.asarray(dist.probabilities)
    probs = np.zeros(bound + 1)
    probs[1] = 1.0
    escaped = 0.0
    for _ in range(horizon):
        full = np.convolve(probs, pmf)
        escaped += float(full[bound + 1 :].sum())
        probs = full[: bound + 1]
    if escaped >= tol:
        raise ValueError("search cushion too small for the requested tolerance")
    tail = np.cumsum(probs[::-1])[::-1]  # tail[c] = P(final count >= c)
    caps = np.nonzero(tail + escaped < tol)[0]
    if caps.size == 0:
        raise ValueError("no cap within the search bound satisfies the tolerance")
    return max(int(caps[0]) - 1, 1)


@dataclass(frozen=True)
class DpConfig:
    """Problem instance for the solver.

    The construction check guarantees the occupancy cap is effectively
    unreachable, so clamping the transition at max_count cannot distort
    the computed actions.
    """

    horizon: int
    max_count: int
    dist: ArrivalDistribution
    params: RewardParams

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if self.max_count < 1:
            raise ValueError(f"max_count must be >= 1, got {self.max_count}")
        violation = cap_violation_probability(self.dist, self.horizon, self.max_count)
        if violation >= CAP_TOLERANCE:
            raise ValueError(
                f"max_count={self.max_count} can be exceeded with probability "
                f"{violation:.3g} >= {CAP_TOLERANCE} within {self.horizon} steps; "
                f"use suggest_max_count()"
            )


@dataclass(frozen=True, eq=False)
class DpSolution:
    """Value and action tables indexed [k, n] for k in 0..horizon, n in 1..max_count.

    Column n = 0 is padding (values NaN, actions False); the hub is never
    empty when a decision is made.  actions[k, n] is True when releasing
    at (k, n) is optimal, with ties resolved toward release.
    """

    config: DpConfig
    values: np.ndarray
    actions: np.ndarray


def solve(config: DpConfig) -> DpSolution:
    """Backward induction; release is forced at k = horizon."""
    horizon, cap = config.horizon, config.max_count
    params = config.params
    probs = np.asarray(config.dist.probabilities)
    xs = np.arange(probs.size)
    n = np.arange(1, cap + 1)
    benefit = params.benefit * (n - 1) / n

    values = np.full((horizon + 1, cap + 1), np.nan)
    actions = np.zeros((horizon + 1, cap + 1), dtype=bool)
    values[horizon, 1:] = benefit - params.step_cost * horizon
    actions[horizon, 1:] = True

    # next_idx[i, j] = state reached from count n[i] after arrival xs[j].
    next_idx = np.minimum(n[:, None] + xs[None, :], cap)
    for k in range(horizon - 1, -1, -1):
        continuation = values[k + 1][next_idx] @ probs
        release_value = benefit - params.step_cost * k
        release = release_value >= continuation
        actions[k, 1:] = release
        values[k, 1:] = np.where(release, release_value, continuation)
    return DpSolution(config, values, actions)


def compare_with_threshold(
    solution: DpSolution, threshold: Threshold, up_to_step: int | None = None
) -> list[tuple[int, int]]:
    """Mismatched (k, n) states between the solver and the threshold rule.

    The threshold rule releases iff n >= n_star (never, when n_star is
    None).  Steps k < up_to_step are compared (default: every step before
    the deadline, where both force release).  Empty result means the two
    independently derived policies coincide.
    """
    config = solution.config
    if threshold.distribution != config.dist:
        raise ValueError("threshold was computed for a different arrival distribution")
    if threshold.ratio != config.params.ratio:
        raise ValueError(
            f"threshold ratio {threshold.ratio!r} does not match "
            f"solver params ratio {config.params.ratio!r}"
        )
    limit = config.horizon if up_to_step is None else min(up_to_step, config.horizon)
    n = np.arange(1, config.max_count + 1)
    if threshold.never_release:
        rule = np.zeros(n.size, dtype=bool)
    else:
        rule = n >= threshold.n_star
    diff = solution.actions[:limit, 1:] != rule[None, :]
    return [(int(k), int(i) + 1) for k, i in np.argwhere(diff)]


def write_action_table(solution: DpSolution, path: str) -> None:
    """Dump the action table as CSV rows (k, n, action) for inspection."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "n", "action"])
        for k in range(solution.config.horizon + 1):
            for n in range(1, solution.config.max_count + 1):
                writer.writerow([k, n, "release" if solution.actions[k, n] else "wait"])
