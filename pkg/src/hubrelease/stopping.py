"""Release reward, the release condition, and the optimal occupancy threshold.

A coordinator watches vehicles accumulate at a hub and picks the step at
which to release them as one platoon.  Releasing n vehicles after waiting
k steps is worth

    benefit * (n - 1) / n  -  step_cost * k

per vehicle: the lead vehicle gains nothing, each follower gains the full
platooning benefit, and every step of delay costs ``step_cost``.  Under
i.i.d. arrivals the expected gain from waiting one more step, relative to
the benefit, is

    g(n) = sum_x  x * P(x) / (n^2 + n*x)

which strictly decreases in n, so the stop-or-wait comparison reduces to
an occupancy threshold: release as soon as g(n) has fallen to or below
the cost-benefit ratio.
"""
from __future__ import annotations

from dataclasses import dataclass

from .arrival import ArrivalDistribution


@dataclass(frozen=True)
class RewardParams:
    """Per-follower benefit (> 0) and per-step waiting cost (>= 0)."""

    benefit: float
    step_cost: float

    def __post_init__(self) -> None:
        if not self.benefit > 0:
            raise ValueError(f"benefit must be positive, got {self.benefit!r}")
        if self.step_cost < 0:
            raise ValueError(f"step_cost must be nonnegative, got {self.step_cost!r}")

    @property
    def ratio(self) -> float:
        """Cost-benefit ratio step_cost / benefit."""
        return self.step_cost / self.benefit


@dataclass(frozen=True)
class Threshold:
    """Result of a threshold computation for one (distribution, ratio) pair.

    ``n_star`` is the smallest occupancy at which releasing is at least as
    good as waiting; ``None`` means waiting is always preferable before the
    deadline (possible only at ratio 0 with a nonzero arrival rate).
    """

    n_star: int | None
    ratio: float
    distribution: ArrivalDistribution

    def __post_init__(self) -> None:
        if self.n_star is not None and self.n_star < 1:
            raise ValueError(f"n_star must be >= 1, got {self.n_star!r}")

    @property
    def never_release(self) -> bool:
        return self.n_star is None


def release_reward(n: int, k: int, params: RewardParams) -> float:
    """Per-vehicle value of releasing n vehicles at step k of an episode."""
    if n < 1:
        raise ValueError(f"cannot release an empty platoon (n={n})")
    return params.benefit * (n - 1) / n - params.step_cost * k


def _waiting_gain(n: int, dist: ArrivalDistribution) -> float:
    # sum_x x*P(x)/(n^2 + n*x); evaluated from the largest x down so the
    # smallest terms accumulate first.  The x = 0 term is zero by definition.
    probs = dist.probabilities
    total = 0.0
    for x in range(dist.support_max, 0, -1):
        total += x * probs[x] / (n * n + n * x)
    return total


def release_condition(n: int, dist: ArrivalDistribution, ratio: float) -> bool:
    """True when releasing at occupancy n beats waiting one more step.

    Ties release: the comparison is an exact >= with no tolerance band.
    """
    if n < 1:
        raise ValueError(f"occupancy must be >= 1, got {n}")
    if ratio < 0:
        raise ValueError(f"ratio must be nonnegative, got {ratio!r}")
    return ratio >= _waiting_gain(n, dist)


def compute_threshold(dist: ArrivalDistribution, ratio: float) -> Threshold:
    """Smallest n >= 1 satisfying the release condition.

    Terminates for ratio > 0 because g(n) <= mean / n^2; at ratio 0 the
    condition can only ever hold when the arrival mean is 0, so a positive
    mean yields the never-release result instead of an infinite scan.
    """
    if ratio < 0:
        raise ValueError(f"ratio must be nonnegative, got {ratio!r}")
    if ratio == 0.0 and dist.mean > 0.0:
        return Threshold(None, ratio, dist)
    n = 1
    while not release_condition(n, dist, ratio):
        n += 1
    return Threshold(n, ratio, dist)


def one_step_lookahead(
    n: int, k: int, dist: ArrivalDistribution, params: RewardParams
) -> bool:
    """True when releasing now is at least as good as one forced extra step.

    Evaluates the definition directly, as the expected next-step reward
    over the arrival pmf; it must agree with ``release_condition`` for all
    inputs even though the two share no code path.
    """
    now = release_reward(n, k, params)
    later = 0.0
    probs = dist.probabilities
    for x in range(dist.support_max, -1, -1):
        later += probs[x] * release_reward(n + x, k + 1, params)
    return now >= later
