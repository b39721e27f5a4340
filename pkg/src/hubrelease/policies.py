"""Release policies evaluated by the hour simulator.

Three causal rules (occupancy threshold, fixed period, release-on-sight)
plus a non-causal benchmark that sees the whole future arrival trajectory
of an episode and picks the reward-maximizing release step.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from .stopping import RewardParams, release_reward


@dataclass(frozen=True)
class ThresholdPolicy:
    """Release as soon as the hub count reaches n_star (None: never early)."""

    n_star: int | None

    def __post_init__(self) -> None:
        if self.n_star is not None and self.n_star < 1:
            raise ValueError(f"n_star must be >= 1, got {self.n_star!r}")


@dataclass(frozen=True)
class PeriodicPolicy:
    """Release at the last step of every fixed-length interval."""

    period_steps: int

    def __post_init__(self) -> None:
        if self.period_steps < 1:
            raise ValueError(f"period_steps must be >= 1, got {self.period_steps!r}")


@dataclass(frozen=True)
class SpontaneousPolicy:
    """Release at every step: vehicles depart the moment they arrive."""


@dataclass(frozen=True)
class NonCausalPolicy:
    """Clairvoyant per-episode optimum; an upper bound for causal rules."""


PolicyKind = Union[ThresholdPolicy, PeriodicPolicy, SpontaneousPolicy, NonCausalPolicy]

POLICY_NAMES = ("threshold", "periodic", "spontaneous", "non_causal")


def policy_name(policy: PolicyKind) -> str:
    if isinstance(policy, ThresholdPolicy):
        return "threshold"
    if isinstance(policy, PeriodicPolicy):
        return "periodic"
    if isinstance(policy, SpontaneousPolicy):
        return "spontaneous"
    if isinstance(policy, NonCausalPolicy):
        return "non_causal"
    raise TypeError(f"unknown policy {policy!r}")


def decide_threshold(count: int, n_star: int | None) -> bool:
    """Release iff the hub count has reached the threshold."""
    if count < 0:
        raise ValueError(f"count must be nonnegative, got {count}")
    if n_star is None:
        return False
    return count >= n_star


def decide_periodic(step: int, period_steps: int) -> bool:
    """Release at steps period-1, 2*period-1, ... so each interval keeps
    every vehicle that arrived within it, including same-step arrivals."""
    if step < 0:
        raise ValueError(f"step must be nonnegative, got {step}")
    if period_steps < 1:
        raise ValueError(f"period_steps must be >= 1, got {period_steps}")
    return (step + 1) % period_steps == 0


def decide_spontaneous() -> bool:
    """Release unconditionally."""
    return True


def decide_non_causal(
    episode_start: int, counts: Sequence[int], params: RewardParams
) -> int:
    """Reward-maximizing release step given the episode's full trajectory.

    ``counts[i]`` is the hub count at absolute step episode_start + i; the
    waiting cost is charged relative to the episode start.  Ties go to the
    earliest step.  A trajectory that stays empty forces a no-op release
    at its last step.
    """
    if episode_start < 0:
        raise ValueError(f"episode_start must be nonnegative, got {episode_start}")
    if not counts:
        raise ValueError("counts must cover at least one step")
    best_i: int | None = None
    best_reward = 0.0
    for i, n in enumerate(counts):
        if n < 1:
            continue
        reward = release_reward(n, i, params)
        if best_i is None or reward > best_reward:
            best_i = i
            best_reward = reward
    if best_i is None:
        return episode_start + len(counts) - 1
    return episode_start + best_i
