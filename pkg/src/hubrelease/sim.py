"""Hour-long hub simulation and Monte-Carlo policy comparison.

One sample simulates a fixed number of discrete steps (default 720 steps
of 5 s, one hour).  Vehicles already waiting at step 0 are drawn from a
zero-truncated Poisson; each later step brings a truncated-Poisson batch.
The policy inspects the hub after arrivals land; releasing empties the
hub into one platoon and a fresh episode starts at the next step.  Any
vehicles still waiting at the final step are force-released.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .arrival import (
    ArrivalDistribution,
    InitialCountDistribution,
    poisson_truncated,
    substream,
    zero_truncated_poisson,
)
from .policies import (
    NonCausalPolicy,
    PeriodicPolicy,
    PolicyKind,
    SpontaneousPolicy,
    ThresholdPolicy,
    decide_non_causal,
    decide_periodic,
    decide_spontaneous,
    decide_threshold,
)
from .stopping import RewardParams, compute_threshold, release_reward

Z_95 = 1.96  # normal-approximation 95% interval


@dataclass(frozen=True)
class SimConfig:
    """One Monte-Carlo cell: arrival rate, reward parameters, policy."""

    lam: float
    params: RewardParams
    policy: PolicyKind
    horizon_steps: int = 720
    step_seconds: float = 5.0
    samples: int = 1000
    master_seed: int = 0
    # Rate for the initial-count draw; defaults to the per-step rate lam.
    initial_lam: float | None = None
    include_forced_in_length: bool = True
    # Stream-derivation slot so sweep cells stay order-independent.
    cell_index: int = 0

    def __post_init__(self) -> None:
        if self.lam < 0:
            raise ValueError(f"lam must be nonnegative, got {self.lam!r}")
        if self.initial_lam is not None and self.initial_lam < 0:
            raise ValueError(f"initial_lam must be nonnegative, got {self.initial_lam!r}")
        if self.horizon_steps < 1:
            raise ValueError(f"horizon_steps must be >= 1, got {self.horizon_steps}")
        if self.step_seconds <= 0:
            raise ValueError(f"step_seconds must be positive, got {self.step_seconds!r}")
        if self.samples < 1:
            raise ValueError(f"samples must be >= 1, got {self.samples}")
        if self.master_seed < 0 or self.cell_index < 0:
            raise ValueError("master_seed and cell_index must be nonnegative")


@dataclass(frozen=True, slots=True)
class VehicleRecord:
    arrival_step: int
    release_step: int
    is_lead: bool


@dataclass(frozen=True, slots=True)
class PlatoonRecord:
    release_step: int
    member_arrival_steps: tuple[int, ...]
    episode_start: int
    # True when the horizon-end cleanup released vehicles the policy
    # would have kept waiting.
    forced: bool

    @property
    def size(self) -> int:
        return len(self.member_arrival_steps)


@dataclass(frozen=True)
class HourResult:
    platoons: tuple[PlatoonRecord, ...]
    vehicles: tuple[VehicleRecord, ...]
    # arrivals[0] is the initial count, arrivals[k] the batch landing at step k.
    arrivals: tuple[int, ...]


@dataclass(frozen=True)
class MetricsSummary:
    """Vehicle-weighted aggregates over all samples of one cell.

    Point estimates pool every vehicle (or platoon) across samples;
    ci_* fields are 95% half-widths of the per-sample means under the
    normal approximation.
    """

    mean_utility: float
    ci_utility: float
    mean_platoon_len: float
    ci_platoon_len: float
    mean_wait_steps: float
    ci_wait_steps: float
    # Alternative accounting: the hour's total episode-level release reward
    # normalized by the number of vehicles served.
    mean_episode_utility: float
    ci_episode_utility: float
    samples: int
    vehicles: int
    platoons: int


@dataclass(frozen=True)
class SweepRow:
    lam: float
    policy: str
    n_star: int | None
    metrics: MetricsSummary


@lru_cache(maxsize=None)
def _arrival_dist(lam: float) -> ArrivalDistribution:
    return poisson_truncated(lam)


@lru_cache(maxsize=None)
def _initial_dist(rate: float) -> InitialCountDistribution:
    if rate == 0.0:
        return InitialCountDistribution.degenerate()
    return zero_truncated_poisson(rate)


def _non_causal_fire_steps(
    arrivals: Sequence[int], params: RewardParams
) -> frozenset[int]:
    """Greedy chain of per-episode optimal release steps over one hour."""
    horizon = len(arrivals)
    fires: set[int] = set()
    start = 0
    while start < horizon:
        counts = list(itertools.accumulate(arrivals[start:]))
        if counts[-1] == 0:
            break
        release = decide_non_causal(start, counts, params)
        fires.add(release)
        start = release + 1
    return frozenset(fires)


def run_episode_hour(config: SimConfig, sample_index: int) -> HourResult:
    """Simulate one sampled hour under the configured policy.

    The stream is keyed by (master_seed, cell_index, sample_index): the
    initial count is drawn first, then one batch per step 1..horizon-1.
    """
    if sample_index < 0:
        raise ValueError(f"sample_index must be nonnegative, got {sample_index}")
    rng = substream(config.master_seed, config.cell_index, sample_index)
    horizon = config.horizon_steps
    init_rate = config.lam if config.initial_lam is None else config.initial_lam
    initial = _initial_dist(init_rate).sample(rng)
    arrivals = [initial]
    if horizon > 1:
        arrivals.extend(_arrival_dist(config.lam).sample_many(rng, horizon - 1).tolist())

    policy = config.policy
    fire_plan: frozenset[int] = frozenset()
    mode = 0
    n_star: int | None = None
    period = 1
    if isinstance(policy, ThresholdPolicy):
        n_star = policy.n_star
    elif isinstance(policy, PeriodicPolicy):
        mode, period = 1, policy.period_steps
    elif isinstance(policy, SpontaneousPolicy):
        mode = 2
    elif isinstance(policy, NonCausalPolicy):
        mode = 3
        fire_plan = _non_causal_fire_steps(arrivals, config.params)
    else:
        raise TypeError(f"unknown policy {policy!r}")

    pending: list[int] = []
    episode_start = 0
    platoons: list[PlatoonRecord] = []
    vehicles: list[VehicleRecord] = []
    for k in range(horizon):
        x = arrivals[k]
        if x:
            pending.extend([k] * x)
        if mode == 0:
            fire = decide_threshold(len(pending), n_star)
        elif mode == 1:
            fire = decide_periodic(k, period)
        elif mode == 2:
            fire = decide_spontaneous()
        else:
            fire = k in fire_plan
        last = k == horizon - 1
        if fire or last:
            if pending:
                members = tuple(pending)
                platoons.append(
                    PlatoonRecord(k, members, episode_start, forced=last and not fire)
                )
                vehicles.append(VehicleRecord(members[0], k, True))
                for a in members[1:]:
                    vehicles.append(VehicleRecord(a, k, False))
                pending.clear()
            if fire:
                episode_start = k + 1
    return HourResult(tuple(platoons), tuple(vehicles), tuple(arrivals))


def per_vehicle_utility(vehicle: VehicleRecord, params: RewardParams) -> float:
    """Follower benefit (leads get none) minus the vehicle's own waiting cost."""
    benefit = 0.0 if vehicle.is_lead else params.benefit
    return benefit - params.step_cost * (vehicle.release_step - vehicle.arrival_step)


def platoon_episode_reward(platoon: PlatoonRecord, params: RewardParams) -> float:
    """Episode-level reward of a release, waiting charged from episode start."""
    return release_reward(
        platoon.size, platoon.release_step - platoon.episode_start, params
    )


def _half_width(per_sample: np.ndarray) -> float:
    values = per_sample[~np.isnan(per_sample)]
    if values.size < 2:
        return 0.0
    return float(Z_95 * values.std(ddof=1) / math.sqrt(values.size))


def monte_carlo(config: SimConfig) -> MetricsSummary:
    """Run all samples of one cell and aggregate."""
    n_samples = config.samples
    sample_utility = np.empty(n_samples)
    sample_wait = np.empty(n_samples)
    sample_length = np.empty(n_samples)
    sample_episode = np.empty(n_samples)
    utility_sum = 0.0
    wait_sum = 0.0
    episode_utility_sum = 0.0
    length_sum = 0.0
    vehicles_total = 0
    platoons_total = 0
    length_count = 0
    for i in range(n_samples):
        result = run_episode_hour(config, i)
        utilities = [per_vehicle_utility(v, config.params) for v in result.vehicles]
        waits = [v.release_step - v.arrival_step for v in result.vehicles]
        lengths = [
            p.size
            for p in result.platoons
            if config.include_forced_in_length or not p.forced
        ]
        sample_utility[i] = sum(utilities) / len(utilities)
        sample_wait[i] = sum(waits) / len(waits)
        sample_length[i] = sum(lengths) / len(lengths) if lengths else np.nan
        utility_sum += sum(utilities)
        wait_sum += sum(waits)
        length_sum += sum(lengths)
        vehicles_total += len(result.vehicles)
        platoons_total += len(result.platoons)
        length_count += len(lengths)
        episode_rewards = sum(
            platoon_episode_reward(p, config.params) for p in result.platoons
        )
        sample_episode[i] = episode_rewards / len(result.vehicles)
        episode_utility_sum += episode_rewards
    return MetricsSummary(
        mean_utility=utility_sum / vehicles_total,
        ci_utility=_half_width(sample_utility),
        mean_platoon_len=length_sum / length_count if length_count else float("nan"),
        ci_platoon_len=_half_width(sample_length),
        mean_wait_steps=wait_sum / vehicles_total,
        ci_wait_steps=_half_width(sample_wait),
        mean_episode_utility=episode_utility_sum / vehicles_total,
        ci_episode_utility=_half_width(sample_episode),
        samples=n_samples,
        vehicles=vehicles_total,
        platoons=platoons_total,
    )


def _policy_for(name: str, n_star: int | None, period_steps: int) -> PolicyKind:
    if name == "threshold":
        return ThresholdPolicy(n_star)
    if name == "periodic":
        return PeriodicPolicy(period_steps)
    if name == "spontaneous":
        return SpontaneousPolicy()
    if name == "non_causal":
        return NonCausalPolicy()
    raise ValueError(f"unknown policy name {name!r}")


def sweep(
    lambda_grid: Sequence[float],
    policy_names: Sequence[str],
    *,
    params: RewardParams,
    samples: int = 1000,
    horizon_steps: int = 720,
    master_seed: int = 0,
    step_seconds: float = 5.0,
    initial_lam: float | None = None,
    include_forced_in_length: bool = True,
    period_steps: int = 60,
) -> list[SweepRow]:
    """Cross product of rates and policies.

    Every row carries the optimal threshold n_star for its rate.  Cells at
    the same rate share arrival realizations (streams are keyed by the
    rate's grid index), which sharpens policy comparisons.
    """
    if not lambda_grid:
        raise ValueError("lambda_grid must be non-empty")
    if not policy_names:
        raise ValueError("policy_names must be non-empty")
    rows: list[SweepRow] = []
    for cell_index, lam in enumerate(lambda_grid):
        threshold = compute_threshold(_arrival_dist(lam), params.ratio)
        for name in policy_names:
            config = SimConfig(
                lam=lam,
                params=params,
                policy=_policy_for(name, threshold.n_star, period_steps),
                horizon_steps=horizon_steps,
                step_seconds=step_seconds,
                samples=samples,
                master_seed=master_seed,
                initial_lam=initial_lam,
                include_forced_in_length=include_forced_in_length,
                cell_index=cell_index,
            )
            rows.append(SweepRow(lam, name, threshold.n_star, monte_carlo(config)))
    return rows
