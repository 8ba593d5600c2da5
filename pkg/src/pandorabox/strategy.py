"""Execution and evaluation of threshold strategies.

A threshold strategy repeatedly opens the feasible box with the largest
threshold while the best observed reward is strictly below it (it stops at
equality).  The choice of the next box never depends on observed rewards, so
every strategy has a fixed exploration order; only the stopping point is
random.  That reduction makes exact evaluation a one-dimensional sweep and
simulation a cheap walk down a precomputed order.

Sampling is counter-based: each draw hashes (seed, trial, step, box) with
SHA-256 and inverts the exact CDF at the resulting 64-bit point, so runs are
reproducible bit-for-bit across platforms.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .core import (
    DiscreteDistribution,
    ExecutionState,
    Instance,
    ValidationError,
    feasible_next,
    max_distribution,
    set_feasibility_violation,
)

ZERO = Fraction(0)
_U64 = 1 << 64


@dataclass(frozen=True)
class ThresholdPolicy:
    """Thresholds for every box plus a total tie-break order on ids."""

    thresholds: Mapping[str, Fraction]
    tiebreak: tuple[str, ...] = ()

    def rank(self) -> dict[str, int]:
        order = self.tiebreak if self.tiebreak else tuple(sorted(self.thresholds))
        return {box_id: k for k, box_id in enumerate(order)}

    @staticmethod
    def for_instance(instance: Instance, thresholds: Mapping[str, Fraction],
                     tiebreak: Sequence[str] = ()) -> "ThresholdPolicy":
        missing = [b.id for b in instance.boxes if b.id not in thresholds]
        if missing:
            raise ValidationError(f"policy is missing thresholds for boxes {missing}")
        return ThresholdPolicy(dict(thresholds), tuple(tiebreak))


@dataclass(frozen=True)
class Trajectory:
    steps: tuple[tuple[str, Fraction], ...]
    final: ExecutionState

    @property
    def net_revenue(self) -> Fraction:
        return self.final.best - self.final.spent


class RewardSampler:
    """Deterministic per-(seed, trial) reward stream."""

    def __init__(self, seed: int, trial: int = 0):
        self.seed = seed
        self.trial = trial

    def uniform_u64(self, step: int, box_id: str) -> int:
        payload = f"{self.seed}|{self.trial}|{step}|{box_id}".encode()
        return int.from_bytes(hashlib.sha256(payload).digest()[:8], "big")

    def draw(self, dist: DiscreteDistribution, step: int, box_id: str) -> Fraction:
        u = self.uniform_u64(step, box_id)
        cum = ZERO
        for v, p in dist.atoms:
            cum += p
            # u/2^64 < cum  <=>  u * den < num << 64
            if u * cum.denominator < cum.numerator << 64:
                return v
        return dist.atoms[-1][0]  # pragma: no cover


def fixed_opening_order(instance: Instance, policy: ThresholdPolicy) -> list[str]:
    """The realization-independent order in which the strategy visits boxes:
    greedy argmax threshold over currently openable boxes, until nothing is
    openable.  Stopping is decided separately against this order."""
    rank = policy.rank()
    opened: set[str] = set()
    order: list[str] = []
    while True:
        candidates = feasible_next(instance, opened)
        if not candidates:
            return order
        best = min(candidates, key=lambda b: (-policy.thresholds[b], rank.get(b, 0), b))
        order.append(best)
        opened.add(best)


def run_threshold(instance: Instance, policy: ThresholdPolicy, rng_seed: int,
                  trial: int = 0) -> Trajectory:
    """Execute the strategy once with lazily sampled rewards."""
    sampler = RewardSampler(rng_seed, trial)
    order = fixed_opening_order(instance, policy)
    best = ZERO
    spent = ZERO
    steps: list[tuple[str, Fraction]] = []
    opened: list[str] = []
    for step, box_id in enumerate(order):
        if best >= policy.thresholds[box_id]:
            break
        box = instance.box_map[box_id]
        reward = sampler.draw(box.reward, step, box_id)
        spent += box.cost
        if reward > best:
            best = reward
        steps.append((box_id, reward))
        opened.append(box_id)
    return Trajectory(
        steps=tuple(steps),
        final=ExecutionState(opened=frozenset(opened), best=best, spent=spent),
    )


def evaluate_threshold_exact(instance: Instance, policy: ThresholdPolicy) -> Fraction:
    """Exact expected net revenue of the strategy.

    Sweeps the fixed order forward, carrying the exact distribution of the
    best reward among still-running realizations; mass stops as soon as its
    best reaches the next threshold.
    """
    order = fixed_opening_order(instance, policy)
    running: dict[Fraction, Fraction] = {ZERO: Fraction(1)}
    revenue = ZERO
    for box_id in order:
        z = policy.thresholds[box_id]
        box = instance.box_map[box_id]
        surviving: dict[Fraction, Fraction] = {}
        for y, mass in running.items():
            if y >= z:
                revenue += mass * y
            else:
                surviving[y] = surviving.get(y, ZERO) + mass
        if not surviving:
            return revenue
        nxt: dict[Fraction, Fraction] = {}
        for y, mass in surviving.items():
            revenue -= mass * box.cost
            for v, p in box.reward.atoms:
                top = v if v > y else y
                nxt[top] = nxt.get(top, ZERO) + mass * p
        running = nxt
    for y, mass in running.items():
        revenue += mass * y
    return revenue


def evaluate_set(instance: Instance, ids: Union[Sequence[str], frozenset, set]) -> Fraction:
    """E[max over the set] minus its total cost; the set must be feasible."""
    violation = set_feasibility_violation(instance, ids)
    if violation is not None:
        raise ValidationError(violation)
    chosen = sorted(set(ids))
    if not chosen:
        return ZERO
    dist = max_distribution([instance.box_map[i].reward for i in chosen])
    cost = sum((instance.box_map[i].cost for i in chosen), ZERO)
    return dist.expectation() - cost


@dataclass(frozen=True)
class SimulationSummary:
    mean: Fraction
    stddev: float
    trials: int
    seed: int


def simulate(instance: Instance, policy: ThresholdPolicy, trials: int, rng_seed: int) -> SimulationSummary:
    """Monte-Carlo estimate of the strategy's net revenue.

    Trial t draws from the (seed, t) stream, so results are reproducible and
    independent of any batching.  The mean is exact over the sampled
    trajectories (a rational); the sample stddev is reported as a float.
    """
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    order = fixed_opening_order(instance, policy)
    boxes = [instance.box_map[b] for b in order]
    thresholds = [policy.thresholds[b] for b in order]
    total = ZERO
    total_sq = ZERO
    for t in range(trials):
        sampler = RewardSampler(rng_seed, t)
        best = ZERO
        spent = ZERO
        for step, box in enumerate(boxes):
            if best >= thresholds[step]:
                break
            spent += box.cost
            reward = sampler.draw(box.reward, step, box.id)
            if reward > best:
                best = reward
        net = best - spent
        total += net
        total_sq += net * net
    mean = total / trials
    if trials > 1:
        variance = (total_sq - trials * mean * mean) / (trials - 1)
        stddev = math.sqrt(float(variance)) if variance > 0 else 0.0
    else:
        stddev = 0.0
    return SimulationSummary(mean=mean, stddev=stddev, trials=trials, seed=rng_seed)
