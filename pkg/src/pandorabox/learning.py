"""Sample-based solving: learn rounded empirical reward distributions, solve
the empirical instance, and measure the learned policy's true value.

Rewards and costs must lie in [0, 1].  Sampled rewards are rounded down to a
grid of step ``grid_step`` (default: the accuracy target), tallied into
exact empirical distributions (counts over the sample size), and the
empirical instance is solved like any other.  Costs are not rounded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .core import (
    BoxSpec,
    DiscreteDistribution,
    Instance,
    ValidationError,
)
from .strategy import ThresholdPolicy, evaluate_threshold_exact
from .tree_solver import solve_tree

ZERO = Fraction(0)
ONE = Fraction(1)

_SEED_MASK = (1 << 63) - 1


def sample_bound(n: int, epsilon: Fraction, delta: Fraction, mode: str = "tree",
                 constant: float = 1.0) -> int:
    """Samples per box sufficient for an additive-epsilon policy with
    probability 1 - delta (natural logs; the leading constant is a knob).

    general constraints: constant * n^3/eps^3 * log(n/(eps*delta))
    tree constraints:    constant * n/eps^2 * log^2(1/eps) * log(n/eps)
                         * log(n/(eps*delta))
    """
    if n < 1:
        raise ValidationError("n must be >= 1")
    eps = float(epsilon)
    dlt = float(delta)
    if not (0 < eps < 1) or not (0 < dlt < 1):
        raise ValidationError("epsilon and delta must lie in (0, 1)")
    if mode == "general":
        raw = constant * n**3 / eps**3 * math.log(n / (eps * dlt))
    elif mode == "tree":
        raw = (
            constant
            * n
            / eps**2
            * math.log(1 / eps) ** 2
            * math.log(n / eps)
            * math.log(n / (eps * dlt))
        )
    else:
        raise ValidationError(f"unknown mode {mode!r}")
    return max(1, math.ceil(raw))


@dataclass(frozen=True)
class LearningConfig:
    epsilon: Fraction
    delta: Fraction
    samples_per_box: Optional[int] = None  # None: use the tree-mode bound
    grid_step: Optional[Fraction] = None  # None: use epsilon
    constant: float = 1.0

    def __post_init__(self) -> None:
        if not (0 < self.epsilon < 1) or not (0 < self.delta < 1):
            raise ValidationError("epsilon and delta must lie in (0, 1)")
        step = self.resolved_grid_step
        if step <= 0 or step > 1 or (1 / step).denominator != 1:
            raise ValidationError(f"grid step {step} must divide 1 exactly")

    @property
    def resolved_grid_step(self) -> Fraction:
        return self.grid_step if self.grid_step is not None else self.epsilon

    def sample_count(self, n: int) -> int:
        if self.samples_per_box is not None:
            if self.samples_per_box < 1:
                raise ValidationError("samples_per_box must be >= 1")
            return self.samples_per_box
        return sample_bound(n, self.epsilon, self.delta, "tree", self.constant)


@dataclass(frozen=True)
class EmpiricalModel:
    """Per-box tallies of grid-rounded samples; probabilities are the exact
    ratios count / samples_per_box."""

    counts: dict[str, tuple[tuple[Fraction, int], ...]]
    samples_per_box: int
    grid_step: Fraction

    def distribution(self, box_id: str) -> DiscreteDistribution:
        return DiscreteDistribution.of(
            [(v, Fraction(c, self.samples_per_box)) for v, c in self.counts[box_id]]
        )

    def empirical_instance(self, base: Instance) -> Instance:
        boxes = tuple(
            BoxSpec(b.id, b.cost, self.distribution(b.id)) for b in base.boxes
        )
        return Instance(boxes=boxes, constraint=base.constraint, side=base.side)


def _check_learning_regime(instance: Instance) -> None:
    for box in instance.boxes:
        if box.cost < 0 or box.cost > 1:
            raise ValidationError(f"box {box.id!r} cost {box.cost} outside [0, 1]")
        for v in box.reward.values():
            if v < 0 or v > 1:
                raise ValidationError(f"box {box.id!r} reward {v} outside [0, 1]")


def round_down_to_grid(value: Fraction, step: Fraction) -> Fraction:
    return (value / step).numerator // (value / step).denominator * step


def learn_model(instance: Instance, config: LearningConfig, rng_seed: int) -> EmpiricalModel:
    """Draw N i.i.d. samples per box, round down to the grid, tally.

    Per-box counts come from a multinomial draw over the true atoms (the
    tally of N independent samples has exactly that law); streams are
    derived from (seed, box index) so results do not depend on box order of
    evaluation or batching.
    """
    _check_learning_regime(instance)
    n_samples = config.sample_count(instance.n)
    step = config.resolved_grid_step
    counts: dict[str, tuple[tuple[Fraction, int], ...]] = {}
    for index, box in enumerate(instance.boxes):
        seq = np.random.SeedSequence([rng_seed & _SEED_MASK, index])
        rng = np.random.Generator(np.random.PCG64(seq))
        probs = [float(p) for p in box.reward.probs()]
        drawn = rng.multinomial(n_samples, probs)
        tally: dict[Fraction, int] = {}
        for (value, _), count in zip(box.reward.atoms, drawn):
            if count == 0:
                continue
            rounded = round_down_to_grid(value, step)
            tally[rounded] = tally.get(rounded, 0) + int(count)
        counts[box.id] = tuple(sorted(tally.items()))
    return EmpiricalModel(counts=counts, samples_per_box=n_samples, grid_step=step)


@dataclass(frozen=True)
class LearnReport:
    true_opt: Fraction
    learned_policy_value: Fraction
    gap: Fraction
    epsilon: Fraction
    samples_per_box: int


def learn_and_solve(instance: Instance, config: LearningConfig, rng_seed: int) -> tuple[ThresholdPolicy, LearnReport]:
    """Learn, solve the empirical instance, and score the learned policy on
    the true instance (exactly).  The gap is true optimum minus the learned
    policy's true value; it is nonnegative by optimality."""
    model = learn_model(instance, config, rng_seed)
    empirical = model.empirical_instance(instance)
    learned = solve_tree(empirical)
    policy = ThresholdPolicy.for_instance(instance, learned.thresholds, learned.order.ids())
    truth = solve_tree(instance)
    achieved = evaluate_threshold_exact(instance, policy)
    report = LearnReport(
        true_opt=truth.value,
        learned_policy_value=achieved,
        gap=truth.value - achieved,
        epsilon=config.epsilon,
        samples_per_box=model.samples_per_box,
    )
    return policy, report
