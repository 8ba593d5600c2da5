"""Shared generators and independent brute-force oracles for the tests.

The brute-force routines here deliberately avoid the library's own
algorithms (product-space enumeration, history recursion without
memoization) so they can serve as independent cross-checks.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from pandorabox import (
    BoxSpec,
    ConstraintGraph,
    ConstraintKind,
    DiscreteDistribution,
    Instance,
    MatroidSideConstraint,
    feasible_next,
)
from pandorabox.line_solver import macro_partition, solve_line

F = Fraction
ZERO = F(0)


# ---------------------------------------------------------------------------
# Random instance generation (exact rationals, small denominators)
# ---------------------------------------------------------------------------

def rand_probs(rng: random.Random, k: int) -> list[Fraction]:
    den = rng.choice([d for d in (2, 3, 4, 6, 8, 12) if d >= k])
    cuts = sorted(rng.sample(range(1, den), k - 1)) if k > 1 else []
    parts = []
    prev = 0
    for c in cuts + [den]:
        parts.append(F(c - prev, den))
        prev = c
    return parts


def rand_dist(rng: random.Random, max_support: int = 3, max_value: int = 8) -> DiscreteDistribution:
    k = rng.randint(1, max_support)
    scale = rng.choice((1, 1, 2))
    values = sorted(rng.sample(range(0, max_value + 1), k))
    probs = rand_probs(rng, k)
    return DiscreteDistribution.of([(F(v, scale), p) for v, p in zip(values, probs)])


def rand_box(rng: random.Random, index: int, max_cost: int = 5) -> BoxSpec:
    cost = F(rng.randint(0, max_cost), rng.choice((1, 2, 3)))
    return BoxSpec(f"b{index:02d}", cost, rand_dist(rng))


def rand_line_boxes(rng: random.Random, n: int) -> list[BoxSpec]:
    return [rand_box(rng, i) for i in range(n)]


def line_instance_of(boxes) -> Instance:
    edges = tuple((boxes[i].id, boxes[i + 1].id) for i in range(len(boxes) - 1))
    kind = ConstraintKind.LINE if len(boxes) > 1 else ConstraintKind.UNCONSTRAINED
    return Instance(boxes=tuple(boxes), constraint=ConstraintGraph(kind, edges))


def rand_tree_instance(rng: random.Random, n: int) -> Instance:
    boxes = tuple(rand_box(rng, i) for i in range(n))
    edges = tuple((boxes[rng.randrange(i)].id, boxes[i].id) for i in range(1, n))
    kind = ConstraintKind.TREE if n > 1 else ConstraintKind.UNCONSTRAINED
    return Instance(boxes=boxes, constraint=ConstraintGraph(kind, edges))


def rand_forest_of_paths(rng: random.Random, max_paths: int = 3, max_total: int = 9) -> Instance:
    n_paths = rng.randint(1, max_paths)
    sizes = [rng.randint(1, max(1, max_total // n_paths)) for _ in range(n_paths)]
    boxes: list[BoxSpec] = []
    edges: list[tuple[str, str]] = []
    for size in sizes:
        start = len(boxes)
        for _ in range(size):
            boxes.append(rand_box(rng, len(boxes)))
        for i in range(start, start + size - 1):
            edges.append((boxes[i].id, boxes[i + 1].id))
    kind = ConstraintKind.FOREST if len(boxes) > 1 else ConstraintKind.UNCONSTRAINED
    return Instance(boxes=tuple(boxes), constraint=ConstraintGraph(kind, tuple(edges)))


def rand_knapsack_side(rng: random.Random, ids, max_dim: int = 2) -> MatroidSideConstraint:
    d = rng.randint(1, max_dim)
    weights = {i: tuple(rng.randint(0, 3) for _ in range(d)) for i in ids}
    capacity = tuple(rng.randint(1, 2 * len(list(ids)) + 2) for _ in range(d))
    return MatroidSideConstraint.knapsack(weights, capacity)


def with_side(instance: Instance, side: MatroidSideConstraint) -> Instance:
    return Instance(boxes=instance.boxes, constraint=instance.constraint, side=side)


# ---------------------------------------------------------------------------
# Independent brute-force oracles
# ---------------------------------------------------------------------------

def brute_max_distribution(dists) -> list[tuple[Fraction, Fraction]]:
    """Distribution of the max by full product-space enumeration."""
    tally: dict[Fraction, Fraction] = {}
    for combo in itertools.product(*(d.atoms for d in dists)):
        value = max(v for v, _ in combo)
        prob = F(1)
        for _, p in combo:
            prob *= p
        tally[value] = tally.get(value, ZERO) + prob
    return sorted(tally.items())


def enumerate_realizations(boxes):
    """Yields (values dict id -> value, probability) over the product space."""
    for combo in itertools.product(*(b.reward.atoms for b in boxes)):
        prob = F(1)
        values = {}
        for box, (v, p) in zip(boxes, combo):
            prob *= p
            values[box.id] = v
        yield values, prob


def run_line_threshold(boxes, thresholds, values, horizon=None) -> tuple[tuple, Fraction]:
    """Walk a line with per-box thresholds on a fixed realization; stop when
    the best reward reaches the next threshold or the horizon (1-based box
    count) is exhausted.  Returns (history of (id, value), net revenue)."""
    limit = len(boxes) if horizon is None else horizon
    y = ZERO
    spent = ZERO
    history = []
    for i in range(limit):
        if y >= thresholds[i]:
            break
        box = boxes[i]
        spent += box.cost
        x = values[box.id]
        history.append((box.id, x))
        if x > y:
            y = x
    return tuple(history), y - spent


def check_line_submartingale(boxes) -> None:
    """Exact check: truncating the optimal line run at successive macro-box
    boundaries gives conditional expectations that never decrease."""
    solution = solve_line(boxes)
    z = solution.thresholds.thresholds
    bounds = macro_partition(solution.thresholds).boundaries
    ends = [0] + [bounds[k + 1] - 1 for k in range(len(bounds) - 1)] + [len(boxes)]

    outcomes = list(enumerate_realizations(boxes))
    for k in range(len(ends) - 1):
        groups: dict[tuple, list[tuple[Fraction, Fraction]]] = {}
        for values, prob in outcomes:
            history, net = run_line_threshold(boxes, z, values, horizon=ends[k])
            _, net_next = run_line_threshold(boxes, z, values, horizon=ends[k + 1])
            groups.setdefault(history, []).append((prob, net_next, net))
        for history, rows in groups.items():
            total = sum(p for p, _, _ in rows)
            current = rows[0][2]
            assert all(net == current for _, _, net in rows)
            conditional = sum(p * nn for p, nn, _ in rows) / total
            assert conditional >= current, (history, conditional, current)


def run_greedy_threshold_on_realization(instance: Instance, thresholds, values) -> Fraction:
    """Net revenue of the threshold rule on one fixed realization, executed
    literally: while the best reward is below the largest threshold among
    openable boxes, open that argmax box (ties by id)."""
    opened: set[str] = set()
    y = ZERO
    spent = ZERO
    while True:
        candidates = feasible_next(instance, opened)
        if not candidates:
            return y - spent
        best_box = min(candidates, key=lambda b: (-thresholds[b], b))
        if y >= thresholds[best_box]:
            return y - spent
        opened.add(best_box)
        spent += instance.box_map[best_box].cost
        if values[best_box] > y:
            y = values[best_box]


def decision_tree_sup_half(instance: Instance) -> Fraction:
    """sup over adaptive strategies of E[final best]/2 - E[cost], by
    explicit recursion over histories (no state memoization)."""

    def value(opened: tuple[str, ...], y: Fraction) -> Fraction:
        best = y / 2
        for box_id in feasible_next(instance, opened):
            box = instance.box_map[box_id]
            val = -box.cost
            for v, p in box.reward.atoms:
                val += p * value(opened + (box_id,), v if v > y else y)
            if val > best:
                best = val
        return best

    return value((), ZERO)
