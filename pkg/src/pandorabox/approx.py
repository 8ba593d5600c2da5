"""Approximately optimal adaptive strategies for tree constraints combined
with an oblivious side-constraint oracle.

Boxes are laid out in a pre-order of the tree, so the tree information in a
state compresses to "the position currently considered": the descendants of
position i occupy exactly i+1 .. next(i)-1, and skipping a box jumps to
next(i).  The side constraint enters only through a compressed statistic of
the opened set (the oblivious oracle): the weight total for a generalized
knapsack.  The backward sweep computes, for every (position, best reward,
oracle state), the value of the best sweep strategy

    value(i, y, D) = max( y,                                 terminate
                          value(next(i), y, D),              skip subtree
                          -c_i + E[value(i+1, y v X_i, D+i)] open box i )

with value(n+1, y, D) = y and value(., ., infeasible) = 0.  The recorded
action resolves skip chains, so executing the policy means following open
and terminate decisions while tracking (position, best, oracle state).

The resulting strategy is at least as good as opening any fixed feasible
set, and earns at least half the expected best reward of any adaptive
strategy minus its full expected cost.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import (
    CAPACITY_FACTOR,
    CapExceededError,
    ConstraintKind,
    ExecutionState,
    Instance,
    MatroidSideConstraint,
    UnsupportedConstraintError,
    ValidationError,
)
from .oracle import solve_exact
from .strategy import RewardSampler, Trajectory

ZERO = Fraction(0)

MAX_ORACLE_DIMENSION = 4
TABLE_CELL_CAP = 2_000_000
SET_ENUMERATION_CAP = 12
ORACLE_COMPARISON_CAP = 10


@dataclass(frozen=True)
class PreOrderIndex:
    """Pre-order positions (1-based) and the first-position-outside-the-
    subtree jump table; ``next_position[i-1]`` is n+1 past the last tree."""

    order: tuple[str, ...]
    next_position: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.order)


def build_preorder(instance: Instance) -> PreOrderIndex:
    """Pre-order over a line/tree/forest, children in ascending id order;
    forests are traversed root by root (ascending id)."""
    kind = instance.constraint.kind
    if kind not in (
        ConstraintKind.LINE,
        ConstraintKind.TREE,
        ConstraintKind.FOREST,
        ConstraintKind.UNCONSTRAINED,
    ):
        raise UnsupportedConstraintError(f"pre-order needs a tree-like constraint, not {kind!r}")
    children = {k: sorted(v) for k, v in instance.constraint.children().items()}
    parents = instance.constraint.parents()
    roots = sorted(b.id for b in instance.boxes if b.id not in parents)
    order: list[str] = []
    subtree: dict[str, int] = {}

    def visit(node: str) -> int:
        order.append(node)
        size = 1
        for child in children.get(node, ()):
            size += visit(child)
        subtree[node] = size
        return size

    for root in roots:
        visit(root)
    next_position = tuple(i + 1 + subtree[node] for i, node in enumerate(order))
    return PreOrderIndex(order=tuple(order), next_position=next_position)


class TrivialOracle:
    """No side constraint: a single always-feasible state."""

    def initial(self) -> tuple:
        return ()

    def add(self, state: tuple, box_id: str) -> Optional[tuple]:
        return state

    def states(self) -> list[tuple]:
        return [()]


class KnapsackOracle:
    """Weight-sum statistic clipped at the capacity; adding a box that
    overflows any component yields the (single) infeasible state None."""

    def __init__(self, weights: dict[str, tuple[int, ...]], capacity: tuple[int, ...]):
        self.weights = weights
        self.capacity = capacity

    def initial(self) -> tuple[int, ...]:
        return (0,) * len(self.capacity)

    def add(self, state: tuple[int, ...], box_id: str) -> Optional[tuple[int, ...]]:
        w = self.weights.get(box_id)
        if w is None:
            return state
        out = tuple(s + x for s, x in zip(state, w))
        if any(o > cap for o, cap in zip(out, self.capacity)):
            return None
        return out

    def states(self) -> list[tuple[int, ...]]:
        cells: list[tuple[int, ...]] = [()]
        for cap in self.capacity:
            cells = [c + (v,) for c in cells for v in range(cap + 1)]
        return cells


def knapsack_oracle(side: MatroidSideConstraint, n_boxes: int):
    """Oblivious oracle for a side constraint (partition constraints are
    encoded as unit-weight knapsacks, one dimension per part)."""
    if side.kind == MatroidSideConstraint.NONE:
        return TrivialOracle()
    if side.kind == MatroidSideConstraint.KNAPSACK:
        weights = {k: tuple(v) for k, v in side.weights.items()}
        capacity = tuple(side.capacity)
    elif side.kind == MatroidSideConstraint.PARTITION:
        k = len(side.part_capacities)
        weights = {
            box_id: tuple(1 if j == part else 0 for j in range(k))
            for box_id, part in side.parts.items()
        }
        capacity = tuple(side.part_capacities)
    else:
        raise ValidationError(f"unknown side constraint kind {side.kind!r}")
    if len(capacity) > MAX_ORACLE_DIMENSION:
        raise CapExceededError(
            f"oracle dimension {len(capacity)} exceeds {MAX_ORACLE_DIMENSION}"
        )
    bound = CAPACITY_FACTOR * n_boxes
    for cap in capacity:
        if cap > bound:
            raise CapExceededError(f"capacity entry {cap} exceeds the {bound} bound")
    return KnapsackOracle(weights, capacity)


@dataclass(frozen=True)
class ApproxPolicy:
    """The DP table and the resolved action map.

    ``values[(i, y_index, state)]`` is the best sweep value from position i;
    ``actions[...]`` is None to terminate or the position to open next.  The
    action must be looked up with the oracle state tracked along the run: two
    histories can reach the same (position, best) with different remaining
    capacity, so the state is part of the key.
    """

    instance: Instance
    preorder: PreOrderIndex
    grid: tuple[Fraction, ...]
    oracle: object
    values: dict
    actions: dict

    @property
    def start_state(self):
        return self.oracle.initial()

    @property
    def value(self) -> Fraction:
        """Expected net revenue of the policy from a fresh start."""
        return self.values[(1, 0, self.start_state)]


def solve_approx(instance: Instance, oracle=None) -> ApproxPolicy:
    """Backward sweep over (position, best-reward grid, oracle state)."""
    preorder = build_preorder(instance)
    if oracle is None:
        oracle = knapsack_oracle(instance.side, instance.n)
    grid = instance.support_union()
    y_index = {y: k for k, y in enumerate(grid)}
    states = oracle.states()
    n = preorder.n
    cells = (n + 1) * len(grid) * len(states)
    if cells > TABLE_CELL_CAP:
        raise CapExceededError(f"table would need {cells} cells, cap is {TABLE_CELL_CAP}")

    values: dict = {}
    actions: dict = {}
    for yk in range(len(grid)):
        for state in states:
            values[(n + 1, yk, state)] = grid[yk]
            actions[(n + 1, yk, state)] = None

    for i in range(n, 0, -1):
        box = instance.box_map[preorder.order[i - 1]]
        nxt = preorder.next_position[i - 1]
        for state in states:
            after_open = oracle.add(state, box.id)
            for yk, y in enumerate(grid):
                skip_val = values[(nxt, yk, state)]
                open_val = -box.cost
                if after_open is not None:
                    for v, p in box.reward.atoms:
                        vk = y_index[v] if v > y else yk
                        open_val += p * values[(i + 1, vk, after_open)]
                best = y
                if open_val > best:
                    best = open_val
                if skip_val > best:
                    best = skip_val
                values[(i, yk, state)] = best
                if best == y:
                    actions[(i, yk, state)] = None
                elif best == open_val:
                    actions[(i, yk, state)] = i
                else:
                    actions[(i, yk, state)] = actions[(nxt, yk, state)]
    return ApproxPolicy(
        instance=instance,
        preorder=preorder,
        grid=grid,
        oracle=oracle,
        values=values,
        actions=actions,
    )


def run_approx(instance: Instance, policy: ApproxPolicy, rng_seed: int, trial: int = 0) -> Trajectory:
    """Execute the policy with lazily sampled rewards."""
    sampler = RewardSampler(rng_seed, trial)
    y_index = {y: k for k, y in enumerate(policy.grid)}
    pos = 1
    y = ZERO
    state = policy.start_state
    spent = ZERO
    steps: list[tuple[str, Fraction]] = []
    opened: list[str] = []
    while True:
        act = policy.actions[(pos, y_index[y], state)]
        if act is None:
            break
        box = instance.box_map[policy.preorder.order[act - 1]]
        reward = sampler.draw(box.reward, len(steps), box.id)
        spent += box.cost
        steps.append((box.id, reward))
        opened.append(box.id)
        if reward > y:
            y = reward
        state = policy.oracle.add(state, box.id)
        if state is None:
            raise ValidationError(f"policy opened {box.id!r} into an infeasible state")
        pos = act + 1
    return Trajectory(
        steps=tuple(steps),
        final=ExecutionState(opened=frozenset(opened), best=y, spent=spent),
    )


def exact_policy_value(instance: Instance, policy: ApproxPolicy) -> Fraction:
    """Expected net revenue of the recorded actions, by an independent
    forward recursion (no reuse of the DP table's numbers)."""
    y_index = {y: k for k, y in enumerate(policy.grid)}
    memo: dict = {}

    def value(pos: int, yk: int, state) -> Fraction:
        key = (pos, yk, state)
        cached = memo.get(key)
        if cached is not None:
            return cached
        act = policy.actions[key]
        if act is None:
            out = policy.grid[yk]
        else:
            box = instance.box_map[policy.preorder.order[act - 1]]
            after = policy.oracle.add(state, box.id)
            if after is None:
                raise ValidationError(f"policy opens {box.id!r} into an infeasible state")
            out = -box.cost
            y = policy.grid[yk]
            for v, p in box.reward.atoms:
                vk = y_index[v] if v > y else yk
                out += p * value(act + 1, vk, after)
        memo[key] = out
        return out

    return value(1, 0, policy.start_state)


@dataclass(frozen=True)
class GuaranteeReport:
    policy_value: Fraction
    executed_value: Fraction
    set_margin: Fraction
    worst_set: tuple[str, ...]
    feasible_sets: int
    benchmark_margin: Optional[Fraction]
    oracle_value: Optional[Fraction]
    oracle_e_max: Optional[Fraction]
    oracle_e_cost: Optional[Fraction]


def _enumerate_set_margin(instance: Instance, policy: ApproxPolicy) -> tuple[Fraction, tuple[str, ...], int]:
    """Minimum of (policy value - set value) over every feasible set:
    tree-closed (include a box only under an included parent) and
    side-feasible, walked over the pre-order with include/skip branching."""
    preorder = policy.preorder
    n = preorder.n
    grid = policy.grid
    boxes = [instance.box_map[b] for b in preorder.order]
    cdfs = [[box.reward.cdf(v) for v in grid] for box in boxes]
    psi_start = policy.value

    best_margin: list = [None]
    worst: list = [()]
    count = [0]

    def expected_max(cdf_prod: list[Fraction]) -> Fraction:
        total = ZERO
        prev = ZERO
        for v, f in zip(grid, cdf_prod):
            total += v * (f - prev)
            prev = f
        return total

    def walk(pos: int, state, cdf_prod: list[Fraction], cost: Fraction, chosen: tuple[str, ...]) -> None:
        if pos == n + 1:
            count[0] += 1
            value = (expected_max(cdf_prod) if chosen else ZERO) - cost
            margin = psi_start - value
            if best_margin[0] is None or margin < best_margin[0]:
                best_margin[0] = margin
                worst[0] = chosen
            return
        nxt = preorder.next_position[pos - 1]
        walk(nxt, state, cdf_prod, cost, chosen)  # skip the whole subtree
        after = policy.oracle.add(state, boxes[pos - 1].id)
        if after is not None:
            included = [a * b for a, b in zip(cdf_prod, cdfs[pos - 1])]
            walk(pos + 1, after, included, cost + boxes[pos - 1].cost,
                 chosen + (boxes[pos - 1].id,))

    walk(1, policy.start_state, [Fraction(1)] * len(grid), ZERO, ())
    assert best_margin[0] is not None
    return best_margin[0], worst[0], count[0]


def verify_guarantee(instance: Instance, policy: Optional[ApproxPolicy] = None) -> GuaranteeReport:
    """Check the two guarantees at desk scale.

    (a) the policy value dominates every feasible non-adaptive set
        (exhaustive enumeration), and
    (b) the executed policy earns at least half the optimal strategy's
        expected best reward minus its full expected cost.
    """
    if policy is None:
        policy = solve_approx(instance)
    if instance.n > SET_ENUMERATION_CAP:
        raise CapExceededError(
            f"set enumeration handles at most {SET_ENUMERATION_CAP} boxes, got {instance.n}"
        )
    set_margin, worst_set, n_sets = _enumerate_set_margin(instance, policy)
    executed = exact_policy_value(instance, policy)

    benchmark_margin = None
    oracle_value = None
    e_max = None
    e_cost = None
    if instance.n <= ORACLE_COMPARISON_CAP:
        result = solve_exact(instance)
        oracle_value = result.value
        e_max = result.e_max
        e_cost = result.e_cost
        benchmark_margin = executed - (e_max / 2 - e_cost)
    return GuaranteeReport(
        policy_value=policy.value,
        executed_value=executed,
        set_margin=set_margin,
        worst_set=worst_set,
        feasible_sets=n_sets,
        benchmark_margin=benchmark_margin,
        oracle_value=oracle_value,
        oracle_e_max=e_max,
        oracle_e_cost=e_cost,
    )
