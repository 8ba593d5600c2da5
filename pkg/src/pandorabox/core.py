"""Domain types, validation, exact distribution arithmetic and the instance
file format shared by every solver.

All quantities that enter a solver (costs, rewards, probabilities, thresholds)
are exact rationals (`fractions.Fraction`).  Floating point appears only in
Monte-Carlo sampling paths.  Rationals are serialized as ``"p/q"`` or decimal
strings; both forms parse back exactly (``"0.25"`` -> ``1/4``).

Instance documents are JSON with the following shape::

    {
      "boxes": [
        {"id": "a", "cost": "1", "reward": [{"value": "3", "prob": "1/2"},
                                            {"value": "0", "prob": "1/2"}]}
      ],
      "constraint": {"kind": "line", "edges": [["a", "b"]], "roots": ["a"]},
      "side": {"kind": "knapsack", "weights": {"a": [1]}, "capacity": [2]}
    }

``constraint.kind`` is one of ``unconstrained | line | tree | forest | dag``;
``side`` is optional and is either a generalized knapsack (integer weight
vectors plus a capacity vector) or a partition constraint (part index per box
plus per-part capacities).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence, Union

Rational = Fraction

RESERVED_ID_PREFIX = "__"
DUMMY_ROOT_ID = "__root__"

# Capacities of side constraints must stay polynomially bounded in n.
CAPACITY_FACTOR = 10


class PandoraError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(PandoraError):
    """The instance document is not well-formed."""


class ValidationError(PandoraError):
    """A structurally well-formed instance violates a model invariant."""


class UnsupportedConstraintError(PandoraError):
    """The requested operation does not support this constraint kind."""


class CapExceededError(PandoraError):
    """An exponential-size computation would exceed its configured cap."""


class InvariantError(PandoraError):
    """An internal consistency check failed (indicates a bug)."""


def parse_rational(text: Union[str, int, Fraction]) -> Fraction:
    """Parse ``"p/q"``, decimal strings and integers into an exact rational."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, bool):
        raise ParseError(f"expected a rational, got boolean {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        raise ParseError(
            f"refusing to parse float {text!r}: write it as a string "
            f"(decimals convert exactly)"
        )
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"cannot parse rational from {text!r}: {exc}") from None


def format_rational(q: Fraction) -> str:
    """Inverse of :func:`parse_rational`; integers print without denominator."""
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class DiscreteDistribution:
    """Finite-support reward distribution with exact atom probabilities.

    Atoms are ``(value, probability)`` pairs, strictly increasing by value,
    probabilities positive and summing to exactly 1, values nonnegative.
    """

    atoms: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self) -> None:
        if not self.atoms:
            raise ValidationError("distribution needs at least one atom")
        total = Fraction(0)
        prev = None
        for value, prob in self.atoms:
            if value < 0:
                raise ValidationError(f"reward value {value} is negative")
            if prob <= 0:
                raise ValidationError(f"atom probability {prob} is not positive")
            if prev is not None and value <= prev:
                raise ValidationError("atom values must be strictly increasing")
            prev = value
            total += prob
        if total != 1:
            raise ValidationError(f"atom probabilities sum to {total}, not 1")

    @staticmethod
    def of(pairs: Iterable[tuple[Union[Fraction, int, str], Union[Fraction, int, str]]]) -> "DiscreteDistribution":
        """Build from unsorted pairs, merging duplicate values."""
        merged: dict[Fraction, Fraction] = {}
        for value, prob in pairs:
            v = parse_rational(value)
            p = parse_rational(prob)
            merged[v] = merged.get(v, Fraction(0)) + p
        atoms = tuple(sorted((v, p) for v, p in merged.items() if p != 0))
        return DiscreteDistribution(atoms)

    @staticmethod
    def point(value: Union[Fraction, int, str]) -> "DiscreteDistribution":
        return DiscreteDistribution(((parse_rational(value), Fraction(1)),))

    def values(self) -> tuple[Fraction, ...]:
        return tuple(v for v, _ in self.atoms)

    def probs(self) -> tuple[Fraction, ...]:
        return tuple(p for _, p in self.atoms)

    def expectation(self) -> Fraction:
        return sum((v * p for v, p in self.atoms), Fraction(0))

    def max_value(self) -> Fraction:
        return self.atoms[-1][0]

    def min_value(self) -> Fraction:
        return self.atoms[0][0]

    def cdf(self, x: Fraction) -> Fraction:
        """P(X <= x)."""
        total = Fraction(0)
        for v, p in self.atoms:
            if v <= x:
                total += p
        return total


@dataclass(frozen=True)
class BoxSpec:
    """One box: an opening cost and a reward distribution."""

    id: str
    cost: Fraction
    reward: DiscreteDistribution


class ConstraintKind:
    UNCONSTRAINED = "unconstrained"
    LINE = "line"
    TREE = "tree"
    FOREST = "forest"
    DAG = "dag"

    ALL = (UNCONSTRAINED, LINE, TREE, FOREST, DAG)


@dataclass(frozen=True)
class ConstraintGraph:
    """Order constraint over the boxes.

    For ``line``/``tree``/``forest`` a box is openable once its parent is
    open; for ``dag`` a box is openable once at least one in-neighbour is
    open, and in-degree-0 boxes are openable from the start.
    """

    kind: str
    edges: tuple[tuple[str, str], ...] = ()
    roots: tuple[str, ...] = ()

    @staticmethod
    def unconstrained() -> "ConstraintGraph":
        return ConstraintGraph(ConstraintKind.UNCONSTRAINED)

    def parents(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {}
        for parent, child in self.edges:
            out.setdefault(child, []).append(parent)
        return out

    def children(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {}
        for parent, child in self.edges:
            out.setdefault(parent, []).append(child)
        return out


@dataclass(frozen=True)
class MatroidSideConstraint:
    """Optional downwards-closed side constraint on the opened set.

    ``knapsack``: every box has an integer weight vector of fixed dimension
    ``d`` and the opened set's weight sum must stay within ``capacity``
    componentwise.  ``partition``: every box belongs to a part and each part
    has a maximum number of opened boxes.
    """

    kind: str = "none"
    weights: Mapping[str, tuple[int, ...]] = field(default_factory=dict)
    capacity: tuple[int, ...] = ()
    parts: Mapping[str, int] = field(default_factory=dict)
    part_capacities: tuple[int, ...] = ()

    NONE = "none"
    KNAPSACK = "knapsack"
    PARTITION = "partition"

    @staticmethod
    def none() -> "MatroidSideConstraint":
        return MatroidSideConstraint()

    @staticmethod
    def knapsack(weights: Mapping[str, Sequence[int]], capacity: Sequence[int]) -> "MatroidSideConstraint":
        return MatroidSideConstraint(
            kind=MatroidSideConstraint.KNAPSACK,
            weights={k: tuple(v) for k, v in weights.items()},
            capacity=tuple(capacity),
        )

    @staticmethod
    def partition(parts: Mapping[str, int], capacities: Sequence[int]) -> "MatroidSideConstraint":
        return MatroidSideConstraint(
            kind=MatroidSideConstraint.PARTITION,
            parts=dict(parts),
            part_capacities=tuple(capacities),
        )

    def is_feasible(self, ids: Iterable[str]) -> bool:
        if self.kind == self.NONE:
            return True
        if self.kind == self.KNAPSACK:
            d = len(self.capacity)
            total = [0] * d
            for box_id in ids:
                for j, w in enumerate(self.weights[box_id]):
                    total[j] += w
            return all(total[j] <= self.capacity[j] for j in range(d))
        counts = [0] * len(self.part_capacities)
        for box_id in ids:
            counts[self.parts[box_id]] += 1
        return all(c <= cap for c, cap in zip(counts, self.part_capacities))


@dataclass(frozen=True)
class Instance:
    """A full problem instance: boxes plus order and side constraints."""

    boxes: tuple[BoxSpec, ...]
    constraint: ConstraintGraph = ConstraintGraph.unconstrained()
    side: MatroidSideConstraint = MatroidSideConstraint.none()

    @property
    def n(self) -> int:
        return len(self.boxes)

    @cached_property
    def box_map(self) -> dict[str, BoxSpec]:
        return {b.id: b for b in self.boxes}

    def box(self, box_id: str) -> BoxSpec:
        return self.box_map[box_id]

    def support_union(self) -> tuple[Fraction, ...]:
        """Sorted union of {0} and every reward support value."""
        values = {Fraction(0)}
        for b in self.boxes:
            values.update(b.reward.values())
        return tuple(sorted(values))


@dataclass(frozen=True)
class ExecutionState:
    """State of a search run: opened boxes, best reward seen, total spend."""

    opened: frozenset[str]
    best: Fraction
    spent: Fraction


def _validate_constraint(instance: Instance) -> None:
    graph = instance.constraint
    kind = graph.kind
    ids = set(instance.box_map)
    if kind not in ConstraintKind.ALL:
        raise ValidationError(f"unknown constraint kind {kind!r}")
    for parent, child in graph.edges:
        for endpoint in (parent, child):
            if endpoint not in ids:
                raise ValidationError(
                    f"edge ({parent!r}, {child!r}) references unknown box {endpoint!r}"
                )
    for root in graph.roots:
        if root not in ids:
            raise ValidationError(f"declared root {root!r} is not a box")
    if kind == ConstraintKind.UNCONSTRAINED:
        if graph.edges:
            raise ValidationError("unconstrained instances must not declare edges")
        return

    parents = graph.parents()
    if kind == ConstraintKind.DAG:
        for child, ps in parents.items():
            if len(set(ps)) != len(ps):
                raise ValidationError(f"duplicate edge into box {child!r}")
        _check_acyclic(instance)
        derived_roots = tuple(b.id for b in instance.boxes if b.id not in parents)
        if not derived_roots:
            raise ValidationError("DAG constraint has no in-degree-0 box")
        if graph.roots and set(graph.roots) != set(derived_roots):
            raise ValidationError(
                f"declared roots {sorted(graph.roots)} differ from in-degree-0 "
                f"boxes {sorted(derived_roots)}"
            )
        return

    # line / tree / forest: at most one parent each, no cycles.
    for child, ps in parents.items():
        if len(ps) > 1:
            raise ValidationError(f"box {child!r} has multiple parents {sorted(ps)}")
    _check_acyclic(instance)
    roots = [b.id for b in instance.boxes if b.id not in parents]
    if graph.roots and set(graph.roots) != set(roots):
        raise ValidationError(
            f"declared roots {sorted(graph.roots)} differ from parentless boxes {sorted(roots)}"
        )
    if kind in (ConstraintKind.LINE, ConstraintKind.TREE) and len(roots) != 1:
        raise ValidationError(f"{kind} constraint needs exactly one root, found {sorted(roots)}")
    if kind == ConstraintKind.LINE:
        children = instance.constraint.children()
        for parent, cs in children.items():
            if len(cs) > 1:
                raise ValidationError(f"line constraint branches at box {parent!r}")
        if len(graph.edges) != instance.n - 1:
            raise ValidationError("line constraint must chain every box exactly once")


def _check_acyclic(instance: Instance) -> None:
    children = instance.constraint.children()
    indegree = {b.id: 0 for b in instance.boxes}
    for _, child in instance.constraint.edges:
        indegree[child] += 1
    queue = [box_id for box_id, deg in indegree.items() if deg == 0]
    seen = 0
    while queue:
        node = queue.pop()
        seen += 1
        for child in children.get(node, ()):
            indegree[child] -= 1
            if indegree[child] == 0:
                queue.append(child)
    if seen != instance.n:
        stuck = sorted(box_id for box_id, deg in indegree.items() if deg > 0)
        raise ValidationError(f"constraint contains a cycle through {stuck}")


def _validate_side(instance: Instance) -> None:
    side = instance.side
    bound = CAPACITY_FACTOR * instance.n
    if side.kind == MatroidSideConstraint.NONE:
        return
    if side.kind == MatroidSideConstraint.KNAPSACK:
        d = len(side.capacity)
        if d < 1:
            raise ValidationError("knapsack constraint needs a nonempty capacity vector")
        for cap in side.capacity:
            if not isinstance(cap, int) or cap < 0:
                raise ValidationError(f"capacity entry {cap!r} is not a nonnegative integer")
            if cap > bound:
                raise ValidationError(f"capacity entry {cap} exceeds the {bound} (= {CAPACITY_FACTOR}n) bound")
        for box in instance.boxes:
            w = side.weights.get(box.id)
            if w is None:
                raise ValidationError(f"knapsack weights missing for box {box.id!r}")
            if len(w) != d:
                raise ValidationError(f"weight vector for box {box.id!r} has dimension {len(w)}, expected {d}")
            if any((not isinstance(x, int)) or x < 0 for x in w):
                raise ValidationError(f"weight vector for box {box.id!r} has a negative or non-integer entry")
        for extra in set(side.weights) - set(instance.box_map):
            raise ValidationError(f"knapsack weights reference unknown box {extra!r}")
        return
    if side.kind == MatroidSideConstraint.PARTITION:
        k = len(side.part_capacities)
        if k < 1:
            raise ValidationError("partition constraint needs at least one part")
        for cap in side.part_capacities:
            if not isinstance(cap, int) or cap < 0:
                raise ValidationError(f"part capacity {cap!r} is not a nonnegative integer")
            if cap > bound:
                raise ValidationError(f"part capacity {cap} exceeds the {bound} (= {CAPACITY_FACTOR}n) bound")
        for box in instance.boxes:
            part = side.parts.get(box.id)
            if part is None:
                raise ValidationError(f"partition part missing for box {box.id!r}")
            if not isinstance(part, int) or not (0 <= part < k):
                raise ValidationError(f"box {box.id!r} has invalid part index {part!r}")
        for extra in set(side.parts) - set(instance.box_map):
            raise ValidationError(f"partition parts reference unknown box {extra!r}")
        return
    raise ValidationError(f"unknown side constraint kind {side.kind!r}")


def validate_instance(instance: Instance, allow_negative_costs: bool = False) -> Instance:
    """Check every model invariant; raises :class:`ValidationError` naming the
    offending box or edge.  Returns the instance for chaining."""
    if instance.n < 1:
        raise ValidationError("instance needs at least one box")
    seen: set[str] = set()
    for box in instance.boxes:
        if not box.id:
            raise ValidationError("box ids must be nonempty")
        if box.id in seen:
            raise ValidationError(f"duplicate box id {box.id!r}")
        seen.add(box.id)
        if box.id.startswith(RESERVED_ID_PREFIX):
            raise ValidationError(f"box id {box.id!r} uses the reserved prefix {RESERVED_ID_PREFIX!r}")
        if box.cost < 0 and not allow_negative_costs:
            raise ValidationError(f"box {box.id!r} has negative cost {box.cost}")
        # DiscreteDistribution validates itself on construction; re-check the
        # probability sum here so load errors name the box.
        total = sum(box.reward.probs(), Fraction(0))
        if total != 1:
            raise ValidationError(f"box {box.id!r} probabilities sum to {total}, not 1")
    _validate_constraint(instance)
    _validate_side(instance)
    return instance


# ---------------------------------------------------------------------------
# Instance document I/O
# ---------------------------------------------------------------------------

def _instance_from_obj(obj: object) -> Instance:
    if not isinstance(obj, dict):
        raise ParseError("instance document must be a JSON object")
    raw_boxes = obj.get("boxes")
    if not isinstance(raw_boxes, list) or not raw_boxes:
        raise ParseError("document needs a nonempty 'boxes' array")
    boxes = []
    for raw in raw_boxes:
        if not isinstance(raw, dict):
            raise ParseError("each box must be an object")
        try:
            box_id = raw["id"]
            cost = parse_rational(raw["cost"])
            reward_raw = raw["reward"]
        except KeyError as exc:
            raise ParseError(f"box is missing field {exc}") from None
        if not isinstance(box_id, str):
            raise ParseError(f"box id {box_id!r} must be a string")
        if not isinstance(reward_raw, list) or not reward_raw:
            raise ParseError(f"box {box_id!r} needs a nonempty 'reward' array")
        try:
            atoms = [
                (parse_rational(a["value"]), parse_rational(a["prob"]))
                for a in reward_raw
            ]
        except (KeyError, TypeError):
            raise ParseError(f"box {box_id!r} has a malformed reward atom") from None
        try:
            reward = DiscreteDistribution.of(atoms)
        except ValidationError as exc:
            raise ValidationError(f"box {box_id!r}: {exc}") from None
        boxes.append(BoxSpec(id=box_id, cost=cost, reward=reward))

    raw_constraint = obj.get("constraint", {"kind": ConstraintKind.UNCONSTRAINED})
    if not isinstance(raw_constraint, dict) or "kind" not in raw_constraint:
        raise ParseError("'constraint' must be an object with a 'kind'")
    edges_raw = raw_constraint.get("edges", [])
    if not isinstance(edges_raw, list):
        raise ParseError("'constraint.edges' must be an array")
    edges = []
    for e in edges_raw:
        if not (isinstance(e, (list, tuple)) and len(e) == 2):
            raise ParseError(f"edge {e!r} must be a [parent, child] pair")
        edges.append((e[0], e[1]))
    roots = raw_constraint.get("roots", [])
    if not isinstance(roots, list):
        raise ParseError("'constraint.roots' must be an array")
    constraint = ConstraintGraph(
        kind=raw_constraint["kind"], edges=tuple(edges), roots=tuple(roots)
    )

    raw_side = obj.get("side")
    if raw_side is None:
        side = MatroidSideConstraint.none()
    elif not isinstance(raw_side, dict) or "kind" not in raw_side:
        raise ParseError("'side' must be an object with a 'kind'")
    elif raw_side["kind"] == MatroidSideConstraint.KNAPSACK:
        try:
            side = MatroidSideConstraint.knapsack(
                {k: tuple(v) for k, v in raw_side["weights"].items()},
                tuple(raw_side["capacity"]),
            )
        except (KeyError, TypeError, AttributeError):
            raise ParseError("malformed knapsack side constraint") from None
    elif raw_side["kind"] == MatroidSideConstraint.PARTITION:
        try:
            side = MatroidSideConstraint.partition(
                dict(raw_side["parts"]), tuple(raw_side["capacities"])
            )
        except (KeyError, TypeError, AttributeError):
            raise ParseError("malformed partition side constraint") from None
    elif raw_side["kind"] == MatroidSideConstraint.NONE:
        side = MatroidSideConstraint.none()
    else:
        raise ParseError(f"unknown side constraint kind {raw_side['kind']!r}")

    return Instance(boxes=tuple(boxes), constraint=constraint, side=side)


def load_instance(text: str) -> Instance:
    """Parse and validate an instance document."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    return validate_instance(_instance_from_obj(obj))


def dump_instance(instance: Instance, indent: Optional[int] = 2) -> str:
    """Serialize an instance back into the document format."""
    obj: dict[str, object] = {
        "boxes": [
            {
                "id": b.id,
                "cost": format_rational(b.cost),
                "reward": [
                    {"value": format_rational(v), "prob": format_rational(p)}
                    for v, p in b.reward.atoms
                ],
            }
            for b in instance.boxes
        ],
        "constraint": {
            "kind": instance.constraint.kind,
            "edges": [list(e) for e in instance.constraint.edges],
            "roots": list(instance.constraint.roots),
        },
    }
    side = instance.side
    if side.kind == MatroidSideConstraint.KNAPSACK:
        obj["side"] = {
            "kind": side.kind,
            "weights": {k: list(v) for k, v in side.weights.items()},
            "capacity": list(side.capacity),
        }
    elif side.kind == MatroidSideConstraint.PARTITION:
        obj["side"] = {
            "kind": side.kind,
            "parts": dict(side.parts),
            "capacities": list(side.part_capacities),
        }
    return json.dumps(obj, indent=indent)


# ---------------------------------------------------------------------------
# Exact distribution arithmetic
# ---------------------------------------------------------------------------

def expected_excess(dist: DiscreteDistribution, z: Fraction) -> Fraction:
    """E[(X - z)_+], exactly.  ``z`` may be negative."""
    total = Fraction(0)
    for v, p in dist.atoms:
        if v > z:
            total += p * (v - z)
    return total


def weitzman_reservation(box: BoxSpec) -> Fraction:
    """Smallest z with E[(X - z)_+] = cost.

    The excess is piecewise linear, convex and nonincreasing in z with
    breakpoints at the support values, so the crossing segment can be
    inverted exactly.  Negative when cost > E[X]; equals the top of the
    support when cost = 0.
    """
    cost = box.cost
    if cost < 0:
        raise ValidationError(f"box {box.id!r} has negative cost {cost}")
    values = box.reward.values()
    if cost == 0:
        return values[-1]
    # Below the support the excess is E[X] - z.
    low = values[0]
    if expected_excess(box.reward, low) <= cost:
        return box.reward.expectation() - cost
    for left, right in zip(values, values[1:]):
        e_left = expected_excess(box.reward, left)
        e_right = expected_excess(box.reward, right)
        if e_right <= cost:
            # Linear between the two support values; invert.
            return left + (e_left - cost) * (right - left) / (e_left - e_right)
    raise InvariantError(f"no reservation value found for box {box.id!r}")  # pragma: no cover


# ---------------------------------------------------------------------------
# Openability semantics shared by the executors and the exact oracle
# ---------------------------------------------------------------------------

def constraint_allows(instance: Instance, opened: Iterable[str], box_id: str) -> bool:
    """May ``box_id`` be opened next, given the opened set (order rule only)?

    line/tree/forest: the parent must be open (roots are always allowed);
    dag: at least one in-neighbour open, in-degree-0 boxes allowed from the
    start; unconstrained: always.
    """
    kind = instance.constraint.kind
    if kind == ConstraintKind.UNCONSTRAINED:
        return True
    opened_set = opened if isinstance(opened, (set, frozenset)) else set(opened)
    parents = instance.constraint.parents().get(box_id, ())
    if kind == ConstraintKind.DAG:
        return not parents or any(p in opened_set for p in parents)
    return not parents or parents[0] in opened_set


def side_allows(instance: Instance, opened: Iterable[str], box_id: str) -> bool:
    """Does the opened set stay side-feasible after adding ``box_id``?"""
    return instance.side.is_feasible(list(opened) + [box_id])


def feasible_next(instance: Instance, opened: Iterable[str]) -> list[str]:
    """Boxes openable next, in instance order."""
    opened_set = opened if isinstance(opened, (set, frozenset)) else set(opened)
    return [
        b.id
        for b in instance.boxes
        if b.id not in opened_set
        and constraint_allows(instance, opened_set, b.id)
        and side_allows(instance, opened_set, b.id)
    ]


def set_feasibility_violation(instance: Instance, ids: Iterable[str]) -> Optional[str]:
    """None when ``ids`` is a feasible set to open (in some order), else a
    message naming the violated constraint."""
    chosen = set(ids)
    for box_id in chosen:
        if box_id not in instance.box_map:
            return f"unknown box {box_id!r}"
    kind = instance.constraint.kind
    parents = instance.constraint.parents()
    if kind in (ConstraintKind.LINE, ConstraintKind.TREE, ConstraintKind.FOREST):
        for box_id in chosen:
            for parent in parents.get(box_id, ()):
                if parent not in chosen:
                    return f"order constraint: box {box_id!r} requires parent {parent!r}"
    elif kind == ConstraintKind.DAG:
        # Peel: the set is openable iff it can be built one box at a time.
        reached: set[str] = set()
        progress = True
        while progress:
            progress = False
            for box_id in sorted(chosen - reached):
                ps = parents.get(box_id, ())
                if not ps or any(p in reached for p in ps):
                    reached.add(box_id)
                    progress = True
        if reached != chosen:
            stuck = sorted(chosen - reached)
            return f"order constraint: boxes {stuck} are unreachable within the set"
    if not instance.side.is_feasible(chosen):
        return f"side constraint {instance.side.kind!r} violated"
    return None


def max_distribution(dists: Sequence[DiscreteDistribution]) -> DiscreteDistribution:
    """Exact distribution of max(X_1, ..., X_k) for independent X_i."""
    if not dists:
        raise ValidationError("max_distribution needs at least one distribution")
    support = sorted({v for d in dists for v in d.values()})
    atoms = []
    prev_cdf = Fraction(0)
    for v in support:
        cdf = Fraction(1)
        for d in dists:
            cdf *= d.cdf(v)
        if cdf > prev_cdf:
            atoms.append((v, cdf - prev_cdf))
        prev_cdf = cdf
    return DiscreteDistribution(tuple(atoms))
