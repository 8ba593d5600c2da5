from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from pandorabox import (
    BoxSpec,
    ConstraintGraph,
    DiscreteDistribution,
    Instance,
    MatroidSideConstraint,
    ParseError,
    ValidationError,
    dump_instance,
    expected_excess,
    load_instance,
    max_distribution,
    parse_rational,
    validate_instance,
    weitzman_reservation,
)
from pandorabox.instances import figure1

from helpers import brute_max_distribution, rand_dist

F = Fraction


def coin(hi, p=F(1, 2)) -> DiscreteDistribution:
    return DiscreteDistribution.of([(F(hi), p), (F(0), 1 - p)])


MINIMAL_DOC = json.dumps(
    {
        "boxes": [
            {
                "id": "solo",
                "cost": "1",
                "reward": [
                    {"value": "3", "prob": "1/2"},
                    {"value": "0", "prob": "1/2"},
                ],
            }
        ],
        "constraint": {"kind": "unconstrained", "edges": [], "roots": []},
    }
)


class TestParseRational:
    def test_forms(self):
        assert parse_rational("1/2") == F(1, 2)
        assert parse_rational("0.25") == F(1, 4)
        assert parse_rational("3") == 3
        assert parse_rational(7) == 7
        assert parse_rational("-2/3") == F(-2, 3)

    def test_rejects_garbage(self):
        with pytest.raises(ParseError):
            parse_rational("one half")
        with pytest.raises(ParseError):
            parse_rational("1/0")
        with pytest.raises(ParseError):
            parse_rational(0.25)


class TestLoadInstance:
    def test_minimal_document(self):
        inst = load_instance(MINIMAL_DOC)
        assert inst.n == 1
        assert inst.boxes[0].cost == 1
        assert inst.boxes[0].reward.atoms == ((F(0), F(1, 2)), (F(3), F(1, 2)))

    def test_builtin_diamond_document_round_trips(self):
        inst = figure1(F(3, 2))
        assert inst.n == 4
        again = load_instance(dump_instance(inst))
        assert again == inst

    def test_bad_probability_sum_names_box(self):
        doc = json.loads(MINIMAL_DOC)
        doc["boxes"][0]["reward"][0]["prob"] = "2/5"
        with pytest.raises(ValidationError, match="solo"):
            load_instance(json.dumps(doc))

    def test_cycle_detected(self):
        doc = {
            "boxes": [
                {"id": "a", "cost": "0", "reward": [{"value": "1", "prob": "1"}]},
                {"id": "b", "cost": "0", "reward": [{"value": "1", "prob": "1"}]},
            ],
            "constraint": {"kind": "tree", "edges": [["a", "b"], ["b", "a"]]},
        }
        with pytest.raises(ValidationError):
            load_instance(json.dumps(doc))

    def test_dangling_edge_named(self):
        doc = json.loads(MINIMAL_DOC)
        doc["constraint"] = {"kind": "tree", "edges": [["solo", "ghost"]]}
        with pytest.raises(ValidationError, match="ghost"):
            load_instance(json.dumps(doc))

    def test_reserved_prefix_rejected(self):
        doc = json.loads(MINIMAL_DOC)
        doc["boxes"][0]["id"] = "__root__"
        with pytest.raises(ValidationError, match="reserved"):
            load_instance(json.dumps(doc))

    def test_negative_cost_rejected_by_default(self):
        doc = json.loads(MINIMAL_DOC)
        doc["boxes"][0]["cost"] = "-1"
        with pytest.raises(ValidationError, match="negative"):
            load_instance(json.dumps(doc))
        inst = Instance(
            boxes=(BoxSpec("solo", F(-1), coin(3)),),
        )
        validate_instance(inst, allow_negative_costs=True)

    def test_side_constraint_round_trip(self):
        inst = load_instance(MINIMAL_DOC)
        side = MatroidSideConstraint.knapsack({"solo": (1,)}, (1,))
        inst = Instance(boxes=inst.boxes, constraint=inst.constraint, side=side)
        again = load_instance(dump_instance(inst))
        assert again.side == side

    def test_capacity_bound_enforced(self):
        inst = load_instance(MINIMAL_DOC)
        side = MatroidSideConstraint.knapsack({"solo": (1,)}, (11,))
        with pytest.raises(ValidationError, match="exceeds"):
            validate_instance(Instance(boxes=inst.boxes, side=side))


class TestParserFuzz:
    @pytest.mark.parametrize(
        "mutate",
        [
            lambda d: d.__setitem__("boxes", {}),
            lambda d: d.__setitem__("boxes", []),
            lambda d: d["boxes"].__setitem__(0, "not a box"),
            lambda d: d["boxes"][0].pop("cost"),
            lambda d: d["boxes"][0].__setitem__("id", 7),
            lambda d: d["boxes"][0].__setitem__("reward", []),
            lambda d: d["boxes"][0]["reward"][0].pop("prob"),
            lambda d: d["boxes"][0].__setitem__("cost", 0.25),
            lambda d: d.__setitem__("constraint", "line"),
            lambda d: d.__setitem__("constraint", {"kind": "spiral"}),
            lambda d: d.__setitem__(
                "constraint", {"kind": "line", "edges": [["solo"]]}
            ),
            lambda d: d.__setitem__("side", {"kind": "mystery"}),
            lambda d: d.__setitem__("side", {"kind": "knapsack"}),
        ],
    )
    def test_malformed_documents_raise_package_errors(self, mutate):
        from pandorabox import PandoraError

        doc = json.loads(MINIMAL_DOC)
        mutate(doc)
        with pytest.raises(PandoraError):
            load_instance(json.dumps(doc))

    def test_non_json_input(self):
        with pytest.raises(ParseError):
            load_instance("{not json")


class TestExpectedExcess:
    def test_worked_values(self):
        dist = coin(3)
        assert expected_excess(dist, F(1)) == 1  # 1/2 * (3 - 1)
        assert expected_excess(dist, F(3)) == 0
        assert expected_excess(dist, F(-1)) == F(5, 2)  # E[X] - z below support

    def test_matches_direct_sum_on_random_dists(self):
        rng = random.Random(101)
        for _ in range(200):
            dist = rand_dist(rng)
            z = F(rng.randint(-4, 10), rng.randint(1, 4))
            direct = sum(
                (p * (v - z) for v, p in dist.atoms if v > z), start=F(0)
            )
            assert expected_excess(dist, z) == direct

    @given(st.integers(-20, 40), st.integers(-20, 40), st.integers(1, 8))
    def test_lipschitz_and_monotone(self, a_num, b_num, den):
        rng = random.Random(a_num * 1000 + b_num + den)
        dist = rand_dist(rng)
        a, b = sorted((F(a_num, den), F(b_num, den)))
        drop = expected_excess(dist, a) - expected_excess(dist, b)
        assert F(0) <= drop <= b - a


class TestWeitzmanReservation:
    def test_worked_values(self):
        assert weitzman_reservation(BoxSpec("a", F(1), coin(3))) == 1
        assert weitzman_reservation(BoxSpec("a", F(0), DiscreteDistribution.point(2))) == 2
        assert weitzman_reservation(BoxSpec("a", F(2), DiscreteDistribution.point(1))) == -1

    def test_root_property_and_minimality(self):
        rng = random.Random(7)
        for _ in range(200):
            box = BoxSpec("a", F(rng.randint(0, 6), rng.randint(1, 3)), rand_dist(rng))
            zeta = weitzman_reservation(box)
            assert expected_excess(box.reward, zeta) == box.cost
            for delta in (F(1, 7), F(1, 64), F(3, 5)):
                if box.cost > 0:
                    assert expected_excess(box.reward, zeta - delta) > box.cost
                else:
                    # cost 0: the smallest zero of the excess is the top value
                    assert zeta == box.reward.max_value()


class TestMaxDistribution:
    def test_identity(self):
        d = DiscreteDistribution.point(0)
        assert max_distribution([d]) == d

    def test_two_coins(self):
        d = coin(1)
        assert max_distribution([d, d]).atoms == ((F(0), F(1, 4)), (F(1), F(3, 4)))

    def test_point_vs_coin(self):
        out = max_distribution([DiscreteDistribution.point(2), coin(3)])
        assert out.atoms == ((F(2), F(1, 2)), (F(3), F(1, 2)))

    def test_against_product_enumeration(self):
        rng = random.Random(21)
        for _ in range(80):
            dists = [rand_dist(rng) for _ in range(rng.randint(1, 4))]
            result = max_distribution(dists)
            assert list(result.atoms) == brute_max_distribution(dists)
            assert sum(result.probs()) == 1


class TestDistributionValidation:
    def test_rejects_bad_atoms(self):
        with pytest.raises(ValidationError):
            DiscreteDistribution(((F(1), F(1, 2)),))  # sums to 1/2
        with pytest.raises(ValidationError):
            DiscreteDistribution(((F(-1), F(1)),))  # negative value
        with pytest.raises(ValidationError):
            DiscreteDistribution(((F(2), F(1, 2)), (F(1), F(1, 2))))  # not sorted

    def test_of_merges_duplicates(self):
        d = DiscreteDistribution.of([(1, "1/4"), (1, "1/4"), (0, "1/2")])
        assert d.atoms == ((F(0), F(1, 2)), (F(1), F(1, 2)))


class TestConstraintValidation:
    def test_line_must_chain(self):
        boxes = (
            BoxSpec("a", F(0), coin(1)),
            BoxSpec("b", F(0), coin(1)),
            BoxSpec("c", F(0), coin(1)),
        )
        good = ConstraintGraph("line", (("a", "b"), ("b", "c")))
        validate_instance(Instance(boxes=boxes, constraint=good))
        branching = ConstraintGraph("line", (("a", "b"), ("a", "c")))
        with pytest.raises(ValidationError, match="branches"):
            validate_instance(Instance(boxes=boxes, constraint=branching))

    def test_multiple_parents_rejected_for_tree(self):
        boxes = (
            BoxSpec("a", F(0), coin(1)),
            BoxSpec("b", F(0), coin(1)),
            BoxSpec("c", F(0), coin(1)),
        )
        graph = ConstraintGraph("tree", (("a", "c"), ("b", "c")))
        with pytest.raises(ValidationError, match="multiple parents"):
            validate_instance(Instance(boxes=boxes, constraint=graph))

    def test_dag_allows_multiple_parents(self):
        inst = figure1()
        assert inst.constraint.kind == "dag"
        validate_instance(inst)
