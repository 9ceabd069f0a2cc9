"""Core data model: masks, valuations, instances, serialization."""

import random

import pytest

from groupfair import (
    AgentPartition,
    Allocation,
    Instance,
    MalformedValuationError,
    UnsupportedValuationError,
    Valuation,
    allocation_violations,
    instance_from_json,
    instance_to_json,
    validate,
)
from groupfair.model import bits_of, full_mask, instance_from_dict, instance_to_dict, mask_of


def test_mask_helpers():
    assert full_mask(0) == 0
    assert full_mask(3) == 0b111
    assert mask_of([0, 2, 5]) == 0b100101
    assert bits_of(0b100101) == (0, 2, 5)
    assert bits_of(0) == ()


def test_additive_value_is_a_sum():
    v = Valuation.additive([4, 0, 7, 1])
    assert v.m == 4
    assert v.value(0) == 0
    assert v.value(0b1111) == 12
    assert v.value(0b0101) == 11
    with pytest.raises(ValueError):
        v.value(1 << 4)
    with pytest.raises(ValueError):
        v.value(-1)


def test_binary_desired_mask():
    v = Valuation.binary([1, 0, 1])
    assert v.desired_mask == 0b101
    assert v.value(0b110) == 1
    w = Valuation.binary_from_desired(5, [4, 1])
    assert w.desired_mask == 0b10010
    with pytest.raises(UnsupportedValuationError):
        Valuation.additive([1, 2]).desired_mask


def test_table_lookup_and_missing_entry():
    v = Valuation.table_of(2, {0: 0, 1: 3, 2: 3, 3: 5})
    assert v.value(0b11) == 5
    assert not v.is_additive_like()
    with pytest.raises(MalformedValuationError):
        Valuation.table_of(2, {0: 0}).value(1)


def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        Valuation("fancy", 2, values=(1, 2))


def test_with_zero_good_additive():
    v = Valuation.additive([3, 1]).with_zero_good()
    assert v.m == 3
    assert v.value(0b100) == 0
    assert v.value(0b111) == 4


def test_with_zero_good_table_keeps_values():
    t = Valuation.table_of(2, {0: 0, 1: 2, 2: 2, 3: 3})
    v = t.with_zero_good()
    assert v.m == 3
    for mask in range(4):
        assert v.value(mask) == t.value(mask)
        assert v.value(mask | 0b100) == t.value(mask)


def test_undesire_and_restrict():
    v = Valuation.binary([1, 1, 0])
    assert v.undesire(0).desired_mask == 0b010
    # undesire returns a copy
    assert v.desired_mask == 0b011
    r = Valuation.additive([5, 6, 7]).restrict([2, 0])
    assert r.values == (7, 5)
    with pytest.raises(UnsupportedValuationError):
        Valuation.table_of(1, {0: 0, 1: 1}).restrict([0])


def test_instance_accessors():
    agents = [Valuation.binary([1, 0]), Valuation.binary([0, 1]), Valuation.binary([1, 1])]
    fixed = Instance.fixed(2, agents, [[0, 2], [1]])
    assert fixed.n == 3 and fixed.k == 2 and fixed.is_fixed
    assert fixed.group_of(2) == 0
    var = Instance.variable(2, agents, [2, 1])
    assert var.k == 2 and not var.is_fixed
    with pytest.raises(ValueError):
        var.group_of(0)


def test_allocation_and_partition_shapes():
    alloc = Allocation.of([[0, 2], [1]])
    assert alloc.k == 2
    assert alloc.sizes() == (2, 1)
    assert alloc.goods_lists() == ((0, 2), (1,))

    part = AgentPartition.from_groups([[1], [0, 2]])
    assert part.assignment == (1, 0, 1)
    assert part.sizes() == (1, 2)
    assert part.members(1) == (0, 2)
    assert part.groups_lists() == ((1,), (0, 2))
    with pytest.raises(ValueError):
        AgentPartition.from_groups([[0], [0]])


def test_validate_flags_bad_data():
    # wrong vector length, negative value, out-of-range binary
    bad = Instance.fixed(3, [Valuation("additive", 3, values=(1, 2))], [[0]])
    assert any("length" in s for s in validate(bad))
    bad = Instance.fixed(2, [Valuation.additive([1, -2])], [[0]])
    assert any("negative" in s for s in validate(bad))
    bad = Instance.fixed(2, [Valuation.binary([0, 2])], [[0]])
    assert any("outside" in s for s in validate(bad))


def test_validate_table_monotonicity():
    good = Instance.fixed(2, [Valuation.table_of(2, {0: 0, 1: 1, 2: 2, 3: 2})], [[0]])
    assert validate(good) == []
    drop = Instance.fixed(2, [Valuation.table_of(2, {0: 0, 1: 5, 2: 2, 3: 2})], [[0]])
    assert any("monotonicity" in s for s in validate(drop))
    unnorm = Instance.fixed(2, [Valuation.table_of(2, {0: 1, 1: 1, 2: 1, 3: 1})], [[0]])
    assert any("normalization" in s for s in validate(unnorm))
    holes = Instance.fixed(2, [Valuation.table_of(2, {0: 0, 3: 1})], [[0]])
    assert any("misses" in s for s in validate(holes))


def test_validate_groups():
    agents = [Valuation.binary([1]), Valuation.binary([1])]
    dup = Instance.fixed(1, agents, [[0, 1], [1]])
    assert any("more than one group" in s for s in validate(dup))
    missing = Instance.fixed(1, agents, [[0], []])
    assert any("belong to no group" in s for s in validate(missing))
    short = Instance.variable(1, agents, [1])
    assert any("sum to" in s for s in validate(short))
    assert validate(Instance.variable(1, agents, [1, 1])) == []


def test_allocation_violations():
    assert allocation_violations(3, Allocation.of([[0, 1], [2]])) == []
    assert allocation_violations(3, Allocation.of([[0], [2]]))  # hole
    assert allocation_violations(3, Allocation((0b11, 0b110)))  # overlap
    assert allocation_violations(1, Allocation((0b10,)))  # out of range


def test_json_round_trip():
    inst = Instance.fixed(
        3,
        [
            Valuation.additive([1, 2, 3]),
            Valuation.binary([0, 1, 1]),
            Valuation.table_of(3, {m: m.bit_count() for m in range(8)}),
        ],
        [[0, 1], [2]],
    )
    back = instance_from_json(instance_to_json(inst))
    assert instance_to_dict(back) == instance_to_dict(inst)
    assert back.groups == inst.groups
    assert [v.kind for v in back.agents] == ["additive", "binary", "table"]


def test_json_fractions_scale_per_agent():
    doc = {
        "m": 2,
        "agents": [
            {"id": 0, "kind": "additive", "values": ["1/2", 0.25]},
            {"id": 1, "kind": "additive", "values": [1, 2]},
        ],
        "groups": {"variable": [1, 1]},
    }
    inst = instance_from_dict(doc)
    # 1/2 and 1/4 scale by lcm 4; the second agent is untouched
    assert inst.agents[0].values == (2, 1)
    assert inst.agents[1].values == (1, 2)


@pytest.mark.parametrize(
    "doc,hint",
    [
        ({}, "m"),
        ({"m": 1, "agents": [{"id": 0, "kind": "additive", "values": [1]}]}, "groups"),
        ({"m": 1, "agents": [{"kind": "additive", "values": [1]}], "groups": {"fixed": [[0]]}}, "id"),
        (
            {
                "m": 1,
                "agents": [
                    {"id": 0, "kind": "additive", "values": [1]},
                    {"id": 2, "kind": "additive", "values": [1]},
                ],
                "groups": {"fixed": [[0], [1]]},
            },
            "dense",
        ),
        ({"m": 1, "agents": [{"id": 0, "kind": "additive", "values": [1]}], "groups": {}}, "fixed"),
        ({"m": 1, "agents": [{"id": 0, "kind": "wat", "values": [1]}], "groups": {"fixed": [[0]]}}, "kind"),
    ],
)
def test_bad_documents_raise(doc, hint):
    with pytest.raises(ValueError) as err:
        instance_from_dict(doc)
    assert hint in str(err.value)


def test_bad_json_text():
    with pytest.raises(ValueError):
        instance_from_json("{not json")
    with pytest.raises(ValueError):
        instance_from_json("[1, 2]")


def test_round_trip_fuzz():
    rng = random.Random(11)
    for _ in range(100):
        m = rng.randrange(0, 5)
        n = rng.randrange(1, 5)
        agents = []
        for _ in range(n):
            if rng.random() < 0.5:
                agents.append(Valuation.additive([rng.randrange(0, 9) for _ in range(m)]))
            else:
                agents.append(Valuation.binary([rng.randrange(0, 2) for _ in range(m)]))
        inst = Instance.variable(m, agents, [n])
        back = instance_from_json(instance_to_json(inst, indent=None))
        assert back == inst
