"""Fairness predicates: envy relaxations, witnesses, proportionality, balance."""

import random

import pytest

from groupfair import (
    EF,
    EF1,
    EF2,
    EFX,
    EFX0,
    PROP,
    Allocation,
    Instance,
    Notion,
    UnsupportedNotionError,
    Valuation,
    fair_toward,
    is_balanced,
    is_exact1,
    is_fair,
    parse_notion,
    up_to,
)
from groupfair.fairness import agent_verdict, is_fair_for_agent
from groupfair.model import AgentPartition, full_mask


def test_notion_construction_and_str():
    assert str(EF) == "ef"
    assert str(EF1) == "ef1"
    assert str(up_to(3)) == "ef3"
    assert str(EFX0) == "efx0"
    with pytest.raises(ValueError):
        Notion("efc", 0)
    with pytest.raises(ValueError):
        Notion("ef", 1)
    with pytest.raises(ValueError):
        Notion("envy")


@pytest.mark.parametrize("text,notion", [
    ("ef", EF), ("EF1", EF1), ("ef2", EF2), ("ef7", up_to(7)),
    ("efx", EFX), ("efx0", EFX0), ("prop", PROP),
])
def test_parse_notion(text, notion):
    assert parse_notion(text) == notion


def test_parse_notion_rejects_garbage():
    for bad in ("", "ef-1", "efy", "proportional"):
        with pytest.raises(ValueError):
            parse_notion(bad)


def test_fair_toward_additive():
    v = Valuation.additive([5, 3, 1])
    # own {2}=1 vs other {0,1}=8: EF no, EF1 drops the 5 -> 1 >= 3 no, EF2 yes
    assert not fair_toward(v, 0b100, 0b011, EF)
    assert not fair_toward(v, 0b100, 0b011, EF1)
    assert fair_toward(v, 0b100, 0b011, EF2)
    # own {0}=5 vs other {1,2}=4: already EF
    assert fair_toward(v, 0b001, 0b110, EF)


def test_efx_checks_every_positive_good():
    v = Valuation.additive([4, 4, 1])
    # own {2}=1, other {0,1}=8: dropping either 4 leaves 4 > 1
    assert not fair_toward(v, 0b100, 0b011, EFX)
    # EFX binds on the smallest positive good: own {2}=3, other {0,1}=6;
    # dropping the 5 cures envy (EF1) but dropping the 1 leaves 5 > 3
    w = Valuation.additive([5, 1, 3])
    assert fair_toward(w, 0b100, 0b011, EF1)
    assert not fair_toward(w, 0b100, 0b011, EFX)


def test_efx0_vs_efx_on_worthless_goods():
    v = Valuation.additive([2, 0])
    # own empty vs other {0,1}: EFX skips the worthless good 1, EFX0 must
    # survive its removal too and the envy stays
    assert fair_toward(v, 0, 0b11, EFX)
    assert not fair_toward(v, 0, 0b11, EFX0)


def test_binary_fast_path_matches_generic():
    rng = random.Random(5)
    notions = (EF, EF1, EF2, EFX, EFX0)
    for _ in range(300):
        m = rng.randrange(0, 7)
        vals = [rng.randrange(0, 2) for _ in range(m)]
        bin_v = Valuation.binary(vals)
        add_v = Valuation.additive(vals)  # same function, no fast path
        split = rng.randrange(0, 1 << m) if m else 0
        own = split
        other = full_mask(m) ^ split
        for notion in notions:
            assert fair_toward(bin_v, own, other, notion) == fair_toward(add_v, own, other, notion)


def test_efx_on_tables_is_rejected():
    t = Valuation.table_of(1, {0: 0, 1: 1})
    with pytest.raises(UnsupportedNotionError):
        fair_toward(t, 0, 1, EFX)
    with pytest.raises(UnsupportedNotionError):
        fair_toward(t, 0, 1, EFX0)
    # EFc on tables tries every removal set
    assert fair_toward(t, 0, 1, EF1)


def test_table_efc_tries_removal_sets():
    # value jumps only when both goods are present; dropping either one works
    t = Valuation.table_of(2, {0: 0, 1: 0, 2: 0, 3: 9})
    assert fair_toward(t, 0, 0b11, EF1)
    assert not fair_toward(t, 0, 0b11, EF)


def test_prop_needs_whole_allocation():
    with pytest.raises(ValueError):
        fair_toward(Valuation.additive([1]), 0, 1, PROP)


def test_agent_verdict_witnesses():
    v = Valuation.additive([5, 3, 1])
    alloc = Allocation.of([[2], [0, 1]])
    ok, witness = agent_verdict(v, alloc, 0, EF1)
    assert not ok and witness == (1, None)
    ok, witness = agent_verdict(v, alloc, 0, EFX)
    assert not ok and witness == (1, 0)  # smallest offending good
    ok, witness = agent_verdict(v, alloc, 1, EF)
    assert ok and witness is None


def test_agent_verdict_prop():
    v = Valuation.additive([3, 1])
    alloc = Allocation.of([[0], [1]])
    assert agent_verdict(v, alloc, 0, PROP) == (True, None)
    assert agent_verdict(v, alloc, 1, PROP) == (False, None)


def test_is_fair_fixed_groups():
    inst = Instance.fixed(
        2,
        [Valuation.additive([1, 0]), Valuation.additive([0, 1])],
        [[0], [1]],
    )
    report = is_fair(inst, Allocation.of([[0], [1]]), EF)
    assert report.overall and report.witnesses == {}
    report = is_fair(inst, Allocation.of([[1], [0]]), EF)
    assert not report.overall
    assert report.per_agent == (False, False)
    assert report.to_dict()["witnesses"]["0"] == {"group": 1, "good": None}


def test_is_fair_variable_needs_partition():
    inst = Instance.variable(2, [Valuation.binary([1, 1])], [1, 0])
    alloc = Allocation.of([[0], [1]])
    with pytest.raises(ValueError):
        is_fair(inst, alloc, EF1)
    part = AgentPartition((0,), 2)
    assert is_fair(inst, alloc, EF1, part).overall


def test_is_fair_rejects_mismatches():
    inst = Instance.fixed(2, [Valuation.binary([1, 1])], [[0]])
    with pytest.raises(ValueError):
        is_fair(inst, Allocation.of([[0], [1]]), EF1)  # k mismatch
    with pytest.raises(ValueError):
        is_fair(inst, Allocation.of([[0]]), EF1)  # goods not covered
    with pytest.raises(ValueError):
        is_fair(inst, Allocation.of([[0, 1]]), EF1, AgentPartition((0,), 1))


def test_is_fair_for_agent():
    inst = Instance.fixed(
        2,
        [Valuation.additive([1, 0]), Valuation.additive([0, 1])],
        [[0], [1]],
    )
    alloc = Allocation.of([[1], [0]])
    assert is_fair_for_agent(inst, alloc, 0, 0, EF) == (False, (1, None))
    with pytest.raises(ValueError):
        is_fair_for_agent(inst, alloc, 0, 1, EF)


def test_is_exact1():
    v = Valuation.additive([4, 3, 2, 1])
    assert is_exact1(v, (0b1001, 0b0110))  # 5 vs 5
    assert is_exact1(v, (0b0001, 0b1110))  # 4 vs 6, drop one good each way
    assert not is_exact1(v, (0, 0b1111))
    with pytest.raises(ValueError):
        is_exact1(v, (0b0011, 0b0110))


def test_is_balanced():
    assert is_balanced(Allocation.of([[0, 1], [2]]))
    assert not is_balanced(Allocation.of([[0, 1, 2], []]))
    assert is_balanced(AgentPartition((0, 1, 0), 2))
    assert is_balanced([2, 3, 2])
    assert not is_balanced([1, 3])
    assert is_balanced([])


def test_hierarchy_spot_check():
    # one randomized pass; the heavy version lives in the fuzz suites
    rng = random.Random(7)
    for _ in range(200):
        m = rng.randrange(0, 6)
        v = Valuation.additive([rng.randrange(0, 5) for _ in range(m)])
        own = rng.randrange(0, 1 << m) if m else 0
        rest = full_mask(m) ^ own
        if fair_toward(v, own, rest, EFX0):
            assert fair_toward(v, own, rest, EFX)
        if fair_toward(v, own, rest, EFX):
            assert fair_toward(v, own, rest, EF1)
        if fair_toward(v, own, rest, EF1):
            assert fair_toward(v, own, rest, EF2)
