"""Cross-cutting invariants, driven by hypothesis instead of fixed seeds."""

from hypothesis import given, settings
from hypothesis import strategies as st

from groupfair import (
    EF1,
    EF2,
    EFX,
    EFX0,
    Instance,
    Valuation,
    exact1_partition,
    fair_toward,
    instance_from_json,
    instance_to_json,
    is_exact1,
    up_to,
)
from groupfair.model import full_mask
from groupfair.oracle import balanced_allocation_count, balanced_size_vectors, _multinomial

values = st.lists(st.integers(min_value=0, max_value=9), min_size=0, max_size=7)


@st.composite
def valuation_and_split(draw):
    vals = draw(values)
    m = len(vals)
    own = draw(st.integers(min_value=0, max_value=(1 << m) - 1)) if m else 0
    return Valuation.additive(vals), own, full_mask(m) ^ own


@given(valuation_and_split())
def test_envy_hierarchy(data):
    v, own, other = data
    if fair_toward(v, own, other, EFX0):
        assert fair_toward(v, own, other, EFX)
    if fair_toward(v, own, other, EFX):
        assert fair_toward(v, own, other, EF1)
    if fair_toward(v, own, other, EF1):
        assert fair_toward(v, own, other, EF2)


@given(valuation_and_split(), st.integers(min_value=1, max_value=5))
def test_efc_monotone_in_budget(data, c):
    v, own, other = data
    if fair_toward(v, own, other, up_to(c)):
        assert fair_toward(v, own, other, up_to(c + 1))


@given(st.lists(st.integers(min_value=0, max_value=1), min_size=0, max_size=8),
       st.integers(min_value=0))
def test_binary_efx_collapses_to_ef1(bits, raw_own):
    v = Valuation.binary(bits)
    own = raw_own % (1 << v.m) if v.m else 0
    other = full_mask(v.m) ^ own
    assert fair_toward(v, own, other, EFX) == fair_toward(v, own, other, EF1)


@given(values, values)
def test_exact1_both_agents_accept_both_sides(vals1, vals2):
    size = min(len(vals1), len(vals2))
    v1 = Valuation.additive(vals1[:size])
    v2 = Valuation.additive(vals2[:size])
    x, y = exact1_partition(v1, v2)
    assert x & y == 0 and (x | y) == full_mask(size)
    assert is_exact1(v1, (x, y)) and is_exact1(v2, (x, y))


@settings(max_examples=50)
@given(st.lists(values, min_size=1, max_size=4), st.integers(min_value=1, max_value=3))
def test_json_round_trip_identity(rows, k):
    m = len(rows[0])
    agents = [Valuation.additive(row[:m] + [0] * (m - len(row))) for row in rows]
    sizes = [len(agents)] + [0] * (k - 1)
    inst = Instance.variable(m, agents, sizes)
    assert instance_from_json(instance_to_json(inst)) == inst


@given(st.integers(min_value=0, max_value=9), st.integers(min_value=1, max_value=5))
def test_balanced_count_is_sum_of_multinomials(m, k):
    total = sum(_multinomial(m, vec) for vec in balanced_size_vectors(m, k))
    assert balanced_allocation_count(m, k) == total
