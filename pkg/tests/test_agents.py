import pytest
from hypothesis import given, strategies as st

from classical_sd.agents import (
    BuyerUnit,
    Consumer,
    SellerUnit,
    unit_cost,
    unit_demand,
    unit_supply,
    valuation,
)

money = st.floats(min_value=0, max_value=1e6, allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize(
    "recipe, prices, expected",
    [([2, 3], [1, 2], 8.0), ([0, 0, 0], [4, 5, 6], 0.0), ([1, 1, 1], [0.5, 0.25, 0.25], 1.0)],
)
def test_unit_cost(recipe, prices, expected):
    assert unit_cost(recipe, prices) == expected


def test_unit_cost_dimension_mismatch_names_lengths():
    with pytest.raises(ValueError, match="length 2.*length 3"):
        unit_cost([1, 2], [1, 2, 3])


@pytest.mark.parametrize(
    "w, h, p, expected",
    [(100, [1, 0], [30, 50], 70.0), (100, [0, 0, 0], [9, 9, 9], 100.0), (10, [1, 1], [8, 7], -5.0)],
)
def test_valuation(w, h, p, expected):
    assert valuation(w, h, p) == expected


def test_valuation_rejects_bad_inputs():
    with pytest.raises(ValueError, match="dimension mismatch"):
        valuation(10, [1, 0], [1])
    with pytest.raises(ValueError, match="0 or 1"):
        valuation(10, [0.5, 0], [1, 1])
    with pytest.raises(ValueError, match="wealth"):
        valuation(-1, [0], [1])


@pytest.mark.parametrize("v, p, expected", [(70, 50, 1), (50, 50, 1), (-5, 0, 0)])
def test_unit_demand(v, p, expected):
    assert unit_demand(v, p) == expected


@pytest.mark.parametrize("c, p, expected", [(3, 5, 1), (5, 5, 1), (9, 5, 0)])
def test_unit_supply(c, p, expected):
    assert unit_supply(c, p) == expected


@given(v=money, p1=money, p2=money)
def test_unit_demand_nonincreasing_in_price(v, p1, p2):
    lo, hi = sorted((p1, p2))
    assert unit_demand(v, lo) >= unit_demand(v, hi)
    assert unit_demand(lo, v) <= unit_demand(hi, v)


@given(c=money, p1=money, p2=money)
def test_unit_supply_nondecreasing_in_price(c, p1, p2):
    lo, hi = sorted((p1, p2))
    assert unit_supply(c, lo) <= unit_supply(c, hi)
    assert unit_supply(lo, c) >= unit_supply(hi, c)


@given(
    w=st.integers(0, 10**6),
    delta=st.integers(0, 10**6),
    hp=st.lists(st.tuples(st.integers(0, 1), st.integers(0, 10**4)), min_size=1, max_size=6),
)
def test_valuation_linear(w, delta, hp):
    # integer-valued money keeps the identities exact in floating point
    h = [x for x, _ in hp]
    p = [y for _, y in hp]
    assert valuation(w + delta, h, p) == valuation(w, h, p) + delta
    for k, flag in enumerate(h):
        bumped = list(p)
        bumped[k] += delta
        assert valuation(w, h, bumped) == valuation(w, h, p) - flag * delta


@given(
    ap=st.lists(st.tuples(st.integers(0, 100), st.integers(0, 1000)), min_size=1, max_size=6),
    lam=st.integers(0, 50),
)
def test_unit_cost_homogeneous(ap, lam):
    a = [x for x, _ in ap]
    p = [y for _, y in ap]
    assert unit_cost(a, [lam * y for y in p]) == lam * unit_cost(a, p)


def test_seller_unit_forms_are_exclusive():
    assert SellerUnit(cost=4.0).cost_at() == 4.0
    assert SellerUnit(recipe=(2, 3)).cost_at([1, 2]) == 8.0
    with pytest.raises(ValueError):
        SellerUnit(recipe=(1,), cost=1.0)
    with pytest.raises(ValueError):
        SellerUnit()


def test_buyer_unit():
    assert BuyerUnit(100, (1, 0)).value_at([30, 50]) == 70.0


def test_consumer_demands_follow_hierarchy():
    # good 0 is water, good 1 is diamonds; water comes first when valuing diamonds
    c = Consumer(wealth=10, hierarchy=((0, 0), (1, 0)))
    assert c.demands([4, 5]) == [1, 1]
    assert c.demands([4, 7]) == [1, 0]
    assert c.demands([11, 1]) == [0, 0]


def test_consumer_rejects_self_urgency():
    with pytest.raises(ValueError, match="not more urgent than itself"):
        Consumer(wealth=1, hierarchy=((1, 0), (0, 0)))
