import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meanorder import (
    MIN,
    BlackBox,
    BudgetError,
    DomainError,
    Explicit,
    Geometric,
    GiniMean,
    HardyBudget,
    HardyEstimate,
    InconsistencyError,
    PowerLaw,
    check_ratio_monotonicity,
    hardy_lower_bound,
    hardy_ratio,
    hardy_sandwich,
    known_constant,
)
from meanorder.hardy import default_families

AM, GM, PM_HALF = GiniMean.of(1, 0), GiniMean.of(0, 0), GiniMean.of(0.5, 0)

# prefix means written out directly, independent of the streaming code
DIRECT = {
    AM: lambda v: np.cumsum(v) / np.arange(1, v.size + 1),
    GM: lambda v: np.exp(np.cumsum(np.log(v)) / np.arange(1, v.size + 1)),
    PM_HALF: lambda v: (np.cumsum(np.sqrt(v)) / np.arange(1, v.size + 1)) ** 2,
}


def direct_ratio(m, v):
    return DIRECT[m](v).sum() / v.sum()


def test_single_term():
    assert hardy_ratio(AM, Explicit((1.0,))) == 1.0
    assert hardy_ratio(GM, Explicit((7.5,))) == pytest.approx(1.0, rel=1e-15)


@pytest.mark.parametrize("m", [AM, GM, PM_HALF])
@pytest.mark.parametrize("family", [PowerLaw(0.2, 5000), Geometric(0.999, 5000), Explicit((3.0, 1e-3, 40.0, 2.0))])
def test_matches_direct_summation(m, family):
    v = np.exp(np.concatenate(list(family.log_chunks())))
    assert hardy_ratio(m, family) == pytest.approx(direct_ratio(m, v), rel=1e-12)


def test_streaming_across_chunks():
    fam = PowerLaw(0.3, 3000)
    v = np.exp(np.concatenate(list(fam.log_chunks())))
    small = np.concatenate(list(fam.log_chunks(chunk=7)))
    assert np.allclose(np.exp(small), v, rtol=0, atol=0)
    chunked = Explicit(tuple(v))
    assert hardy_ratio(PM_HALF, chunked) == pytest.approx(direct_ratio(PM_HALF, v), rel=1e-12)


def test_reference_values_at_1e5_terms():
    fam = PowerLaw(0.01, 100_000)
    assert 2.2 < hardy_ratio(GM, fam) < math.e
    assert 3.0 < hardy_ratio(PM_HALF, fam) < 4.0


def test_min_on_decreasing_sequence_is_one():
    for fam in (PowerLaw(0.5, 10_000), Geometric(0.9, 200)):
        assert hardy_ratio(MIN, fam) == pytest.approx(1.0, rel=1e-12)


def test_full_tail_is_smaller_and_monotone_in_terms():
    ratios = [hardy_ratio(GM, PowerLaw(0.1, n), tail=True) for n in (10, 100, 1000, 10_000)]
    assert ratios == sorted(ratios)
    assert hardy_ratio(GM, PowerLaw(0.1, 1000), tail=True) < hardy_ratio(GM, PowerLaw(0.1, 1000))
    fam = Geometric(0.5, 60)
    assert hardy_ratio(AM, fam, tail=True) == pytest.approx(hardy_ratio(AM, fam), rel=1e-15)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=30),
    st.floats(-3, 3), st.floats(-3, 3), st.floats(1e-3, 1e3),
)
def test_scale_invariance(entries, p, q, lam):
    m = GiniMean.of(p, q)
    base = hardy_ratio(m, Explicit(tuple(entries)))
    scaled = hardy_ratio(m, Explicit(tuple(lam * x for x in entries)))
    assert scaled == pytest.approx(base, rel=1e-12)


def test_naive_blackbox_budget():
    slow = BlackBox(np.median, "median")
    assert hardy_ratio(slow, Explicit((4.0, 1.0, 9.0))) == pytest.approx((4 + 2.5 + 4) / 14)
    with pytest.raises(BudgetError):
        hardy_ratio(slow, PowerLaw(0.5, 100), naive_terms=50)


def test_families_validate():
    with pytest.raises(DomainError):
        PowerLaw(0.0, 10)
    with pytest.raises(DomainError):
        Geometric(1.0, 10)
    with pytest.raises(DomainError):
        Explicit((1.0, -1.0))
    with pytest.raises(DomainError):
        PowerLaw(0.1, 0)


SMALL = HardyBudget(terms=20_000, grid_terms=2_000, grid_points=10, refine_steps=6)


def test_lower_bound_is_reproduced_by_witness():
    est = hardy_lower_bound(GM, SMALL)
    w = est.witness
    fam = PowerLaw(w["epsilon"], w["terms"]) if w["kind"] == "powerlaw" else Geometric(w["ratio"], w["terms"])
    assert hardy_ratio(GM, fam) == est.lower
    assert est.to_dict()["N"] == 20_000
    assert hardy_lower_bound(GM, SMALL) == est


def test_lower_bound_grows_with_terms():
    small = hardy_lower_bound(PM_HALF, SMALL, ("powerlaw",))
    large = hardy_lower_bound(PM_HALF, HardyBudget(200_000, 2_000, 10, 6), ("powerlaw",))
    assert small.lower <= large.lower < 4.0


def test_blackbox_estimates_are_budget_limited():
    est = hardy_lower_bound(MIN, HardyBudget(terms=500_000, grid_terms=1000, grid_points=4, refine_steps=2))
    assert est.budget_limited
    assert est.lower <= 1 + 1e-3


def test_unknown_family_kind():
    with pytest.raises(DomainError):
        hardy_lower_bound(GM, SMALL, ("harmonic",))


def test_sandwich():
    lo = HardyEstimate("gini:0,0", 2.6)
    assert hardy_sandwich(lo, known_constant(PM_HALF, 4.0)) == (2.6, 4.0)
    assert hardy_sandwich(lo, lo) == (2.6, math.inf)
    with pytest.raises(InconsistencyError):
        hardy_sandwich(HardyEstimate("gini:1,0", 11.0), known_constant(PM_HALF, 4.0))
    with pytest.raises(InconsistencyError):
        HardyEstimate("x", 2.0, 1.0)


def test_ratio_monotonicity():
    rep = check_ratio_monotonicity(trials=20, seed=4, families=default_families(2000))
    assert rep.ok and rep.checks > 0


def test_arithmetic_mean_bound_is_large_at_default_budget():
    # partial arithmetic means of n**-(1+eps) sum like a harmonic series
    est = hardy_lower_bound(AM, HardyBudget(), ("powerlaw",))
    assert est.lower > 10
