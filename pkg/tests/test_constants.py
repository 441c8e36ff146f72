"""Density constants and bound evaluators."""

import math

import pytest

from quartdens.constants import (
    TABLE_1,
    TABLE_2,
    d4_biquadratic,
    d4_constant,
    d4_unramified_lower,
    grh_ratio_bound,
    grh_ratio_bound_quadratic,
    nonstat_formula,
    nonstat_ratio_bound,
    ratio_observed,
    s4_constant,
)
from quartdens.dirichlet import _l1_primitive
from quartdens.quadfield import build_field


def test_s4_examples():
    v, _ = s4_constant(build_field(-1))
    assert abs(v - 0.01916) < 1e-3 * 0.01916
    v, _ = s4_constant(build_field(2))
    assert abs(v - 0.06125) < 1e-3 * 0.06125
    v, _ = s4_constant(build_field(-510510))
    assert abs(v - 0.02499) < 1e-3 * 0.02499
    with pytest.raises(ValueError):
        s4_constant(build_field(-1), euler_cutoff=50)


def test_s4_tail_honest():
    for d in (-10, 30):
        F = build_field(d)
        v5, tail5 = s4_constant(F, 10**5)
        v6, _ = s4_constant(F, 10**6)
        assert abs(v5 - v6) <= tail5, d


def test_d4_monotone_in_bound():
    F = build_field(-10)
    vals = [d4_constant(F, B)[0] for B in (100, 1000, 10000)]
    assert vals[0] <= vals[1] <= vals[2]
    biq = [d4_biquadratic(F, B) for B in (100, 1000, 10000)]
    assert biq[0] <= biq[1] <= biq[2]


def test_d4_examples_table_quantity():
    # the printed reference values track the biquadratic slice
    F = build_field(-10)
    assert abs(d4_biquadratic(F, 10**4) - 0.03141) <= 0.05 * 0.03141
    F = build_field(30)
    assert abs(d4_biquadratic(F, 10**4) - 0.20786) <= 0.05 * 0.20786


def test_d4_full_exceeds_biquadratic():
    for d in (-10, -3):
        F = build_field(d)
        full, _ = d4_constant(F, 1000)
        biq = d4_biquadratic(F, 1000)
        assert full >= biq, d


def test_d4_unramified_lower():
    F = build_field(-10)
    bare, weighted = d4_unramified_lower(F)
    ref = F.residue * _l1_primitive(-8) * _l1_primitive(5)
    assert abs(bare - ref) < 1e-12
    assert 0 < weighted < bare
    # odd class number: empty sum
    bare1, weighted1 = d4_unramified_lower(build_field(-1))
    assert bare1 == 0.0 and weighted1 == 0.0
    # 7-term sum for d = -210
    F210 = build_field(-210)
    bare7, _ = d4_unramified_lower(F210)
    from quartdens.relext import enumerate_extensions

    exts = [x for x in enumerate_extensions(F210, 1) if x.is_unramified]
    assert len(exts) == 7
    manual = sum(
        F210.residue * _l1_primitive(x.dirichlet_pair[0]) * _l1_primitive(x.dirichlet_pair[1])
        for x in exts
    )
    assert abs(bare7 - manual) < 1e-12


def test_grh_bound_examples():
    v = grh_ratio_bound(2, 40, 2)
    assert abs(v - 1 / math.log(math.log(40)) ** 2) < 1e-14
    assert abs(v - 0.589) < 3e-3
    assert grh_ratio_bound(1, 40, 2) == 0.0
    with pytest.raises(ValueError):
        grh_ratio_bound(2, 10, 2)
    v = grh_ratio_bound_quadratic(build_field(-210))
    assert abs(v - 16 / math.log(math.log(840)) ** 2) < 1e-12
    assert abs(v - 4.39) < 0.01


def test_nonstat_examples():
    F = build_field(-510510)
    from quartdens.arith import omega_y

    assert omega_y(F.D, 17) == 7
    v = nonstat_ratio_bound(F, 17, 1.0)
    assert v == nonstat_formula(64, 2042040, 7, 17, 1.0)
    assert v > 0
    # omega = 0 degenerate branch: radicand >= 1
    ld = math.log(2042040)
    lld = math.log(ld)
    rad = (math.log(1) + math.log(math.log(17))) / lld + 1.0
    assert rad >= 1.0
    assert nonstat_formula(64, 2042040, 0, 17, 1.0) == 64 / (
        lld**2 * ld ** math.sqrt(rad)
    )
    with pytest.raises(ValueError):
        nonstat_ratio_bound(F, 2, 1.0)
    with pytest.raises(ValueError):
        nonstat_ratio_bound(F, 17, 0.0)


def test_nonstat_monotone_with_genus_growth():
    # increasing omega with the genus-tied cl2 = 2^(omega-1) never
    # decreases the bound at these sizes
    vals = [
        nonstat_formula(2 ** (om - 1), 2042040, om, 17, 1.0) for om in range(1, 8)
    ]
    assert all(b >= a for a, b in zip(vals, vals[1:])), vals


def test_ratio_observed_consistency():
    rep = ratio_observed(-10, euler_cutoff=10**5, B=200)
    assert abs(rep.percentage - 100 * rep.d4 / (rep.d4 + rep.s4)) < 1e-12
    assert 0 < rep.percentage < 100
    assert rep.d4_biquadratic <= rep.d4
    assert "nonstat_ratio_bound" in rep.bounds
    assert "grh_ratio_bound" in rep.qualitative


def test_reference_tables_shape():
    assert len(TABLE_1) == 14 and len(TABLE_2) == 13
    assert set(TABLE_1) == {
        s * d for d in (2, 6, 30, 210, 2310, 30030, 510510) for s in (1, -1)
    }
