"""Moment statistics, the omega census, and Chebyshev contracts."""

import math
import os

import numpy as np
import pytest

from quartdens.arith import enumerate_fundamental_discriminants, omega_y, prime_table
from quartdens.dirichlet import QuadChar, l1_value, quadratic_characters_mod
from quartdens.stats import (
    exceptional_fraction,
    family_log_l1_truncated,
    lower_bound_proportion,
    omega_census,
    second_moment,
    theoretical_moments,
    typical_chi_experiment,
)

# frozen at first computation (self-oracle regression fixtures)
MOMENT_FIXTURES = {
    15015: (0.30198040383975355, 31),
    255255: (0.31388206762304416, 63),
    4849845: (0.32104649106951394, 127),
    111546435: (0.32513887981242745, 255),  # 3*5*7*11*13*17*19*23
}

# designed ladder: smallest odd squarefree product of om primes >= 7e7
# built from the smallest odd primes; sizes within a factor 1.6
LADDER = ((2, 70000053), (3, 70000005), (4, 70000035), (5, 70001085))


def test_second_moment_prime_modulus():
    D = 100003
    rep = second_moment(D, 10, T=10**4)
    assert rep.family_size == 1
    ref = math.log(l1_value(QuadChar(D, D if D % 4 == 1 else -D))) ** 2
    assert abs(rep.second_moment_exact - ref) < 1e-12


def test_second_moment_fixtures_and_agreement():
    for D, (val, nV) in MOMENT_FIXTURES.items():
        if D > 10**6:
            continue  # the giant fixture runs in the acceptance suite
        rep = second_moment(D, 100, T=10**6)
        assert rep.family_size == nV
        assert abs(rep.second_moment_exact - val) < 1e-9
        assert abs(rep.second_moment_exact - rep.second_moment_truncated) <= 0.1


def test_family_truncated_logs_match_scalar_path():
    from quartdens.dirichlet import log_l1_truncated

    fam = quadratic_characters_mod(1155)
    vec = family_log_l1_truncated(fam, 10**4)
    for chi, v in zip(fam.V, vec):
        assert abs(v - log_l1_truncated(chi, 10**4)) < 1e-12


def test_moment_envelope_fields():
    rep = second_moment(15015, 100, T=10**5)
    lld = math.log(math.log(15015))
    om = omega_y(15015, 100)
    ref = lld * (math.log(om) + math.log(math.log(100))) + lld**2 / 2**om
    assert abs(rep.bound_envelope - ref) < 1e-12
    with pytest.raises(ValueError):
        second_moment(15015, 10**6)


def test_lower_bound_proportion_chebyshev():
    for D in (15015, 255255):
        thr, frac = lower_bound_proportion(D, 2, 100)
        assert frac >= 1 - 1 / 4
        thr1, frac1 = lower_bound_proportion(D, 1, 100)
        assert frac1 >= 0.0
    thr10, frac10 = lower_bound_proportion(15015, 10, 100)
    assert frac10 == 1.0  # no character is that small at desk scale


def test_theoretical_moments():
    mean, var = theoretical_moments(10)
    assert abs(mean - (1 / 3 + 1 / 4 + 1 / 6 + 1 / 8)) < 1e-14
    assert abs(mean - 0.875) < 1e-14
    terms = [1 / (p + 1) for p in (2, 3, 5, 7)]
    assert abs(var - sum(t * (1 - t) for t in terms)) < 1e-14


def test_census_brute_force_small():
    st = omega_census(10**4, 10)
    vals = [omega_y(D, 10) for D in enumerate_fundamental_discriminants(10**4)]
    mean = sum(vals) / len(vals)
    var = sum((v - mean) ** 2 for v in vals) / len(vals)
    assert st.count == len(vals)
    assert abs(st.empirical_mean - mean) < 1e-12
    assert abs(st.empirical_variance - var) < 1e-10
    hist = np.bincount(vals)
    assert tuple(hist) == st.histogram[: len(hist)]


def test_census_million():
    st = omega_census(10**6, 10)
    assert abs(st.empirical_mean - 0.875) <= 0.01
    assert abs(st.empirical_variance - st.theoretical_variance) <= 0.01
    st4 = omega_census(10**4, 10)
    assert abs(st.empirical_mean - st.theoretical_mean) < abs(
        st4.empirical_mean - st4.theoretical_mean
    )


def test_census_requires_y_below_sqrt():
    with pytest.raises(ValueError):
        omega_census(100, 11)


def test_census_cache_roundtrip(tmp_path):
    path = os.path.join(tmp_path, "census.bin")
    a = omega_census(10**4, 10, cache_path=path)
    assert os.path.exists(path)
    with open(path, "rb") as fh:
        head = fh.read(16)
    assert head[:4] == b"QDEN"
    b = omega_census(10**4, 10, cache_path=path)
    assert a.count == b.count and a.histogram == b.histogram
    assert abs(a.empirical_mean - b.empirical_mean) < 1e-12
    assert abs(a.empirical_variance - b.empirical_variance) < 1e-12
    # mismatched parameters must not reuse the file
    c = omega_census(10**4, 7, cache_path=os.path.join(tmp_path, "other.bin"))
    assert c.Y == 7


def test_exceedance_chebyshev():
    st = omega_census(10**6, 13)  # Y = log(1e6) rounded down
    for k in (1.5, 2, 3):
        assert st.exceedance(k) <= 1 / k**2 + 0.01
    assert exceptional_fraction(10**6, 2) <= 0.26
    assert exceptional_fraction(10**6, 3) <= 0.121


def test_typical_chi_experiment():
    s = typical_chi_experiment(10**4, sample=8, c=1.0, eps=0.05)
    assert len(s.sample) == 8 and len(s.fractions) == 8
    assert s.median_fraction == 1.0  # frozen at first computation
    # c large: threshold below every value
    s2 = typical_chi_experiment(10**4, sample=4, c=50.0)
    assert s2.min_fraction == 1.0
    # chebyshev-backed proportion at k = 3 on the sampled moduli
    for D in s.sample[:2]:
        _, frac = lower_bound_proportion(abs(D), 3, min(100, abs(D)))
        assert frac >= 8 / 9


def test_moment_ladder_ranking():
    vals = []
    for om, D in LADDER:
        rep = second_moment(D, 100, T=10**4)
        assert rep.family_size == 2**om - 1
        vals.append(rep.second_moment_exact)
    assert all(a > b for a, b in zip(vals, vals[1:])), vals


def test_brun_titchmarsh_sanity():
    # pi(x+y; q, a) - pi(x; q, a) <= 2y / (phi(q) log(y/q))
    primes = prime_table(300_000).upto(300_000)

    def pi_qa(z, q, a):
        sel = primes[primes <= z]
        return int(np.sum(np.mod(sel, q) == a))

    from math import gcd, log

    for q, phi in ((3, 2), (4, 2), (5, 4)):
        for a in range(1, q):
            if gcd(a, q) != 1:
                continue
            for x in (0, 10**4):
                for y in (10**3, 10**4, 10**5):
                    lhs = pi_qa(x + y, q, a) - pi_qa(x, q, a)
                    rhs = 2 * y / (phi * log(y / q))
                    assert lhs <= rhs, (q, a, x, y, lhs, rhs)
