"""Quadratic extensions L/F: enumeration, relative discriminants,
Hecke characters, residue ratios.

The relative-discriminant 2-adic analysis is validated against sympy's
round_two maximal-order discriminant through |D_L| = N(d_{L/F}) D_F^2,
and Hecke coefficients against degree-one prime counts from factoring
the quartic minimal polynomial mod p.
"""

import math
import random

import numpy as np
import pytest

from quartdens.arith import is_squarefree
from quartdens.dirichlet import QuadChar, _l1_primitive, l2_value
from quartdens.ideals import elt_conj, elt_mul, elt_norm, elt_trace
from quartdens.quadfield import build_field, ideal_counts, prime_ideals_up_to
from quartdens.relext import (
    RelQuadExt,
    _hecke_coefficients,
    _is_square_elt,
    biquadratic_extensions,
    biquadratic_up_to,
    enumerate_extensions,
    field_context,
    hecke_char,
    relative_discriminant,
    residue_ratio,
    zeta_l_at_2,
)


def test_biquadratic_w_set():
    W = biquadratic_extensions(build_field(-10))
    assert len(W) == 3  # 2^omega(10) - 1 unordered factorizations
    pairs = {tuple(sorted(x.dirichlet_pair)) for x in W}
    assert (-8, 5) in pairs  # the unramified one
    un = [x for x in W if x.rel_disc_norm == 1]
    assert len(un) == 1 and un[0].is_unramified
    # boundary: d = -1 admits no rational factorization
    assert biquadratic_extensions(build_field(-1)) == []
    assert len(biquadratic_extensions(build_field(-3))) == 1
    assert len(biquadratic_extensions(build_field(-210))) == 2 ** 4 - 1


def test_conductor_discriminant_identity():
    for d in (-10, -210, 15, 34, -1, 105):
        F = build_field(d)
        for ext in biquadratic_up_to(F, 500)[0]:
            D1, D2 = ext.dirichlet_pair
            assert ext.rel_disc_norm * abs(F.D) == abs(D1 * D2), (d, D1, D2)
            # chi_1 chi_2 = chi_F as characters
            from quartdens.arith import kronecker

            for n in range(1, 60):
                if math.gcd(n, 2 * D1 * D2 * F.D) == 1:
                    assert kronecker(D1, n) * kronecker(D2, n) == kronecker(F.D, n)


def test_relative_discriminant_examples():
    F = build_field(-10)
    assert relative_discriminant(F, (5, 0)) == 1
    assert relative_discriminant(F, (2, 0)) == 4
    with pytest.raises(ValueError):
        relative_discriminant(F, (0, 0))
    with pytest.raises(ValueError):
        relative_discriminant(F, (4, 0))  # square


def _omega_to_sqrtd(beta, d, D):
    """beta in omega_D coordinates -> (a, b, den): (a + b sqrt d)/den."""
    x, y = beta
    if D % 4 == 0:
        return x + 2 * d * y, y, 1
    return 2 * x + d * y, y, 2


def _quartic_min_poly_coeffs(beta, d, D):
    """Monic integer quartic for a generator of Q(sqrt(beta)):
    sqrt(beta) itself when beta is integral over Z[sqrt(d)], else the
    doubled generator 2 sqrt(beta)."""
    a, b, den = _omega_to_sqrtd(beta, d, D)
    if den == 2 and a % 2 == 0 and b % 2 == 0:
        a, b, den = a // 2, b // 2, 1
    if den == 1:
        return [1, 0, -2 * a, 0, a * a - b * b * d]
    # theta = 2 sqrt(beta): theta^4 - 4a theta^2 + 4(a^2 - d b^2)
    return [1, 0, -4 * a, 0, 4 * (a * a - b * b * d)]


@pytest.mark.parametrize(
    "d,beta",
    [
        (-1, (-3, -2)),   # 1 - 2i, norm 5
        (-1, (-1, -1)),   # 1 - i, norm 2
        (-1, (-7, -4)),   # norm 17
        (-3, (5, 4)),     # norm 13
        (-3, (3, 2)),     # norm 3
        (-10, (0, 1)),    # omega = (-40+sqrt(-40))/2, norm 10 class
        (2, (-3, 1)),     # fundamental unit 1 + sqrt(2)
        (5, (-2, 1)),     # golden ratio unit
        (34, (-369, 5)),  # exotic 2-torsion twist generator
        (15, (-6, -5)),
    ],
)
def test_relative_discriminant_round_two_oracle(d, beta):
    sympy = pytest.importorskip("sympy")
    from sympy import QQ, Poly, Symbol
    from sympy.polys.numberfields.basis import round_two

    F = build_field(d)
    nd = relative_discriminant(F, beta)
    x = Symbol("x")
    _, _, c2, _, c0 = _quartic_min_poly_coeffs(beta, d, F.D)
    # scaling beta by s^2 fixes the field; some polynomials hit a sympy
    # round_two defect (output fails disc(poly) = index^2 * disc(field)),
    # so scan scales until the oracle output passes that sanity check
    disc = None
    for s in (1, 9, 25, 49):
        p2, p0 = s * c2, s * s * c0
        poly = Poly(x**4 + p2 * x**2 + p0, x, domain=QQ)
        poly_disc = 16 * p0 * (p2 * p2 - 4 * p0) ** 2
        try:
            _, cand = round_two(poly)
        except Exception:
            continue
        cand = int(cand)
        if poly_disc % cand == 0:
            q = poly_disc // cand
            r = math.isqrt(abs(q))
            if q > 0 and r * r == q:
                disc = cand
                break
    if disc is None:
        pytest.skip("sympy round_two failed on every generator scale")
    assert abs(disc) == nd * F.D * F.D, (d, beta, disc, nd)


def test_unramified_counts_spot():
    for d in (-10, -210, 30, 34, 210, -5460 // 60):  # last: -91
        F = build_field(d)
        got = sum(1 for x in enumerate_extensions(F, 1) if x.is_unramified)
        assert got == F.cl2 - 1, d


def test_finite_vs_everywhere_unramified_real():
    # d = 30: norm +1 unit, narrow strictly bigger than wide
    F = build_field(30)
    exts = enumerate_extensions(F, 1)
    assert sum(1 for x in exts if x.finite_unramified) == 3
    assert sum(1 for x in exts if x.is_unramified) == 1 == F.cl2 - 1


def test_enumeration_linear_growth():
    for d in (-10, -1):
        F = build_field(d)
        ratios = []
        for Z in (100, 400, 1600):
            n = len(enumerate_extensions(F, Z))
            ratios.append(n / Z)
        # linear-count model: ratios stabilize
        assert abs(ratios[2] - ratios[1]) < 0.25 * ratios[1], (d, ratios)


def test_enumeration_never_emits_squares_or_duplicates():
    for d in (-10, 15, -1):
        F = build_field(d)
        ctx = field_context(d)
        exts = enumerate_extensions(F, 200)
        for i, a in enumerate(exts):
            assert _is_square_elt(a.beta, F.D) is None
            for b in exts[i + 1 :]:
                prod = elt_mul(a.beta, b.beta, F.D)
                assert _is_square_elt(prod, F.D) is None, (d, a.beta, b.beta)


def test_hecke_matches_dirichlet_factorization_biquadratic():
    # chi on split primes multiplies to the right Dirichlet data
    from quartdens.arith import kronecker

    for d in (-10, -5, 15):
        F = build_field(d)
        for ext in biquadratic_extensions(F):
            D1, D2 = ext.dirichlet_pair
            for P in prime_ideals_up_to(F, 200):
                v = hecke_char(ext, P)
                if P.p < 3 or F.D % P.p == 0 or (D1 * D2) % P.p == 0:
                    continue
                s1, s2 = kronecker(D1, P.p), kronecker(D2, P.p)
                if P.tag == "split":
                    # the two primes over p carry s1 and s2 in some order
                    vals = sorted(
                        hecke_char(ext, Q)
                        for Q in prime_ideals_up_to(F, P.p + 1)
                        if Q.p == P.p
                    )
                    assert vals == sorted((s1, s2)), (d, ext.dirichlet_pair, P.p)
                elif P.tag == "inert":
                    # p inert in F forces {chi1(p), chi2(p)} = {1, -1} and
                    # the norm-p^2 prime always splits in the V4 field
                    assert s1 * s2 == -1
                    assert v == 1, (d, ext.dirichlet_pair, P.p)


def test_hecke_coefficients_against_poly_factorization():
    sympy = pytest.importorskip("sympy")
    from sympy import GF, Poly, Symbol, factor_list

    x = Symbol("x")
    cases = [(-1, (-3, -2)), (-3, (5, 4)), (-1, (-7, -4)), (-10, (9, 1))]
    for d, beta in cases:
        F = build_field(d)
        ctx = field_context(d)
        c = _hecke_coefficients(ctx, beta, 200)
        rF = ideal_counts(F, 200)
        c4, _, c2, _, c0 = _quartic_min_poly_coeffs(beta, d, F.D)
        assert c4 == 1
        poly_disc = 16 * c0 * (c2 * c2 - 4 * c0) ** 2
        from quartdens.arith import prime_table

        for p in prime_table(200).upto(200).tolist():
            if poly_disc % p == 0:
                continue  # p may divide the index of Z[theta]
            fl = factor_list(Poly(x**4 + c2 * x**2 + c0, x, modulus=p))
            r_L_p = sum(1 for f, e in fl[1] for _ in range(e) if f.degree() == 1)
            assert r_L_p == rF[p] + c[p], (d, beta, p)


def test_hecke_multiplicative():
    # c(mn) = c(m) c(n) for coprime m, n  (multiplicativity of the
    # coefficient array built from local Euler data)
    random.seed(11)
    for d in (-1, -10, 15):
        F = build_field(d)
        exts = [x for x in enumerate_extensions(F, 60) if not x.is_biquadratic]
        ctx = field_context(d)
        for ext in exts[:2]:
            c = _hecke_coefficients(ctx, ext.beta, 5000)
            for _ in range(60):
                m = random.randrange(2, 70)
                n = random.randrange(2, 70)
                if math.gcd(m, n) == 1:
                    assert np.isclose(c[m * n], c[m] * c[n]), (d, ext.beta, m, n)


def test_residue_ratio_exact_vs_smoothed():
    # acceptance-grade self consistency: biquadratic extensions routed
    # through the general smoothed path agree within the reported error
    count = 0
    fields = 0
    for d in (-10, -5, -6, 15, -21, 34, 79):
        F = build_field(d)
        used = False
        here = 0
        for ext in enumerate_extensions(F, 150):
            if not ext.is_biquadratic or here >= 5:
                continue
            here += 1
            exact = _l1_primitive(ext.dirichlet_pair[0]) * _l1_primitive(
                ext.dirichlet_pair[1]
            )
            fake = RelQuadExt(
                d=ext.d,
                beta=ext.beta,
                rel_disc_norm=ext.rel_disc_norm,
                is_biquadratic=False,
                dirichlet_pair=None,
                r2_L=ext.r2_L,
                finite_unramified=ext.finite_unramified,
                is_unramified=ext.is_unramified,
            )
            val, err = residue_ratio(fake, tol=1e-3)
            assert err <= 1e-3, (d, ext.beta, err)
            assert abs(val - exact) <= err, (d, ext.beta, val, exact, err)
            count += 1
            used = True
        fields += used
    assert count >= 20 and fields >= 5


def test_residue_ratio_biquadratic_path():
    F = build_field(-10)
    un = [x for x in enumerate_extensions(F, 1) if x.is_unramified][0]
    val, err = residue_ratio(un)
    ref = _l1_primitive(-8) * _l1_primitive(5)
    assert abs(val - ref) < 1e-12


def test_zeta_l_at_2():
    F = build_field(-10)
    un = [x for x in enumerate_extensions(F, 1) if x.is_unramified][0]
    z = zeta_l_at_2(un)
    ref = (
        (math.pi**2 / 6)
        * l2_value(QuadChar(40, -40))
        * l2_value(QuadChar(8, -8))
        * l2_value(QuadChar(5, 5))
    )
    assert abs(z - ref) < 1e-12
    # factor-wise bounds: zeta_F(2) * prod (1+Np^-2)^-1 < zeta_L(2) < zeta_F(2)^2
    ctx = field_context(-10)
    lower_factor = 1.0
    for P in prime_ideals_up_to(F, 10**4):
        lower_factor *= 1.0 / (1.0 + P.norm**-2)
    for ext in enumerate_extensions(F, 100):
        z = zeta_l_at_2(ext)
        assert F.zeta2() * lower_factor * 0.99 < z < F.zeta2() ** 2, ext.beta


def test_zeta_l2_tail_small():
    F = build_field(-10)
    nonbq = [x for x in enumerate_extensions(F, 150) if not x.is_biquadratic]
    assert nonbq
    a = zeta_l_at_2(nonbq[0], n_terms=10**4)
    b = zeta_l_at_2(nonbq[0], n_terms=10**5)
    assert abs(a - b) < 1e-4


def test_d4_count_over_base_q():
    """End-to-end calibration against the base-Q dihedral counting.

    Counting quartic D4 fields with quadratic subfield L directly: each
    corresponds to a Kummer-class pair {gamma, tau(gamma)} over L, with
    Galois-stable classes (gamma * tau(gamma) a square) dropped.  The
    count density must converge to Res zeta_L / (2^(r2+1) zeta_L(2)) --
    the base-Q version of the dihedral formula -- as the discriminant
    bound grows, validating enumeration completeness and the pairing.
    """
    for dL in (-3, -1):
        F = build_field(dL)
        c_formula = F.residue / (
            2 ** (F.r2 + 1) * (math.pi**2 / 6) * l2_value(QuadChar(abs(F.D), F.D))
        )
        ratios = []
        for B in (1000, 4000, 16000):
            classes = enumerate_extensions(F, B)
            selfpaired = sum(
                1
                for ext in classes
                if _is_square_elt(
                    elt_mul(ext.beta, elt_conj(ext.beta, F.D), F.D), F.D
                )
                is not None
            )
            paired = len(classes) - selfpaired
            assert paired % 2 == 0, (dL, B)
            ratios.append((paired // 2) / (c_formula * B))
        assert ratios[0] < ratios[1] < ratios[2], (dL, ratios)
        assert 0.98 < ratios[2] < 1.005, (dL, ratios)
