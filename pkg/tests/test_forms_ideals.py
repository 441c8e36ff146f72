"""Binary quadratic forms, ideal arithmetic, reduction cycles, units."""

import math
import random

import pytest

from quartdens import quadfield
from quartdens.forms import (
    PrincipalCycle,
    ambiguous_class_count,
    class_group_structure,
    class_number_imaginary,
    compose,
    form_pow,
    principal_form,
    reduce_definite,
    reduced_forms,
)
from quartdens.ideals import (
    Ideal,
    elt_conj,
    elt_mul,
    elt_norm,
    prime_ideals_above,
    sqrt_mod_prime,
)
from quartdens.quadfield import fundamental_unit

KNOWN_H = {
    -3: 1, -4: 1, -7: 1, -8: 1, -11: 1, -15: 2, -20: 2, -23: 3, -24: 2,
    -35: 2, -39: 4, -40: 2, -47: 5, -84: 4, -120: 4, -163: 1, -420: 8,
    -840: 8, -1092: 8,
}


def test_class_numbers():
    for D, h in KNOWN_H.items():
        assert class_number_imaginary(D) == h, D


def test_group_structures():
    assert class_group_structure(-47) == (5,)
    assert class_group_structure(-23) == (3,)
    assert class_group_structure(-39) == (4,)  # cyclic, not C2 x C2
    assert class_group_structure(-84) == (2, 2)
    assert class_group_structure(-840) == (2, 2, 2)
    assert class_group_structure(-3) == ()


def test_ambiguous_counts_match_genus_theory():
    from quartdens.arith import factorize

    for D in KNOWN_H:
        om = len(factorize(D))
        assert ambiguous_class_count(D) == 2 ** (om - 1), D


def test_composition_group_laws():
    random.seed(7)
    for D in (-84, -47, -120, -420):
        forms = reduced_forms(D)
        h = len(forms)
        one = reduce_definite(principal_form(D))
        for f in forms:
            assert compose(f, one) == f
            assert form_pow(f, h) == one
        for _ in range(30):
            f, g, k = (random.choice(forms) for _ in range(3))
            assert compose(compose(f, g), k) == compose(f, compose(g, k))
            assert compose(f, g) == compose(g, f)


def test_ideal_arithmetic():
    D = -40
    O = Ideal.whole_ring(D)
    assert O.norm == 1
    for p in (2, 3, 5, 7, 11, 13):
        ideals = prime_ideals_above(D, p)
        prod = Ideal.whole_ring(D)
        for I in ideals:
            prod = prod.mul(I)
        from quartdens.arith import kronecker

        sym = kronecker(D, p)
        if sym == 1:
            # product of the two conjugates is (p)
            assert prod.norm == p * p and prod.content() == p
        elif sym == 0:
            assert ideals[0].mul(ideals[0]).content() == p
        else:
            assert ideals[0].norm == p * p
    # I * conj(I) = (N I)
    I = prime_ideals_above(D, 7)[0]
    J = I.mul(prime_ideals_above(D, 11)[0])
    NJ = J.mul(J.conj())
    assert NJ.content() == J.norm


def test_element_arithmetic():
    D = -40
    a, b = (3, 2), (-1, 5)
    assert elt_norm(elt_mul(a, b, D), D) == elt_norm(a, D) * elt_norm(b, D)
    c = elt_conj(a, D)
    assert elt_mul(a, c, D) == (elt_norm(a, D), 0)


def test_sqrt_mod_prime():
    random.seed(3)
    for p in (3, 5, 7, 11, 13, 10007, 10009):
        for _ in range(10):
            x = random.randrange(1, p)
            r = sqrt_mod_prime(x * x, p)
            assert (r * r - x * x) % p == 0


def test_principal_cycle_generators():
    pc = PrincipalCycle(40)
    assert pc.generator_if_principal((2, 0, -5)) is None  # norm 2, nonprincipal
    assert pc.generator_if_principal((3, 2, -3)) is None
    g = pc.generator_if_principal((9, 2, -1))
    num, den = g.norm_rational()
    assert abs(num) // den == 9
    # norm +1 unit field: generators of negative norm live on the second cycle
    pc136 = PrincipalCycle(136)
    g17 = pc136.generator_if_principal((17, 136, 270))
    assert g17 is not None
    num, den = g17.norm_rational()
    assert abs(num) // den == 17 and num < 0


def test_cycle_automorph_is_unit():
    for D in (40, 5, 136, 8, 120):
        pc = PrincipalCycle(D)
        num, den = pc.cycle_automorph.norm_rational()
        assert abs(num) == den, D


def test_fundamental_units():
    u = fundamental_unit(2)
    assert (u.x, u.y, u.den, u.norm) == (1, 1, 1, -1)
    u = fundamental_unit(5)
    assert (u.x, u.y, u.den, u.norm) == (1, 1, 2, -1)
    u = fundamental_unit(6)
    assert (u.x, u.y, u.den, u.norm) == (5, 2, 1, 1)
    u = fundamental_unit(13)
    assert (u.x, u.y, u.den, u.norm) == (3, 1, 2, -1)
    u = fundamental_unit(94)  # largish Pell solution
    assert (u.x, u.y, u.norm) == (2143295, 221064, 1)
    u = fundamental_unit(21)
    assert (u.x, u.y, u.den, u.norm) == (5, 1, 2, 1)
    with pytest.raises(ValueError):
        fundamental_unit(12)


def test_unit_guard(monkeypatch):
    monkeypatch.setattr(quadfield, "_COORD_BIT_GUARD", 10)
    with pytest.raises(OverflowError):
        fundamental_unit(94)
