"""Exact ideal arithmetic in the maximal order of Q(sqrt(d)).

Elements are integer pairs (x, y) meaning x + y*w where w = (D + sqrt(D))/2
for the fundamental discriminant D, so the maximal order is Z[w] for both
parities of D.  Ideals are 2x2 column-HNF matrices [[a, b], [0, c]] over
that basis, i.e. the module Z*a + Z*(b + c*w).  Products are computed by
multiplying out generators and re-reducing to HNF, which sidesteps every
special case of textbook form composition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "elt_mul",
    "elt_norm",
    "elt_trace",
    "elt_conj",
    "Ideal",
    "prime_ideals_above",
]

Elt = tuple[int, int]


def _omega_relations(D: int) -> tuple[int, int]:
    """w^2 = t*w - n for w = (D + sqrt(D))/2."""
    return D, (D * D - D) // 4


def elt_mul(a: Elt, b: Elt, D: int) -> Elt:
    t, n = _omega_relations(D)
    x1, y1 = a
    x2, y2 = b
    return (x1 * x2 - n * y1 * y2, x1 * y2 + x2 * y1 + t * y1 * y2)


def elt_norm(a: Elt, D: int) -> int:
    t, n = _omega_relations(D)
    x, y = a
    return x * x + t * x * y + n * y * y


def elt_trace(a: Elt, D: int) -> int:
    return 2 * a[0] + D * a[1]


def elt_conj(a: Elt, D: int) -> Elt:
    x, y = a
    return (x + D * y, -y)


def _hnf_2xN(cols: list[Elt]) -> tuple[int, int, int]:
    """Column HNF (a, b, c) = module Z*(a, 0) + Z*(b, c) from generator
    columns (x, y); requires full rank."""
    # reduce second coordinates by gcd
    cols = [c for c in cols if c != (0, 0)]
    c = 0
    b = 0
    rest: list[int] = []
    for (x, y) in cols:
        if y == 0:
            rest.append(x)
            continue
        if c == 0:
            b, c = x, y
            continue
        g, u, v = _xgcd(c, y)
        # new second-row gcd g with combined first coordinate
        b_new = u * b + v * x
        # the eliminated combination lands in the first row
        rest.append((y // g) * b - (c // g) * x)
        b, c = b_new, g
    a = 0
    for x in rest:
        a = math.gcd(a, abs(x))
    if a == 0 or c == 0:
        raise ValueError("rank-deficient module")
    if c < 0:
        b, c = -b, -c
    b %= a
    return a, b, c


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


@dataclass(frozen=True)
class Ideal:
    """Integral ideal Z*a + Z*(b + c*w) of the order of discriminant D."""

    D: int
    a: int
    b: int
    c: int

    @classmethod
    def whole_ring(cls, D: int) -> "Ideal":
        return cls(D, 1, 0, 1)

    @classmethod
    def from_generators(cls, D: int, gens: list[Elt]) -> "Ideal":
        """Smallest O-module containing gens and closed under mult by w."""
        t, n = _omega_relations(D)
        cols = list(gens)
        for (x, y) in gens:
            cols.append(elt_mul((x, y), (0, 1), D))
        a, b, c = _hnf_2xN(cols)
        return cls(D, a, b, c)

    @classmethod
    def principal(cls, D: int, g: Elt) -> "Ideal":
        return cls.from_generators(D, [g])

    @property
    def norm(self) -> int:
        return self.a * self.c

    def content(self) -> int:
        """Largest rational integer dividing the ideal."""
        return math.gcd(self.c, math.gcd(self.a, self.b) if self.b else self.a)

    def primitive_part(self) -> "Ideal":
        g = self.content()
        if g == 1:
            return self
        return Ideal(self.D, self.a // g, self.b // g, self.c // g)

    def contains(self, e: Elt) -> bool:
        x, y = e
        if y % self.c != 0:
            return False
        k = y // self.c
        return (x - k * self.b) % self.a == 0

    def mul(self, other: "Ideal") -> "Ideal":
        D = self.D
        g1 = [(self.a, 0), (self.b, self.c)]
        g2 = [(other.a, 0), (other.b, other.c)]
        prods = [elt_mul(u, v, D) for u in g1 for v in g2]
        a, b, c = _hnf_2xN(prods)
        return Ideal(D, a, b, c)

    def conj(self) -> "Ideal":
        D = self.D
        return Ideal.from_generators(
            D, [elt_conj((self.a, 0), D), elt_conj((self.b, self.c), D)]
        )

    # -- forms bridge ---------------------------------------------------

    def to_form(self) -> tuple[int, int, int]:
        """Binary quadratic form of the primitive part (norm-a leading
        coefficient, discriminant D)."""
        p = self.primitive_part()
        if p.c != 1:
            raise AssertionError("primitive ideal should have c = 1")
        # b + w = b + (D + sqrt D)/2 = ((2b + D) + sqrt D)/2
        B = 2 * p.b + p.D
        num = B * B - p.D
        assert num % (4 * p.a) == 0
        return (p.a, B, num // (4 * p.a))

    @classmethod
    def from_form(cls, D: int, form: tuple[int, int, int]) -> "Ideal":
        a, B, _ = form
        assert (B - D) % 2 == 0
        return cls(D, abs(a), ((B - D) // 2) % abs(a), 1)


def sqrt_mod_prime(a: int, p: int) -> int:
    """A square root of a mod p (p odd prime, a a QR), Tonelli-Shanks."""
    a %= p
    if a == 0:
        return 0
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t = t * c % p
        r = r * b % p
    return r


def prime_ideals_above(D: int, p: int) -> list[Ideal]:
    """Prime ideals of the order of discriminant D over the rational
    prime p, tagged by the Kronecker symbol (D|p)."""
    from .arith import kronecker

    sym = kronecker(D, p)
    if sym == -1:
        return [Ideal(D, p, 0, p)]  # inert: (p), norm p^2
    # split or ramified: the ideal over root r of the minimal polynomial
    # of w is [p, b + w] with b = -r mod p
    t, n = _omega_relations(D)
    if p == 2:
        roots = [r for r in range(2) if (r * r - t * r + n) % 2 == 0]
    else:
        # x = (D +- sqrt(D)) / 2 mod p
        sq = sqrt_mod_prime(D, p)
        inv2 = (p + 1) // 2
        roots = sorted({(D + sq) * inv2 % p, (D - sq) * inv2 % p})
    if sym == 0:
        assert len(roots) == 1
        return [Ideal(D, p, (-roots[0]) % p, 1)]
    assert len(roots) == 2
    out = [Ideal(D, p, (-r) % p, 1) for r in roots]
    out.sort(key=lambda I: I.b)
    return out
