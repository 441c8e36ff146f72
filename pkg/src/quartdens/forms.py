"""Binary quadratic forms of fundamental discriminant D.

Definite side (D < 0): exhaustive reduced-form enumeration gives the
class number, Gaussian composition gives the group law, and the order
statistics of elements recover the abelian invariant factors.  Ambiguous
reduced forms (b = 0, a = b, or a = c) count the 2-torsion directly.

Indefinite side (D > 0): the rho reduction operator, with the exact
relative generator (b - sqrt(D))/(2a) tracked through every step, walks
ideals onto reduction cycles.  Principality testing reduces to cycle
membership against the cached principal cycle, and generators fall out
of the tracked products.  This is the engine behind extension
enumeration over real quadratic fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

__all__ = [
    "reduce_definite",
    "reduced_forms",
    "compose",
    "form_pow",
    "principal_form",
    "class_number_imaginary",
    "class_group_structure",
    "ambiguous_class_count",
    "QuadNum",
    "reduce_indefinite",
    "PrincipalCycle",
]

Form = tuple[int, int, int]


# ----------------------------------------------------------------------
# Definite forms (D < 0)
# ----------------------------------------------------------------------

def principal_form(D: int) -> Form:
    k = D & 1
    return (1, k, (k * k - D) // 4)


def reduce_definite(f: Form) -> Form:
    """Unique reduced representative: |b| <= a <= c, b >= 0 if tie."""
    a, b, c = f
    while True:
        if a > c:
            a, b, c = c, -b, a
            continue
        if b > a or b <= -a:
            r = (a - b) // (2 * a)
            b2 = b + 2 * r * a
            c = a * r * r + b * r + c
            b = b2
            continue
        break
    if a == c and b < 0:
        b = -b
    if b == -a:
        b = a
    return (a, b, c)


@lru_cache(maxsize=None)
def reduced_forms(D: int) -> tuple[Form, ...]:
    """All primitive reduced forms of discriminant D < 0."""
    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError(f"bad negative discriminant {D}")
    out = []
    amax = math.isqrt(-D // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            num = b * b - D
            if num % (4 * a) != 0:
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if (a == c or a == b) and b < 0:
                continue
            if math.gcd(math.gcd(a, b), c) == 1:
                out.append((a, b, c))
    return tuple(out)


def class_number_imaginary(D: int) -> int:
    return len(reduced_forms(D))


def ambiguous_class_count(D: int) -> int:
    """#Cl[2] for D < 0: reduced forms with b = 0, a = b, or a = c."""
    return sum(1 for (a, b, c) in reduced_forms(D) if b == 0 or a == b or a == c)


def compose(f1: Form, f2: Form) -> Form:
    """Class-group composition, via ideal multiplication (no special
    cases), reduced output.  Definite discriminants only."""
    from .ideals import Ideal

    D = f1[1] * f1[1] - 4 * f1[0] * f1[2]
    prod = Ideal.from_form(D, f1).mul(Ideal.from_form(D, f2))
    return reduce_definite(prod.primitive_part().to_form())


def form_pow(f: Form, n: int) -> Form:
    D = f[1] * f[1] - 4 * f[0] * f[2]
    r = reduce_definite(principal_form(D))
    base = reduce_definite(f)
    while n > 0:
        if n & 1:
            r = compose(r, base)
        base = compose(base, base)
        n >>= 1
    return r


def _element_order(f: Form, h: int) -> int:
    D = f[1] * f[1] - 4 * f[0] * f[2]
    one = reduce_definite(principal_form(D))
    for div in sorted(_divisors(h)):
        if form_pow(f, div) == one:
            return div
    raise AssertionError("order must divide h")


def _divisors(n: int) -> list[int]:
    out = []
    for i in range(1, math.isqrt(n) + 1):
        if n % i == 0:
            out.append(i)
            if i * i != n:
                out.append(n // i)
    return out


def class_group_structure(D: int) -> tuple[int, ...]:
    """Invariant factors (d1 | d2 | ...) of the form class group, D < 0.

    Recovered from element-order statistics: for each prime p the count
    of classes killed by p^j determines the p-partition uniquely.
    """
    forms = reduced_forms(D)
    h = len(forms)
    if h == 1:
        return ()
    orders = [_element_order(f, h) for f in forms]
    parts_by_prime: dict[int, list[int]] = {}
    from .arith import factorize

    for p in factorize(h):
        s_prev = 0
        multiplicities = []
        j = 1
        while True:
            n_j = sum(1 for o in orders if p**j % o == 0)
            s_j = round(math.log(n_j, p))
            m_j = s_j - s_prev  # number of parts of length >= j
            if m_j == 0:
                break
            multiplicities.append(m_j)
            s_prev = s_j
            j += 1
        # conjugate partition -> part lengths
        parts = []
        for i in range(multiplicities[0]):
            parts.append(sum(1 for m in multiplicities if m > i))
        parts_by_prime[p] = sorted(parts, reverse=True)
    width = max(len(v) for v in parts_by_prime.values())
    invariants = []
    for i in range(width):
        fac = 1
        for p, parts in parts_by_prime.items():
            if i < len(parts):
                fac *= p ** parts[i]
        invariants.append(fac)
    invariants.sort()
    assert math.prod(invariants) == h
    return tuple(invariants)


# ----------------------------------------------------------------------
# Exact quadratic numbers (x + y sqrt(D)) / z
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class QuadNum:
    """Exact element (x + y sqrt(D)) / z of Q(sqrt(D)), D fixed by use."""

    x: int
    y: int
    z: int
    D: int

    @staticmethod
    def one(D: int) -> "QuadNum":
        return QuadNum(1, 0, 1, D)

    def _normalized(self) -> "QuadNum":
        x, y, z = self.x, self.y, self.z
        if z < 0:
            x, y, z = -x, -y, -z
        g = math.gcd(math.gcd(abs(x), abs(y)), z)
        if g > 1:
            x, y, z = x // g, y // g, z // g
        return QuadNum(x, y, z, self.D)

    def mul(self, other: "QuadNum") -> "QuadNum":
        D = self.D
        x = self.x * other.x + D * self.y * other.y
        y = self.x * other.y + self.y * other.x
        return QuadNum(x, y, self.z * other.z, D)._normalized()

    def div(self, other: "QuadNum") -> "QuadNum":
        # 1/other = conj(other) * z / norm-numerator
        D = self.D
        n = other.x * other.x - D * other.y * other.y
        inv = QuadNum(other.x * other.z, -other.y * other.z, n, D)
        return self.mul(inv)

    def norm_rational(self) -> tuple[int, int]:
        """(numerator, denominator) of the field norm."""
        return self.x * self.x - self.D * self.y * self.y, self.z * self.z


# ----------------------------------------------------------------------
# Indefinite reduction (D > 0, non-square)
# ----------------------------------------------------------------------

def _is_reduced_indef(f: Form, sqD: float) -> bool:
    a, b, c = f
    return 0 < b < sqD and abs(sqD - 2 * abs(a)) < b


def _rho(f: Form, D: int, isq: int) -> tuple[Form, tuple[int, int]]:
    """One reduction step; returns the new form and (b, a) of the old
    one, encoding the relative generator (b - sqrt(D)) / (2a)."""
    a, b, c = f
    if abs(c) > isq:
        # r = -b mod 2c in (-|c|, |c|]
        r = (-b) % (2 * abs(c))
        if r > abs(c):
            r -= 2 * abs(c)
    else:
        # r in (sqrt(D) - 2|c|, sqrt(D))
        r = (-b) % (2 * abs(c))
        r += ((isq - r) // (2 * abs(c))) * (2 * abs(c))
    cc = (r * r - D) // (4 * c)
    return (c, r, cc), (b, a)


def reduce_indefinite(f: Form, D: int) -> tuple[Form, "QuadNum"]:
    """Reduce an indefinite form, returning (reduced form, gamma) with
    ideal(reduced) = gamma * ideal(f)."""
    isq = math.isqrt(D)
    sqD = math.sqrt(D)
    gamma = QuadNum.one(D)
    cur = f
    for _ in range(10_000):
        if _is_reduced_indef(cur, sqD):
            return cur, gamma
        cur, (b_old, a_old) = _rho(cur, D, isq)
        gamma = gamma.mul(QuadNum(b_old, -1, 2 * a_old, D))
    raise RuntimeError(f"reduction did not terminate for {f}, D={D}")


class PrincipalCycle:
    """The rho-cycle of the principal indefinite form, with the exact
    relative generator cached at every position.

    Membership of reduce(f) decides principality of the ideal of f; the
    cached generators turn a membership hit into an explicit generator.
    Walking the full cycle once also yields the fundamental totally
    positive automorphism (epsilon or epsilon^2).
    """

    def __init__(self, D: int):
        if D <= 0 or D % 4 not in (0, 1):
            raise ValueError(f"bad positive discriminant {D}")
        self.D = D
        isq = math.isqrt(D)
        if isq * isq == D:
            raise ValueError("discriminant must not be a square")
        b0 = isq if (isq - D) % 2 == 0 else isq - 1
        gammas: dict[Form, QuadNum] = {}

        def walk(seed: Form) -> QuadNum:
            start, g0 = reduce_indefinite(seed, D)
            if start in gammas:
                return QuadNum.one(D)
            cur, gamma = start, QuadNum.one(D)
            while True:
                gammas[cur] = gamma
                nxt, (b_old, a_old) = _rho(cur, D, isq)
                gamma = gamma.mul(QuadNum(b_old, -1, 2 * a_old, D))
                if nxt == start:
                    return gamma
                cur = nxt
                if len(gammas) > 5_000_000:
                    raise RuntimeError("principal cycle unreasonably long")

        # both signs: a generator of negative norm reduces into the cycle
        # of the negated principal form when the fundamental unit has
        # norm +1 (wide versus narrow classes)
        self.cycle_automorph = walk((1, b0, (b0 * b0 - D) // 4))
        walk((-1, b0, (D - b0 * b0) // 4))
        self.gammas = gammas

    def generator_if_principal(self, f: Form) -> QuadNum | None:
        """Generator g with ideal(f) = (g), or None if not principal.

        ideal(reduced) = g1 * ideal(f) and ideal(reduced) = g2 * O, so
        ideal(f) = (g2 / g1).
        """
        red, g1 = reduce_indefinite(f, self.D)
        g2 = self.gammas.get(red)
        if g2 is None:
            return None
        return g2.div(g1)
