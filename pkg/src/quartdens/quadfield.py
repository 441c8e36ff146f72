"""Invariants of a quadratic field F = Q(sqrt(d)).

build_field assembles discriminant, signature, roots of unity, class
number, 2-torsion count, regulator and the residue of the Dedekind zeta
function, cross-checking the analytic class number formula against the
form-theoretic count for imaginary fields.

Class data routes: imaginary fields get the full form class group by
reduced-form enumeration; real fields get h from the class number
formula (rounding residue enforced) and #Cl[2] from the genus-theoretic
count of factorizations of D into two positive fundamental discriminants
(equivalently, of everywhere-unramified quadratic extensions).

The multiplicative-coefficient builder at the bottom turns local Euler
data into a dense coefficient array with numpy stride arithmetic; it
feeds both r_F(n) and the smoothed Hecke sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .arith import (
    factorize,
    fundamental_discriminant_of,
    is_squarefree,
    kronecker,
    kronecker_row,
    prime_table,
)
from .dirichlet import _l1_primitive
from .forms import (
    ambiguous_class_count,
    class_group_structure,
    class_number_imaginary,
)
from .ideals import Ideal, prime_ideals_above

__all__ = [
    "Unit",
    "QuadField",
    "PrimeIdeal",
    "build_field",
    "fundamental_unit",
    "class_group",
    "cl2_count",
    "prime_ideals_up_to",
    "ideal_counts",
    "multiplicative_coefficients",
    "positive_split_count",
]

_COORD_BIT_GUARD = 1 << 20  # unit coordinates beyond this are out of desk scale


@dataclass(frozen=True)
class Unit:
    """Fundamental unit (x + y sqrt(d)) / den with den in {1, 2}."""

    x: int
    y: int
    den: int
    norm: int


def _log_big(n: int) -> float:
    if n <= 0:
        raise ValueError("positive input required")
    if n.bit_length() < 900:
        return math.log(n)
    e = n.bit_length() - 64
    return math.log(n >> e) + e * math.log(2)


def _unit_log(u: Unit, d: int) -> float:
    ratio = math.exp(_log_big(u.y) + 0.5 * math.log(d) - _log_big(u.x))
    return _log_big(u.x) + math.log1p(ratio) - math.log(u.den)


def _icbrt(n: int) -> int:
    if n < 0:
        return -_icbrt(-n)
    if n == 0:
        return 0
    x = 1 << ((n.bit_length() + 2) // 3)
    while True:
        y = (2 * x + n // (x * x)) // 3
        if y >= x:
            break
        x = y
    return x


def fundamental_unit(d: int) -> Unit:
    """Smallest unit > 1 of the maximal order of Q(sqrt(d)), by the
    continued fraction of sqrt(d) plus a cube-root descent for the
    half-integer units of d = 1 mod 4."""
    if d <= 1 or not is_squarefree(d):
        raise ValueError(f"need squarefree d > 1, got {d}")
    a0 = math.isqrt(d)
    m, dd, a = 0, 1, a0
    h_prev, h_cur = 1, a0
    k_prev, k_cur = 0, 1
    n_steps = 0
    while True:
        m = dd * a - m
        dd = (d - m * m) // dd
        a = (a0 + m) // dd
        n_steps += 1
        h_prev, h_cur = h_cur, a * h_cur + h_prev
        k_prev, k_cur = k_cur, a * k_cur + k_prev
        if h_cur.bit_length() > _COORD_BIT_GUARD:
            raise OverflowError(f"fundamental unit of {d} out of desk scale")
        if dd == 1:
            break
    x, y = h_prev, k_prev
    n1 = x * x - d * y * y
    assert n1 in (1, -1)
    unit = Unit(x, y, 1, n1)
    if d % 4 == 1:
        # the maximal order may contain a cube root (p + q sqrt d)/2
        n0 = n1  # n0^3 = n1 forces the same sign
        two_x = 2 * x
        c = _icbrt(two_x)
        for p in (c - 1, c, c + 1, c + 2):
            if p <= 0 or p * p * p - 3 * n0 * p != two_x:
                continue
            num = p * p - 4 * n0
            if num % d != 0:
                continue
            qq = num // d
            q = math.isqrt(qq)
            if q * q != qq or (p - q) % 2 != 0:
                continue
            if p % 2 == 1:
                unit = Unit(p, q, 2, n0)
            break
    return unit


@dataclass(frozen=True)
class PrimeIdeal:
    """A prime of F with residue characteristic p and its splitting tag.

    `root` reduces elements x + y*w modulo the ideal for norm-p primes
    (w = (D + sqrt D)/2 maps to root mod p); inert primes reduce into
    F_{p^2} instead.
    """

    p: int
    norm: int
    tag: str  # 'split' | 'inert' | 'ramified'
    ideal: Ideal
    root: int | None


@dataclass(frozen=True)
class QuadField:
    """All invariants of F = Q(sqrt(d)) the rest of the pipeline needs."""

    d: int
    D: int
    r1: int
    r2: int
    w: int
    h: int
    reg: float
    cl2: int
    residue: float
    unit: Unit | None
    cl_structure: tuple[int, ...] | None

    @property
    def is_real(self) -> bool:
        return self.d > 0

    def zeta2(self) -> float:
        from .dirichlet import QuadChar, l2_value

        return (math.pi**2 / 6) * l2_value(QuadChar(abs(self.D), self.D))


def positive_split_count(D: int) -> int:
    """Unordered factorizations D = D1 * D2 with both parts fundamental
    discriminants > 1; counts everywhere-unramified quadratic extensions
    of the real field of discriminant D."""
    from .arith import is_fundamental

    count = 0
    divs = [e for e in _all_divisors(D)]
    for D1 in divs:
        if D1 <= 1:
            continue
        D2 = D // D1
        if D2 <= 1 or D1 > D2:
            continue
        if D % D1 == 0 and is_fundamental(D1) and is_fundamental(D2) and D1 * D2 == D:
            count += 1
    return count


def _all_divisors(n: int) -> list[int]:
    from .arith import divisors_from_factorization

    return divisors_from_factorization(factorize(n))


@lru_cache(maxsize=None)
def build_field(d: int) -> QuadField:
    if d in (0, 1):
        raise ValueError(f"degenerate radicand {d}")
    if not is_squarefree(d):
        raise ValueError(f"{d} is not squarefree")
    D = fundamental_discriminant_of(d)
    residue = _l1_primitive(D)
    omega_D = len(factorize(D))
    if d < 0:
        r1, r2 = 0, 1
        w = 4 if d == -1 else (6 if d == -3 else 2)
        h = class_number_imaginary(D)
        analytic = residue * w * math.sqrt(abs(D)) / (2 * math.pi)
        if abs(analytic - h) > 1e-4 * max(h, 1):
            raise AssertionError(
                f"form count h={h} disagrees with analytic {analytic} for D={D}"
            )
        cl2 = ambiguous_class_count(D)
        if cl2 != 2 ** (omega_D - 1):
            raise AssertionError(f"genus theory violated for D={D}: cl2={cl2}")
        structure = class_group_structure(D)
        return QuadField(d, D, r1, r2, w, h, 0.0, cl2, residue, None, structure)
    r1, r2 = 2, 0
    w = 2
    unit = fundamental_unit(d)
    reg = _unit_log(unit, d)
    h_real = residue * math.sqrt(D) / (2 * reg)
    h = round(h_real)
    if abs(h_real - h) > 0.01:
        raise AssertionError(
            f"class number formula rounding residue {h_real} too large for d={d}"
        )
    cl2 = 1 + positive_split_count(D)
    if cl2 not in (2 ** (omega_D - 1), 2 ** max(omega_D - 2, 0)):
        raise AssertionError(f"cl2={cl2} outside genus-theoretic range for D={D}")
    if h % cl2 != 0:
        raise AssertionError(f"cl2={cl2} does not divide h={h} for D={D}")
    return QuadField(d, D, r1, r2, w, h, reg, cl2, residue, unit, None)


@dataclass(frozen=True)
class ClassGroup:
    h: int
    invariants: tuple[int, ...] | None  # None: structure not computed (real)
    method: str


def class_group(D: int) -> ClassGroup:
    """Class group data by discriminant: reduced forms with composition
    for D < 0, the analytic formula for D > 0."""
    if D < 0:
        return ClassGroup(
            class_number_imaginary(D), class_group_structure(D), "reduced-forms"
        )
    s, f = (D, 1) if D % 4 == 1 else (D // 4, 2)
    fld = build_field(s)
    return ClassGroup(fld.h, None, "analytic-formula")


def cl2_count(F: QuadField) -> int:
    return F.cl2


# ----------------------------------------------------------------------
# Prime ideals and ideal counting
# ----------------------------------------------------------------------

def prime_ideals_up_to(F: QuadField, N: int) -> list[PrimeIdeal]:
    """Every prime ideal of F with norm <= N, split primes twice."""
    if N < 2:
        raise ValueError("norm bound must be at least 2")
    D = F.D
    out: list[PrimeIdeal] = []
    symbols = kronecker_row(D, N)
    for p in prime_table(N).upto(N).tolist():
        sym = int(symbols[p])
        if sym == 1:
            for ideal in prime_ideals_above(D, p):
                out.append(PrimeIdeal(p, p, "split", ideal, (-ideal.b) % p))
        elif sym == 0:
            ideal = prime_ideals_above(D, p)[0]
            out.append(PrimeIdeal(p, p, "ramified", ideal, (-ideal.b) % p))
        elif p * p <= N:
            ideal = prime_ideals_above(D, p)[0]
            out.append(PrimeIdeal(p, p * p, "inert", ideal, None))
    out.sort(key=lambda P: (P.norm, P.p, P.root if P.root is not None else -1))
    return out


def multiplicative_coefficients(
    N: int, local: Callable[[int, int], list[float]], dtype=np.float64
) -> np.ndarray:
    """Dense array c[0..N] of the multiplicative function with local
    coefficients c(p^k) = local(p, kmax)[k-1].

    Processes primes one at a time; the prefix snapshot is all zeros at
    p-divisible indices, so a strided add per power installs exactly the
    multiplicative extension.
    """
    c = np.zeros(N + 1, dtype=dtype)
    c[1] = 1
    for p in prime_table(N).upto(N).tolist():
        kmax = 1
        pk = p
        while pk * p <= N:
            pk *= p
            kmax += 1
        coeffs = local(p, kmax)
        if all(f == 0 for f in coeffs):
            continue
        pref = c[: N // p + 1].copy()
        pk = 1
        for k in range(1, kmax + 1):
            pk *= p
            f = coeffs[k - 1]
            if f != 0:
                c[pk::pk] += f * pref[1 : N // pk + 1]
    return c


def _splitting_local(D: int):
    def local(p: int, kmax: int) -> list[float]:
        sym = kronecker(D, p)
        if sym == 1:
            return [k + 1 for k in range(1, kmax + 1)]
        if sym == 0:
            return [1.0] * kmax
        return [1.0 if k % 2 == 0 else 0.0 for k in range(1, kmax + 1)]

    return local


def ideal_counts(F: QuadField, N: int) -> np.ndarray:
    """r_F(n) = number of integral ideals of norm n, for n <= N."""
    if N < 1:
        raise ValueError("bound must be positive")
    return multiplicative_coefficients(N, _splitting_local(F.D))
