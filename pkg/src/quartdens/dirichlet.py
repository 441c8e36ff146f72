"""Real (quadratic) Dirichlet characters and their L-values at 1 and 2.

A real character mod M is either principal or induced by the Kronecker
symbol of a unique fundamental discriminant D* with |D*| dividing M.
L(1, chi) for primitive chi is evaluated by the finite closed-form
character sums (weighted-digit sum for D* < 0, log-sin sum for D* > 0);
an independent exponentially-convergent theta-smoothed series lives in
``l1_smoothed`` so the two normalizations police each other in tests.
L(2, chi) uses the trigamma closed form over one period.

Imprimitive characters are first class: L-values pick up the Euler
factors (1 - chi*(p)/p^s) at primes dividing the modulus but not the
conductor, and the truncated log L prime sums skip those primes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import erfc, exp1, polygamma

from .arith import (
    divisors_from_factorization,
    factorize,
    is_fundamental,
    kronecker,
    kronecker_row,
    prime_table,
    squarefree_decompose,
)

__all__ = [
    "QuadChar",
    "CharFamily",
    "quadratic_characters_mod",
    "multiply",
    "l1_exact",
    "l1_value",
    "l2_value",
    "log_l1_truncated",
    "l1_smoothed",
    "is_exceptional",
]


@dataclass(frozen=True)
class QuadChar:
    """A real Dirichlet character: conductor D* viewed mod `modulus`.

    conductor = 1 marks the principal character.  Evaluation at n is 0
    when gcd(n, modulus) > 1 and kronecker(conductor, n) otherwise.
    """

    modulus: int
    conductor: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be positive")
        if self.conductor != 1:
            if not is_fundamental(self.conductor):
                raise ValueError(f"conductor {self.conductor} not fundamental")
            if self.modulus % abs(self.conductor) != 0:
                raise ValueError(
                    f"conductor {self.conductor} does not divide modulus {self.modulus}"
                )

    @property
    def is_principal(self) -> bool:
        return self.conductor == 1

    @property
    def is_primitive(self) -> bool:
        return self.modulus == abs(self.conductor) or (
            self.conductor == 1 and self.modulus == 1
        )

    def primitive_core(self) -> "QuadChar":
        return QuadChar(max(abs(self.conductor), 1), self.conductor)

    def __call__(self, n: int) -> int:
        if math.gcd(n, self.modulus) != 1:
            return 0
        return kronecker(self.conductor, n)

    def values_row(self, n_max: int) -> np.ndarray:
        """chi(n) for n = 0..n_max as int8 (imprimitivity zeros applied)."""
        row = kronecker_row(self.conductor, n_max)
        for p in factorize(self.modulus):
            if self.conductor % p != 0:
                row[::p] = 0
        return row


@dataclass(frozen=True)
class CharFamily:
    """All real characters mod D; V is the nonprincipal sublist."""

    modulus: int
    members: tuple[QuadChar, ...]

    @property
    def principal(self) -> QuadChar:
        return self.members[0]

    @property
    def V(self) -> tuple[QuadChar, ...]:
        return self.members[1:]


def quadratic_characters_mod(D: int) -> CharFamily:
    """The group of real characters mod D, each tagged with its
    primitive conductor.  For squarefree odd D there are 2^omega(D)."""
    if D < 3:
        raise ValueError("modulus must be at least 3")
    conductors = []
    for m in divisors_from_factorization(factorize(D)):
        if m < 3:
            continue
        if m % 4 in (0, 1) and is_fundamental(m):
            conductors.append(m)
        if (-m) % 4 in (0, 1) and is_fundamental(-m):
            conductors.append(-m)
    conductors.sort(key=lambda c: (abs(c), -c))
    members = (QuadChar(D, 1),) + tuple(QuadChar(D, c) for c in conductors)
    return CharFamily(modulus=D, members=members)


def multiply(a: QuadChar, b: QuadChar) -> QuadChar:
    """Product character, valid mod lcm of the moduli."""
    mod = math.lcm(a.modulus, b.modulus)
    prod = a.conductor * b.conductor
    s, _ = squarefree_decompose(prod)
    if s == 1:
        return QuadChar(mod, 1)
    cond = s if s % 4 == 1 else 4 * s
    return QuadChar(mod, cond)


# ----------------------------------------------------------------------
# L(1, chi)
# ----------------------------------------------------------------------

_L1_CHUNK = 1 << 24


@lru_cache(maxsize=None)
def _l1_primitive(d_star: int) -> float:
    q = abs(d_star)
    row = kronecker_row(d_star, q - 1)
    if d_star < 0:
        # L(1) = -pi * q^(-3/2) * sum chi(a) a   (exact integer sum)
        s = 0
        for lo in range(1, q, _L1_CHUNK):
            hi = min(lo + _L1_CHUNK, q)
            s += int(
                np.dot(
                    row[lo:hi].astype(np.int64), np.arange(lo, hi, dtype=np.int64)
                )
            )
        return -math.pi * s / q**1.5
    s = 0.0
    for lo in range(1, q, _L1_CHUNK):
        hi = min(lo + _L1_CHUNK, q)
        a = np.arange(lo, hi, dtype=np.float64)
        seg = row[lo:hi]
        good = seg != 0
        s += float(np.dot(seg[good], np.log(np.sin(math.pi * a[good] / q))))
    return -s / math.sqrt(q)


def l1_exact(chi: QuadChar) -> float:
    """L(1, chi) for primitive nonprincipal chi, to ~1e-12 absolute."""
    if chi.is_principal:
        raise ValueError("L(1) diverges for the principal character")
    if not chi.is_primitive:
        raise ValueError("l1_exact requires a primitive character")
    return _l1_primitive(chi.conductor)


def l1_value(chi: QuadChar) -> float:
    """L(1, chi) for possibly imprimitive nonprincipal chi."""
    if chi.is_principal:
        raise ValueError("L(1) diverges for the principal character")
    val = _l1_primitive(chi.conductor)
    for p in factorize(chi.modulus):
        if chi.conductor % p != 0:
            val *= 1.0 - kronecker(chi.conductor, p) / p
    return val


def l1_smoothed(d_star: int) -> float:
    """Independent theta-smoothed series for L(1, chi_{d_star}),
    primitive; converges like exp(-pi n^2 / |d_star|).

    Used as the oracle against the finite character sums; do not route
    production code through it.
    """
    q = abs(d_star)
    n_terms = int(math.isqrt(int(q * 40 / math.pi))) + 2
    n = np.arange(1, n_terms + 1, dtype=np.float64)
    chi = kronecker_row(d_star, n_terms)[1:].astype(np.float64)
    a = math.pi * n * n / q
    root_a = n * math.sqrt(math.pi / q)
    if d_star < 0:
        terms = chi * (np.exp(-a) / n + (math.pi / math.sqrt(q)) * erfc(root_a))
    else:
        terms = chi * (erfc(root_a) / n + exp1(a) / math.sqrt(q))
    return float(np.sum(terms))


# ----------------------------------------------------------------------
# L(2, chi)
# ----------------------------------------------------------------------

@lru_cache(maxsize=None)
def _l2_cached(modulus: int, conductor: int) -> float:
    if modulus == 1:
        return math.pi**2 / 6
    chi = QuadChar(modulus, conductor)
    row = chi.values_row(modulus)[1:].astype(np.float64)
    a = np.arange(1, modulus + 1, dtype=np.float64)
    # sum_{k>=0} (x+k)^(-2) = trigamma(x)
    good = row != 0
    tri = polygamma(1, a[good] / modulus)
    return float(np.dot(row[good], tri)) / modulus**2


def l2_value(chi: QuadChar) -> float:
    """L(2, chi) = sum chi(n)/n^2 via the trigamma closed form; the
    principal character mod 1 gives zeta(2)."""
    return _l2_cached(chi.modulus, chi.conductor)


# ----------------------------------------------------------------------
# Truncated log L(1, chi)
# ----------------------------------------------------------------------

def log_l1_truncated(chi: QuadChar, T: float) -> float:
    """sum_{p < T} chi(p)/p plus the full prime-power tail
    sum_{k>=2, p^k < T} chi(p)^k / (k p^k)."""
    if T < 2:
        raise ValueError("threshold must be at least 2")
    primes = prime_table(int(T)).upto(int(math.ceil(T - 1)))
    primes = primes[primes < T]
    total = 0.0
    M, c = chi.modulus, chi.conductor
    for p in primes.tolist():
        if M % p == 0:
            continue
        v = kronecker(c, p)
        total += v / p
        pk = p * p
        k = 2
        while pk < T:
            total += (v**k) / (k * pk)
            k += 1
            pk *= p
    return total


def is_exceptional(chi: QuadChar, floor: float = 1e-6) -> bool:
    """Exceptional-zero exclusion flag: exact L(1, chi) below `floor`.

    Never triggers at desk scale; recorded for family bookkeeping only.
    """
    return l1_value(chi) < floor
