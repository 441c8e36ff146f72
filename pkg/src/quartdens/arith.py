"""Integer arithmetic substrate: primes, Kronecker symbols, squarefree
decomposition, fundamental discriminants, and the small-prime divisor
counter omega_Y.

Everything here is elementary number theory over Z.  The two performance
hot spots are (a) bulk evaluation of a real character chi_D(n) for all n
up to some limit, done by tiling one period per prime-discriminant factor
of D (see ``kronecker_row``), and (b) the fundamental-discriminant census,
done with numpy block sieves rather than per-number factorization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

__all__ = [
    "PrimeTable",
    "prime_table",
    "sieve_primes",
    "is_prime",
    "factorize",
    "kronecker",
    "squarefree_decompose",
    "is_squarefree",
    "fundamental_discriminant_of",
    "is_fundamental",
    "enumerate_fundamental_discriminants",
    "squarefree_flags",
    "omega",
    "omega_y",
    "prime_discriminant_factors",
    "kronecker_row",
    "divisors_from_factorization",
]


# ----------------------------------------------------------------------
# Primes
# ----------------------------------------------------------------------

def sieve_primes(limit: int) -> np.ndarray:
    """All primes <= limit, as an int64 array (Eratosthenes)."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.nonzero(flags)[0].astype(np.int64)


@dataclass(frozen=True)
class PrimeTable:
    """Immutable table of all primes <= limit.

    Safe to share across workers; the census and Euler products all sum
    over this one object.
    """

    limit: int
    primes: np.ndarray

    @classmethod
    def build(cls, limit: int) -> "PrimeTable":
        return cls(limit=limit, primes=sieve_primes(limit))

    def __contains__(self, n: int) -> bool:
        if n > self.limit:
            raise ValueError(f"{n} exceeds table limit {self.limit}")
        i = int(np.searchsorted(self.primes, n))
        return i < len(self.primes) and int(self.primes[i]) == n

    def upto(self, bound: int) -> np.ndarray:
        if bound > self.limit:
            raise ValueError(f"bound {bound} exceeds table limit {self.limit}")
        return self.primes[: int(np.searchsorted(self.primes, bound, side="right"))]


_TABLE_CACHE: dict[str, PrimeTable] = {}


def prime_table(limit: int) -> PrimeTable:
    """Shared grow-only prime table cache."""
    tab = _TABLE_CACHE.get("t")
    if tab is None or tab.limit < limit:
        tab = PrimeTable.build(max(limit, 1 << 16))
        _TABLE_CACHE["t"] = tab
    return tab


# ----------------------------------------------------------------------
# Primality and factorization
# ----------------------------------------------------------------------

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24 (fixed witness set)."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    """A nontrivial factor of composite odd n (Brent's cycle variant)."""
    if n % 2 == 0:
        return 2
    seed = 1
    while True:
        seed += 1
        x = y = 2 + seed
        c = 1 + seed * seed % (n - 1)
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of |n| as {p: exponent}.

    Trial division by table primes up to a small bound, then Pollard rho
    for whatever survives; inputs here never exceed desk scale.
    """
    if n == 0:
        raise ValueError("cannot factor 0")
    n = abs(n)
    out: dict[int, int] = {}
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    if n == 1:
        return out
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack.extend((r, r))
            continue
        d = _pollard_rho(m)
        stack.extend((d, m // d))
    return out


def omega(n: int) -> int:
    """Number of distinct prime divisors of |n|."""
    return len(factorize(n))


def divisors_from_factorization(fac: dict[int, int]) -> list[int]:
    divs = [1]
    for p, e in fac.items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


# ----------------------------------------------------------------------
# Kronecker symbol
# ----------------------------------------------------------------------

def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n), full extension to all integer n.

    (a|0) = 1 iff a = +-1; (a|-1) = sign(a) with (0|-1) = 1; the symbol
    at 2 is 0 for even a and depends on a mod 8 otherwise.
    """
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -1
    if n % 2 == 0:
        if a % 2 == 0:
            return 0
        e = 0
        while n % 2 == 0:
            n //= 2
            e += 1
        if e % 2 == 1 and a % 8 in (3, 5):
            result = -result
    # Jacobi symbol (a|n) for odd positive n
    a %= n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


# ----------------------------------------------------------------------
# Squarefree structure and fundamental discriminants
# ----------------------------------------------------------------------

def squarefree_decompose(n: int) -> tuple[int, int]:
    """Write n = s * f**2 with s squarefree, sign(s) = sign(n)."""
    if n == 0:
        raise ValueError("0 has no squarefree decomposition")
    s, f = 1, 1
    for p, e in factorize(n).items():
        if e % 2 == 1:
            s *= p
        f *= p ** (e // 2)
    return (s if n > 0 else -s), f


def is_squarefree(n: int) -> bool:
    if n == 0:
        return False
    return squarefree_decompose(n)[1] == 1


def fundamental_discriminant_of(d: int) -> int:
    """Discriminant of Q(sqrt(d)) for squarefree d not in {0, 1}."""
    if d in (0, 1):
        raise ValueError(f"degenerate radicand {d}")
    if not is_squarefree(d):
        raise ValueError(f"{d} is not squarefree")
    return d if d % 4 == 1 else 4 * d


def is_fundamental(D: int) -> bool:
    """True iff D is the discriminant of a quadratic field (or could be
    emitted by ``fundamental_discriminant_of``)."""
    if D in (0, 1):
        return False
    if D % 4 == 1:
        return is_squarefree(D)
    if D % 4 != 0:
        return False
    m = D // 4
    return m % 4 in (2, 3) and is_squarefree(m)


def squarefree_flags(limit: int) -> np.ndarray:
    """Boolean array sf[0..limit] with sf[n] = True iff n squarefree."""
    flags = np.ones(limit + 1, dtype=bool)
    flags[0] = False
    for p in range(2, math.isqrt(limit) + 1):
        flags[p * p :: p * p] = False
    return flags


def enumerate_fundamental_discriminants(X: int) -> Iterator[int]:
    """Every fundamental discriminant D with |D| <= X, ordered by |D|
    (positive sign first when both signs occur).

    Driven by a squarefree sieve: for odd squarefree m the fundamental
    discriminant is the one of +-m that is 1 mod 4; for |D| = 4m it is
    4m with m squarefree and m = 2, 3 mod 4.
    """
    if X < 3:
        raise ValueError("X must be at least 3")
    sf = squarefree_flags(X)
    for a in range(3, X + 1):
        if a % 4 == 1 and sf[a]:
            yield a
        if a % 4 == 3 and sf[a]:
            yield -a
        if a % 4 == 0:
            m = a // 4
            if sf[m]:
                if m % 4 in (2, 3):
                    yield a
                if (-m) % 4 in (2, 3):
                    yield -a


def omega_y(D: int, Y: int) -> int:
    """#{p <= Y : p | D}, the truncated distinct-prime counter."""
    if D == 0:
        raise ValueError("omega_y undefined at 0")
    n = abs(D)
    count = 0
    for p in prime_table(max(Y, 2)).upto(Y):
        if n % int(p) == 0:
            count += 1
    return count


# ----------------------------------------------------------------------
# Character value rows
# ----------------------------------------------------------------------

def prime_discriminant_factors(D: int) -> list[int]:
    """Factor a fundamental discriminant into prime discriminants
    (-4, +-8, and (-1)^((l-1)/2) * l for odd primes l)."""
    if not is_fundamental(D):
        raise ValueError(f"{D} is not a fundamental discriminant")
    parts = []
    odd_part = 1
    for p in factorize(D):
        if p == 2:
            continue
        q = p if p % 4 == 1 else -p
        parts.append(q)
        odd_part *= q
    two_part = D // odd_part
    if two_part != 1:
        parts.append(two_part)  # one of -4, 8, -8
    return sorted(parts, key=abs)


def _prime_disc_period(q: int) -> np.ndarray:
    """One period of chi_q(n) for a prime discriminant q, as int8."""
    if q == -4:
        return np.array([0, 1, 0, -1], dtype=np.int8)
    if q == 8:
        return np.array([0, 1, 0, -1, 0, -1, 0, 1], dtype=np.int8)
    if q == -8:
        return np.array([0, 1, 0, 1, 0, -1, 0, -1], dtype=np.int8)
    ell = abs(q)
    row = np.zeros(ell, dtype=np.int8)
    # chi_q(a) = Legendre(a|ell) for odd prime discriminants
    sq = np.unique(np.mod(np.arange(1, ell, dtype=np.int64) ** 2, ell))
    row[1:] = -1
    row[sq] = 1
    return row


def kronecker_row(d_star: int, n_max: int) -> np.ndarray:
    """chi_{d_star}(n) for n = 0..n_max as int8, d_star fundamental or 1.

    Built as the pointwise product of tiled one-period rows of the prime
    discriminants dividing d_star; O(omega * n_max) byte operations.
    """
    if d_star == 1:
        row = np.ones(n_max + 1, dtype=np.int8)
        row[0] = 0
        return row
    out = np.ones(n_max + 1, dtype=np.int8)
    for q in prime_discriminant_factors(d_star):
        period = _prime_disc_period(q)
        reps = n_max // len(period) + 1
        out *= np.tile(period, reps)[: n_max + 1]
    return out
