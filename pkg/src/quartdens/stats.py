"""Statistics of L(1, chi) over quadratic character families and of the
truncated prime counter omega_Y over fundamental discriminants.

Everything here is an empirical, desk-scale verification: second moments
of log L(1, chi) over the real characters mod D computed two ways (exact
L-values versus truncated prime sums), Chebyshev-style proportion
bounds that hold exactly as finite statements, and a block-sieved census
of omega_Y over all fundamental |D| <= X with its mean and variance
compared to the sum_p 1/(p+1) main terms.

The census writes a compact binary run file (16-byte header: magic,
version, Y, X; then one (int64 D, uint8 omega) record per discriminant)
so repeated statistics at different thresholds reuse a single pass.
"""

from __future__ import annotations

import math
import os
import struct
from dataclasses import dataclass, field

import numpy as np

from .arith import omega_y, prime_table, _prime_disc_period, factorize
from .dirichlet import (
    CharFamily,
    QuadChar,
    is_exceptional,
    l1_value,
    log_l1_truncated,
    quadratic_characters_mod,
)

__all__ = [
    "MomentReport",
    "DiscStats",
    "second_moment",
    "lower_bound_proportion",
    "omega_census",
    "exceptional_fraction",
    "typical_chi_experiment",
    "TypicalChiSummary",
    "family_log_l1_truncated",
]

_CACHE_MAGIC = b"QDEN"
_CACHE_VERSION = 1


# ----------------------------------------------------------------------
# Second moment of log L(1, chi)
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class MomentReport:
    modulus: int
    family_size: int  # #V, nonprincipal members
    second_moment_exact: float
    second_moment_truncated: float
    T: float
    Y: int
    bound_envelope: float


def family_log_l1_truncated(family: CharFamily, T: float) -> np.ndarray:
    """log L(1, chi) truncated at T for every nonprincipal member,
    vectorized over the prime table via the tiled period rows."""
    primes = prime_table(int(T)).upto(int(math.ceil(T)))
    primes = primes[primes < T]
    inv_p = 1.0 / primes.astype(np.float64)
    D = family.modulus
    div_mask = np.array([D % int(p) == 0 for p in primes])
    out = np.zeros(len(family.V))
    small = primes[primes.astype(np.float64) ** 2 < T]
    for i, chi in enumerate(family.V):
        vals = _char_on_values(chi.conductor, primes)
        vals = np.where(div_mask, 0, vals)
        total = float(np.dot(vals, inv_p))
        # prime-power corrections p^k < T, k >= 2
        for j, p in enumerate(small.tolist()):
            v = int(vals[j])
            if v == 0:
                continue
            pk = p * p
            k = 2
            while pk < T:
                total += (v**k) / (k * pk)
                k += 1
                pk *= p
        out[i] = total
    return out


def _char_on_values(conductor: int, n: np.ndarray) -> np.ndarray:
    """chi_{conductor}(n) for an array of positive integers."""
    from .arith import prime_discriminant_factors

    if conductor == 1:
        return np.ones(len(n), dtype=np.int8)
    out = np.ones(len(n), dtype=np.int8)
    for q in prime_discriminant_factors(conductor):
        period = _prime_disc_period(q)
        out *= period[np.mod(n, len(period))]
    return out


def second_moment(D: int, Y: int, T: float = 10**6) -> MomentReport:
    """Second moment of log L(1, chi) over the nonprincipal real
    characters mod D, by exact L-values and by truncated prime sums."""
    if Y > D:
        raise ValueError("need Y <= D")
    fam = quadratic_characters_mod(D)
    V = [chi for chi in fam.V if not is_exceptional(chi)]
    if len(V) < 1:
        raise ValueError(f"family mod {D} has no usable characters")
    logs = np.array([math.log(l1_value(chi)) for chi in V])
    exact = float(np.mean(logs**2))
    trunc_vals = family_log_l1_truncated(fam, T)
    truncated = float(np.mean(trunc_vals**2))
    om = omega_y(D, Y)
    lld = math.log(math.log(D))
    envelope = lld * (math.log(max(om, 1)) + math.log(math.log(max(Y, 3)))) + (
        lld**2 / 2**om
    )
    return MomentReport(
        modulus=D,
        family_size=len(V),
        second_moment_exact=exact,
        second_moment_truncated=truncated,
        T=T,
        Y=Y,
        bound_envelope=envelope,
    )


def lower_bound_proportion(D: int, k: float, Y: int) -> tuple[float, float]:
    """(threshold, fraction of the family with L(1,chi) >= threshold)
    for threshold exp(-k sigma); Chebyshev about zero guarantees the
    fraction is at least 1 - 1/k^2."""
    rep = second_moment(D, Y)
    sigma = math.sqrt(rep.second_moment_exact)
    threshold = math.exp(-k * sigma)
    fam = quadratic_characters_mod(D)
    V = [chi for chi in fam.V if not is_exceptional(chi)]
    count = sum(1 for chi in V if l1_value(chi) >= threshold)
    return threshold, count / len(V)


# ----------------------------------------------------------------------
# omega_Y census over fundamental discriminants
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class DiscStats:
    X: int
    Y: int
    count: int
    empirical_mean: float
    empirical_variance: float
    theoretical_mean: float
    theoretical_variance: float
    histogram: tuple[int, ...]  # counts by omega_Y value

    def exceedance(self, k: float) -> float:
        """Fraction with |omega - empirical mean| >= k * empirical sigma."""
        mu = self.empirical_mean
        sigma = math.sqrt(self.empirical_variance)
        total = 0
        for om, cnt in enumerate(self.histogram):
            if abs(om - mu) >= k * sigma - 1e-12:
                total += cnt
        return total / self.count


def theoretical_moments(Y: int) -> tuple[float, float]:
    ps = prime_table(max(Y, 2)).upto(Y)
    terms = 1.0 / (ps.astype(np.float64) + 1.0)
    return float(np.sum(terms)), float(np.sum(terms * (1.0 - terms)))


_BLOCK = 1 << 20


def _census_blocks(X: int, Y: int):
    """Yield (n0, weights, omegas) per block: weights[n] = number of
    signs s with s*(n0+n) a fundamental discriminant, omegas = omega_Y."""
    small = prime_table(max(math.isqrt(X), Y, 2))
    sieve_ps = small.upto(math.isqrt(X)).tolist()
    omega_ps = small.upto(Y).tolist()
    for n0 in range(0, X + 1, _BLOCK):
        hi = min(n0 + _BLOCK, X + 1)
        size = hi - n0
        idx = np.arange(n0, hi, dtype=np.int64)
        sf = np.ones(size, dtype=bool)
        if n0 == 0:
            sf[0] = False
            sf[1] = False  # D = 1 is not a discriminant
        for p in sieve_ps:
            pp = p * p
            start = (-n0) % pp
            sf[start::pp] = False
        om = np.zeros(size, dtype=np.uint8)
        for p in omega_ps:
            start = (-n0) % p
            om[start::p] += 1
        mod4 = np.mod(idx, 4)
        w = np.zeros(size, dtype=np.uint8)
        w[(mod4 == 1) & sf] += 1  # +n fundamental
        w[(mod4 == 3) & sf] += 1  # -n fundamental
        # n = 4m: need m squarefree and m = 2,3 (for +) / 1,2 (for -) mod 4
        quarter = idx[mod4 == 0] // 4
        if len(quarter):
            qpos = np.flatnonzero(mod4 == 0)
            qsf = np.ones(len(quarter), dtype=bool)
            for p in sieve_ps:
                pp = p * p
                qsf &= np.mod(quarter, pp) != 0
            qm4 = np.mod(quarter, 4)
            w[qpos] += ((qm4 == 2) | (qm4 == 3)) & qsf
            w[qpos] += ((qm4 == 1) | (qm4 == 2)) & qsf
        yield n0, idx, w, om


def omega_census(X: int, Y: int, cache_path: str | None = None) -> DiscStats:
    """Exact mean/variance/histogram of omega_Y over all fundamental
    discriminants with |D| <= X (both signs), by block sieve.

    Requires Y <= sqrt(X) (variance hypothesis).  A cache file, when
    given, is reused if its header matches and written otherwise.
    """
    if Y > math.isqrt(X):
        raise ValueError("need Y <= sqrt(X)")
    if cache_path and os.path.exists(cache_path):
        loaded = _read_census(cache_path, X, Y)
        if loaded is not None:
            return loaded
    n = 0
    s1 = 0.0
    s2 = 0.0
    hist = np.zeros(64, dtype=np.int64)
    records = [] if cache_path else None
    for n0, idx, w, om in _census_blocks(X, Y):
        wf = w.astype(np.float64)
        omf = om.astype(np.float64)
        n += int(w.sum())
        s1 += float(np.dot(wf, omf))
        s2 += float(np.dot(wf, omf * omf))
        np.add.at(hist, om, w.astype(np.int64))
        if records is not None:
            records.append((idx, w, om))
    mean = s1 / n
    var = s2 / n - mean * mean
    tmean, tvar = theoretical_moments(Y)
    stats = DiscStats(
        X=X,
        Y=Y,
        count=n,
        empirical_mean=mean,
        empirical_variance=var,
        theoretical_mean=tmean,
        theoretical_variance=tvar,
        histogram=tuple(int(c) for c in hist),
    )
    if cache_path:
        _write_census(cache_path, X, Y, records)
    return stats


def _signed_discs(idx: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Expand census weights back into signed fundamental discriminants,
    ordered by |D| with the positive sign first."""
    mod4 = np.mod(idx, 4)
    out = []
    for i in np.flatnonzero(w):
        n = int(idx[i])
        m4 = int(mod4[i])
        if m4 == 1:
            out.append(n)
        elif m4 == 3:
            out.append(-n)
        else:
            qm4 = (n // 4) % 4
            if qm4 in (2, 3):
                out.append(n)
            if qm4 in (1, 2):
                out.append(-n)
    return np.array(out, dtype=np.int64)


def _write_census(path: str, X: int, Y: int, blocks) -> None:
    with open(path, "wb") as fh:
        fh.write(struct.pack("<4sHHQ", _CACHE_MAGIC, _CACHE_VERSION, Y, X))
        for idx, w, om in blocks:
            discs = _signed_discs(idx, w)
            if len(discs) == 0:
                continue
            oms = om[np.abs(discs) - idx[0]].astype(np.uint8)
            rec = np.zeros(len(discs), dtype=[("D", "<i8"), ("om", "u1")])
            rec["D"] = discs
            rec["om"] = oms
            rec.tofile(fh)


def _read_census(path: str, X: int, Y: int) -> DiscStats | None:
    with open(path, "rb") as fh:
        head = fh.read(16)
        if len(head) != 16:
            return None
        magic, version, y, x = struct.unpack("<4sHHQ", head)
        if magic != _CACHE_MAGIC or version != _CACHE_VERSION or x != X or y != Y:
            return None
        rec = np.fromfile(fh, dtype=[("D", "<i8"), ("om", "u1")])
    om = rec["om"].astype(np.float64)
    n = len(om)
    mean = float(om.mean())
    var = float(om.var())
    hist = np.zeros(64, dtype=np.int64)
    np.add.at(hist, rec["om"], 1)
    tmean, tvar = theoretical_moments(Y)
    return DiscStats(
        X=X,
        Y=Y,
        count=n,
        empirical_mean=mean,
        empirical_variance=var,
        theoretical_mean=tmean,
        theoretical_variance=tvar,
        histogram=tuple(int(c) for c in hist),
    )


def exceptional_fraction(X: int, k: float, cache_path: str | None = None) -> float:
    """Fraction of fundamental |D| <= X with |omega_Y - mu| >= k sigma,
    Y = log X; bounded by 1/k^2 plus discretization slack."""
    if X < 100:
        raise ValueError("X too small")
    Y = max(2, int(math.log(X)))
    stats = omega_census(X, Y, cache_path)
    return stats.exceedance(k)


# ----------------------------------------------------------------------
# Per-discriminant character families
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class TypicalChiSummary:
    X: int
    c: float
    eps: float
    sample: tuple[int, ...]
    fractions: tuple[float, ...]
    median_fraction: float
    min_fraction: float


def typical_chi_experiment(
    X: int, sample: int = 12, c: float = 1.0, eps: float = 0.05
) -> TypicalChiSummary:
    """Over a deterministic sample of fundamental discriminants |D| <= X,
    the per-D fraction of real characters mod |D| with
    L(1, chi) >= exp(-c (log log |D|)^(1 - log2/2 + eps))."""
    if X < 100:
        raise ValueError("X too small for a meaningful sample")
    targets = [max(16, int((j + 0.5) * X / sample)) for j in range(sample)]
    discs = [_first_fundamental_at_least(t, X) for t in targets]
    discs = [D for D in discs if D is not None]
    exponent = 1 - math.log(2) / 2 + eps
    fractions = []
    for D in discs:
        fam = quadratic_characters_mod(abs(D))
        V = [chi for chi in fam.V if not is_exceptional(chi)]
        thr = math.exp(-c * math.log(math.log(abs(D))) ** exponent)
        frac = sum(1 for chi in V if l1_value(chi) >= thr) / len(V)
        fractions.append(frac)
    fr = sorted(fractions)
    return TypicalChiSummary(
        X=X,
        c=c,
        eps=eps,
        sample=tuple(discs),
        fractions=tuple(fractions),
        median_fraction=fr[len(fr) // 2],
        min_fraction=fr[0],
    )


def _first_fundamental_at_least(t: int, X: int) -> int | None:
    from .arith import is_fundamental

    for a in range(t, X + 1):
        if is_fundamental(a):
            return a
        if is_fundamental(-a):
            return -a
    return None
