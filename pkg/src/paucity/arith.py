"""Elementary multiplicative machinery shared by every other module.

Everything here is exact integer arithmetic: the non-principal character
mod 4, smallest-prime-factor tables, factorizations, and the multiplicative
functions omega, tau, phi, the sum-of-two-squares indicator b(n), the
indicator of the set A (all prime factors 1 mod 4), and the divisor sum
sum_{d | n} chi4(d).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ValidationError

# Hard cap for table builds; a table of this size costs ~4 GB of int32.
MAX_TABLE_LIMIT = 1 << 30


def chi4(n: int) -> int:
    """Non-principal Dirichlet character mod 4: 1, 0, -1, 0 on 1, 2, 3, 0 mod 4."""
    if n < 1:
        raise ValidationError(f"chi4 needs n >= 1, got {n}")
    r = n & 3
    if r == 1:
        return 1
    if r == 3:
        return -1
    return 0


@dataclass(frozen=True)
class Factorization:
    """Prime factorization of `value` as an ascending tuple of (prime, exponent)."""

    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.value < 1:
            raise ValidationError(f"value must be >= 1, got {self.value}")
        prev = 1
        prod = 1
        for p, e in self.factors:
            if p <= prev:
                raise ValidationError(f"factors of {self.value} not strictly ascending")
            if e < 1:
                raise ValidationError(f"exponent {e} of prime {p} must be >= 1")
            prev = p
            prod *= p**e
        if prod != self.value:
            raise ValidationError(f"factors multiply to {prod}, not {self.value}")


@dataclass(frozen=True)
class SpfTable:
    """Smallest-prime-factor table for 2..limit; spf[p] = p exactly when p is prime.

    Entries 0 and 1 are sentinels (0) and must not be consulted.
    """

    limit: int
    spf: np.ndarray


def build_spf_table(limit: int) -> SpfTable:
    """Sieve smallest prime factors up to `limit` (inclusive).

    Parameters
    ----------
    limit : int
        Largest value the table can factor, >= 2.

    Returns
    -------
    SpfTable
    """
    if limit < 2:
        raise ValidationError(f"spf table needs limit >= 2, got {limit}")
    if limit > MAX_TABLE_LIMIT:
        raise CapacityError(f"spf table limit {limit} exceeds cap {MAX_TABLE_LIMIT}")
    spf = np.zeros(limit + 1, dtype=np.int32)
    spf[2::2] = 2
    for p in range(3, math.isqrt(limit) + 1, 2):
        if spf[p] == 0:
            sl = spf[p * p :: 2 * p]
            sl[sl == 0] = p
    # Whatever is still unset is an odd prime above sqrt(limit) (or 1).
    rest = np.flatnonzero(spf == 0)
    rest = rest[rest >= 2]
    spf[rest] = rest
    return SpfTable(limit=limit, spf=spf)


def factorize(n: int, table: SpfTable) -> Factorization:
    """Factor n by walking the smallest-prime-factor table.

    Accepts 1 <= n <= table.limit; n = 1 yields the empty factorization.
    """
    if n < 1 or n > table.limit:
        raise ValidationError(f"factorize needs 1 <= n <= {table.limit}, got {n}")
    spf = table.spf
    factors: list[tuple[int, int]] = []
    m = n
    while m > 1:
        p = int(spf[m])
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        factors.append((p, e))
    return Factorization(value=n, factors=tuple(factors))


def omega(f: Factorization) -> int:
    """Number of distinct prime factors."""
    return len(f.factors)


def tau(f: Factorization) -> int:
    """Number of divisors."""
    out = 1
    for _, e in f.factors:
        out *= e + 1
    return out


def phi(f: Factorization) -> int:
    """Euler totient."""
    out = 1
    for p, e in f.factors:
        out *= (p - 1) * p ** (e - 1)
    return out


def in_A(f: Factorization) -> bool:
    """True when every prime factor is 1 mod 4 (vacuously true at n = 1)."""
    return all(p & 3 == 1 for p, _ in f.factors)


def is_sum_two_squares(f: Factorization) -> bool:
    """b(n): n is a sum of two integer squares, i.e. every p = 3 mod 4 has even exponent."""
    return all(e & 1 == 0 for p, e in f.factors if p & 3 == 3)


def divisor_chi4_sum(f: Factorization) -> int:
    """sum_{d | n} chi4(d), multiplicatively: (e+1) at p=1(4), parity gate at p=3(4)."""
    out = 1
    for p, e in f.factors:
        r = p & 3
        if r == 1:
            out *= e + 1
        elif r == 3 and e & 1 == 1:
            return 0
    return out


@dataclass(frozen=True)
class FactorScan:
    """Vectorized multiplicative data for a half-open range [lo, hi).

    Arrays are indexed by n - lo and hold omega(n), phi(n), b(n) and the
    indicator of n in A.  Used by the mean-value engines that need these
    values for every n up to 1e7 without per-n Python work.
    """

    lo: int
    hi: int
    omega: np.ndarray
    phi: np.ndarray
    b: np.ndarray
    in_a: np.ndarray


def factor_scan(lo: int, hi: int, table: SpfTable) -> FactorScan:
    """Compute omega, phi, b and the A-indicator for every n in [lo, hi).

    Parameters
    ----------
    lo, hi : int
        Half-open range with 1 <= lo < hi <= table.limit + 1.
    table : SpfTable
        Must cover hi - 1.

    Returns
    -------
    FactorScan

    Notes
    -----
    Walks smallest prime factors over the whole range at once: each round
    strips the full power of the current smallest prime from every still
    active entry, so the number of rounds is max omega(n), about 8 at 1e7.
    """
    if lo < 1 or hi <= lo:
        raise ValidationError(f"factor_scan needs 1 <= lo < hi, got [{lo}, {hi})")
    if hi - 1 > table.limit:
        raise ValidationError(f"factor_scan range end {hi} exceeds table limit {table.limit}")
    width = hi - lo
    spf = table.spf
    val = np.arange(lo, hi, dtype=np.int64)
    om = np.zeros(width, dtype=np.int16)
    ph = np.ones(width, dtype=np.int64)
    b = np.ones(width, dtype=bool)
    ina = np.ones(width, dtype=bool)
    active = np.flatnonzero(val > 1)
    while active.size:
        v = val[active]
        p = spf[v].astype(np.int64)
        e = np.ones(active.size, dtype=np.int64)
        v //= p
        idx = np.flatnonzero(v % p == 0)
        while idx.size:
            v[idx] //= p[idx]
            e[idx] += 1
            idx = idx[v[idx] % p[idx] == 0]
        res = p & 3
        om[active] += 1
        ph[active] *= (p - 1) * np.power(p, e - 1)
        ina[active] &= res == 1
        b[active] &= (res != 3) | (e & 1 == 0)
        val[active] = v
        active = active[v > 1]
    return FactorScan(lo=lo, hi=hi, omega=om, phi=ph, b=b, in_a=ina)
