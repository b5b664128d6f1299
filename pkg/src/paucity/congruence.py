"""Congruence counts for the quadratic forms behind the off-diagonal sieve.

rho(d) counts residue pairs (u, v) mod d with u^2 + v^2 = 0 and gcd(v, d) = 1;
it is multiplicative with rho(p^a) = (1 + chi4(p)) phi(p^a) for odd p and
rho(2) = 1, rho(2^a) = 0 for a >= 2.

nu(delta) counts pairs (n1, n2) mod delta annihilating the product
F = (n2 t - n1 d)(n2 d + n1 t)(n1 d + n2 t) for a fixed coprime pair (t, d).
For a prime p the count depends only on which of the three linear factors
degenerate mod p: each factor is a line (p points) through the origin, lines
are distinct unless d = +-t, d = +-it (i^2 = -1) or td = 0 mod p, and the
closed form follows by inclusion-exclusion over shared lines.  For odd p the
conditions d = +-it and d = +-t cannot hold together (they would force
2t^2 = 0), so a single merged branch is safe; the oracle stays authoritative
in the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import Factorization
from .errors import ValidationError

_NU_ORACLE_CAP = 3000
_RHO_ORACLE_CAP = 10**5


@dataclass(frozen=True)
class CongruenceCount:
    """A counted congruence solution total and how it was obtained."""

    modulus: int
    count: int
    method: str

    def __post_init__(self) -> None:
        if self.method not in ("closed", "oracle"):
            raise ValidationError(f"method must be closed|oracle, got {self.method!r}")
        if not 0 <= self.count <= self.modulus**2:
            raise ValidationError(f"count {self.count} outside [0, {self.modulus}^2]")


@dataclass(frozen=True)
class FormParams:
    """The coprime pair (t, d) fixing the three linear forms."""

    t: int
    d: int

    def __post_init__(self) -> None:
        if self.t < 1 or self.d < 1:
            raise ValidationError(f"(t, d) must be positive, got ({self.t}, {self.d})")
        if math.gcd(self.t, self.d) != 1:
            raise ValidationError(f"(t, d) must be coprime, got ({self.t}, {self.d})")


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def rho_closed(f: Factorization) -> CongruenceCount:
    """rho(d) from the factorization of d, via multiplicativity."""
    count = 1
    for p, e in f.factors:
        r = p & 3
        if r == 1:
            count *= 2 * (p - 1) * p ** (e - 1)
        elif r == 3:
            count = 0
            break
        else:  # p = 2
            if e >= 2:
                count = 0
                break
    return CongruenceCount(modulus=f.value, count=count, method="closed")


def rho_oracle(d: int) -> CongruenceCount:
    """Exhaustive rho(d): counts every residue pair via a bincount of u^2 mod d."""
    if d < 1 or d > _RHO_ORACLE_CAP:
        raise ValidationError(f"rho_oracle needs 1 <= d <= {_RHO_ORACLE_CAP}, got {d}")
    u = np.arange(d, dtype=np.int64)
    squares = np.bincount((u * u) % d, minlength=d)
    v = u[np.gcd(u, d) == 1]
    count = int(squares[(-(v * v)) % d].sum())
    return CongruenceCount(modulus=d, count=count, method="oracle")


def sqrt_minus_one(p: int) -> int | None:
    """The smaller square root of -1 mod p, or None when p = 3 mod 4.

    Small p use direct search; larger p = 1 mod 4 use i = g^((p-1)/4) for a
    quadratic non-residue g found by Euler's criterion.
    """
    if not _is_prime(p) or p == 2:
        raise ValidationError(f"sqrt_minus_one needs an odd prime, got {p}")
    if p & 3 == 3:
        return None
    if p < 10**4:
        for i in range(2, p):
            if (i * i + 1) % p == 0:
                return min(i, p - i)
        raise ValidationError(f"no square root of -1 found mod {p}")  # unreachable
    g = 2
    while pow(g, (p - 1) // 2, p) != p - 1:
        g += 1
    i = pow(g, (p - 1) // 4, p)
    return min(i, p - i)


def nu_prime_closed(p: int, params: FormParams) -> CongruenceCount:
    """nu(p) by the line-counting closed form.

    Cases (conditions mod p): 2 for p = 2 with t, d both odd, 3 for p = 2
    otherwise; for odd p, 2p - 1 when td = 0 or d = +-t or d = +-it, else
    3p - 2 (three distinct lines through the origin).
    """
    if not _is_prime(p):
        raise ValidationError(f"nu_prime_closed needs a prime, got {p}")
    t, d = params.t, params.d
    if p == 2:
        count = 2 if (t & 1) and (d & 1) else 3
        return CongruenceCount(modulus=2, count=count, method="closed")
    tm, dm = t % p, d % p
    if tm == 0 or dm == 0:
        return CongruenceCount(modulus=p, count=2 * p - 1, method="closed")
    merged = dm == tm or dm == p - tm
    if not merged and p & 3 == 1:
        i = sqrt_minus_one(p)
        merged = dm == (i * tm) % p or dm == (-i * tm) % p
    count = 2 * p - 1 if merged else 3 * p - 2
    return CongruenceCount(modulus=p, count=count, method="closed")


def nu_oracle(delta: int, params: FormParams) -> CongruenceCount:
    """Exhaustive nu(delta): scans the full (n1, n2) grid mod delta.

    The linear forms are assembled from pre-reduced vectors (k*t) mod delta
    and (k*d) mod delta, shifted into [0, 2*delta), so the grid pass needs a
    single modulo per pair; 8*delta^3 stays well inside int64.
    """
    if delta < 1 or delta > _NU_ORACLE_CAP:
        raise ValidationError(f"nu_oracle needs 1 <= delta <= {_NU_ORACLE_CAP}, got {delta}")
    n = np.arange(delta, dtype=np.int64)
    vt = (n * params.t) % delta
    vd = (n * params.d) % delta
    count = 0
    chunk = max(1, (1 << 22) // max(delta, 1))
    for start in range(0, delta, chunk):
        rows = slice(start, min(start + chunk, delta))
        prod = vt[None, :] - (vd[rows, None] - delta)
        prod *= vd[None, :] + vt[rows, None]
        prod *= vd[rows, None] + vt[None, :]
        prod %= delta
        count += prod.size - int(np.count_nonzero(prod))
    return CongruenceCount(modulus=delta, count=count, method="oracle")


def nu_closed(delta: int, params: FormParams) -> CongruenceCount:
    """nu(delta) for squarefree delta, as the product of nu(p) over p | delta."""
    if delta < 1:
        raise ValidationError(f"nu_closed needs delta >= 1, got {delta}")
    count = 1
    m = delta
    p = 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                raise ValidationError(f"nu_closed needs squarefree delta, got {delta}")
            count *= nu_prime_closed(p, params).count
        p += 1 if p == 2 else 2
    if m > 1:
        count *= nu_prime_closed(m, params).count
    return CongruenceCount(modulus=delta, count=count, method="closed")
