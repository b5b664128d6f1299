"""Brute-force reference implementations used to pin expected values.

Everything here favours obviousness over speed: trial division, direct
divisor loops, exhaustive residue grids, quadruple loops over prime pairs.
Tests compare the package against these on small ranges; a handful of
frozen dictionaries below record values computed once with this module
(and cross-checked by hand where feasible).
"""

from __future__ import annotations

import math

import numpy as np


def chi4_slow(n: int) -> int:
    return (0, 1, 0, -1)[n % 4]


def is_prime_slow(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def factorize_slow(n: int) -> list[tuple[int, int]]:
    factors = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors.append((p, e))
        p += 1 if p == 2 else 2
    if m > 1:
        factors.append((m, 1))
    return factors


def divisor_chi4_sum_slow(n: int) -> int:
    total = 0
    for d in range(1, n + 1):
        if n % d == 0:
            total += chi4_slow(d)
    return total


def in_a_slow(n: int) -> bool:
    """n composed only of primes congruent to 1 mod 4 (n = 1 included)."""
    return all(p % 4 == 1 for p, _ in factorize_slow(n))


def two_squares_slow(n: int) -> bool:
    """No prime 3 mod 4 to an odd exponent."""
    return all(e % 2 == 0 for p, e in factorize_slow(n) if p % 4 == 3)


def r_arrays_slow(limit: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Representation tallies on [0, limit] by direct enumeration.

    r0_pair counts ordered (a, b) with a, b >= 1 and a^2 + b^2 = n; r1
    additionally needs b prime, r2 needs both prime.  r0_div comes from a
    divisor-stride pass over chi4, a different route from the package's
    prime-power factor sieve.
    """
    r0 = np.zeros(limit + 1, dtype=np.int64)
    r1 = np.zeros(limit + 1, dtype=np.int64)
    r2 = np.zeros(limit + 1, dtype=np.int64)
    prime = [is_prime_slow(k) for k in range(int(math.isqrt(limit)) + 1)]
    a = 1
    while a * a + 1 <= limit:
        b = 1
        while a * a + b * b <= limit:
            n = a * a + b * b
            r0[n] += 1
            if prime[b]:
                r1[n] += 1
                if prime[a]:
                    r2[n] += 1
            b += 1
        a += 1
    r0d = np.zeros(limit + 1, dtype=np.int64)
    for d in range(1, limit + 1):
        c = chi4_slow(d)
        if c:
            r0d[d::d] += c
    r0d[0] = 0
    return r0, r0d, r1, r2


def rho_slow(d: int) -> int:
    """#{(u, v) in [0, d)^2 : gcd(v, d) = 1, u^2 + v^2 = 0 mod d}."""
    count = 0
    for v in range(d):
        if math.gcd(v, d) != 1:
            continue
        w = (-v * v) % d
        for u in range(d):
            if (u * u) % d == w:
                count += 1
    return count


def nu_slow(delta: int, t: int, d: int) -> int:
    """#{(n1, n2) mod delta : (n2 t - n1 d)(n2 d + n1 t)(n1 d + n2 t) = 0 mod delta}."""
    count = 0
    for n1 in range(delta):
        for n2 in range(delta):
            f1 = (n2 * t - n1 * d) % delta
            f2 = (n2 * d + n1 * t) % delta
            f3 = (n1 * d + n2 * t) % delta
            if (f1 * f2 * f3) % delta == 0:
                count += 1
    return count


def offdiag_census_slow(limit: int) -> dict:
    """Census of a^2 + p^2 = q^2 + r^2 = n <= limit, a >= 1, p/q/r prime.

    Collects canonical solutions (q <= r) and the class counts; N doubles
    the q < r rows to account for both (q, r) orders.
    """
    root = math.isqrt(limit - 1) if limit > 1 else 1
    primes = [k for k in range(2, root + 1) if is_prime_slow(k)]
    sols = []
    for qi, q in enumerate(primes):
        for r in primes[qi:]:
            n = q * q + r * r
            if n > limit:
                break
            for p in primes:
                aa = n - p * p
                if aa < 1:
                    break
                a = math.isqrt(aa)
                if a * a == aa and sorted((a, p)) != [q, r]:
                    sols.append((a, p, q, r, n))
    counts = {"n1": 0, "n1p": 0, "n1pp": 0, "deg": 0}
    for a, p, q, r, n in sols:
        if a == p or q == r or a < 3 or p == 2 or q == 2:
            counts["deg"] += 1
        elif 2 < a < q < r < p:
            counts["n1"] += 1
        elif 2 < p < q < r < a:
            counts["n1pp"] += 1
        elif q < min(a, p) and max(a, p) < r:
            counts["n1p"] += 1
    counts["canon"] = len(sols)
    counts["N"] = 2 * sum(1 for s in sols if s[2] != s[3]) + sum(
        1 for s in sols if s[2] == s[3]
    )
    sols.sort(key=lambda t: (t[4], t[0]))
    return {"counts": counts, "quadruples": sols}


def exceptional_slow(limit: int) -> tuple[int, int, int]:
    """Double-loop counts over odd prime pairs r < p <= sqrt(limit)."""
    root = math.isqrt(limit)
    odd = [p for p in range(3, root + 1) if is_prime_slow(p)]
    eps = math.sqrt(limit) / math.log(limit) ** 10
    p1 = sum(1 for i, r in enumerate(odd) for p in odd[i + 1 :] if r <= eps)
    p2 = sum(1 for i, r in enumerate(odd) for p in odd[i + 1 :] if p - r < eps)
    p3 = sum(1 for i, r in enumerate(odd) for p in odd[i + 1 :] if p > root - eps)
    return p1, p2, p3


# Frozen values computed with this module (spot-checked by hand for the
# smallest cases, e.g. 50 = 1 + 49 = 25 + 25 is the only collision below 100).
FROZEN_R2_SUPPORT_30 = {8: 1, 13: 2, 18: 1, 29: 2}
FROZEN_CENSUS = {
    1000: {"N": 67, "n1": 3, "n1p": 11, "n1pp": 5, "deg": 17, "canon": 36},
    10000: {"N": 680, "n1": 59, "n1p": 157, "n1pp": 82, "deg": 48, "canon": 346},
    100000: {"N": 6521, "n1": 633, "n1p": 1637, "n1pp": 856, "deg": 151, "canon": 3277},
}
FROZEN_PARTITION = {
    49: {"s12": 14, "diagonal": 14, "offdiag": 0, "s22": 14},
    50: {"s12": 16, "diagonal": 15, "offdiag": 1, "s22": 15},
}
