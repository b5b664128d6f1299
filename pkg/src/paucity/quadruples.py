"""Census and parametrization of off-diagonal solutions of a^2+p^2 = q^2+r^2.

A solution quadruple (a, p, q, r) in N x P^3 with common value n <= limit is
off-diagonal when {a,p} != {q,r} as multisets.  N counts ordered quadruples
(both orderings of (q, r)); classification works on the normalized form
q <= r, where exactly one of the following holds for every non-degenerate
off-diagonal solution (degenerate: a = p, q = r, or a coordinate below 3):

* N1:   2 < a < q < r < p        (q, r nest inside (a, p), a < p)
* N1'': 2 < p < q < r < a        (mirror: the interval (p, a) read as (min, max))
* N1':  q < min(a, p), max(a, p) < r

The trichotomy is forced: max(a,p) = max(q,r) would make the solution
diagonal, and whichever of the two maxima is larger, the sum constraint nests
the other pair strictly inside its interval.

N1 quadruples biject with tuples (d, t, n1, n2) of positive integers,
gcd(d,t) = gcd(n1,n2) = 1, through r = n2*t - n1*d, q = n2*d + n1*t,
p = n1*d + n2*t, a = n1*t - n2*d; both directions are implemented and the
two independent enumerations must agree exactly.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ValidationError
from .sieve import PrimeTable, sieve_primes

_ENUM_CAP = 10**7
_ELL_CAP = 10**6
_COLLECT_CAP = 10**5


@dataclass(frozen=True)
class Quadruple:
    """One off-diagonal solution a^2 + p^2 = q^2 + r^2 = n."""

    a: int
    p: int
    q: int
    r: int
    n: int

    def __post_init__(self) -> None:
        if self.a * self.a + self.p * self.p != self.n or self.q * self.q + self.r * self.r != self.n:
            raise ValidationError(f"not a solution: {self}")
        if sorted((self.a, self.p)) == sorted((self.q, self.r)):
            raise ValidationError(f"diagonal quadruple: {self}")


@dataclass(frozen=True)
class ParamTuple:
    """The (d, t, n1, n2) coordinates of an N1 quadruple."""

    d: int
    t: int
    n1: int
    n2: int

    def __post_init__(self) -> None:
        if min(self.d, self.t, self.n1, self.n2) < 1:
            raise ValidationError(f"ParamTuple needs positive entries: {self}")
        if math.gcd(self.d, self.t) != 1:
            raise ValidationError(f"gcd(d, t) != 1 in {self}")
        if math.gcd(self.n1, self.n2) != 1:
            raise ValidationError(f"gcd(n1, n2) != 1 in {self}")


@dataclass(frozen=True)
class OffdiagCensus:
    """Counts from enumerate_offdiag; classification is over normalized q <= r."""

    limit: int
    n: int
    n1: int
    n1_prime: int
    n1_double_prime: int
    degenerate_count: int
    n_canonical: int
    quadruples: tuple[Quadruple, ...] | None


@dataclass(frozen=True)
class ParamCensus:
    """Counts from the (d, t, n1, n2)-side enumeration of N1."""

    limit: int
    n1: int
    tuples: tuple[ParamTuple, ...] | None


@dataclass(frozen=True)
class EllReport:
    """Substitution check 4*l1*l2 = p^2 - r^2 over every N1 quadruple."""

    limit: int
    n1_count: int
    ell_pairs: int
    violations: int


@dataclass(frozen=True)
class ExceptionalReport:
    """Sizes of the discarded prime-pair classes over 2 < r < p <= sqrt(limit)."""

    limit: int
    p1: int
    p2: int
    p3: int
    total_upper: int


def _prime_pair_table(limit: int, table: PrimeTable) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Ordered prime pairs (q, r) with q^2 + r^2 <= limit, sorted by the sum."""
    primes = table.primes
    qs, rs = [], []
    for q in primes.tolist():
        if q * q + 4 > limit:
            break
        rmax = math.isqrt(limit - q * q)
        cnt = int(np.searchsorted(primes, rmax, side="right"))
        if cnt == 0:
            continue
        qs.append(np.full(cnt, q, dtype=np.int64))
        rs.append(primes[:cnt].astype(np.int64))
    if not qs:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, empty
    q_arr = np.concatenate(qs)
    r_arr = np.concatenate(rs)
    n_arr = q_arr * q_arr + r_arr * r_arr
    order = np.argsort(n_arr, kind="stable")
    return n_arr[order], q_arr[order], r_arr[order]


def _probe_chunk(
    p_list: list[int], limit: int, ns: np.ndarray, qs: np.ndarray, rs: np.ndarray
) -> list[np.ndarray]:
    """Match every (a, p) with p in p_list against the (q, r) table."""
    cols: list[list[np.ndarray]] = [[], [], [], [], []]
    for p in p_list:
        pp = p * p
        if pp + 1 > limit:
            break
        a = np.arange(1, math.isqrt(limit - pp) + 1, dtype=np.int64)
        n = pp + a * a
        lo = np.searchsorted(ns, n, side="left")
        hi = np.searchsorted(ns, n, side="right")
        cnt = hi - lo
        total = int(cnt.sum())
        if total == 0:
            continue
        pos = np.arange(total) - np.repeat(np.cumsum(cnt) - cnt, cnt) + np.repeat(lo, cnt)
        cols[0].append(np.repeat(a, cnt))
        cols[1].append(np.full(total, p, dtype=np.int64))
        cols[2].append(qs[pos])
        cols[3].append(rs[pos])
        cols[4].append(np.repeat(n, cnt))
    return [
        np.concatenate(c) if c else np.zeros(0, dtype=np.int64) for c in cols
    ]


def enumerate_offdiag(
    limit: int, collect: bool = True, thread_count: int = 1
) -> OffdiagCensus:
    """Exhaustive census of off-diagonal solutions up to `limit`.

    Builds the multiset of prime-pair sums q^2 + r^2 once, then probes every
    (a, p) against it; the probe phase may be partitioned across threads with
    a deterministic ordered merge.  The quadruple list (normalized q <= r) is
    attached when collect=True and at most 1e5 solutions exist.
    """
    if limit < 1:
        raise ValidationError(f"enumerate_offdiag needs limit >= 1, got {limit}")
    if limit > _ENUM_CAP:
        raise CapacityError(f"enumerate_offdiag limit {limit} exceeds budget {_ENUM_CAP}")
    table = sieve_primes(max(math.isqrt(max(limit - 1, 1)), 2))
    ns, qs, rs = _prime_pair_table(limit, table)
    p_values = [p for p in table.primes.tolist() if p * p + 1 <= limit]
    if thread_count <= 1 or len(p_values) < 4:
        parts = [_probe_chunk(p_values, limit, ns, qs, rs)]
    else:
        chunks = [p_values[i::thread_count] for i in range(thread_count)]
        # Round-robin chunks keep sizes balanced; merge order is fixed below.
        with ThreadPoolExecutor(max_workers=thread_count) as pool:
            parts = list(pool.map(lambda c: _probe_chunk(c, limit, ns, qs, rs), chunks))
    a_arr = np.concatenate([p[0] for p in parts])
    p_arr = np.concatenate([p[1] for p in parts])
    q_arr = np.concatenate([p[2] for p in parts])
    r_arr = np.concatenate([p[3] for p in parts])
    n_arr = np.concatenate([p[4] for p in parts])
    diagonal = ((a_arr == q_arr) & (p_arr == r_arr)) | ((a_arr == r_arr) & (p_arr == q_arr))
    off = ~diagonal
    n_total = int(np.count_nonzero(off))
    canon = off & (q_arr <= r_arr)
    deg = canon & (
        (a_arr == p_arr) | (q_arr == r_arr) | (a_arr < 3) | (p_arr == 2) | (q_arr == 2)
    )
    chain = (q_arr < r_arr) & canon
    n1_mask = chain & (2 < a_arr) & (a_arr < q_arr) & (r_arr < p_arr)
    n1pp_mask = chain & (2 < p_arr) & (p_arr < q_arr) & (r_arr < a_arr)
    n1p_mask = (
        chain
        & (q_arr > 2)
        & (a_arr != p_arr)
        & (q_arr < a_arr)
        & (q_arr < p_arr)
        & (a_arr < r_arr)
        & (p_arr < r_arr)
    )
    n_canonical = int(np.count_nonzero(canon))
    quadruples: tuple[Quadruple, ...] | None = None
    if collect and n_canonical <= _COLLECT_CAP:
        idx = np.flatnonzero(canon)
        idx = idx[np.lexsort((a_arr[idx], n_arr[idx]))]
        quadruples = tuple(
            Quadruple(int(a_arr[i]), int(p_arr[i]), int(q_arr[i]), int(r_arr[i]), int(n_arr[i]))
            for i in idx
        )
    return OffdiagCensus(
        limit=limit,
        n=n_total,
        n1=int(np.count_nonzero(n1_mask)),
        n1_prime=int(np.count_nonzero(n1p_mask)),
        n1_double_prime=int(np.count_nonzero(n1pp_mask)),
        degenerate_count=int(np.count_nonzero(deg)),
        n_canonical=n_canonical,
        quadruples=quadruples,
    )


def param_apply(pt: ParamTuple) -> tuple[int, int, int, int]:
    """The four linear forms (x1, x2, x3, x4) = (r, q, p, a); x1^2+x2^2 = x3^2+x4^2."""
    d, t, n1, n2 = pt.d, pt.t, pt.n1, pt.n2
    if n2 * t <= n1 * d or n1 * t <= n2 * d:
        raise ValidationError(f"positivity violated for {pt}")
    return (n2 * t - n1 * d, n2 * d + n1 * t, n1 * d + n2 * t, n1 * t - n2 * d)


def param_invert(quad: Quadruple) -> ParamTuple:
    """Invert an N1 quadruple (2 < a < q < r < p) to its unique ParamTuple."""
    a, p, q, r = quad.a, quad.p, quad.q, quad.r
    if not (2 < a < q < r < p):
        raise ValidationError(f"param_invert needs 2 < a < q < r < p, got {quad}")
    if (p - r) & 1 or (q - a) & 1:
        raise ValidationError(f"parity failure in {quad}: p=r, q=a mod 2 required")
    m1 = (p - r) // 2
    m2 = (q - a) // 2
    d = math.gcd(m1, m2)
    n1 = m1 // d
    n2 = m2 // d
    if (q + a) % (2 * n1):
        raise ValidationError(f"non-integral t for {quad} (inversion bug)")
    t = (q + a) // (2 * n1)
    pt = ParamTuple(d=d, t=t, n1=n1, n2=n2)
    if param_apply(pt) != (r, q, p, a):
        raise ValidationError(f"round trip failed for {quad} -> {pt} (inversion bug)")
    return pt


def enumerate_n1_params(limit: int, collect: bool = False) -> ParamCensus:
    """Count N1 quadruples from the (d, t, n1, n2) side, independently.

    Loops coprime (d, t) with t > d (q < r forces it), then sweeps the
    admissible (n1, n2) lattice windows in vectorized form.  Constraints:
    three prime forms, gcd(n1, n2) = 1, a = n1*t - n2*d >= 3,
    q < r via n2(t-d) > n1(t+d), and the exact cut p^2 + a^2 <= limit.
    """
    if limit < 1:
        raise ValidationError(f"enumerate_n1_params needs limit >= 1, got {limit}")
    if limit > _ENUM_CAP:
        raise CapacityError(f"enumerate_n1_params limit {limit} exceeds budget {_ENUM_CAP}")
    s = math.isqrt(max(limit - 9, 0))
    if s < 3:
        return ParamCensus(limit=limit, n1=0, tuples=() if collect else None)
    is_p = sieve_primes(s).is_prime
    total = 0
    found: list[ParamTuple] = []
    base = np.arange(0, s + 2, dtype=np.int64)
    for d in range(1, (s - 1) // 2 + 1):
        for t in range(d + 1, s - d + 1):
            if math.gcd(t, d) != 1:
                continue
            n1_top = (s - t) // d
            if n1_top < 1:
                break
            n1 = base[1 : n1_top + 1]
            lo2 = n1 * (t + d) // (t - d) + 1
            hi2 = np.minimum((s - n1 * d) // t, (n1 * t - 3) // d)
            keep = lo2 <= hi2
            if not keep.any():
                continue
            n1 = n1[keep]
            lo2 = lo2[keep]
            cnt = hi2[keep] - lo2 + 1
            n1r = np.repeat(n1, cnt)
            start = np.cumsum(cnt) - cnt
            n2r = np.arange(int(cnt.sum()), dtype=np.int64) - np.repeat(start, cnt) + np.repeat(lo2, cnt)
            r_f = n2r * t - n1r * d
            q_f = n2r * d + n1r * t
            p_f = n1r * d + n2r * t
            a_f = n1r * t - n2r * d
            ok = is_p[r_f] & is_p[q_f] & is_p[p_f]
            ok &= np.gcd(n1r, n2r) == 1
            ok &= p_f * p_f + a_f * a_f <= limit
            total += int(np.count_nonzero(ok))
            if collect:
                for i in np.flatnonzero(ok):
                    found.append(ParamTuple(d=d, t=t, n1=int(n1r[i]), n2=int(n2r[i])))
    return ParamCensus(limit=limit, n1=total, tuples=tuple(found) if collect else None)


def _is_prime_slow(n: int) -> bool:
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


def check_ell_pair(a: int, p: int, q: int, r: int, limit: int) -> int:
    """Number of violated l-substitution conditions for one quadruple.

    With 2*l1 = q - a and 2*l2 = q + a the conditions are: integrality of
    l1, l2; l1 < l2; l1 + l2 an odd prime; 4*l1*l2 = p^2 - r^2; and
    (l2 - l1)^2 + p^2 <= limit.
    """
    bad = 0
    if (q - a) & 1:
        bad += 1
    if not q - a < q + a:
        bad += 1
    if not (_is_prime_slow(q) and q != 2):
        bad += 1
    if (q - a) * (q + a) != p * p - r * r:
        bad += 1
    if a * a + p * p > limit:
        bad += 1
    return bad


def change_of_variables_check(limit: int) -> EllReport:
    """Verify the l-substitution on every N1 quadruple below `limit`."""
    if limit > _ELL_CAP:
        raise CapacityError(f"change_of_variables_check limit {limit} exceeds {_ELL_CAP}")
    census = enumerate_offdiag(limit, collect=True)
    if census.quadruples is None:
        raise CapacityError("quadruple list above collection cap")
    ells = set()
    violations = 0
    n1_count = 0
    for quad in census.quadruples:
        if not (2 < quad.a < quad.q < quad.r < quad.p):
            continue
        n1_count += 1
        violations += check_ell_pair(quad.a, quad.p, quad.q, quad.r, limit)
        # (l1, l2) alone is not injective (several (r, p) can share one
        # difference p^2 - r^2); the substituted image keeps (p, r).
        ells.add(((quad.q - quad.a) // 2, (quad.q + quad.a) // 2, quad.p, quad.r))
    return EllReport(limit=limit, n1_count=n1_count, ell_pairs=len(ells), violations=violations)


def exceptional_set_count(limit: int) -> ExceptionalReport:
    """Exact sizes of the three discarded prime-pair classes.

    Over pairs 2 < r < p <= sqrt(limit) with eps = sqrt(limit)/log(limit)^10:
    P1: r <= eps; P2: p - r < eps; P3: p > sqrt(limit) - eps.
    """
    if limit < 10**4:
        raise ValidationError(f"exceptional_set_count needs limit >= 1e4, got {limit}")
    root = math.isqrt(limit)
    eps = math.sqrt(limit) / math.log(limit) ** 10
    primes = sieve_primes(root).primes
    odd = primes[primes > 2].astype(np.int64)
    count = odd.size
    if count == 0:
        return ExceptionalReport(limit, 0, 0, 0, 0)
    idx = np.arange(count)
    k1 = int(np.searchsorted(odd, eps, side="right"))
    p1 = int(k1 * (count - 1) - (k1 * (k1 - 1)) // 2)
    near = np.searchsorted(odd, odd + eps, side="left") - (idx + 1)
    p2 = int(np.maximum(near, 0).sum())
    k3 = int(np.searchsorted(odd, root - eps, side="right"))
    p3 = int(idx[k3:].sum())
    return ExceptionalReport(limit, p1, p2, p3, p1 + p2 + p3)
