"""Segmented sieves for primes and the representation tallies.

Per block [lo, hi) this produces four 16-bit arrays indexed by n - lo:

* r0_pair: ordered pairs (a, b), a, b >= 1, with a^2 + b^2 = n
* r1:      ordered pairs (a, p), a >= 1, p prime
* r2:      ordered pairs (p, q), both prime
* r0_div:  sum_{d | n} chi4(d), the divisor-sum variant of r0

The two r0 conventions differ exactly on perfect squares (r0_div counts the
d = sqrt(n) diagonal divisor pairing); both are carried so mean values can
be reported under either.
"""

from __future__ import annotations

import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import BinaryIO, Iterable, Iterator

import numpy as np

from .errors import CapacityError, TallyOverflowError, ValidationError

# A full boolean sieve at this cap costs ~1 GB; beyond it, refuse.
MAX_SIEVE_LIMIT = 10**9

_MAGIC = b"PCTY"
_VERSION = 1
_HEADER = struct.Struct("<4sIQQ")


@dataclass(frozen=True)
class PrimeTable:
    """All primes up to `limit`: sorted array plus membership bitmap."""

    limit: int
    primes: np.ndarray
    is_prime: np.ndarray

    @property
    def count(self) -> int:
        return int(self.primes.size)


@dataclass(frozen=True)
class SieveConfig:
    """Run geometry: overall limit, block width, worker thread count."""

    limit: int
    block_size: int = 1 << 20
    thread_count: int = 1

    def __post_init__(self) -> None:
        if self.limit < 1:
            raise ValidationError(f"limit must be >= 1, got {self.limit}")
        if self.limit > MAX_SIEVE_LIMIT:
            raise CapacityError(f"limit {self.limit} exceeds cap {MAX_SIEVE_LIMIT}")
        if self.block_size < 2:
            raise ValidationError(f"block_size must be >= 2, got {self.block_size}")
        if self.thread_count < 1:
            raise ValidationError(f"thread_count must be >= 1, got {self.thread_count}")


@dataclass(frozen=True)
class RepresentationBlock:
    """Tallies for the half-open range [lo, hi), arrays indexed by n - lo."""

    lo: int
    hi: int
    r0_pair: np.ndarray
    r0_div: np.ndarray
    r1: np.ndarray
    r2: np.ndarray

    def __post_init__(self) -> None:
        if self.lo < 1 or self.hi <= self.lo:
            raise ValidationError(f"bad block range [{self.lo}, {self.hi})")
        width = self.hi - self.lo
        for field in ("r0_pair", "r0_div", "r1", "r2"):
            arr = getattr(self, field)
            if arr.shape != (width,):
                raise ValidationError(f"{field} has shape {arr.shape}, expected ({width},)")
            if arr.dtype != np.uint16:
                raise ValidationError(f"{field} dtype {arr.dtype}, expected uint16")


def sieve_primes(limit: int) -> PrimeTable:
    """Eratosthenes up to `limit` inclusive."""
    if limit < 2:
        raise ValidationError(f"sieve_primes needs limit >= 2, got {limit}")
    if limit > MAX_SIEVE_LIMIT:
        raise CapacityError(f"sieve limit {limit} exceeds cap {MAX_SIEVE_LIMIT}")
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return PrimeTable(limit=limit, primes=np.flatnonzero(mask), is_prime=mask)


def _check_tally(name: str, arr: np.ndarray, lo: int) -> np.ndarray:
    peak = int(arr.max(initial=0))
    if peak >= 1 << 16:
        n = lo + int(arr.argmax())
        raise TallyOverflowError(f"{name}({n}) = {peak} exceeds 16-bit tally range")
    return arr.astype(np.uint16)


def _pair_tallies(lo: int, hi: int, primes: PrimeTable) -> tuple[np.ndarray, ...]:
    width = hi - lo
    r0 = np.zeros(width, dtype=np.int32)
    r1 = np.zeros(width, dtype=np.int32)
    r2 = np.zeros(width, dtype=np.int32)
    is_p = primes.is_prime
    amax = math.isqrt(hi - 1)
    for a in range(1, amax + 1):
        a2 = a * a
        bhi = math.isqrt(hi - 1 - a2) if a2 < hi - 1 else 0
        if a2 >= lo - 1:
            blo = 1
        else:
            blo = math.isqrt(lo - 1 - a2) + 1
        if blo > bhi:
            continue
        b = np.arange(blo, bhi + 1, dtype=np.int64)
        idx = a2 + b * b - lo
        r0[idx] += 1
        prime_b = idx[is_p[b]]
        r1[prime_b] += 1
        if is_p[a]:
            r2[prime_b] += 1
    return r0, r1, r2


def _divisor_tallies(lo: int, hi: int, primes: PrimeTable) -> np.ndarray:
    width = hi - lo
    top = hi - 1
    amax = math.isqrt(top)
    val = np.arange(lo, hi, dtype=np.int64)
    r0d = np.ones(width, dtype=np.int64)
    exp = np.zeros(width, dtype=np.int16)
    cut = int(np.searchsorted(primes.primes, amax, side="right"))
    for p in primes.primes[:cut].tolist():
        first = (-lo) % p
        if first >= width:
            continue
        pk = p
        while True:
            start = (-lo) % pk
            if start < width:
                exp[start::pk] += 1
            if pk > top // p:
                break
            pk *= p
        sl = slice(first, width, p)
        e = exp[sl].astype(np.int64)
        val[sl] //= np.power(np.int64(p), e)
        r = p & 3
        if r == 1:
            r0d[sl] *= e + 1
        elif r == 3:
            r0d[sl] *= 1 - (e & 1)
        exp[sl] = 0
    # What survives is 1 or a single prime above sqrt(hi-1).
    big = val > 1
    left = val & 3
    r0d[big & (left == 1)] *= 2
    r0d[big & (left == 3)] = 0
    return r0d


def sieve_block(cfg: SieveConfig, lo: int, hi: int, primes: PrimeTable) -> RepresentationBlock:
    """Tally r0_pair, r0_div, r1, r2 for [lo, hi).

    Parameters
    ----------
    cfg : SieveConfig
        Supplies the overall limit bound; 1 <= lo < hi <= cfg.limit + 1.
    lo, hi : int
        Half-open block bounds.
    primes : PrimeTable
        Must cover floor(sqrt(hi - 1)).

    Returns
    -------
    RepresentationBlock

    Raises
    ------
    TallyOverflowError
        If any tally would exceed 16 bits (never silently saturates).
    """
    if lo < 1 or hi <= lo or hi > cfg.limit + 1:
        raise ValidationError(f"block [{lo}, {hi}) out of range for limit {cfg.limit}")
    if primes.limit < math.isqrt(hi - 1):
        raise ValidationError(
            f"prime table limit {primes.limit} below sqrt({hi - 1})"
        )
    r0, r1, r2 = _pair_tallies(lo, hi, primes)
    r0d = _divisor_tallies(lo, hi, primes)
    return RepresentationBlock(
        lo=lo,
        hi=hi,
        r0_pair=_check_tally("r0_pair", r0, lo),
        r0_div=_check_tally("r0_div", r0d, lo),
        r1=_check_tally("r1", r1, lo),
        r2=_check_tally("r2", r2, lo),
    )


def _block_bounds(cfg: SieveConfig) -> list[tuple[int, int]]:
    bounds = []
    lo = 1
    while lo <= cfg.limit:
        hi = min(lo + cfg.block_size, cfg.limit + 1)
        bounds.append((lo, hi))
        lo = hi
    return bounds


def sieve_all(cfg: SieveConfig) -> Iterator[RepresentationBlock]:
    """Stream RepresentationBlocks covering [1, limit] in ascending order.

    Blocks are independent work units; with thread_count > 1 they are computed
    on a pool but always yielded in ascending order, so downstream accumulation
    is invariant under both block_size and thread_count.
    """
    primes = sieve_primes(max(2, math.isqrt(cfg.limit)))
    bounds = _block_bounds(cfg)
    if cfg.thread_count == 1:
        for lo, hi in bounds:
            yield sieve_block(cfg, lo, hi, primes)
        return
    window = 2 * cfg.thread_count
    with ThreadPoolExecutor(max_workers=cfg.thread_count) as pool:
        pending = []
        it = iter(bounds)
        for lo, hi in it:
            pending.append(pool.submit(sieve_block, cfg, lo, hi, primes))
            if len(pending) >= window:
                break
        for lo, hi in it:
            yield pending.pop(0).result()
            pending.append(pool.submit(sieve_block, cfg, lo, hi, primes))
        for fut in pending:
            yield fut.result()


def write_blocks(handle: BinaryIO, blocks: Iterable[RepresentationBlock]) -> int:
    """Dump blocks to an open binary file; returns the number written.

    Record layout: magic "PCTY", version u32, lo u64, hi u64, then the four
    u16 little-endian arrays r0_pair, r0_div, r1, r2.
    """
    count = 0
    for blk in blocks:
        handle.write(_HEADER.pack(_MAGIC, _VERSION, blk.lo, blk.hi))
        for arr in (blk.r0_pair, blk.r0_div, blk.r1, blk.r2):
            handle.write(np.ascontiguousarray(arr, dtype="<u2").tobytes())
        count += 1
    return count


def read_blocks(handle: BinaryIO) -> Iterator[RepresentationBlock]:
    """Read back a block dump produced by write_blocks."""
    while True:
        head = handle.read(_HEADER.size)
        if not head:
            return
        magic, version, lo, hi = _HEADER.unpack(head)
        if magic != _MAGIC or version != _VERSION:
            raise ValidationError(f"bad block header: magic={magic!r} version={version}")
        width = hi - lo
        arrays = []
        for _ in range(4):
            raw = handle.read(2 * width)
            if len(raw) != 2 * width:
                raise ValidationError("truncated block payload")
            arrays.append(np.frombuffer(raw, dtype="<u2").copy())
        yield RepresentationBlock(lo, hi, *arrays)
