"""Checkpointed accumulation of every reported sum.

Integer statistics (the S_{i,j}, first moments, support and Landau counts)
accumulate exactly in 64-bit.  Harmonic-weighted and squared-residual sums
accumulate on a fixed absolute grid of cut points (64 Ki atoms plus the
checkpoint edges) with Neumaier compensation between cuts, so the result is
bit-identical for every block size and thread count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Iterable, Iterator, Sequence

import numpy as np

from .arith import SpfTable, factor_scan
from .constants import normalized_value, predicted_constant
from .errors import CapacityError, ValidationError
from .sieve import RepresentationBlock, sieve_primes

_ATOM = 1 << 16
_SCAN_CHUNK = 1 << 18
_PARTITION_CAP = 2 * 10**7

INTEGER_STATISTICS = (
    "S00",
    "S01",
    "S02",
    "S11",
    "S12",
    "S22",
    "M1",
    "M2",
    "R2CUBE",
    "SUPP1",
    "SUPP2",
)


@dataclass(frozen=True)
class CheckpointGrid:
    """Strictly increasing evaluation points, all >= 2."""

    points: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.points:
            raise ValidationError("checkpoint grid must be nonempty")
        if any(p < 2 for p in self.points):
            raise ValidationError(f"checkpoints must be >= 2, got {self.points}")
        if any(b <= a for a, b in zip(self.points, self.points[1:])):
            raise ValidationError(f"checkpoints must increase strictly: {self.points}")

    @classmethod
    def geometric(cls, limit: int, ratio: int = 10, start: int = 1000) -> "CheckpointGrid":
        """Default decade grid: start, start*ratio, ... capped and closed at limit."""
        if limit < 2:
            raise ValidationError(f"grid limit must be >= 2, got {limit}")
        pts = []
        x = start
        while x <= limit:
            pts.append(x)
            x *= ratio
        if not pts or pts[-1] != limit:
            pts.append(limit)
        return cls(points=tuple(pts))


@dataclass(frozen=True)
class MeanValueSeries:
    """Per-checkpoint partial sums of one statistic up to `limit`."""

    statistic: str
    values: tuple
    limit: int

    def __post_init__(self) -> None:
        if not self.statistic:
            raise ValidationError("statistic name must be non-empty")
        if not self.values:
            raise ValidationError(f"series {self.statistic} has no values")
        if self.limit < 1:
            raise ValidationError(f"limit must be >= 1, got {self.limit}")


@dataclass(frozen=True)
class PartitionReport:
    """Exact split of S_{1,2}(x) into diagonal and off-diagonal solutions."""

    x: int
    s12: int
    diagonal: int
    offdiag: int
    s22: int

    def __post_init__(self) -> None:
        if self.s12 != self.diagonal + self.offdiag:
            raise ValidationError(
                f"partition broken: {self.s12} != {self.diagonal} + {self.offdiag}"
            )


class _IntAccumulator:
    """Exact segment sums between checkpoints."""

    def __init__(self, points: Sequence[int]):
        self.points = points
        self.ci = 0
        self.total = 0
        self.out: list[int] = []

    def feed(self, lo: int, terms: np.ndarray) -> None:
        end = lo + terms.size
        off = 0
        while self.ci < len(self.points) and self.points[self.ci] < end:
            cut = self.points[self.ci] + 1 - lo
            self.total += int(terms[off:cut].sum())
            off = cut
            self.out.append(self.total)
            self.ci += 1
        self.total += int(terms[off:].sum())


class _FloatAccumulator:
    """Deterministic float accumulation over a fixed absolute cut grid.

    Incoming fragments are buffered and flushed at cut points (multiples of
    the atom width, plus each checkpoint edge).  Every flushed interval has
    partition-independent content, and intervals merge in ascending order
    under Neumaier compensation, so totals never depend on how the range was
    split across blocks or threads.
    """

    def __init__(self, points: Sequence[int]):
        self.points = points
        self.ci = 0
        self.total = 0.0
        self.comp = 0.0
        self.buf: list[np.ndarray] = []
        self.start = 0
        self.size = 0
        self.out: list[float] = []

    def _add(self, x: float) -> None:
        s = self.total + x
        if abs(self.total) >= abs(x):
            self.comp += (self.total - s) + x
        else:
            self.comp += (x - s) + self.total
        self.total = s

    def _flush_to(self, cut: int) -> None:
        take = cut - self.start
        if take > 0:
            if len(self.buf) == 1:
                chunk = self.buf[0][:take]
                rest = self.buf[0][take:]
                self.buf = [rest] if rest.size else []
            else:
                merged = np.concatenate(self.buf)
                chunk = merged[:take]
                rest = merged[take:]
                self.buf = [rest] if rest.size else []
            self._add(float(np.sum(chunk)))
            self.start = cut
            self.size -= take

    def feed(self, lo: int, terms: np.ndarray) -> None:
        if not self.buf:
            self.start = lo
            self.size = 0
        self.buf.append(terms)
        self.size += terms.size
        end = self.start + self.size
        while True:
            atom_cut = ((self.start // _ATOM) + 1) * _ATOM
            ck_cut = self.points[self.ci] + 1 if self.ci < len(self.points) else None
            cut = atom_cut if ck_cut is None else min(atom_cut, ck_cut)
            if cut > end:
                break
            self._flush_to(cut)
            if ck_cut is not None and cut == ck_cut:
                self.out.append(self.total + self.comp)
                self.ci += 1

    def finish(self) -> None:
        self._flush_to(self.start + self.size)


def _r0_array(block: RepresentationBlock, convention: str) -> np.ndarray:
    if convention == "pair":
        return block.r0_pair
    if convention == "div":
        return block.r0_div
    raise ValidationError(f"unknown r0 convention {convention!r}")


def _block_terms(
    block: RepresentationBlock, stat: str, convention: str, c: float
) -> np.ndarray:
    r0 = _r0_array(block, convention).astype(np.int64)
    r1 = block.r1.astype(np.int64)
    r2 = block.r2.astype(np.int64)
    if stat == "S00":
        return r0 * r0
    if stat == "S01":
        return r0 * r1
    if stat == "S02":
        return r0 * r2
    if stat == "S11":
        return r1 * r1
    if stat == "S12":
        return r1 * r2
    if stat == "S22":
        return r2 * r2
    if stat == "M1":
        return r1
    if stat == "M2":
        return r2
    if stat == "R2CUBE":
        return r2 * r2 * r2
    if stat == "SUPP1":
        return (r1 > 0).astype(np.int64)
    if stat == "SUPP2":
        return (r2 > 0).astype(np.int64)
    if stat == "DISPERSION":
        n = np.arange(block.lo, block.hi, dtype=np.float64)
        res = r1 - c * r0 / np.log(np.maximum(n, 2.0))
        if block.lo == 1:
            res[0] = 0.0  # sum starts at n = 2
        return res * res
    raise ValidationError(f"unknown statistic {stat!r}")


def accumulate(
    blocks: Iterable[RepresentationBlock],
    grid: CheckpointGrid,
    statistics: Sequence[str],
    r0_convention: str = "pair",
    dispersion_c: float = 1.0,
) -> list[MeanValueSeries]:
    """Exact partial sums of the requested statistics at every checkpoint.

    Blocks must arrive in ascending order covering [1, limit] with
    limit >= the last checkpoint; S01/S02/S00/DISPERSION use r0 under the
    given convention ("pair" or "div").
    """
    stats = list(statistics)
    if not stats:
        raise ValidationError("no statistics requested")
    seen = set()
    for s in stats:
        if s in seen:
            raise ValidationError(f"duplicate statistic {s!r}")
        seen.add(s)
    if dispersion_c < 0:
        raise ValidationError(f"dispersion c must be >= 0, got {dispersion_c}")
    accs: dict[str, _IntAccumulator | _FloatAccumulator] = {}
    for s in stats:
        if s == "DISPERSION":
            accs[s] = _FloatAccumulator(grid.points)
        elif s in INTEGER_STATISTICS:
            accs[s] = _IntAccumulator(grid.points)
        else:
            raise ValidationError(f"unknown statistic {s!r}")
    expected = 1
    covered = 0
    for block in blocks:
        if block.lo != expected:
            raise ValidationError(f"blocks out of order: expected lo={expected}, got {block.lo}")
        expected = block.hi
        covered = block.hi - 1
        for s in stats:
            accs[s].feed(block.lo, _block_terms(block, s, r0_convention, dispersion_c))
    if covered < grid.points[-1]:
        raise ValidationError(
            f"checkpoint {grid.points[-1]} beyond covered range [1, {covered}]"
        )
    out = []
    for s in stats:
        acc = accs[s]
        label = f"DISPERSION(c={dispersion_c:g})" if s == "DISPERSION" else s
        out.append(MeanValueSeries(statistic=label, values=tuple(acc.out), limit=covered))
    return out


def support_counts(
    blocks: Iterable[RepresentationBlock], grid: CheckpointGrid
) -> tuple[MeanValueSeries, MeanValueSeries]:
    """#{n <= x: r1(n) > 0} and #{n <= x: r2(n) > 0} per checkpoint."""
    pair = accumulate(blocks, grid, ["SUPP1", "SUPP2"])
    return pair[0], pair[1]


def dispersion(
    c: float, blocks: Iterable[RepresentationBlock], grid: CheckpointGrid,
    r0_convention: str = "pair",
) -> MeanValueSeries:
    """sum_{2<=n<=x} (r1(n) - c*r0(n)/log n)^2 with deterministic float accumulation."""
    return accumulate(
        blocks, grid, ["DISPERSION"], r0_convention=r0_convention, dispersion_c=c
    )[0]


def lemma_sums(
    limit: int, grid: CheckpointGrid, spf: SpfTable
) -> tuple[MeanValueSeries, MeanValueSeries]:
    """sum_{n<=x} 2^omega(n) f_A(n)/n and the phi-weighted twin, per checkpoint.

    Compensated summation in ascending n; f_A(1) = 1 contributes 1 to both.
    """
    if limit < 2 or limit > spf.limit:
        raise ValidationError(f"lemma_sums needs 2 <= limit <= {spf.limit}, got {limit}")
    if grid.points[-1] > limit:
        raise ValidationError(f"checkpoint {grid.points[-1]} beyond limit {limit}")
    acc31 = _FloatAccumulator(grid.points)
    acc32 = _FloatAccumulator(grid.points)
    for lo in range(1, limit + 1, _SCAN_CHUNK):
        hi = min(lo + _SCAN_CHUNK, limit + 1)
        scan = factor_scan(lo, hi, spf)
        weight = np.where(scan.in_a, np.exp2(scan.omega.astype(np.float64)), 0.0)
        n = np.arange(lo, hi, dtype=np.float64)
        acc31.feed(lo, weight / n)
        acc32.feed(lo, weight / scan.phi.astype(np.float64))
    return (
        MeanValueSeries("LEMMA31", tuple(acc31.out), limit),
        MeanValueSeries("LEMMA32", tuple(acc32.out), limit),
    )


def landau_counts(
    limit: int, grid: CheckpointGrid, spf: SpfTable
) -> tuple[MeanValueSeries, MeanValueSeries]:
    """sum_{n<=x} b(n) and #{n <= x: n in A} per checkpoint (exact integers)."""
    if limit < 2 or limit > spf.limit:
        raise ValidationError(f"landau_counts needs 2 <= limit <= {spf.limit}, got {limit}")
    if grid.points[-1] > limit:
        raise ValidationError(f"checkpoint {grid.points[-1]} beyond limit {limit}")
    acc_b = _IntAccumulator(grid.points)
    acc_a = _IntAccumulator(grid.points)
    for lo in range(1, limit + 1, _SCAN_CHUNK):
        hi = min(lo + _SCAN_CHUNK, limit + 1)
        scan = factor_scan(lo, hi, spf)
        acc_b.feed(lo, scan.b.astype(np.int64))
        acc_a.feed(lo, scan.in_a.astype(np.int64))
    return (
        MeanValueSeries("LANDAU_B", tuple(acc_b.out), limit),
        MeanValueSeries("COUNT_A", tuple(acc_a.out), limit),
    )


def partition_s12(limit: int) -> PartitionReport:
    """Exact diagonal/off-diagonal split of S_{1,2}(limit).

    The diagonal counts quadruples ((a,p),(q,r)) with {a,p} = {q,r} as
    multisets: whenever a is prime, the matching (q,r) orderings contribute
    1 (a = p) or 2 (a != p); this is exact even where some r2(n) >= 3, where
    the popular sum r2(n)^2 proxy (reported as s22) overcounts.
    """
    if limit < 1:
        raise ValidationError(f"partition_s12 needs limit >= 1, got {limit}")
    if limit > _PARTITION_CAP:
        raise CapacityError(f"partition_s12 limit {limit} exceeds cap {_PARTITION_CAP}")
    root = math.isqrt(limit - 1) if limit > 1 else 1
    table = sieve_primes(max(root, 2))
    primes = table.primes.tolist()
    is_p = table.is_prime
    counts: dict[int, int] = {}
    for q in primes:
        qq = q * q
        if qq + 4 > limit:
            break
        for r in primes:
            n = qq + r * r
            if n > limit:
                break
            counts[n] = counts.get(n, 0) + 1
    s12 = 0
    diag = 0
    for p in primes:
        pp = p * p
        if pp + 1 > limit:
            break
        for a in range(1, math.isqrt(limit - pp) + 1):
            c = counts.get(pp + a * a, 0)
            if c:
                s12 += c
                if is_p[a]:
                    diag += 1 if a == p else 2
    s22 = sum(c * c for c in counts.values())
    return PartitionReport(
        x=limit, s12=s12, diagonal=diag, offdiag=s12 - diag, s22=s22
    )


def divisor_split(n: int, A_exponent: float = 6.0, x: int | None = None) -> tuple[int, int, int]:
    """Split sum_{d|n} chi4(d) across the ranges cut at sqrt(n)/log^A x and sqrt(n)*log^A x.

    Returns (sigma1, sigma2, sigma3) with sigma1 over d <= sqrt(n)/log^A x,
    sigma2 over the middle range, sigma3 over d > sqrt(n)*log^A x; the three
    always add up to divisor_chi4_sum(n) exactly.
    """
    if n < 1:
        raise ValidationError(f"divisor_split needs n >= 1, got {n}")
    if A_exponent < 0:
        raise ValidationError(f"A_exponent must be >= 0, got {A_exponent}")
    if x is None:
        x = n
    if x < n or x < 2:
        raise ValidationError(f"divisor_split needs x >= max(n, 2), got x={x}, n={n}")
    spread = math.log(x) ** A_exponent
    b1 = math.sqrt(n) / spread
    b2 = math.sqrt(n) * spread
    s1 = s2 = s3 = 0
    for d in range(1, math.isqrt(n) + 1):
        if n % d:
            continue
        for div in {d, n // d}:
            r = div & 3
            ch = 1 if r == 1 else (-1 if r == 3 else 0)
            if div <= b1:
                s1 += ch
            elif div <= b2:
                s2 += ch
            else:
                s3 += ch
    return s1, s2, s3


def write_csv(handle: IO[str], series_list: Sequence[MeanValueSeries], grid: CheckpointGrid) -> None:
    """One row per (statistic, checkpoint): x, statistic, raw_value, normalized_value, predicted_constant, deviation.

    Floats use 15 significant digits; statistics without a proven constant
    carry nan in the last two columns.  Output is plain '\\n'-terminated text
    so reruns are byte-comparable.
    """
    handle.write("x,statistic,raw_value,normalized_value,predicted_constant,deviation\n")
    for series in series_list:
        if len(series.values) != len(grid.points):
            raise ValidationError(
                f"series {series.statistic} has {len(series.values)} values "
                f"for {len(grid.points)} checkpoints"
            )
        const = predicted_constant(series.statistic)
        for x, raw in zip(grid.points, series.values):
            norm = normalized_value(series.statistic, x, float(raw))
            if const is None:
                pred_s = dev_s = "nan"
            else:
                pred_s = f"{const:.15g}"
                dev_s = f"{norm - const:.15g}"
            raw_s = str(raw) if isinstance(raw, int) else f"{raw:.15g}"
            handle.write(
                f"{x},{series.statistic},{raw_s},{norm:.15g},{pred_s},{dev_s}\n"
            )


def read_csv(handle: IO[str]) -> list[dict]:
    """Parse a CSV produced by write_csv back into row dicts."""
    header = handle.readline().strip()
    expected = "x,statistic,raw_value,normalized_value,predicted_constant,deviation"
    if header != expected:
        raise ValidationError(f"unexpected CSV header: {header!r}")
    rows = []
    for line in handle:
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 6:
            raise ValidationError(f"malformed CSV row: {line!r}")
        rows.append(
            {
                "x": int(parts[0]),
                "statistic": parts[1],
                "raw_value": float(parts[2]),
                "normalized_value": float(parts[3]),
                "predicted_constant": float(parts[4]),
                "deviation": float(parts[5]),
            }
        )
    return rows
