"""Command-line surface: batch experiments, CSV outputs, JSON run manifests.

Subcommands: sieve, mean, constants, congruence, offdiag, report.  Exit code
0 on success, 2 on validation errors (including argparse failures), 3 on
capacity/overflow errors.  PAUCITY_THREADS overrides --threads; every output
lands under --out-dir.  CSVs are deterministic (byte-identical across thread
counts and block sizes); manifests carry timestamps and are not.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .arith import build_spf_table
from .congruence import FormParams, nu_closed, nu_oracle, rho_closed, rho_oracle
from .constants import (
    catalan,
    landau_ramanujan,
    normalized_value,
    predicted_constant,
    sieve_density_product,
)
from .errors import CapacityError, PaucityError, ValidationError
from .meanvalue import (
    CheckpointGrid,
    MeanValueSeries,
    accumulate,
    landau_counts,
    lemma_sums,
    partition_s12,
    read_csv,
    write_csv,
)
from .quadruples import enumerate_n1_params, enumerate_offdiag
from .sieve import SieveConfig, sieve_all, write_blocks
from . import arith

_BLOCK_STATS = (
    "S00", "S01", "S02", "S11", "S12", "S22",
    "M1", "M2", "R2CUBE", "SUPP1", "SUPP2", "DISPERSION",
)
_SCAN_STATS = ("LEMMA31", "LEMMA32", "LANDAU_B", "COUNT_A")
_ALL_STATS = _BLOCK_STATS + _SCAN_STATS

_CENSUS_NOTE = (
    "classification over normalized quadruples (q <= r); N1'' interval (p,a) "
    "read as (min,max); ties and coordinates < 3 routed to degenerate_count"
)


@dataclass(frozen=True)
class RunManifest:
    """What ran, with what configuration, and what it produced."""

    command: str
    argv: list[str]
    config: dict
    started: str
    finished: str
    version: str
    outputs: list[str]


def _timestamp() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime())


def _write_manifest(out_dir: Path, name: str, manifest: RunManifest) -> Path:
    path = out_dir / f"{name}_manifest.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(dataclasses.asdict(manifest), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _thread_count(args: argparse.Namespace) -> int:
    env = os.environ.get("PAUCITY_THREADS")
    if env is not None:
        try:
            value = int(env)
        except ValueError as exc:
            raise ValidationError(f"PAUCITY_THREADS must be an integer, got {env!r}") from exc
        if value < 1:
            raise ValidationError(f"PAUCITY_THREADS must be >= 1, got {value}")
        return value
    return args.threads


def _parse_grid(spec: str, limit: int) -> CheckpointGrid:
    kind, _, rest = spec.partition(":")
    if kind == "geometric":
        ratio = int(rest) if rest else 10
        if ratio < 2:
            raise ValidationError(f"grid ratio must be >= 2, got {ratio}")
        return CheckpointGrid.geometric(limit, ratio=ratio)
    if kind == "explicit":
        if not rest:
            raise ValidationError("explicit grid needs comma-separated points")
        points = tuple(int(tok) for tok in rest.split(","))
        if points and points[-1] > limit:
            raise ValidationError(f"grid point {points[-1]} exceeds limit {limit}")
        return CheckpointGrid(points=points)
    raise ValidationError(f"unknown grid spec {spec!r} (use geometric:R or explicit:p1,p2,...)")


def _parse_stats(spec: str) -> list[str]:
    if spec.strip().lower() == "all":
        return list(_ALL_STATS)
    stats = [tok.strip() for tok in spec.split(",") if tok.strip()]
    if not stats:
        raise ValidationError("no statistics requested")
    for s in stats:
        if s not in _ALL_STATS:
            raise ValidationError(f"unknown statistic {s!r}; known: {', '.join(_ALL_STATS)}")
    return stats


def _cmd_sieve(args: argparse.Namespace, out_dir: Path) -> list[str]:
    threads = _thread_count(args)
    cfg = SieveConfig(limit=args.limit, block_size=args.block_size, thread_count=threads)
    outputs = []
    dump_path = out_dir / "blocks.pcty"
    with open(dump_path, "wb") as fh:
        count = write_blocks(fh, sieve_all(cfg))
    outputs.append(dump_path.name)
    print(f"sieved [1, {args.limit}] into {count} blocks -> {dump_path}")
    return outputs


def _cmd_mean(args: argparse.Namespace, out_dir: Path) -> list[str]:
    threads = _thread_count(args)
    if args.limit < 2:
        raise ValidationError(f"limit must be >= 2, got {args.limit}")
    stats = _parse_stats(args.stats)
    grid = _parse_grid(args.grid, args.limit)
    block_stats = [s for s in stats if s in _BLOCK_STATS]
    scan_stats = [s for s in stats if s in _SCAN_STATS]
    series: dict[str, MeanValueSeries] = {}
    if block_stats:
        cfg = SieveConfig(limit=args.limit, block_size=args.block_size, thread_count=threads)
        for s in accumulate(
            sieve_all(cfg), grid, block_stats,
            r0_convention=args.r0_convention, dispersion_c=args.dispersion_c,
        ):
            series[s.statistic] = s
    if scan_stats:
        spf = build_spf_table(args.limit)
        if "LEMMA31" in scan_stats or "LEMMA32" in scan_stats:
            l31, l32 = lemma_sums(args.limit, grid, spf)
            series[l31.statistic] = l31
            series[l32.statistic] = l32
        if "LANDAU_B" in scan_stats or "COUNT_A" in scan_stats:
            lb, ca = landau_counts(args.limit, grid, spf)
            series[lb.statistic] = lb
            series[ca.statistic] = ca
    ordered = []
    for s in stats:
        key = f"DISPERSION(c={args.dispersion_c:g})" if s == "DISPERSION" else s
        if key in series:
            ordered.append(series[key])
    csv_path = out_dir / "mean.csv"
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        write_csv(fh, ordered, grid)
    print(f"wrote {len(ordered)} series at {len(grid.points)} checkpoints -> {csv_path}")
    return [csv_path.name]


def _cmd_constants(args: argparse.Namespace, out_dir: Path) -> list[str]:
    rows = []
    g = catalan(args.eps)
    k1 = landau_ramanujan(args.prime_limit, form="1mod4")
    k3 = landau_ramanujan(args.prime_limit, form="3mod4")
    rows.append(("G", g.value, g.error_bound, g.method))
    rows.append(("K", k1.value, k1.error_bound, k1.method))
    rows.append(("K_alt", k3.value, k3.error_bound, k3.method))
    pi = math.pi
    derived = [
        ("12G/pi^2", 12 * g.value / pi**2, 12 * g.error_bound / pi**2),
        ("12G/pi^3", 12 * g.value / pi**3, 12 * g.error_bound / pi**3),
        ("pi/2", pi / 2, 1e-16),
        ("2pi", 2 * pi, 1e-16),
        ("1/pi", 1 / pi, 1e-16),
        ("1/(4K)", 1 / (4 * k1.value), k1.error_bound),
    ]
    rows.extend((name, val, err, "derived") for name, val, err in derived)
    for z in args.z:
        v = sieve_density_product(z)
        rows.append((v.name, v.value, v.error_bound, v.method))
        rows.append((f"V({z:g})*log(z)^3", v.value * math.log(z) ** 3, v.error_bound, "derived"))
    csv_path = out_dir / "constants.csv"
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("name,value,error_bound,method\n")
        for name, val, err, method in rows:
            fh.write(f"{name},{val:.15g},{err:.15g},{method}\n")
    print(f"wrote {len(rows)} constants -> {csv_path}")
    return [csv_path.name]


def _cmd_congruence(args: argparse.Namespace, out_dir: Path) -> list[str]:
    spf = build_spf_table(max(args.rho_max, args.nu_max, 2))
    rows = []
    for d in range(1, args.rho_max + 1):
        closed = rho_closed(arith.factorize(d, spf)).count
        oracle = rho_oracle(d).count
        rows.append(("rho", d, "", "", closed, oracle, int(closed == oracle)))
    params = FormParams(t=args.t, d=args.d)
    for delta in range(1, args.nu_max + 1):
        f = arith.factorize(delta, spf)
        if any(e > 1 for _, e in f.factors):
            continue
        closed = nu_closed(delta, params).count
        oracle = nu_oracle(delta, params).count
        rows.append(("nu", delta, args.t, args.d, closed, oracle, int(closed == oracle)))
    csv_path = out_dir / "congruence.csv"
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("kind,modulus,t,d,closed,oracle,match\n")
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")
    mismatches = sum(1 for row in rows if not row[-1])
    print(f"wrote {len(rows)} congruence rows ({mismatches} mismatches) -> {csv_path}")
    return [csv_path.name]


def _cmd_offdiag(args: argparse.Namespace, out_dir: Path) -> list[str]:
    threads = _thread_count(args)
    outputs = []
    rows: list[tuple[str, object]] = [("limit", args.limit), ("note", f"\"{_CENSUS_NOTE}\"")]
    census = None
    if args.mode in ("direct", "both"):
        census = enumerate_offdiag(
            args.limit, collect=args.emit_quadruples, thread_count=threads
        )
        rows += [
            ("N", census.n),
            ("N1", census.n1),
            ("N1_prime", census.n1_prime),
            ("N1_double_prime", census.n1_double_prime),
            ("degenerate_count", census.degenerate_count),
            ("n_canonical", census.n_canonical),
        ]
        part = partition_s12(args.limit)
        rows += [
            ("s12", part.s12),
            ("diagonal", part.diagonal),
            ("offdiag_via_partition", part.offdiag),
            ("partition_consistent", int(part.offdiag == census.n)),
        ]
    if args.mode in ("param", "both"):
        pc = enumerate_n1_params(args.limit)
        rows.append(("N1_param", pc.n1))
        if census is not None:
            rows.append(("param_consistent", int(pc.n1 == census.n1)))
    csv_path = out_dir / "offdiag.csv"
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("field,value\n")
        for key, value in rows:
            fh.write(f"{key},{value}\n")
    outputs.append(csv_path.name)
    print(f"note: {_CENSUS_NOTE}")
    for key, value in rows[2:]:
        print(f"  {key} = {value}")
    if args.emit_quadruples:
        if census is None or census.quadruples is None:
            raise CapacityError(
                "quadruple list exceeds the collection cap; rerun with a smaller limit"
            )
        quad_path = out_dir / "quadruples.csv"
        with open(quad_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("a,p,q,r,n\n")
            for quad in census.quadruples:
                fh.write(f"{quad.a},{quad.p},{quad.q},{quad.r},{quad.n}\n")
        outputs.append(quad_path.name)
    return outputs


def _plot_name(statistic: str) -> str:
    safe = "".join(ch if ch.isalnum() else "_" for ch in statistic).strip("_")
    return f"plot_{safe}.csv"


def _cmd_report(args: argparse.Namespace, out_dir: Path) -> list[str]:
    if not args.inputs:
        raise ValidationError("report needs at least one input CSV")
    rows = []
    for path in args.inputs:
        with open(path, "r", encoding="utf-8") as fh:
            rows.extend(read_csv(fh))
    if not rows:
        raise ValidationError("input CSVs contain no data rows")
    by_stat: dict[str, list[dict]] = {}
    for row in rows:
        by_stat.setdefault(row["statistic"], []).append(row)
    outputs = []
    report_path = out_dir / "report.csv"
    with open(report_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("statistic,x,raw_value,normalized_value,predicted_constant,deviation\n")
        for stat in sorted(by_stat):
            const = predicted_constant(stat)
            for row in sorted(by_stat[stat], key=lambda r: r["x"]):
                norm = normalized_value(stat, row["x"], row["raw_value"])
                pred = f"{const:.15g}" if const is not None else "nan"
                dev = f"{norm - const:.15g}" if const is not None else "nan"
                raw = row["raw_value"]
                raw_s = f"{int(raw)}" if float(raw).is_integer() else f"{raw:.15g}"
                fh.write(f"{stat},{row['x']},{raw_s},{norm:.15g},{pred},{dev}\n")
    outputs.append(report_path.name)
    for stat in sorted(by_stat):
        plot_path = out_dir / _plot_name(stat)
        with open(plot_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("x,ratio\n")
            for row in sorted(by_stat[stat], key=lambda r: r["x"]):
                norm = normalized_value(stat, row["x"], row["raw_value"])
                fh.write(f"{row['x']},{norm:.15g}\n")
        outputs.append(plot_path.name)
    print(f"report over {len(by_stat)} statistics -> {report_path}")
    return outputs


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paucity",
        description="Sieve experiments on sums of two squares with prime coordinates.",
    )
    parser.add_argument("--version", action="version", version=f"paucity {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, threads: bool = True) -> None:
        p.add_argument("--out-dir", default=".", help="output directory (default: .)")
        if threads:
            p.add_argument("--threads", type=int, default=1,
                           help="worker threads (PAUCITY_THREADS overrides)")

    p = sub.add_parser("sieve", help="compute tallies and dump raw blocks")
    p.add_argument("--limit", type=int, required=True)
    p.add_argument("--block-size", type=int, default=1 << 20)
    common(p)

    p = sub.add_parser("mean", help="checkpointed mean values")
    p.add_argument("--limit", type=int, required=True)
    p.add_argument("--stats", default="S01,S02,S22", help="comma list or 'all'")
    p.add_argument("--grid", default="geometric:10")
    p.add_argument("--block-size", type=int, default=1 << 20)
    p.add_argument("--r0-convention", choices=("pair", "div"), default="pair")
    p.add_argument("--dispersion-c", type=float, default=1.0)
    common(p)

    p = sub.add_parser("constants", help="evaluate the predicted-constant toolbox")
    p.add_argument("--eps", type=float, default=1e-10)
    p.add_argument("--prime-limit", type=int, default=10**7)
    p.add_argument("--z", type=float, nargs="*", default=[10.0, 100.0, 1000.0])
    common(p, threads=False)

    p = sub.add_parser("congruence", help="closed forms vs exhaustive oracles")
    p.add_argument("--rho-max", type=int, default=100)
    p.add_argument("--nu-max", type=int, default=50)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--d", type=int, default=2)
    common(p, threads=False)

    p = sub.add_parser("offdiag", help="off-diagonal census and parametrization")
    p.add_argument("--limit", type=int, required=True)
    p.add_argument("--mode", choices=("direct", "param", "both"), default="both")
    p.add_argument("--emit-quadruples", action="store_true")
    common(p)

    p = sub.add_parser("report", help="join empirical CSVs with predictions")
    p.add_argument("--inputs", nargs="*", default=[])
    common(p, threads=False)

    return parser


_DISPATCH = {
    "sieve": _cmd_sieve,
    "mean": _cmd_mean,
    "constants": _cmd_constants,
    "congruence": _cmd_congruence,
    "offdiag": _cmd_offdiag,
    "report": _cmd_report,
}


def run(argv: list[str]) -> int:
    """Parse argv, dispatch, write outputs plus a JSON manifest; return exit code."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = _timestamp()
    outputs = _DISPATCH[args.command](args, out_dir)
    config = {k: v for k, v in vars(args).items() if k not in ("command",)}
    manifest = RunManifest(
        command=args.command,
        argv=list(argv),
        config=config,
        started=started,
        finished=_timestamp(),
        version=__version__,
        outputs=outputs,
    )
    _write_manifest(out_dir, args.command, manifest)
    return 0


def main(argv: list[str] | None = None) -> int:
    try:
        return run(sys.argv[1:] if argv is None else argv)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 3
    except PaucityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
