"""Command-line interface.

Subcommands:

  gen          emit a generated DNF in the text format
  spectrum     print the exact Fourier spectrum of a DNF file as JSON
  verify       run the exact check battery from a JSON config
  sweep        run the concentration measurements from a JSON config
  encdec-test  exhaustive encode/decode round trip on one DNF file
  covers       cover counts and read-based bounds for one subset

Exit codes: 0 success, 1 a verified inequality failed, 2 usage or cap errors.
"""
from __future__ import annotations

import argparse
import sys

from .bitops import vars_to_mask
from .boolfn import CapExceededError, fourier_transform
from .covers import num_covers_total, cover_counts_by_union, read_cover_count_bound
from .dnf import ParseError, load_dnf
from .encoder import decode, encode, valid_pairs
from .experiments import (
    ConfigError,
    ExperimentConfig,
    family_csv,
    render_json,
    rows_jsonl,
    run_concentration_sweep,
    run_verify,
)
from .generators import GenerationError, GeneratorSpec
from .restrictions import RestrictionTables

USAGE_ERROR = 2
CHECK_FAILURE = 1


def _add_gen(sub):
    p = sub.add_parser("gen", help="generate a DNF instance")
    p.add_argument("family", choices=["tribes", "random_read_k", "dense_pool"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--w", type=int, help="width (tribes, random_read_k)")
    p.add_argument("--t", type=int, help="number of tribes terms")
    p.add_argument("--n", type=int, help="variable count (random_read_k)")
    p.add_argument("--s", type=int, help="term count (random_read_k)")
    p.add_argument("--k", type=int, help="read bound (random_read_k)")
    p.add_argument("--exact-width", action="store_true")
    p.add_argument("--n-terms", type=int, help="term count (dense_pool)")
    p.add_argument("--term-width", type=int, help="term width (dense_pool)")
    p.add_argument("--pool-size", type=int, help="variable pool (dense_pool)")
    p.add_argument("--out", help="output path (default: stdout)")


def _gen_params(args) -> dict:
    if args.family == "tribes":
        return {"w": args.w, "t": args.t}
    if args.family == "random_read_k":
        return {
            "n": args.n,
            "s": args.s,
            "w": args.w,
            "k": args.k,
            "exact_width": args.exact_width,
        }
    return {
        "n_terms": args.n_terms,
        "term_width": args.term_width,
        "pool_size": args.pool_size,
    }


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="dnf-fourier", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    _add_gen(sub)

    p = sub.add_parser("spectrum", help="exact Fourier spectrum of a DNF file")
    p.add_argument("dnf_file")
    p.add_argument("--out")

    p = sub.add_parser("verify", help="run the exact check battery")
    p.add_argument("config", help="JSON config file")
    p.add_argument("--out", help="report JSON path (default: stdout)")
    p.add_argument("--csv-dir", help="write per-instance family CSVs here")
    p.add_argument("--rows-jsonl", help="stream per-check rows to this path")
    p.add_argument("--workers", type=int, help="override worker count")

    p = sub.add_parser("sweep", help="concentration measurements")
    p.add_argument("config")
    p.add_argument("--out")
    p.add_argument("--csv-dir", help="write per-instance tail-weight CSVs here")
    p.add_argument("--workers", type=int)

    p = sub.add_parser("encdec-test", help="exhaustive round-trip test")
    p.add_argument("dnf_file")
    p.add_argument("--d-max", type=int, default=4)
    p.add_argument("--corpus-out", help="write round-trip cases as JSON lines")

    p = sub.add_parser("covers", help="cover counts for one subset")
    p.add_argument("dnf_file")
    p.add_argument("--set", required=True,
                   help="subset: mask integer or comma-separated variables")

    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except (ParseError, ConfigError, GenerationError, CapExceededError,
            FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


def _dispatch(args) -> int:
    if args.command == "gen":
        params = {k: v for k, v in _gen_params(args).items() if v is not None}
        spec = GeneratorSpec(args.family, params, args.seed)
        dnf = spec.build()
        _write(f"# {spec.label()}\n" + dnf.to_text(), args.out)
        return 0

    if args.command == "spectrum":
        dnf = load_dnf(args.dnf_file)
        spec = fourier_transform(dnf.evaluate())
        _write(spec.to_json() + "\n", args.out)
        return 0

    if args.command == "verify":
        config = _load_config(args)
        report = run_verify(config)
        _write(render_json(report), args.out)
        if args.csv_dir:
            import os

            os.makedirs(args.csv_dir, exist_ok=True)
            for i, inst in enumerate(report["instances"]):
                path = os.path.join(args.csv_dir, f"instance_{i:03d}.families.csv")
                with open(path, "w", encoding="utf-8") as fh:
                    fh.write(family_csv(inst))
        if args.rows_jsonl:
            with open(args.rows_jsonl, "w", encoding="utf-8") as fh:
                fh.write(rows_jsonl(report))
        return 0 if report["summary"]["ok"] else CHECK_FAILURE

    if args.command == "sweep":
        config = _load_config(args)
        report = run_concentration_sweep(config)
        _write(render_json(report), args.out)
        if args.csv_dir:
            import os

            from .experiments import tail_csv

            os.makedirs(args.csv_dir, exist_ok=True)
            for i, inst in enumerate(report["instances"]):
                path = os.path.join(args.csv_dir, f"instance_{i:03d}.tail.csv")
                with open(path, "w", encoding="utf-8") as fh:
                    fh.write(tail_csv(inst))
        return 0

    if args.command == "encdec-test":
        dnf = load_dnf(args.dnf_file)
        tables = RestrictionTables(dnf.evaluate())
        from .encoder import roundtrip_case_record

        pairs = 0
        lines = []
        for s_mask, xsbar in valid_pairs(dnf, args.d_max, tables):
            enc, _ = encode(dnf, s_mask, xsbar, tables)
            if decode(dnf, enc) != (s_mask, xsbar):
                print(f"ROUNDTRIP FAILED at S={s_mask:#x}, x={xsbar:#x}")
                return CHECK_FAILURE
            if args.corpus_out:
                lines.append(roundtrip_case_record(args.dnf_file, s_mask, xsbar, enc))
            pairs += 1
        if args.corpus_out:
            _write("\n".join(lines) + ("\n" if lines else ""), args.corpus_out)
        print(f"roundtrip ok on {pairs} full-depth pairs (|S| <= {args.d_max})")
        return 0

    if args.command == "covers":
        dnf = load_dnf(args.dnf_file)
        s_mask = _parse_set(args.set)
        counts = cover_counts_by_union(dnf, s_mask)
        r = read_cover_count_bound(dnf, s_mask)
        print(f"S mask {s_mask:#x}, |S| = {s_mask.bit_count()}")
        for u in sorted(counts):
            print(f"  union size {u}: {counts[u]} covers")
        print(f"total covers: {num_covers_total(dnf, s_mask)}")
        print(f"read-based bound: {r.bound} (holds: {r.holds})")
        return 0

    raise AssertionError(f"unhandled command {args.command}")


def _load_config(args) -> ExperimentConfig:
    with open(args.config, "r", encoding="utf-8") as fh:
        config = ExperimentConfig.from_json(fh.read())
    if getattr(args, "workers", None):
        config.workers = args.workers
    return config


def _parse_set(text: str) -> int:
    if "," in text:
        return vars_to_mask(int(v) for v in text.split(","))
    value = int(text, 0)
    if value < 0:
        raise ValueError("subset mask must be nonnegative")
    return value


if __name__ == "__main__":
    raise SystemExit(main())
