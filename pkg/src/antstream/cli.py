"""Command-line interface.

    antstream run <config> [--set key=value ...] [--seed N] [--out DIR]
    antstream compare <config> --seeds 1,2,3 [--set key=value ...]
    antstream gen-synthetic <spec> --out items.csv

Exit codes: 0 success, 1 configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, load_config
from .datastream import FeatureSpace, generate_synthetic, SyntheticSpec, write_items_csv


def _collect_overrides(args) -> dict[str, str]:
    overrides: dict[str, str] = {}
    for entry in args.set or []:
        if "=" not in entry:
            raise ConfigError([f"--set expects key=value, got {entry!r}"])
        key, value = entry.split("=", 1)
        overrides[key] = value
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = str(args.seed)
    if getattr(args, "out", None) is not None:
        overrides["out"] = args.out
    return overrides


def cmd_run(args) -> int:
    from .runner import run_experiment

    cfg = load_config(args.config, _collect_overrides(args))
    result = run_experiment(cfg)
    print(f"run complete: {len(result.snapshots)} checkpoints in {result.wall_time:.1f}s")
    if result.reports:
        print(f"final mean k-NN rate: {result.final_rate():.4f}")
    for step, reason in result.skips:
        print(f"checkpoint {step} skipped: {reason}")
    print(f"outputs: {result.out_dir}")
    return 0


def cmd_compare(args) -> int:
    from .runner import compare_runs

    cfg = load_config(args.config, _collect_overrides(args))
    seeds = [int(s) for s in args.seeds.split(",") if s.strip()]
    result = compare_runs(cfg, seeds)
    print("seed  batch   stream  delta")
    for seed, b, s in result.rows():
        print(f"{seed:<5d} {b:.4f}  {s:.4f}  {s - b:+.4f}")
    print(
        f"mean delta {result.mean_delta:+.4f} (std {result.std_delta:.4f}) "
        f"over {len(seeds)} seeds"
    )
    return 0


def cmd_gen_synthetic(args) -> int:
    cfg = load_config(args.spec)
    spec = SyntheticSpec(
        n_classes=cfg.classes,
        items_per_class=cfg.per_class,
        dim=cfg.dim,
        spread=cfg.spread,
        seed=cfg.seed,
    )
    items = generate_synthetic(spec)
    with open(args.out, "w") as fh:
        write_items_csv(items, FeatureSpace.unit(spec.dim), fh)
    print(f"wrote {len(items)} items to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="antstream", description="stigmergic ant-colony clustering simulator"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one experiment")
    p_run.add_argument("config", help="flat key=value config file")
    p_run.add_argument("--set", action="append", metavar="KEY=VALUE")
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--out")
    p_run.set_defaults(func=cmd_run)

    p_cmp = sub.add_parser("compare", help="batch vs streaming over several seeds")
    p_cmp.add_argument("config")
    p_cmp.add_argument("--seeds", required=True, help="comma-separated seed list")
    p_cmp.add_argument("--set", action="append", metavar="KEY=VALUE")
    p_cmp.add_argument("--out")
    p_cmp.set_defaults(func=cmd_compare)

    p_gen = sub.add_parser("gen-synthetic", help="emit a synthetic item CSV")
    p_gen.add_argument("spec", help="config file carrying the synthetic keys")
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=cmd_gen_synthetic)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
