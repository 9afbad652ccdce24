"""Command line entry: serve, verify, bench and gen subcommands."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import AppConfig, load_config, split_listen
from .generate import MODES, build_table, generate, write_csv, write_rules


def _load(args) -> AppConfig:
    if args.config:
        cfg = load_config(args.config)
    else:
        cfg = AppConfig()
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    return cfg


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    cfg = _load(args)
    if not cfg.dataset:
        print("serve needs a config with a dataset", file=sys.stderr)
        return 2
    host, port = split_listen(cfg.listen)
    uvicorn.run(create_app(cfg), host=host, port=port, log_level="info")
    return 0


def cmd_verify(args) -> int:
    from .verification import format_report, run_all

    cfg = _load(args) if args.config else None
    code, suites = run_all(cfg, seed=args.seed if args.seed is not None else 1)
    print(format_report(suites))
    return code


def cmd_bench(args) -> int:
    from .bench import run_bench
    from .dataset import ingest_csv

    cfg = _load(args)
    seed = cfg.seed
    if cfg.dataset:
        table = ingest_csv(cfg.dataset, cfg.schema(), slow_latency=cfg.slow_latency)
        engine_config = cfg.engine_config()
    else:
        # No dataset configured: bench a synthetic uniform table.
        schema, rows, _ = generate("uniform", args.rows, seed)
        table = build_table(schema, rows, slow_latency=cfg.slow_latency)
        engine_config = cfg.engine_config()
    script_lines = None
    if args.script:
        script_lines = Path(args.script).read_text(encoding="utf-8").splitlines()
    report = run_bench(
        table,
        engine_config,
        seed=seed,
        probes=args.probes,
        cycles=args.cycles,
        script_lines=script_lines,
    )
    print(json.dumps(report, indent=2, ensure_ascii=False))
    return 0


def cmd_gen(args) -> int:
    seed = args.seed if args.seed is not None else 1
    schema, rows, needs_rules = generate(args.mode, args.rows, seed, args.max_length)
    out = Path(args.out)
    count = write_csv(out, schema, rows)
    print(f"wrote {count} rows to {out}")
    if needs_rules:
        rules_path = out.with_suffix(".rules")
        write_rules(rules_path)
        print(f"wrote collation rules to {rules_path}")
        print("config snippet:")
        print(f"  dataset = {out.name}")
        for i, spec in enumerate(schema.fields, start=1):
            if spec.kind == "string":
                print(
                    f"  field.{i} = {spec.name}:string:{spec.max_length}"
                    f":rules={rules_path.name}"
                )
            else:
                print(f"  field.{i} = {spec.name}:{spec.kind}")
    else:
        print("config snippet:")
        print(f"  dataset = {out.name}")
        for i, spec in enumerate(schema.fields, start=1):
            print(f"  field.{i} = {spec.name}:{spec.kind}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridscroll",
        description="Virtual-scrolling engine over large ordered datasets",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--config", required=True)
    p_serve.set_defaults(func=cmd_serve)

    p_verify = sub.add_parser("verify", help="run the built-in oracle suites")
    p_verify.add_argument("--config")
    p_verify.add_argument("--seed", type=int)
    p_verify.set_defaults(func=cmd_verify)

    p_bench = sub.add_parser("bench", help="replay scroll traffic and report stats")
    p_bench.add_argument("--config")
    p_bench.add_argument("--seed", type=int)
    p_bench.add_argument("--script", help="text file with scroll/step/locate commands")
    p_bench.add_argument("--rows", type=int, default=20000,
                         help="synthetic table size when no dataset is configured")
    p_bench.add_argument("--probes", type=int, default=400)
    p_bench.add_argument("--cycles", type=int, default=100)
    p_bench.set_defaults(func=cmd_bench)

    p_gen = sub.add_parser("gen", help="generate a synthetic CSV dataset")
    p_gen.add_argument("--mode", choices=MODES, default="uniform")
    p_gen.add_argument("--rows", type=int, default=10000)
    p_gen.add_argument("--seed", type=int)
    p_gen.add_argument("--max-length", type=int, default=8, dest="max_length")
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=cmd_gen)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
