"""Command-line front end: run experiments, filter CSV streams, build the
noise/method comparison table, inspect checkpoints.

Exit codes: 0 success, 2 usage or configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, config_hash, load_config, resolved_text
from .experiments import (ExperimentResult, file_header, run_experiment,
                          train_model, write_results_csv, write_summary_csv)
from .filter import DivergenceError, InferSession, load_checkpoint, save_checkpoint
from .noise import FAMILIES


def _resolve_seed(args) -> int | None:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("FBF_SEED")
    return int(env) if env else None


def _say(args, message: str) -> None:
    if not args.quiet:
        print(message)


def cmd_run(args) -> int:
    cfg = load_config(args.config, seed_override=_resolve_seed(args))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    chash = config_hash(cfg)

    (out / "config_resolved.cfg").write_text(
        file_header(cfg.seed, chash) + "\n" + resolved_text(cfg))
    _say(args, f"running {cfg.system}-{cfg.method} "
               f"({cfg.trials} trials, seed {cfg.seed})")
    result = run_experiment(cfg, jobs=args.jobs)
    write_results_csv(out / "results.csv", result, cfg.seed, chash)
    write_summary_csv(out / "summary.csv", result, cfg.seed, chash)
    if cfg.save_model and cfg.method == "fbf":
        from .experiments import trial_seeds
        filt = train_model(cfg, int(trial_seeds(cfg.seed, 1)[1]))
        save_checkpoint(filt, out / "model.ckpt")
        _say(args, f"wrote {out / 'model.ckpt'}")

    s = result.summary
    _say(args, f"mse = {s['mse_mean']:.6g} +- {s['mse_std']:.6g} "
               f"({s['n_failed']} failed)")
    if s["n_failed"]:
        failed = [r.trial for r in result.records if r.failed]
        print(f"divergent trials: {failed}", file=sys.stderr)
        return 3
    return 0


def cmd_table(args) -> int:
    cfg = load_config(args.config, seed_override=_resolve_seed(args))
    if cfg.system != "ikeda":
        raise ConfigError("the table subcommand requires system = ikeda")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    chash = config_hash(cfg)
    methods = ("ekf", "ckf", "fbf")

    cells: dict[tuple[str, str], ExperimentResult] = {}
    any_failed = False
    for family in FAMILIES:
        for method in methods:
            sub = replace(cfg, noise_family=family, method=method)
            _say(args, f"table cell: {family}/{method}")
            res = run_experiment(sub, jobs=args.jobs)
            cells[(family, method)] = res
            any_failed = any_failed or res.summary["n_failed"] > 0

    with open(out / "table.csv", "w", newline="") as fh:
        fh.write(file_header(cfg.seed, chash) + "\n")
        w = csv.writer(fh)
        header = ["noise"]
        for m in methods:
            header += [f"{m}_mse", f"{m}_std"]
        w.writerow(header)
        for family in FAMILIES:
            row = [family]
            for m in methods:
                s = cells[(family, m)].summary
                row += [f"{s['mse_mean']:.6g}", f"{s['mse_std']:.6g}"]
            w.writerow(row)
    _say(args, f"wrote {out / 'table.csv'}")
    return 3 if any_failed else 0


def cmd_filter(args) -> int:
    filt = load_checkpoint(args.model)
    model = filt.model
    sess = InferSession(model, filt.cov.P1, filt.hp, s0=filt.s)
    n_u, n_y = model.n_u, model.n_y

    with open(args.model, "rb") as fh:
        mhash = hashlib.sha256(fh.read()).hexdigest()[:16]
    out_fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        out_fh.write(file_header("none", mhash) + "\n")
        writer = csv.writer(out_fh)
        writer.writerow([f"y_pred_{i}" for i in range(n_y)]
                        + [f"y_post_{i}" for i in range(n_y)])
        with open(args.input, newline="") as in_fh:
            for lineno, row in enumerate(csv.reader(in_fh), start=1):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                try:
                    vals = np.array([float(v) for v in row])
                except ValueError:
                    print(f"{args.input}:{lineno}: non-numeric row",
                          file=sys.stderr)
                    return 2
                if vals.size == n_u:
                    u, d = vals, None
                elif vals.size == n_u + n_y:
                    u, d = vals[:n_u], vals[n_u:]
                else:
                    print(f"{args.input}:{lineno}: expected {n_u} or "
                          f"{n_u + n_y} columns, got {vals.size}",
                          file=sys.stderr)
                    return 2
                s_prior, s_post = sess.step(u, d)
                writer.writerow([f"{v:.10g}" for v in s_prior[-n_y:]]
                                + [f"{v:.10g}" for v in s_post[-n_y:]])
    finally:
        if out_fh is not sys.stdout:
            out_fh.close()
    return 0


def cmd_inspect(args) -> int:
    from .filter import read_checkpoint_header
    info = read_checkpoint_header(args.model)
    for key, val in info.items():
        print(f"{key}: {val}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fbf",
                                description="kernel adaptive Bayesian filtering")
    p.add_argument("--version", action="version", version=f"fbf {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=None,
                        help="seed override (falls back to FBF_SEED, then config)")
        sp.add_argument("--jobs", type=int, default=1,
                        help="max concurrent trials")
        sp.add_argument("--quiet", action="store_true")

    run = sub.add_parser("run", help="run a configured experiment")
    run.add_argument("--config", required=True)
    run.add_argument("--out", default=".")
    common(run)
    run.set_defaults(fn=cmd_run)

    table = sub.add_parser("table", help="noise-family x method comparison table")
    table.add_argument("--config", required=True)
    table.add_argument("--out", default=".")
    common(table)
    table.set_defaults(fn=cmd_table)

    filt = sub.add_parser("filter", help="stream a CSV through a trained filter")
    filt.add_argument("--model", required=True, help="checkpoint path")
    filt.add_argument("--input", required=True, help="input CSV (u columns, "
                      "optionally followed by desired-output columns)")
    filt.add_argument("--out", default=None, help="output CSV (default stdout)")
    filt.add_argument("--quiet", action="store_true")
    filt.set_defaults(fn=cmd_filter)

    insp = sub.add_parser("inspect", help="print checkpoint header")
    insp.add_argument("--model", required=True)
    insp.set_defaults(fn=cmd_inspect)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DivergenceError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
