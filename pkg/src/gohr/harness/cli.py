"""Command-line entry point: serve, play, train, transfer, generalize, analyze."""

from __future__ import annotations

import argparse
import json
import sys

from .. import engine
from ..board import AddressingError, GohrError
from ..learner.a2c import Hyperparams
from ..metrics import MetricParams
from ..rules import experiment_rules, resolve_rule, rule_description
from .config import ExperimentConfig
from . import experiments

_SHAPE_GLYPH = {"square": "#", "star": "*", "circle": "o", "triangle": "^"}


def _add_train_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON config file; flags override its fields")
    p.add_argument("--repr", dest="representation", choices=["FC", "OC"])
    p.add_argument("--hist", dest="n_hist", type=int, help="history length (6 or 8)")
    p.add_argument("--seeds", help="comma-separated seed list (default 1,2,3,4,5)")
    p.add_argument("--episodes", type=int, help="max episodes per phase")
    p.add_argument("--lr", type=float)
    p.add_argument("--optimizer", choices=["sgd", "adam"])
    p.add_argument("--beta", type=float, help="entropy weight")
    p.add_argument("--out", dest="out_dir")
    p.add_argument("--workers", type=int)
    p.add_argument("--verdicts", action="store_true", help="log per-property verdicts per move")
    p.add_argument("--w-mean", type=int)
    p.add_argument("--t-mean", type=float)
    p.add_argument("--w-max", type=int)
    p.add_argument("--t-max", type=float)
    p.add_argument("--w-mstar", type=int)


def _build_config(args, kind: str, rules=(), trial_lists=()) -> ExperimentConfig:
    overrides: dict = {"kind": kind}
    if rules:
        overrides["rules"] = tuple(rules)
    if trial_lists:
        overrides["trial_lists"] = tuple(trial_lists)
    if args.config:
        cfg = ExperimentConfig.from_file(args.config, overrides)
    else:
        cfg = ExperimentConfig.from_dict(overrides)

    if args.representation:
        cfg.representation = args.representation
    if args.n_hist:
        cfg.n_hist = args.n_hist
    if args.seeds:
        cfg.seeds = tuple(int(s) for s in args.seeds.split(","))
    if args.out_dir:
        cfg.out_dir = args.out_dir
    if args.workers:
        cfg.workers = args.workers
    if args.verdicts:
        cfg.collect_verdicts = True

    hp = cfg.hyperparams.to_dict()
    if args.episodes:
        hp["max_episodes"] = args.episodes
    if args.lr:
        hp["lr"] = args.lr
    if args.optimizer:
        hp["optimizer"] = args.optimizer
    if args.beta is not None:
        hp["entropy_beta"] = args.beta
    cfg.hyperparams = Hyperparams(**hp)

    mp = cfg.metric_params.to_dict()
    for flag, key in (("w_mean", "w_mean"), ("t_mean", "t_mean"), ("w_max", "w_max"),
                      ("t_max", "t_max"), ("w_mstar", "w_mstar")):
        value = getattr(args, flag)
        if value is not None:
            mp[key] = value
    cfg.metric_params = MetricParams(**mp)
    return cfg


def _cmd_serve(args):
    from ..server import main as serve_main

    flags = ["--host", args.host, "--port", str(args.port)]
    if args.debug:
        flags.append("--debug")
    if args.log:
        flags += ["--log", args.log]
    serve_main(flags)


def _render_board(episode) -> str:
    lines = ["  [0]             [1]"]
    for row in range(6, 0, -1):
        cells = []
        for col in range(1, 7):
            p = episode.board.piece_at(col, row)
            cells.append(f"{p.id}{p.color[0].upper()}{_SHAPE_GLYPH[p.shape]}" if p else " . ")
        lines.append(f"r{row} " + " ".join(f"{c:>3}" for c in cells))
    lines.append("  [3]             [2]")
    return "\n".join(lines)


def _cmd_play(args):
    spec = resolve_rule(args.rule)
    episode = engine.new_episode(spec, n=args.n, seed=args.seed, position_set=args.mode)
    errors = 0
    print("Clear the board. Buckets: 0 top-left, 1 top-right, 2 bottom-right, 3 bottom-left.")
    while episode.ongoing:
        print()
        print(_render_board(episode))
        try:
            raw = input("piece_id bucket> ").split()
            piece_id, bucket = int(raw[0]), int(raw[1])
        except (EOFError, KeyboardInterrupt):
            print()
            return
        except (ValueError, IndexError):
            print("enter: <piece_id> <bucket>")
            continue
        try:
            outcome = engine.attempt_move(episode, piece_id, bucket)
        except (AddressingError, GohrError) as exc:
            print(f"!! {exc}")
            continue
        verdict = {0: "ACCEPT", 4: "DENY", 7: "IMMOVABLE"}[outcome.response_code]
        if outcome.response_code:
            errors += 1
        print(f"-> {verdict} (move {outcome.move_count})")
    rate = errors / episode.move_count if episode.move_count else 0.0
    print(f"\nDone in {episode.move_count} moves, error rate {rate:.2f}.")
    print(f"The rule was {args.rule}: {rule_description(args.rule)}")


def _cmd_train(args):
    rules = args.rule or ["quadNearby"]
    if rules == ["default18"]:
        rules = experiment_rules()
    cfg = _build_config(args, "independent", rules=rules)
    table = experiments.run_independent(cfg)
    print(f"{'rule':24s} {'M*':>8s} {'E*_mean':>8s} {'E*_max':>8s}")
    for rule, agg in table.items():
        print(f"{rule:24s} {_fmt(agg.m_star):>8s} {_fmt(agg.e_star_mean):>8s} {_fmt(agg.e_star_max):>8s}")
    print(f"logs and difficulty.csv in {cfg.out_dir}")


def _cmd_transfer(args):
    texts = []
    for path in args.trial_list:
        with open(path) as fh:
            texts.append(fh.read())
    cfg = _build_config(args, "transfer", trial_lists=texts)
    report = experiments.run_transfer(cfg)
    for name, phases in report.items():
        print(name)
        for ph in phases:
            agg = ph["aggregate"]
            print(
                f"  phase {ph['phase']} ({ph['rule']}): "
                f"E*_mean={_fmt(agg['E_star_mean'])} E*_max={_fmt(agg['E_star_max'])} M*={_fmt(agg['M_star'])}"
            )
    print(f"logs in {cfg.out_dir}")


def _cmd_generalize(args):
    cfg = _build_config(args, "generalization", rules=args.rule or ["quadNearby"])
    if args.eval_episodes:
        cfg.eval_episodes = args.eval_episodes
    report = experiments.run_generalization(cfg)
    for rule, rec in report.items():
        print(f"{rule}: test-error ratios {rec['ratios']} median {rec['median']}")
    print(f"logs in {cfg.out_dir}")


def _cmd_analyze(args):
    bundle = experiments.analyze(args.logs, args.out, metric=args.metric, set_size=args.set_size)
    print(json.dumps(bundle, indent=2, sort_keys=True, default=float))
    print(f"CSV matrices in {args.out}", file=sys.stderr)


def _fmt(value) -> str:
    return "-" if value is None else str(value)


def main(argv=None):
    parser = argparse.ArgumentParser(prog="gohr", description="Hidden-rule game testbed")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the HTTP game service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--debug", action="store_true")
    p.add_argument("--log", default=None)
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("play", help="play an episode in the terminal")
    p.add_argument("--rule", default="quadNearby")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=9)
    p.add_argument("--mode", default="all", choices=["all", "train", "test"])
    p.set_defaults(func=_cmd_play)

    p = sub.add_parser("train", help="independent rule experiments")
    p.add_argument("--rule", action="append", help="rule name (repeatable; 'default18' for the full set)")
    _add_train_flags(p)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("transfer", help="trial-list transfer experiments")
    p.add_argument("--trial-list", action="append", required=True, help="trial list file (repeatable)")
    _add_train_flags(p)
    p.set_defaults(func=_cmd_transfer)

    p = sub.add_parser("generalize", help="checkerboard train/test generalization")
    p.add_argument("--rule", action="append")
    p.add_argument("--eval-episodes", type=int)
    _add_train_flags(p)
    p.set_defaults(func=_cmd_generalize)

    p = sub.add_parser("analyze", help="statistics bundle over a log directory")
    p.add_argument("--logs", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--metric", default="m_star", choices=["m_star", "e_star_mean", "e_star_max"])
    p.add_argument("--set-size", type=int, default=5)
    p.set_defaults(func=_cmd_analyze)

    args = parser.parse_args(argv)
    args.func(args)


if __name__ == "__main__":
    main()
