"""Command-line entry points.

    gridplay run --game zelda --agent full --seed 3 --max-steps 2000 --out runs/
    gridplay metrics --in runs/ --labels labels/zelda.json
    gridplay replay --log runs/zelda__full__seed3.jsonl --verify
    gridplay corpus validate
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .corpus import default_corpus_dir, list_games, load_game, validate_corpus
from .episode import EpisodeLog, verify_replay
from .metrics import (
    bootstrap_efficiency_ratio,
    interaction_profile,
    occupancy_heatmap,
    score_from_log,
)
from .runner import RunConfig, run_experiment


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="gridplay")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one agent on one game")
    run_p.add_argument("--game", required=True)
    run_p.add_argument("--agent", default="full", dest="variant")
    run_p.add_argument("--seed", type=int, default=0)
    run_p.add_argument("--max-steps", type=int, default=2000)
    run_p.add_argument("--max-hours", type=float, default=24.0)
    run_p.add_argument("--out", type=Path, default=Path("runs"))
    run_p.add_argument("--corpus", type=Path, default=None)

    metrics_p = sub.add_parser("metrics", help="summarize logs in a directory")
    metrics_p.add_argument("--in", dest="in_dir", type=Path, required=True)
    metrics_p.add_argument("--labels", type=Path, default=None)
    metrics_p.add_argument("--humans", type=Path, default=None,
                           help="directory of human logs for ratio intervals")
    metrics_p.add_argument("--corpus", type=Path, default=None)

    replay_p = sub.add_parser("replay", help="re-run a log through the engine")
    replay_p.add_argument("--log", type=Path, required=True)
    replay_p.add_argument("--verify", action="store_true")
    replay_p.add_argument("--corpus", type=Path, default=None)

    corpus_p = sub.add_parser("corpus", help="corpus maintenance")
    corpus_p.add_argument("action", choices=["validate", "list"])
    corpus_p.add_argument("--corpus", type=Path, default=None)

    args = parser.parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "metrics":
        return _cmd_metrics(args)
    if args.command == "replay":
        return _cmd_replay(args)
    return _cmd_corpus(args)


def _cmd_run(args) -> int:
    cfg = RunConfig(
        game=args.game, variant=args.variant, seed=args.seed,
        max_steps=args.max_steps, max_hours=args.max_hours,
        out_dir=args.out, corpus_dir=args.corpus,
    )
    result = run_experiment(cfg)
    s = result.score
    print(
        f"{args.game} {args.variant} seed={args.seed}: "
        f"{s.levels_completed}/{s.levels_in_game} levels, "
        f"steps_to_completion={s.steps_to_completion}, efficiency={s.value:.6g}"
    )
    if result.truncated_by_wallclock:
        print("warning: wall-clock budget exceeded; partial result", file=sys.stderr)
    if result.log_path:
        print(f"log: {result.log_path}")
    return 0


def _score_table(in_dir: Path) -> dict[str, list]:
    by_game: dict[str, list] = {}
    for path in sorted(in_dir.glob("*.jsonl")):
        log = EpisodeLog.load(path)
        header = log.header
        score = score_from_log(log)
        by_game.setdefault(header["game"], []).append((header, score, log))
    return by_game


def _cmd_metrics(args) -> int:
    by_game = _score_table(args.in_dir)
    if not by_game:
        print("no logs found", file=sys.stderr)
        return 1
    print(f"{'game':<14} {'variant':<22} {'seed':>4} {'levels':>7} {'steps':>6} {'efficiency':>11}")
    for game, rows in sorted(by_game.items()):
        for header, score, _log in rows:
            print(
                f"{game:<14} {header['variant']:<22} {header['seed']:>4} "
                f"{score.levels_completed}/{score.levels_in_game:<5} "
                f"{score.steps_to_completion:>6} {score.value:>11.6g}"
            )
    if args.humans is not None:
        human_scores: dict[str, list[float]] = {}
        for path in sorted(args.humans.glob("*.jsonl")):
            log = EpisodeLog.load(path)
            human_scores.setdefault(log.header["game"], []).append(
                score_from_log(log).value
            )
        print()
        print(f"{'game':<14} {'ratio':>8} {'95% interval':>22}")
        for game, rows in sorted(by_game.items()):
            if game not in human_scores:
                continue
            agent_vals = [s.value for _h, s, _l in rows]
            ratio = bootstrap_efficiency_ratio(agent_vals, human_scores[game])
            flag = " (flagged)" if ratio.flagged else ""
            print(
                f"{game:<14} {ratio.mean_ratio:>8.3g} "
                f"[{ratio.low:.3g}, {ratio.high:.3g}]{flag}"
            )
    if args.labels is not None:
        labels = json.loads(Path(args.labels).read_text())
        print()
        for game, rows in sorted(by_game.items()):
            if game not in labels:
                continue
            logs = [log for _h, _s, log in rows]
            avatar = rows[0][0].get("avatar_class", "avatar")
            profile = interaction_profile(logs, labels[game], avatar)
            parts = ", ".join(f"{c}={profile.fractions[c]:.2f}" for c in profile.fractions)
            print(f"{game}: {parts}; loss-object contacts={profile.loss_object_contacts}")
    return 0


def _cmd_replay(args) -> int:
    log = EpisodeLog.load(args.log)
    game = log.header["game"]
    desc = load_game(game, args.corpus)
    result = verify_replay(log, desc)
    if result.ok:
        print(f"replay ok: {args.log}")
        return 0
    print(f"replay DIVERGED at episode {result.first_divergence[0]} "
          f"tick {result.first_divergence[1]}")
    return 1 if args.verify else 0


def _cmd_corpus(args) -> int:
    if args.action == "list":
        for name in list_games(args.corpus):
            print(name)
        return 0
    problems = validate_corpus(args.corpus)
    root = args.corpus or default_corpus_dir()
    if not problems:
        print(f"corpus at {root}: all games valid")
        return 0
    for game, errors in sorted(problems.items()):
        print(f"{game}:")
        for e in errors:
            print(f"  {e}")
    return 1


if __name__ == "__main__":
    raise SystemExit(main())
