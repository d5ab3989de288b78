"""The ``agent`` command line: train-and-export, or validate model files.

Exit codes: 0 success, 1 usage or configuration error, 2 document parse
error, 3 I/O error.
"""

import argparse
import sys
from pathlib import Path

from .env import StartPageUnknown
from .errors import ConfigInvalid, DocumentError
from .learner import Algo
from .runner import RunConfig, export, run_training, validation_report
from .scenario import parse_scenario
from .site_model import load_site_model

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_IO = 3

_ALGO_NAMES = {
    "q-learning": Algo.Q_LEARNING,
    "reinforce": Algo.REINFORCE,
    "actor-critic": Algo.ACTOR_CRITIC,
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="agent", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="train on a site model and export artifacts")
    run.add_argument("--site", required=True, help="path to the .site model")
    run.add_argument("--scenario", required=True, help="path to the .scenario goal file")
    run.add_argument("--episodes", required=True, type=int)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--algo", choices=sorted(_ALGO_NAMES), default="q-learning")
    run.add_argument("--alpha", type=float, default=0.1)
    run.add_argument("--gamma", type=float, default=0.95)
    run.add_argument("--policy-lr", type=float, default=0.01)
    run.add_argument("--eps0", type=float, default=1.0)
    run.add_argument("--eps-decay", type=float, default=0.995)
    run.add_argument("--eps-min", type=float, default=0.01)
    run.add_argument("--replay-capacity", type=int, default=10_000)
    run.add_argument("--replay-batch", type=int, default=0)
    run.add_argument("--emit-top-k", type=int, default=5)
    run.add_argument(
        "--update-on-failure",
        type=_parse_bool,
        default=None,
        help="update from failed episodes too (default: true for q-learning, false otherwise)",
    )
    run.add_argument("--out", required=True, help="output directory")

    validate = sub.add_parser("validate", help="parse a model and report reachability")
    validate.add_argument("--site", required=True)
    validate.add_argument("--scenario", default=None)
    return parser


def _cmd_run(args) -> int:
    config = RunConfig(
        site_path=args.site,
        scenario_path=args.scenario,
        episodes=args.episodes,
        seed=args.seed,
        algo=_ALGO_NAMES[args.algo],
        alpha=args.alpha,
        gamma=args.gamma,
        policy_lr=args.policy_lr,
        replay_capacity=args.replay_capacity,
        replay_batch=args.replay_batch,
        eps0=args.eps0,
        eps_decay=args.eps_decay,
        eps_min=args.eps_min,
        emit_top_k=args.emit_top_k,
        update_on_failure=args.update_on_failure,
        out_dir=args.out,
    )
    artifacts = run_training(config)
    written = export(artifacts, config.out_dir)
    summary = artifacts.summary
    print(f"episodes: {config.episodes}")
    print(f"success rate: {summary['success_rate']:.3f}")
    print(f"best reward: {summary['best_reward']:.6f}")
    first = summary["episodes_to_first_success"]
    print(f"first success: {'episode ' + str(first) if first else 'never'}")
    print(f"backtracks: {summary['total_backtracks']}")
    print(f"scenarios emitted: {len(artifacts.scenarios)}")
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    graph = load_site_model(Path(args.site).read_text(encoding="utf-8"))
    spec = None
    if args.scenario is not None:
        spec = parse_scenario(Path(args.scenario).read_text(encoding="utf-8"))
    print(validation_report(graph, spec))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_validate(args)
    except _UsageError as exc:
        print(f"agent: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigInvalid, StartPageUnknown) as exc:
        print(f"agent: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DocumentError as exc:
        print(f"agent: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"agent: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
