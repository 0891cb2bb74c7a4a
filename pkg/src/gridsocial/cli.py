"""Command line entry point.

Subcommands: ``run`` a suite and export metrics, ``replay`` an episode log
as an ASCII animation, ``validate`` a suite file.  Set GRIDSOCIAL_LOG to a
logging level name to control verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

from . import mdkg, overcooked as oc
from .baselines import FACILITATOR_KINDS
from .core import EpisodeLog, ScenarioConfig
from .engine import validate_scenario
from .harness import export_report, load_suite, run_suite


def _setup_logging() -> None:
    level = os.environ.get("GRIDSOCIAL_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def cmd_run(args: argparse.Namespace) -> int:
    suite = load_suite(args.suite)
    report, logs = run_suite(
        suite,
        facilitator_kind=args.facilitator,
        repetitions=args.reps,
        base_seed=args.seed,
        workers=args.workers,
    )
    paths = export_report(report, args.out, logs=logs if args.save_logs else None)
    overall = report.overall
    print(f"suite={suite.name} facilitator={args.facilitator} "
          f"episodes={overall['episodes']}")
    print(f"success_rate={overall['success_rate']:.3f} "
          f"speedup={overall['speedup']:.3f} "
          f"feedback_count={overall['feedback_count']:.2f}")
    for cat, agg in report.per_category.items():
        if agg["episodes"]:
            print(f"  {cat}: n={agg['episodes']} success={agg['success_rate']:.2f} "
                  f"speedup={agg['speedup']:.2f} feedback={agg['feedback_count']:.2f}")
    print("written:", " ".join(sorted(paths.values())))
    return 0


def _find_scenario(scenario_id: str, suite_names: list[str]) -> ScenarioConfig:
    for name in suite_names:
        for s in load_suite(name).scenarios:
            if s.scenario_id == scenario_id:
                return s
    raise SystemExit(f"scenario {scenario_id!r} not found in suites {suite_names}")


def cmd_replay(args: argparse.Namespace) -> int:
    text = Path(args.log).read_text()
    ep = EpisodeLog.from_jsonl(text)
    sid = ep.terminal.get("scenario_id", "")
    suites = [args.suite] if args.suite else ["mdkg", "overcooked"]
    scenario = _find_scenario(sid, suites)
    env = mdkg if scenario.env == "mdkg" else oc
    state = validate_scenario(scenario)
    print(f"replaying {sid} ({len(ep.records)} ticks)")
    for rec in ep.records:
        print("\n".join(env.render(state)))
        feedback = rec.get("emitted")
        if feedback:
            print(f"feedback -> {feedback['text']}")
        print(f"t={rec['t']} actions={rec['actions']}")
        print()
        state = env.transition(state, rec["actions"])
        if args.delay:
            time.sleep(args.delay)
    print("\n".join(env.render(state)))
    t = ep.terminal
    print(f"end: success={t.get('success')} length={t.get('length')} "
          f"feedback_count={t.get('feedback_count')}")
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    suite = load_suite(args.suite)
    failures = 0
    for s in suite.scenarios:
        try:
            validate_scenario(s)
            print(f"OK   {s.scenario_id} ({s.env}, {s.category})")
        except Exception as e:
            failures += 1
            print(f"FAIL {s.scenario_id}: {e}")
    print(f"{len(suite.scenarios) - failures}/{len(suite.scenarios)} scenarios valid")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridsocial",
        description="Two-agent grid worlds with a prosocial feedback facilitator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario suite and export metrics")
    p_run.add_argument("--suite", default="mdkg",
                       help="built-in suite name (mdkg, overcooked) or suite JSON path")
    p_run.add_argument("--facilitator", default="prosocial",
                       choices=sorted(FACILITATOR_KINDS))
    p_run.add_argument("--seed", type=int, default=42)
    p_run.add_argument("--reps", type=int, default=1)
    p_run.add_argument("--workers", type=int, default=1)
    p_run.add_argument("--out", default="out")
    p_run.add_argument("--save-logs", action="store_true")
    p_run.set_defaults(func=cmd_run)

    p_replay = sub.add_parser("replay", help="animate an episode log")
    p_replay.add_argument("log", help="EpisodeLog JSONL path")
    p_replay.add_argument("--suite", default="",
                          help="suite holding the scenario (default: search built-ins)")
    p_replay.add_argument("--delay", type=float, default=0.2,
                          help="seconds between frames (0 for instant)")
    p_replay.set_defaults(func=cmd_replay)

    p_val = sub.add_parser("validate", help="lint a scenario suite")
    p_val.add_argument("--suite", default="mdkg")
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
