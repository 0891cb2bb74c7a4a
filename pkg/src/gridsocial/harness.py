"""Suite management, batch runner and metrics.

Every facilitated episode is paired with a no-facilitator baseline run of
the same scenario and seed; speedup is the per-episode ratio of baseline
to facilitated length, minus one.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .core import EpisodeLog, ScenarioConfig, fork_rng
from .engine import run_episode, validate_scenario

log = logging.getLogger(__name__)

CATEGORIES = ("not-needed", "useful", "necessary")


@dataclass
class ScenarioSuite:
    """A named, validated collection of scenarios."""

    name: str
    scenarios: list[ScenarioConfig]

    def category_counts(self) -> dict[str, int]:
        counts = {c: 0 for c in CATEGORIES}
        for s in self.scenarios:
            counts[s.category] += 1
        return counts

    def validate(self) -> None:
        seen = set()
        for s in self.scenarios:
            if s.scenario_id in seen:
                raise ValueError(f"duplicate scenario id {s.scenario_id!r}")
            seen.add(s.scenario_id)
            validate_scenario(s)

    def to_json(self) -> dict:
        return {"name": self.name, "scenarios": [s.to_json() for s in self.scenarios]}

    @classmethod
    def from_json(cls, data: dict) -> "ScenarioSuite":
        return cls(
            name=data["name"],
            scenarios=[ScenarioConfig.from_json(s) for s in data["scenarios"]],
        )


def load_suite(name_or_path: str) -> ScenarioSuite:
    """Resolve a built-in suite name or read a suite JSON file."""
    from . import scenarios as sx
    if name_or_path == "mdkg":
        return ScenarioSuite("mdkg", sx.mdkg_scenarios())
    if name_or_path == "overcooked":
        return ScenarioSuite("overcooked", sx.overcooked_scenarios())
    path = Path(name_or_path)
    try:
        data = json.loads(path.read_text())
    except OSError as e:
        raise ValueError(f"cannot read suite {name_or_path!r}: {e}") from e
    return ScenarioSuite.from_json(data)


@dataclass
class EpisodeResult:
    scenario_id: str
    category: str
    repetition: int
    seed: int
    facilitator: str
    length: int
    success: bool
    feedback_count: int
    baseline_length: Optional[int] = None
    error: Optional[str] = None

    @property
    def speedup(self) -> Optional[float]:
        if self.baseline_length is None or self.length == 0:
            return None
        return self.baseline_length / self.length - 1

    def to_row(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            "category": self.category,
            "repetition": self.repetition,
            "seed": self.seed,
            "facilitator": self.facilitator,
            "length": self.length,
            "success": int(self.success),
            "feedback_count": self.feedback_count,
            "baseline_length": self.baseline_length,
            "speedup": self.speedup,
            "error": self.error or "",
        }


def _mean_se(values: list[float]) -> tuple[Optional[float], Optional[float]]:
    if not values:
        return None, None
    mean = statistics.fmean(values)
    se = statistics.stdev(values) / math.sqrt(len(values)) if len(values) > 1 else 0.0
    return mean, se


def _aggregate(results: list[EpisodeResult]) -> dict:
    succ = [1.0 if r.success else 0.0 for r in results]
    fb = [float(r.feedback_count) for r in results]
    sp = [r.speedup for r in results if r.speedup is not None]
    s_mean, s_se = _mean_se(succ)
    f_mean, f_se = _mean_se(fb)
    p_mean, p_se = _mean_se(sp)
    return {
        "episodes": len(results),
        "success_rate": s_mean,
        "success_rate_se": s_se,
        "speedup": p_mean,
        "speedup_se": p_se,
        "feedback_count": f_mean,
        "feedback_count_se": f_se,
    }


@dataclass
class MetricsReport:
    suite: str
    facilitator: str
    repetitions: int
    base_seed: int
    results: list[EpisodeResult] = field(default_factory=list)

    @property
    def overall(self) -> dict:
        return _aggregate(self.results)

    @property
    def per_category(self) -> dict[str, dict]:
        return {
            c: _aggregate([r for r in self.results if r.category == c])
            for c in CATEGORIES
        }

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "facilitator": self.facilitator,
            "repetitions": self.repetitions,
            "base_seed": self.base_seed,
            "overall": self.overall,
            "per_category": self.per_category,
            "episodes": [r.to_row() for r in self.results],
        }


def episode_seed(base_seed: int, scenario_id: str, repetition: int) -> int:
    return fork_rng(base_seed, f"{scenario_id}/rep{repetition}").randrange(2**31)


def _run_one(scenario: ScenarioConfig, facilitator_kind: str, repetition: int,
             base_seed: int) -> tuple[EpisodeResult, dict[str, EpisodeLog]]:
    seed = episode_seed(base_seed, scenario.scenario_id, repetition)
    logs: dict[str, EpisodeLog] = {}
    try:
        baseline = run_episode(scenario, facilitator_kind="none", seed=seed)
        logs["none"] = baseline
        if facilitator_kind == "none":
            facilitated = baseline
        else:
            facilitated = run_episode(scenario, facilitator_kind=facilitator_kind, seed=seed)
            logs[facilitator_kind] = facilitated
        result = EpisodeResult(
            scenario_id=scenario.scenario_id,
            category=scenario.category,
            repetition=repetition,
            seed=seed,
            facilitator=facilitator_kind,
            length=facilitated.terminal["length"],
            success=facilitated.terminal["success"],
            feedback_count=facilitated.terminal["feedback_count"],
            baseline_length=baseline.terminal["length"],
        )
    except Exception as e:  # a broken episode counts as failure, suite goes on
        log.exception("episode %s rep %d failed", scenario.scenario_id, repetition)
        result = EpisodeResult(
            scenario_id=scenario.scenario_id,
            category=scenario.category,
            repetition=repetition,
            seed=seed,
            facilitator=facilitator_kind,
            length=scenario.t_max,
            success=False,
            feedback_count=0,
            baseline_length=None,
            error=f"{type(e).__name__}: {e}",
        )
    return result, logs


def run_suite(suite: ScenarioSuite, facilitator_kind: str = "prosocial",
              repetitions: int = 1, base_seed: int = 42, workers: int = 1,
              ) -> tuple[MetricsReport, dict[tuple[str, int, str], EpisodeLog]]:
    """Run every scenario x repetition (plus paired baselines) and
    aggregate.  Results are keyed, so worker completion order never affects
    the report."""
    suite.validate()
    jobs = [(s, rep) for s in suite.scenarios for rep in range(repetitions)]
    results: dict[tuple[str, int], EpisodeResult] = {}
    logs: dict[tuple[str, int, str], EpisodeLog] = {}

    def work(job):
        scenario, rep = job
        return scenario, rep, _run_one(scenario, facilitator_kind, rep, base_seed)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(work, jobs))
    else:
        outcomes = [work(j) for j in jobs]
    for scenario, rep, (result, ep_logs) in outcomes:
        results[(scenario.scenario_id, rep)] = result
        for kind, ep_log in ep_logs.items():
            logs[(scenario.scenario_id, rep, kind)] = ep_log

    report = MetricsReport(
        suite=suite.name,
        facilitator=facilitator_kind,
        repetitions=repetitions,
        base_seed=base_seed,
        results=[results[(s.scenario_id, rep)]
                 for s in suite.scenarios for rep in range(repetitions)],
    )
    return report, logs


_CSV_FIELDS = [
    "scenario_id", "category", "repetition", "seed", "facilitator",
    "length", "success", "feedback_count", "baseline_length", "speedup", "error",
]


def export_report(report: MetricsReport, out_dir: str,
                  logs: Optional[dict] = None) -> dict[str, str]:
    """Write metrics JSON, a per-episode CSV, and optionally episode logs.
    Returns the written paths."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        metrics_path = out / "metrics.json"
        metrics_path.write_text(json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n")
        csv_path = out / "episodes.csv"
        with csv_path.open("w", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=_CSV_FIELDS)
            writer.writeheader()
            for r in report.results:
                writer.writerow(r.to_row())
        paths = {"metrics": str(metrics_path), "episodes": str(csv_path)}
        if logs:
            log_dir = out / "logs"
            log_dir.mkdir(exist_ok=True)
            for (sid, rep, kind), ep_log in sorted(logs.items()):
                p = log_dir / f"{sid}.rep{rep}.{kind}.jsonl"
                p.write_text(ep_log.to_jsonl())
            paths["logs"] = str(log_dir)
        return paths
    except OSError as e:
        raise OSError(f"failed writing report to {out_dir!r}: {e}") from e
