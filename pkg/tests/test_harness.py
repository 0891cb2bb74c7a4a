"""Suite runner, metrics aggregation, exports."""

import json
from pathlib import Path

import pytest

from gridsocial.harness import (
    EpisodeResult,
    MetricsReport,
    ScenarioSuite,
    episode_seed,
    export_report,
    load_suite,
    run_suite,
)
from gridsocial.scenarios import MDKG_NOT_NEEDED, MDKG_USEFUL


def small_suite():
    return ScenarioSuite("small", [MDKG_NOT_NEEDED[0], MDKG_USEFUL[0]])


def test_load_builtin_suites():
    mdkg = load_suite("mdkg")
    oc = load_suite("overcooked")
    assert mdkg.category_counts() == {"not-needed": 6, "useful": 8, "necessary": 6}
    assert oc.category_counts() == {"not-needed": 7, "useful": 7, "necessary": 7}
    mdkg.validate()
    oc.validate()


def test_suite_json_round_trip(tmp_path):
    suite = small_suite()
    path = tmp_path / "suite.json"
    path.write_text(json.dumps(suite.to_json()))
    back = load_suite(str(path))
    assert back.name == "small"
    assert [s.scenario_id for s in back.scenarios] == ["mdkg-nn-1", "mdkg-u-1"]


def test_load_suite_missing_file():
    with pytest.raises(ValueError):
        load_suite("/no/such/suite.json")


def test_suite_validate_rejects_duplicate_ids():
    suite = ScenarioSuite("dup", [MDKG_NOT_NEEDED[0], MDKG_NOT_NEEDED[0]])
    with pytest.raises(ValueError):
        suite.validate()


def test_speedup_definition():
    r = EpisodeResult("s", "useful", 0, 0, "prosocial", length=10,
                      success=True, feedback_count=1, baseline_length=15)
    assert r.speedup == 0.5
    r2 = EpisodeResult("s", "useful", 0, 0, "prosocial", length=10,
                       success=True, feedback_count=0, baseline_length=10)
    assert r2.speedup == 0.0
    r3 = EpisodeResult("s", "useful", 0, 0, "prosocial", length=10,
                       success=False, feedback_count=0, baseline_length=None)
    assert r3.speedup is None


def test_episode_seed_stable_and_distinct():
    assert episode_seed(42, "a", 0) == episode_seed(42, "a", 0)
    assert episode_seed(42, "a", 0) != episode_seed(42, "a", 1)
    assert episode_seed(42, "a", 0) != episode_seed(42, "b", 0)


def test_run_suite_pairs_baselines_and_aggregates():
    report, logs = run_suite(small_suite(), facilitator_kind="prosocial")
    assert len(report.results) == 2
    for r in report.results:
        assert r.baseline_length is not None
        assert ("mdkg-nn-1" if r.scenario_id == "mdkg-nn-1" else "mdkg-u-1",
                0, "none") in logs
    overall = report.overall
    assert overall["episodes"] == 2
    assert 0.0 <= overall["success_rate"] <= 1.0
    cats = report.per_category
    assert cats["not-needed"]["feedback_count"] == 0.0
    assert cats["necessary"]["episodes"] == 0
    assert cats["necessary"]["success_rate"] is None


def test_run_suite_worker_count_does_not_change_report():
    r1, _ = run_suite(small_suite(), repetitions=2, workers=1)
    r4, _ = run_suite(small_suite(), repetitions=2, workers=4)
    assert json.dumps(r1.to_json(), sort_keys=True) == json.dumps(r4.to_json(), sort_keys=True)


def test_aggregate_reports_standard_errors():
    report, _ = run_suite(small_suite(), repetitions=2)
    overall = report.overall
    assert overall["success_rate_se"] is not None
    single, _ = run_suite(ScenarioSuite("one", [MDKG_NOT_NEEDED[0]]))
    assert single.overall["success_rate_se"] == 0.0


def test_export_report_writes_files(tmp_path):
    report, logs = run_suite(small_suite())
    paths = export_report(report, str(tmp_path / "out"), logs=logs)
    metrics = json.loads(Path(paths["metrics"]).read_text())
    assert metrics["suite"] == "small"
    assert len(metrics["episodes"]) == 2
    csv_text = Path(paths["episodes"]).read_text()
    assert csv_text.startswith("scenario_id,")
    assert len(csv_text.strip().splitlines()) == 3
    log_files = sorted(Path(paths["logs"]).iterdir())
    assert any("none" in f.name for f in log_files)


def test_export_report_unwritable_path():
    report = MetricsReport(suite="s", facilitator="none", repetitions=1, base_seed=0)
    with pytest.raises(OSError):
        export_report(report, "/proc/definitely-not-writable/x")


def test_broken_scenario_counts_as_failure():
    bad = MDKG_NOT_NEEDED[0]
    from dataclasses import replace as dc_replace
    import copy
    broken = copy.deepcopy(bad)
    broken.scenario_id = "broken"
    broken.agents = list(broken.agents)
    broken.agents[0] = dc_replace(broken.agents[0], goal="gem1", goal_set=("gem1", "gem2"))
    suite = ScenarioSuite("mixed", [broken])

    # sabotage after validation by pointing the layout at a missing gem
    from gridsocial import harness as h
    orig = h.run_episode

    def boom(*a, **kw):
        raise RuntimeError("exploded")

    h.run_episode = boom
    try:
        report, _ = run_suite(suite)
    finally:
        h.run_episode = orig
    r = report.results[0]
    assert not r.success and "exploded" in r.error
    assert report.overall["success_rate"] == 0.0
