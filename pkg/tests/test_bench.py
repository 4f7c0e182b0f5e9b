import asyncio
import math
import os

import pytest

from bench import (
    CSV_FIELDS,
    BenchRunner,
    bench_csv,
    build_family,
    family_label,
    random_family,
    report_rows,
    write_report,
)
from bounds_report import build_profile
from errors import UniverseTooLarge

SUITES = os.path.join(os.path.dirname(__file__), '..', 'suites')

CONFIG = {
    "default_trials": 50,
    "universe_limit": 64,
    "max_family_size": 65536,
    "enumeration_limit": 1_000_000,
    "node_limit": 200_000,
    "time_limit": 60.0,
    "strict_atoms": False,
    "record_timings": False,
}


def run_suite(path, seed=None, config=None, workers=2):
    runner = BenchRunner(dict(CONFIG, **(config or {})), workers)
    return asyncio.run(runner.run(path, seed=seed))


@pytest.fixture
def suite_file(tmp_path):
    def write(text, name="suite.yaml"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return write


def test_random_family_is_seeded():
    first = random_family(5, 10, seed=3)
    assert first.masks == random_family(5, 10, seed=3).masks
    assert list(first.masks) == sorted(first.masks)
    assert len(set(first.masks)) == 10
    with pytest.raises(ValueError):
        random_family(2, 5, seed=0)


def test_build_family_kinds(family_file):
    assert build_family("es", {"k": 3}).size == 9
    assert build_family("bd-extremal", {"k": 2, "d": 2}).size == 8
    assert build_family("leveled", {"q": 2, "k": 2}).size == 8
    assert build_family("geometric", {"k": 2, "q": 2, "a": 8}).size == 4 + 64
    assert build_family("co-singleton", {"m": 5}).size == 5
    assert build_family("chain-product", {"chains": [2, 3]}).size == 6
    path = family_file("2 2\n1\n1 2\n")
    assert build_family("file", {"path": path}).as_lists() == [[1], [1, 2]]
    with pytest.raises(ValueError):
        build_family("hypercube", {})
    with pytest.raises(UniverseTooLarge):
        build_family("power-set", {"n": 10}, max_family_size=512)


@pytest.mark.parametrize("kind,params,missing", [
    ("es", {}, "k"),
    ("bd-extremal", {"k": 2}, "d"),
    ("geometric", {"k": 2}, "q, a"),
    ("random", {"n": 4, "seed": 1}, "m"),
])
def test_build_family_names_missing_parameters(kind, params, missing):
    with pytest.raises(ValueError) as info:
        build_family(kind, params)
    assert str(info.value).endswith(f"needs parameter(s): {missing}")


def test_family_label_sorts_params():
    assert family_label("bd-extremal", {"k": 2, "d": 3}) == "bd-extremal(d=3, k=2)"


def test_expand_uf_es_suite():
    runner = BenchRunner(CONFIG)
    jobs = runner.expand(runner.load_suite(os.path.join(SUITES, "uf-es.yaml")))
    assert len(jobs) == 8
    assert [job.method for job in jobs[:2]] == ["kleitman", "exact"]
    assert {dict(job.params)["k"] for job in jobs} == {2, 3}


def test_expand_rejects_unknown_method(suite_file):
    path = suite_file("scenarios:\n  - family: es\n    params: {k: 2}\n    property: uf:2\n    methods: [anneal]\n")
    runner = BenchRunner(CONFIG)
    with pytest.raises(ValueError):
        runner.expand(runner.load_suite(path))


def test_empty_suite_produces_no_rows():
    report = run_suite(os.path.join(SUITES, "empty.yaml"), seed=5)
    assert report.rows == []
    assert not report.failed
    assert report.manifest.seed == 5
    assert report.manifest.timing is None


def test_b2_rows_respect_guarantee_and_optimum(suite_file):
    path = suite_file(
        "seed: 99\n"
        "trials: 100\n"
        "scenarios:\n"
        "  - family: power-set\n"
        "    sweep: {n: [3, 4]}\n"
        "    property: bd:2\n"
        "    methods: [random-deletion, exact]\n"
    )
    report = run_suite(path)
    assert not report.failed
    rows = {(row.m, row.method): row for row in report.rows}
    assert rows[(8, "random-deletion")].size >= math.ceil(rows[(8, "random-deletion")].guarantee) == 3
    assert rows[(16, "random-deletion")].size >= math.ceil(rows[(16, "random-deletion")].guarantee) == 5
    for m in (8, 16):
        exact = rows[(m, "exact")]
        if exact.proven:
            assert exact.size >= rows[(m, "random-deletion")].size
    assert "b2_upper" in rows[(8, "exact")].bounds


def test_uf_es_exact_within_grid_bound():
    report = run_suite(os.path.join(SUITES, "uf-es.yaml"))
    assert not report.failed
    for row in report.rows:
        if row.method == "exact":
            assert row.proven
            assert row.size <= row.bounds["grid_bound"]
        else:
            assert row.size >= math.floor(row.guarantee)
    sizes = {(row.family, row.property_tag, row.method): row.size for row in report.rows}
    assert sizes[("es(k=2)", "uf:2", "exact")] == 3


def test_reruns_are_byte_identical():
    path = os.path.join(SUITES, "uf-es.yaml")
    first = write_report(run_suite(path, workers=1), None)
    second = write_report(run_suite(path, workers=4), None)
    assert first == second
    assert '"runtime"' in first
    assert '"timing": null' in first


def test_failing_row_is_reported(suite_file):
    path = suite_file(
        "scenarios:\n"
        "  - name: wrong-method\n"
        "    family: es\n"
        "    params: {k: 2}\n"
        "    property: bd:2\n"
        "    methods: [kleitman, count]\n"
    )
    report = run_suite(path, seed=1)
    assert report.failed
    failed, counted = report.rows
    assert failed.error["error"] == "ValueError"
    assert failed.size is None
    assert counted.error is None and counted.count == 1


def test_timings_only_when_recorded():
    report = run_suite(os.path.join(SUITES, "uf-es.yaml"), config={"record_timings": True})
    assert report.manifest.timing is not None
    assert all(row.runtime is not None for row in report.rows)


def test_csv_projection():
    report = run_suite(os.path.join(SUITES, "uf-es.yaml"))
    text = bench_csv(report)
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_FIELDS)
    assert len(lines) == 9
    assert "grid_bound=" in lines[1]


def test_report_rows_from_bench_result():
    report = run_suite(os.path.join(SUITES, "uf-es.yaml")).to_dict()
    rows = report_rows(report)
    assert rows
    for row in rows:
        assert row["slack"] == pytest.approx(row["value"] - row["size"])


def test_report_rows_for_single_result():
    profile = build_profile(m=4, a=2, k=2)
    rows = report_rows({"result": {"optimum": 3, "method": "branch-and-bound"}}, profile, "es(k=2)", 4)
    grid = next(row for row in rows if row["bound"] == "grid_bound")
    assert (grid["value"], grid["slack"]) == (4.0, 1.0)
    with pytest.raises(ValueError):
        report_rows({"optimum": 3})
