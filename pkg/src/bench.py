"""
Bench - runs YAML suites of (family, property, method) scenarios and writes
one result row per combination, with the applicable bounds alongside
"""

import asyncio
import csv
import hashlib
import io
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import yaml
from dataclasses_json import dataclass_json

from bounds_report import BoundsProfile, build_profile
from constructions import (
    ChainProductSpec,
    LeveledSpec,
    bd_extremal_family,
    chain_product,
    co_singleton_family,
    erdos_shelah_family,
    leveled_family,
    power_set,
)
from errors import ExtremalError
from exact_oracle import SearchConfig, count_violations, max_subfamily
from extraction import greedy_extract, kleitman_extract, random_deletion_bd_free
from family_core import SetFamily, family_from_masks, parse_family
from properties import FamilyProperty, PropertyKind

logger = logging.getLogger(__name__)

TOOL_VERSION = "1.0.0"

FAMILY_KINDS = ("power-set", "es", "bd-extremal", "leveled", "geometric", "co-singleton",
                "chain-product", "random", "file")
# parameters each kind reads; "seed" for random is optional
KIND_PARAMS = {
    "power-set": ("n",),
    "es": ("k",),
    "bd-extremal": ("k", "d"),
    "leveled": ("q", "k"),
    "geometric": ("k", "q", "a"),
    "co-singleton": ("m",),
    "chain-product": ("chains",),
    "random": ("n", "m"),
    "file": ("path",),
}
BENCH_METHODS = ("random-deletion", "kleitman", "greedy", "exact", "count")

CSV_FIELDS = ["scenario", "family", "m", "n", "property", "method", "size", "guarantee",
              "proven", "count", "runtime", "error", "bounds"]
REPORT_FIELDS = ["family", "m", "method", "size", "bound", "value", "slack"]


@dataclass_json
@dataclass
class RunManifest:
    command: str
    flags: Dict[str, Any]
    seed: Optional[int]
    tool_version: str = TOOL_VERSION
    input_digest: Optional[str] = None
    # wall time in seconds, only when timings are recorded
    timing: Optional[float] = None


@dataclass_json
@dataclass
class BenchRow:
    scenario: str
    family: str
    m: Optional[int]
    n: Optional[int]
    property_tag: str
    method: str
    size: Optional[int] = None
    guarantee: Optional[float] = None
    proven: Optional[bool] = None
    count: Optional[int] = None
    bounds: Dict[str, float] = field(default_factory=dict)
    runtime: Optional[float] = None
    error: Optional[Dict[str, Any]] = None
    details: Dict[str, Any] = field(default_factory=dict)


@dataclass_json
@dataclass
class BenchReport:
    manifest: RunManifest
    rows: List[BenchRow] = field(default_factory=list)

    @property
    def failed(self) -> bool:
        return any(row.error is not None for row in self.rows)


@dataclass(frozen=True)
class BenchJob:
    scenario: str
    kind: str
    params: Tuple[Tuple[str, Any], ...]
    property_tag: str
    method: str
    trials: int
    node_limit: Optional[int] = None
    time_limit: Optional[float] = None


def file_digest(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def random_family(n: int, m: int, seed: int, universe_limit: Optional[int] = None) -> SetFamily:
    """m distinct subsets of [n] drawn uniformly without replacement"""
    if m > 2 ** n:
        raise ValueError(f"cannot draw {m} distinct subsets of a {n}-element set")
    rng = np.random.default_rng(seed)
    masks = sorted(int(x) for x in rng.choice(2 ** n, size=m, replace=False))
    return family_from_masks(n, masks, universe_limit)


def family_label(kind: str, params: Dict[str, Any]) -> str:
    inner = ", ".join(f"{key}={value}" for key, value in sorted(params.items()))
    return f"{kind}({inner})"


def build_family(kind: str, params: Dict[str, Any], universe_limit: Optional[int] = None,
                 max_family_size: Optional[int] = None) -> SetFamily:
    if kind not in KIND_PARAMS:
        raise ValueError(f"unknown family kind {kind!r}; expected one of {FAMILY_KINDS}")
    missing = [key for key in KIND_PARAMS[kind] if params.get(key) is None]
    if missing:
        raise ValueError(f"family kind {kind!r} needs parameter(s): {', '.join(missing)}")
    limits = {"universe_limit": universe_limit, "max_family_size": max_family_size}
    if kind == "power-set":
        return power_set(int(params["n"]), **limits)
    if kind == "es":
        return erdos_shelah_family(int(params["k"]), **limits)
    if kind == "bd-extremal":
        return bd_extremal_family(int(params["k"]), int(params["d"]), **limits)
    if kind == "leveled":
        return leveled_family(LeveledSpec.uniform(int(params["q"]), int(params["k"])), **limits)
    if kind == "geometric":
        spec = LeveledSpec.geometric(int(params["k"]), int(params["q"]), int(params["a"]))
        return leveled_family(spec, **limits)
    if kind == "co-singleton":
        return co_singleton_family(int(params["m"]))
    if kind == "chain-product":
        return chain_product(ChainProductSpec(tuple(int(s) for s in params["chains"])), **limits)
    if kind == "random":
        return random_family(int(params["n"]), int(params["m"]), int(params.get("seed", 0)), universe_limit)
    return parse_family(Path(params["path"]).read_text(), universe_limit)


def row_bounds(kind: str, params: Dict[str, Any], prop: FamilyProperty, m: int) -> BoundsProfile:
    if m < 1:
        return BoundsProfile({"m": m})
    if prop.kind is PropertyKind.BD_FREE:
        d = prop.params[0]
        k = params.get("k") if kind == "bd-extremal" and params.get("d") == d else None
        return build_profile(m=m, d=d, k=k)
    if prop.kind is PropertyKind.UNION_FREE:
        a = prop.params[0]
        k = params.get("k") if kind in ("es", "leveled") else None
        q = params.get("q") if kind == "leveled" else None
        return build_profile(m=m, a=a, k=k, q=q)
    a, b = prop.params
    return build_profile(a=a, b=b)


class BenchRunner:
    """Expands a suite into jobs and runs them on a thread pool, keeping suite order"""

    def __init__(self, config: Dict[str, Any], workers: int = 1):
        self.config = config
        self.workers = max(1, workers)
        self.logger = logging.getLogger(__name__)

    def load_suite(self, path: str) -> Dict[str, Any]:
        with open(path, 'r') as f:
            suite = yaml.safe_load(f) or {}
        if not isinstance(suite, dict):
            raise ValueError(f"suite {path} must be a mapping")
        scenarios = suite.get("scenarios") or []
        if not isinstance(scenarios, list):
            raise ValueError(f"suite {path}: 'scenarios' must be a list")
        suite["scenarios"] = scenarios
        return suite

    def expand(self, suite: Dict[str, Any]) -> List[BenchJob]:
        jobs = []
        default_trials = int(suite.get("trials", self.config.get("default_trials", 200)))
        for position, scenario in enumerate(suite["scenarios"]):
            name = scenario.get("name", f"scenario-{position}")
            kind = scenario["family"]
            base = dict(scenario.get("params") or {})
            sweep = scenario.get("sweep") or {}
            keys = sorted(sweep)
            properties = scenario.get("property", [])
            properties = [properties] if isinstance(properties, str) else list(properties)
            methods = scenario.get("methods", [])
            unknown = [method for method in methods if method not in BENCH_METHODS]
            if unknown:
                raise ValueError(f"scenario {name}: unknown methods {unknown}")
            trials = int(scenario.get("trials", default_trials))
            node_limit = scenario.get("node_limit")
            time_limit = scenario.get("time_limit")
            for values in product(*(sweep[key] for key in keys)):
                params = dict(base, **dict(zip(keys, values)))
                frozen = tuple(sorted((k, tuple(v) if isinstance(v, list) else v) for k, v in params.items()))
                for tag in properties:
                    for method in methods:
                        jobs.append(BenchJob(name, kind, frozen, tag, method, trials, node_limit, time_limit))
        return jobs

    def run_job(self, job: BenchJob, seed: int) -> BenchRow:
        params = dict(job.params)
        row = BenchRow(job.scenario, family_label(job.kind, params), None, None, job.property_tag, job.method)
        started = time.monotonic()
        try:
            prop = FamilyProperty.parse(job.property_tag, strict=self.config.get("strict_atoms", False))
            family = build_family(job.kind, params, self.config.get("universe_limit"),
                                  self.config.get("max_family_size"))
            row.m, row.n = family.size, family.universe_size
            self._apply_method(row, job, family, prop, seed)
            row.bounds = {b.name: b.value for b in row_bounds(job.kind, params, prop, family.size).bounds}
        except (ExtremalError, ValueError, KeyError, OSError) as e:
            self.logger.warning(f"Row {row.family} {job.method} failed: {e}")
            row.error = e.to_dict() if isinstance(e, ExtremalError) else {"error": type(e).__name__,
                                                                          "message": str(e)}
        if self.config.get("record_timings"):
            row.runtime = time.monotonic() - started
        return row

    def _apply_method(self, row: BenchRow, job: BenchJob, family: SetFamily,
                      prop: FamilyProperty, seed: int) -> None:
        if job.method == "random-deletion":
            if prop.kind is not PropertyKind.BD_FREE:
                raise ValueError("random-deletion extracts bd properties only")
            result = random_deletion_bd_free(
                family, prop.params[0], seed=seed, trials=job.trials,
                enumeration_limit=self.config.get("enumeration_limit"), strict=prop.strict,
            )
            row.size, row.guarantee = result.size, result.guarantee
            row.details = {"mean": result.mean, "p": result.details["p"],
                           "pessimistic": result.guarantee_pessimistic}
        elif job.method == "kleitman":
            if prop.kind is not PropertyKind.UNION_FREE:
                raise ValueError("kleitman extracts uf properties only")
            result = kleitman_extract(family, prop.params[0])
            row.size, row.guarantee = result.size, result.guarantee
            row.details = {"level": result.details["level"]}
        elif job.method == "greedy":
            row.size = greedy_extract(family, prop).size
        elif job.method == "exact":
            config = SearchConfig(job.node_limit or self.config.get("node_limit", 2_000_000),
                                  job.time_limit or self.config.get("time_limit", 60.0))
            result = max_subfamily(family, prop, config)
            row.size, row.proven = result.optimum, result.proven
        elif job.method == "count":
            row.count = count_violations(family, prop)

    async def run(self, suite_path: str, seed: Optional[int] = None,
                  flags: Optional[Dict[str, Any]] = None) -> BenchReport:
        suite = self.load_suite(suite_path)
        if seed is None:
            seed = suite.get("seed")
        if seed is None:
            seed = int(np.random.SeedSequence().entropy % (2 ** 32))
            self.logger.info(f"No seed given, using generated seed {seed}")
        jobs = self.expand(suite)
        self.logger.info(f"Running suite {suite.get('name', suite_path)}: {len(jobs)} rows on {self.workers} workers")

        started = time.monotonic()
        loop = asyncio.get_running_loop()
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            rows = await asyncio.gather(*(loop.run_in_executor(pool, self.run_job, job, seed) for job in jobs))

        manifest = RunManifest(
            command="bench",
            flags=dict(flags or {"suite": suite_path}),
            seed=seed,
            input_digest=file_digest(suite_path),
        )
        if self.config.get("record_timings"):
            manifest.timing = time.monotonic() - started
        report = BenchReport(manifest, list(rows))
        failures = sum(1 for row in report.rows if row.error)
        self.logger.info(f"Suite finished: {len(report.rows)} rows, {failures} failed")
        return report


def dump_json(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def rows_to_csv(rows: Sequence[Dict[str, Any]], fieldnames: Sequence[str]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(fieldnames), extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()


def bench_csv(report: BenchReport) -> str:
    rows = []
    for row in report.rows:
        record = row.to_dict()
        record["property"] = row.property_tag
        record["error"] = row.error["message"] if row.error else ""
        record["bounds"] = ";".join(f"{name}={value:.6g}" for name, value in sorted(row.bounds.items()))
        rows.append(record)
    return rows_to_csv(rows, CSV_FIELDS)


def write_report(report: BenchReport, path: Optional[str], fmt: str = "json") -> str:
    text = bench_csv(report) if fmt == "csv" else dump_json(report.to_dict())
    if path:
        Path(path).write_text(text)
    return text


def report_rows(result: Dict[str, Any], profile: Optional[BoundsProfile] = None,
                family: str = "", m: Optional[int] = None) -> List[Dict[str, Any]]:
    """Result joined with bounds: one row per bound, slack = bound value - size"""
    if "rows" in result:
        joined = []
        for row in result["rows"]:
            if row.get("size") is None:
                continue
            for name, value in sorted(row.get("bounds", {}).items()):
                joined.append({"family": row["family"], "m": row["m"], "method": row["method"],
                               "size": row["size"], "bound": name, "value": value,
                               "slack": value - row["size"]})
        return joined

    body = result.get("result", result)
    size = body.get("optimum", len(body.get("indices", [])))
    method = body.get("method", "")
    if profile is None:
        raise ValueError("a bounds profile is needed for a single result")
    return [
        {"family": family, "m": m, "method": method, "size": size, "bound": bound.name,
         "value": bound.value, "slack": bound.value - size}
        for bound in profile.bounds
    ]
