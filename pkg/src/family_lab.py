"""
Family Lab - owns the configuration and wires the family, extraction,
oracle, Turán and bounds subsystems behind one object
"""

import json
import logging
import os
from typing import Any, Dict, Optional

import psutil

from bench import BenchReport, BenchRunner, build_family
from boolean_algebra import determining_subfamily, enumerate_boolean_algebras
from bounds_report import BoundsProfile, build_profile
from errors import ExtremalError
from exact_oracle import MinFamilyResult, OracleResult, SearchConfig, max_subfamily, min_over_families
from extraction import ExtractionResult, greedy_extract, kleitman_extract, random_deletion_bd_free
from family_core import SetFamily, is_antichain, parse_family, rank_partition
from grid_analysis import column_prune, grid_bound, grid_violation, max_row_after_prune, render_grid, to_grid
from properties import FamilyProperty, PropertyKind
from turan import base_case_bound, build_kdk, count_kd2, ex_exact, family_hypergraph_bijection, link_report, turan_bound

EXTRACT_METHODS = ("random-deletion", "kleitman", "greedy")


class FamilyLab:
    """
    Entry point for every command: loads config.json over the defaults and
    hands the relevant limits to each subsystem call
    """

    def __init__(self, config_path: Optional[str] = None):
        self.config = self._load_config(config_path)
        self.logger = self._setup_logging()
        self.bench_runner = BenchRunner(self.config, self.workers)

    def _load_config(self, config_path: Optional[str]) -> Dict[str, Any]:
        """Load configuration from file or use defaults"""
        default_config = {
            "logging_level": "INFO",
            "log_file": None,
            "universe_limit": 64,
            "max_family_size": 65536,
            "enumeration_limit": 1_000_000,
            "node_limit": 2_000_000,
            "time_limit": 60.0,  # seconds
            "min_family_budget": 50_000,
            "hypergraph_edge_budget": 65536,
            "link_option_budget": 4096,
            "default_trials": 200,
            "strict_atoms": False,
            "spot_checks": 32,
            "threads_env": "EXTREMAL_THREADS",
            "suites_dir": "suites",
            "output_format": "json",
            "record_timings": False,
        }

        if config_path and os.path.exists(config_path):
            with open(config_path, 'r') as f:
                user_config = json.load(f)
                default_config.update(user_config)

        return default_config

    def _setup_logging(self) -> logging.Logger:
        """Setup logging configuration"""
        logging.basicConfig(
            level=getattr(logging, self.config["logging_level"]),
            format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
        )
        return logging.getLogger(__name__)

    @property
    def workers(self) -> int:
        """Thread count from the environment, else physical cores"""
        raw = os.environ.get(self.config["threads_env"])
        if raw:
            try:
                return max(1, int(raw))
            except ValueError:
                self.logger.warning(f"Ignoring non-integer {self.config['threads_env']}={raw!r}")
        return psutil.cpu_count(logical=False) or 1

    @property
    def limits(self) -> Dict[str, Any]:
        return {"universe_limit": self.config["universe_limit"],
                "max_family_size": self.config["max_family_size"]}

    def search_config(self, node_limit: Optional[int] = None, time_limit: Optional[float] = None) -> SearchConfig:
        return SearchConfig(node_limit or self.config["node_limit"], time_limit or self.config["time_limit"])

    def parse_property(self, text: str) -> FamilyProperty:
        return FamilyProperty.parse(text, strict=self.config["strict_atoms"])

    def load_family(self, path: str) -> SetFamily:
        with open(path, 'r') as f:
            text = f.read()
        try:
            return parse_family(text, self.config["universe_limit"])
        except ExtremalError as e:
            self.logger.error(f"Could not read family from {path}: {e}")
            raise

    def generate(self, kind: str, params: Dict[str, Any]) -> SetFamily:
        family = build_family(kind, params, **self.limits)
        self.logger.info(f"Generated {kind}: m={family.size}, n={family.universe_size}")
        return family

    def validate(self, text: str) -> Dict[str, Any]:
        """Parse and summarise: m, n, max rank and the size of every rank level"""
        family = parse_family(text, self.config["universe_limit"])
        table = rank_partition(family)
        levels = [list(table.level(k)) for k in range(1, table.max_rank + 1)]
        return {
            "ok": True,
            "m": family.size,
            "n": family.universe_size,
            "max_rank": table.max_rank,
            "level_sizes": [len(level) for level in levels],
            "levels_are_antichains": all(is_antichain(family.masks, level) for level in levels),
        }

    def detect(self, family: SetFamily, d: int, limit: Optional[int] = None) -> Dict[str, Any]:
        limit = limit or self.config["enumeration_limit"]
        try:
            witnesses = enumerate_boolean_algebras(family, d, limit=limit, strict=self.config["strict_atoms"])
        except ExtremalError as e:
            self.logger.error(f"B_{d} detection failed: {e}")
            raise
        records = []
        for witness in witnesses:
            record = witness.to_dict()
            record["determining"] = list(determining_subfamily(witness).indices)
            records.append(record)
        self.logger.info(f"Found {len(records)} B_{d} witnesses among {family.size} members")
        return {"d": d, "count": len(records), "witnesses": records}

    def grid(self, family: SetFamily, k: int, a: int) -> Dict[str, Any]:
        grid = to_grid(family, k)
        violation = grid_violation(grid, a)
        pruned = column_prune(grid, a)
        return {
            "k": k,
            "a": a,
            "points": sorted(list(p) for p in grid.points),
            "violation": None if violation is None else {
                "point": list(violation.point), "covering": [list(p) for p in violation.covering]
            },
            "pruned": sorted(list(p) for p in pruned.points),
            "max_row_after_prune": max_row_after_prune(grid, a),
            "grid_bound": grid_bound(k, a),
            "render": render_grid(grid),
        }

    def extract(self, family: SetFamily, prop: FamilyProperty, method: str, seed: Optional[int] = None,
                trials: Optional[int] = None, p: Optional[float] = None, order: str = "given") -> ExtractionResult:
        if method not in EXTRACT_METHODS:
            raise ValueError(f"method must be one of {EXTRACT_METHODS}, got {method!r}")
        try:
            if method == "random-deletion":
                if prop.kind is not PropertyKind.BD_FREE:
                    raise ValueError("random-deletion extracts bd properties only")
                return random_deletion_bd_free(
                    family, prop.params[0], p=p, seed=seed, trials=trials or self.config["default_trials"],
                    workers=self.workers, enumeration_limit=self.config["enumeration_limit"], strict=prop.strict,
                )
            if method == "kleitman":
                if prop.kind is not PropertyKind.UNION_FREE:
                    raise ValueError("kleitman extracts uf properties only")
                return kleitman_extract(family, prop.params[0])
            return greedy_extract(family, prop, order)
        except ExtremalError as e:
            self.logger.error(f"Extraction {method} failed: {e}")
            raise

    def exact(self, family: SetFamily, prop: FamilyProperty, node_limit: Optional[int] = None,
              time_limit: Optional[float] = None) -> OracleResult:
        return max_subfamily(family, prop, self.search_config(node_limit, time_limit))

    def exact_min(self, m: int, n: int, prop: FamilyProperty) -> MinFamilyResult:
        return min_over_families(m, n, prop, self.search_config(), budget=self.config["min_family_budget"])

    def turan(self, k: int, d: int, mode: str = "exact", method: str = "links") -> Dict[str, Any]:
        """mode is exact, bound or bijection"""
        if mode == "bound":
            out = {"k": k, "d": d, "turan_bound": str(turan_bound(k, d)), "value": float(turan_bound(k, d))}
            if d == 2:
                out["base_case_bound"] = base_case_bound(k)
            return out
        if mode == "bijection":
            report = family_hypergraph_bijection(
                k, d, spot_checks=self.config["spot_checks"],
                edge_budget=self.config["hypergraph_edge_budget"], **self.limits,
            )
            return report.to_dict()
        if mode != "exact":
            raise ValueError(f"mode must be exact, bound or bijection, got {mode!r}")

        hypergraph = build_kdk(k, d, self.config["hypergraph_edge_budget"])
        result = ex_exact(hypergraph, self.search_config(), method=method,
                          link_option_budget=self.config["link_option_budget"])
        bound = turan_bound(k, d)
        if result.proven and result.optimum >= bound:
            self.logger.error(f"ex(K_{d}^({k})) = {result.optimum} reaches the bound {bound}")
        return {
            "k": k,
            "d": d,
            "part_sizes": list(hypergraph.part_sizes),
            "edges": hypergraph.size,
            "copies": count_kd2(hypergraph),
            "result": result.to_dict(),
            "turan_bound": float(bound),
            "links": link_report(hypergraph, result.indices).to_dict(),
        }

    def bounds(self, **context: Any) -> BoundsProfile:
        return build_profile(**{key: value for key, value in context.items() if value is not None})

    async def bench(self, suite_path: str, seed: Optional[int] = None,
                    flags: Optional[Dict[str, Any]] = None) -> BenchReport:
        try:
            return await self.bench_runner.run(suite_path, seed=seed, flags=flags)
        except (ExtremalError, OSError, ValueError) as e:
            self.logger.error(f"Bench suite {suite_path} failed: {e}")
            raise
