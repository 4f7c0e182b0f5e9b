#!/usr/bin/env python3
"""
Extremal Subfamily Toolkit - Command Line Entry Point
Build families, detect Boolean algebras, extract and certify large
B_d-free or union-free subfamilies, and compare them with known bounds
"""

import argparse
import asyncio
import json
import logging
import os
import sys
from typing import Any, Dict, List, Optional

import yaml

# Add src directory to Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), 'src'))

from bench import (
    REPORT_FIELDS,
    TOOL_VERSION,
    RunManifest,
    dump_json,
    file_digest,
    report_rows,
    rows_to_csv,
    write_report,
)
from errors import ExtremalError
from family_core import format_family
from family_lab import EXTRACT_METHODS, FamilyLab
from metrics import write_metrics

DEFAULT_CONFIG = os.path.join(os.path.dirname(__file__), 'config.json')

# flags that never change what a command computes
UNRECORDED_FLAGS = {"command", "config", "out", "metrics_file"}


class CommandFailed(Exception):
    """A command finished but reported failures (bench rows with errors)"""


class FamilyLabRunner:
    """Dispatches parsed arguments to FamilyLab and renders the outputs"""

    def __init__(self, config_path: str):
        self.lab = FamilyLab(config_path)
        self.logger = logging.getLogger(__name__)

    def manifest(self, args: argparse.Namespace, seed: Optional[int] = None,
                 input_path: Optional[str] = None) -> RunManifest:
        flags = {key: value for key, value in sorted(vars(args).items()) if key not in UNRECORDED_FLAGS}
        if seed is not None:
            flags["seed"] = seed
        return RunManifest(
            command=args.command,
            flags=flags,
            seed=seed,
            tool_version=TOOL_VERSION,
            input_digest=file_digest(input_path) if input_path else None,
        )

    def emit(self, args: argparse.Namespace, manifest: RunManifest, result: Any,
             csv_rows: Optional[List[Dict[str, Any]]] = None, csv_fields: Optional[List[str]] = None) -> str:
        if args.format == "csv" and csv_rows is not None:
            text = rows_to_csv(csv_rows, csv_fields or sorted({key for row in csv_rows for key in row}))
        else:
            text = dump_json({"manifest": manifest.to_dict(), "result": result})
        if args.out:
            with open(args.out, 'w') as f:
                f.write(text)
            self.logger.info(f"Wrote {args.out}")
        else:
            sys.stdout.write(text)
        return text

    def run_generate(self, args: argparse.Namespace) -> None:
        params = {}
        for item in args.param:
            key, _, raw = item.partition("=")
            params[key.strip()] = yaml.safe_load(raw)
        family = self.lab.generate(args.kind, params)
        if args.format == "text":
            text = format_family(family)
            if args.out:
                with open(args.out, 'w') as f:
                    f.write(text)
            else:
                sys.stdout.write(text)
            return
        self.emit(args, self.manifest(args), {"universe_size": family.universe_size, "members": family.as_lists()})

    def run_validate(self, args: argparse.Namespace) -> None:
        with open(args.family, 'r') as f:
            summary = self.lab.validate(f.read())
        self.emit(args, self.manifest(args, input_path=args.family), summary, [summary])

    def run_detect(self, args: argparse.Namespace) -> None:
        family = self.lab.load_family(args.family)
        result = self.lab.detect(family, args.d, args.limit)
        rows = [{"d": w["d"], "atoms": json.dumps(w["atoms"]), "members": json.dumps(w["members"])}
                for w in result["witnesses"]]
        self.emit(args, self.manifest(args, input_path=args.family), result, rows, ["d", "atoms", "members"])

    def run_grid(self, args: argparse.Namespace) -> None:
        family = self.lab.load_family(args.family)
        result = self.lab.grid(family, args.k, args.a)
        if args.show:
            sys.stderr.write(result["render"])
        self.emit(args, self.manifest(args, input_path=args.family), result)

    def run_extract(self, args: argparse.Namespace) -> None:
        family = self.lab.load_family(args.family)
        prop = self.lab.parse_property(args.property)
        result = self.lab.extract(family, prop, args.method, seed=args.seed, trials=args.trials,
                                  p=args.p, order=args.order)
        row = {"method": result.method, "property": result.property_tag, "size": result.size,
               "guarantee": result.guarantee, "seed": result.seed}
        manifest = self.manifest(args, seed=result.seed, input_path=args.family)
        self.emit(args, manifest, result.to_dict(), [row])

    def run_exact(self, args: argparse.Namespace) -> None:
        family = self.lab.load_family(args.family)
        prop = self.lab.parse_property(args.property)
        result = self.lab.exact(family, prop, args.node_limit, args.time_limit)
        row = {"property": result.property_tag, "optimum": result.optimum, "proven": result.proven,
               "nodes": result.nodes}
        self.emit(args, self.manifest(args, input_path=args.family), result.to_dict(), [row])

    def run_exact_min(self, args: argparse.Namespace) -> None:
        prop = self.lab.parse_property(args.property)
        result = self.lab.exact_min(args.m, args.n, prop)
        self.emit(args, self.manifest(args), result.to_dict())

    def run_turan(self, args: argparse.Namespace) -> None:
        mode = "bound" if args.bound else "bijection" if args.bijection else "exact"
        result = self.lab.turan(args.k, args.d, mode=mode, method=args.method)
        self.emit(args, self.manifest(args), result)

    def run_bounds(self, args: argparse.Namespace) -> None:
        profile = self.lab.bounds(m=args.m, d=args.d, a=args.a, b=args.b, k=args.k, q=args.q, n=args.n,
                                  empirical=args.empirical)
        rows = [bound.to_dict() for bound in profile.bounds]
        for row in rows:
            row["inputs"] = json.dumps(row["inputs"], sort_keys=True)
        self.emit(args, self.manifest(args), profile.to_dict(), rows,
                  ["name", "formula", "inputs", "value", "exact", "direction", "asymptotic", "caveat", "reference"])

    def run_report(self, args: argparse.Namespace) -> None:
        with open(args.result, 'r') as f:
            data = json.load(f)
        body = data.get("result", data)
        profile = None
        if "rows" not in body:
            profile = self.lab.bounds(m=args.m, d=args.d, a=args.a, b=args.b, k=args.k, q=args.q)
        rows = report_rows(body, profile, family=args.family_label or "", m=args.m)
        self.emit(args, self.manifest(args, input_path=args.result), rows, rows, REPORT_FIELDS)

    async def run_bench(self, args: argparse.Namespace) -> None:
        flags = {key: value for key, value in sorted(vars(args).items()) if key not in UNRECORDED_FLAGS}
        report = await self.lab.bench(args.suite, seed=args.seed, flags=flags)
        report.manifest.flags["seed"] = report.manifest.seed
        text = write_report(report, args.out, args.format)
        if not args.out:
            sys.stdout.write(text)
        if args.metrics_file:
            write_metrics(args.metrics_file)
        if report.failed:
            raise CommandFailed(f"{sum(1 for row in report.rows if row.error)} bench rows failed")

    async def run_replay(self, args: argparse.Namespace) -> None:
        with open(args.file, 'r') as f:
            data = json.load(f)
        manifest = RunManifest.from_dict(data["manifest"])
        if manifest.tool_version != TOOL_VERSION:
            self.logger.warning(f"Replaying a {manifest.tool_version} manifest with {TOOL_VERSION}")
        replayed = argparse.Namespace(**manifest.flags)
        replayed.command = manifest.command
        replayed.out = args.out
        replayed.metrics_file = None
        if getattr(replayed, "timings", False):
            self.lab.config["record_timings"] = True
        for key in ("family", "suite", "result"):
            path = getattr(replayed, key, None)
            if manifest.input_digest and isinstance(path, str) and os.path.exists(path):
                if file_digest(path) != manifest.input_digest:
                    self.logger.warning(f"{path} changed since the recorded run")
        self.logger.info(f"Replaying {manifest.command} with seed {manifest.seed}")
        await self.dispatch(replayed)

    async def dispatch(self, args: argparse.Namespace) -> None:
        handler = getattr(self, "run_" + args.command.replace("-", "_"))
        if asyncio.iscoroutinefunction(handler):
            await handler(args)
        else:
            handler(args)


def _probability(value: str) -> Optional[float]:
    """--p takes a float in (0, 1] or "auto" for the default deletion probability"""
    if value == "auto":
        return None
    try:
        return float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a probability or 'auto', got {value!r}")


def _add_context(parser: argparse.ArgumentParser) -> None:
    for flag in ("m", "d", "a", "b", "k", "q"):
        parser.add_argument(f"--{flag}", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Extremal subfamily toolkit")
    parser.add_argument("--config", default=DEFAULT_CONFIG, help="Path to config.json")
    parser.add_argument("--format", choices=["json", "csv", "text"], default=None,
                        help="Output format (json is canonical, csv is a projection)")
    parser.add_argument("--out", default=None, help="Write output here instead of stdout")
    parser.add_argument("--timings", action="store_true", help="Record wall times in outputs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="Build a named family")
    p.add_argument("--kind", required=True)
    p.add_argument("--param", action="append", default=[], help="key=value, repeatable")

    p = sub.add_parser("validate", help="Parse a family file and summarise it")
    p.add_argument("family")

    p = sub.add_parser("detect", help="Enumerate B_d witnesses")
    p.add_argument("family")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--limit", type=int, default=None)

    p = sub.add_parser("grid", help="View a subfamily of F_ES(k) as grid points")
    p.add_argument("family")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--show", action="store_true")

    p = sub.add_parser("extract", help="Extract a large subfamily with a guarantee")
    p.add_argument("family")
    p.add_argument("--property", required=True, help="bd:d, uf:a or abuf:a,b")
    p.add_argument("--method", choices=EXTRACT_METHODS, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--p", type=_probability, default=None, help="deletion probability or auto")
    p.add_argument("--order", default="given")

    p = sub.add_parser("exact", help="Exact largest subfamily by branch and bound")
    p.add_argument("family")
    p.add_argument("--property", required=True)
    p.add_argument("--node-limit", type=int, default=None)
    p.add_argument("--time-limit", type=float, default=None)

    p = sub.add_parser("exact-min", help="Minimum over all m-families on [n]")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--property", required=True)

    p = sub.add_parser("turan", help="Turán numbers of K(k, k^2, ...)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true")
    mode.add_argument("--bound", action="store_true")
    mode.add_argument("--bijection", action="store_true")
    p.add_argument("--method", choices=["links", "deletion"], default="links")

    p = sub.add_parser("bounds", help="Evaluate every bound for a context")
    _add_context(p)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--empirical", type=float, default=None)

    p = sub.add_parser("report", help="Join a result file with its bounds")
    p.add_argument("result")
    _add_context(p)
    p.add_argument("--family-label", default=None)

    p = sub.add_parser("bench", help="Run a YAML suite")
    p.add_argument("suite")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--metrics-file", default=None)

    p = sub.add_parser("replay", help="Re-run the command recorded in an output file")
    p.add_argument("file")
    return parser


async def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    args = build_parser().parse_args(argv)
    runner = FamilyLabRunner(args.config)
    config = runner.lab.config

    if config.get("log_file"):
        handler = logging.FileHandler(config["log_file"])
        handler.setFormatter(logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s'))
        logging.getLogger().addHandler(handler)
    if args.format is None:
        args.format = "text" if args.command == "generate" else config["output_format"]
    if args.timings:
        config["record_timings"] = True

    try:
        await runner.dispatch(args)
    except ExtremalError as e:
        logging.error(f"{args.command} failed: {e}")
        sys.stdout.write(dump_json(e.to_dict()))
        return 1
    except CommandFailed as e:
        logging.error(str(e))
        return 1
    except (OSError, ValueError, KeyError, TypeError) as e:
        logging.error(f"{args.command} failed: {e}")
        sys.stdout.write(dump_json({"error": type(e).__name__, "message": str(e)}))
        return 1
    return 0


if __name__ == "__main__":
    try:
        sys.exit(asyncio.run(main()))
    except KeyboardInterrupt:
        print("\nOperation cancelled by user.")
        sys.exit(130)
    except OSError as e:
        sys.stdout.write(dump_json({"error": type(e).__name__, "message": str(e)}))
        logging.error(f"Fatal error: {str(e)}")
        sys.exit(1)
