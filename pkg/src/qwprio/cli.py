"""Command-line entry point: ``qwprio {stats,ingest,score,crossval,mdt,enrich}``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
Settings resolve as command-line flags > ``--config`` JSON file > defaults.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, baselines, qwalk
from . import walk_analysis as wa
from .errors import DataError, NumericalError
from .evaluation import MethodConfig, run_benchmark
from .graph import compute_stats, load_graph
from .hypergeom import enrichment_pvalue
from .ingest import (SOURCES, SeedSet, build_seed_sets, filter_associations,
                     read_associations, read_seed_sets, write_seed_sets)
from .scores import METHODS, write_scores

log = logging.getLogger("qwprio")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3
MAX_UNMAPPED_FRACTION = 0.9


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    graph: str | None = None
    extra_columns: bool = False
    keep_self_edges: bool = True
    associations: str | None = None
    source: str = "RAW"
    min_coverage: int = 15
    seed_sets: str | None = None
    disease: str | None = None
    seeds: list[str] | None = None
    method: str = "QA"
    methods: list[str] = field(default_factory=lambda: list(METHODS))
    t: float = qwalk.DEFAULT_T
    alpha: float = qwalk.DEFAULT_ALPHA
    dk_t: float = baselines.DK_T
    restart: float = baselines.RWR_RESTART
    diamond_weight: int = baselines.DIAMOND_WEIGHT
    n_rank: int | None = None
    trials: int = 10
    n_max: int = 300
    rng_seed: int | None = None
    tolerance: float = qwalk.DEFAULT_TOL
    out_dir: str | None = None
    out: str | None = None
    workers: int = field(default_factory=lambda: os.cpu_count() or 1)
    alphas: list[float] = field(default_factory=lambda: list(wa.DEFAULT_ALPHAS))
    degree_ranges: list[list[int]] = field(
        default_factory=lambda: [list(r) for r in wa.DEFAULT_DEGREE_RANGES])
    samples: int = 50
    times: list[float] | None = None
    n_times: int = 50
    t_max: float = 1.0
    disease_set_name: str | None = None
    network_name: str | None = None

    def validate(self) -> None:
        for name in ("t", "alpha", "dk_t", "t_max"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise UsageError(f"--{name.replace('_', '-')} must be finite and >= 0")
        if not 0 < self.restart < 1:
            raise UsageError("--restart must lie in (0, 1)")
        if not 0 < self.tolerance <= 1e-3:
            raise UsageError("--tolerance must lie in (0, 1e-3]")
        for name in ("diamond_weight", "trials", "n_max", "samples", "n_times", "workers"):
            if getattr(self, name) < 1:
                raise UsageError(f"--{name.replace('_', '-')} must be >= 1")
        if self.n_rank is not None and self.n_rank < 1:
            raise UsageError("--n-rank must be >= 1")
        if self.min_coverage < 0:
            raise UsageError("--min-coverage must be >= 0")
        if self.source.upper() not in SOURCES:
            raise UsageError(f"--source must be one of {', '.join(SOURCES)}")
        self.source = self.source.upper()
        bad = [m for m in [self.method, *self.methods] if m not in METHODS]
        if bad:
            raise UsageError(f"unknown method {bad[0]!r}; valid methods: {', '.join(METHODS)}")
        for a in self.alphas:
            if not (math.isfinite(a) and a >= 0):
                raise UsageError("alphas must be finite and >= 0")
        for r in self.degree_ranges:
            if len(r) != 2 or r[0] > r[1]:
                raise UsageError(f"bad degree range {r!r}")

    def method_config(self, name: str) -> MethodConfig:
        params = {
            "QA": {"t": self.t, "alpha": self.alpha, "tolerance": self.tolerance},
            "DK": {"t": self.dk_t, "tolerance": self.tolerance},
            "RWR": {"restart": self.restart},
            "DIA": {"alpha_w": self.diamond_weight},
            "NBR": {},
        }[name]
        if name == "DIA" and self.n_rank is not None:
            params["n_rank"] = self.n_rank
        return MethodConfig(name, params)


CONFIG_FIELDS = {f.name for f in dataclasses.fields(RunConfig)}


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _labels(text):
    return [x.strip() for x in text.split(",") if x.strip()]


def _methods(text):
    return [x.upper() for x in _labels(text)]


def _ranges(text):
    out = []
    for part in _labels(text):
        lo, sep, hi = part.partition("-")
        try:
            out.append([int(lo), int(hi if sep else lo)])
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad degree range {part!r}; use LO-HI")
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    # every option defaults to None so that "not given" is distinguishable
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of RunConfig fields")
    common.add_argument("--out-dir", dest="out_dir")
    common.add_argument("-v", "--verbose", action="store_true", default=None)

    graph = argparse.ArgumentParser(add_help=False)
    graph.add_argument("--graph", help="edge-list file")
    graph.add_argument("--extra-columns", dest="extra_columns", action="store_true", default=None,
                       help="ignore columns after the first two")
    graph.add_argument("--drop-self-edges", dest="keep_self_edges", action="store_false",
                       default=None)

    assoc = argparse.ArgumentParser(add_help=False)
    assoc.add_argument("--associations", help="association TSV")
    assoc.add_argument("--source", type=str.upper, choices=SOURCES)
    assoc.add_argument("--min-coverage", dest="min_coverage", type=int)
    assoc.add_argument("--seed-sets", dest="seed_sets", help="seed-set JSON from 'ingest'")

    walk = argparse.ArgumentParser(add_help=False)
    walk.add_argument("--t", type=float, help=f"QA walk time (default {qwalk.DEFAULT_T})")
    walk.add_argument("--alpha", type=float, help=f"seed self-loop weight (default {qwalk.DEFAULT_ALPHA})")
    walk.add_argument("--dk-t", dest="dk_t", type=float)
    walk.add_argument("--restart", type=float)
    walk.add_argument("--diamond-weight", dest="diamond_weight", type=int)
    walk.add_argument("--n-rank", dest="n_rank", type=int)
    walk.add_argument("--tolerance", type=float)

    parser = _Parser(prog="qwprio", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("stats", parents=[common, graph], help="network summary statistics")
    p.add_argument("graph_path", nargs="?", help="edge-list file (or --graph)")
    p.add_argument("--summary", action="store_true", default=None, help="also print the load summary")

    p = sub.add_parser("ingest", parents=[common, graph, assoc], help="build seed sets")
    p.add_argument("--out", help="seed-set JSON path")

    p = sub.add_parser("score", parents=[common, graph, assoc, walk], help="score and rank genes")
    p.add_argument("--method", type=str.upper, choices=METHODS)
    p.add_argument("--disease")
    p.add_argument("--seeds", type=_labels, help="comma-separated seed genes")
    p.add_argument("--out", help="ranked TSV path")

    p = sub.add_parser("crossval", parents=[common, graph, assoc, walk], help="cross-validation benchmark")
    p.add_argument("--methods", type=_methods)
    p.add_argument("--trials", type=int)
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--rng-seed", dest="rng_seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--disease-set-name", dest="disease_set_name")
    p.add_argument("--network-name", dest="network_name")

    p = sub.add_parser("mdt", parents=[common, graph, assoc], help="mean distance travelled curves")
    p.add_argument("--alphas", type=_floats)
    p.add_argument("--degree-ranges", dest="degree_ranges", type=_ranges)
    p.add_argument("--samples", type=int)
    p.add_argument("--times", type=_floats)
    p.add_argument("--n-times", dest="n_times", type=int)
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--rng-seed", dest="rng_seed", type=int)
    p.add_argument("--disease", help="compute the seed-averaged curve for this disease")
    p.add_argument("--tolerance", type=float)

    p = sub.add_parser("enrich", parents=[common], help="hypergeometric enrichment p-value")
    p.add_argument("universe", type=int)
    p.add_argument("module", type=int)
    p.add_argument("selection", type=int)
    p.add_argument("overlap", type=int)
    p.add_argument("--json", action="store_true", help="print the full JSON result")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if getattr(args, "config", None):
        try:
            loaded = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise DataError(f"cannot read config {args.config}: {exc.strerror or exc}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {args.config} is not valid JSON: {exc}") from exc
        unknown = set(loaded) - CONFIG_FIELDS
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        values.update(loaded)
    for name, value in vars(args).items():
        if name in CONFIG_FIELDS and value is not None:
            values[name] = value
    if getattr(args, "graph_path", None):
        values["graph"] = args.graph_path
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


def _write_sidecar(cfg: RunConfig, command: str, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    payload = {"command": command, "version": __version__, "config": dataclasses.asdict(cfg)}
    (out / "run_config.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                                         encoding="utf-8")


def _load_graph(cfg: RunConfig):
    if not cfg.graph:
        raise UsageError("--graph is required")
    return load_graph(cfg.graph, extra_columns=cfg.extra_columns,
                      keep_self_edges=cfg.keep_self_edges)


def _load_diseases(cfg: RunConfig, g, min_coverage=None) -> list[SeedSet]:
    if cfg.seed_sets:
        return read_seed_sets(cfg.seed_sets, g)
    if not cfg.associations:
        raise UsageError("--associations or --seed-sets is required")
    records = filter_associations(read_associations(cfg.associations), cfg.source)
    cover = cfg.min_coverage if min_coverage is None else min_coverage
    return build_seed_sets(records, g, cover)


def cmd_stats(cfg: RunConfig, args) -> int:
    g = _load_graph(cfg)
    print(json.dumps(compute_stats(g).to_dict()))
    if args.summary:
        print(g.summary.to_json())
    if cfg.out_dir:
        _write_sidecar(cfg, "stats", cfg.out_dir)
    return EXIT_OK


def cmd_ingest(cfg: RunConfig, args) -> int:
    g = _load_graph(cfg)
    diseases = _load_diseases(cfg, g)
    out_dir = Path(cfg.out_dir or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    path = Path(cfg.out) if cfg.out else out_dir / "seed_sets.json"
    write_seed_sets(path, diseases, g)
    _write_sidecar(cfg, "ingest", out_dir)
    print(f"{len(diseases)} diseases with >= {cfg.min_coverage} mapped seeds -> {path}")
    return EXIT_OK


def _score_seeds(cfg: RunConfig, g) -> SeedSet:
    if cfg.seeds:
        requested = list(dict.fromkeys(cfg.seeds))
        seeds = SeedSet.from_labels(cfg.disease or "seeds", requested, g)
    else:
        if not cfg.disease:
            raise UsageError("give --seeds, or --disease with --associations/--seed-sets")
        matches = [d for d in _load_diseases(cfg, g, min_coverage=0) if d.disease_id == cfg.disease]
        if not matches:
            raise DataError(f"disease {cfg.disease!r} has no mapped seeds")
        seeds = matches[0]
    total = len(seeds) + len(seeds.unmapped)
    if total == 0 or len(seeds) == 0 or len(seeds.unmapped) / total > MAX_UNMAPPED_FRACTION:
        raise DataError(
            f"{len(seeds.unmapped)} of {total} seed genes are not in the graph; "
            "check that the identifiers match")
    return seeds


def cmd_score(cfg: RunConfig, args) -> int:
    g = _load_graph(cfg)
    seeds = _score_seeds(cfg, g)
    name = cfg.method
    if name == "QA":
        sv = qwalk.score_qa(g, seeds, qwalk.WalkParams(cfg.t, cfg.alpha, cfg.tolerance))
    elif name == "DK":
        sv = baselines.score_dk(g, seeds, cfg.dk_t, cfg.tolerance)
    elif name == "RWR":
        sv = baselines.score_rwr(g, seeds, cfg.restart)
    elif name == "DIA":
        sv = baselines.score_diamond(g, seeds, cfg.n_rank or cfg.n_max, cfg.diamond_weight)
    else:
        sv = baselines.score_nbr(g, seeds)
    out_dir = Path(cfg.out_dir or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    path = Path(cfg.out) if cfg.out else out_dir / f"scores_{name}_{seeds.disease_id}.tsv"
    write_scores(path, sv, g)
    _write_sidecar(cfg, "score", out_dir)
    print(f"{name}: ranked {g.n_nodes - len(seeds)} genes -> {path}")
    return EXIT_OK


def cmd_crossval(cfg: RunConfig, args) -> int:
    if cfg.rng_seed is None:
        raise UsageError("--rng-seed is required for crossval")
    g = _load_graph(cfg)
    diseases = _load_diseases(cfg, g)
    if not diseases:
        raise DataError("no disease passed the coverage filter")
    methods = [cfg.method_config(m) for m in dict.fromkeys(cfg.methods)]
    report = run_benchmark(g, diseases, methods, cfg.trials, cfg.n_max, cfg.rng_seed,
                           workers=cfg.workers, tolerance=cfg.tolerance)
    out_dir = Path(cfg.out_dir or ".")
    disease_set = cfg.disease_set_name or Path(cfg.seed_sets or cfg.associations).stem
    network = cfg.network_name or Path(cfg.graph).stem
    payload = report.write(out_dir, disease_set, network)
    _write_sidecar(cfg, "crossval", out_dir)
    for n, table in payload["mrr"].items():
        mrr = table[disease_set][network]
        print(f"MRR@{n}: " + "  ".join(f"{m}={v:.3f}" for m, v in mrr.items()))
    if report.failures:
        print(f"{len(report.failures)} disease(s) failed; see mrr.json", file=sys.stderr)
    return EXIT_OK


def cmd_mdt(cfg: RunConfig, args) -> int:
    g = _load_graph(cfg)
    times = (np.asarray(cfg.times) if cfg.times is not None
             else wa.default_times(cfg.n_times, cfg.t_max))
    if cfg.disease:
        matches = [d for d in _load_diseases(cfg, g, min_coverage=0) if d.disease_id == cfg.disease]
        if not matches:
            raise DataError(f"disease {cfg.disease!r} has no mapped seeds")
        curves = [wa.disease_mdt(g, matches[0], a, times, cfg.tolerance) for a in cfg.alphas]
    else:
        grid = wa.degree_stratified_mdt(g, [tuple(r) for r in cfg.degree_ranges], cfg.alphas,
                                        times, cfg.samples, cfg.rng_seed or 0, cfg.tolerance)
        curves = list(grid.values())
    out_dir = Path(cfg.out_dir or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    wa.write_curves(out_dir / "mdt.tsv", curves)
    _write_sidecar(cfg, "mdt", out_dir)
    print(f"{len(curves)} curves -> {out_dir / 'mdt.tsv'}")
    return EXIT_OK


def cmd_enrich(cfg: RunConfig, args) -> int:
    p = enrichment_pvalue(args.universe, args.module, args.selection, args.overlap)
    result = {"universe": args.universe, "module": args.module,
              "selection": args.selection, "overlap": args.overlap, "p_value": p}
    print(json.dumps(result) if args.json else f"{p:.6g}")
    if cfg.out_dir:
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "enrichment.json").write_text(json.dumps(result, indent=2) + "\n", encoding="utf-8")
        _write_sidecar(cfg, "enrich", out)
    return EXIT_OK


COMMANDS = {
    "stats": cmd_stats,
    "ingest": cmd_ingest,
    "score": cmd_score,
    "crossval": cmd_crossval,
    "mdt": cmd_mdt,
    "enrich": cmd_enrich,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg, args)
    except UsageError as exc:
        print(f"qwprio {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, FileNotFoundError) as exc:
        print(f"qwprio {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"qwprio {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
