"""Command-line entry point: one subcommand per experiment."""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .domain import CatalogError, DomainError
from .experiments import (
    EXIT_EMPTY,
    EXIT_OK,
    EXIT_SPEC,
    MODES,
    PROFILES,
    RUNNERS,
    ExperimentOutput,
    ExperimentSpec,
    ExperimentSpecError,
    load_spec_catalog,
    parse_genome,
    run_evaluate,
    run_make_synthetic,
)
from .synthetic import SyntheticCatalogSpec, SyntheticSpecError


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(",") if v.strip())


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--profile", choices=sorted(PROFILES), default="full", help="experiment size preset (paper is an alias of full)")
    p.add_argument("--catalog", help="catalog JSON (default: bundled 30/50 synthetic catalog)")
    p.add_argument("--out-dir", default="results")
    p.add_argument("--seed", type=int, help="in-sample bank seed")
    p.add_argument("--oos-seed", type=int, help="out-of-sample bank seed")
    p.add_argument("--scenarios", "-S", dest="n_scenarios", type=int)
    p.add_argument("--sub-scenarios", "-K", dest="n_sub", type=int)
    p.add_argument("--oos-scenarios", dest="n_oos", type=int)
    p.add_argument("--oos-sub-scenarios", dest="n_oos_sub", type=int)
    p.add_argument("--population", type=int)
    p.add_argument("--generations", type=int)
    p.add_argument("--crossover-prob", dest="crossover_prob", type=float)
    p.add_argument("--mutation-prob", dest="mutation_prob", type=float)
    p.add_argument("--search-seed", type=int, help="NSGA-II seed")
    p.add_argument("--betas", type=_floats, help="comma-separated CVaR levels")
    p.add_argument("--theta-scales", type=_floats, help="comma-separated information-strength scales")
    p.add_argument("--saa-sizes", type=_ints, help="comma-separated scenario counts")
    p.add_argument("--saa-replicates", type=int)
    p.add_argument("--runs", type=int, help="repeated searches")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wellport", description=__doc__)
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        p = sub.add_parser(mode)
        _common(p)
        if mode == "evaluate":
            p.add_argument("--genome", action="append", help="first-stage bit string (repeatable; default: archive)")
            p.add_argument("--recourse", choices=("exact", "greedy", "none"), default="exact")
            p.add_argument("--posterior", choices=("posterior", "fixed"), default="posterior")
        if mode == "make-synthetic":
            p.add_argument("--n-first", type=int, default=30)
            p.add_argument("--n-second", type=int, default=50)
            p.add_argument("--n-mandatory", type=int, default=2)
            p.add_argument("--synthetic-seed", type=int, default=SyntheticCatalogSpec.seed)
            p.add_argument("--output", help="catalog path (default: <out-dir>/make-synthetic/catalog.json)")
    return parser


_SPEC_KEYS = (
    "catalog",
    "seed",
    "oos_seed",
    "n_scenarios",
    "n_sub",
    "n_oos",
    "n_oos_sub",
    "betas",
    "theta_scales",
    "saa_sizes",
    "saa_replicates",
    "runs",
    "out_dir",
)
_SEARCH_KEYS = ("population", "generations", "crossover_prob", "mutation_prob")


def spec_from_args(args: argparse.Namespace) -> ExperimentSpec:
    overrides = {k: getattr(args, k) for k in _SPEC_KEYS if getattr(args, k) is not None}
    overrides.update({k: getattr(args, k) for k in _SEARCH_KEYS if getattr(args, k) is not None})
    if args.search_seed is not None:
        overrides["search_seed"] = args.search_seed
    if args.mode == "make-synthetic":
        overrides["synthetic"] = SyntheticCatalogSpec(
            n_first=args.n_first,
            n_second=args.n_second,
            n_mandatory=args.n_mandatory,
            seed=args.synthetic_seed,
        )
    return ExperimentSpec.from_profile(args.profile, **overrides)


_PRINTED = ("summary", "comparison", "cv", "stats")


def _print_tables(out: ExperimentOutput) -> None:
    print(f"{out.name}: wrote {out.directory}")
    for name, rows in out.tables.items():
        if name not in _PRINTED or not rows:
            continue
        print(f"[{name}]")
        for row in rows:
            print("  " + ", ".join(f"{k}={_short(v)}" for k, v in row.items() if not isinstance(v, (list, dict))))


def _short(v) -> str:
    return f"{v:.6g}" if isinstance(v, float) else str(v)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = spec_from_args(args)
        if args.mode == "make-synthetic":
            out = run_make_synthetic(spec, args.output)
            print(f"make-synthetic: wrote {out.extra['path']}")
            return EXIT_OK
        if args.mode == "evaluate":
            catalog = load_spec_catalog(spec)
            genomes = None
            if args.genome:
                genomes = [parse_genome(g, len(catalog.arrays.first_ids)) for g in args.genome]
            out = run_evaluate(spec, catalog, genomes, recourse=args.recourse, posterior=args.posterior)
        else:
            out = RUNNERS[args.mode](spec)
    except (ExperimentSpecError, CatalogError, DomainError, SyntheticSpecError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    _print_tables(out)
    if out.exit_code == EXIT_EMPTY:
        print("no feasible portfolio found; see report.json for the least-violating one", file=sys.stderr)
    return out.exit_code


if __name__ == "__main__":
    sys.exit(main())
