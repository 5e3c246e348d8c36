"""End-to-end experiments: optimisation, out-of-sample validation and studies.

Every experiment writes into ``<out_dir>/<experiment>/`` and its files are a
pure function of the ExperimentSpec and the catalog: no timestamps, no absolute paths,
sorted JSON keys and shortest round-trip float formatting.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .domain import (
    INDICATORS,
    CatalogError,
    ProjectCatalog,
    catalog_from_dict,
    load_catalog,
    save_catalog,
    validate_catalog,
)
from .evaluator import EvaluationReport, evaluate
from .nsga2 import (
    Individual,
    SearchConfig,
    SearchResult,
    archive_records,
    hypervolume,
    reference_point,
    run,
    search,
)
from .recourse import APPRAISAL, TRAP
from .scenarios import ScenarioBank, build_bank
from .synthetic import SyntheticCatalogSpec, make_synthetic

BUNDLED_CATALOG = "synthetic_30_50.json"
OOS_SEED_OFFSET = 1_000_003

EXIT_OK, EXIT_SPEC, EXIT_EMPTY = 0, 2, 3

MODES = (
    "optimize",
    "evaluate",
    "benchmark-det",
    "ablate-recourse",
    "sensitivity-beta",
    "sensitivity-theta",
    "saa-stability",
    "repeat-runs",
    "make-synthetic",
)

PROFILES: dict[str, dict[str, int]] = {
    "full": dict(n_scenarios=200, n_sub=20, n_oos=1000, n_oos_sub=20, population=100, generations=500),
    "ci": dict(n_scenarios=40, n_sub=5, n_oos=200, n_oos_sub=5, population=20, generations=50),
}
PROFILES["paper"] = PROFILES["full"]  # alias kept for the published CLI

# (row label, recourse mode, posterior mode)
ABLATION_MODES = (
    ("no_recourse", "none", "posterior"),
    ("fixed_exact", "exact", "fixed"),
    ("posterior_exact", "exact", "posterior"),
    ("posterior_greedy", "greedy", "posterior"),
)


SEARCH_OVERRIDES = ("population", "generations", "crossover_prob", "mutation_prob", "track_archive")


class ExperimentSpecError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentSpec:
    catalog: str | None = None  # None -> bundled synthetic catalog
    seed: int = 2024
    n_scenarios: int = 200
    n_sub: int = 20
    oos_seed: int | None = None  # None -> seed + OOS_SEED_OFFSET
    n_oos: int = 1000
    n_oos_sub: int = 20
    search: SearchConfig = SearchConfig()
    betas: tuple[float, ...] = (0.8, 0.9, 0.95)
    theta_scales: tuple[float, ...] = (0.0, 1.0, 2.0)
    saa_sizes: tuple[int, ...] = (50, 100, 200, 500)
    saa_replicates: int = 10
    runs: int = 10
    out_dir: str = "results"
    synthetic: SyntheticCatalogSpec = SyntheticCatalogSpec()

    def __post_init__(self):
        for name in ("n_scenarios", "n_sub", "n_oos", "n_oos_sub", "saa_replicates", "runs"):
            if getattr(self, name) < 1:
                raise ExperimentSpecError(f"{name} must be >= 1")
        if self.out_of_sample_seed == self.seed:
            raise ExperimentSpecError("out-of-sample seed must differ from the in-sample seed")
        if any(not 0 < b < 1 for b in self.betas):
            raise ExperimentSpecError("every beta must lie in (0, 1)")
        if any(s < 0 for s in self.theta_scales):
            raise ExperimentSpecError("theta scales must be >= 0")
        if any(int(s) != s or s < 1 for s in self.saa_sizes):
            raise ExperimentSpecError("SAA sizes must be positive integers")

    @property
    def out_of_sample_seed(self) -> int:
        return self.seed + OOS_SEED_OFFSET if self.oos_seed is None else self.oos_seed

    @classmethod
    def from_profile(cls, profile: str = "full", **overrides: Any) -> "ExperimentSpec":
        """Profile sizes with overrides; search settings and ``search_seed`` go to the search config."""
        if profile not in PROFILES:
            raise ExperimentSpecError(f"unknown profile {profile!r}")
        sizes = dict(PROFILES[profile])
        search_kw = {"population": sizes.pop("population"), "generations": sizes.pop("generations")}
        search_kw.update({k: overrides.pop(k) for k in SEARCH_OVERRIDES if k in overrides})
        if "search_seed" in overrides:
            search_kw["seed"] = overrides.pop("search_seed")
        base = overrides.pop("search", SearchConfig())
        try:
            return cls(search=dataclasses.replace(base, **search_kw), **{**sizes, **overrides})
        except (TypeError, ValueError) as exc:
            raise ExperimentSpecError(str(exc)) from exc

    def to_dict(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        d["oos_seed"] = self.out_of_sample_seed
        d.pop("out_dir")
        return d


@dataclass
class ExperimentOutput:
    name: str
    directory: Path
    tables: dict[str, list[dict[str, Any]]] = field(default_factory=dict)
    exit_code: int = EXIT_OK
    extra: dict[str, Any] = field(default_factory=dict)


# ---------------------------------------------------------------- file output


def _cell(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if v is None:
        return ""
    return str(v)


def write_csv(path: Path, rows: Sequence[dict[str, Any]], header: Sequence[str] | None = None) -> None:
    header = list(header if header is not None else (rows[0].keys() if rows else []))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(row.get(h)) for h in header])
    path.write_text(buf.getvalue())


def _plain(v: Any) -> Any:
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return _plain(v.tolist())
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    return v


def write_json(path: Path, doc: Any) -> None:
    path.write_text(json.dumps(_plain(doc), indent=1, sort_keys=True) + "\n")


def write_jsonl(path: Path, records: Iterable[dict[str, Any]]) -> None:
    path.write_text("".join(json.dumps(_plain(r), sort_keys=True) + "\n" for r in records))


# ---------------------------------------------------------------- inputs


def load_spec_catalog(spec: ExperimentSpec) -> ProjectCatalog:
    if spec.catalog is None:
        text = resources.files("wellport").joinpath("data").joinpath(BUNDLED_CATALOG).read_text()
        catalog = catalog_from_dict(json.loads(text))
    else:
        catalog = load_catalog(spec.catalog)
    problems = validate_catalog(catalog)
    if problems:
        raise CatalogError("invalid catalog: " + "; ".join(map(str, problems[:10])))
    return catalog


def in_sample_bank(spec: ExperimentSpec, catalog: ProjectCatalog) -> ScenarioBank:
    return build_bank(catalog, spec.seed, spec.n_scenarios, spec.n_sub)


def out_of_sample_bank(spec: ExperimentSpec, catalog: ProjectCatalog) -> ScenarioBank:
    return build_bank(catalog, spec.out_of_sample_seed, spec.n_oos, spec.n_oos_sub)


def _dir(spec: ExperimentSpec, name: str) -> Path:
    d = Path(spec.out_dir) / name
    d.mkdir(parents=True, exist_ok=True)
    return d


def genome_string(genome) -> str:
    return "".join("1" if b else "0" for b in np.asarray(genome, dtype=bool))


def parse_genome(bits: str, length: int) -> np.ndarray:
    if len(bits) != length or set(bits) - {"0", "1"}:
        raise ExperimentSpecError(f"genome must be {length} characters of 0/1")
    return np.array([c == "1" for c in bits], dtype=bool)


def archive_checksum(archive: Sequence[Individual]) -> str:
    h = hashlib.sha256()
    for ind in archive:
        h.update(genome_string(ind.genome).encode())
        h.update(repr(tuple(float(o) for o in ind.objectives)).encode())
    return h.hexdigest()[:16]


# ---------------------------------------------------------------- summaries


def report_row(rep: EvaluationReport, **labels: Any) -> dict[str, Any]:
    return {**labels, **rep.to_record()}


SUMMARY_COLUMNS = ["sample", "statistic", "enpv", "cvar", "success_reliability", "reserve_reliability", "violation"]
BENCHMARK_COLUMNS = ["portfolio_type", "enpv", "cvar", "success_reliability", "reserve_reliability", "violation", "feasibility"]


def summary_rows(reports: Sequence[EvaluationReport], sample: str) -> list[dict[str, Any]]:
    """Minimum / mean / maximum of the headline metrics over a set of portfolios."""
    cols = {
        "enpv": [r.enpv for r in reports],
        "cvar": [r.cvar for r in reports],
        "success_reliability": [r.success_reliability for r in reports],
        "reserve_reliability": [r.joint_reliability for r in reports],
        "violation": [r.violation for r in reports],
    }
    rows = []
    for stat, fn in (("minimum", np.min), ("mean", np.mean), ("maximum", np.max)):
        rows.append({"sample": sample, "statistic": stat, **{k: float(fn(v)) for k, v in cols.items()}})
    return rows


def frontier_rows(reports: Sequence[EvaluationReport]) -> list[dict[str, Any]]:
    pts = sorted((r.enpv, r.cvar) for r in reports)
    return [{"x": x, "y": y, "band_low": y, "band_high": y} for x, y in pts]


# ---------------------------------------------------------------- optimize


def run_optimize(spec: ExperimentSpec, catalog: ProjectCatalog | None = None) -> ExperimentOutput:
    """Search on the in-sample bank, then re-evaluate the archive out of sample."""
    catalog = catalog or load_spec_catalog(spec)
    out = ExperimentOutput("optimize", _dir(spec, "optimize"))
    bank = in_sample_bank(spec, catalog)
    result = run(catalog, bank, spec.search)
    before = archive_checksum(result.archive)

    oos = out_of_sample_bank(spec, catalog)
    oos_reports = [evaluate(ind.genome, oos, catalog) for ind in result.archive]
    after = archive_checksum(result.archive)

    a = catalog.arrays
    records = archive_records(result.archive, catalog)
    write_jsonl(out.directory / "archive.jsonl", records)
    ins_rows = [report_row(ind.report, portfolio=k, genome=genome_string(ind.genome)) for k, ind in enumerate(result.archive)]
    oos_rows = [report_row(r, portfolio=k, genome=genome_string(ind.genome)) for k, (ind, r) in enumerate(zip(result.archive, oos_reports))]
    out.tables["in_sample"] = ins_rows
    out.tables["out_of_sample"] = oos_rows
    write_csv(out.directory / "in_sample.csv", ins_rows)
    write_csv(out.directory / "out_of_sample.csv", oos_rows)
    summary = []
    if result.archive:
        summary = summary_rows([i.report for i in result.archive], "in_sample") + summary_rows(oos_reports, "out_of_sample")
    out.tables["summary"] = summary
    write_csv(out.directory / "summary.csv", summary, SUMMARY_COLUMNS)
    write_csv(out.directory / "frontier_in_sample.csv", frontier_rows([i.report for i in result.archive]), ["x", "y", "band_low", "band_high"])
    write_csv(out.directory / "frontier_out_of_sample.csv", frontier_rows(oos_reports), ["x", "y", "band_low", "band_high"])
    write_csv(out.directory / "history.csv", result.history)

    report = {
        "spec": spec.to_dict(),
        "catalog_digest": catalog.digest(),
        "in_sample_bank": bank.fingerprint(),
        "out_of_sample_bank": oos.fingerprint(),
        "archive_size": len(result.archive),
        "evaluations": result.evaluations,
        "archive_checksum_before_oos": before,
        "archive_checksum_after_oos": after,
        "empty_archive": result.empty,
    }
    if result.empty:
        least = result.least_violating
        report["least_violating"] = {
            "genome": genome_string(least.genome),
            "violation": least.violation,
            "violation_terms": least.report.violation_terms,
            "selected": [a.first_ids[i] for i in np.flatnonzero(least.genome)],
        }
        out.exit_code = EXIT_EMPTY
    write_json(out.directory / "report.json", report)
    out.extra.update(result=result, oos_reports=oos_reports, report=report)
    return out


def load_archive(spec: ExperimentSpec, catalog: ProjectCatalog) -> list[np.ndarray]:
    """Archive genomes from a previous optimize run, running it first when absent."""
    path = Path(spec.out_dir) / "optimize" / "archive.jsonl"
    if not path.exists():
        run_optimize(spec, catalog)
    n = len(catalog.arrays.first_ids)
    genomes = []
    for line in path.read_text().splitlines():
        if line.strip():
            genomes.append(parse_genome(json.loads(line)["genome"], n))
    return genomes


# ---------------------------------------------------------------- evaluate


def run_evaluate(
    spec: ExperimentSpec,
    catalog: ProjectCatalog | None = None,
    genomes: Sequence[np.ndarray] | None = None,
    recourse: str = "exact",
    posterior: str = "posterior",
) -> ExperimentOutput:
    """Out-of-sample evaluation of given portfolios (default: the archive)."""
    catalog = catalog or load_spec_catalog(spec)
    out = ExperimentOutput("evaluate", _dir(spec, "evaluate"))
    genomes = list(genomes) if genomes is not None else load_archive(spec, catalog)
    oos = out_of_sample_bank(spec, catalog)
    reports = [evaluate(g, oos, catalog, recourse=recourse, posterior=posterior) for g in genomes]
    rows = [report_row(r, portfolio=k, genome=genome_string(g)) for k, (g, r) in enumerate(zip(genomes, reports))]
    out.tables["out_of_sample"] = rows
    write_csv(out.directory / "out_of_sample.csv", rows)
    summary = summary_rows(reports, "out_of_sample") if reports else []
    out.tables["summary"] = summary
    write_csv(out.directory / "summary.csv", summary, SUMMARY_COLUMNS)
    write_jsonl(
        out.directory / "scenarios.jsonl",
        ({"portfolio": k, "recourse": r.scenario_summaries(catalog.arrays.second_ids)} for k, r in enumerate(reports)),
    )
    out.extra["reports"] = reports
    return out


# ---------------------------------------------------------------- deterministic benchmark


@dataclass(frozen=True)
class DeterministicProblem:
    """Mean-value version of the planning problem over ``I + J`` bits.

    Second-stage projects are fixed in advance and count only when a
    trigger would fire under the most likely first-stage outcome (success
    when the prior is at least one half); other second-stage bits are
    ignored.
    """

    catalog: ProjectCatalog
    value_first: np.ndarray
    value_second: np.ndarray
    reserve_first: np.ndarray  # (I, M_act) expected contributions
    reserve_second: np.ndarray

    @classmethod
    def from_bank(cls, catalog: ProjectCatalog, bank: ScenarioBank) -> "DeterministicProblem":
        a = catalog.arrays
        act = [INDICATORS.index(m) for m in catalog.constraints.active_indicators]
        mean_v1 = bank.first_npv.mean(axis=0)
        mean_v2 = bank.second_npv.mean(axis=(0, 1))
        r1 = bank.first_contrib.mean(axis=0)[:, act]
        r2 = bank.second_contrib.mean(axis=(0, 1))[:, act]
        return cls(
            catalog=catalog,
            value_first=a.p0_first * mean_v1 - (1 - a.p0_first) * a.loss_first,
            value_second=a.p0_second * mean_v2 - (1 - a.p0_second) * a.loss_second,
            reserve_first=a.p0_first[:, None] * r1,
            reserve_second=a.p0_second[:, None] * r2,
        )

    @property
    def n_first(self) -> int:
        return len(self.value_first)

    def eligible(self, x: np.ndarray) -> np.ndarray:
        a = self.catalog.arrays
        likely = a.p0_first >= 0.5
        fired = (
            a.trig_success.astype(np.int64) @ (x & likely)
            + a.trig_failure.astype(np.int64) @ (x & ~likely)
            + a.trig_uncond.astype(np.int64) @ x
        )
        return fired >= 1

    def effective(self, bits: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """First-stage bits and the second-stage bits that are actually eligible."""
        x = np.asarray(bits[: self.n_first], dtype=bool)
        y = np.asarray(bits[self.n_first :], dtype=bool)
        return x, y & self.eligible(x)

    def terms(self, bits: np.ndarray) -> dict[str, float]:
        a = self.catalog.arrays
        c = self.catalog.constraints
        x, y = self.effective(bits)
        cost = a.cost_first @ x + a.cost_second @ y
        trap = a.cost_first[x & (a.cat_first == TRAP)].sum() + a.cost_second[y & (a.cat_second == TRAP)].sum()
        app = a.cost_first[x & (a.cat_first == APPRAISAL)].sum() + a.cost_second[y & (a.cat_second == APPRAISAL)].sum()
        wells = int(a.wells_first @ x + a.wells_second @ y)
        N = c.wells_total
        terms = {
            "budget_first": (a.cost_first @ x - c.budget_first) / c.budget_first,
            "wells_first": (a.wells_first @ x - c.wells_first) / N,
            "budget_annual": (cost - c.budget_total) / c.budget_total,
            "wells_annual": abs(wells - N) / N,
            "budget_trap": (trap - c.budget_trap) / c.budget_trap,
            "budget_app": (app - c.budget_app) / c.budget_app,
        }
        expected = self.reserve_first.T @ x + self.reserve_second.T @ y
        for k, m in enumerate(c.active_indicators):
            h = c.reserve_targets[m].target
            terms[f"reserve_{m}"] = (h - expected[k]) / h
        return {k: max(float(v), 0.0) for k, v in terms.items()}

    def value(self, bits: np.ndarray) -> float:
        x, y = self.effective(bits)
        return float(self.value_first @ x + self.value_second @ y)

    def __call__(self, bits: np.ndarray):
        terms = self.terms(bits)
        return (-self.value(bits), 0.0), float(sum(terms.values())), terms


def run_benchmark_det(spec: ExperimentSpec, catalog: ProjectCatalog | None = None) -> ExperimentOutput:
    """Mean-value benchmark with a fixed second stage, judged on the out-of-sample bank."""
    catalog = catalog or load_spec_catalog(spec)
    out = ExperimentOutput("benchmark-det", _dir(spec, "benchmark-det"))
    a = catalog.arrays
    problem = DeterministicProblem.from_bank(catalog, in_sample_bank(spec, catalog))
    mandatory = np.concatenate([a.mandatory, np.zeros(len(a.second_ids), dtype=bool)])
    result = search(len(mandatory), mandatory, problem, spec.search)

    genomes = load_archive(spec, catalog)
    oos = out_of_sample_bank(spec, catalog)
    archive_reports = [evaluate(g, oos, catalog) for g in genomes]
    rows = []
    if archive_reports:
        label = "feasible" if all(r.feasible for r in archive_reports) else "infeasible"
        for row in summary_rows(archive_reports, "stochastic_pareto"):
            rows.append({**row, "portfolio_type": f"stochastic_pareto_{row['statistic']}", "feasibility": label})

    report: dict[str, Any] = {"deterministic_feasible": not result.empty, "evaluations": result.evaluations}
    if result.empty:
        best = result.least_violating
        report.update(deterministic_violation=best.violation, deterministic_terms=best.report)
    else:
        best = result.archive[0]
        x, y = problem.effective(best.genome)
        rep = evaluate(x, oos, catalog, fixed_recourse=y)
        rows.append(
            {
                "portfolio_type": "deterministic_benchmark",
                **summary_rows([rep], "benchmark")[0],
                "feasibility": "feasible" if rep.feasible else "infeasible",
            }
        )
        report.update(
            deterministic_value=-best.objectives[0],
            first_stage=[a.first_ids[i] for i in np.flatnonzero(x)],
            second_stage=[a.second_ids[j] for j in np.flatnonzero(y)],
            genome=genome_string(best.genome),
            stochastic=rep.to_record(),
        )
        out.extra["benchmark_report"] = rep
    out.tables["comparison"] = rows
    write_csv(out.directory / "comparison.csv", rows, BENCHMARK_COLUMNS)
    write_json(out.directory / "report.json", report)
    out.extra.update(archive_reports=archive_reports, report=report)
    return out


# ---------------------------------------------------------------- ablation


def _mean_row(reports: Sequence[EvaluationReport], **labels: Any) -> dict[str, Any]:
    pos = [r.selected_pos for r in reports if not math.isnan(r.selected_pos)]
    return {
        **labels,
        "enpv": float(np.mean([r.enpv for r in reports])),
        "cvar": float(np.mean([r.cvar for r in reports])),
        "success_reliability": float(np.mean([r.success_reliability for r in reports])),
        "reserve_reliability": float(np.mean([r.joint_reliability for r in reports])),
        "selected_pos": float(np.mean(pos)) if pos else math.nan,
        "second_stage_wells": float(np.mean([r.second_stage_wells for r in reports])),
        "violation": float(np.mean([r.violation for r in reports])),
        "feasible_share": float(np.mean([r.feasible for r in reports])),
    }


MEAN_COLUMNS = ["enpv", "cvar", "success_reliability", "reserve_reliability", "selected_pos", "second_stage_wells", "violation", "feasible_share"]


def run_ablate_recourse(spec: ExperimentSpec, catalog: ProjectCatalog | None = None) -> ExperimentOutput:
    catalog = catalog or load_spec_catalog(spec)
    out = ExperimentOutput("ablate-recourse", _dir(spec, "ablate-recourse"))
    genomes = load_archive(spec, catalog)
    oos = out_of_sample_bank(spec, catalog)
    summary, detail = [], []
    by_mode = {}
    for label, rec, post in ABLATION_MODES:
        reports = [evaluate(g, oos, catalog, recourse=rec, posterior=post) for g in genomes]
        by_mode[label] = reports
        detail += [report_row(r, mode=label, portfolio=k) for k, r in enumerate(reports)]
        if reports:
            summary.append(_mean_row(reports, mode=label))
    out.tables.update(summary=summary, portfolios=detail)
    write_csv(out.directory / "summary.csv", summary, ["mode", *MEAN_COLUMNS])
    write_csv(out.directory / "portfolios.csv", detail)
    out.extra["reports"] = by_mode
    return out


# ---------------------------------------------------------------- sensitivity


def run_sensitivity_beta(spec: ExperimentSpec, catalog: ProjectCatalog | None = None) -> ExperimentOutput:
    """Re-price the stored out-of-sample losses at each confidence level."""
    catalog = catalog or load_spec_catalog(spec)
    out = ExperimentOutput("sensitivity-beta", _dir(spec, "sensitivity-beta"))
    genomes = load_archive(spec, catalog)
    oos = out_of_sample_bank(spec, catalog)
    base = [evaluate(g, oos, catalog) for g in genomes]
    summary, detail = [], []
    for beta in spec.betas:
        reports = [r.with_beta(beta) for r in base]
        detail += [report_row(r, beta=beta, portfolio=k) for k, r in enumerate(reports)]
        if reports:
            summary.append(_mean_row(reports, beta=beta))
    out.tables.update(summary=summary, portfolios=detail)
    write_csv(out.directory / "summary.csv", summary, ["beta", *MEAN_COLUMNS])
    write_csv(out.directory / "portfolios.csv", detail)
    return out


def run_sensitivity_theta(spec: ExperimentSpec, catalog: ProjectCatalog | None = None) -> ExperimentOutput:
    """Scale every information strength and re-solve the recourse out of sample."""
    catalog = catalog or load_spec_catalog(spec)
    out = ExperimentOutput("sensitivity-theta", _dir(spec, "sensitivity-theta"))
    genomes = load_archive(spec, catalog)
    oos = out_of_sample_bank(spec, catalog)
    summary, detail = [], []
    for scale in spec.theta_scales:
        reports = [evaluate(g, oos, catalog, theta_scale=scale) for g in genomes]
        detail += [report_row(r, theta_scale=scale, portfolio=k) for k, r in enumerate(reports)]
        if reports:
            summary.append(_mean_row(reports, theta_scale=scale))
    out.tables.update(summary=summary, portfolios=detail)
    write_csv(out.directory / "summary.csv", summary, ["theta_scale", *MEAN_COLUMNS])
    write_csv(out.directory / "portfolios.csv", detail)
    return out


# ---------------------------------------------------------------- SAA stability


def saa_bank_seed(base: int, size: int, replicate: int) -> int:
    return int(np.random.SeedSequence([base, size, replicate]).generate_state(1)[0])


def _cv(values: Sequence[float]) -> float:
    v = np.asarray(values, dtype=float)
    if len(v) < 2:
        return 0.0
    mean = v.mean()
    return float(v.std(ddof=1) / abs(mean)) if mean != 0 else math.inf


def _band(values: Sequence[float]) -> dict[str, float]:
    v = np.asarray(values, dtype=float)
    return {
        "min": float(v.min()),
        "q25": float(np.quantile(v, 0.25)),
        "median": float(np.median(v)),
        "mean": float(v.mean()),
        "q75": float(np.quantile(v, 0.75)),
        "max": float(v.max()),
    }


def run_saa_stability(spec: ExperimentSpec, catalog: ProjectCatalog | None = None) -> ExperimentOutput:
    """Archive-mean metrics over independent banks at each scenario count."""
    catalog = catalog or load_spec_catalog(spec)
    out = ExperimentOutput("saa-stability", _dir(spec, "saa-stability"))
    genomes = load_archive(spec, catalog)
    metrics = ("enpv", "cvar", "success_reliability", "reserve_reliability")
    bands, cv_rows, banks = [], [], []
    for size in spec.saa_sizes:
        per_bank = {m: [] for m in metrics}
        for r in range(spec.saa_replicates):
            seed = saa_bank_seed(spec.seed, int(size), r)
            bank = build_bank(catalog, seed, int(size), spec.n_sub)
            reports = [evaluate(g, bank, catalog) for g in genomes]
            row = {
                "enpv": float(np.mean([x.enpv for x in reports])),
                "cvar": float(np.mean([x.cvar for x in reports])),
                "success_reliability": float(np.mean([x.success_reliability for x in reports])),
                "reserve_reliability": float(np.mean([x.joint_reliability for x in reports])),
            }
            banks.append({"n_scenarios": int(size), "replicate": r, "bank_seed": seed, **row})
            for m in metrics:
                per_bank[m].append(row[m])
        for m in metrics:
            bands.append({"n_scenarios": int(size), "metric": m, **_band(per_bank[m])})
        cv_rows.append({"n_scenarios": int(size), "cv_enpv": _cv(per_bank["enpv"]), "cv_cvar": _cv(per_bank["cvar"])})
    out.tables.update(bands=bands, cv=cv_rows, banks=banks)
    write_csv(out.directory / "bands.csv", bands, ["n_scenarios", "metric", "min", "q25", "median", "mean", "q75", "max"])
    write_csv(out.directory / "cv.csv", cv_rows, ["n_scenarios", "cv_enpv", "cv_cvar"])
    write_csv(out.directory / "banks.csv", banks)
    return out


# ---------------------------------------------------------------- repeated search


def run_seed(base: int, run_index: int) -> int:
    return int(np.random.SeedSequence([base, run_index]).generate_state(1)[0])


def _interpolated(front: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """CVaR of a front at each ENPV grid point; ``nan`` outside the front's ENPV span."""
    if not len(front):
        return np.full(len(grid), math.nan)
    order = np.argsort(front[:, 0], kind="stable")
    x, y = front[order, 0], front[order, 1]
    vals = np.interp(grid, x, y)
    return np.where((grid >= x[0]) & (grid <= x[-1]), vals, math.nan)


def run_repeat(spec: ExperimentSpec, catalog: ProjectCatalog | None = None, grid_points: int = 50) -> ExperimentOutput:
    """Independent searches on one bank with distinct seeds."""
    catalog = catalog or load_spec_catalog(spec)
    out = ExperimentOutput("repeat-runs", _dir(spec, "repeat-runs"))
    bank = in_sample_bank(spec, catalog)
    results: list[SearchResult] = []
    for r in range(spec.runs):
        cfg = dataclasses.replace(spec.search, seed=run_seed(spec.search.seed, r))
        results.append(run(catalog, bank, cfg))
    fronts = [np.array([ind.objectives for ind in res.archive], dtype=float).reshape(-1, 2) for res in results]
    nonempty = [f for f in fronts if len(f)]
    ref = reference_point(nonempty) if nonempty else (math.nan, math.nan)
    runs = []
    for r, (res, front) in enumerate(zip(results, fronts)):
        runs.append(
            {
                "run": r,
                "seed": run_seed(spec.search.seed, r),
                "feasible": not res.empty,
                "front_size": len(front),
                "best_enpv": float(-front[:, 0].min()) if len(front) else math.nan,
                "min_cvar": float(front[:, 1].min()) if len(front) else math.nan,
                "hypervolume": hypervolume(front, ref) if len(front) else 0.0,
            }
        )
    stats = []
    for name, key in (
        ("feasible_rate", "feasible"),
        ("front_size", "front_size"),
        ("best_enpv", "best_enpv"),
        ("min_cvar", "min_cvar"),
        ("hypervolume", "hypervolume"),
    ):
        vals = np.array([float(row[key]) for row in runs])
        vals = vals[~np.isnan(vals)]
        if name == "feasible_rate":
            stats.append({"indicator": name, "min": float(vals.mean()), "mean": float(vals.mean()), "max": float(vals.mean())})
        elif len(vals):
            stats.append({"indicator": name, "min": float(vals.min()), "mean": float(vals.mean()), "max": float(vals.max())})
        else:
            stats.append({"indicator": name, "min": math.nan, "mean": math.nan, "max": math.nan})

    band_rows = []
    if nonempty:
        enpv = np.concatenate([-f[:, 0] for f in nonempty])
        grid = np.linspace(enpv.min(), enpv.max(), grid_points)
        curves = np.array([_interpolated(np.column_stack([-f[:, 0], f[:, 1]]), grid) for f in nonempty])
        for g, col in zip(grid, curves.T):
            col = col[~np.isnan(col)]
            if not len(col):
                continue
            band_rows.append(
                {
                    "x": float(g),
                    "y": float(col.mean()),
                    "band_low": float(col.min()),
                    "band_high": float(col.max()),
                    "iqr_low": float(np.quantile(col, 0.25)),
                    "iqr_high": float(np.quantile(col, 0.75)),
                    "runs": len(col),
                }
            )
    out.tables.update(runs=runs, stats=stats, bands=band_rows)
    write_csv(out.directory / "runs.csv", runs, ["run", "seed", "feasible", "front_size", "best_enpv", "min_cvar", "hypervolume"])
    write_csv(out.directory / "stats.csv", stats, ["indicator", "min", "mean", "max"])
    write_csv(out.directory / "front_bands.csv", band_rows, ["x", "y", "band_low", "band_high", "iqr_low", "iqr_high", "runs"])
    write_jsonl(
        out.directory / "fronts.jsonl",
        ({"run": r, "points": [[-float(p[0]), float(p[1])] for p in f]} for r, f in enumerate(fronts)),
    )
    write_json(out.directory / "report.json", {"reference_point": list(ref), "spec": spec.to_dict()})
    out.extra["results"] = results
    return out


# ---------------------------------------------------------------- synthetic catalogs


def run_make_synthetic(spec: ExperimentSpec, path: str | Path | None = None) -> ExperimentOutput:
    out = ExperimentOutput("make-synthetic", _dir(spec, "make-synthetic"))
    catalog = make_synthetic(spec.synthetic)
    target = Path(path) if path is not None else out.directory / "catalog.json"
    save_catalog(catalog, target)
    out.extra.update(catalog=catalog, path=target)
    return out


RUNNERS = {
    "optimize": run_optimize,
    "evaluate": run_evaluate,
    "benchmark-det": run_benchmark_det,
    "ablate-recourse": run_ablate_recourse,
    "sensitivity-beta": run_sensitivity_beta,
    "sensitivity-theta": run_sensitivity_theta,
    "saa-stability": run_saa_stability,
    "repeat-runs": run_repeat,
}
