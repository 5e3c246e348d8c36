import csv
import json

import numpy as np
import pytest

from wellport.cli import main
from wellport.domain import load_catalog, save_catalog, validate_catalog
from wellport.experiments import (
    EXIT_EMPTY,
    EXIT_OK,
    EXIT_SPEC,
    ExperimentSpec,
    ExperimentSpecError,
    genome_string,
    parse_genome,
    run_benchmark_det,
    run_optimize,
    run_repeat,
    run_saa_stability,
)
from wellport.synthetic import SyntheticCatalogSpec, SyntheticSpecError, make_synthetic

from conftest import catalog, project

TINY = ["--profile", "ci", "-S", "8", "-K", "2", "--oos-scenarios", "12", "--oos-sub-scenarios", "2",
        "--population", "8", "--generations", "3"]


@pytest.fixture
def toy_file(tmp_path, toy):
    path = tmp_path / "toy.json"
    save_catalog(toy, path)
    return str(path)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_spec_seeds_must_differ():
    with pytest.raises(ExperimentSpecError):
        ExperimentSpec.from_profile("ci", seed=5, oos_seed=5)


def test_unknown_profile():
    with pytest.raises(ExperimentSpecError):
        ExperimentSpec.from_profile("huge")


def test_profiles_route_search_settings():
    spec = ExperimentSpec.from_profile("ci", population=12, search_seed=4, seed=99)
    assert (spec.search.population, spec.search.seed, spec.seed) == (12, 4, 99)
    assert spec.out_of_sample_seed != spec.seed
    full = ExperimentSpec.from_profile("full")
    assert (full.n_scenarios, full.n_sub, full.n_oos, full.search.population, full.search.generations) == (
        200, 20, 1000, 100, 500
    )
    assert ExperimentSpec.from_profile("paper") == full


def test_genome_strings_round_trip():
    g = np.array([1, 0, 0, 1], dtype=bool)
    assert np.array_equal(parse_genome(genome_string(g), 4), g)
    with pytest.raises(ExperimentSpecError):
        parse_genome("10x1", 4)


def test_cli_spec_errors(tmp_path, capsys):
    assert main(["optimize", *TINY, "--seed", "3", "--oos-seed", "3", "--out-dir", str(tmp_path)]) == EXIT_SPEC
    assert main(["optimize", *TINY, "--catalog", str(tmp_path / "missing.json"), "--out-dir", str(tmp_path)]) == EXIT_SPEC
    assert "error" in capsys.readouterr().err


def test_cli_optimize_writes_tables(tmp_path, toy_file):
    assert main(["optimize", *TINY, "--catalog", toy_file, "--out-dir", str(tmp_path)]) == EXIT_OK
    d = tmp_path / "optimize"
    for name in ("archive.jsonl", "in_sample.csv", "out_of_sample.csv", "summary.csv", "history.csv", "report.json"):
        assert (d / name).exists(), name
    report = json.loads((d / "report.json").read_text())
    assert report["archive_checksum_before_oos"] == report["archive_checksum_after_oos"]
    assert report["in_sample_bank"] != report["out_of_sample_bank"]
    summary = read_csv(d / "summary.csv")
    assert [r["statistic"] for r in summary] == ["minimum", "mean", "maximum"] * 2


def test_cli_evaluate_given_genome(tmp_path, toy_file):
    code = main(["evaluate", *TINY, "--catalog", toy_file, "--out-dir", str(tmp_path), "--genome", "101010", "--recourse", "greedy"])
    assert code == EXIT_OK
    rows = read_csv(tmp_path / "evaluate" / "out_of_sample.csv")
    assert [r["genome"] for r in rows] == ["101010"] and rows[0]["recourse_mode"] == "greedy"
    assert main(["evaluate", *TINY, "--catalog", toy_file, "--out-dir", str(tmp_path), "--genome", "11"]) == EXIT_SPEC


def test_empty_archive_exit_code(tmp_path, toy):
    impossible = toy.with_constraints(wells_total=10_000)
    path = tmp_path / "impossible.json"
    save_catalog(impossible, path)
    assert main(["optimize", *TINY, "--catalog", str(path), "--out-dir", str(tmp_path)]) == EXIT_EMPTY
    report = json.loads((tmp_path / "optimize" / "report.json").read_text())
    assert report["empty_archive"] and report["least_violating"]["violation"] > 0


def test_make_synthetic_contract(tmp_path):
    out = tmp_path / "cat.json"
    assert main(["make-synthetic", "--out-dir", str(tmp_path), "--output", str(out)]) == EXIT_OK
    cat = load_catalog(out)
    assert len(cat.first_stage) == 30 and len(cat.second_stage) == 50
    assert validate_catalog(cat) == []
    again = tmp_path / "again.json"
    main(["make-synthetic", "--out-dir", str(tmp_path), "--output", str(again)])
    assert out.read_bytes() == again.read_bytes()
    first = np.mean([p.economics.capex for p in cat.first_stage])
    second = np.mean([p.economics.capex for p in cat.second_stage])
    assert first > second


def test_bundled_catalog_is_the_default_generator_output(bundled):
    assert make_synthetic().digest() == bundled.digest()


def test_first_stage_dominates_second_in_scale(bundled, bundled_bank):
    assert bundled_bank.first_oil.mean() > bundled_bank.second_oil.mean()
    assert bundled_bank.first_npv.std(axis=0).mean() > bundled_bank.second_npv.std(axis=(0, 1)).mean()


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_generated_catalogs_validate(seed):
    cat = make_synthetic(SyntheticCatalogSpec(n_first=8, n_second=12, n_mandatory=1, seed=seed))
    assert validate_catalog(cat) == []
    assert sum(p.mandatory for p in cat.first_stage) == 1


@pytest.mark.parametrize(
    "bad",
    [dict(n_first=0), dict(n_mandatory=5, n_first=3), dict(capex_first=(100.0, 200.0)), dict(trap_pos=(0.5, 1.2))],
)
def test_synthetic_spec_errors(bad):
    with pytest.raises(SyntheticSpecError):
        make_synthetic(SyntheticCatalogSpec(**bad))


def test_single_replicate_has_no_dispersion(tmp_path, toy_file):
    spec = ExperimentSpec.from_profile(
        "ci", catalog=toy_file, out_dir=str(tmp_path), n_scenarios=8, n_sub=2, n_oos=10, n_oos_sub=2,
        population=8, generations=2, saa_sizes=(10,), saa_replicates=1,
    )
    out = run_saa_stability(spec)
    assert out.tables["cv"] == [{"n_scenarios": 10, "cv_enpv": 0.0, "cv_cvar": 0.0}]
    for band in out.tables["bands"]:
        assert band["min"] == band["max"]


def test_single_run_collapses_ranges(tmp_path, toy_file):
    spec = ExperimentSpec.from_profile(
        "ci", catalog=toy_file, out_dir=str(tmp_path), n_scenarios=8, n_sub=2, population=8, generations=2, runs=1
    )
    out = run_repeat(spec)
    for row in out.tables["stats"]:
        assert row["min"] == row["mean"] == row["max"] or np.isnan(row["min"])


def _certain_catalog():
    projects = [project(f"P{i}", p0=1.0, constant=True, capex=c, price=100.0) for i, c in enumerate((40, 55, 70, 30, 90))]
    return catalog(projects, budget_first=150.0, budget_total=150.0, wells_first=3, wells_total=3, reserve_targets={})


def test_benchmark_matches_optimizer_without_uncertainty(tmp_path):
    cat = _certain_catalog()
    spec = ExperimentSpec.from_profile(
        "ci", out_dir=str(tmp_path), n_scenarios=4, n_sub=2, n_oos=6, n_oos_sub=2, population=16, generations=20
    )
    best_archive = max(r.enpv for r in run_optimize(spec, cat).extra["oos_reports"])
    out = run_benchmark_det(spec, cat)
    report = out.extra["report"]
    assert report["deterministic_feasible"]
    assert report["deterministic_value"] == pytest.approx(best_archive, rel=1e-9)
    assert out.extra["benchmark_report"].violation == 0


def test_benchmark_picks_dominant_project(tmp_path):
    projects = [project("A", p0=1.0, constant=True, capex=50.0, price=100.0)] + [
        project(f"B{i}", p0=0.3, capex=50.0, price=2.0) for i in range(3)
    ]
    cat = catalog(projects, budget_first=60.0, budget_total=60.0, wells_first=1, wells_total=1, reserve_targets={})
    spec = ExperimentSpec.from_profile(
        "ci", out_dir=str(tmp_path), n_scenarios=4, n_sub=2, n_oos=6, n_oos_sub=2, population=8, generations=5
    )
    report = run_benchmark_det(spec, cat).extra["report"]
    assert report["first_stage"] == ["A"]
