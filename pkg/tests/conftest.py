from __future__ import annotations

import numpy as np
import pytest

from wellport.domain import (
    ClassificationMap,
    EconomicParams,
    PlanningConstraints,
    Project,
    ProjectCatalog,
    QuantileTriple,
    ReserveTarget,
    TriggerSets,
    VolumetricParams,
)
from wellport.experiments import BUNDLED_CATALOG
from wellport.recourse import RecourseInstance
from wellport.scenarios import build_bank
from wellport.synthetic import SyntheticCatalogSpec, make_synthetic

TOY_SPEC = SyntheticCatalogSpec(
    n_first=6, n_second=8, n_mandatory=0, seed=3, conditional_wells=0, target_fraction=0.3, min_success_rate=0.2
)


def fluid(scale: float = 1.0, constant: bool = False, conversion: float = 1.0) -> VolumetricParams:
    def tri(mid, lo=0.8, hi=1.25):
        return QuantileTriple.constant(mid) if constant else QuantileTriple(mid * lo, mid, mid * hi)

    return VolumetricParams(
        area=tri(10.0 * scale),
        thickness=tri(5.0),
        porosity=QuantileTriple(0.2, 0.2, 0.2) if constant else QuantileTriple(0.15, 0.2, 0.25),
        water_saturation=QuantileTriple(0.3, 0.3, 0.3) if constant else QuantileTriple(0.25, 0.3, 0.35),
        volume_factor=QuantileTriple.constant(1.2),
        conversion=conversion,
    )


def economics(capex=100.0, wells=1, loss=None, price=10.0, fixed=0.0) -> EconomicParams:
    return EconomicParams(
        price_oil=price,
        price_gas=price / 2,
        unit_cost_oil=1.0,
        unit_cost_gas=0.5,
        econ_coeff_oil=0.5,
        econ_coeff_gas=0.5,
        fixed_cost=fixed,
        tax_rate=0.25,
        discount=0.9,
        capex=capex,
        failure_loss=capex if loss is None else loss,
        well_count=wells,
    )


def project(pid, stage="first", category="mature", p0=0.5, constant=False, **econ) -> Project:
    return Project(
        id=pid,
        stage=stage,
        category=category,
        oil=fluid(constant=constant),
        gas=fluid(0.5, constant=constant),
        economics=economics(**econ),
        classification=ClassificationMap({"po": (1.0, 0.0), "pg": (0.0, 1.0)}),
        prior_pos=p0,
    )


def constraints(**overrides) -> PlanningConstraints:
    base = dict(
        budget_first=1000.0,
        budget_total=2000.0,
        wells_first=4,
        wells_total=6,
        budget_trap=1000.0,
        budget_app=1000.0,
        reserve_targets={"po": ReserveTarget(1.0, 0.5)},
        joint_prob=0.5,
        min_success_rate=0.2,
        success_rate_prob=0.5,
        cvar_beta=0.9,
    )
    base.update(overrides)
    return PlanningConstraints(**base)


def catalog(projects, links=(), triggers=None, **constraint_overrides) -> ProjectCatalog:
    return ProjectCatalog(
        projects=tuple(projects),
        links=tuple(links),
        triggers=triggers or {},
        constraints=constraints(**constraint_overrides),
    )


def two_project_catalog() -> ProjectCatalog:
    return catalog(
        [project("A"), project("B", stage="second")],
        triggers={"B": TriggerSets(success=("A",))},
    )


def random_instance(rng, n=None, max_n=12) -> RecourseInstance:
    n = int(rng.integers(0, max_n + 1)) if n is None else n
    costs = np.round(rng.uniform(1, 50, n), 2)
    wells = rng.integers(1, 4, n)
    cats = rng.integers(0, 3, n)
    values = np.round(rng.normal(10, 15, n), 3)
    total = costs.sum()
    return RecourseInstance.build(
        ids=rng.permutation(40)[:n],
        costs=costs,
        wells=wells,
        categories=cats,
        values=values,
        budget=float(rng.uniform(0.2, 1.0) * total) if n else 10.0,
        budget_trap=float(rng.uniform(0.1, 1.0) * total) if n else 10.0,
        budget_app=float(rng.uniform(0.1, 1.0) * total) if n else 10.0,
        wells_needed=int(rng.integers(0, max(1, wells.sum()) + 2)),
    )


@pytest.fixture(scope="session")
def bundled():
    from wellport.experiments import ExperimentSpec, load_spec_catalog

    return load_spec_catalog(ExperimentSpec.from_profile("ci"))


@pytest.fixture(scope="session")
def toy():
    return make_synthetic(TOY_SPEC)


@pytest.fixture(scope="session")
def toy_bank(toy):
    return build_bank(toy, seed=11, S=20, K=5)


@pytest.fixture(scope="session")
def bundled_bank(bundled):
    return build_bank(bundled, seed=5, S=20, K=4)


@pytest.fixture
def bundled_path():
    return BUNDLED_CATALOG


# acceptance outcomes, reported once per criterion at the end of the run
_CRITERIA: dict[int, tuple[str, bool]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    number, label = mark.args
    ok = _CRITERIA.get(number, (label, True))[1] and not rep.failed
    if rep.when == "call" or rep.failed:
        _CRITERIA[number] = (label, ok)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        label, ok = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {label}")
