"""Problem instances: projects, information links, triggers and planning limits.

A :class:`ProjectCatalog` is the single source of truth for one annual
planning problem. It is immutable once built; vectorised views used by the
scenario engine and the evaluator live on :attr:`ProjectCatalog.arrays`.

Money is in 10^4 CNY throughout. Reserve volumes are in whatever unit the
catalog's conversion coefficients produce.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Any, Iterable, Mapping

import numpy as np


class CatalogError(ValueError):
    """Raised when a catalog document cannot be parsed."""


class DomainError(ValueError):
    """Raised when a numeric argument lies outside its admissible domain."""


class ReserveIndicator(str, Enum):
    PO = "po"  # predicted oil
    PG = "pg"  # predicted gas
    CO = "co"  # controlled oil
    CG = "cg"  # controlled gas
    RO = "ro"  # proved oil
    RG = "rg"  # proved gas


INDICATORS: tuple[str, ...] = tuple(m.value for m in ReserveIndicator)
STAGES = ("first", "second")
CATEGORIES = ("trap", "appraisal", "mature")
DEFAULT_POSTERIOR_BOUNDS = (0.01, 0.99)
P0_TOLERANCE = 1e-9


@dataclass(frozen=True)
class QuantileTriple:
    q10: float
    q50: float
    q90: float

    def problems(self, bounded: bool = False) -> list[str]:
        out = []
        if not all(math.isfinite(v) for v in (self.q10, self.q50, self.q90)):
            out.append("quantiles must be finite")
        elif not 0 < self.q10 <= self.q50 <= self.q90:
            out.append("requires 0 < q10 <= q50 <= q90")
        if bounded and self.q90 > 1:
            out.append("bounded parameter requires q90 <= 1")
        return out

    @classmethod
    def constant(cls, value: float) -> "QuantileTriple":
        return cls(value, value, value)


@dataclass(frozen=True)
class VolumetricParams:
    """Three-point volumetric inputs for one fluid (oil or gas)."""

    area: QuantileTriple
    thickness: QuantileTriple
    porosity: QuantileTriple
    water_saturation: QuantileTriple
    volume_factor: QuantileTriple
    conversion: float

    BOUNDED = ("porosity", "water_saturation")
    FIELDS = ("area", "thickness", "porosity", "water_saturation", "volume_factor")


@dataclass(frozen=True)
class EconomicParams:
    price_oil: float
    price_gas: float
    unit_cost_oil: float
    unit_cost_gas: float
    econ_coeff_oil: float
    econ_coeff_gas: float
    fixed_cost: float
    tax_rate: float
    discount: float
    capex: float
    failure_loss: float
    well_count: int


@dataclass(frozen=True)
class RiskFactors:
    """Geological chance factors whose product is the prior probability of success."""

    source: float
    reservoir: float
    trap: float
    preservation: float
    migration: float

    def as_tuple(self) -> tuple[float, ...]:
        return (self.source, self.reservoir, self.trap, self.preservation, self.migration)


@dataclass(frozen=True)
class ClassificationMap:
    """Per-indicator coefficients ``m -> (lambda_oil, lambda_gas)``; absent indicators map to zero."""

    coefficients: Mapping[str, tuple[float, float]] = field(default_factory=dict)

    def oil(self, m: str) -> float:
        return float(self.coefficients.get(m, (0.0, 0.0))[0])

    def gas(self, m: str) -> float:
        return float(self.coefficients.get(m, (0.0, 0.0))[1])


@dataclass(frozen=True)
class Project:
    id: str
    stage: str
    category: str
    oil: VolumetricParams
    gas: VolumetricParams
    economics: EconomicParams
    classification: ClassificationMap
    prior_pos: float | None = None
    risk_factors: RiskFactors | None = None
    mandatory: bool = False

    @property
    def p0(self) -> float:
        """Prior probability of success, taken from the factors when no direct value is given."""
        if self.prior_pos is not None:
            return float(self.prior_pos)
        if self.risk_factors is None:
            raise DomainError(f"project {self.id} has neither prior_pos nor risk_factors")
        return prior_pos(self.risk_factors.as_tuple())


@dataclass(frozen=True)
class InfoLink:
    source: str
    target: str
    strength: float


@dataclass(frozen=True)
class TriggerSets:
    success: tuple[str, ...] = ()
    failure: tuple[str, ...] = ()
    unconditional: tuple[str, ...] = ()


@dataclass(frozen=True)
class ReserveTarget:
    target: float
    prob: float


@dataclass(frozen=True)
class PlanningConstraints:
    budget_first: float
    budget_total: float
    wells_first: int
    wells_total: int
    budget_trap: float
    budget_app: float
    reserve_targets: Mapping[str, ReserveTarget]
    joint_prob: float
    min_success_rate: float
    success_rate_prob: float
    cvar_beta: float
    posterior_bounds: tuple[float, float] = DEFAULT_POSTERIOR_BOUNDS
    shortfall_weight: float = 0.0

    @property
    def active_indicators(self) -> tuple[str, ...]:
        return tuple(m for m in INDICATORS if m in self.reserve_targets)


@dataclass(frozen=True)
class Violation:
    project: str | None
    field: str
    message: str

    def __str__(self) -> str:
        where = self.project if self.project is not None else "<catalog>"
        return f"{where}.{self.field}: {self.message}"


def prior_pos(factors: Iterable[float]) -> float:
    """Multiplicative prospect risking: product of the five chance factors."""
    factors = tuple(float(f) for f in factors)
    if len(factors) != 5:
        raise DomainError(f"expected 5 risking factors, got {len(factors)}")
    for f in factors:
        if not 0.0 < f <= 1.0:
            raise DomainError(f"risking factor {f} outside (0, 1]")
    return math.prod(factors)


@dataclass(frozen=True)
class CatalogArrays:
    """Dense numeric views of a catalog, first stage indexed by ``I`` and second by ``J``."""

    first_ids: tuple[str, ...]
    second_ids: tuple[str, ...]
    p0_first: np.ndarray
    p0_second: np.ndarray
    cost_first: np.ndarray
    cost_second: np.ndarray
    wells_first: np.ndarray
    wells_second: np.ndarray
    loss_first: np.ndarray
    loss_second: np.ndarray
    cat_first: np.ndarray  # 0 trap, 1 appraisal, 2 mature
    cat_second: np.ndarray
    mandatory: np.ndarray
    theta: np.ndarray  # (J, I)
    trig_success: np.ndarray  # (J, I) bool
    trig_failure: np.ndarray
    trig_uncond: np.ndarray


@dataclass(frozen=True)
class ProjectCatalog:
    projects: tuple[Project, ...]
    links: tuple[InfoLink, ...]
    triggers: Mapping[str, TriggerSets]
    constraints: PlanningConstraints

    @cached_property
    def first_stage(self) -> tuple[Project, ...]:
        return tuple(p for p in self.projects if p.stage == "first")

    @cached_property
    def second_stage(self) -> tuple[Project, ...]:
        return tuple(p for p in self.projects if p.stage == "second")

    @cached_property
    def by_id(self) -> dict[str, Project]:
        return {p.id: p for p in self.projects}

    @cached_property
    def arrays(self) -> CatalogArrays:
        first, second = self.first_stage, self.second_stage
        fidx = {p.id: i for i, p in enumerate(first)}
        sidx = {p.id: j for j, p in enumerate(second)}
        cat = {c: k for k, c in enumerate(CATEGORIES)}
        nI, nJ = len(first), len(second)
        theta = np.zeros((nJ, nI))
        for link in self.links:
            theta[sidx[link.target], fidx[link.source]] += link.strength
        trig = np.zeros((3, nJ, nI), dtype=bool)
        for jid, ts in self.triggers.items():
            j = sidx[jid]
            for k, ids in enumerate((ts.success, ts.failure, ts.unconditional)):
                for iid in ids:
                    trig[k, j, fidx[iid]] = True

        def arr(ps, get, dtype=float):
            return np.array([get(p) for p in ps], dtype=dtype)

        return CatalogArrays(
            first_ids=tuple(fidx),
            second_ids=tuple(sidx),
            p0_first=arr(first, lambda p: p.p0),
            p0_second=arr(second, lambda p: p.p0),
            cost_first=arr(first, lambda p: p.economics.capex),
            cost_second=arr(second, lambda p: p.economics.capex),
            wells_first=arr(first, lambda p: p.economics.well_count, np.int64),
            wells_second=arr(second, lambda p: p.economics.well_count, np.int64),
            loss_first=arr(first, lambda p: p.economics.failure_loss),
            loss_second=arr(second, lambda p: p.economics.failure_loss),
            cat_first=arr(first, lambda p: cat[p.category], np.int64),
            cat_second=arr(second, lambda p: cat[p.category], np.int64),
            mandatory=arr(first, lambda p: p.mandatory, bool),
            theta=theta,
            trig_success=trig[0],
            trig_failure=trig[1],
            trig_uncond=trig[2],
        )

    def with_theta_scale(self, scale: float) -> "ProjectCatalog":
        links = tuple(dataclasses.replace(l, strength=l.strength * scale) for l in self.links)
        return dataclasses.replace(self, links=links)

    def with_constraints(self, **changes: Any) -> "ProjectCatalog":
        return dataclasses.replace(self, constraints=dataclasses.replace(self.constraints, **changes))

    def digest(self) -> str:
        """Stable content hash used to key exported scenario banks."""
        blob = json.dumps(catalog_to_dict(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def validate_catalog(catalog: ProjectCatalog) -> list[Violation]:
    """Return every invariant breach in ``catalog``; an empty list means valid."""
    out: list[Violation] = []
    seen: set[str] = set()
    for p in catalog.projects:
        if p.id in seen:
            out.append(Violation(p.id, "id", "duplicate project id"))
        seen.add(p.id)
        if p.stage not in STAGES:
            out.append(Violation(p.id, "stage", f"unknown stage {p.stage!r}"))
        if p.category not in CATEGORIES:
            out.append(Violation(p.id, "category", f"unknown category {p.category!r}"))
        if p.mandatory and p.stage != "first":
            out.append(Violation(p.id, "mandatory", "only first-stage projects can be mandatory"))
        out.extend(_check_probability(p))
        for fluid in ("oil", "gas"):
            vp: VolumetricParams = getattr(p, fluid)
            for name in VolumetricParams.FIELDS:
                for msg in getattr(vp, name).problems(bounded=name in VolumetricParams.BOUNDED):
                    out.append(Violation(p.id, f"{fluid}.{name}", msg))
            if not vp.conversion > 0:
                out.append(Violation(p.id, f"{fluid}.conversion", "conversion must be > 0"))
        out.extend(_check_economics(p))
        for m, lam in p.classification.coefficients.items():
            if m not in INDICATORS:
                out.append(Violation(p.id, f"classification.{m}", "unknown reserve indicator"))
            elif min(lam) < 0:
                out.append(Violation(p.id, f"classification.{m}", "coefficients must be >= 0"))

    first = {p.id for p in catalog.projects if p.stage == "first"}
    second = {p.id for p in catalog.projects if p.stage == "second"}
    for link in catalog.links:
        if link.source not in first:
            out.append(Violation(None, "links.from", f"{link.source!r} is not a first-stage project"))
        if link.target not in second:
            out.append(Violation(None, "links.to", f"{link.target!r} is not a second-stage project"))
        if not math.isfinite(link.strength):
            out.append(Violation(None, "links.strength", "strength must be finite"))
    for jid, ts in catalog.triggers.items():
        if jid not in second:
            out.append(Violation(jid, "triggers", "trigger key is not a second-stage project"))
        for kind in ("success", "failure", "unconditional"):
            for iid in getattr(ts, kind):
                if iid not in first:
                    out.append(Violation(jid, f"triggers.{kind}", f"{iid!r} is not a first-stage project"))
    out.extend(_check_constraints(catalog.constraints))
    return out


def _check_probability(p: Project) -> list[Violation]:
    out = []
    if p.prior_pos is None and p.risk_factors is None:
        return [Violation(p.id, "prior_pos", "needs prior_pos or risk_factors")]
    if p.prior_pos is not None and not 0.0 < p.prior_pos <= 1.0:
        out.append(Violation(p.id, "prior_pos", "must lie in (0, 1]"))
    if p.risk_factors is not None:
        factors = p.risk_factors.as_tuple()
        if not all(0.0 < f <= 1.0 for f in factors):
            out.append(Violation(p.id, "risk_factors", "each factor must lie in (0, 1]"))
        elif p.prior_pos is not None and abs(math.prod(factors) - p.prior_pos) > P0_TOLERANCE:
            out.append(
                Violation(p.id, "prior_pos", "disagrees with the product of the risking factors")
            )
    return out


def _check_economics(p: Project) -> list[Violation]:
    e = p.economics
    checks = [
        ("price_oil", e.price_oil >= e.unit_cost_oil >= 0, "requires price_oil >= unit_cost_oil >= 0"),
        ("price_gas", e.price_gas >= e.unit_cost_gas >= 0, "requires price_gas >= unit_cost_gas >= 0"),
        ("tax_rate", 0 <= e.tax_rate < 1, "requires 0 <= tax_rate < 1"),
        ("discount", 0 < e.discount <= 1, "requires 0 < discount <= 1"),
        ("capex", e.capex >= 0, "requires capex >= 0"),
        ("failure_loss", e.failure_loss >= 0, "requires failure_loss >= 0"),
        ("econ_coeff_oil", 0 <= e.econ_coeff_oil <= 1, "requires 0 <= econ_coeff_oil <= 1"),
        ("econ_coeff_gas", 0 <= e.econ_coeff_gas <= 1, "requires 0 <= econ_coeff_gas <= 1"),
        ("fixed_cost", e.fixed_cost >= 0, "requires fixed_cost >= 0"),
        ("well_count", int(e.well_count) == e.well_count and e.well_count >= 1, "requires integer well_count >= 1"),
    ]
    return [Violation(p.id, f"economics.{name}", msg) for name, ok, msg in checks if not ok]


def _check_constraints(c: PlanningConstraints) -> list[Violation]:
    def prob(v):
        return 0 < v < 1

    lo, hi = c.posterior_bounds
    checks = [
        ("budget_first", 0 < c.budget_first <= c.budget_total, "requires 0 < B1 <= B"),
        ("wells_first", 0 < c.wells_first <= c.wells_total, "requires 0 < N1 <= N"),
        ("budget_trap", c.budget_trap >= 0, "requires B_trap >= 0"),
        ("budget_app", c.budget_app >= 0, "requires B_app >= 0"),
        ("joint_prob", prob(c.joint_prob), "must lie in (0, 1)"),
        ("min_success_rate", 0 <= c.min_success_rate <= 1, "must lie in [0, 1]"),
        ("success_rate_prob", prob(c.success_rate_prob), "must lie in (0, 1)"),
        ("cvar_beta", prob(c.cvar_beta), "must lie in (0, 1)"),
        ("posterior_bounds", 0 < lo < hi < 1, "requires 0 < lower < upper < 1"),
        ("shortfall_weight", c.shortfall_weight >= 0, "requires gamma >= 0"),
    ]
    out = [Violation(None, f"constraints.{n}", msg) for n, ok, msg in checks if not ok]
    for m, t in c.reserve_targets.items():
        if m not in INDICATORS:
            out.append(Violation(None, f"constraints.reserve_targets.{m}", "unknown reserve indicator"))
        if not t.target > 0:
            out.append(Violation(None, f"constraints.reserve_targets.{m}", "target must be > 0"))
        if not prob(t.prob):
            out.append(Violation(None, f"constraints.reserve_targets.{m}", "prob must lie in (0, 1)"))
    return out


# --- JSON documents ---------------------------------------------------------


def _triple(d: Any) -> QuantileTriple:
    if isinstance(d, (int, float)):
        return QuantileTriple.constant(float(d))
    if isinstance(d, Mapping):
        return QuantileTriple(float(d["q10"]), float(d["q50"]), float(d["q90"]))
    q10, q50, q90 = d
    return QuantileTriple(float(q10), float(q50), float(q90))


def _volumetric(d: Mapping[str, Any]) -> VolumetricParams:
    return VolumetricParams(
        **{name: _triple(d[name]) for name in VolumetricParams.FIELDS},
        conversion=float(d["conversion"]),
    )


def _project(d: Mapping[str, Any]) -> Project:
    rf = d.get("risk_factors")
    if rf is not None:
        rf = RiskFactors(**{k: float(rf[k]) for k in ("source", "reservoir", "trap", "preservation", "migration")})
    econ = dict(d["economics"])
    econ["well_count"] = int(econ["well_count"])
    return Project(
        id=str(d["id"]),
        stage=str(d["stage"]),
        category=str(d["category"]),
        oil=_volumetric(d["oil"]),
        gas=_volumetric(d["gas"]),
        economics=EconomicParams(**{k: (float(v) if k != "well_count" else v) for k, v in econ.items()}),
        classification=ClassificationMap(
            {str(m): (float(v[0]), float(v[1])) for m, v in d.get("classification", {}).items()}
        ),
        prior_pos=None if d.get("prior_pos") is None else float(d["prior_pos"]),
        risk_factors=rf,
        mandatory=bool(d.get("mandatory", False)),
    )


def catalog_from_dict(doc: Mapping[str, Any]) -> ProjectCatalog:
    """Build a catalog from its JSON tree; raises :class:`CatalogError` on malformed input."""
    try:
        projects = tuple(_project(p) for p in doc["projects"])
        links = tuple(
            InfoLink(str(l["from"]), str(l["to"]), float(l["strength"])) for l in doc.get("links", [])
        )
        triggers = {
            str(j): TriggerSets(
                success=tuple(t.get("success", ())),
                failure=tuple(t.get("failure", ())),
                unconditional=tuple(t.get("unconditional", ())),
            )
            for j, t in doc.get("triggers", {}).items()
        }
        c = dict(doc["constraints"])
        targets = {
            str(m): ReserveTarget(float(t["target"]), float(t["prob"]))
            for m, t in c.pop("reserve_targets", {}).items()
        }
        bounds = tuple(float(b) for b in c.pop("posterior_bounds", DEFAULT_POSTERIOR_BOUNDS))
        constraints = PlanningConstraints(
            budget_first=float(c["budget_first"]),
            budget_total=float(c["budget_total"]),
            wells_first=int(c["wells_first"]),
            wells_total=int(c["wells_total"]),
            budget_trap=float(c["budget_trap"]),
            budget_app=float(c["budget_app"]),
            reserve_targets=targets,
            joint_prob=float(c["joint_prob"]),
            min_success_rate=float(c["min_success_rate"]),
            success_rate_prob=float(c["success_rate_prob"]),
            cvar_beta=float(c["cvar_beta"]),
            posterior_bounds=bounds,  # type: ignore[arg-type]
            shortfall_weight=float(c.get("shortfall_weight", 0.0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CatalogError(f"malformed catalog: {exc!r}") from exc
    return ProjectCatalog(projects, links, triggers, constraints)


def catalog_to_dict(catalog: ProjectCatalog) -> dict[str, Any]:
    def triple(t: QuantileTriple) -> dict[str, float]:
        return {"q10": t.q10, "q50": t.q50, "q90": t.q90}

    def vol(v: VolumetricParams) -> dict[str, Any]:
        d: dict[str, Any] = {name: triple(getattr(v, name)) for name in VolumetricParams.FIELDS}
        d["conversion"] = v.conversion
        return d

    projects = []
    for p in catalog.projects:
        d: dict[str, Any] = {"id": p.id, "stage": p.stage, "category": p.category}
        if p.prior_pos is not None:
            d["prior_pos"] = p.prior_pos
        if p.risk_factors is not None:
            d["risk_factors"] = dataclasses.asdict(p.risk_factors)
        d["mandatory"] = p.mandatory
        d["oil"] = vol(p.oil)
        d["gas"] = vol(p.gas)
        d["economics"] = dataclasses.asdict(p.economics)
        d["classification"] = {m: list(v) for m, v in p.classification.coefficients.items()}
        projects.append(d)
    c = catalog.constraints
    constraints = {
        f.name: getattr(c, f.name)
        for f in dataclasses.fields(c)
        if f.name not in ("reserve_targets", "posterior_bounds")
    }
    constraints["reserve_targets"] = {
        m: {"target": t.target, "prob": t.prob} for m, t in c.reserve_targets.items()
    }
    constraints["posterior_bounds"] = list(c.posterior_bounds)
    return {
        "projects": projects,
        "links": [{"from": l.source, "to": l.target, "strength": l.strength} for l in catalog.links],
        "triggers": {
            j: {"success": list(t.success), "failure": list(t.failure), "unconditional": list(t.unconditional)}
            for j, t in catalog.triggers.items()
        },
        "constraints": constraints,
    }


def load_catalog(path: str | Path) -> ProjectCatalog:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CatalogError(f"cannot read catalog {path}: {exc}") from exc
    return catalog_from_dict(doc)


def save_catalog(catalog: ProjectCatalog, path: str | Path) -> None:
    Path(path).write_text(json.dumps(catalog_to_dict(catalog), indent=1, sort_keys=True) + "\n")


# Where each model symbol lives, as ``module:attribute``. Checked by the coverage test.
SYMBOL_FIELDS: dict[str, str] = {
    "I": "domain:CatalogArrays.first_ids",
    "J": "domain:CatalogArrays.second_ids",
    "q": "domain:Project.id",
    "s": "scenarios:ScenarioBank.first_success",
    "k": "scenarios:ScenarioBank.second_uniforms",
    "S": "scenarios:ScenarioBank.n_scenarios",
    "K": "scenarios:ScenarioBank.n_sub",
    "Omega": "scenarios:ScenarioBank.n_pairs",
    "M": "domain:INDICATORS",
    "omega": "scenarios:ScenarioBank.second_npv",
    "M_act": "domain:PlanningConstraints.active_indicators",
    "I_fix": "domain:Project.mandatory",
    "I_trap": "domain:CatalogArrays.cat_first",
    "J_trap": "domain:CatalogArrays.cat_second",
    "I_app": "domain:CatalogArrays.cat_first",
    "J_app": "domain:CatalogArrays.cat_second",
    "a": "evaluator:project_payoff",
    "A_j": "domain:ProjectCatalog.links",
    "A_j_plus": "domain:TriggerSets.success",
    "A_j_minus": "domain:TriggerSets.failure",
    "A_j_zero": "domain:TriggerSets.unconditional",
    "x": "nsga2:Individual.genome",
    "y": "evaluator:EvaluationReport.recourse",
    "xi": "scenarios:ScenarioBank.first_success",
    "zeta": "posterior:realize_second_stage",
    "e": "posterior:eligibility",
    "p0": "domain:Project.p0",
    "p_post": "posterior:posterior",
    "theta": "domain:InfoLink.strength",
    "Delta": "posterior:evidence",
    "pi_o": "domain:EconomicParams.price_oil",
    "pi_g": "domain:EconomicParams.price_gas",
    "u_o": "domain:EconomicParams.unit_cost_oil",
    "u_g": "domain:EconomicParams.unit_cost_gas",
    "eta_o": "domain:EconomicParams.econ_coeff_oil",
    "eta_g": "domain:EconomicParams.econ_coeff_gas",
    "f": "domain:EconomicParams.fixed_cost",
    "tau": "domain:EconomicParams.tax_rate",
    "delta": "domain:EconomicParams.discount",
    "lambda_o": "domain:ClassificationMap.oil",
    "lambda_g": "domain:ClassificationMap.gas",
    "kappa_o": "domain:VolumetricParams.conversion",
    "kappa_g": "domain:VolumetricParams.conversion",
    "p_lower": "domain:PlanningConstraints.posterior_bounds",
    "p_upper": "domain:PlanningConstraints.posterior_bounds",
    "c": "domain:EconomicParams.capex",
    "w": "domain:EconomicParams.well_count",
    "l": "domain:EconomicParams.failure_loss",
    "R_o": "scenarios:ScenarioBank.first_oil",
    "R_g": "scenarios:ScenarioBank.first_gas",
    "r": "scenarios:ScenarioBank.first_contrib",
    "V": "scenarios:ScenarioBank.first_npv",
    "Z": "evaluator:realized_npv",
    "L": "evaluator:downside_loss",
    "R_m": "evaluator:reserve_total",
    "Gamma": "evaluator:success_rate",
    "B1": "domain:PlanningConstraints.budget_first",
    "N1": "domain:PlanningConstraints.wells_first",
    "B": "domain:PlanningConstraints.budget_total",
    "N": "domain:PlanningConstraints.wells_total",
    "B_trap": "domain:PlanningConstraints.budget_trap",
    "B_app": "domain:PlanningConstraints.budget_app",
    "H_m": "domain:ReserveTarget.target",
    "alpha_m": "domain:ReserveTarget.prob",
    "alpha_joint": "domain:PlanningConstraints.joint_prob",
    "rho_min": "domain:PlanningConstraints.min_success_rate",
    "alpha_sr": "domain:PlanningConstraints.success_rate_prob",
    "beta": "domain:PlanningConstraints.cvar_beta",
    "C1": "evaluator:EvaluationReport.first_stage_cost",
    "W1": "evaluator:EvaluationReport.first_stage_wells",
    "B_bar": "recourse:RecourseInstance.budget",
    "N_bar": "recourse:RecourseInstance.wells_needed",
    "nu": "recourse:expected_value",
    "v": "recourse:shortfall_value",
    "gamma": "domain:PlanningConstraints.shortfall_weight",
    "Q_s": "recourse:RecourseSolution.objective",
}
