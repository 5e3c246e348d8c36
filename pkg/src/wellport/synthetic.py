"""Synthetic exploration catalogs.

The generator builds a two-tier portfolio: first-stage prospects (frontier
traps, appraisal targets and mature units) carry larger capex, larger
reserves and wider NPV dispersion than the second-stage appraisal pool.

Second-stage projects come in three kinds:

* success followers, eligible when their first-stage parent succeeds and
  linked to it with a positive strength;
* failure alternates, eligible when the parent fails and linked with a
  negative strength (a dry parent raises their chance);
* a mature pool triggered unconditionally by the mandatory projects (or
  by any selection when nothing is mandatory).

Followers and alternates of one parent share cost, well count and category,
so the eligible cost profile of a portfolio does not depend on outcomes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .domain import (
    ClassificationMap,
    EconomicParams,
    PlanningConstraints,
    Project,
    ProjectCatalog,
    QuantileTriple,
    ReserveTarget,
    RiskFactors,
    TriggerSets,
    InfoLink,
    VolumetricParams,
    validate_catalog,
)


class SyntheticSpecError(ValueError):
    pass


@dataclass(frozen=True)
class SyntheticCatalogSpec:
    n_first: int = 30
    n_second: int = 50
    n_mandatory: int = 2
    seed: int = 20240601
    pool_fraction: float = 0.24
    trap_fraction: float = 0.35
    mature_fraction: float = 0.25
    capex_first: tuple[float, float] = (900.0, 3200.0)
    capex_second: tuple[float, float] = (250.0, 700.0)
    trap_pos: tuple[float, float] = (0.22, 0.38)
    appraisal_pos: tuple[float, float] = (0.45, 0.65)
    mature_pos: tuple[float, float] = (0.75, 0.92)
    second_pos: tuple[float, float] = (0.45, 0.75)
    link_strength: tuple[float, float] = (0.6, 1.2)
    extra_link_share: float = 0.3
    extra_link_strength: tuple[float, float] = (-0.3, 0.6)
    active_indicators: tuple[str, ...] = ("po", "pg", "ro")
    target_fraction: float = 1.0
    # expected return on capex at the prior, per category
    trap_return: tuple[float, float] = (0.35, 0.9)
    appraisal_return: tuple[float, float] = (0.2, 0.5)
    mature_return: tuple[float, float] = (0.06, 0.2)
    second_return: tuple[float, float] = (0.1, 0.45)
    conditional_wells: int = 4
    min_success_rate: float = 0.45
    shortfall_weight: float = 0.5
    beta: float = 0.9

    def check(self) -> None:
        if self.n_first < 1 or self.n_second < 0:
            raise SyntheticSpecError("need at least one first-stage project")
        if not 0 <= self.n_mandatory <= self.n_first:
            raise SyntheticSpecError("n_mandatory must lie in [0, n_first]")
        for name in ("capex_first", "capex_second", "trap_pos", "appraisal_pos", "mature_pos", "second_pos"):
            lo, hi = getattr(self, name)
            if not 0 < lo <= hi:
                raise SyntheticSpecError(f"{name} must satisfy 0 < low <= high")
        for name in ("trap_pos", "appraisal_pos", "mature_pos", "second_pos"):
            if getattr(self, name)[1] >= 1:
                raise SyntheticSpecError(f"{name} must stay below 1")
        if not self.capex_first[0] > self.capex_second[1]:
            raise SyntheticSpecError("first-stage capex must exceed second-stage capex")
        if self.trap_fraction + self.mature_fraction > 1:
            raise SyntheticSpecError("category fractions exceed 1")


def _spread(rng, median: float, rel: float) -> QuantileTriple:
    """A geometrically symmetric triple around ``median`` (lognormal-calibratable)."""
    f = math.exp(rel * rng.uniform(0.8, 1.2))
    return QuantileTriple(median / f, median, median * f)


def _fraction(rng, median: float, rel: float) -> QuantileTriple:
    return QuantileTriple(median * (1 - rel), median, min(median * (1 + rel), 0.95))


def _fluid(rng, scale: float, kind: str, dispersion: float) -> VolumetricParams:
    conversion = 30.0 if kind == "oil" else 0.6
    return VolumetricParams(
        area=_spread(rng, scale * rng.uniform(4, 12), 0.55 * dispersion),
        thickness=_spread(rng, rng.uniform(8, 25), 0.35 * dispersion),
        porosity=_fraction(rng, rng.uniform(0.12, 0.2), 0.3),
        water_saturation=_fraction(rng, rng.uniform(0.3, 0.42), 0.2),
        volume_factor=_spread(rng, 1.25 if kind == "oil" else 0.9, 0.08),
        conversion=conversion,
    )


def _economics(rng, capex: float, wells: int, fixed: float) -> EconomicParams:
    return EconomicParams(
        price_oil=3500.0,
        price_gas=12000.0,
        unit_cost_oil=1500.0,
        unit_cost_gas=6000.0,
        econ_coeff_oil=round(rng.uniform(0.02, 0.03), 4),
        econ_coeff_gas=round(rng.uniform(0.04, 0.06), 4),
        fixed_cost=round(fixed, 2),
        tax_rate=0.25,
        discount=round(rng.uniform(0.65, 0.8), 3),
        capex=round(capex, 2),
        failure_loss=round(0.9 * capex, 2),
        well_count=wells,
    )


_CLASSIFICATION = {
    "trap": {"po": (1.0, 0.0), "pg": (0.0, 1.0), "co": (0.4, 0.0), "cg": (0.0, 0.4), "ro": (0.15, 0.0), "rg": (0.0, 0.15)},
    "appraisal": {"po": (1.0, 0.0), "pg": (0.0, 1.0), "co": (0.6, 0.0), "cg": (0.0, 0.6), "ro": (0.35, 0.0), "rg": (0.0, 0.35)},
    "mature": {"po": (1.0, 0.0), "pg": (0.0, 1.0), "co": (0.8, 0.0), "cg": (0.0, 0.8), "ro": (0.6, 0.0), "rg": (0.0, 0.6)},
}

_REACH = {"trap": 2.2, "appraisal": 1.0, "mature": 0.45}


def _median_reserve(v: VolumetricParams) -> float:
    return v.conversion * v.area.q50 * v.thickness.q50 * v.porosity.q50 * (1 - v.water_saturation.q50) / v.volume_factor.q50


def _price_to_return(project: Project, ret: float) -> Project:
    """Rescale the economic coefficients so ``p * V - (1 - p) * l`` is ``ret * capex`` at median reserves."""
    e = project.economics
    p = project.p0
    target_v = (ret * e.capex + (1 - p) * e.failure_loss) / p
    margin = (e.price_oil - e.unit_cost_oil) * e.econ_coeff_oil * _median_reserve(project.oil) + (
        e.price_gas - e.unit_cost_gas
    ) * e.econ_coeff_gas * _median_reserve(project.gas)
    profit = (target_v + e.capex) / (e.discount * (1 - e.tax_rate)) + e.fixed_cost
    scale = profit / margin
    econ = replace(
        e,
        econ_coeff_oil=float(round(e.econ_coeff_oil * scale, 6)),
        econ_coeff_gas=float(round(e.econ_coeff_gas * scale, 6)),
    )
    return replace(project, economics=econ)


def _risk_factors(rng, target: float) -> RiskFactors:
    # five factors whose product is close to ``target``, each in (0, 1]
    base = target ** (1 / 5)
    raw = np.clip(base * np.exp(rng.normal(0, 0.04, 5)), 0.05, 1.0)
    raw *= (target / raw.prod()) ** (1 / 5)
    raw = np.clip(np.round(raw, 4), 0.0001, 1.0)
    return RiskFactors(*map(float, raw))


def _expected_contrib(project: Project, m: str) -> float:
    cls = project.classification
    return cls.oil(m) * _median_reserve(project.oil) + cls.gas(m) * _median_reserve(project.gas)


def make_synthetic(spec: SyntheticCatalogSpec = SyntheticCatalogSpec()) -> ProjectCatalog:
    """Generate a validating catalog, deterministic per ``spec.seed``."""
    spec.check()
    rng = np.random.default_rng(spec.seed)
    nI = spec.n_first
    n_trap = round(spec.trap_fraction * nI)
    n_mature = max(round(spec.mature_fraction * nI), spec.n_mandatory)
    cats = ["trap"] * n_trap + ["mature"] * n_mature + ["appraisal"] * (nI - n_trap - n_mature)
    if len(cats) > nI:
        raise SyntheticSpecError("too many mandatory projects for the category split")
    # mandatory projects are the first mature ones
    first: list[Project] = []
    lo, hi = spec.capex_first
    for i, cat in enumerate(cats):
        if cat == "trap":
            capex = rng.uniform(0.6 * lo + 0.4 * hi, hi)
            pos = rng.uniform(*spec.trap_pos)
            wells = int(rng.integers(2, 4))
        elif cat == "appraisal":
            capex = rng.uniform(lo, 0.5 * (lo + hi))
            pos = rng.uniform(*spec.appraisal_pos)
            wells = int(rng.integers(1, 3))
        else:
            capex = rng.uniform(lo, 0.6 * lo + 0.4 * hi)
            pos = rng.uniform(*spec.mature_pos)
            wells = 1
        reach = _REACH[cat]
        dispersion = {"trap": 1.3, "appraisal": 1.0, "mature": 0.6}[cat]
        ret = rng.uniform(*getattr(spec, f"{cat}_return"))
        first.append(
            _price_to_return(Project(
                id=f"E{i + 1:02d}",
                stage="first",
                category=cat,
                oil=_fluid(rng, reach, "oil", dispersion),
                gas=_fluid(rng, reach, "gas", dispersion),
                economics=_economics(rng, capex, wells, fixed=0.15 * capex),
                classification=ClassificationMap(_CLASSIFICATION[cat]),
                risk_factors=_risk_factors(rng, pos),
                mandatory=cat == "mature" and sum(p.mandatory for p in first) < spec.n_mandatory,
            ), ret)
        )

    mandatory_ids = [p.id for p in first if p.mandatory]
    n_pool = max(1, math.ceil(spec.pool_fraction * spec.n_second)) if spec.n_second else 0
    n_pairs = min(nI - len(mandatory_ids), (spec.n_second - n_pool) // 2)
    n_pool = spec.n_second - 2 * n_pairs
    parents = [p for p in first if not p.mandatory]
    order = rng.permutation(len(parents))[:n_pairs]
    parents = [parents[k] for k in sorted(order)]

    second: list[Project] = []
    links: list[InfoLink] = []
    triggers: dict[str, TriggerSets] = {}
    lo2, hi2 = spec.capex_second
    first_ids = [p.id for p in first]

    def follower(pid: str, cat: str, capex: float, wells: int, reach: float) -> Project:
        ret = rng.uniform(*spec.second_return)
        project = Project(
            id=pid,
            stage="second",
            category=cat,
            oil=_fluid(rng, reach, "oil", 0.7),
            gas=_fluid(rng, reach, "gas", 0.7),
            economics=_economics(rng, capex, wells, fixed=0.1 * capex),
            classification=ClassificationMap(_CLASSIFICATION[cat]),
            prior_pos=round(float(rng.uniform(*spec.second_pos)), 4),
        )
        return _price_to_return(project, ret)

    for n, parent in enumerate(parents):
        cat = "trap" if parent.category == "trap" and rng.random() < 0.5 else "appraisal"
        capex = rng.uniform(lo2, hi2)
        wells = 1 if rng.random() < 0.8 else 2
        for kind, sign in (("S", 1.0), ("F", -1.0)):
            pid = f"A{n + 1:02d}{kind}"
            reach = 0.35 if kind == "S" else 0.25
            second.append(follower(pid, cat, capex * wells, wells, reach))
            strength = round(sign * rng.uniform(*spec.link_strength), 3)
            links.append(InfoLink(parent.id, pid, strength))
            triggers[pid] = TriggerSets(success=(parent.id,)) if kind == "S" else TriggerSets(failure=(parent.id,))
            if rng.random() < spec.extra_link_share and len(first) > 1:
                other = rng.choice([f for f in first_ids if f != parent.id])
                links.append(InfoLink(str(other), pid, round(float(rng.uniform(*spec.extra_link_strength)), 3)))

    pool_triggers = tuple(mandatory_ids) if mandatory_ids else tuple(first_ids)
    for n in range(n_pool):
        pid = f"P{n + 1:02d}"
        capex = rng.uniform(lo2, 0.5 * (lo2 + hi2))
        p = follower(pid, "mature", capex, 1, 0.12)
        second.append(p)
        triggers[pid] = TriggerSets(unconditional=pool_triggers)

    constraints = _constraints(spec, first, second, pool_wells=n_pool, pairs=n_pairs)
    catalog = ProjectCatalog(tuple(first + second), tuple(links), triggers, constraints)
    problems = validate_catalog(catalog)
    if problems:
        raise SyntheticSpecError("generated catalog is invalid: " + "; ".join(map(str, problems[:5])))
    return catalog


def _constraints(spec: SyntheticCatalogSpec, first, second, pool_wells: int, pairs: int) -> PlanningConstraints:
    cost1 = np.array([p.economics.capex for p in first])
    wells1 = np.array([p.economics.well_count for p in first])
    cost2 = np.array([p.economics.capex for p in second]) if second else np.zeros(1)
    n_first_wells = max(1, math.ceil(0.3 * wells1.sum()))
    # the always-eligible pool alone cannot fill the plan
    # each pair yields at most one well, so small catalogs ask for fewer
    extra = pool_wells + min(spec.conditional_wells, math.ceil(pairs / 2)) if second else 0
    wells_total = n_first_wells + extra
    budget_first = float(round(0.4 * cost1.sum(), 2))
    budget_total = float(round(budget_first + 1.5 * float(np.mean(cost2)) * max(extra, 1), 2))
    # expected first-stage reserves at the well limit, scaled down into targets
    share = n_first_wells / wells1.sum()
    targets = {}
    for m in spec.active_indicators:
        expected = sum(p.p0 * _expected_contrib(p, m) for p in first) * share
        targets[m] = ReserveTarget(float(round(spec.target_fraction * expected, 2)), 0.7)
    return PlanningConstraints(
        budget_first=budget_first,
        budget_total=budget_total,
        wells_first=n_first_wells,
        wells_total=wells_total,
        budget_trap=float(round(0.45 * budget_total, 2)),
        budget_app=float(round(0.45 * budget_total, 2)),
        reserve_targets=targets,
        joint_prob=0.6,
        min_success_rate=spec.min_success_rate,
        success_rate_prob=0.9,
        cvar_beta=spec.beta,
        posterior_bounds=(0.01, 0.99),
        shortfall_weight=spec.shortfall_weight,
    )
