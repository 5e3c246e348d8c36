"""Scenario banks: common random numbers and realised reserves/NPVs.

Every uniform draw is addressed by ``(seed, project id, quantity)`` through
an independent Philox stream, and the element position inside that stream
is the scenario index (row-major over ``(s, k)`` for second-stage projects).
Generation order therefore never affects the bank, and a bank with fewer
scenarios is a prefix of a larger one built from the same seed.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy import special

from .domain import (
    INDICATORS,
    DomainError,
    EconomicParams,
    Project,
    ProjectCatalog,
    QuantileTriple,
    VolumetricParams,
)

Z90 = 1.2815515655446004  # standard normal 0.9 quantile
PERT_SHAPE = 4.0
MAX_TAIL_RATIO = 2.0

_SUCCESS_STREAM = 0
_PARAM_STREAMS = {
    (fluid, name): 1 + 5 * f + n
    for f, fluid in enumerate(("oil", "gas"))
    for n, name in enumerate(VolumetricParams.FIELDS)
}


@dataclass(frozen=True)
class CalibratedDistribution:
    kind: str  # "lognormal" | "pert" | "constant"
    params: tuple[float, ...]
    lo: float = 0.0
    hi: float = math.inf

    def __post_init__(self):
        if self.kind == "lognormal" and self.params[1] < 0:
            raise DomainError("lognormal sigma must be >= 0")

    @property
    def pert_shape(self) -> tuple[float, float]:
        lo, mode, hi = self.params
        span = hi - lo
        return (
            1.0 + PERT_SHAPE * (mode - lo) / span,
            1.0 + PERT_SHAPE * (hi - mode) / span,
        )


def calibrate(triple: QuantileTriple, bounded: bool = False) -> CalibratedDistribution:
    """Fit a sampling distribution to a P10/P50/P90 triple.

    Unbounded positive parameters get a lognormal honouring the median
    exactly, with sigma from the symmetric 10/90 spread. When the two
    log-tails disagree by more than a factor of two, or the parameter is
    bounded, a classical PERT on ``(q10, q50, q90)`` is used instead.
    """
    q10, q50, q90 = triple.q10, triple.q50, triple.q90
    hi = 1.0 if bounded else math.inf
    if q10 == q50 == q90:
        return CalibratedDistribution("constant", (q10,), 0.0, hi)
    if not bounded and q10 > 0:
        lower, upper = math.log(q50 / q10), math.log(q90 / q50)
        if lower > 0 and upper > 0 and max(lower, upper) <= MAX_TAIL_RATIO * min(lower, upper):
            sigma = math.log(q90 / q10) / (2 * Z90)
            return CalibratedDistribution("lognormal", (math.log(q50), sigma), 0.0, hi)
    return CalibratedDistribution("pert", (q10, q50, q90), 0.0, hi)


def sample_parameter(dist: CalibratedDistribution, u) -> np.ndarray:
    """Inverse-CDF draw(s) from ``dist`` for uniforms ``u`` in [0, 1), clipped to its bounds."""
    u = np.asarray(u, dtype=float)
    if dist.kind == "constant":
        out = np.full(u.shape, dist.params[0])
    elif dist.kind == "lognormal":
        mu, sigma = dist.params
        if sigma == 0:
            out = np.full(u.shape, math.exp(mu))
        else:
            with np.errstate(divide="ignore"):
                out = np.exp(mu + sigma * special.ndtri(u))
    elif dist.kind == "pert":
        lo, _, hi = dist.params
        a, b = dist.pert_shape
        z = special.betaincinv(a, b, u)
        # betaincinv underflows to nan for subnormal u; the quantile there is 0
        z = np.where(np.isnan(z) & (u < 0.5), 0.0, z)
        out = lo + (hi - lo) * z
    else:
        raise DomainError(f"unknown distribution kind {dist.kind!r}")
    return np.clip(out, dist.lo, dist.hi)


def volumetric_reserve(kappa, area, thickness, porosity, water_saturation, volume_factor):
    """Volumetric reserve ``kappa * A * h * phi * (1 - Sw) / B``."""
    volume_factor = np.asarray(volume_factor, dtype=float)
    if np.any(volume_factor <= 0):
        raise DomainError("formation volume factor must be > 0")
    out = kappa * np.asarray(area) * thickness * porosity * (1.0 - np.asarray(water_saturation)) / volume_factor
    return out if np.ndim(out) else float(out)


def indicator_contribution(lambda_oil, lambda_gas, reserve_oil, reserve_gas):
    return lambda_oil * reserve_oil + lambda_gas * reserve_gas


def success_npv(econ: EconomicParams, reserve_oil, reserve_gas):
    """Success-state NPV: discounted after-tax operating profit less capex."""
    profit = (
        (econ.price_oil - econ.unit_cost_oil) * econ.econ_coeff_oil * np.asarray(reserve_oil)
        + (econ.price_gas - econ.unit_cost_gas) * econ.econ_coeff_gas * np.asarray(reserve_gas)
        - econ.fixed_cost
    )
    out = econ.discount * (profit - econ.tax_rate * np.maximum(profit, 0.0)) - econ.capex
    return out if np.ndim(out) else float(out)


def _stream_key(project_id: str) -> int:
    return int.from_bytes(hashlib.sha256(project_id.encode()).digest()[:4], "little")


def uniforms(seed: int, project_id: str, stream: int, shape: tuple[int, ...]) -> np.ndarray:
    """The counter-addressed uniform block for one (project, quantity) pair."""
    ss = np.random.SeedSequence(seed, spawn_key=(_stream_key(project_id), stream))
    return np.random.Generator(np.random.Philox(ss)).random(shape)


def _realize(project: Project, seed: int, shape: tuple[int, ...]):
    reserves = []
    for fluid in ("oil", "gas"):
        vp: VolumetricParams = getattr(project, fluid)
        draws = {}
        for name in VolumetricParams.FIELDS:
            dist = calibrate(getattr(vp, name), bounded=name in VolumetricParams.BOUNDED)
            if dist.kind == "constant":
                draws[name] = np.full(shape, dist.params[0])
            else:
                draws[name] = sample_parameter(dist, uniforms(seed, project.id, _PARAM_STREAMS[fluid, name], shape))
        reserves.append(volumetric_reserve(vp.conversion, **draws))
    oil, gas = reserves
    contrib = np.stack(
        [
            indicator_contribution(project.classification.oil(m), project.classification.gas(m), oil, gas)
            for m in INDICATORS
        ],
        axis=-1,
    )
    return oil, gas, contrib, success_npv(project.economics, oil, gas)


@dataclass(frozen=True)
class ScenarioBank:
    """Realised uncertainty for every project over ``S`` scenarios and ``K`` sub-scenarios.

    First-stage arrays are shaped ``(S, I[, M])``; second-stage arrays
    ``(S, K, J[, M])``. Contribution arrays index indicators in
    :data:`wellport.domain.INDICATORS` order.
    """

    seed: int
    n_scenarios: int
    n_sub: int
    catalog_digest: str
    first_uniforms: np.ndarray
    second_uniforms: np.ndarray
    first_success: np.ndarray
    first_oil: np.ndarray
    first_gas: np.ndarray
    first_contrib: np.ndarray
    first_npv: np.ndarray
    second_oil: np.ndarray
    second_gas: np.ndarray
    second_contrib: np.ndarray
    second_npv: np.ndarray

    @property
    def n_pairs(self) -> int:
        return self.n_scenarios * self.n_sub

    @cached_property
    def second_npv_mean(self) -> np.ndarray:
        """Mean success NPV over sub-scenarios, ``(S, J)``."""
        return self.second_npv.mean(axis=1)

    @cached_property
    def second_contrib_mean(self) -> np.ndarray:
        """Mean indicator contribution over sub-scenarios, ``(S, J, M)``."""
        return self.second_contrib.mean(axis=1)

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        for name in _ARRAY_FIELDS:
            h.update(np.ascontiguousarray(getattr(self, name)).tobytes())
        return h.hexdigest()[:16]


_ARRAY_FIELDS = (
    "first_uniforms",
    "second_uniforms",
    "first_success",
    "first_oil",
    "first_gas",
    "first_contrib",
    "first_npv",
    "second_oil",
    "second_gas",
    "second_contrib",
    "second_npv",
)


def build_bank(catalog: ProjectCatalog, seed: int, S: int, K: int) -> ScenarioBank:
    """Draw all common random numbers once and realise every project on them."""
    if int(S) != S or int(K) != K or S <= 0 or K <= 0:
        raise ValueError(f"S and K must be positive integers, got S={S}, K={K}")
    S, K = int(S), int(K)
    first, second = catalog.first_stage, catalog.second_stage
    nI, nJ, nM = len(first), len(second), len(INDICATORS)

    u1 = np.empty((S, nI))
    oil1, gas1, npv1 = (np.empty((S, nI)) for _ in range(3))
    contrib1 = np.empty((S, nI, nM))
    for i, p in enumerate(first):
        u1[:, i] = uniforms(seed, p.id, _SUCCESS_STREAM, (S,))
        oil1[:, i], gas1[:, i], contrib1[:, i], npv1[:, i] = _realize(p, seed, (S,))
    p0 = catalog.arrays.p0_first
    success = u1 <= p0[None, :]

    u2 = np.empty((S, K, nJ))
    oil2, gas2, npv2 = (np.empty((S, K, nJ)) for _ in range(3))
    contrib2 = np.empty((S, K, nJ, nM))
    for j, p in enumerate(second):
        u2[:, :, j] = uniforms(seed, p.id, _SUCCESS_STREAM, (S, K))
        oil2[:, :, j], gas2[:, :, j], contrib2[:, :, j], npv2[:, :, j] = _realize(p, seed, (S, K))

    return ScenarioBank(
        seed=int(seed),
        n_scenarios=S,
        n_sub=K,
        catalog_digest=catalog.digest(),
        first_uniforms=u1,
        second_uniforms=u2,
        first_success=success,
        first_oil=oil1,
        first_gas=gas1,
        first_contrib=contrib1,
        first_npv=npv1,
        second_oil=oil2,
        second_gas=gas2,
        second_contrib=contrib2,
        second_npv=npv2,
    )


def save_bank(bank: ScenarioBank, path: str | Path) -> None:
    """Write ``bank`` as a compressed ``.npz`` with a JSON ``meta`` entry."""
    meta = {
        "catalog_digest": bank.catalog_digest,
        "seed": bank.seed,
        "S": bank.n_scenarios,
        "K": bank.n_sub,
    }
    with open(path, "wb") as fh:
        np.savez_compressed(
            fh,
            meta=np.frombuffer(json.dumps(meta, sort_keys=True).encode(), dtype=np.uint8),
            **{name: getattr(bank, name) for name in _ARRAY_FIELDS},
        )


def load_bank(path: str | Path, catalog: ProjectCatalog | None = None) -> ScenarioBank:
    with np.load(path) as data:
        meta = json.loads(bytes(data["meta"]).decode())
        arrays = {name: data[name] for name in _ARRAY_FIELDS}
    if catalog is not None and catalog.digest() != meta["catalog_digest"]:
        raise ValueError("scenario bank was built from a different catalog")
    return ScenarioBank(
        seed=meta["seed"],
        n_scenarios=meta["S"],
        n_sub=meta["K"],
        catalog_digest=meta["catalog_digest"],
        **arrays,
    )
