"""Sample-average evaluation of one first-stage portfolio over a scenario bank.

For every first-stage scenario the evaluator observes the first-stage
outcomes, derives eligibility and posterior probabilities, solves the
recourse problem, and realises second-stage successes on the bank's common
uniforms. Omega-level quantities (NPV, losses, reserves, success rates) are
then reduced in ``(s, k)`` order.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.special import expit, logit

from . import posterior as post
from .domain import INDICATORS, ProjectCatalog
from .recourse import (
    APPRAISAL,
    TRAP,
    RecourseInstance,
    expected_value,
    shortfall_value,
    solve_exact,
    solve_greedy,
)
from .scenarios import ScenarioBank

RECOURSE_MODES = ("exact", "greedy", "none")
POSTERIOR_MODES = ("posterior", "fixed")


def realized_npv(first_payoff, recourse_payoff):
    """Annual NPV of a scenario pair: first-stage payoff plus the recourse payoff."""
    return np.asarray(first_payoff) + np.asarray(recourse_payoff)


def project_payoff(npv, success, failure_loss):
    """Realised value of a project: its success NPV if it succeeds, minus its loss otherwise."""
    return np.where(success, npv, -np.asarray(failure_loss, dtype=float))


def reserve_total(first_contrib, first_success, second_contrib=0.0, second_success=False):
    """Reserve tally of selected projects; failures contribute nothing."""
    return np.sum(np.where(first_success, first_contrib, 0.0), axis=-1) + np.sum(
        np.where(second_success, second_contrib, 0.0), axis=-1
    )


def success_rate(successful_wells, committed_wells):
    """Successful over committed wells; ``nan`` when nothing was drilled."""
    committed = np.asarray(committed_wells, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(committed > 0, np.asarray(successful_wells) / np.where(committed > 0, committed, 1.0), np.nan)
    return out if np.ndim(out) else float(out)


def downside_loss(z):
    out = np.maximum(-np.asarray(z, dtype=float), 0.0)
    return out if np.ndim(out) else float(out)


def _cvar_objective(losses: np.ndarray, alpha: float, beta: float) -> float:
    return alpha + np.maximum(losses - alpha, 0.0).sum() / ((1.0 - beta) * len(losses))


def cvar(losses, beta: float) -> float:
    """Finite-sample CVaR by the Rockafellar-Uryasev minimisation.

    The objective is piecewise linear and convex in the threshold with
    breakpoints at the sample losses, so its minimum sits at the empirical
    beta-quantile; the neighbouring order statistics are also tried so
    that rounding in ``beta * N`` cannot pick the wrong breakpoint.
    """
    losses = np.sort(np.asarray(losses, dtype=float).ravel())
    if losses.size == 0:
        raise ValueError("cvar needs at least one loss")
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    n = losses.size
    k = math.ceil(beta * n) - 1
    cands = {min(max(i, 0), n - 1) for i in (k - 1, k, k + 1)}
    return min(_cvar_objective(losses, losses[i], beta) for i in sorted(cands))


def empirical_probability(events) -> float:
    events = np.asarray(events, dtype=bool)
    if events.size == 0:
        raise ValueError("empirical probability needs a nonempty sample")
    return float(np.count_nonzero(events) / events.size)


def violation(terms: dict[str, float]) -> float:
    """Aggregate violation: the sum of the positive parts of normalised constraint gaps."""
    return float(sum(max(v, 0.0) for v in terms.values()))


@dataclass
class EvaluationReport:
    """Everything measured for one portfolio on one bank."""

    enpv: float
    cvar: float
    beta: float
    success_reliability: float
    reserve_reliability: dict[str, float]
    joint_reliability: float
    violation: float
    violation_terms: dict[str, float]
    first_stage_cost: float
    first_stage_wells: int
    selected_pos: float
    second_stage_wells: float
    recourse_mode: str
    posterior_mode: str
    losses: np.ndarray = field(repr=False)
    npv: np.ndarray = field(repr=False)
    recourse: np.ndarray = field(repr=False)  # (S, J) bool
    recourse_objective: np.ndarray = field(repr=False)  # (S,)
    recourse_deficit: np.ndarray = field(repr=False)  # (S,)

    @property
    def feasible(self) -> bool:
        return self.violation == 0.0

    @property
    def objectives(self) -> tuple[float, float]:
        return (-self.enpv, self.cvar)

    def with_beta(self, beta: float) -> "EvaluationReport":
        """Re-price the same loss vector at another confidence level."""
        return dataclasses.replace(self, cvar=cvar(self.losses, beta), beta=beta)

    def to_record(self) -> dict[str, Any]:
        """Flat record with stable field names."""
        rec: dict[str, Any] = {
            "enpv": self.enpv,
            "cvar": self.cvar,
            "beta": self.beta,
            "success_reliability": self.success_reliability,
            "joint_reliability": self.joint_reliability,
            "violation": self.violation,
            "first_stage_cost": self.first_stage_cost,
            "first_stage_wells": self.first_stage_wells,
            "selected_pos": self.selected_pos,
            "second_stage_wells": self.second_stage_wells,
            "recourse_mode": self.recourse_mode,
            "posterior_mode": self.posterior_mode,
        }
        for m in INDICATORS:
            if m in self.reserve_reliability:
                rec[f"reserve_reliability_{m}"] = self.reserve_reliability[m]
        for name, v in self.violation_terms.items():
            rec[f"viol_{name}"] = v
        return rec

    def scenario_summaries(self, second_ids) -> list[dict[str, Any]]:
        return [
            {
                "scenario": s,
                "selected": [second_ids[j] for j in np.flatnonzero(self.recourse[s])],
                "objective": float(self.recourse_objective[s]),
                "deficit": int(self.recourse_deficit[s]),
            }
            for s in range(self.recourse.shape[0])
        ]


def _posterior_matrix(p0: np.ndarray, delta: np.ndarray, bounds) -> np.ndarray:
    # Certain priors stay at the bound they tend to; the public posterior() rejects them.
    lo, hi = bounds
    inner = (p0 > 0) & (p0 < 1)
    safe = np.where(inner, p0, 0.5)
    out = np.clip(np.where(delta == 0, safe, expit(logit(safe) + delta)), lo, hi)
    return np.where(inner, out, np.where(p0 >= 1, hi, lo))


def posterior_probabilities(catalog: ProjectCatalog, bank: ScenarioBank, x, mode: str = "posterior", theta_scale: float = 1.0) -> np.ndarray:
    """Posterior success probabilities ``(S, J)``; ``fixed`` mode forces zero evidence."""
    a = catalog.arrays
    bounds = catalog.constraints.posterior_bounds
    if mode == "fixed":
        delta = np.zeros((bank.n_scenarios, len(a.second_ids)))
    elif mode == "posterior":
        delta = post.evidence(x, bank.first_success, a.theta * theta_scale)
    else:
        raise ValueError(f"unknown posterior mode {mode!r}")
    return _posterior_matrix(a.p0_second[None, :], delta, bounds)


def evaluate(
    x,
    bank: ScenarioBank,
    catalog: ProjectCatalog,
    recourse: str = "exact",
    posterior: str = "posterior",
    theta_scale: float = 1.0,
    fixed_recourse=None,
    beta: float | None = None,
) -> EvaluationReport:
    """Evaluate portfolio ``x`` on ``bank``.

    Args:
        x: first-stage selection over the catalog's first stage (already repaired).
        recourse: ``exact``, ``greedy`` or ``none``.
        posterior: ``posterior`` (logit updating) or ``fixed`` (priors only).
        theta_scale: multiplier on every information strength.
        fixed_recourse: optional scenario-independent second-stage selection;
            overrides ``recourse`` and is intersected with each scenario's
            eligible set.
        beta: CVaR confidence level, defaulting to the catalog's.
    """
    if recourse not in RECOURSE_MODES:
        raise ValueError(f"unknown recourse mode {recourse!r}")
    a = catalog.arrays
    c = catalog.constraints
    beta = c.cvar_beta if beta is None else beta
    x = np.asarray(x, dtype=bool)
    S, K = bank.n_scenarios, bank.n_sub
    nJ = len(a.second_ids)
    act = [INDICATORS.index(m) for m in c.active_indicators]
    targets = np.array([c.reserve_targets[INDICATORS[m]].target for m in act])

    cost1 = float(a.cost_first @ x)
    wells1 = int(a.wells_first @ x)
    trap1 = float(a.cost_first[x & (a.cat_first == TRAP)].sum())
    app1 = float(a.cost_first[x & (a.cat_first == APPRAISAL)].sum())

    xi = bank.first_success  # (S, I)
    p = posterior_probabilities(catalog, bank, x, posterior, theta_scale)  # (S, J)
    elig = post.eligibility(x, xi, a.trig_success, a.trig_failure, a.trig_uncond)  # (S, J)

    first_tally = np.einsum("si,sim->sm", (xi & x).astype(float), bank.first_contrib)  # (S, M)
    nu = expected_value(p, bank.second_npv_mean, a.loss_second[None, :])
    v = shortfall_value(
        nu,
        c.shortfall_weight,
        a.cost_second[None, :],
        p,
        bank.second_contrib_mean[:, :, act],
        first_tally[:, None, act],
        targets,
    )

    y = np.zeros((S, nJ), dtype=bool)
    q_obj = np.zeros(S)
    deficit = np.zeros(S, dtype=np.int64)
    need = c.wells_total - wells1
    budgets = (c.budget_total - cost1, c.budget_trap - trap1, c.budget_app - app1)
    if fixed_recourse is not None:
        y = elig & np.asarray(fixed_recourse, dtype=bool)[None, :]
        q_obj = (v * y).sum(axis=1)
    elif recourse != "none":
        solver = solve_exact if recourse == "exact" else solve_greedy
        for s in range(S):
            ids = np.flatnonzero(elig[s])
            inst = RecourseInstance.build(
                ids, a.cost_second[ids], a.wells_second[ids], a.cat_second[ids], v[s, ids], *budgets, need
            )
            sol = solver(inst)
            y[s, sol.selected] = True
            q_obj[s] = sol.objective
    wells2 = y.astype(np.int64) @ a.wells_second  # (S,)
    deficit = np.maximum(need - wells2, 0)

    zeta = post.realize_second_stage(p[:, None, :], bank.second_uniforms)  # (S, K, J)
    pay1 = project_payoff(bank.first_npv, xi, a.loss_first[None, :])
    first_payoff = (pay1 * x).sum(axis=1)  # (S,)
    pay2 = project_payoff(bank.second_npv, zeta, a.loss_second[None, None, :])
    second_payoff = np.einsum("skj,sj->sk", pay2, y.astype(float))
    z = realized_npv(first_payoff[:, None], second_payoff).ravel()
    losses = downside_loss(z)

    won2 = zeta & y[:, None, :]
    reserves = first_tally[:, None, :] + np.einsum("skjm,skj->skm", bank.second_contrib, won2.astype(float))
    good_wells = (xi & x).astype(np.int64) @ a.wells_first
    rate = success_rate(good_wells[:, None] + won2.astype(np.int64) @ a.wells_second, wells1 + wells2[:, None])
    rate_ok = np.nan_to_num(rate, nan=-1.0) >= c.min_success_rate

    per_m = {}
    joint = np.ones((S, K), dtype=bool)
    for m_idx in act:
        m = INDICATORS[m_idx]
        hit = reserves[:, :, m_idx] >= c.reserve_targets[m].target
        per_m[m] = empirical_probability(hit)
        joint &= hit
    success_rel = empirical_probability(rate_ok)
    joint_rel = empirical_probability(joint) if act else 1.0

    annual_spend = cost1 + y.astype(float) @ a.cost_second
    trap_spend = trap1 + y.astype(float) @ np.where(a.cat_second == TRAP, a.cost_second, 0.0)
    app_spend = app1 + y.astype(float) @ np.where(a.cat_second == APPRAISAL, a.cost_second, 0.0)
    N = c.wells_total
    terms = {
        "budget_first": (cost1 - c.budget_first) / c.budget_first,
        "wells_first": (wells1 - c.wells_first) / N,
        "budget_annual": float(np.mean(np.maximum(annual_spend - c.budget_total, 0.0))) / c.budget_total,
        "wells_annual": float(np.mean(np.abs(wells1 + wells2 - N))) / N,
        "budget_trap": _scaled_excess(trap_spend, c.budget_trap),
        "budget_app": _scaled_excess(app_spend, c.budget_app),
        "success_rate": c.success_rate_prob - success_rel,
    }
    for m, rel in per_m.items():
        terms[f"reserve_{m}"] = c.reserve_targets[m].prob - rel
    if act:
        terms["reserve_joint"] = c.joint_prob - joint_rel
    terms = {k: max(float(t), 0.0) for k, t in terms.items()}

    chosen = p[y]
    return EvaluationReport(
        enpv=float(z.mean()),
        cvar=cvar(losses, beta),
        beta=beta,
        success_reliability=success_rel,
        reserve_reliability=per_m,
        joint_reliability=joint_rel,
        violation=violation(terms),
        violation_terms=terms,
        first_stage_cost=cost1,
        first_stage_wells=wells1,
        selected_pos=float(chosen.mean()) if chosen.size else float("nan"),
        second_stage_wells=float(wells2.mean()),
        recourse_mode="fixed" if fixed_recourse is not None else recourse,
        posterior_mode=posterior,
        losses=losses,
        npv=z,
        recourse=y,
        recourse_objective=q_obj,
        recourse_deficit=deficit,
    )


def _scaled_excess(spend: np.ndarray, cap: float) -> float:
    excess = float(np.mean(np.maximum(spend - cap, 0.0)))
    if excess == 0.0:
        return 0.0
    return excess / cap if cap > 0 else excess
