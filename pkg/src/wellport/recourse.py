"""Scenario-wise 0-1 recourse subproblem.

Maximise ``sum v_j y_j`` over eligible projects subject to the remaining
total, trap and appraisal budgets and an exact remaining well count. Three
solvers share one feasibility model: :func:`solve_exact` (non-dominated
state DP), :func:`solve_greedy` (density ranking) and :func:`solve_brute`
(enumeration, used as a test oracle).

Spends are compared in integer cents of the money unit so dominance and
feasibility never depend on floating-point noise; objectives stay in full
precision. When no selection reaches the well count, every solver returns
the best selection at the largest reachable well count and reports the
deficit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TRAP, APPRAISAL, MATURE = 0, 1, 2
BRUTE_LIMIT = 20


class InstanceTooLarge(ValueError):
    pass


def expected_value(p, mean_npv, failure_loss):
    """Expected economic value of a recourse project: ``p * mean V - (1 - p) * l``."""
    return p * mean_npv - (1.0 - p) * failure_loss


def shortfall_value(nu, gamma, cost, p, mean_contrib, first_tally, targets):
    """Recourse value with reserve-shortfall compensation.

    ``mean_contrib``, ``first_tally`` and ``targets`` are aligned over the
    active indicators (last axis); only indicators whose first-stage tally
    is still below target add ``gamma * c * p * mean_r / H``.
    """
    mean_contrib = np.asarray(mean_contrib, dtype=float)
    unmet = np.asarray(first_tally) < np.asarray(targets)
    bonus = (unmet * mean_contrib / np.asarray(targets, dtype=float)).sum(axis=-1)
    return nu + gamma * cost * p * bonus


@dataclass(frozen=True)
class RecourseInstance:
    """One scenario's recourse problem over the eligible set.

    Arrays are aligned over eligible projects; ``ids`` are their positions
    in the catalog's second stage (used for deterministic tie-breaking).
    """

    ids: np.ndarray
    costs: np.ndarray
    wells: np.ndarray
    categories: np.ndarray
    values: np.ndarray
    budget: float
    budget_trap: float
    budget_app: float
    wells_needed: int

    @property
    def size(self) -> int:
        return len(self.ids)

    @property
    def is_empty(self) -> bool:
        """True when the first stage already exhausted a capacity, leaving nothing to solve."""
        return self.wells_needed <= 0 or min(self.budget, self.budget_trap, self.budget_app) < 0

    @classmethod
    def build(cls, ids, costs, wells, categories, values, budget, budget_trap, budget_app, wells_needed):
        ids = np.asarray(ids, dtype=np.int64)
        order = np.argsort(ids, kind="stable")
        return cls(
            ids=ids[order],
            costs=np.asarray(costs, dtype=float)[order],
            wells=np.asarray(wells, dtype=np.int64)[order],
            categories=np.asarray(categories, dtype=np.int64)[order],
            values=np.asarray(values, dtype=float)[order],
            budget=float(budget),
            budget_trap=float(budget_trap),
            budget_app=float(budget_app),
            wells_needed=int(wells_needed),
        )

    def spend_matrix(self) -> tuple[np.ndarray, np.ndarray]:
        """Integer-cent spends ``(n, 3)`` over (total, trap, appraisal) and the matching caps."""
        cents = np.rint(self.costs * 100).astype(np.int64)
        spend = np.stack(
            [cents, cents * (self.categories == TRAP), cents * (self.categories == APPRAISAL)], axis=1
        )
        caps = np.rint(np.array([self.budget, self.budget_trap, self.budget_app]) * 100).astype(np.int64)
        return spend, caps


@dataclass(frozen=True)
class RecourseSolution:
    selected: np.ndarray  # catalog second-stage positions, ascending
    objective: float
    wells: int
    spend: float
    spend_trap: float
    spend_app: float
    deficit: int

    @property
    def status(self) -> str:
        return "exact-feasible" if self.deficit == 0 else f"shortfall({self.deficit})"


def _solution(inst: RecourseInstance, picks: np.ndarray) -> RecourseSolution:
    picks = np.asarray(picks, dtype=bool)
    wells = int(inst.wells[picks].sum())
    cats = inst.categories[picks]
    costs = inst.costs[picks]
    return RecourseSolution(
        selected=inst.ids[picks],
        objective=float(inst.values[picks].sum()),
        wells=wells,
        spend=float(costs.sum()),
        spend_trap=float(costs[cats == TRAP].sum()),
        spend_app=float(costs[cats == APPRAISAL].sum()),
        deficit=max(inst.wells_needed - wells, 0),
    )


def _empty(inst: RecourseInstance) -> RecourseSolution:
    return _solution(inst, np.zeros(inst.size, dtype=bool))


def _active_dims(spend: np.ndarray, caps: np.ndarray, wells_needed: int) -> list[int]:
    """Spend dimensions that can bind for some selection of at most ``wells_needed`` items.

    A dimension whose largest reachable spend already fits its cap never
    constrains anything and is dropped from the dominance test; identical
    columns collapse to one.
    """
    n = spend.shape[0]
    kmax = min(n, max(wells_needed, 0))
    active: list[int] = []
    for d in range(spend.shape[1]):
        col = spend[:, d]
        if not col.any():
            continue
        top = np.sort(col)[::-1][:kmax].sum()
        if top <= caps[d]:
            continue
        if any(np.array_equal(col, spend[:, a]) for a in active):
            continue
        active.append(d)
    return active


_GROUP_STRIDE = np.int64(1) << 44  # larger than any cent spend we compare


def _prune(wells: np.ndarray, cost: np.ndarray, value: np.ndarray, key: np.ndarray) -> np.ndarray:
    """Indices of the non-dominated states within each well-count group.

    ``a`` dominates ``b`` (same wells) when it spends no more in every active
    dimension and either has more value or the same value with a smaller
    lexicographic key. Later items only append lower key bits, so this
    order survives any completion. Sorting by (wells, value desc, key)
    makes dominance only point backwards, so one pass suffices.
    """
    k = cost.shape[1]
    order = np.lexsort((key, -value, wells))
    w = wells[order]
    starts = np.flatnonzero(np.concatenate(([True], w[1:] != w[:-1])))
    if k == 0:
        return order[starts]
    c = cost[order]
    if k == 1:
        # a running minimum that restarts per group: earlier groups get a larger offset
        group = np.cumsum(np.concatenate(([0], (w[1:] != w[:-1]).astype(np.int64))))
        shifted = c[:, 0] + (group[-1] - group) * _GROUP_STRIDE
        prev_min = np.minimum.accumulate(np.concatenate(([np.iinfo(np.int64).max], shifted[:-1])))
        return order[shifted < prev_min]
    keep: list[int] = []
    bounds = list(starts) + [len(order)]
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        kept = np.empty((0, k), dtype=np.int64)
        rows: list[int] = []
        for pos in range(lo, hi):
            row = c[pos]
            if rows and np.any(np.all(kept <= row, axis=1)):
                continue
            rows.append(pos)
            kept = c[rows]
        keep.extend(rows)
    return order[np.array(keep, dtype=np.int64)]


def solve_exact(inst: RecourseInstance, prune: bool = True) -> RecourseSolution:
    """Exact optimum by dynamic programming over non-dominated states.

    Each state is a partial selection with its well count, spends, value
    and lexicographic key. Processing item ``t`` adds ``state + t`` for
    every state that stays within all caps and the well requirement, then
    prunes dominated states within each well count. ``prune=False`` keeps
    every state (exponential; for cross-checks only).
    """
    if inst.is_empty:
        return _empty(inst)
    n, need = inst.size, inst.wells_needed
    spend, caps = inst.spend_matrix()
    dims = _active_dims(spend, caps, need) if prune else [0, 1, 2]
    key_dtype = np.int64 if n <= 62 else object

    wells = np.zeros(1, dtype=np.int64)
    sp = np.zeros((1, 3), dtype=np.int64)
    val = np.zeros(1)
    lk = np.zeros(1, dtype=key_dtype)
    for t in range(n):
        w2 = wells + inst.wells[t]
        sp2 = sp + spend[t]
        ok = (w2 <= need) & np.all(sp2 <= caps, axis=1)
        if not ok.any():
            continue
        bit = 1 << (n - 1 - t)  # item 0 is the most significant bit
        wells = np.concatenate([wells, w2[ok]])
        sp = np.concatenate([sp, sp2[ok]])
        val = np.concatenate([val, val[ok] + inst.values[t]])
        lk = np.concatenate([lk, lk[ok] + bit])
        if prune:
            keep = _prune(wells, sp[:, dims], val, _rank_keys(lk))
            wells, sp, val, lk = wells[keep], sp[keep], val[keep], lk[keep]

    w_best = need if np.any(wells == need) else int(wells.max())
    idx = np.flatnonzero(wells == w_best)
    best = max(idx, key=lambda i: (val[i], -lk[i]))
    picks = np.array([(int(lk[best]) >> (n - 1 - t)) & 1 for t in range(n)], dtype=bool)
    return _solution(inst, picks)


def _rank_keys(lk: np.ndarray) -> np.ndarray:
    """Dense int64 ranks of arbitrary-precision selection keys (for lexsort)."""
    if lk.dtype != object:
        return lk
    order = sorted(range(len(lk)), key=lambda i: lk[i])
    ranks = np.empty(len(lk), dtype=np.int64)
    ranks[order] = np.arange(len(lk))
    return ranks


def solve_greedy(inst: RecourseInstance, key: str = "density") -> RecourseSolution:
    """Rank by value density (or plain value) and add while every cap holds.

    Zero-cost projects rank first under density; ties fall back to project
    id. Items that would overshoot the well count are skipped, and the pass
    stops as soon as the count is met.
    """
    if inst.is_empty:
        return _empty(inst)
    if key == "density":
        with np.errstate(divide="ignore", invalid="ignore"):
            score = np.where(inst.costs > 0, inst.values / np.where(inst.costs > 0, inst.costs, 1.0), np.inf)
    elif key == "value":
        score = inst.values.copy()
    else:
        raise ValueError(f"unknown greedy key {key!r}")
    order = np.lexsort((inst.ids, -score))
    spend, caps = inst.spend_matrix()
    used = np.zeros(3, dtype=np.int64)
    wells = 0
    picks = np.zeros(inst.size, dtype=bool)
    for t in order:
        if wells == inst.wells_needed:
            break
        if wells + inst.wells[t] > inst.wells_needed or np.any(used + spend[t] > caps):
            continue
        picks[t] = True
        used += spend[t]
        wells += int(inst.wells[t])
    return _solution(inst, picks)


def solve_brute(inst: RecourseInstance) -> RecourseSolution:
    """Exhaustive enumeration of every subset (at most 20 eligible projects)."""
    n = inst.size
    if n > BRUTE_LIMIT:
        raise InstanceTooLarge(f"brute force refuses {n} > {BRUTE_LIMIT} eligible projects")
    if inst.is_empty:
        return _empty(inst)
    spend, caps = inst.spend_matrix()
    masks = np.arange(1 << n, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(n)) & 1).astype(bool)  # bit t <-> item t
    wells = bits @ inst.wells
    ok = np.all(bits.astype(np.int64) @ spend <= caps, axis=1) & (wells <= inst.wells_needed)
    top = wells[ok].max()
    cand = np.flatnonzero(ok & (wells == top))
    values = bits[cand].astype(float) @ inst.values
    best_val = values.max()
    ties = cand[values == best_val]
    # lexicographically smallest selection vector (item 0 first)
    pick = min(ties, key=lambda m: tuple(bits[m]))
    return _solution(inst, bits[pick])


SOLVERS = {"exact": solve_exact, "greedy": solve_greedy, "brute": solve_brute}
