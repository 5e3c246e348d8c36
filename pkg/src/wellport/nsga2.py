"""Feasibility-first NSGA-II over binary portfolios.

Objectives are minimised; for portfolio search they are ``(-ENPV, CVaR)``.
The engine itself only sees bit vectors and an evaluation callback, which
lets the deterministic benchmark reuse it in single-objective form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .domain import ProjectCatalog
from .evaluator import EvaluationReport, evaluate
from .scenarios import ScenarioBank

EvalFn = Callable[[np.ndarray], tuple[tuple[float, float], float, Any]]


@dataclass(frozen=True)
class SearchConfig:
    population: int = 100
    generations: int = 500
    crossover_prob: float = 0.9
    mutation_prob: float | None = None  # None -> 1 / genome length
    seed: int = 0
    track_archive: bool = False  # keep a cross-generation feasible archive too

    def __post_init__(self):
        if self.population < 4 or self.population % 2:
            raise ValueError("population must be even and at least 4")
        if self.generations < 0:
            raise ValueError("generations must be >= 0")
        for name in ("crossover_prob", "mutation_prob"):
            v = getattr(self, name)
            if v is not None and not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")


@dataclass
class Individual:
    id: int
    genome: np.ndarray
    objectives: tuple[float, float]
    violation: float
    report: Any = field(default=None, repr=False)
    rank: int = -1
    crowding: float = 0.0

    @property
    def feasible(self) -> bool:
        return self.violation == 0.0

    @property
    def key(self) -> bytes:
        return np.packbits(self.genome).tobytes() + len(self.genome).to_bytes(4, "little")


def repair(genome, mandatory) -> np.ndarray:
    """Force every mandatory bit on; other bits are left alone."""
    return np.asarray(genome, dtype=bool) | np.asarray(mandatory, dtype=bool)


def pareto_dominates(fa: Sequence[float], fb: Sequence[float]) -> bool:
    return all(a <= b for a, b in zip(fa, fb)) and any(a < b for a, b in zip(fa, fb))


def constrained_dominates(a: Individual, b: Individual) -> bool:
    if a.feasible and not b.feasible:
        return True
    if not a.feasible and not b.feasible:
        return a.violation < b.violation
    if a.feasible and b.feasible:
        return pareto_dominates(a.objectives, b.objectives)
    return False


def _dominance_matrix(pop: Sequence[Individual]) -> np.ndarray:
    f = np.array([ind.objectives for ind in pop], dtype=float).reshape(len(pop), -1)
    v = np.array([ind.violation for ind in pop], dtype=float)
    feas = v == 0.0
    le = np.all(f[:, None, :] <= f[None, :, :], axis=2)
    lt = np.any(f[:, None, :] < f[None, :, :], axis=2)
    both_feas = feas[:, None] & feas[None, :]
    both_infeas = ~feas[:, None] & ~feas[None, :]
    return (
        (feas[:, None] & ~feas[None, :])
        | (both_infeas & (v[:, None] < v[None, :]))
        | (both_feas & le & lt)
    )


def nondominated_sort(pop: Sequence[Individual]) -> list[list[Individual]]:
    """Split ``pop`` into fronts under constrained dominance; sets ``rank``."""
    if not pop:
        return []
    dom = _dominance_matrix(pop)
    counts = dom.sum(axis=0)  # how many dominate each member
    fronts: list[list[Individual]] = []
    current = np.flatnonzero(counts == 0)
    rank = 0
    while current.size:
        fronts.append([pop[i] for i in sorted(current, key=lambda i: pop[i].id)])
        for i in current:
            pop[i].rank = rank
        counts = counts - dom[current].sum(axis=0)
        counts[current] = -1
        current = np.flatnonzero(counts == 0)
        rank += 1
    return fronts


def crowding_distance(front: Sequence[Individual]) -> np.ndarray:
    """Standard crowding distance; boundary members per objective get ``inf``.

    Distances are computed over distinct objective vectors. Repeated
    vectors keep the value on their lowest-id copy and 0 on the others,
    so clones cannot crowd out genuinely different trade-offs.
    """
    n = len(front)
    dist = np.zeros(n)
    if n:
        f = np.array([ind.objectives for ind in front], dtype=float)
        ids = np.array([ind.id for ind in front])
        by_id = np.argsort(ids, kind="stable")
        _, first = np.unique(f[by_id], axis=0, return_index=True)
        lead = np.sort(by_id[first])
        dist[lead] = _cuboid(f[lead], ids[lead])
    for ind, d in zip(front, dist):
        ind.crowding = float(d)
    return dist


def _cuboid(f: np.ndarray, ids: np.ndarray) -> np.ndarray:
    n = len(f)
    if n <= 2:
        return np.full(n, math.inf)
    dist = np.zeros(n)
    for m in range(f.shape[1]):
        order = np.lexsort((ids, f[:, m]))
        col = f[order, m]
        dist[order[0]] = dist[order[-1]] = math.inf
        span = col[-1] - col[0]
        if span > 0:
            dist[order[1:-1]] += (col[2:] - col[:-2]) / span
    return dist


def _better(a: Individual, b: Individual) -> Individual:
    if a.rank != b.rank:
        return a if a.rank < b.rank else b
    if a.crowding != b.crowding:
        return a if a.crowding > b.crowding else b
    return a if a.id < b.id else b


@dataclass
class SearchResult:
    archive: list[Individual]
    population: list[Individual]
    history: list[dict[str, float]]
    evaluations: int
    least_violating: Individual | None = None  # set only when the archive is empty
    cross_generation: list[Individual] | None = None

    @property
    def empty(self) -> bool:
        return not self.archive


def _unique_front(front: Sequence[Individual]) -> list[Individual]:
    seen: set[bytes] = set()
    out = []
    for ind in sorted(front, key=lambda i: (i.objectives, i.id)):
        if ind.key not in seen:
            seen.add(ind.key)
            out.append(ind)
    return out


def _merge_archive(archive: list[Individual], new: Sequence[Individual]) -> list[Individual]:
    pool = _unique_front([*archive, *(i for i in new if i.feasible)])
    return [a for a in pool if not any(pareto_dominates(b.objectives, a.objectives) for b in pool)]


def search(n_bits: int, mandatory, evaluate_fn: EvalFn, config: SearchConfig) -> SearchResult:
    """Run the generational loop on ``n_bits``-long genomes.

    ``evaluate_fn`` maps a repaired genome to ``(objectives, violation, report)``
    and is called at most once per distinct genome.
    """
    rng = np.random.default_rng(config.seed)
    mandatory = np.asarray(mandatory, dtype=bool)
    pm = config.mutation_prob if config.mutation_prob is not None else 1.0 / max(n_bits, 1)
    cache: dict[bytes, tuple] = {}
    counter = iter(range(1 << 62))

    def make(genome: np.ndarray) -> Individual:
        genome = repair(genome, mandatory)
        ind = Individual(next(counter), genome, (0.0, 0.0), 0.0)
        if ind.key not in cache:
            cache[ind.key] = evaluate_fn(genome)
        ind.objectives, ind.violation, ind.report = cache[ind.key]
        return ind

    # varied densities so both sparse and dense portfolios are present from the start
    density = rng.random(config.population)
    pop = [make(rng.random(n_bits) < d) for d in density]
    _rank(pop)
    history = [_snapshot(0, pop)]
    archive = _merge_archive([], pop) if config.track_archive else None

    for gen in range(1, config.generations + 1):
        offspring = []
        while len(offspring) < config.population:
            p1 = _tournament(pop, rng)
            p2 = _tournament(pop, rng)
            c1, c2 = p1.genome.copy(), p2.genome.copy()
            if rng.random() < config.crossover_prob:
                mix = rng.random(n_bits) < 0.5
                c1, c2 = np.where(mix, p1.genome, p2.genome), np.where(mix, p2.genome, p1.genome)
            for child in (c1, c2):
                flip = rng.random(n_bits) < pm
                offspring.append(make(child ^ flip))
        pop = _environmental_selection(pop + offspring, config.population)
        history.append(_snapshot(gen, pop))
        if archive is not None:
            archive = _merge_archive(archive, offspring)

    fronts = nondominated_sort(pop)
    first = fronts[0] if fronts else []
    feasible = _unique_front([i for i in first if i.feasible])
    least = None
    if not feasible:
        least = min(pop, key=lambda i: (i.violation, i.id))
    return SearchResult(feasible, pop, history, len(cache), least, archive)


def _tournament(pop: Sequence[Individual], rng) -> Individual:
    i, j = rng.integers(len(pop), size=2)
    return _better(pop[i], pop[j])


def _rank(pop: list[Individual]) -> list[list[Individual]]:
    fronts = nondominated_sort(pop)
    for front in fronts:
        crowding_distance(front)
    return fronts


def _environmental_selection(union: list[Individual], size: int) -> list[Individual]:
    seen: set[bytes] = set()
    unique = []
    for ind in union:
        if ind.key not in seen:
            seen.add(ind.key)
            unique.append(ind)
    chosen: list[Individual] = []
    for front in _rank(unique):
        if len(chosen) + len(front) <= size:
            chosen.extend(front)
            continue
        rest = sorted(front, key=lambda i: (-i.crowding, i.id))
        chosen.extend(rest[: size - len(chosen)])
        break
    # crowding is recomputed on the survivors so tournaments see the current population
    _rank(chosen)
    return chosen


def _snapshot(gen: int, pop: Sequence[Individual]) -> dict[str, float]:
    feas = [i for i in pop if i.feasible]
    return {
        "generation": gen,
        "feasible": len(feas),
        "best_objective_0": min((i.objectives[0] for i in feas), default=math.nan),
        "best_objective_1": min((i.objectives[1] for i in feas), default=math.nan),
        "min_violation": min(i.violation for i in pop),
    }


def portfolio_evaluator(catalog: ProjectCatalog, bank: ScenarioBank, **kwargs) -> EvalFn:
    def fn(genome: np.ndarray):
        rep: EvaluationReport = evaluate(genome, bank, catalog, **kwargs)
        return rep.objectives, rep.violation, rep

    return fn


def run(catalog: ProjectCatalog, bank: ScenarioBank, config: SearchConfig, **eval_kwargs) -> SearchResult:
    """Search first-stage portfolios of ``catalog`` on the in-sample ``bank``."""
    a = catalog.arrays
    return search(len(a.first_ids), a.mandatory, portfolio_evaluator(catalog, bank, **eval_kwargs), config)


def hypervolume(front, reference) -> float:
    """Area dominated by a minimisation front up to ``reference`` (2 objectives).

    Points that do not strictly dominate the reference are ignored; use
    :func:`outside_reference` to list them.
    """
    pts = np.asarray(front, dtype=float).reshape(-1, 2)
    ref = np.asarray(reference, dtype=float)
    pts = pts[np.all(pts < ref, axis=1)]
    if not len(pts):
        return 0.0
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]
    area, level = 0.0, ref[1]
    for f0, f1 in pts:
        if f1 < level:
            area += (ref[0] - f0) * (level - f1)
            level = f1
    return float(area)


def outside_reference(front, reference) -> np.ndarray:
    pts = np.asarray(front, dtype=float).reshape(-1, 2)
    return pts[~np.all(pts < np.asarray(reference, dtype=float), axis=1)]


def reference_point(fronts, inflation: float = 0.05) -> tuple[float, float]:
    """Component-wise worst value over all ``fronts``, pushed outward by ``inflation``.

    The push is relative to the magnitude of the worst value, or to the
    objective's span when that value is zero.
    """
    pts = np.concatenate([np.asarray(f, dtype=float).reshape(-1, 2) for f in fronts])
    if not len(pts):
        raise ValueError("reference point needs at least one point")
    worst = pts.max(axis=0)
    span = worst - pts.min(axis=0)
    scale = np.where(worst != 0, np.abs(worst), np.where(span > 0, span, 1.0))
    return tuple(float(w) for w in worst + inflation * scale)


def archive_records(archive: Sequence[Individual], catalog: ProjectCatalog, scenarios: bool = True) -> list[dict]:
    """One export record per portfolio: genome, objectives, reliabilities and recourse summaries."""
    a = catalog.arrays
    out = []
    for rank, ind in enumerate(archive):
        rep: EvaluationReport = ind.report
        rec = {
            "portfolio": rank,
            "genome": "".join("1" if b else "0" for b in ind.genome),
            "selected": [a.first_ids[i] for i in np.flatnonzero(ind.genome)],
            "objective_neg_enpv": ind.objectives[0],
            "objective_cvar": ind.objectives[1],
            **rep.to_record(),
        }
        if scenarios:
            rec["recourse"] = rep.scenario_summaries(a.second_ids)
        out.append(rec)
    return out
