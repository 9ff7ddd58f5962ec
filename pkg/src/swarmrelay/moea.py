"""Population and archive machinery shared by the optimizers.

Covers non-dominated filtering, crowding-distance pruning (one-shot and the
remove-one-recompute variant), crowding-aware roulette targeting, and the
Monte Carlo hypervolume indicator on min-max normalized objectives.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .problem import EvaluatedSolution, dominates


@dataclass(frozen=True)
class Archive:
    """Bounded store of mutually non-dominated evaluated solutions."""

    members: list
    cap: int

    def objectives_array(self) -> np.ndarray:
        if not self.members:
            return np.empty((0, 3))
        return np.array([m.objectives for m in self.members])


def pareto_filter(members: list) -> list:
    """Drop dominated members and collapse identical objective vectors."""
    unique = []
    seen = set()
    for m in members:
        key = (tuple(m.objectives.tolist()), m.violation)
        if key in seen:
            continue
        seen.add(key)
        unique.append(m)
    return [m for m in unique if not any(dominates(o, m) for o in unique)]


def crowding_distances(objectives: np.ndarray) -> np.ndarray:
    """Per-member crowding distance; per-objective extremes get +inf."""
    objectives = np.asarray(objectives, dtype=float)
    n, m = objectives.shape
    d = np.zeros(n)
    if n == 0:
        return d
    for j in range(m):
        idx = np.argsort(objectives[:, j], kind="stable")
        col = objectives[idx, j]
        d[idx[0]] = np.inf
        d[idx[-1]] = np.inf
        span = col[-1] - col[0]
        if n > 2 and span > 0.0:
            d[idx[1:-1]] += (col[2:] - col[:-2]) / span
    return d


def dcde_prune(members: list, cap: int, rng: np.random.Generator) -> list:
    """Remove one least-crowded member at a time, recomputing after each removal.

    Ties are broken uniformly at random; per-objective extremes carry infinite
    distance and therefore survive while any interior member remains.
    """
    members = list(members)
    while len(members) > cap:
        d = crowding_distances(np.array([m.objectives for m in members]))
        ties = np.flatnonzero(d == d.min())
        pick = int(ties[rng.integers(len(ties))]) if len(ties) > 1 else int(ties[0])
        del members[pick]
    return members


def bulk_crowding_prune(members: list, cap: int) -> list:
    """One-shot variant: sort by crowding distance once, drop the excess."""
    members = list(members)
    if len(members) <= cap:
        return members
    d = crowding_distances(np.array([m.objectives for m in members]))
    keep = np.sort(np.argsort(d, kind="stable")[len(members) - cap:])
    return [members[i] for i in keep]


def update_archive(archive: Archive, candidates: list,
                   rng: np.random.Generator, dynamic: bool = True) -> Archive:
    """Union, dominance filter, then prune back to capacity."""
    merged = pareto_filter(list(archive.members) + list(candidates))
    if len(merged) > archive.cap:
        merged = dcde_prune(merged, archive.cap, rng) if dynamic else bulk_crowding_prune(merged, archive.cap)
    return Archive(members=merged, cap=archive.cap)


def crowded_neighbor_counts(objectives: np.ndarray, radius: float) -> np.ndarray:
    """Number of other members within ``radius`` in min-max normalized space."""
    objectives = np.asarray(objectives, dtype=float)
    n = objectives.shape[0]
    if n <= 1:
        return np.zeros(n, dtype=int)
    lo = objectives.min(axis=0)
    span = objectives.max(axis=0) - lo
    span = np.where(span > 0.0, span, 1.0)
    norm = (objectives - lo) / span
    diff = norm[:, None, :] - norm[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=-1))
    counts = (dist <= radius).sum(axis=1) - 1  # exclude self
    return counts.astype(int)


def roulette_select_target(archive: Archive, rng: np.random.Generator,
                           radius: float = 0.1,
                           neighbor_counts: np.ndarray | None = None) -> EvaluatedSolution:
    """Pick a guidance member, favoring sparsely surrounded ones (weight 1/(1+n))."""
    if not archive.members:
        raise ValueError("cannot select a target from an empty archive")
    if neighbor_counts is None:
        neighbor_counts = crowded_neighbor_counts(archive.objectives_array(), radius)
    weights = 1.0 / (1.0 + np.asarray(neighbor_counts, dtype=float))
    probs = weights / weights.sum()
    return archive.members[int(rng.choice(len(archive.members), p=probs))]


def objective_bounds(*objective_sets: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-objective min/max over the union of one or more objective arrays."""
    stacked = np.vstack([np.asarray(o, dtype=float).reshape(-1, 3) for o in objective_sets if len(o)])
    return stacked.min(axis=0), stacked.max(axis=0)


def hypervolume(objectives: np.ndarray, bounds: tuple[np.ndarray, np.ndarray],
                n_samples: int, rng: np.random.Generator) -> float:
    """Monte Carlo hypervolume of a front, normalized to the unit box.

    Objectives are min-max normalized against ``bounds``; the reference point
    is the all-ones corner.  Returns the fraction of uniform samples dominated
    by at least one front member (standard error <= 1/(2*sqrt(n_samples))).
    """
    objectives = np.asarray(objectives, dtype=float).reshape(-1, len(bounds[0]))
    if objectives.shape[0] == 0:
        return 0.0
    lo, hi = bounds
    span = np.where(hi > lo, hi - lo, 1.0)
    norm = np.clip((objectives - lo) / span, 0.0, None)
    samples = rng.random((n_samples, objectives.shape[1]))
    covered = np.zeros(n_samples, dtype=bool)
    for point in norm:
        if np.all(point <= 1.0):
            covered |= np.all(samples >= point, axis=1)
    return float(covered.mean())
