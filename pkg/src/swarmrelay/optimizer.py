"""Multi-objective grasshopper-style search over the mixed relay design space.

The continuous blocks (element weights and UAV positions) move under the
pairwise attraction/repulsion rule toward a roulette-selected archive member;
the discrete blocks evolve by two-point crossover (receivers, duplicates
allowed) and partially matched crossover (visiting order, stays a permutation).
Five optional enhancements - low-discrepancy/chaotic initialization, a
nonlinear comfort-zone decay, heavy-tailed perturbation, archive mutation and
remove-one-recompute pruning - are individually toggleable; all five off gives
the plain multi-objective baseline optimizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from joblib import Parallel, delayed

from .beamforming import GainQuadrature
from .moea import (
    Archive,
    hypervolume,
    objective_bounds,
    roulette_select_target,
    update_archive,
)
from .problem import EvaluatedSolution, Evaluator, Solution, clamp_repair, dominates
from .scenario import Scenario

HALTON_PRIMES = (2, 3, 5, 7)  # primes below 10
CHAOS_A = 0.5
CHAOS_B = 0.2


@dataclass(frozen=True)
class OptimizerConfig:
    pop_size: int = 20
    iter_max: int = 100
    c_max: float = 1.0
    c_min: float = 0.0004
    levy_beta: float = 1.5
    alpha1: float = 0.2          # heavy-tailed perturbation step scale
    alpha2: float = 0.2          # archive mutation step scale
    goa_f: float = 0.5           # attraction intensity
    goa_l: float = 1.5           # attraction length scale
    neighbor_radius: float = 0.1  # roulette crowding radius (normalized objectives)
    archive_cap: int | None = None  # defaults to pop_size
    hv_samples: int = 20000      # sample count for the per-iteration trace indicator
    h3c_init: bool = True
    nonlinear_c: bool = True
    levy: bool = True
    archive_mutation: bool = True
    dcde: bool = True
    seed: int = 0

    @property
    def cap(self) -> int:
        return self.archive_cap if self.archive_cap is not None else self.pop_size

    @property
    def is_vanilla(self) -> bool:
        return not (self.h3c_init or self.nonlinear_c or self.levy
                    or self.archive_mutation or self.dcde)

    def validate(self) -> None:
        if self.pop_size < 4:
            raise ValueError("pop_size must be >= 4")
        if not 0.0 < self.c_min < self.c_max:
            raise ValueError("need 0 < c_min < c_max")
        if self.iter_max < 0:
            raise ValueError("iter_max must be >= 0")

    @classmethod
    def improved(cls, **kwargs) -> "OptimizerConfig":
        return cls(**kwargs)

    @classmethod
    def vanilla(cls, **kwargs) -> "OptimizerConfig":
        kwargs.update(h3c_init=False, nonlinear_c=False, levy=False,
                      archive_mutation=False, dcde=False)
        return cls(**kwargs)


class SolutionSpace:
    """Flat continuous view of a solution: [station weights | swarm weights | positions]."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.mn = scenario.paa.n_elements
        self.k = scenario.n_uavs
        self.t = scenario.n_devices
        n_w = (self.mn + self.k) * self.t
        self.n_cont = n_w + 3 * self.k * self.t
        self.lower = np.concatenate([
            np.zeros(n_w),
            np.tile(scenario.bounds[:, 0], self.k * self.t),
        ])
        self.upper = np.concatenate([
            np.ones(n_w),
            np.tile(scenario.bounds[:, 1], self.k * self.t),
        ])

    def to_continuous(self, sol: Solution) -> np.ndarray:
        return np.concatenate([sol.paa_w.ravel(), sol.uvaa_w.ravel(), sol.pos.ravel()])

    def build(self, cont: np.ndarray, recv: np.ndarray, order: np.ndarray) -> Solution:
        mn_t = self.mn * self.t
        k_t = self.k * self.t
        return Solution(
            paa_w=cont[:mn_t].reshape(self.mn, self.t),
            recv=recv,
            uvaa_w=cont[mn_t:mn_t + k_t].reshape(self.k, self.t),
            pos=cont[mn_t + k_t:].reshape(self.k, self.t, 3),
            order=order,
        )


# ---------------------------------------------------------------------------
# Initialization
# ---------------------------------------------------------------------------

def halton_value(index: int, base: int) -> float:
    """Radical-inverse (digit reversal) of ``index`` in ``base``; in (0, 1)."""
    f, r = 1.0, 0.0
    while index > 0:
        f /= base
        r += f * (index % base)
        index //= base
    return r


def chaos_step(x: np.ndarray, a: float = CHAOS_A, b: float = CHAOS_B) -> np.ndarray:
    """One step of the circle-map chaotic sequence on [0, 1)."""
    return np.mod(x + b - (a / (2.0 * math.pi)) * np.sin(2.0 * math.pi * x), 1.0)


def _decode_rows(space: SolutionSpace, unit: np.ndarray, scenario: Scenario) -> list[Solution]:
    """Map unit-cube rows to repaired solutions (receivers rounded, order by rank)."""
    t, k = space.t, space.k
    lows = np.concatenate([space.lower, np.full(t, 1.0), np.zeros(t)])
    highs = np.concatenate([space.upper, np.full(t, float(k)), np.ones(t)])
    rows = lows + unit * (highs - lows)
    out = []
    for row in rows:
        cont = row[: space.n_cont]
        recv = np.clip(np.rint(row[space.n_cont: space.n_cont + t]), 1, k).astype(int)
        keys = row[space.n_cont + t:]
        order = np.argsort(keys, kind="stable") + 1
        out.append(clamp_repair(space.build(cont, recv, order), scenario))
    return out


def h3c_initialize(cfg: OptimizerConfig, scenario: Scenario,
                   rng: np.random.Generator) -> list[Solution]:
    """Half the population from Halton points, half from a chaotic map."""
    space = SolutionSpace(scenario)
    dims = space.n_cont + 2 * space.t
    n_halton = math.ceil(cfg.pop_size / 2)
    bases = rng.choice(HALTON_PRIMES, size=dims)
    unit = np.empty((cfg.pop_size, dims))
    for i in range(n_halton):
        unit[i] = [halton_value(i + 1, int(b)) for b in bases]
    state = rng.random(dims)
    for i in range(n_halton, cfg.pop_size):
        state = chaos_step(state)
        unit[i] = state
    return _decode_rows(space, unit, scenario)


def random_initialize(cfg: OptimizerConfig, scenario: Scenario,
                      rng: np.random.Generator) -> list[Solution]:
    space = SolutionSpace(scenario)
    unit = rng.random((cfg.pop_size, space.n_cont + 2 * space.t))
    return _decode_rows(space, unit, scenario)


# ---------------------------------------------------------------------------
# Movement operators
# ---------------------------------------------------------------------------

def decreasing_coefficient(iteration: int, cfg: OptimizerConfig) -> float:
    """Comfort-zone coefficient, linear or sine-shaped, clamped to [c_min, c_max]."""
    frac = iteration / max(cfg.iter_max, 1)
    if cfg.nonlinear_c:
        c = cfg.c_max - (cfg.c_max - cfg.c_min) * math.sin(0.5 * math.pi * math.sqrt(frac))
    else:
        c = cfg.c_max - frac * (cfg.c_max - cfg.c_min)
    return float(min(max(c, cfg.c_min), cfg.c_max))


def social_force(r, f: float, l: float):
    """Pairwise attraction/repulsion; zero at the comfort distance."""
    r = np.asarray(r, dtype=float)
    return f * np.exp(-r / l) - np.exp(-r)


def goa_step(cont_pop: np.ndarray, target: np.ndarray, c: float,
             lower: np.ndarray, upper: np.ndarray, cfg: OptimizerConfig) -> np.ndarray:
    """Proposed continuous blocks for the whole population.

    Per-dimension distances are rescaled into [1, 4] before the force term so
    it never saturates; the direction uses the full-vector separation, guarded
    to zero for coincident members.
    """
    span = upper - lower
    diff = cont_pop[None, :, :] - cont_pop[:, None, :]   # x_j - x_i, (N, N, D)
    dist = np.sqrt((diff * diff).sum(axis=-1))           # (N, N)
    inv = np.divide(1.0, dist, out=np.zeros_like(dist), where=dist > 0.0)
    r = 1.0 + 3.0 * np.abs(diff) / span[None, None, :]
    s = social_force(r, cfg.goa_f, cfg.goa_l)
    contrib = (0.5 * span)[None, None, :] * s * diff * inv[:, :, None]
    return c * (c * contrib.sum(axis=1)) + target[None, :]


def levy_steps(shape, beta: float, rng: np.random.Generator) -> np.ndarray:
    """Heavy-tailed step matrix via the Mantegna construction."""
    sigma_u = (
        math.gamma(1.0 + beta) * math.sin(math.pi * beta / 2.0)
        / (math.gamma((1.0 + beta) / 2.0) * beta * 2.0 ** ((beta - 1.0) / 2.0))
    ) ** (1.0 / beta)
    u = rng.normal(0.0, sigma_u, shape)
    w = rng.normal(0.0, 1.0, shape)
    return u / np.abs(w) ** (1.0 / beta)


# ---------------------------------------------------------------------------
# Discrete crossover
# ---------------------------------------------------------------------------

def tpc_crossover(p1: np.ndarray, p2: np.ndarray, lo: int, hi: int):
    """Two-point crossover: swap the inclusive segment [lo, hi]."""
    c1, c2 = p1.copy(), p2.copy()
    c1[lo:hi + 1] = p2[lo:hi + 1]
    c2[lo:hi + 1] = p1[lo:hi + 1]
    return c1, c2


def pmx_crossover(p1: np.ndarray, p2: np.ndarray, lo: int, hi: int):
    """Partially matched crossover on permutations, conflicts mapped away."""

    def child(base: np.ndarray, donor: np.ndarray) -> np.ndarray:
        c = base.copy()
        c[lo:hi + 1] = donor[lo:hi + 1]
        transplanted = set(int(v) for v in donor[lo:hi + 1])
        mapping = {int(donor[i]): int(base[i]) for i in range(lo, hi + 1)}
        for i in list(range(0, lo)) + list(range(hi + 1, len(base))):
            v = int(base[i])
            while v in transplanted:
                v = mapping[v]
            c[i] = v
        return c

    return child(p1, p2), child(p2, p1)


def _segment(length: int, rng: np.random.Generator):
    a, b = rng.integers(0, length, size=2)
    return (int(a), int(b)) if a <= b else (int(b), int(a))


def discrete_crossover(cur_recv, cur_order, tgt_recv, tgt_order,
                       rng: np.random.Generator):
    """Two offspring discrete pairs: receivers by TPC, order by PMX."""
    lo, hi = _segment(len(cur_recv), rng)
    r1, r2 = tpc_crossover(np.asarray(cur_recv), np.asarray(tgt_recv), lo, hi)
    lo, hi = _segment(len(cur_order), rng)
    o1, o2 = pmx_crossover(np.asarray(cur_order), np.asarray(tgt_order), lo, hi)
    return (r1, o1), (r2, o2)


# ---------------------------------------------------------------------------
# Main loop
# ---------------------------------------------------------------------------

@dataclass
class RunTrace:
    """Per-iteration progress record (iteration 0 is the seeded archive)."""

    iterations: list = field(default_factory=list)
    archive_sizes: list = field(default_factory=list)
    best_f1: list = field(default_factory=list)
    best_f2: list = field(default_factory=list)
    best_f3: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)   # archive objectives per iteration
    hv: list = field(default_factory=list)          # filled after the run
    hv_bounds: tuple | None = None

    def record(self, iteration: int, archive: Archive) -> None:
        objs = archive.objectives_array()
        self.iterations.append(iteration)
        self.archive_sizes.append(len(archive.members))
        self.best_f1.append(float(-objs[:, 0].min()) if len(objs) else 0.0)
        self.best_f2.append(float(objs[:, 1].min()) if len(objs) else 0.0)
        self.best_f3.append(float(objs[:, 2].min()) if len(objs) else 0.0)
        self.snapshots.append(objs)

    def finalize_hv(self, seed: int, n_samples: int) -> None:
        nonempty = [s for s in self.snapshots if len(s)]
        if not nonempty:
            self.hv = [0.0] * len(self.snapshots)
            return
        bounds = objective_bounds(*nonempty)
        self.hv_bounds = bounds
        self.hv = [
            hypervolume(s, bounds, n_samples, np.random.default_rng((seed, i, 977)))
            for i, s in enumerate(self.snapshots)
        ]


def _winner(e1: EvaluatedSolution, e2: EvaluatedSolution, coin: float) -> EvaluatedSolution:
    if dominates(e1, e2):
        return e1
    if dominates(e2, e1):
        return e2
    return e1 if coin < 0.5 else e2


def _evaluate_pairs(evaluator: Evaluator, pairs: list, workers: int) -> list:
    if workers > 1:
        return Parallel(n_jobs=workers)(
            delayed(evaluator.evaluate_pair)(a, b) for a, b in pairs
        )
    return [evaluator.evaluate_pair(a, b) for a, b in pairs]


def _evaluate_batch(evaluator: Evaluator, solutions: list, workers: int) -> list:
    if workers > 1:
        return Parallel(n_jobs=workers)(delayed(evaluator.evaluate)(s) for s in solutions)
    return [evaluator.evaluate(s) for s in solutions]


def archive_mutation_candidates(
    archive: Archive,
    cfg: OptimizerConfig,
    space: SolutionSpace,
    evaluator: Evaluator,
    rng: np.random.Generator,
    workers: int = 1,
) -> list:
    """One dominance-or-coin winner per archive member, from Cauchy-perturbed
    continuous blocks and discrete crossover with a random archive partner."""
    members = archive.members
    if not members:
        return []
    pairs, coins = [], []
    for m in members:
        cont = space.to_continuous(m.solution)
        mutated = cont + cfg.alpha2 * rng.standard_cauchy(cont.shape)
        partner = members[int(rng.integers(len(members)))].solution
        (r1, o1), (r2, o2) = discrete_crossover(
            m.solution.recv, m.solution.order, partner.recv, partner.order, rng
        )
        coins.append(rng.random())
        s1 = clamp_repair(space.build(mutated, r1, o1), space.scenario)
        s2 = clamp_repair(space.build(mutated, r2, o2), space.scenario)
        pairs.append((s1, s2))
    results = _evaluate_pairs(evaluator, pairs, workers)
    return [_winner(e1, e2, coin) for (e1, e2), coin in zip(results, coins)]


def _archive_update_step(
    archive: Archive,
    population: list,
    cfg: OptimizerConfig,
    space: SolutionSpace,
    evaluator: Evaluator,
    rng: np.random.Generator,
    workers: int,
) -> Archive:
    """Full archive update: optional mutation candidates, union, filter, prune."""
    candidates = list(population)
    if cfg.archive_mutation:
        candidates += archive_mutation_candidates(archive, cfg, space, evaluator, rng, workers)
    return update_archive(archive, candidates, rng, dynamic=cfg.dcde)


def run(
    cfg: OptimizerConfig,
    scenario: Scenario,
    quad: GainQuadrature,
    workers: int = 1,
    archive_check=None,
) -> tuple[Archive, RunTrace]:
    """Run the optimizer; deterministic for a fixed (config, scenario) pair.

    All random draws happen on the main thread before evaluations are
    dispatched, and results are gathered by index, so the outcome does not
    depend on ``workers``.  ``archive_check``, if given, is called with the
    archive after every update (used by invariant tests).
    """
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    space = SolutionSpace(scenario)
    evaluator = Evaluator(scenario, quad)

    init = h3c_initialize if cfg.h3c_init else random_initialize
    population = _evaluate_batch(evaluator, init(cfg, scenario, rng), workers)

    archive = Archive(members=[], cap=cfg.cap)
    archive = _archive_update_step(archive, population, cfg, space, evaluator, rng, workers)
    if archive_check is not None:
        archive_check(archive)

    trace = RunTrace()
    trace.record(0, archive)

    for iteration in range(1, cfg.iter_max + 1):
        c = decreasing_coefficient(iteration, cfg)
        target = roulette_select_target(archive, rng, cfg.neighbor_radius)
        cont_pop = np.stack([space.to_continuous(g.solution) for g in population])
        proposals = goa_step(cont_pop, space.to_continuous(target.solution), c,
                             space.lower, space.upper, cfg)
        if cfg.levy:
            proposals = proposals + cfg.alpha1 * levy_steps(proposals.shape, cfg.levy_beta, rng)

        pairs, coins = [], []
        for j in range(cfg.pop_size):
            cur = population[j].solution
            (r1, o1), (r2, o2) = discrete_crossover(
                cur.recv, cur.order, target.solution.recv, target.solution.order, rng
            )
            coins.append(rng.random())
            s1 = clamp_repair(space.build(proposals[j], r1, o1), scenario)
            s2 = clamp_repair(space.build(proposals[j], r2, o2), scenario)
            pairs.append((s1, s2))
        results = _evaluate_pairs(evaluator, pairs, workers)
        population = [_winner(e1, e2, coin) for (e1, e2), coin in zip(results, coins)]

        archive = _archive_update_step(archive, population, cfg, space, evaluator, rng, workers)
        if archive_check is not None:
            archive_check(archive)
        trace.record(iteration, archive)

    trace.finalize_hv(cfg.seed, cfg.hv_samples)
    return archive, trace
