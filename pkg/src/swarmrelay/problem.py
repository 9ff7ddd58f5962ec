"""Decision-vector encoding, objective evaluation and constrained dominance.

A solution fixes, per served device, the station element weights, the receiver
UAV, the swarm element weights and the swarm layout, plus one visiting order
over devices.  Objectives are stored in minimization orientation:
``(-sum legit rate, sum eavesdropper rate, travel energy)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .beamforming import GainQuadrature
from .channel import LinkKind, channel_gain, link_geometry
from .energy import max_range_speed, swarm_travel_energy
from .link_budget import combine_eaves_rate
from .scenario import Scenario


@dataclass(eq=False)
class Solution:
    """One point of the mixed design space (receivers and order are 1-based)."""

    paa_w: np.ndarray   # (rows*cols, T) station element weights in [0, 1]
    recv: np.ndarray    # (T,) receiver UAV index per device, values in [1, K]
    uvaa_w: np.ndarray  # (K, T) swarm element weights in [0, 1]
    pos: np.ndarray     # (K, T, 3) swarm layout per device [m]
    order: np.ndarray   # (T,) device visiting sequence, permutation of 1..T

    def __post_init__(self):
        self.paa_w = np.asarray(self.paa_w, dtype=float)
        self.recv = np.asarray(self.recv, dtype=int)
        self.uvaa_w = np.asarray(self.uvaa_w, dtype=float)
        self.pos = np.asarray(self.pos, dtype=float)
        self.order = np.asarray(self.order, dtype=int)
        t = self.recv.shape[0]
        if self.paa_w.ndim != 2 or self.paa_w.shape[1] != t:
            raise ValueError("paa_w must be (n_elements, T)")
        if self.uvaa_w.ndim != 2 or self.uvaa_w.shape[1] != t:
            raise ValueError("uvaa_w must be (K, T)")
        if self.pos.shape != (self.uvaa_w.shape[0], t, 3):
            raise ValueError("pos must be (K, T, 3)")
        if self.order.shape != (t,):
            raise ValueError("order must be (T,)")

    @property
    def n_devices(self) -> int:
        return self.recv.shape[0]

    def copy(self) -> "Solution":
        return Solution(self.paa_w.copy(), self.recv.copy(), self.uvaa_w.copy(),
                        self.pos.copy(), self.order.copy())

    def to_flat(self) -> np.ndarray:
        """Flat numeric record: paa_w, recv, uvaa_w, pos, order (all C-order)."""
        return np.concatenate([
            self.paa_w.ravel(),
            self.recv.astype(float),
            self.uvaa_w.ravel(),
            self.pos.ravel(),
            self.order.astype(float),
        ])

    @staticmethod
    def from_flat(flat: np.ndarray, n_elements: int, k: int, t: int) -> "Solution":
        flat = np.asarray(flat, dtype=float)
        sizes = [n_elements * t, t, k * t, 3 * k * t, t]
        if flat.shape != (sum(sizes),):
            raise ValueError("flat record has the wrong length")
        parts = np.split(flat, np.cumsum(sizes)[:-1])
        return Solution(
            paa_w=parts[0].reshape(n_elements, t),
            recv=np.rint(parts[1]).astype(int),
            uvaa_w=parts[2].reshape(k, t),
            pos=parts[3].reshape(k, t, 3),
            order=np.rint(parts[4]).astype(int),
        )


@dataclass(eq=False)
class EvaluatedSolution:
    """A solution with its objective vector and constraint bookkeeping."""

    solution: Solution
    objectives: np.ndarray  # (3,) minimization orientation: (-f1, f2, f3)
    feasible: bool
    violation: float        # sum of pairwise-separation shortfalls [m]
    degenerate: bool = False  # some service radiated nothing (all-zero weights)

    @property
    def f1(self) -> float:
        return -float(self.objectives[0])

    @property
    def f2(self) -> float:
        return float(self.objectives[1])

    @property
    def f3(self) -> float:
        return float(self.objectives[2])


def constraint_violation(pos: np.ndarray, d_min: float) -> float:
    """Total pairwise-separation shortfall across all services [m]."""
    k = pos.shape[0]
    if k < 2:
        return 0.0
    iu, ju = np.triu_indices(k, k=1)
    diff = pos[iu] - pos[ju]                     # (pairs, T, 3)
    d = np.sqrt((diff * diff).sum(axis=-1))      # (pairs, T)
    return float(np.maximum(0.0, d_min - d).sum())


def clamp_repair(sol: Solution, scenario: Scenario) -> Solution:
    """Clip every block back into its box; the visiting order is left alone."""
    lo, hi = scenario.bounds[:, 0], scenario.bounds[:, 1]
    return Solution(
        paa_w=np.clip(sol.paa_w, 0.0, 1.0),
        recv=np.clip(np.rint(np.asarray(sol.recv, dtype=float)), 1, scenario.n_uavs).astype(int),
        uvaa_w=np.clip(sol.uvaa_w, 0.0, 1.0),
        pos=np.clip(sol.pos, lo[None, None, :], hi[None, None, :]),
        order=sol.order.copy(),
    )


def dominates(a: EvaluatedSolution, b: EvaluatedSolution) -> bool:
    """Constrained Pareto dominance: feasibility first, then violation, then objectives."""
    if a.feasible and not b.feasible:
        return True
    if not a.feasible and b.feasible:
        return False
    if not a.feasible:
        return a.violation < b.violation
    return bool(np.all(a.objectives <= b.objectives) and np.any(a.objectives < b.objectives))


class Evaluator:
    """Objective evaluation with the station-side grid response precomputed.

    The per-device swarm-array work (pattern integral and gains) depends only
    on the continuous blocks, so offspring pairs that share those blocks can be
    evaluated through :meth:`evaluate_pair` at roughly half the cost.
    """

    def __init__(self, scenario: Scenario, quad: GainQuadrature,
                 eta_paa: float = 1.0, eta_uvaa: float = 1.0):
        self.scenario = scenario
        self.quad = quad
        self.eta_paa = eta_paa
        self.eta_uvaa = eta_uvaa
        ch = scenario.channel
        self.sigma2 = ch.noise_power
        self.bandwidth = ch.bandwidth
        self.cp = 2.0 * math.pi / ch.wavelength
        self.paa_offsets = scenario.paa.element_offsets()
        self.paa_center = scenario.paa_center
        # Station grid response is fixed for the whole run.
        self._paa_grid = np.exp(1j * self.cp * (quad.dirs @ self.paa_offsets.T))  # (G, MN)
        # Station -> eavesdropper geometry is a scenario constant.
        evec = scenario.eavesdroppers - self.paa_center
        e_units = evec / np.linalg.norm(evec, axis=1, keepdims=True)
        self._paa_eaves_resp = np.exp(1j * self.cp * (e_units @ self.paa_offsets.T))  # (E, MN)
        self._h_s2e = np.array(
            [
                channel_gain(LinkKind.G2G, link_geometry(self.paa_center, e), ch)
                for e in scenario.eavesdroppers
            ]
        )
        self.cruise_speed = max_range_speed(scenario.aero)

    # -- shared (continuous-only) part -------------------------------------

    def _swarm_terms(self, pos: np.ndarray, uvaa_w: np.ndarray):
        """Phase-III SNR terms for every device; depends only on continuous blocks."""
        sc = self.scenario
        t = sc.n_devices
        centers = pos.mean(axis=0)                      # (T, 3)
        off = np.transpose(pos - centers[None], (1, 0, 2)).copy()  # (T, K, 3)
        dvec = sc.devices - centers
        ddist = np.linalg.norm(dvec, axis=1)
        du = dvec / ddist[:, None]
        evec = sc.eavesdroppers[None, :, :] - centers[:, None, :]   # (T, E, 3)
        eu = evec / np.linalg.norm(evec, axis=2, keepdims=True)

        w = uvaa_w.T.copy()                             # (T, K)
        wmax = w.max(axis=1)
        degenerate = wmax <= 0.0
        w = w / np.where(degenerate, 1.0, wmax)[:, None]
        psi = -self.cp * np.einsum("tkc,tc->tk", off, du)
        wt = w * np.exp(1j * psi)                       # steered weights
        # Grid pattern in single precision after double-precision phase
        # reduction: ~1e-6 relative on the gains, far below the quadrature's
        # own discretization error, and several times faster than f64 trig.
        phases = (self.cp / (2.0 * math.pi)) * (off @ self.quad.dirs.T)  # (T, K, G) in turns
        phases -= np.floor(phases)
        phases *= 2.0 * math.pi
        p32 = phases.astype(np.float32)
        cosp = np.cos(p32)
        sinp = np.sin(p32, out=p32)
        wr = np.ascontiguousarray(wt.real, dtype=np.float32)[:, None, :]
        wi = np.ascontiguousarray(wt.imag, dtype=np.float32)[:, None, :]
        af_re = ((wr @ cosp)[:, 0, :] - (wi @ sinp)[:, 0, :]).astype(np.float64)
        af_im = ((wr @ sinp)[:, 0, :] + (wi @ cosp)[:, 0, :]).astype(np.float64)
        denom = (af_re * af_re + af_im * af_im) @ self.quad.weights  # (T,)
        denom = np.where(degenerate, 1.0, denom)
        sum_w = w.sum(axis=1)                           # |AF| toward the device, exactly
        g_dev = np.where(degenerate, 0.0, 4.0 * math.pi * sum_w**2 * self.eta_uvaa / denom)
        af_e = np.einsum("tke,tk->te", np.exp(1j * (self.cp * np.einsum("tkc,tec->tke", off, eu))), wt)
        g_e = 4.0 * math.pi * (af_e.real**2 + af_e.imag**2) * self.eta_uvaa / denom[:, None]
        g_e = np.where(degenerate[:, None], 0.0, g_e)

        ch = sc.channel
        h_c2d = np.array(
            [channel_gain(LinkKind.A2G, link_geometry(centers[d], sc.devices[d]), ch) for d in range(t)]
        )
        h_c2e = np.array(
            [
                [channel_gain(LinkKind.A2G, link_geometry(centers[d], e), ch) for e in sc.eavesdroppers]
                for d in range(t)
            ]
        )
        gamma_c2d = sc.uvaa_power * g_dev * h_c2d / self.sigma2
        gamma_c2e = sc.uvaa_power * g_e * h_c2e / self.sigma2
        return gamma_c2d, gamma_c2e, degenerate

    # -- receiver-dependent part --------------------------------------------

    def _station_terms(self, paa_w: np.ndarray, pos: np.ndarray, recv: np.ndarray,
                       memo: dict | None = None):
        """Phase-I and phase-II SNR terms; depends on the receiver choice.

        ``memo`` caches per-(service, receiver) results so an offspring pair
        sharing its continuous blocks does not redo identical services.
        """
        sc = self.scenario
        ch = sc.channel
        t = sc.n_devices
        gamma_s2u = np.empty(t)
        gamma_s2e = np.empty((t, sc.n_eaves))
        gamma_u2e = np.empty((t, sc.n_eaves))
        degenerate = np.zeros(t, dtype=bool)
        for d in range(t):
            if memo is not None and (d, recv[d]) in memo:
                gamma_s2u[d], gamma_s2e[d], gamma_u2e[d], degenerate[d] = memo[(d, recv[d])]
                continue
            w = paa_w[:, d]
            upos = pos[recv[d] - 1, d]
            wmax = float(w.max(initial=0.0))
            if wmax <= 0.0:
                degenerate[d] = True
                g0 = 0.0
                g_e = np.zeros(sc.n_eaves)
            else:
                wn = w / wmax
                delta = upos - self.paa_center
                u = delta / np.linalg.norm(delta)
                wt = wn * np.exp(-1j * self.cp * (self.paa_offsets @ u))
                af = self._paa_grid @ wt
                denom = float((af.real * af.real + af.imag * af.imag) @ self.quad.weights)
                g0 = 4.0 * math.pi * float(wn.sum()) ** 2 * self.eta_paa / denom
                af_e = self._paa_eaves_resp @ wt
                g_e = 4.0 * math.pi * (af_e.real**2 + af_e.imag**2) * self.eta_paa / denom
            gamma_s2u[d] = (
                sc.mbs_power * g0
                * channel_gain(LinkKind.G2A, link_geometry(self.paa_center, upos), ch)
                / self.sigma2
            )
            gamma_s2e[d] = sc.mbs_power * g_e * self._h_s2e / self.sigma2
            gamma_u2e[d] = np.array(
                [
                    sc.uav_power * channel_gain(LinkKind.A2G, link_geometry(upos, e), ch) / self.sigma2
                    for e in sc.eavesdroppers
                ]
            )
            if memo is not None:
                memo[(d, recv[d])] = (gamma_s2u[d], gamma_s2e[d].copy(),
                                      gamma_u2e[d].copy(), degenerate[d])
        return gamma_s2u, gamma_s2e, gamma_u2e, degenerate

    # -- assembly -------------------------------------------------------------

    def _finish(self, sol: Solution, swarm, station) -> EvaluatedSolution:
        sc = self.scenario
        gamma_c2d, gamma_c2e, degen_u = swarm
        gamma_s2u, gamma_s2e, gamma_u2e, degen_p = station
        bottleneck = np.minimum(gamma_s2u, gamma_c2d)
        f1 = float(self.bandwidth * np.log2(1.0 + bottleneck).sum())
        gammas = gamma_s2e + gamma_u2e + gamma_c2e    # (T, E)
        f2 = sum(
            combine_eaves_rate(gammas[d], sc.eaves_mode, self.bandwidth)
            for d in range(sc.n_devices)
        )
        f3 = swarm_travel_energy(sol.pos, sc.uav_init, sol.order, sc.aero, self.cruise_speed)
        violation = constraint_violation(sol.pos, sc.d_min_uav)
        return EvaluatedSolution(
            solution=sol,
            objectives=np.array([-f1, f2, f3]),
            feasible=violation == 0.0,
            violation=violation,
            degenerate=bool(degen_u.any() or degen_p.any()),
        )

    def evaluate(self, sol: Solution) -> EvaluatedSolution:
        swarm = self._swarm_terms(sol.pos, sol.uvaa_w)
        station = self._station_terms(sol.paa_w, sol.pos, sol.recv)
        return self._finish(sol, swarm, station)

    def evaluate_pair(self, a: Solution, b: Solution):
        """Evaluate two offspring sharing identical continuous blocks."""
        swarm = self._swarm_terms(a.pos, a.uvaa_w)
        memo: dict = {}
        ea = self._finish(a, swarm, self._station_terms(a.paa_w, a.pos, a.recv, memo))
        eb = self._finish(b, swarm, self._station_terms(b.paa_w, b.pos, b.recv, memo))
        return ea, eb


def evaluate(sol: Solution, scenario: Scenario, quad: GainQuadrature) -> EvaluatedSolution:
    """One-off evaluation; optimization loops should hold an :class:`Evaluator`."""
    return Evaluator(scenario, quad).evaluate(sol)
