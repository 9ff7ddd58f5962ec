"""Rotary-wing propulsion power, flight-leg energy and control-message overhead."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scenario import AeroParams


def propulsion_power(v: float, aero: AeroParams) -> float:
    """Level-flight propulsion power at speed ``v`` [W]."""
    if v < 0.0:
        raise ValueError("speed must be nonnegative")
    v2 = v * v
    blade = aero.p_blade * (1.0 + 3.0 * v2 / (aero.u_tips * aero.u_tips))
    u04 = aero.u_0 ** 4
    induced = aero.p_induced * math.sqrt(
        math.sqrt(1.0 + v2 * v2 / (4.0 * u04)) - v2 / (2.0 * aero.u_0 * aero.u_0)
    )
    parasite = 0.5 * aero.d0 * aero.rho * aero.s * aero.area * v2 * v
    return blade + induced + parasite


def max_range_speed(aero: AeroParams, lo: float = 1.0, hi: float = 40.0,
                    tol: float = 0.01) -> float:
    """Speed minimizing energy per meter, P(v)/v, by golden-section search."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0

    def cost(v: float) -> float:
        return propulsion_power(v, aero) / v

    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = cost(c), cost(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = cost(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = cost(d)
    return 0.5 * (a + b)


def leg_energy(start, end, speed: float, aero: AeroParams,
               floor_at_zero: bool = False) -> float:
    """Energy for one straight hover-to-hover leg [J].

    Horizontal-model power times flight time plus the potential-energy term;
    the kinetic term vanishes for hover-to-hover legs.  Descending legs can
    come out negative unless ``floor_at_zero`` is set.
    """
    p = np.asarray(start, dtype=float)
    q = np.asarray(end, dtype=float)
    dist = float(np.linalg.norm(q - p))
    if dist == 0.0:
        return 0.0
    if speed <= 0.0:
        raise ValueError("zero speed with nonzero displacement")
    e = propulsion_power(speed, aero) * dist / speed + aero.mass * aero.g * (q[2] - p[2])
    return max(e, 0.0) if floor_at_zero else e


def swarm_travel_energy(
    per_service_pos: np.ndarray,
    initial: np.ndarray,
    order: np.ndarray,
    aero: AeroParams,
    speed: float,
    floor_at_zero: bool = False,
) -> float:
    """Total flight energy for the swarm over one full service round [J].

    ``per_service_pos`` has shape (K, T, 3): column ``d`` is where each UAV
    sits while device ``d+1`` is served.  ``order`` is the 1-based visiting
    sequence of device ids; every UAV flies straight legs from its previous
    spot (initially ``initial``) to its spot for the next served device.
    """
    pos = np.asarray(per_service_pos, dtype=float)
    init = np.asarray(initial, dtype=float)
    order = np.asarray(order, dtype=int)
    k, t = pos.shape[0], pos.shape[1]
    if init.shape != (k, 3) or order.shape != (t,):
        raise ValueError("inconsistent dimensions between positions, initial and order")
    path = np.concatenate([init[:, None, :], pos[:, order - 1, :]], axis=1)  # (K, T+1, 3)
    step = path[:, 1:, :] - path[:, :-1, :]
    dist = np.sqrt((step * step).sum(axis=-1))          # (K, T)
    if np.any(dist > 0.0) and speed <= 0.0:
        raise ValueError("zero speed with nonzero displacement")
    p_over_v = propulsion_power(speed, aero) / speed if speed > 0.0 else 0.0
    legs = np.where(dist > 0.0, p_over_v * dist + aero.mass * aero.g * step[..., 2], 0.0)
    if floor_at_zero:
        legs = np.maximum(legs, 0.0)
    return float(legs.sum())


@dataclass(frozen=True)
class OverheadParams:
    """Sizes and link properties of the control messages that set up one run."""

    n_retx: int = 3            # retransmission cap per critical message
    loss_prob: float = 0.05    # per-round packet loss probability
    bits_start: int = 28 * 8   # swarm start/announce message
    bits_fusion: int = 208 * 8  # aggregated state report to the station
    bits_solution: int = 3272 * 8  # optimized solution broadcast back
    bits_ack1: int = 28 * 8    # per-UAV ack of the start message
    bits_ack3: int = 9 * 8     # per-UAV ack of the solution message
    rate_bps: float = 1e6
    tx_power: float = 0.1      # [W]
    n_uavs: int = 16

    def validate(self) -> None:
        if self.n_retx < 1:
            raise ValueError("n_retx must be >= 1")
        if not 0.0 <= self.loss_prob < 1.0:
            raise ValueError("loss_prob must be in [0, 1)")
        if self.rate_bps <= 0.0:
            raise ValueError("rate_bps must be positive")


def default_overhead_params(k: int = 16, n_array_elements: int = 36, t: int = 8,
                            **kwargs) -> OverheadParams:
    """Message sizes from the 4-byte-field layout for a given system scale."""
    fusion_bytes = (3 * k + 2) * 4 + 8
    solution_bytes = (n_array_elements + 2 + 4 * k) * t * 4 + 8
    return OverheadParams(
        bits_fusion=fusion_bytes * 8,
        bits_solution=solution_bytes * 8,
        n_uavs=k,
        **kwargs,
    )


def mean_transmissions(loss_prob: float, n_retx: int) -> float:
    """Expected transmission count under a retransmission cap; in [1, n_retx]."""
    if loss_prob == 0.0:
        return 1.0
    return (1.0 - loss_prob ** n_retx) / (1.0 - loss_prob)


def scheduling_overhead(p: OverheadParams) -> float:
    """Swarm communication energy spent on one scheduling round [J]."""
    p.validate()
    n_bar = mean_transmissions(p.loss_prob, p.n_retx)
    bits = (p.bits_start + p.bits_fusion + p.bits_solution) * n_bar
    bits += (p.n_uavs - 1) * (p.bits_ack1 + p.bits_ack3)
    return p.tx_power * bits / p.rate_bps
