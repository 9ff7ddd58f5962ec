"""Fixed relay baselines evaluated on the shared scenario and objectives.

The multi-hop baseline strings single-antenna UAVs between the station and the
served device; the static-line baseline parks the swarm on a fixed linear
array and draws random weights.  Both reuse the channel, rate and energy
models so their numbers are directly comparable with optimized results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .beamforming import GainQuadrature
from .channel import LinkKind, channel_gain, link_geometry
from .energy import leg_energy, max_range_speed
from .link_budget import combine_eaves_rate
from .problem import Evaluator, Solution
from .scenario import Scenario


@dataclass(frozen=True)
class MrsConfig:
    """Hop-by-hop relay chain: UAVs equally spaced between station and device."""

    n_hops: int
    altitude: float | None = None      # default: midpoint of the scenario z-bounds
    hop_powers: tuple | None = None    # per-hop transmit power override [W]

    def validate(self) -> None:
        if self.n_hops < 2:
            raise ValueError("a relay chain needs at least 2 hops")


@dataclass(frozen=True)
class LrsConfig:
    """Static linear array in the middle of the movement space."""

    element_spacing: float = 1.0
    axis: str = "x"

    def validate(self) -> None:
        if self.element_spacing <= 0.0:
            raise ValueError("element_spacing must be positive")
        if self.axis not in ("x", "y"):
            raise ValueError("axis must be 'x' or 'y'")


def mrs_chain(scenario: Scenario, device_idx: int, n_hops: int,
              altitude: float) -> np.ndarray:
    """Relay positions for one device: n equally spaced points along the path."""
    start = scenario.paa_center[:2]
    end = scenario.devices[device_idx][:2]
    fracs = np.arange(1, n_hops + 1) / (n_hops + 1)
    xy = start[None, :] + fracs[:, None] * (end - start)[None, :]
    return np.column_stack([xy, np.full(n_hops, altitude)])


def evaluate_mrs(cfg: MrsConfig, scenario: Scenario) -> dict:
    """Objectives of the multi-hop relay baseline on every device in turn.

    The sum rate is limited by the weakest hop of each chain (all antennas
    omni); the eavesdroppers combine the station link and every hop's
    broadcast; travel energy covers repositioning the chain between devices.
    """
    cfg.validate()
    ch = scenario.channel
    sigma2 = ch.noise_power
    bw = ch.bandwidth
    altitude = cfg.altitude if cfg.altitude is not None else float(scenario.bounds[2].mean())
    powers = np.full(cfg.n_hops, scenario.uav_power)
    if cfg.hop_powers is not None:
        powers = np.asarray(cfg.hop_powers, dtype=float)
        if powers.shape != (cfg.n_hops,):
            raise ValueError("hop_powers must have one entry per hop")
    speed = max_range_speed(scenario.aero)

    h_s2e = np.array(
        [channel_gain(LinkKind.G2G, link_geometry(scenario.paa_center, e), ch)
         for e in scenario.eavesdroppers]
    )
    f1 = 0.0
    f2 = 0.0
    f3 = 0.0
    prev_chain = None
    for d in range(scenario.n_devices):
        chain = mrs_chain(scenario, d, cfg.n_hops, altitude)
        # Bottleneck over station->hop1, hop->hop, hopN->device.
        gammas = [
            scenario.mbs_power
            * channel_gain(LinkKind.G2A, link_geometry(scenario.paa_center, chain[0]), ch)
            / sigma2
        ]
        for j in range(cfg.n_hops - 1):
            gammas.append(
                powers[j] * channel_gain(LinkKind.A2G, link_geometry(chain[j], chain[j + 1]), ch) / sigma2
            )
        gammas.append(
            powers[-1]
            * channel_gain(LinkKind.A2G, link_geometry(chain[-1], scenario.devices[d]), ch)
            / sigma2
        )
        f1 += bw * math.log2(1.0 + min(gammas))

        gamma_e = scenario.mbs_power * h_s2e / sigma2
        for j in range(cfg.n_hops):
            gamma_e = gamma_e + np.array(
                [
                    powers[j] * channel_gain(LinkKind.A2G, link_geometry(chain[j], e), ch) / sigma2
                    for e in scenario.eavesdroppers
                ]
            )
        f2 += combine_eaves_rate(gamma_e, scenario.eaves_mode, bw)

        if prev_chain is not None:
            for j in range(cfg.n_hops):
                f3 += leg_energy(prev_chain[j], chain[j], speed, scenario.aero)
        prev_chain = chain
    return {"f1": f1, "f2": f2, "f3": f3, "n_hops": cfg.n_hops}


def lrs_positions(scenario: Scenario, cfg: LrsConfig) -> np.ndarray:
    """K elements on a line through the center of the movement space."""
    k = scenario.n_uavs
    center = np.array(
        [scenario.bounds[0].mean(), scenario.bounds[1].mean(), scenario.bounds[2].mean()]
    )
    offsets = (np.arange(k) - (k - 1) / 2.0) * cfg.element_spacing
    pos = np.tile(center, (k, 1))
    pos[:, 0 if cfg.axis == "x" else 1] += offsets
    return pos


def evaluate_lrs(cfg: LrsConfig, scenario: Scenario, quad: GainQuadrature,
                 rng: np.random.Generator, draws: int = 100) -> dict:
    """Mean rates of the static-line baseline over random weight/receiver draws.

    The line never moves, so the travel objective is not applicable (zero by
    construction); the line is exempt from the swarm's box and separation
    constraints.
    """
    cfg.validate()
    if draws < 1:
        raise ValueError("draws must be >= 1")
    line = lrs_positions(scenario, cfg)
    fixed = replace(scenario, uav_init=line)  # deliberately unvalidated: baseline geometry
    evaluator = Evaluator(fixed, quad)
    k, t, mn = scenario.n_uavs, scenario.n_devices, scenario.paa.n_elements
    pos = np.repeat(line[:, None, :], t, axis=1)
    f1s = np.empty(draws)
    f2s = np.empty(draws)
    for i in range(draws):
        sol = Solution(
            paa_w=rng.random((mn, t)),
            recv=rng.integers(1, k + 1, size=t),
            uvaa_w=rng.random((k, t)),
            pos=pos,
            order=np.arange(1, t + 1),
        )
        ev = evaluator.evaluate(sol)
        f1s[i] = ev.f1
        f2s[i] = ev.f2
    return {
        "f1_mean": float(f1s.mean()),
        "f2_mean": float(f2s.mean()),
        "f1_draws": f1s,
        "f2_draws": f2s,
        "spacing": cfg.element_spacing,
    }
