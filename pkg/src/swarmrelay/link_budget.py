"""Legitimate and wiretap SNRs, and the achievable rates of one relay service.

A service has three phases: the station array transmits to a designated
receiver UAV, the receiver broadcasts inside the swarm (assumed not rate
limiting), and the swarm array forwards to the device.  Eavesdroppers combine
the SNRs they collect across all three phases; several eavesdroppers are
combined per the scenario's collusion mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .beamforming import ArraySpec, Direction, GainQuadrature, direction_between, directional_gains
from .channel import LinkKind, channel_gain, link_geometry
from .scenario import CTSD, OCTD, Scenario


@dataclass(frozen=True, eq=False)
class ServiceContext:
    """Everything needed to rate one service of one device."""

    scenario: Scenario
    device_idx: int            # 0-based index into scenario.devices
    receiver: int              # 1-based UAV index acting as the station's receiver
    uav_positions: np.ndarray  # (K, 3) swarm layout during this service
    paa_weights: np.ndarray    # (rows*cols,) station element weights in [0, 1]
    uvaa_weights: np.ndarray   # (K,) swarm element weights in [0, 1]

    def __post_init__(self):
        k = self.scenario.n_uavs
        if not 1 <= self.receiver <= k:
            raise ValueError(f"receiver must be in [1, {k}] (C2)")
        if not 0 <= self.device_idx < self.scenario.n_devices:
            raise ValueError("device_idx out of range")


@dataclass(frozen=True, eq=False)
class ServiceRates:
    """Rates plus the full SNR breakdown of one service (all SNRs linear)."""

    r_legit: float
    r_eaves: float
    gamma_s2u: float
    gamma_c2d: float
    gamma_s2e: np.ndarray  # (E,) phase-I wiretap SNR per eavesdropper
    gamma_u2e: np.ndarray  # (E,) phase-II wiretap SNR per eavesdropper
    gamma_c2e: np.ndarray  # (E,) phase-III wiretap SNR per eavesdropper
    degenerate: bool       # some array column radiated nothing

    @property
    def gamma_eaves(self) -> np.ndarray:
        """Per-eavesdropper combined SNR across the three phases."""
        return self.gamma_s2e + self.gamma_u2e + self.gamma_c2e


def combine_eaves_rate(gammas: np.ndarray, mode: str, bandwidth: float) -> float:
    """Eavesdropping rate for per-eavesdropper SNRs under a collusion mode."""
    gammas = np.atleast_1d(np.asarray(gammas, dtype=float))
    if gammas.size == 0:
        raise ValueError("at least one eavesdropper SNR is required")
    if mode == CTSD:
        return bandwidth * math.log2(1.0 + float(gammas.sum()))
    if mode == OCTD:
        return bandwidth * math.log2(1.0 + float(gammas.max()))
    raise ValueError(f"unknown eavesdropper mode {mode!r}")


def _wiretap_phase2(ctx: ServiceContext) -> np.ndarray:
    """SNR of the receiver UAV's omni broadcast at each eavesdropper."""
    sc = ctx.scenario
    upos = ctx.uav_positions[ctx.receiver - 1]
    sigma2 = sc.channel.noise_power
    return np.array(
        [
            sc.uav_power * channel_gain(LinkKind.A2G, link_geometry(upos, e), sc.channel) / sigma2
            for e in sc.eavesdroppers
        ]
    )


def _station_side(ctx: ServiceContext, quad: GainQuadrature):
    """Phase-I SNRs: station -> receiver UAV and station -> eavesdroppers."""
    sc = ctx.scenario
    ch = sc.channel
    sigma2 = ch.noise_power
    center = sc.paa_center
    upos = ctx.uav_positions[ctx.receiver - 1]
    e_dirs = [direction_between(center, e) for e in sc.eavesdroppers]
    degenerate = float(ctx.paa_weights.max(initial=0.0)) <= 0.0
    if degenerate:
        g0 = 0.0
        g_e = np.zeros(sc.n_eaves)
    else:
        spec = ArraySpec(sc.paa.element_offsets(), ctx.paa_weights, ch.wavelength)
        target = direction_between(center, upos)
        gains = directional_gains(spec, target, [target] + e_dirs, quad)
        g0, g_e = gains[0], gains[1:]
    gamma_s2u = sc.mbs_power * g0 * channel_gain(LinkKind.G2A, link_geometry(center, upos), ch) / sigma2
    h_s2e = np.array(
        [channel_gain(LinkKind.G2G, link_geometry(center, e), ch) for e in sc.eavesdroppers]
    )
    gamma_s2e = sc.mbs_power * g_e * h_s2e / sigma2
    return gamma_s2u, gamma_s2e, degenerate


def _swarm_side(ctx: ServiceContext, quad: GainQuadrature):
    """Phase-III SNRs: swarm array -> device and swarm array -> eavesdroppers."""
    sc = ctx.scenario
    ch = sc.channel
    sigma2 = ch.noise_power
    center = ctx.uav_positions.mean(axis=0)
    dev = sc.devices[ctx.device_idx]
    e_dirs = [direction_between(center, e) for e in sc.eavesdroppers]
    degenerate = float(ctx.uvaa_weights.max(initial=0.0)) <= 0.0
    if degenerate:
        g0 = 0.0
        g_e = np.zeros(sc.n_eaves)
    else:
        offsets = ctx.uav_positions - center
        spec = ArraySpec(offsets, ctx.uvaa_weights, ch.wavelength)
        target = direction_between(center, dev)
        gains = directional_gains(spec, target, [target] + e_dirs, quad)
        g0, g_e = gains[0], gains[1:]
    gamma_c2d = sc.uvaa_power * g0 * channel_gain(LinkKind.A2G, link_geometry(center, dev), ch) / sigma2
    h_c2e = np.array(
        [channel_gain(LinkKind.A2G, link_geometry(center, e), ch) for e in sc.eavesdroppers]
    )
    gamma_c2e = sc.uvaa_power * g_e * h_c2e / sigma2
    return gamma_c2d, gamma_c2e, degenerate


def legit_rate(ctx: ServiceContext, quad: GainQuadrature):
    """Rate of the relayed station -> device service [bps], with its SNR pair.

    The end-to-end SNR is the bottleneck of phases I and III; the intra-swarm
    broadcast is assumed not rate limiting.
    """
    sc = ctx.scenario
    gamma_s2u, _, degen_p = _station_side(ctx, quad)
    gamma_c2d, _, degen_u = _swarm_side(ctx, quad)
    rate = sc.channel.bandwidth * math.log2(1.0 + min(gamma_s2u, gamma_c2d))
    return rate, {
        "gamma_s2u": gamma_s2u,
        "gamma_c2d": gamma_c2d,
        "degenerate": degen_p or degen_u,
    }


def eaves_rate(ctx: ServiceContext, quad: GainQuadrature, mode: str | None = None):
    """Eavesdropping rate [bps] with the per-eavesdropper SNR breakdown."""
    sc = ctx.scenario
    mode = sc.eaves_mode if mode is None else mode
    _, gamma_s2e, _ = _station_side(ctx, quad)
    _, gamma_c2e, _ = _swarm_side(ctx, quad)
    gamma_u2e = _wiretap_phase2(ctx)
    gammas = gamma_s2e + gamma_u2e + gamma_c2e
    rate = combine_eaves_rate(gammas, mode, sc.channel.bandwidth)
    return rate, {
        "gamma_s2e": gamma_s2e,
        "gamma_u2e": gamma_u2e,
        "gamma_c2e": gamma_c2e,
        "gamma_eaves": gammas,
    }


def service_rates(ctx: ServiceContext, quad: GainQuadrature, mode: str | None = None) -> ServiceRates:
    """Both rates of one service, sharing the array-pattern work between them."""
    sc = ctx.scenario
    mode = sc.eaves_mode if mode is None else mode
    gamma_s2u, gamma_s2e, degen_p = _station_side(ctx, quad)
    gamma_c2d, gamma_c2e, degen_u = _swarm_side(ctx, quad)
    gamma_u2e = _wiretap_phase2(ctx)
    gammas = gamma_s2e + gamma_u2e + gamma_c2e
    return ServiceRates(
        r_legit=sc.channel.bandwidth * math.log2(1.0 + min(gamma_s2u, gamma_c2d)),
        r_eaves=combine_eaves_rate(gammas, mode, sc.channel.bandwidth),
        gamma_s2u=gamma_s2u,
        gamma_c2d=gamma_c2d,
        gamma_s2e=gamma_s2e,
        gamma_u2e=gamma_u2e,
        gamma_c2e=gamma_c2e,
        degenerate=degen_p or degen_u,
    )
