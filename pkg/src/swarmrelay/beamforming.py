"""Array factors, steering phases and direction-dependent gains.

Both the station's planar array and the swarm's virtual array are sets of
isotropic radiators described by offsets from their center and excitation
weights.  Gains follow the standard directivity ratio: radiated intensity in a
direction over the average intensity, the denominator evaluated by a spherical
quadrature supplied by the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class DegenerateArrayError(ValueError):
    """All excitation weights are zero; the array radiates nothing."""


@dataclass(frozen=True)
class Direction:
    """Elevation from +z in [0, pi] and azimuth in [-pi, pi], radians."""

    theta: float
    phi: float

    def unit_vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])


@dataclass(frozen=True, eq=False)
class ArraySpec:
    """Element offsets from the array center [m], weights in [0, 1], wavelength [m]."""

    offsets: np.ndarray  # (n, 3)
    weights: np.ndarray  # (n,)
    wavelength: float

    def __post_init__(self):
        object.__setattr__(self, "offsets", np.atleast_2d(np.asarray(self.offsets, dtype=float)))
        object.__setattr__(self, "weights", np.atleast_1d(np.asarray(self.weights, dtype=float)))
        if self.offsets.shape[0] != self.weights.shape[0]:
            raise ValueError("offsets and weights must have the same length")
        if self.offsets.shape[0] < 1:
            raise ValueError("an array needs at least one element")

    @property
    def phase_constant(self) -> float:
        return 2.0 * math.pi / self.wavelength


@dataclass(frozen=True, eq=False)
class GainQuadrature:
    """Product rule on a uniform (theta, phi) grid with exact per-cell sin(theta) mass.

    ``weights`` are cell solid angles, so integrating the constant 1 gives 4*pi
    to machine precision and the sphere average of any gain pattern equals the
    antenna efficiency by construction.
    """

    theta: np.ndarray    # (n_theta,) cell midpoints
    phi: np.ndarray      # (n_phi,) cell midpoints
    dirs: np.ndarray     # (n_theta * n_phi, 3) unit vectors, theta-major order
    weights: np.ndarray  # (n_theta * n_phi,) positive cell solid angles
    n_theta: int
    n_phi: int


def make_quadrature(n_theta: int = 90, n_phi: int = 180) -> GainQuadrature:
    if n_theta < 8 or n_phi < 8:
        raise ValueError("quadrature needs at least 8 nodes per angle")
    d_theta = math.pi / n_theta
    d_phi = 2.0 * math.pi / n_phi
    theta = (np.arange(n_theta) + 0.5) * d_theta
    phi = -math.pi + (np.arange(n_phi) + 0.5) * d_phi
    # Exact integral of sin(theta) over each theta cell.
    cell_mass = np.cos(theta - d_theta / 2.0) - np.cos(theta + d_theta / 2.0)
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    dirs = np.stack(
        [
            np.outer(st, cp).ravel(),
            np.outer(st, sp).ravel(),
            np.repeat(ct, n_phi),
        ],
        axis=1,
    )
    weights = np.repeat(cell_mass, n_phi) * d_phi
    return GainQuadrature(theta=theta, phi=phi, dirs=dirs, weights=weights,
                          n_theta=n_theta, n_phi=n_phi)


def quadrature_from_degrees(resolution_deg: float) -> GainQuadrature:
    """Quadrature with roughly ``resolution_deg`` spacing in both angles."""
    return make_quadrature(round(180.0 / resolution_deg), round(360.0 / resolution_deg))


def direction_between(origin, target) -> Direction:
    """Direction of ``target`` as seen from ``origin``."""
    p = np.asarray(origin, dtype=float)
    q = np.asarray(target, dtype=float)
    delta = q - p
    d = float(np.linalg.norm(delta))
    if d == 0.0:
        raise ValueError("cannot take a direction between coincident points")
    return Direction(theta=math.acos(np.clip(delta[2] / d, -1.0, 1.0)),
                     phi=math.atan2(delta[1], delta[0]))


def steering_phases(spec: ArraySpec, target: Direction) -> np.ndarray:
    """Per-element phase offsets that align the array toward ``target``."""
    return -spec.phase_constant * (spec.offsets @ target.unit_vector())


def array_factor(spec: ArraySpec, target: Direction, eval_dir: Direction) -> complex:
    """Complex array response in ``eval_dir`` when steered toward ``target``."""
    psi = steering_phases(spec, target)
    phase = spec.phase_constant * (spec.offsets @ eval_dir.unit_vector())
    return complex(np.sum(spec.weights * np.exp(1j * (psi + phase))))


def grid_array_factor(spec: ArraySpec, target: Direction, quad: GainQuadrature) -> np.ndarray:
    """Array factor on every quadrature node, shape (n_theta * n_phi,)."""
    psi = steering_phases(spec, target)
    phases = spec.phase_constant * (quad.dirs @ spec.offsets.T)  # (G, n)
    return np.exp(1j * phases) @ (spec.weights * np.exp(1j * psi))


def pattern_power_integral(spec: ArraySpec, target: Direction, quad: GainQuadrature) -> float:
    """Total radiated pattern power: integral of |AF|^2 over the sphere."""
    af = grid_array_factor(spec, target, quad)
    return float(np.dot(af.real * af.real + af.imag * af.imag, quad.weights))


def directional_gains(
    spec: ArraySpec,
    target: Direction,
    eval_dirs: list[Direction],
    quad: GainQuadrature,
    eta: float = 1.0,
) -> np.ndarray:
    """Gains toward several directions sharing one pattern-power integral."""
    w_max = float(spec.weights.max(initial=0.0))
    if w_max <= 0.0:
        raise DegenerateArrayError("all excitation weights are zero")
    # Gain is invariant to weight scaling; normalize for numerical range.
    scaled = ArraySpec(spec.offsets, spec.weights / w_max, spec.wavelength)
    denom = pattern_power_integral(scaled, target, quad)
    out = np.empty(len(eval_dirs))
    for i, ed in enumerate(eval_dirs):
        af = array_factor(scaled, target, ed)
        out[i] = 4.0 * math.pi * (af.real * af.real + af.imag * af.imag) * eta / denom
    return out


def array_gain(
    spec: ArraySpec,
    target: Direction,
    eval_dir: Direction,
    quad: GainQuadrature,
    eta: float = 1.0,
) -> float:
    """Linear power gain toward ``eval_dir`` when steered toward ``target``."""
    return float(directional_gains(spec, target, [eval_dir], quad, eta)[0])


def beam_pattern_rows(
    spec: ArraySpec,
    target: Direction,
    quad: GainQuadrature,
    eta: float = 1.0,
    floor_db: float = -60.0,
) -> list[tuple[float, float, float]]:
    """(theta_deg, phi_deg, gain_db) samples over the quadrature grid, for export."""
    w_max = float(spec.weights.max(initial=0.0))
    if w_max <= 0.0:
        raise DegenerateArrayError("all excitation weights are zero")
    scaled = ArraySpec(spec.offsets, spec.weights / w_max, spec.wavelength)
    af = grid_array_factor(scaled, target, quad)
    denom = float(np.dot(af.real * af.real + af.imag * af.imag, quad.weights))
    gains = 4.0 * math.pi * (af.real * af.real + af.imag * af.imag) * eta / denom
    gains_db = 10.0 * np.log10(np.maximum(gains, 10.0 ** (floor_db / 10.0)))
    theta_deg = np.rad2deg(np.repeat(quad.theta, quad.n_phi))
    phi_deg = np.rad2deg(np.tile(quad.phi, quad.n_theta))
    return list(zip(theta_deg.tolist(), phi_deg.tolist(), gains_db.tolist()))
