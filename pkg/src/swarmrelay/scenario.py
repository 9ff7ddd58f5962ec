"""World description: station/array geometry, device and UAV layout, radio and aero parameters.

A :class:`Scenario` is immutable once built and is shared read-only by every
other module.  Scenarios come from three places: the bundled default JSON file,
a user-supplied JSON file, or seeded generation with :func:`generate_scenario`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

SPEED_OF_LIGHT = 299792458.0  # m/s

#: Eavesdropper collusion modes: combine across relay phases only, or
#: additionally pool SNR across spatially separate eavesdroppers.
OCTD = "octd"
CTSD = "ctsd"
EAVES_MODES = (OCTD, CTSD)

DEFAULT_SCENARIO_SEED = 7


class ScenarioError(ValueError):
    """A scenario file failed to parse or violated an invariant."""


@dataclass(frozen=True)
class ChannelParams:
    """Radio channel parameters; dB fields are converted to linear scale once, here."""

    a: float = 9.61             # S-curve midpoint of the LoS-probability model [deg]
    b: float = 0.16             # S-curve slope [1/deg]
    beta0_db: float = -60.0     # channel power gain at the 1 m reference, LoS [dB]
    mu_db: float = -20.0        # extra attenuation under NLoS [dB]
    alpha_los: float = 2.5      # path-loss exponent, LoS
    alpha_nlos: float = 3.5     # path-loss exponent, NLoS
    alpha_g2g: float = 3.5      # path-loss exponent, ground-to-ground
    noise_psd_dbm: float = -174.0  # noise power spectral density [dBm/Hz]
    bandwidth: float = 20e6     # [Hz]
    carrier_freq: float = 2.4e9  # [Hz]

    @property
    def beta0(self) -> float:
        return 10.0 ** (self.beta0_db / 10.0)

    @property
    def mu(self) -> float:
        return 10.0 ** (self.mu_db / 10.0)

    @property
    def noise_power(self) -> float:
        """Noise power over the full transmission band [W]."""
        return 10.0 ** ((self.noise_psd_dbm - 30.0) / 10.0) * self.bandwidth

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_freq

    def validate(self) -> None:
        if self.alpha_g2g <= 2.0:
            raise ScenarioError("channel.alpha_g2g must exceed 2 (G2G path-loss exponent)")
        if self.bandwidth <= 0.0:
            raise ScenarioError("channel.bandwidth must be positive")
        if self.carrier_freq <= 0.0:
            raise ScenarioError("channel.carrier_freq must be positive")


@dataclass(frozen=True)
class AeroParams:
    """Rotary-wing propulsion constants."""

    p_blade: float = 79.86      # blade profile power at hover [W]
    p_induced: float = 88.63    # induced power at hover [W]
    u_tips: float = 120.0       # rotor blade tip speed [m/s]
    u_0: float = 4.03           # mean rotor-induced velocity at hover [m/s]
    d0: float = 0.6             # fuselage drag ratio
    rho: float = 1.225          # air density [kg/m^3]
    s: float = 0.05             # rotor solidity
    area: float = 0.053         # rotor disc area [m^2]
    mass: float = 2.0           # airframe mass [kg]
    g: float = 9.81             # gravitational acceleration [m/s^2]

    def validate(self) -> None:
        for name in ("p_blade", "p_induced", "u_tips", "u_0", "d0", "rho", "s", "area", "mass", "g"):
            if getattr(self, name) <= 0.0:
                raise ScenarioError(f"aero.{name} must be strictly positive")


@dataclass(frozen=True)
class PaaGeometry:
    """Planar antenna array at the base station: a rows x cols grid of isotropic elements."""

    rows: int = 6
    cols: int = 6
    element_spacing: float = 0.5 * SPEED_OF_LIGHT / 2.4e9  # half wavelength [m]
    center: tuple[float, float, float] = (0.0, 0.0, 25.0)
    normal: tuple[float, float, float] = (0.0, 0.0, 1.0)

    @property
    def n_elements(self) -> int:
        return self.rows * self.cols

    def element_offsets(self) -> np.ndarray:
        """Per-element offsets from the array center, shape (rows*cols, 3); zero mean."""
        n = np.asarray(self.normal, dtype=float)
        n = n / np.linalg.norm(n)
        helper = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        u = np.cross(helper, n)
        u = u / np.linalg.norm(u)
        v = np.cross(n, u)
        i = np.arange(self.rows) - (self.rows - 1) / 2.0
        j = np.arange(self.cols) - (self.cols - 1) / 2.0
        grid = (i[:, None, None] * u + j[None, :, None] * v) * self.element_spacing
        return grid.reshape(self.n_elements, 3)

    def validate(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise ScenarioError("paa.rows and paa.cols must be >= 1")
        if self.element_spacing <= 0.0:
            raise ScenarioError("paa.element_spacing must be positive")
        offsets = self.element_offsets()
        if not np.allclose(offsets.sum(axis=0), 0.0, atol=1e-9):
            raise ScenarioError("paa element offsets must sum to zero about the center")


def _check_positions(arr: np.ndarray, label: str) -> np.ndarray:
    arr = np.atleast_2d(np.asarray(arr, dtype=float))
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ScenarioError(f"{label} must be an (n, 3) array of coordinates")
    if not np.all(np.isfinite(arr)):
        raise ScenarioError(f"{label} contains non-finite coordinates")
    if np.any(arr[:, 2] < 0.0):
        raise ScenarioError(f"{label} contains a negative altitude")
    return arr


@dataclass(frozen=True, eq=False)
class Scenario:
    """Immutable world description consumed by every other module."""

    paa: PaaGeometry
    mbs_power: float            # transmit power of the station array [W]
    devices: np.ndarray         # (T, 3) positions of the served terminal devices [m]
    eavesdroppers: np.ndarray   # (E, 3) eavesdropper positions [m]
    uav_init: np.ndarray        # (K, 3) initial UAV positions [m]
    uav_power: float            # per-UAV broadcast power [W]
    uvaa_power: float           # total forward transmit power of the swarm array [W]
    bounds: np.ndarray          # (3, 2) [[xmin, xmax], [ymin, ymax], [zmin, zmax]]
    d_min_uav: float            # minimum pairwise UAV separation [m]
    channel: ChannelParams = field(default_factory=ChannelParams)
    aero: AeroParams = field(default_factory=AeroParams)
    eaves_mode: str = OCTD

    @property
    def n_uavs(self) -> int:
        return self.uav_init.shape[0]

    @property
    def n_devices(self) -> int:
        return self.devices.shape[0]

    @property
    def n_eaves(self) -> int:
        return self.eavesdroppers.shape[0]

    @property
    def paa_center(self) -> np.ndarray:
        return np.asarray(self.paa.center, dtype=float)

    def validate(self) -> None:
        self.paa.validate()
        self.channel.validate()
        self.aero.validate()
        _check_positions(self.devices, "devices")
        _check_positions(self.eavesdroppers, "eavesdroppers")
        _check_positions(self.uav_init, "uav_init")
        if self.n_devices < 1:
            raise ScenarioError("devices must be non-empty")
        if self.n_eaves < 1:
            raise ScenarioError("at least one eavesdropper is required")
        if self.n_uavs < 2:
            raise ScenarioError("a swarm array needs at least 2 UAVs (K >= 2)")
        if self.mbs_power <= 0.0 or self.uav_power <= 0.0 or self.uvaa_power <= 0.0:
            raise ScenarioError("transmit powers must be strictly positive")
        if self.bounds.shape != (3, 2) or np.any(self.bounds[:, 0] >= self.bounds[:, 1]):
            raise ScenarioError("bounds must be (3, 2) with min < max on every axis")
        if self.d_min_uav <= 0.0:
            raise ScenarioError("d_min_uav must be positive")
        if self.eaves_mode not in EAVES_MODES:
            raise ScenarioError(f"eaves_mode must be one of {EAVES_MODES}")
        lo, hi = self.bounds[:, 0], self.bounds[:, 1]
        if np.any(self.uav_init < lo - 1e-9) or np.any(self.uav_init > hi + 1e-9):
            raise ScenarioError("uav_init positions must lie inside bounds (C4-C6)")
        d = _pairwise_distances(self.uav_init)
        if d.size and d.min() < self.d_min_uav - 1e-9:
            raise ScenarioError(
                f"uav_init violates the collision constraint (C9): min pairwise "
                f"distance {d.min():.3f} m < {self.d_min_uav} m"
            )


def _pairwise_distances(points: np.ndarray) -> np.ndarray:
    n = points.shape[0]
    iu = np.triu_indices(n, k=1)
    diff = points[iu[0]] - points[iu[1]]
    return np.linalg.norm(diff, axis=1)


# ---------------------------------------------------------------------------
# JSON serialization.  Schema (all lengths in meters, powers in watts):
#   paa:    {rows, cols, element_spacing, center [3], normal [3]}
#   mbs_power, uav_power, uvaa_power, d_min_uav: numbers
#   devices, eavesdroppers, uav_init: lists of [x, y, z]
#   bounds: {x: [min, max], y: [min, max], z: [min, max]}
#   channel, aero: flat objects matching the dataclass fields
#   eaves_mode: "octd" | "ctsd"
# ---------------------------------------------------------------------------

def scenario_to_dict(sc: Scenario) -> dict:
    return {
        "paa": {
            "rows": sc.paa.rows,
            "cols": sc.paa.cols,
            "element_spacing": sc.paa.element_spacing,
            "center": list(sc.paa.center),
            "normal": list(sc.paa.normal),
        },
        "mbs_power": sc.mbs_power,
        "devices": sc.devices.tolist(),
        "eavesdroppers": sc.eavesdroppers.tolist(),
        "uav_init": sc.uav_init.tolist(),
        "uav_power": sc.uav_power,
        "uvaa_power": sc.uvaa_power,
        "bounds": {
            "x": sc.bounds[0].tolist(),
            "y": sc.bounds[1].tolist(),
            "z": sc.bounds[2].tolist(),
        },
        "d_min_uav": sc.d_min_uav,
        "channel": {k: getattr(sc.channel, k) for k in ChannelParams.__dataclass_fields__},
        "aero": {k: getattr(sc.aero, k) for k in AeroParams.__dataclass_fields__},
        "eaves_mode": sc.eaves_mode,
    }


def scenario_from_dict(data: dict) -> Scenario:
    try:
        paa = PaaGeometry(
            rows=int(data["paa"]["rows"]),
            cols=int(data["paa"]["cols"]),
            element_spacing=float(data["paa"]["element_spacing"]),
            center=tuple(float(x) for x in data["paa"]["center"]),
            normal=tuple(float(x) for x in data["paa"]["normal"]),
        )
        bounds = np.array(
            [data["bounds"]["x"], data["bounds"]["y"], data["bounds"]["z"]], dtype=float
        )
        sc = Scenario(
            paa=paa,
            mbs_power=float(data["mbs_power"]),
            devices=np.asarray(data["devices"], dtype=float),
            eavesdroppers=np.asarray(data["eavesdroppers"], dtype=float),
            uav_init=np.asarray(data["uav_init"], dtype=float),
            uav_power=float(data["uav_power"]),
            uvaa_power=float(data["uvaa_power"]),
            bounds=bounds,
            d_min_uav=float(data["d_min_uav"]),
            channel=ChannelParams(**data.get("channel", {})),
            aero=AeroParams(**data.get("aero", {})),
            eaves_mode=str(data.get("eaves_mode", OCTD)),
        )
    except ScenarioError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"malformed scenario data: {exc}") from exc
    sc.validate()
    return sc


def load_scenario(path: str | Path) -> Scenario:
    """Load and validate a scenario from a JSON file."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"cannot parse scenario file {path}: {exc}") from exc
    return scenario_from_dict(data)


def save_scenario(sc: Scenario, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(scenario_to_dict(sc), fh, indent=2)
        fh.write("\n")


def default_scenario() -> Scenario:
    """The bundled default world: 16 UAVs, 8 remote devices, one eavesdropper."""
    ref = resources.files("swarmrelay.data").joinpath("default_scenario.json")
    with ref.open() as fh:
        return scenario_from_dict(json.load(fh))


def with_eavesdroppers(sc: Scenario, positions: np.ndarray) -> Scenario:
    """A copy of ``sc`` with a different eavesdropper layout."""
    out = replace(sc, eavesdroppers=np.asarray(positions, dtype=float))
    out.validate()
    return out


def with_eaves_mode(sc: Scenario, mode: str) -> Scenario:
    out = replace(sc, eaves_mode=mode)
    out.validate()
    return out


def eaves_positions(seed: int, count: int) -> np.ndarray:
    """Deterministic eavesdropper layout between the swarm area and the devices."""
    if count < 1:
        raise ScenarioError("at least one eavesdropper is required")
    rng = np.random.default_rng(seed)
    az = np.deg2rad(rng.uniform(25.0, 65.0, size=count))
    r = rng.uniform(550.0, 750.0, size=count)
    return np.stack([r * np.cos(az), r * np.sin(az), np.zeros(count)], axis=1)


def generate_scenario(
    seed: int,
    k: int = 16,
    t: int = 8,
    area: float = 100.0,
    n_eaves: int = 1,
    z_bounds: tuple[float, float] = (70.0, 120.0),
    d_min_uav: float = 5.0,
    mbs_power: float = 3.6,
    uav_power: float = 0.1,
    max_tries: int = 10000,
) -> Scenario:
    """Generate a deterministic scenario for a given seed.

    The station sits at the origin with its array 25 m up; UAVs are placed
    uniformly in an ``area x area`` box at 70-120 m altitude with rejection
    sampling until all pairs respect ``d_min_uav``; devices sit on a far arc
    (800-1200 m) and eavesdroppers between the swarm and the devices.
    """
    if k < 2:
        raise ScenarioError("a swarm array needs at least 2 UAVs (K >= 2)")
    if t < 1:
        raise ScenarioError("at least one terminal device is required")
    rng = np.random.default_rng(seed)

    lo = np.array([0.0, 0.0, z_bounds[0]])
    hi = np.array([area, area, z_bounds[1]])
    uavs: list[np.ndarray] = []
    tries = 0
    while len(uavs) < k:
        if tries >= max_tries:
            raise ScenarioError(
                f"could not place {k} UAVs at pairwise >= {d_min_uav} m in a "
                f"{area} m box after {max_tries} tries"
            )
        tries += 1
        cand = rng.uniform(lo, hi)
        if all(np.linalg.norm(cand - p) >= d_min_uav for p in uavs):
            uavs.append(cand)
    uav_init = np.array(uavs)

    # Devices on a far arc in the first quadrant, eavesdroppers in between.
    azimuths = np.deg2rad(np.linspace(10.0, 80.0, t)) + rng.uniform(-0.03, 0.03, size=t)
    radii = rng.uniform(800.0, 1200.0, size=t)
    devices = np.stack(
        [radii * np.cos(azimuths), radii * np.sin(azimuths), np.zeros(t)], axis=1
    )
    e_az = np.deg2rad(rng.uniform(25.0, 65.0, size=n_eaves))
    e_r = rng.uniform(550.0, 750.0, size=n_eaves)
    eaves = np.stack([e_r * np.cos(e_az), e_r * np.sin(e_az), np.zeros(n_eaves)], axis=1)

    sc = Scenario(
        paa=PaaGeometry(),
        mbs_power=mbs_power,
        devices=devices,
        eavesdroppers=eaves,
        uav_init=uav_init,
        uav_power=uav_power,
        uvaa_power=k * uav_power,
        bounds=np.array([[0.0, area], [0.0, area], list(z_bounds)]),
        d_min_uav=d_min_uav,
    )
    sc.validate()
    return sc
