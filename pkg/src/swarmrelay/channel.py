"""Expected channel power gains for ground/air link classes.

Air-involved links blend line-of-sight and non-line-of-sight path loss with an
elevation-angle logistic probability; the ground-to-ground wiretap link uses a
single steeper exponent.  All gains are linear-scale expectations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .scenario import ChannelParams

REFERENCE_DISTANCE = 1.0  # m


class LinkKind(Enum):
    G2A = "g2a"   # station -> UAV
    A2G = "a2g"   # swarm/UAV -> device or eavesdropper
    G2G = "g2g"   # station -> eavesdropper


@dataclass(frozen=True)
class LinkGeometry:
    dv: float        # vertical separation [m]
    dh: float        # horizontal separation [m]
    d: float         # 3D separation [m]
    zeta_deg: float  # elevation angle [deg], 90 when dh = 0


def link_geometry(sender, receiver) -> LinkGeometry:
    """Geometry between two points; elevation angle measured from horizontal."""
    p = np.asarray(sender, dtype=float)
    q = np.asarray(receiver, dtype=float)
    dv = abs(q[2] - p[2])
    dh = math.hypot(q[0] - p[0], q[1] - p[1])
    d = math.sqrt(dv * dv + dh * dh)
    zeta = 90.0 if dh == 0.0 else math.degrees(math.atan2(dv, dh))
    return LinkGeometry(dv=dv, dh=dh, d=d, zeta_deg=zeta)


def los_probability(geom: LinkGeometry, ch: ChannelParams) -> float:
    """Logistic LoS probability in the elevation angle (degrees); in (0, 1)."""
    return 1.0 / (1.0 + ch.a * math.exp(-ch.b * (geom.zeta_deg - ch.a)))


def channel_gain(kind: LinkKind, geom: LinkGeometry, ch: ChannelParams) -> float:
    """Expected linear channel power gain for one link.

    Air links blend the LoS and NLoS gains by the LoS probability; ground
    links decay with the ground path-loss exponent.  Distances below the 1 m
    reference are outside the model's domain.
    """
    if geom.d < REFERENCE_DISTANCE:
        raise ValueError(f"link distance {geom.d} m is below the 1 m reference distance")
    if kind is LinkKind.G2G:
        return ch.beta0 * geom.d ** (-ch.alpha_g2g)
    p_los = los_probability(geom, ch)
    h_los = ch.beta0 * geom.d ** (-ch.alpha_los)
    h_nlos = ch.mu * ch.beta0 * geom.d ** (-ch.alpha_nlos)
    return p_los * h_los + (1.0 - p_los) * h_nlos
