"""Simulation and optimization toolkit for UAV-swarm collaborative secure relaying.

A macro base station with a planar antenna array relays confidential traffic to
remote IoT devices through a swarm of UAVs acting as a virtual antenna array,
while one or more ground eavesdroppers combine what they overhear across the
relay phases.  The package models the channels, array gains, rates and flight
energy, and searches the joint design space (element weights, receiver choice,
UAV positions, service order) with a multi-objective grasshopper optimizer.
"""

__version__ = "0.1.0"

from .scenario import (
    AeroParams,
    ChannelParams,
    PaaGeometry,
    Scenario,
    ScenarioError,
    default_scenario,
    generate_scenario,
    load_scenario,
    save_scenario,
)
from .beamforming import (
    ArraySpec,
    DegenerateArrayError,
    Direction,
    GainQuadrature,
    array_factor,
    array_gain,
    direction_between,
    make_quadrature,
    quadrature_from_degrees,
    steering_phases,
)
from .channel import LinkGeometry, LinkKind, channel_gain, link_geometry, los_probability
from .energy import (
    OverheadParams,
    leg_energy,
    max_range_speed,
    mean_transmissions,
    propulsion_power,
    scheduling_overhead,
    swarm_travel_energy,
)
from .link_budget import ServiceContext, ServiceRates, eaves_rate, legit_rate, service_rates
from .problem import EvaluatedSolution, Evaluator, Solution, clamp_repair, dominates, evaluate
from .moea import (
    Archive,
    crowding_distances,
    dcde_prune,
    hypervolume,
    objective_bounds,
    pareto_filter,
    roulette_select_target,
    update_archive,
)
from .optimizer import OptimizerConfig, RunTrace, run
