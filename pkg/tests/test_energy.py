import numpy as np
import pytest

from swarmrelay.energy import (
    OverheadParams,
    default_overhead_params,
    leg_energy,
    max_range_speed,
    mean_transmissions,
    propulsion_power,
    scheduling_overhead,
    swarm_travel_energy,
)
from swarmrelay.scenario import AeroParams

AERO = AeroParams()


def test_hover_power_is_sum_of_constants():
    assert propulsion_power(0.0, AERO) == pytest.approx(79.86 + 88.63, rel=1e-12)
    assert propulsion_power(0.0, AERO) == pytest.approx(168.49)


def test_power_curve_shape():
    # classic rotary-wing bathtub: dips below hover at mid speed, then the
    # cubic parasite term dominates
    p0, p30, p60, p90 = (propulsion_power(v, AERO) for v in (0.0, 30.0, 60.0, 90.0))
    assert p30 < p0          # mid-speed dip
    assert p90 > p60 > p0    # cubic growth takes over


def test_negative_speed_rejected():
    with pytest.raises(ValueError):
        propulsion_power(-1.0, AERO)


def test_max_range_speed_is_local_minimum_of_energy_per_meter():
    v = max_range_speed(AERO)
    cost = lambda u: propulsion_power(u, AERO) / u
    assert 1.0 < v < 40.0
    assert cost(v) <= cost(v - 0.5)
    assert cost(v) <= cost(v + 0.5)


def test_leg_energy_zero_displacement():
    assert leg_energy((1, 2, 3), (1, 2, 3), 10.0, AERO) == 0.0


def test_leg_energy_level_flight():
    e = leg_energy((0, 0, 80), (100, 0, 80), 15.0, AERO)
    assert e == pytest.approx(propulsion_power(15.0, AERO) * 100.0 / 15.0, rel=1e-12)


def test_leg_energy_descent_potential_term():
    level = leg_energy((0, 0, 80), (30, 0, 80), 12.0, AERO)
    d = np.linalg.norm([30.0, 0.0, -10.0])
    down = leg_energy((0, 0, 80), (30, 0, 70), 12.0, AERO)
    expected = propulsion_power(12.0, AERO) * d / 12.0 - AERO.mass * AERO.g * 10.0
    assert down == pytest.approx(expected, rel=1e-12)
    assert down < level + 1.0  # potential credit of -196.2 J outweighs the longer path
    assert AERO.mass * AERO.g * 10.0 == pytest.approx(196.2)


def test_leg_energy_floor():
    # a fast long descent earns more potential credit than it burns in
    # propulsion; the optional floor clips the negative total at zero
    raw = leg_energy((0, 0, 170), (1, 0, 70), 12.0, AERO)
    assert raw < 0.0
    assert leg_energy((0, 0, 170), (1, 0, 70), 12.0, AERO, floor_at_zero=True) == 0.0


def test_leg_energy_zero_speed_rejected():
    with pytest.raises(ValueError, match="zero speed"):
        leg_energy((0, 0, 0), (1, 0, 0), 0.0, AERO)


def test_leg_energy_additive_under_split():
    a, b = np.array([0.0, 0.0, 90.0]), np.array([120.0, 40.0, 90.0])
    whole = leg_energy(a, b, 14.0, AERO)
    for frac in (0.25, 0.5, 0.9):
        mid = a + frac * (b - a)
        split = leg_energy(a, mid, 14.0, AERO) + leg_energy(mid, b, 14.0, AERO)
        assert split == pytest.approx(whole, rel=1e-9)


def test_swarm_energy_static_swarm_is_free():
    pos = np.tile(np.array([[10.0, 20.0, 80.0]]), (4, 3, 1)).reshape(4, 3, 3)
    init = pos[:, 0, :]
    assert swarm_travel_energy(pos, init, np.array([1, 2, 3]), AERO, 15.0) == 0.0


def test_swarm_energy_matches_leg_sum():
    init = np.array([[0.0, 0.0, 80.0]])
    pos = np.array([[[100.0, 0.0, 80.0], [200.0, 0.0, 80.0]]])  # 1 UAV, 2 services
    total = swarm_travel_energy(pos, init, np.array([1, 2]), AERO, 15.0)
    legs = leg_energy(init[0], pos[0, 0], 15.0, AERO) + leg_energy(pos[0, 0], pos[0, 1], 15.0, AERO)
    assert total == pytest.approx(legs, rel=1e-12)


def test_swarm_energy_depends_on_visit_order():
    init = np.array([[0.0, 0.0, 80.0]])
    pos = np.array([[[10.0, 0.0, 80.0], [500.0, 0.0, 80.0]]])
    near_first = swarm_travel_energy(pos, init, np.array([1, 2]), AERO, 15.0)
    far_first = swarm_travel_energy(pos, init, np.array([2, 1]), AERO, 15.0)
    assert far_first > near_first


def test_swarm_energy_symmetric_under_relabeling():
    rng = np.random.default_rng(0)
    pos = rng.uniform(0, 100, (5, 4, 3))
    init = rng.uniform(0, 100, (5, 3))
    order = np.array([2, 4, 1, 3])
    base = swarm_travel_energy(pos, init, order, AERO, 15.0)
    perm = rng.permutation(5)
    assert swarm_travel_energy(pos[perm], init[perm], order, AERO, 15.0) == pytest.approx(base, rel=1e-12)


def test_swarm_energy_dimension_mismatch():
    with pytest.raises(ValueError, match="dimensions"):
        swarm_travel_energy(np.zeros((2, 3, 3)), np.zeros((3, 3)), np.array([1, 2, 3]), AERO, 10.0)


# -- scheduling overhead ----------------------------------------------------

def test_mean_transmissions_endpoints():
    assert mean_transmissions(0.0, 3) == 1.0
    assert mean_transmissions(0.5, 3) == pytest.approx(1.75, rel=1e-12)


def test_mean_transmissions_bounds_and_monotonicity():
    for n_retx in (2, 3, 5):
        values = [mean_transmissions(f, n_retx) for f in np.linspace(0.0, 0.99, 25)]
        assert all(1.0 <= v <= n_retx for v in values)
        assert all(a < b for a, b in zip(values, values[1:]))


def test_overhead_energy_worked_example():
    # 16 UAVs, 6x6 array, 8 devices, 5% loss: about 3.4 mJ per scheduling round
    p = default_overhead_params(k=16, n_array_elements=36, t=8)
    assert p.bits_start == 28 * 8
    assert p.bits_fusion == 208 * 8
    assert p.bits_solution == 3272 * 8
    assert p.bits_ack1 == 28 * 8 and p.bits_ack3 == 9 * 8
    e = scheduling_overhead(p)
    assert abs(e - 0.0034) / 0.0034 < 0.05


def test_overhead_energy_increasing_in_loss():
    energies = [
        scheduling_overhead(OverheadParams(loss_prob=f)) for f in (0.0, 0.1, 0.3, 0.6, 0.9)
    ]
    assert all(a < b for a, b in zip(energies, energies[1:]))


def test_overhead_params_validation():
    with pytest.raises(ValueError):
        scheduling_overhead(OverheadParams(loss_prob=1.0))
    with pytest.raises(ValueError):
        scheduling_overhead(OverheadParams(n_retx=0))
