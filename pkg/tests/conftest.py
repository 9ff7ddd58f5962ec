import numpy as np
import pytest

from swarmrelay.beamforming import quadrature_from_degrees
from swarmrelay.scenario import default_scenario, generate_scenario


@pytest.fixture(scope="session")
def scenario():
    return default_scenario()


@pytest.fixture(scope="session")
def small_scenario():
    # 6 UAVs and 3 devices keep optimizer-loop tests fast.
    return generate_scenario(5, k=6, t=3)


@pytest.fixture(scope="session")
def quad5():
    return quadrature_from_degrees(5.0)


@pytest.fixture(scope="session")
def quad10():
    return quadrature_from_degrees(10.0)


@pytest.fixture(scope="session")
def quad2():
    return quadrature_from_degrees(2.0)


def random_solution(scenario, rng, spread=3.0):
    """A box-respecting random solution around the initial UAV layout."""
    from swarmrelay.problem import Solution, clamp_repair

    k, t, mn = scenario.n_uavs, scenario.n_devices, scenario.paa.n_elements
    sol = Solution(
        paa_w=rng.random((mn, t)),
        recv=rng.integers(1, k + 1, size=t),
        uvaa_w=rng.random((k, t)),
        pos=np.repeat(scenario.uav_init[:, None, :], t, axis=1)
        + rng.normal(0.0, spread, (k, t, 3)),
        order=rng.permutation(t) + 1,
    )
    return clamp_repair(sol, scenario)
