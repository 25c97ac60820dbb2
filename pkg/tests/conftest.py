import pytest

from heading_consensus import presets, simulate


@pytest.fixture(scope="session", autouse=True)
def warm_integrator():
    # Compile the jitted RK4 kernel once up front so per-test timings measure
    # steady-state cost, not the first-call JIT compilation.
    simulate(presets.torricelli(seed=1), dt=0.1, t_final=0.5, record_every=5)
