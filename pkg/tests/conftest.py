import pytest

from loopdeg.synth import make_mission
from loopdeg.tube import VelocitySamples, build_tube


@pytest.fixture(scope="session")
def fig8_mission():
    return make_mission("figure_eight")


@pytest.fixture(scope="session")
def circle_mission():
    return make_mission("circle")


@pytest.fixture(scope="session")
def lissajous_mission():
    return make_mission("lissajous")


@pytest.fixture(scope="session")
def lawn5_mission():
    return make_mission("lawnmower", rows=5)


@pytest.fixture(scope="session")
def pinch_mission():
    return make_mission("pinch")


@pytest.fixture(scope="session")
def near_miss_mission():
    return make_mission("near_miss")


def constant_tube(vx_lo, vx_hi, vy_mid=0.0, t0=0.0, tf=10.0, slice_width=1.0):
    """Tube whose every slice x-box is exactly [vx_lo, vx_hi], built through
    the public constructor from midpoint samples.  The scalar sigma inflates
    the y component by the same half-width around vy_mid."""
    mx = 0.5 * (vx_lo + vx_hi)
    rx = 0.5 * (vx_hi - vx_lo)
    samples = VelocitySamples(t=[t0, tf], v=[[mx, vy_mid], [mx, vy_mid]], sigma=rx / 2.0)
    return build_tube(samples, slice_width=slice_width)
