import math
from pathlib import Path

import pytest
from hypothesis import settings

from igcsim.airframe import AeroConfig, AttitudeState
from igcsim.engagement import EngagementState
from igcsim.igc import Gains
from igcsim.sim import FullState, Scenario

settings.register_profile("package", deadline=None)
settings.load_profile("package")

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scripts" / "scenarios"


def make_cfg(**overrides) -> AeroConfig:
    values = dict(
        mass=100.0, thrust=2000.0, speed=600.0, air_density=1.0,
        ref_area=0.05, ref_length=1.0, lift_slope=40.0, side_slope=-40.0,
        roll_moment_fin=-5.0, yaw_moment_beta=-10.0, yaw_moment_fin=-15.0,
        pitch_moment_alpha=-10.0, pitch_moment_fin=-15.0,
        inertia_x=10.0, inertia_y=50.0, inertia_z=50.0,
    )
    values.update(overrides)
    return AeroConfig(**values)


def make_gains(**overrides) -> Gains:
    values = dict(k0=2.0, k1=10.0, k2=20.0, delta0=0.5, delta1=0.2, delta2=0.2)
    values.update(overrides)
    return Gains(**values)


def make_initial(**overrides) -> FullState:
    eng = dict(r=4000.0, vr=-500.0, theta_l=0.2, phi_l=0.3,
               x01=0.012, x02=-0.015,
               theta_v=0.24, psi_v=0.3 - math.pi / 2 + 0.05)
    att = dict(gamma=0.0, alpha=0.02, beta=-0.02,
               omega_x=0.0, omega_y=0.0, omega_z=0.0, pitch=0.26)
    for key, value in overrides.items():
        (eng if key in eng else att)[key] = value
    return FullState(engagement=EngagementState(**eng), attitude=AttitudeState(**att))


def make_scenario(**overrides) -> Scenario:
    values = dict(
        cfg=make_cfg(), gains=make_gains(), initial=make_initial(),
        dt=1e-3, t_max=15.0, r_intercept=1.0, r_min=500.0, r_max=10000.0,
        plant_mode="linear",
    )
    values.update(overrides)
    return Scenario(**values)


@pytest.fixture
def cfg() -> AeroConfig:
    return make_cfg()


@pytest.fixture
def gains() -> Gains:
    return make_gains()


@pytest.fixture
def scenario() -> Scenario:
    return make_scenario()
