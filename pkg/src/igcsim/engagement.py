"""Relative pursuit-evasion kinematics in spherical LOS coordinates.

The regulated output is the LOS-rate pair x0 = (elevation rate,
azimuth rate * cos(elevation)); driving it to zero puts the pursuer on a
collision course.  Evader acceleration and model uncertainties are
deterministic closed-form signals so that disturbance suprema are exactly
reproducible for bound audits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import frames
from .airframe import AeroConfig
from .errors import GuardError, SingularityError

# tan(theta_l) and 1/cos(theta_v) blow up toward pi/2; abort integration
# at the same envelope bound the airframe uses.
LOS_GUARD = 1.2

# |cos(LOS, velocity)| below which the guidance channel is declared singular.
GEOMETRY_SINGULARITY = 1e-9


@dataclass(frozen=True)
class EngagementState:
    """Relative geometry, LOS rates, and pursuer velocity direction."""

    r: float        # range [m], > 0
    vr: float       # range rate [m/s]
    theta_l: float  # LOS elevation [rad]
    phi_l: float    # LOS azimuth [rad]
    x01: float      # LOS elevation rate [rad/s]
    x02: float      # LOS azimuth rate * cos(elevation) [rad/s]
    theta_v: float  # velocity elevation [rad]
    psi_v: float    # velocity azimuth [rad]

    def __post_init__(self):
        values = (self.r, self.vr, self.theta_l, self.phi_l,
                  self.x01, self.x02, self.theta_v, self.psi_v)
        if not all(math.isfinite(v) for v in values):
            raise GuardError("engagement state must be finite")
        if self.r <= 0.0:
            raise GuardError(f"range {self.r:.6g} must be positive")
        if abs(self.theta_l) >= math.pi / 2:
            raise GuardError(f"LOS elevation {self.theta_l:.6g} outside (-pi/2, pi/2)")
        if abs(self.theta_v) >= math.pi / 2:
            raise GuardError(f"velocity elevation {self.theta_v:.6g} outside (-pi/2, pi/2)")

    @property
    def x0(self) -> np.ndarray:
        return np.array([self.x01, self.x02])

    @property
    def los(self) -> frames.LosAngles:
        return frames.LosAngles(self.theta_l, self.phi_l)

    @property
    def vel(self) -> frames.VelocityAngles:
        return frames.VelocityAngles(self.theta_v, self.psi_v)


@dataclass(frozen=True)
class EvaderModel:
    """Bounded evader acceleration in LOS components (radial, elevation, azimuth).

    kind: 'constant' holds the amplitudes, 'step' switches them on at
    step_time, 'weave' is amplitude * sin(frequency * t + phase) per axis.
    """

    kind: str = "constant"
    accel_r: float = 0.0      # [m/s^2]
    accel_theta: float = 0.0  # [m/s^2]
    accel_phi: float = 0.0    # [m/s^2]
    frequency: float = 0.0    # [rad/s], weave only
    phase: float = 0.0        # [rad], weave only
    step_time: float = 0.0    # [s], step only

    def __post_init__(self):
        if self.kind not in ("constant", "step", "weave"):
            raise ValueError(f"kind: must be constant, step, or weave, got {self.kind!r}")
        for name in ("accel_r", "accel_theta", "accel_phi", "frequency", "phase", "step_time"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name}: must be finite")

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([self.accel_r, self.accel_theta, self.accel_phi])


def evader_accel(model: EvaderModel, t: float) -> np.ndarray:
    """Evader acceleration sample (a_r, a_theta, a_phi) [m/s^2] at time t."""
    if model.kind == "constant":
        return model.amplitudes
    if model.kind == "step":
        return model.amplitudes if t >= model.step_time else np.zeros(3)
    return model.amplitudes * math.sin(model.frequency * t + model.phase)


@dataclass(frozen=True)
class AxisSignal:
    """Scalar disturbance generator: zero, constant, or sinusoid."""

    kind: str = "zero"
    amplitude: float = 0.0
    frequency: float = 0.0  # [rad/s]
    phase: float = 0.0      # [rad]

    def __post_init__(self):
        if self.kind not in ("zero", "constant", "sinusoid"):
            raise ValueError(f"kind: must be zero, constant, or sinusoid, got {self.kind!r}")
        for name in ("amplitude", "frequency", "phase"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name}: must be finite")

    def value(self, t: float) -> float:
        if self.kind == "zero":
            return 0.0
        if self.kind == "constant":
            return self.amplitude
        return self.amplitude * math.sin(self.frequency * t + self.phase)


@dataclass(frozen=True)
class VectorSignal:
    """Three-axis disturbance generator with shared frequency and phase."""

    kind: str = "zero"
    amplitude: tuple[float, float, float] = (0.0, 0.0, 0.0)
    frequency: float = 0.0  # [rad/s]
    phase: float = 0.0      # [rad]

    def __post_init__(self):
        if self.kind not in ("zero", "constant", "sinusoid"):
            raise ValueError(f"kind: must be zero, constant, or sinusoid, got {self.kind!r}")
        if len(self.amplitude) != 3 or not all(math.isfinite(a) for a in self.amplitude):
            raise ValueError("amplitude: must be three finite values")
        for name in ("frequency", "phase"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name}: must be finite")

    def value(self, t: float) -> np.ndarray:
        if self.kind == "zero":
            return np.zeros(3)
        amps = np.array(self.amplitude)
        if self.kind == "constant":
            return amps
        return amps * math.sin(self.frequency * t + self.phase)


@dataclass(frozen=True)
class DisturbanceModel:
    """Bounded model uncertainties injected into the truth plant.

    rate [rad/s] perturbs the attitude-angle derivatives, accel [rad/s^2]
    the body-rate derivatives, lift/side [N] the aerodynamic forces.
    """

    rate: VectorSignal = VectorSignal()
    accel: VectorSignal = VectorSignal()
    lift: AxisSignal = AxisSignal()
    side: AxisSignal = AxisSignal()


def f0(state: EngagementState) -> np.ndarray:
    """Drift of the LOS-rate pair [rad/s^2].

    The tan(theta_l) terms are the elevation/azimuth cross couplings; they
    are orthogonal to x0 in the Lyapunov sense and the guidance law leaves
    them uncancelled.
    """
    two_vr_r = 2.0 * state.vr / state.r
    tl = math.tan(state.theta_l)
    return np.array(
        [
            -two_vr_r * state.x01 - state.x02**2 * tl,
            -two_vr_r * state.x02 + state.x01 * state.x02 * tl,
        ]
    )


def g0(state: EngagementState, cfg: AeroConfig) -> np.ndarray:
    """Input map from (attack, sideslip) to the LOS-rate derivatives.

    Built from the small-angle force model; singular when the pursuer
    velocity is orthogonal to the LOS.
    """
    m = frames.projection_matrix(state.los, state.vel)
    # |det| of the projection equals |cos(LOS, velocity)|.
    det_m = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if abs(det_m) < GEOMETRY_SINGULARITY:
        raise SingularityError(
            "guidance", math.inf,
            f"guidance: velocity orthogonal to LOS (|cos| = {abs(det_m):.3g})",
        )
    return -(m * np.array([cfg.lift_gain, cfg.side_gain])) / (cfg.mass * state.r)


def relative_derivatives(
    state: EngagementState, accel_pursuer, accel_evader
) -> tuple[float, float, float, float, float, float]:
    """Time derivatives (r, vr, theta_l, phi_l, x01, x02) of the relative motion.

    Both acceleration arguments are LOS-frame triples (radial, elevation
    channel, azimuth channel) [m/s^2].
    """
    if abs(state.theta_l) > LOS_GUARD:
        raise GuardError(f"LOS elevation {state.theta_l:.4g} breached guard {LOS_GUARD}")
    a_p = np.asarray(accel_pursuer, dtype=float)
    a_e = np.asarray(accel_evader, dtype=float)
    drift = f0(state)
    r_dot = state.vr
    vr_dot = state.r * (state.x01**2 + state.x02**2) + a_e[0] - a_p[0]
    theta_l_dot = state.x01
    phi_l_dot = state.x02 / math.cos(state.theta_l)
    x01_dot = drift[0] + (a_e[1] - a_p[1]) / state.r
    x02_dot = drift[1] + (a_e[2] - a_p[2]) / state.r
    return r_dot, vr_dot, theta_l_dot, phi_l_dot, x01_dot, x02_dot


def velocity_angle_derivatives(
    a_theta: float, a_psi: float, cfg: AeroConfig, theta_v: float
) -> tuple[float, float]:
    """Rates of the velocity elevation/azimuth under the frame accelerations."""
    if abs(theta_v) > LOS_GUARD:
        raise GuardError(f"velocity elevation {theta_v:.4g} breached guard {LOS_GUARD}")
    return a_theta / cfg.speed, -a_psi / (cfg.speed * math.cos(theta_v))
