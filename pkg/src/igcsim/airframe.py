"""Skid-to-turn airframe: attitude dynamics and the aerodynamic force model.

The attitude state is x1 = (roll, attack, sideslip) with body rates
x2 = (roll rate, yaw rate, pitch rate).  Fin deflections act through a
constant diagonal moment map, so the rate channel is always controllable
for a valid configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GuardError

# Flight-envelope guard on the tan() angles; past this the model terms are
# meaningless and integration aborts rather than emitting garbage.
ATTITUDE_GUARD = 1.2


@dataclass(frozen=True)
class AeroConfig:
    """Constant pursuer mass/propulsion/aero/inertia properties.

    Moment slopes are per-radian coefficients of the standard dimensionless
    moment derivatives; signs are supplied by the scenario (a statically
    unstable airframe is allowed).
    """

    mass: float                # [kg]
    thrust: float              # [N]
    speed: float               # [m/s], held constant
    air_density: float         # [kg/m^3]
    ref_area: float            # [m^2]
    ref_length: float          # [m]
    lift_slope: float          # lift coefficient per attack angle [1/rad]
    side_slope: float          # side-force coefficient per sideslip [1/rad]
    roll_moment_fin: float     # roll moment per aileron [1/rad]
    yaw_moment_beta: float     # yaw moment per sideslip [1/rad]
    yaw_moment_fin: float      # yaw moment per rudder [1/rad]
    pitch_moment_alpha: float  # pitch moment per attack angle [1/rad]
    pitch_moment_fin: float    # pitch moment per elevator [1/rad]
    inertia_x: float           # [kg m^2]
    inertia_y: float           # [kg m^2]
    inertia_z: float           # [kg m^2]

    def __post_init__(self):
        for name in ("mass", "speed", "air_density", "ref_area", "ref_length",
                     "inertia_x", "inertia_y", "inertia_z"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name}: must be > 0, got {value!r}")
        for name in ("roll_moment_fin", "yaw_moment_fin", "pitch_moment_fin"):
            value = getattr(self, name)
            if not math.isfinite(value) or value == 0.0:
                raise ValueError(f"{name}: must be nonzero, got {value!r}")
        for name in ("thrust", "lift_slope", "side_slope", "yaw_moment_beta",
                     "pitch_moment_alpha"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name}: must be finite")

    @property
    def dynamic_pressure(self) -> float:
        """0.5 * rho * V^2 [Pa]; constant because the speed is constant."""
        return 0.5 * self.air_density * self.speed**2

    @property
    def lift_gain(self) -> float:
        """Normal-channel force per attack angle, thrust included [N/rad]."""
        return self.thrust + self.dynamic_pressure * self.ref_area * self.lift_slope

    @property
    def side_gain(self) -> float:
        """Lateral-channel force per sideslip, thrust included [N/rad]."""
        return -self.thrust + self.dynamic_pressure * self.ref_area * self.side_slope


@dataclass(frozen=True)
class AttitudeState:
    """Pursuer attitude angles, body rates, and pitch angle."""

    gamma: float    # roll angle [rad]
    alpha: float    # attack angle [rad]
    beta: float     # sideslip angle [rad], |beta| < pi/2
    omega_x: float  # roll rate [rad/s]
    omega_y: float  # yaw rate [rad/s]
    omega_z: float  # pitch rate [rad/s]
    pitch: float    # pitch angle [rad], |pitch| < pi/2

    def __post_init__(self):
        values = (self.gamma, self.alpha, self.beta,
                  self.omega_x, self.omega_y, self.omega_z, self.pitch)
        if not all(math.isfinite(v) for v in values):
            raise GuardError("attitude state must be finite")
        if abs(self.beta) >= math.pi / 2:
            raise GuardError(f"sideslip {self.beta:.6g} outside (-pi/2, pi/2)")
        if abs(self.pitch) >= math.pi / 2:
            raise GuardError(f"pitch {self.pitch:.6g} outside (-pi/2, pi/2)")

    @property
    def x1(self) -> np.ndarray:
        return np.array([self.gamma, self.alpha, self.beta])

    @property
    def x2(self) -> np.ndarray:
        return np.array([self.omega_x, self.omega_y, self.omega_z])


@dataclass(frozen=True)
class FinDeflections:
    """Aileron, rudder, and elevator deflections [rad]."""

    delta_x: float
    delta_y: float
    delta_z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.delta_x, self.delta_y, self.delta_z])

    @classmethod
    def from_array(cls, u) -> "FinDeflections":
        return cls(float(u[0]), float(u[1]), float(u[2]))

    def clamped(self, limit: float) -> "FinDeflections":
        return FinDeflections(
            min(max(self.delta_x, -limit), limit),
            min(max(self.delta_y, -limit), limit),
            min(max(self.delta_z, -limit), limit),
        )


def f1(x1, cfg: AeroConfig) -> np.ndarray:
    """Drift of the attitude-angle channel [rad/s]."""
    _, alpha, beta = float(x1[0]), float(x1[1]), float(x1[2])
    qs = cfg.dynamic_pressure * cfg.ref_area
    mv = cfg.mass * cfg.speed
    return np.array(
        [
            0.0,
            -(cfg.thrust * math.sin(alpha) + qs * cfg.lift_slope * alpha)
            / (mv * math.cos(beta)),
            (qs * cfg.side_slope * beta - cfg.thrust * math.cos(alpha) * math.sin(beta))
            / mv,
        ]
    )


def g1_series(gamma, alpha, beta, pitch) -> np.ndarray:
    """Broadcastable body-rate-to-attitude-rate mixing matrix, shape (..., 3, 3)."""
    gamma = np.asarray(gamma, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    pitch = np.asarray(pitch, dtype=float)
    tp, tb = np.tan(pitch), np.tan(beta)
    ones = np.ones(np.broadcast_shapes(gamma.shape, alpha.shape, beta.shape, pitch.shape))
    zeros = np.zeros_like(ones)
    row0 = np.stack([ones, -tp * np.cos(gamma) * ones, tp * np.sin(gamma) * ones], axis=-1)
    row1 = np.stack([-tb * np.cos(alpha) * ones, np.sin(alpha) * tb * ones, ones], axis=-1)
    row2 = np.stack([np.sin(alpha) * ones, np.cos(alpha) * ones, zeros], axis=-1)
    return np.stack([row0, row1, row2], axis=-2)


def g1(pitch: float, x1) -> np.ndarray:
    """Body-rate-to-attitude-rate mixing matrix.

    Invertible throughout a reasonable flight domain; determinant is -1
    exactly at zero angles.
    """
    return g1_series(float(x1[0]), float(x1[1]), float(x1[2]), float(pitch))


def f2(x1, x2, cfg: AeroConfig) -> np.ndarray:
    """Drift of the body-rate channel [rad/s^2]."""
    _, alpha, beta = float(x1[0]), float(x1[1]), float(x1[2])
    wx, wy, wz = float(x2[0]), float(x2[1]), float(x2[2])
    qsl = cfg.dynamic_pressure * cfg.ref_area * cfg.ref_length
    jx, jy, jz = cfg.inertia_x, cfg.inertia_y, cfg.inertia_z
    return np.array(
        [
            (jz - jy) / jx * wy * wz,
            qsl * cfg.yaw_moment_beta * beta / jy + (jx - jz) / jy * wx * wz,
            qsl * cfg.pitch_moment_alpha * alpha / jz + (jy - jx) / jz * wx * wy,
        ]
    )


def g2(cfg: AeroConfig) -> np.ndarray:
    """Diagonal fin-effectiveness matrix [rad/s^2 per rad], constant in time."""
    qsl = cfg.dynamic_pressure * cfg.ref_area * cfg.ref_length
    return np.diag(
        [
            qsl * cfg.roll_moment_fin / cfg.inertia_x,
            qsl * cfg.yaw_moment_fin / cfg.inertia_y,
            qsl * cfg.pitch_moment_fin / cfg.inertia_z,
        ]
    )


def lift_side_accels(
    alpha: float,
    beta: float,
    d_lift: float,
    d_side: float,
    cfg: AeroConfig,
    mode: str = "trig",
) -> tuple[float, float]:
    """Velocity-frame normal/lateral accelerations (a_theta, a_psi) [m/s^2].

    ``trig`` evaluates the exact thrust projection; ``linear`` is the
    small-angle model the guidance law is designed against.  d_lift/d_side
    are additive force uncertainties [N].
    """
    qs = cfg.dynamic_pressure * cfg.ref_area
    if mode == "trig":
        a_theta = (cfg.thrust * math.sin(alpha) + qs * cfg.lift_slope * alpha + d_lift) / cfg.mass
        a_psi = (
            -cfg.thrust * math.cos(alpha) * math.sin(beta)
            + qs * cfg.side_slope * beta
            + d_side
        ) / cfg.mass
    elif mode == "linear":
        a_theta = (cfg.lift_gain * alpha + d_lift) / cfg.mass
        a_psi = (cfg.side_gain * beta + d_side) / cfg.mass
    else:
        raise ValueError(f"plant mode must be 'trig' or 'linear', got {mode!r}")
    return a_theta, a_psi


def attitude_derivatives(
    state: AttitudeState, fins: FinDeflections, d1, d2, cfg: AeroConfig
) -> tuple[np.ndarray, np.ndarray, float]:
    """Time derivatives of (x1, x2, pitch) under fin command and disturbances.

    d1 [rad/s] perturbs the angle channel, d2 [rad/s^2] the rate channel.
    Raises GuardError once sideslip or pitch leaves the guard band.
    """
    if abs(state.beta) > ATTITUDE_GUARD:
        raise GuardError(f"sideslip {state.beta:.4g} breached guard {ATTITUDE_GUARD}")
    if abs(state.pitch) > ATTITUDE_GUARD:
        raise GuardError(f"pitch {state.pitch:.4g} breached guard {ATTITUDE_GUARD}")
    x1v = state.x1
    x2v = state.x2
    x1_dot = f1(x1v, cfg) + g1(state.pitch, x1v) @ x2v + np.asarray(d1, dtype=float)
    x2_dot = f2(x1v, x2v, cfg) + g2(cfg) @ fins.as_array() + np.asarray(d2, dtype=float)
    pitch_dot = state.omega_y * math.sin(state.gamma) + state.omega_z * math.cos(state.gamma)
    return x1_dot, x2_dot, pitch_dot
