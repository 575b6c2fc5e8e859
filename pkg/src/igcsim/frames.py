"""Coordinate-frame transforms between ground, pursuer-velocity, and LOS frames.

All angles are in radians.  The ground frame has x/z horizontal and y up;
elevation angles are measured toward +y and must stay inside (-pi/2, pi/2)
for the frames to be well defined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GuardError

ELEVATION_LIMIT = math.pi / 2


@dataclass(frozen=True)
class VelocityAngles:
    """Direction of the pursuer velocity vector in the ground frame."""

    theta_v: float  # velocity elevation [rad], |theta_v| < pi/2
    psi_v: float    # velocity azimuth [rad]

    def __post_init__(self):
        if not (math.isfinite(self.theta_v) and math.isfinite(self.psi_v)):
            raise GuardError("velocity angles must be finite")
        if abs(self.theta_v) >= ELEVATION_LIMIT:
            raise GuardError(
                f"velocity elevation {self.theta_v:.6g} outside (-pi/2, pi/2)"
            )


@dataclass(frozen=True)
class LosAngles:
    """Direction of the pursuer-to-evader sight line in the ground frame."""

    theta_l: float  # LOS elevation [rad], |theta_l| < pi/2
    phi_l: float    # LOS azimuth [rad]

    def __post_init__(self):
        if not (math.isfinite(self.theta_l) and math.isfinite(self.phi_l)):
            raise GuardError("LOS angles must be finite")
        if abs(self.theta_l) >= ELEVATION_LIMIT:
            raise GuardError(
                f"LOS elevation {self.theta_l:.6g} outside (-pi/2, pi/2)"
            )


def _axis_rotation(psi: float, theta: float) -> np.ndarray:
    """Ground-to-rotated-frame matrix for an azimuth/elevation pair."""
    cp, sp = math.cos(psi), math.sin(psi)
    ct, st = math.cos(theta), math.sin(theta)
    return np.array(
        [
            [ct * cp, st, -ct * sp],
            [-st * cp, ct, st * sp],
            [sp, 0.0, cp],
        ]
    )


def velocity_dcm(angles: VelocityAngles) -> np.ndarray:
    """Direction cosine matrix from the ground frame to the velocity frame.

    Orthogonal for every angle pair; rows are the velocity-frame axes
    expressed in ground coordinates.
    """
    return _axis_rotation(angles.psi_v, angles.theta_v)


def los_dcm(angles: LosAngles) -> np.ndarray:
    """Direction cosine matrix from the ground frame to the LOS frame.

    Uses the same azimuth/elevation template as :func:`velocity_dcm`,
    evaluated at (phi_l - pi/2, theta_l).
    """
    return _axis_rotation(angles.phi_l - ELEVATION_LIMIT, angles.theta_l)


def projection_matrix_series(theta_l, phi_l, theta_v, psi_v) -> np.ndarray:
    """Broadcastable 2x2 map from velocity-frame lateral/normal acceleration
    to the two LOS angular channels.

    Accepts scalars or equal-shape arrays; returns shape (..., 2, 2).
    Singular exactly when the velocity is orthogonal to the LOS.
    """
    theta_l = np.asarray(theta_l, dtype=float)
    d = np.asarray(phi_l, dtype=float) - np.asarray(psi_v, dtype=float)
    theta_v = np.asarray(theta_v, dtype=float)
    stl, ctl = np.sin(theta_l), np.cos(theta_l)
    stv, ctv = np.sin(theta_v), np.cos(theta_v)
    sd, cd = np.sin(d), np.cos(d)
    row0 = np.stack([stl * stv * sd + ctl * ctv, -stl * cd], axis=-1)
    row1 = np.stack([-stv * cd, -sd], axis=-1)
    return np.stack([row0, row1], axis=-2)


def projection_matrix(los: LosAngles, vel: VelocityAngles) -> np.ndarray:
    """2x2 matrix mapping (a_theta, a_psi) into the LOS angular channels."""
    return projection_matrix_series(los.theta_l, los.phi_l, vel.theta_v, vel.psi_v)


def accel_velocity_to_los(
    accel, los: LosAngles, vel: VelocityAngles
) -> np.ndarray:
    """Map a velocity-frame acceleration (a_v, a_theta, a_psi) into the LOS
    frame, returning (radial, elevation-channel, azimuth-channel) [m/s^2].

    The azimuth channel carries a sign flip relative to the raw frame
    composition; this is the same convention :func:`projection_matrix` uses.
    """
    composed = los_dcm(los) @ velocity_dcm(vel).T
    w = composed @ np.asarray(accel, dtype=float)
    return np.array([w[0], w[1], -w[2]])


def los_unit_vector(los: LosAngles) -> np.ndarray:
    """Unit vector along the LOS in ground coordinates."""
    ct = math.cos(los.theta_l)
    return np.array(
        [ct * math.sin(los.phi_l), math.sin(los.theta_l), ct * math.cos(los.phi_l)]
    )


def velocity_unit_vector(vel: VelocityAngles) -> np.ndarray:
    """Unit vector along the pursuer velocity in ground coordinates."""
    ct = math.cos(vel.theta_v)
    return np.array(
        [ct * math.cos(vel.psi_v), math.sin(vel.theta_v), -ct * math.sin(vel.psi_v)]
    )


def los_velocity_cosine(los: LosAngles, vel: VelocityAngles) -> float:
    """Cosine of the angle between the LOS and the pursuer velocity.

    Equals |det| of :func:`projection_matrix` up to sign, which makes it the
    natural invertibility diagnostic for the guidance channel.
    """
    return float(los_unit_vector(los) @ velocity_unit_vector(vel))
