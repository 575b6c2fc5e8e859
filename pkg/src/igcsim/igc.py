"""Three-stage integrated guidance and control law.

Each stage is the same ISS primitive: cancel the channel drift and add
proportional feedback -(K + 1/(2 delta^2)) on the channel error, which
yields an exponential decay plus a disturbance gain delta/sqrt(2K) on the
channel's lumped disturbance.  Stages consume only current measurements;
no command derivatives are computed anywhere, so there is no filter state
and no explosion of complexity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import airframe, engagement
from .airframe import AeroConfig, AttitudeState, FinDeflections
from .engagement import EngagementState
from .errors import SingularityError

COND_LIMIT = 1e6


@dataclass(frozen=True)
class Gains:
    """Controller coefficients: convergence rates K and attenuation deltas."""

    k0: float      # guidance channel convergence [1/s]
    k1: float      # attitude-angle channel convergence [1/s]
    k2: float      # body-rate channel convergence [1/s]
    delta0: float  # guidance disturbance attenuation
    delta1: float  # attitude disturbance attenuation
    delta2: float  # rate disturbance attenuation

    def __post_init__(self):
        for name in ("k0", "k1", "k2", "delta0", "delta1", "delta2"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name}: must be > 0, got {value!r}")


@dataclass(frozen=True, eq=False)
class IgcDiagnostics:
    """Per-call command and error snapshot for logging and audits."""

    x1_sharp_cmd: np.ndarray  # commanded (attack, sideslip) [rad]
    x1_cmd: np.ndarray        # commanded attitude with zero roll [rad]
    x2_cmd: np.ndarray        # commanded body rates [rad/s]
    eta1: np.ndarray          # attitude tracking error [rad]
    eta2: np.ndarray          # rate tracking error [rad/s]
    cond_g0: float            # condition estimate of the guidance input map
    cond_g1: float            # condition estimate of the rate mixing matrix
    saturated: bool = False


def _gated_inverse(matrix, cond_limit: float, stage: str) -> tuple[np.ndarray, float]:
    """Invert with a Frobenius condition-estimate gate (upper bounds cond_2)."""
    m = np.asarray(matrix, dtype=float)
    try:
        inv = np.linalg.inv(m)
    except np.linalg.LinAlgError:
        raise SingularityError(stage, math.inf, f"{stage}: matrix is exactly singular")
    cond = float(np.sqrt((m * m).sum() * (inv * inv).sum()))
    if not cond < cond_limit:
        raise SingularityError(stage, cond)
    return inv, cond


def condition_estimate(matrix) -> float:
    """Frobenius condition estimate; inf if exactly singular."""
    m = np.asarray(matrix, dtype=float)
    try:
        inv = np.linalg.inv(m)
    except np.linalg.LinAlgError:
        return math.inf
    return float(np.sqrt((m * m).sum() * (inv * inv).sum()))


def iss_control(f, g, x, k: float, delta: float,
                cond_limit: float = COND_LIMIT, stage: str = "iss") -> np.ndarray:
    """Drift-cancelling ISS feedback u = g^-1 (-f - k x - x / (2 delta^2)).

    Dimension-generic; the closed loop x_dot = f + g u + d then satisfies
    ||x(t)|| <= exp(-k t) ||x(0)||
              + delta / sqrt(2 k) * sqrt(1 - exp(-2 k t)) * sup||d||.
    """
    f = np.asarray(f, dtype=float)
    x = np.asarray(x, dtype=float)
    g_inv, _ = _gated_inverse(g, cond_limit, stage)
    return g_inv @ (-f - (k + 0.5 / delta**2) * x)


def alpha_beta_command(state: EngagementState, g0_matrix, gains: Gains,
                       cond_limit: float = COND_LIMIT) -> np.ndarray:
    """Commanded (attack, sideslip) that regulates the LOS rate.

    Cancels only the radial drift -2 (vr / r) x0; the tan(theta_l) cross
    couplings are orthogonal to x0 and are deliberately left alone.
    """
    x0 = state.x0
    drift = (-2.0 * state.vr / state.r) * x0
    return iss_control(drift, g0_matrix, x0, gains.k0, gains.delta0,
                       cond_limit, stage="guidance")


def rate_command(x1, x1_cmd, g1_matrix, f1_vector, gains: Gains,
                 cond_limit: float = COND_LIMIT) -> np.ndarray:
    """Commanded body rates that track the attitude command."""
    eta1 = np.asarray(x1, dtype=float) - np.asarray(x1_cmd, dtype=float)
    return iss_control(f1_vector, g1_matrix, eta1, gains.k1, gains.delta1,
                       cond_limit, stage="rate")


def fin_command(x1, x2, x2_cmd, cfg: AeroConfig, gains: Gains,
                cond_limit: float = COND_LIMIT) -> FinDeflections:
    """Fin deflections that track the body-rate command."""
    eta2 = np.asarray(x2, dtype=float) - np.asarray(x2_cmd, dtype=float)
    u = iss_control(airframe.f2(x1, x2, cfg), airframe.g2(cfg), eta2,
                    gains.k2, gains.delta2, cond_limit, stage="fin")
    return FinDeflections.from_array(u)


def igc_step(eng: EngagementState, att: AttitudeState, cfg: AeroConfig,
             gains: Gains, cond_limit: float = COND_LIMIT,
             delta_max: float | None = None) -> tuple[FinDeflections, IgcDiagnostics]:
    """One pure evaluation of the full guidance-to-fin cascade.

    Roll is commanded to zero (skid-to-turn).  Raises SingularityError
    naming the stage when the guidance or rate map is not invertible at the
    current state.  An optional symmetric fin limit clamps the output and
    flags the diagnostics.
    """
    g0_matrix = engagement.g0(eng, cfg)
    x1_sharp = alpha_beta_command(eng, g0_matrix, gains, cond_limit)
    x1_cmd = np.array([0.0, x1_sharp[0], x1_sharp[1]])
    x1 = att.x1
    eta1 = x1 - x1_cmd

    f1_vector = airframe.f1(x1, cfg)
    g1_matrix = airframe.g1(att.pitch, x1)
    x2_cmd = rate_command(x1, x1_cmd, g1_matrix, f1_vector, gains, cond_limit)
    eta2 = att.x2 - x2_cmd

    fins = fin_command(x1, att.x2, x2_cmd, cfg, gains, cond_limit)
    saturated = False
    if delta_max is not None:
        clamped = fins.clamped(delta_max)
        saturated = clamped != fins
        fins = clamped

    diag = IgcDiagnostics(
        x1_sharp_cmd=x1_sharp,
        x1_cmd=x1_cmd,
        x2_cmd=x2_cmd,
        eta1=eta1,
        eta2=eta2,
        cond_g0=condition_estimate(g0_matrix),
        cond_g1=condition_estimate(g1_matrix),
        saturated=saturated,
    )
    return fins, diag
