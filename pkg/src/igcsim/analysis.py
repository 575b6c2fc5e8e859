"""ISS bound evaluators, small-gain certificates, and trajectory bound audits.

Every channel of the cascade satisfies the same envelope along a closed-loop
trajectory:

    ||x(t)|| <= exp(-K t) ||x(0)||
              + delta / sqrt(2 K) * sqrt(1 - exp(-2 K t)) * sup||d||

with d the channel's lumped disturbance.  The audit replays a simulation
log, reconstructs each channel's disturbance from logged signals (command
derivatives via finite differences), and counts samples where the measured
norm exceeds the envelope beyond a slack covering discretization error.
Disturbance suprema are combined as sums of per-component running suprema,
which upper-bounds the supremum of the sum, so the audit is conservative
and therefore sound as a test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import airframe, frames
from .airframe import AeroConfig
from .igc import Gains

DEFAULT_SLACK = 0.05


@dataclass(frozen=True)
class LinearGain:
    """A linear comparison function s -> coefficient * s."""

    coefficient: float

    def __post_init__(self):
        if not (math.isfinite(self.coefficient) and self.coefficient >= 0.0):
            raise ValueError(f"coefficient: must be >= 0, got {self.coefficient!r}")

    def __call__(self, s: float) -> float:
        return self.coefficient * s


@dataclass(frozen=True, eq=False)
class BoundTrace:
    """Per-sample comparison of a measured channel norm against its envelope."""

    channel: str
    time: np.ndarray
    measured: np.ndarray
    bound: np.ndarray
    violations: int

    def __post_init__(self):
        if not np.all(np.diff(self.time) > 0.0):
            raise ValueError("time: samples must be strictly increasing")

    @property
    def margin(self) -> np.ndarray:
        return self.bound - self.measured

    @property
    def worst_margin(self) -> float:
        return float(self.margin.min())


def theorem2_bound(t, x0_norm: float, k: float, delta: float, d_sup) -> float | np.ndarray:
    """ISS decay-plus-gain envelope for the drift-cancelling controller.

    Vectorized over t (and over a matching running-supremum array d_sup).
    """
    t = np.asarray(t, dtype=float)
    bound = (
        np.exp(-k * t) * x0_norm
        + delta / math.sqrt(2.0 * k) * np.sqrt(1.0 - np.exp(-2.0 * k * t)) * d_sup
    )
    return float(bound) if bound.ndim == 0 else bound


def eta_bound(t, eta0_norm: float, k: float, delta: float, combined_disturbance_sup):
    """Tracking-error envelope; identical in form with the summed disturbance."""
    return theorem2_bound(t, eta0_norm, k, delta, combined_disturbance_sup)


def x0_bound(t, x0_norm_initial: float, gains: Gains, r_m: float, d0_sup, y1_sup):
    """LOS-rate envelope with the evader/force disturbance scaled by 1/r_m."""
    if not r_m > 0.0:
        raise ValueError(f"r_m: must be > 0, got {r_m!r}")
    return theorem2_bound(
        t, x0_norm_initial, gains.k0, gains.delta0, d0_sup / r_m + y1_sup
    )


def linear_gains(gains: Gains, g0_norm: float, g1_norm: float
                 ) -> tuple[LinearGain, LinearGain, LinearGain, LinearGain]:
    """Explicit loop gains of the two interconnections.

    The attitude loop exports g0_norm * delta1 / sqrt(2 K1) toward the
    guidance channel (same coefficient for its disturbance input), and
    the rate loop exports g1_norm * delta2 / sqrt(2 K2).
    """
    c_attitude = g0_norm * gains.delta1 / math.sqrt(2.0 * gains.k1)
    c_rate = g1_norm * gains.delta2 / math.sqrt(2.0 * gains.k2)
    return (
        LinearGain(c_attitude),
        LinearGain(c_attitude),
        LinearGain(c_rate),
        LinearGain(c_rate),
    )


def small_gain_check(loop_gain_a: LinearGain, loop_gain_b: LinearGain
                     ) -> tuple[bool, float]:
    """Contraction test for two interconnected linear gains: product < 1."""
    product = loop_gain_a.coefficient * loop_gain_b.coefficient
    return product < 1.0, 1.0 - product


def spectral_norm(matrix) -> float:
    """Largest singular value."""
    return float(np.linalg.norm(np.asarray(matrix, dtype=float), 2))


def worst_case_g0_norm(cfg: AeroConfig, r_m: float) -> float:
    """Upper bound on the guidance input-map norm over the flight domain.

    The 2x2 projection is a submatrix of an orthogonal composition, so its
    spectral norm never exceeds 1; the worst range is the closest one.
    """
    if not r_m > 0.0:
        raise ValueError(f"r_m: must be > 0, got {r_m!r}")
    return max(abs(cfg.lift_gain), abs(cfg.side_gain)) / (cfg.mass * r_m)


def worst_case_g1_norm(half_width: float = 0.3, points: int = 9) -> float:
    """Grid-scan bound on the rate mixing-matrix norm over the flight domain.

    Scans attack, sideslip, and pitch over [-half_width, half_width] and the
    roll angle over a full turn.
    """
    angles = np.linspace(-half_width, half_width, points)
    rolls = np.linspace(-math.pi, math.pi, 2 * points)
    worst = 0.0
    for pitch in angles:
        for alpha in angles:
            for beta in angles:
                block = airframe.g1_series(rolls, alpha, beta, pitch)
                worst = max(worst, float(np.linalg.norm(block, 2, axis=(-2, -1)).max()))
    return worst


@dataclass(frozen=True)
class GainCertificate:
    """Small-gain contraction record for the two designed interconnections.

    The outer gains of each loop (guidance-side and attitude-side responses
    of the command derivatives) have no closed form; they are supplied by
    the user or estimated by probing, and the certificate labels them as
    estimates.  pass requires both loop products < 1.
    """

    gamma_1y: float          # explicit: attitude loop, command-rate input
    gamma_1u: float          # explicit: attitude loop, disturbance input
    gamma_3y: float          # explicit: rate loop, command-rate input
    gamma_3u: float          # explicit: rate loop, disturbance input
    g0_norm: float
    g1_norm: float
    gamma_0y_est: float | None = None
    gamma_2y_est: float | None = None

    @property
    def attitude_loop_product(self) -> float | None:
        if self.gamma_0y_est is None:
            return None
        return self.gamma_1y * self.gamma_0y_est

    @property
    def rate_loop_product(self) -> float | None:
        if self.gamma_2y_est is None:
            return None
        return self.gamma_3y * self.gamma_2y_est

    @property
    def passed(self) -> bool | None:
        """True/False when both loops are checkable, None when inconclusive."""
        products = (self.attitude_loop_product, self.rate_loop_product)
        if any(p is None for p in products):
            return None
        return all(p < 1.0 for p in products)

    def render(self) -> str:
        lines = [
            "small-gain certificate",
            f"  |g0| bound: {self.g0_norm:.6g}   |g1| bound: {self.g1_norm:.6g}",
            f"  explicit  gamma_1y = gamma_1u = {self.gamma_1y:.12g}",
            f"  explicit  gamma_3y = gamma_3u = {self.gamma_3y:.12g}",
        ]
        for name, est, product in (
            ("guidance/attitude", self.gamma_0y_est, self.attitude_loop_product),
            ("attitude/rate", self.gamma_2y_est, self.rate_loop_product),
        ):
            if est is None:
                lines.append(f"  {name} loop: INCONCLUSIVE (no estimated outer gain)")
            else:
                verdict = "pass" if product < 1.0 else "FAIL"
                lines.append(
                    f"  {name} loop: estimated outer gain {est:.6g}, "
                    f"product {product:.6g}, margin {1.0 - product:.6g} -> {verdict}"
                )
        overall = {True: "PASS", False: "FAIL", None: "INCONCLUSIVE"}[self.passed]
        lines.append(f"  overall: {overall}")
        return "\n".join(lines)


def build_certificate(gains: Gains, g0_norm: float, g1_norm: float,
                      gamma_0y_est: float | None = None,
                      gamma_2y_est: float | None = None) -> GainCertificate:
    g1y, _, g3y, _ = linear_gains(gains, g0_norm, g1_norm)
    return GainCertificate(
        gamma_1y=g1y.coefficient,
        gamma_1u=g1y.coefficient,
        gamma_3y=g3y.coefficient,
        gamma_3u=g3y.coefficient,
        g0_norm=g0_norm,
        g1_norm=g1_norm,
        gamma_0y_est=gamma_0y_est,
        gamma_2y_est=gamma_2y_est,
    )


def _central_differences(series: np.ndarray, dt: float) -> np.ndarray:
    """Columnwise derivative estimate; one-sided at the endpoints."""
    out = np.empty_like(series)
    out[1:-1] = (series[2:] - series[:-2]) / (2.0 * dt)
    out[0] = (series[1] - series[0]) / dt
    out[-1] = (series[-1] - series[-2]) / dt
    return out


def _running_sup(norms: np.ndarray) -> np.ndarray:
    return np.maximum.accumulate(norms)


def bound_audit(log, gains: Gains, cfg: AeroConfig, r_m: float,
                slack: float = DEFAULT_SLACK) -> tuple[tuple[BoundTrace, ...], int]:
    """Channelwise envelope audit of a simulation log.

    Returns one trace per channel (LOS rate, attitude error, rate error) and
    the total violation count; a sample violates when measured exceeds
    bound * (1 + slack).  Command derivatives are estimated by central
    finite differences, so the default slack covers the discretization and
    integration error of a smooth run.
    """
    t = log.t
    n = t.shape[0]
    if n < 3:
        raise ValueError(f"log too short for finite differences: {n} samples")
    steps = np.diff(t)
    dt = steps[0]
    if not np.all(np.abs(steps - dt) <= 1e-9 * max(dt, 1.0)):
        raise ValueError("log timestamps are not uniform")
    if not r_m > 0.0:
        raise ValueError(f"r_m: must be > 0, got {r_m!r}")

    # Guidance channel: disturbance is (evader + force uncertainty)/r plus
    # the attitude tracking error mapped through the input matrix.
    x0 = np.stack([log.x01, log.x02], axis=-1)
    x0_norm = np.linalg.norm(x0, axis=-1)
    proj = frames.projection_matrix_series(log.theta_l, log.phi_l,
                                           log.theta_v, log.psi_v)
    d_force = np.stack([log.lift_dist, log.side_dist], axis=-1) / cfg.mass
    d0 = -np.einsum("nij,nj->ni", proj, d_force) + log.evader[:, 1:3]
    g0_series = -(proj * np.array([cfg.lift_gain, cfg.side_gain])) \
        / (cfg.mass * log.r)[:, None, None]
    eta1_sharp = np.stack([log.alpha - log.alpha_cmd, log.beta - log.beta_cmd], axis=-1)
    y1 = np.einsum("nij,nj->ni", g0_series, eta1_sharp)
    # Keep the 1/r scaling sound even if the final sample dips below r_m.
    r_floor = min(r_m, float(log.r.min()))
    bound_x0 = x0_bound(t, float(x0_norm[0]), gains, r_floor,
                        _running_sup(np.linalg.norm(d0, axis=-1)),
                        _running_sup(np.linalg.norm(y1, axis=-1)))

    # Attitude channel: disturbance is the rate noise, the command
    # derivative, and the rate tracking error mapped through the mixer.
    x1_cmd = np.stack([np.zeros(n), log.alpha_cmd, log.beta_cmd], axis=-1)
    eta1 = np.stack([log.gamma, log.alpha - log.alpha_cmd,
                     log.beta - log.beta_cmd], axis=-1)
    eta1_norm = np.linalg.norm(eta1, axis=-1)
    y0 = -_central_differences(x1_cmd, dt)
    g1_series = airframe.g1_series(log.gamma, log.alpha, log.beta, log.pitch)
    eta2 = log.omega - log.x2_cmd
    y3 = np.einsum("nij,nj->ni", g1_series, eta2)
    combined1 = (
        _running_sup(np.linalg.norm(log.rate_dist, axis=-1))
        + _running_sup(np.linalg.norm(y0, axis=-1))
        + _running_sup(np.linalg.norm(y3, axis=-1))
    )
    bound_eta1 = eta_bound(t, float(eta1_norm[0]), gains.k1, gains.delta1, combined1)

    # Rate channel: disturbance is the moment noise plus the rate-command
    # derivative.
    eta2_norm = np.linalg.norm(eta2, axis=-1)
    y2 = -_central_differences(log.x2_cmd, dt)
    combined2 = (
        _running_sup(np.linalg.norm(log.accel_dist, axis=-1))
        + _running_sup(np.linalg.norm(y2, axis=-1))
    )
    bound_eta2 = eta_bound(t, float(eta2_norm[0]), gains.k2, gains.delta2, combined2)

    traces = []
    total = 0
    for channel, measured, bound in (
        ("los_rate", x0_norm, bound_x0),
        ("attitude_error", eta1_norm, bound_eta1),
        ("rate_error", eta2_norm, bound_eta2),
    ):
        violations = int(np.count_nonzero(measured > bound * (1.0 + slack)))
        total += violations
        traces.append(BoundTrace(channel, t, measured, bound, violations))
    return tuple(traces), total


def estimate_loop_gain(scenario, loop: str, base_amplitude: float,
                       scale: float = 2.0, frequency: float = 2.0) -> LinearGain:
    """Crude probe of an outer loop gain that has no closed form.

    Runs the closed loop twice with a sinusoidal input injected into the
    target channel at two amplitudes, differences the responses of the
    relevant command derivative (so matching transients cancel), and ratios
    the response-difference supremum against the input-supremum difference.
    loop 'guidance' probes the attitude-command derivative against LOS-rate
    forcing; loop 'rate' probes the rate-command derivative against
    attitude-rate forcing.  The scenario must not intercept or breach a
    guard within its horizon: the probe needs a pair of full-length,
    endgame-free trajectories.
    """
    from . import sim as _sim
    from .engagement import EvaderModel, DisturbanceModel, VectorSignal

    if loop not in ("guidance", "rate"):
        raise ValueError(f"loop must be 'guidance' or 'rate', got {loop!r}")
    if not base_amplitude > 0.0 or not scale > 1.0:
        raise ValueError("base_amplitude must be > 0 and scale > 1")

    # Start on the command manifold and strip the scenario's own inputs so
    # the paired responses differ only through the injected signal.
    quiet = _sim.trim_attitude_to_commands(
        replace(scenario, evader=EvaderModel(), disturbances=DisturbanceModel()))
    outputs, inputs = [], []
    for amplitude in (base_amplitude, scale * base_amplitude):
        if loop == "guidance":
            probe = replace(
                quiet,
                evader=EvaderModel(kind="weave", accel_theta=amplitude,
                                   accel_phi=amplitude, frequency=frequency),
            )
        else:
            probe = replace(
                quiet,
                disturbances=DisturbanceModel(
                    rate=VectorSignal(kind="sinusoid",
                                      amplitude=(amplitude, amplitude, amplitude),
                                      frequency=frequency),
                ),
            )
        log, summary = _sim.run(probe)
        if summary.outcome != "timeout":
            raise ValueError(
                f"probe run ended with {summary.outcome!r}; supply a scenario "
                f"whose horizon stays clear of intercept and guards")
        dt = float(log.t[1] - log.t[0])
        if loop == "guidance":
            cmd = np.stack([np.zeros(len(log.t)), log.alpha_cmd, log.beta_cmd], axis=-1)
            forcing = np.linalg.norm(log.evader[:, 1:3], axis=-1) / log.r
        else:
            cmd = log.x2_cmd
            forcing = np.linalg.norm(log.rate_dist, axis=-1)
        # Drop the one-sided finite-difference endpoints.
        outputs.append(_central_differences(cmd, dt)[2:-2])
        inputs.append(float(forcing.max()))
    span = inputs[1] - inputs[0]
    if span <= 0.0:
        raise ValueError("probe inputs did not scale; cannot estimate a slope")
    response = float(np.linalg.norm(outputs[1] - outputs[0], axis=-1).max())
    return LinearGain(response / span)
