"""Forced, time-varying Van der Pol oscillator and its corrupted measurements.

The plant is the second-order oscillator

    x'' + eps0(t) * [(x - x_offset)^2 - 1 - (theta - theta_star)^2] * x'
        + mu^2 * (x - x_offset) = force_amp * sin(force_freq * t)

written in first-order form with state (x, y), y = x'.  The damping
coefficient drifts slowly, eps0(t) = eps0_base + drift_amp * sin(drift_freq*t),
and the tuning parameter theta controls the limit-cycle amplitude, which is
minimal at theta == theta_star.  Measurements of both components are corrupted
by a shared additive sinusoidal interference signal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Integration aborts once the state leaves this box; beyond it the trajectory
# is numerically meaningless and would overflow within a few steps.
DIVERGENCE_LIMIT = 1.0e6


class SimulationDivergence(RuntimeError):
    """The integrator produced a non-finite or out-of-bounds state.

    ``last_state`` is the most recent finite state, so callers can salvage
    partial results.  Orchestration code attaches ``partial_log`` /
    ``partial_map`` with whatever was recorded before the abort.
    """

    def __init__(self, last_state: "PlantState"):
        super().__init__(f"simulation diverged after t={last_state.t:.6g} s")
        self.last_state = last_state


@dataclass(frozen=True)
class PlantParams:
    """Constants of the oscillator, its drift, and its forcing."""

    eps0_base: float = 1.0
    drift_amp: float = 1.0
    drift_freq: float = 0.005  # rad/s
    force_amp: float = 2.2
    force_freq: float = 4.5  # rad/s
    mu: float = 1.0  # rad/s, nominal limit-cycle frequency
    x_offset: float = 6.0
    theta_star: float = -3.0
    dt: float = 0.005  # s

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.mu <= 0.0:
            raise ValueError(f"mu must be positive, got {self.mu}")


@dataclass(frozen=True)
class PlantState:
    """True state (position, velocity) plus the simulation clock."""

    x: float
    y: float
    t: float = 0.0


@dataclass(frozen=True)
class InterferenceParams:
    """Additive sinusoidal measurement interference.

    The same scalar i(t) is added to every enabled component; ``on_x`` /
    ``on_y`` allow corrupting only one of them.
    """

    a1: float = 10.5
    a2: float = 11.1
    w1: float = 3.2  # rad/s
    w2: float = 7.8  # rad/s
    enabled: bool = True
    on_x: bool = True
    on_y: bool = True

    def __post_init__(self):
        if self.w1 <= 0.0 or self.w2 <= 0.0:
            raise ValueError("interference frequencies must be positive")


def _deriv(x: float, y: float, t: float, theta: float, p: PlantParams):
    # Kept in this exact form: the compiled kernels replicate it verbatim so
    # both backends produce bit-identical trajectories.
    eps_t = p.eps0_base + p.drift_amp * math.sin(p.drift_freq * t)
    f_t = p.force_amp * math.sin(p.force_freq * t)
    xr = x - p.x_offset
    dth = theta - p.theta_star
    dx = y
    dy = -eps_t * (xr * xr - 1.0 - dth * dth) * y - p.mu * p.mu * xr + f_t
    return dx, dy


def derivative(state: PlantState, theta: float, p: PlantParams):
    """Right-hand side (dx/dt, dy/dt) at the state's own clock time."""
    return _deriv(state.x, state.y, state.t, theta, p)


def step(state: PlantState, theta: float, p: PlantParams) -> PlantState:
    """Advance one fixed step of size ``p.dt`` with classical RK4.

    theta is held constant over the step.  Raises SimulationDivergence
    (carrying the last finite state) if the result is non-finite or leaves
    the +-DIVERGENCE_LIMIT box.  No clamping of theta happens here; that is
    the controller's job.
    """
    dt = p.dt
    x, y, t = state.x, state.y, state.t
    k1x, k1y = _deriv(x, y, t, theta, p)
    k2x, k2y = _deriv(x + 0.5 * dt * k1x, y + 0.5 * dt * k1y, t + 0.5 * dt, theta, p)
    k3x, k3y = _deriv(x + 0.5 * dt * k2x, y + 0.5 * dt * k2y, t + 0.5 * dt, theta, p)
    k4x, k4y = _deriv(x + dt * k3x, y + dt * k3y, t + dt, theta, p)
    x2 = x + (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
    y2 = y + (dt / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
    if (
        not (math.isfinite(x2) and math.isfinite(y2))
        or abs(x2) > DIVERGENCE_LIMIT
        or abs(y2) > DIVERGENCE_LIMIT
    ):
        raise SimulationDivergence(state)
    return PlantState(x=x2, y=y2, t=t + dt)


def interference(t: float, ip: InterferenceParams) -> float:
    """Scalar interference value i(t); zero when disabled."""
    if not ip.enabled:
        return 0.0
    return ip.a1 * math.sin(ip.w1 * t) + ip.a2 * math.sin(ip.w2 * t)


def measure(state: PlantState, ip: InterferenceParams):
    """Corrupted measurement (x_m, y_m) of the state at its clock time."""
    i = interference(state.t, ip)
    x_m = state.x + i if ip.on_x else state.x
    y_m = state.y + i if ip.on_y else state.y
    return x_m, y_m
