"""Cost transducers, the amplitude detector, and the relay extremum seeker.

Everything here is a pure state-transition function: the caller owns the
DetectorState / RelayState values and threads them through the loop.  Both
recursions seed themselves from the first observed sample so startup does
not inject a spurious transient (which would trigger an immediate relay
flip, since the dwell timer starts expired).
"""

from __future__ import annotations

import math
from dataclasses import dataclass


def raw_cost(x_m: float, y_m: float) -> float:
    """RMS-style amplitude of the measured state, sqrt(x^2 + y^2)/sqrt(2)."""
    return math.sqrt(x_m * x_m + y_m * y_m) / math.sqrt(2.0)


def lifted_cost(x_m: float, y_m: float, model) -> float:
    """Dominant-subspace energy of the lifted measurement (see lifting)."""
    from .lifting import project_energy

    return project_energy(x_m, y_m, model)


@dataclass(frozen=True)
class DetectorConfig:
    """High-pass / square / low-pass cascade corners, discretized at dt."""

    dt: float
    w_hp: float = 1.0
    w_lp: float = 0.2

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.w_hp <= 0.0 or self.w_lp <= 0.0:
            raise ValueError("filter corners w_hp, w_lp must be positive")

    @property
    def alpha_hp(self) -> float:
        return math.exp(-self.w_hp * self.dt)

    @property
    def alpha_lp(self) -> float:
        return math.exp(-self.w_lp * self.dt)


@dataclass(frozen=True)
class DetectorState:
    y_hp_prev: float = 0.0
    y_lp_prev: float = 0.0
    y_out_prev: float = 0.0
    initialized: bool = False


def detector_step(
    y_out: float, st: DetectorState, cfg: DetectorConfig
) -> tuple[float, DetectorState]:
    """One detector update; returns (r, new state) with r = max(y_lp, 0)."""
    a_hp = cfg.alpha_hp
    a_lp = cfg.alpha_lp
    y_out_prev = y_out if not st.initialized else st.y_out_prev
    y_hp = a_hp * st.y_hp_prev + (1.0 - a_hp) * (y_out - y_out_prev)
    y_lp = a_lp * st.y_lp_prev + (1.0 - a_lp) * (y_hp * y_hp)
    r = y_lp if y_lp > 0.0 else 0.0
    return r, DetectorState(y_hp_prev=y_hp, y_lp_prev=y_lp, y_out_prev=y_out, initialized=True)


@dataclass(frozen=True)
class RelayConfig:
    """Relay ESC gains and limits.

    step_k is the per-update theta decrement; the conventional choice is
    dt/15 (the config layer resolves its "auto" value to that, since this
    dataclass does not carry dt).
    """

    step_k: float
    dwell_limit: float = 15.0
    tau_f: float = 10.0
    theta_min: float = -5.0
    theta_max: float = 5.0
    theta_init: float = 2.0
    epsilon_init: int = 1

    def __post_init__(self):
        # zero is allowed: a frozen controller (theta constant) is a valid
        # degenerate configuration used in tests
        if self.step_k < 0.0:
            raise ValueError(f"step_k must be nonnegative, got {self.step_k}")
        if self.dwell_limit < 0.0:
            raise ValueError(f"dwell_limit must be nonnegative, got {self.dwell_limit}")
        if self.tau_f <= 0.0:
            raise ValueError(f"tau_f must be positive, got {self.tau_f}")
        if not self.theta_min < self.theta_max:
            raise ValueError("theta_min must be below theta_max")
        if self.epsilon_init not in (-1, 1):
            raise ValueError(f"epsilon_init must be +1 or -1, got {self.epsilon_init}")


@dataclass(frozen=True)
class RelayState:
    theta: float
    epsilon: int
    hp_prev: float = 0.0
    r_prev: float = 0.0
    # dwell starts expired so the first genuine rise can flip without waiting
    dwell_elapsed: float = 0.0
    initialized: bool = False


def initial_relay_state(cfg: RelayConfig) -> RelayState:
    return RelayState(
        theta=cfg.theta_init,
        epsilon=cfg.epsilon_init,
        dwell_elapsed=cfg.dwell_limit,
    )


def relay_step(r: float, st: RelayState, cfg: RelayConfig, dt: float) -> RelayState:
    """One relay update: filter r, maybe flip epsilon, move theta one step."""
    alpha = math.exp(-dt / cfg.tau_f)
    r_prev = r if not st.initialized else st.r_prev
    hp = alpha * st.hp_prev + (1.0 - alpha) * (r - r_prev)
    epsilon = st.epsilon
    if hp > 0.0 and st.dwell_elapsed >= cfg.dwell_limit:
        epsilon = -epsilon
        dwell_elapsed = 0.0
    else:
        dwell_elapsed = st.dwell_elapsed + dt
    theta = st.theta - cfg.step_k * epsilon
    if theta < cfg.theta_min:
        theta = cfg.theta_min
    elif theta > cfg.theta_max:
        theta = cfg.theta_max
    return RelayState(
        theta=theta,
        epsilon=epsilon,
        hp_prev=hp,
        r_prev=r,
        dwell_elapsed=dwell_elapsed,
        initialized=True,
    )


def initial_detector_state() -> DetectorState:
    return DetectorState()


__all__ = [
    "raw_cost",
    "lifted_cost",
    "DetectorConfig",
    "DetectorState",
    "detector_step",
    "initial_detector_state",
    "RelayConfig",
    "RelayState",
    "relay_step",
    "initial_relay_state",
]
