"""Experiment orchestration: training, static maps, closed-loop runs, metrics.

Reproduces the four-stage workflow: fit a lifted model from randomized
trajectories, sweep theta quasi-statically to expose the cost landscape in
raw and lifted form, close the relay loop in both modes, and score the
resulting theta trajectories.  All randomness flows from one integer seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .lifting import (
    DEFAULT_SVD_CUTOFF,
    KoopmanModel,
    build_model,
    build_snapshots,
    fit_koopman,
)
from .plant import InterferenceParams, PlantParams, SimulationDivergence
from .signal import DetectorConfig, RelayConfig

_trapz = getattr(np, "trapezoid", None) or np.trapz

RUNLOG_HEADER = "t,x_true,y_true,x_meas,y_meas,y_out,r,theta,epsilon"
MAP_HEADER = "theta,r"

DEFAULT_LOG_START = 100.0
DEFAULT_SWEEP_DURATION = 2000.0
DEFAULT_RUN_DURATION = 2500.0
# Closed-loop and sweep initial state: inside the training envelope, off the
# oscillation center so the transient excites the cycle quickly.
DEFAULT_X0 = 9.0
DEFAULT_Y0 = 1.0


class UndefinedMetricError(ValueError):
    """A metric's denominator is degenerate (e.g. constant r stream)."""


@dataclass(frozen=True)
class TrainingConfig:
    n_trajectories: int = 100
    traj_duration: float = 50.0
    theta_range: tuple = (-5.0, 5.0)
    x_init_range: tuple = (3.0, 9.0)
    y_init_range: tuple = (-3.0, 3.0)
    seed: int = 0

    def __post_init__(self):
        if self.n_trajectories < 1:
            raise ValueError("n_trajectories must be >= 1")
        if self.traj_duration <= 0.0:
            raise ValueError("traj_duration must be positive")
        for name in ("theta_range", "x_init_range", "y_init_range"):
            lo, hi = getattr(self, name)
            if not lo < hi:
                raise ValueError(f"{name} must be a nondegenerate (lo, hi) interval")


@dataclass(frozen=True)
class RunLog:
    """Uniformly sampled closed-loop record, starting at log_start."""

    t: np.ndarray
    x_true: np.ndarray
    y_true: np.ndarray
    x_meas: np.ndarray
    y_meas: np.ndarray
    y_out: np.ndarray
    r: np.ndarray
    theta: np.ndarray
    epsilon: np.ndarray
    log_start: float = DEFAULT_LOG_START

    def __len__(self):
        return self.t.shape[0]

    def columns(self):
        """Column arrays keyed by name, in file order."""
        return {name: getattr(self, name) for name in RUNLOG_HEADER.split(",")}


@dataclass(frozen=True)
class Metrics:
    iae: float
    ise: float
    t_hit: float | None  # absolute time on the log's axis; None = not reached
    e_ss: float
    t_start: float = 0.0

    @property
    def t_hit_offset(self) -> float | None:
        if self.t_hit is None:
            return None
        return self.t_hit - self.t_start


def train(
    cfg: TrainingConfig,
    plant: PlantParams,
    interf: InterferenceParams,
    n_modes: int = 8,
    svd_cutoff: float = DEFAULT_SVD_CUTOFF,
) -> KoopmanModel:
    """Fit a lifted model from randomized fixed-theta trajectories.

    Each trajectory gets its own generator keyed by (seed, index), so adding
    trajectories never reshuffles earlier ones; the draw order per trajectory
    (theta, x0, y0) is part of the determinism contract.
    """
    n_steps = int(round(cfg.traj_duration / plant.dt))
    measured = []
    for i in range(cfg.n_trajectories):
        rng = np.random.default_rng([cfg.seed, i])
        theta = rng.uniform(*cfg.theta_range)
        x0 = rng.uniform(*cfg.x_init_range)
        y0 = rng.uniform(*cfg.y_init_range)
        status, _, _, xm, ym, last = backend.simulate_trajectory(
            x0, y0, theta, n_steps, plant, interf,
        )
        if status != backend.STATUS_OK:
            raise SimulationDivergence(last)
        measured.append(np.column_stack([xm, ym]))
    snaps = build_snapshots(measured)
    k = fit_koopman(snaps, svd_cutoff)
    return build_model(k, snaps.psi_x, n_modes, svd_cutoff)


def static_map(
    plant: PlantParams,
    interf: InterferenceParams,
    model: KoopmanModel | None,
    mode: str,
    theta_from: float = 2.0,
    theta_to: float = -5.0,
    sweep_duration: float = DEFAULT_SWEEP_DURATION,
    log_start: float = DEFAULT_LOG_START,
    x0: float = DEFAULT_X0,
    y0: float = DEFAULT_Y0,
    det: DetectorConfig | None = None,
):
    """Quasi-static theta ramp; returns (theta, r) sample arrays.

    On divergence raises SimulationDivergence with ``partial_map`` attached.
    """
    if sweep_duration <= 0.0:
        raise ValueError(f"sweep_duration must be positive, got {sweep_duration}")
    if det is None:
        det = DetectorConfig(dt=plant.dt)
    n_sel, vp_re, vp_im = backend.projector_parts(model, mode)
    n_steps = int(round(sweep_duration / plant.dt))
    log_start_step = int(round(log_start / plant.dt))
    status, th, r, last = backend.static_sweep(
        x0, y0, theta_from, theta_to, n_steps, log_start_step,
        plant, interf, n_sel, vp_re, vp_im, det,
    )
    if status != backend.STATUS_OK:
        err = SimulationDivergence(last)
        err.partial_map = (th, r)
        raise err
    return th, r


def run_closed_loop(
    plant: PlantParams,
    interf: InterferenceParams,
    model: KoopmanModel | None,
    mode: str,
    relay_cfg: RelayConfig,
    det_cfg: DetectorConfig | None = None,
    duration: float = DEFAULT_RUN_DURATION,
    log_start: float = DEFAULT_LOG_START,
    x0: float = DEFAULT_X0,
    y0: float = DEFAULT_Y0,
) -> RunLog:
    """Relay ESC feedback run; on divergence the error carries ``partial_log``."""
    if duration <= 0.0:
        raise ValueError(f"duration must be positive, got {duration}")
    if det_cfg is None:
        det_cfg = DetectorConfig(dt=plant.dt)
    n_sel, vp_re, vp_im = backend.projector_parts(model, mode)
    n_steps = int(round(duration / plant.dt))
    log_start_step = int(round(log_start / plant.dt))
    status, cols, last = backend.closed_loop(
        x0, y0, n_steps, log_start_step, plant, interf,
        n_sel, vp_re, vp_im, det_cfg, relay_cfg,
    )
    log = RunLog(log_start=log_start, **cols)
    if status != backend.STATUS_OK:
        err = SimulationDivergence(last)
        err.partial_log = log
        raise err
    return log


def compute_metrics(
    log: RunLog,
    theta_star: float,
    r_star: float,
    tol: float = 0.25,
    tail_frac: float = 0.30,
) -> Metrics:
    """Score a run: IAE/ISE of the theta error, first hit time, tail error.

    t_hit is the t-column value of the first sample with |theta - theta_star|
    < tol (so a log that starts on target reports its own start time); e_ss
    compares the mean r over the trailing fraction against r_star, normalized
    by the r range of the whole log.
    """
    if len(log) < 2:
        raise ValueError("log must contain at least 2 samples")
    err = np.abs(log.theta - theta_star)
    iae = float(_trapz(err, log.t))
    ise = float(_trapz(err * err, log.t))
    hits = np.nonzero(err < tol)[0]
    t_hit = float(log.t[hits[0]]) if hits.size else None
    r = log.r
    r_range = float(r.max() - r.min())
    if r_range == 0.0:
        raise UndefinedMetricError("r is constant over the log; e_ss undefined")
    n_tail = max(1, int(round(tail_frac * len(log))))
    e_ss = abs(float(r[len(log) - n_tail:].mean()) - r_star) / r_range
    return Metrics(iae=iae, ise=ise, t_hit=t_hit, e_ss=e_ss, t_start=float(log.t[0]))


def smooth_map(r: np.ndarray, smoothing_window: int = 51) -> np.ndarray:
    """Centered moving average, valid region only (len(r) - window + 1 points)."""
    if smoothing_window < 1 or smoothing_window % 2 == 0:
        raise ValueError("smoothing_window must be a positive odd integer")
    if r.shape[0] < smoothing_window:
        raise ValueError(
            f"need at least {smoothing_window} samples, got {r.shape[0]}"
        )
    kernel = np.full(smoothing_window, 1.0 / smoothing_window)
    return np.convolve(r, kernel, mode="valid")


def map_minimum(theta: np.ndarray, r: np.ndarray, smoothing_window: int = 51):
    """(theta_argmin, r_min) of the smoothed static map."""
    smoothed = smooth_map(r, smoothing_window)
    i = int(np.argmin(smoothed))
    return float(theta[i + smoothing_window // 2]), float(smoothed[i])


def convexity_score(
    theta: np.ndarray, r: np.ndarray, smoothing_window: int = 51
) -> float:
    """Fraction of slope sign changes beyond the one a convex map allows.

    0 means unimodal after smoothing; larger values mean a noisier landscape.
    """
    smoothed = smooth_map(r, smoothing_window)
    signs = np.sign(np.diff(smoothed))
    signs = signs[signs != 0.0]
    if signs.shape[0] < 2:
        return 0.0
    changes = int(np.count_nonzero(signs[1:] != signs[:-1]))
    excess = max(0, changes - 1)
    return excess / max(1, signs.shape[0] - 1)


# ---------------------------------------------------------------------------
# CSV emission and loading.  Numbers are written at 12 significant digits.

def save_runlog(log: RunLog, path) -> None:
    data = np.column_stack(list(log.columns().values()))
    np.savetxt(path, data, fmt="%.12g", delimiter=",",
               header=RUNLOG_HEADER, comments="")


def load_runlog(path) -> RunLog:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != RUNLOG_HEADER:
            raise ValueError(f"unexpected run-log header in {path}: {header!r}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    names = RUNLOG_HEADER.split(",")
    cols = {name: np.ascontiguousarray(data[:, i]) for i, name in enumerate(names)}
    return RunLog(log_start=float(cols["t"][0]), **cols)


def save_static_map(theta: np.ndarray, r: np.ndarray, path) -> None:
    np.savetxt(path, np.column_stack([theta, r]), fmt="%.12g", delimiter=",",
               header=MAP_HEADER, comments="")


def load_static_map(path):
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != MAP_HEADER:
            raise ValueError(f"unexpected static-map header in {path}: {header!r}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return np.ascontiguousarray(data[:, 0]), np.ascontiguousarray(data[:, 1])


def format_metrics(m: Metrics) -> str:
    t_hit = "not_reached" if m.t_hit is None else f"{m.t_hit:.12g}"
    offset = "not_reached" if m.t_hit_offset is None else f"{m.t_hit_offset:.12g}"
    return (
        f"iae={m.iae:.12g}\n"
        f"ise={m.ise:.12g}\n"
        f"t_hit={t_hit}\n"
        f"t_hit_offset={offset}\n"
        f"e_ss={m.e_ss:.12g}\n"
    )


def save_metrics_csv(m: Metrics, path) -> None:
    t_hit = "not_reached" if m.t_hit is None else f"{m.t_hit:.12g}"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("iae,ise,t_hit,e_ss\n")
        fh.write(f"{m.iae:.12g},{m.ise:.12g},{t_hit},{m.e_ss:.12g}\n")
