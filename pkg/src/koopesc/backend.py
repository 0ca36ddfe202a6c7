"""Backend selection: compiled kernels when available, pure Python otherwise.

The compiled extension (koopesc._kernels, built from _kernels.pyx) and the
pure module (_kernels_py) implement the same three loops with bit-identical
arithmetic; which one runs is chosen once at import.  Setting the environment
variable KOOPESC_PURE_PYTHON=1 forces the pure backend.

The wrappers here translate between the dataclass world (plant, signal) and
the flat-argument, preallocated-array world of the kernels.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py
from .plant import DIVERGENCE_LIMIT, InterferenceParams, PlantParams, PlantState
from .signal import DetectorConfig, RelayConfig

try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

if os.environ.get("KOOPESC_PURE_PYTHON", "") not in ("", "0"):
    kernels = _kernels_py
    BACKEND = "python"
elif _compiled is not None:
    kernels = _compiled
    BACKEND = "cython"
else:
    kernels = _kernels_py
    BACKEND = "python"

STATUS_OK = _kernels_py.STATUS_OK
STATUS_DIVERGED = _kernels_py.STATUS_DIVERGED

_EMPTY_PROJ = np.zeros((0, 10))


def pure_kernels():
    return _kernels_py


def compiled_kernels():
    """The compiled module, or None if the extension is not built."""
    return _compiled


def projector_parts(model, mode: str):
    """(n_sel, re, im) for the cost pipeline; n_sel == 0 selects the raw cost."""
    if mode == "lifted":
        if model is None:
            raise ValueError("lifted mode requires a model")
        vp = model.v_dom_pinv
        return vp.shape[0], np.ascontiguousarray(vp.real), np.ascontiguousarray(vp.imag)
    if mode != "raw":
        raise ValueError(f"mode must be 'raw' or 'lifted', got {mode!r}")
    return 0, _EMPTY_PROJ, _EMPTY_PROJ


def _interf_args(ip: InterferenceParams):
    return (
        int(ip.enabled), int(ip.on_x), int(ip.on_y),
        float(ip.a1), float(ip.a2), float(ip.w1), float(ip.w2),
    )


def _plant_args(p: PlantParams):
    return (
        float(p.eps0_base), float(p.drift_amp), float(p.drift_freq),
        float(p.force_amp), float(p.force_freq), float(p.mu),
        float(p.x_offset), float(p.theta_star), DIVERGENCE_LIMIT,
    )


def simulate_trajectory(
    x0: float, y0: float, theta: float, n_steps: int,
    plant: PlantParams, interf: InterferenceParams, kern=None,
):
    """Run one fixed-theta trajectory.

    Returns (status, xt, yt, xm, ym, last_state); arrays are trimmed to the
    samples actually produced (n_steps+1 unless the integration diverged).
    """
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    k = kern if kern is not None else kernels
    m = n_steps + 1
    xt = np.empty(m)
    yt = np.empty(m)
    xm = np.empty(m)
    ym = np.empty(m)
    status, n, lx, ly, lt = k.simulate_trajectory(
        float(x0), float(y0), float(theta), n_steps, float(plant.dt),
        *_plant_args(plant), *_interf_args(interf),
        xt, yt, xm, ym,
    )
    return status, xt[:n], yt[:n], xm[:n], ym[:n], PlantState(x=lx, y=ly, t=lt)


def static_sweep(
    x0: float, y0: float, theta_from: float, theta_to: float,
    n_steps: int, log_start_step: int,
    plant: PlantParams, interf: InterferenceParams,
    n_sel: int, vp_re: np.ndarray, vp_im: np.ndarray,
    det: DetectorConfig, kern=None,
):
    """Quasi-static theta ramp; returns (status, theta, r, last_state)."""
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    if det.dt != plant.dt:
        raise ValueError("detector and plant must share dt")
    k = kern if kern is not None else kernels
    # theta advances by slope*dt per step; both backends receive the same slope
    slope = (float(theta_to) - float(theta_from)) / (n_steps * float(plant.dt))
    rows = n_steps - max(log_start_step, 1) + 1
    if rows < 1:
        raise ValueError("log window is empty: log_start beyond sweep end")
    th = np.empty(rows)
    r = np.empty(rows)
    status, n, lx, ly, lt = k.static_sweep(
        float(x0), float(y0), float(theta_from), slope,
        n_steps, log_start_step, float(plant.dt),
        *_plant_args(plant), *_interf_args(interf),
        n_sel, vp_re, vp_im,
        float(det.w_hp), float(det.w_lp),
        th, r,
    )
    return status, th[:n], r[:n], PlantState(x=lx, y=ly, t=lt)


def closed_loop(
    x0: float, y0: float, n_steps: int, log_start_step: int,
    plant: PlantParams, interf: InterferenceParams,
    n_sel: int, vp_re: np.ndarray, vp_im: np.ndarray,
    det: DetectorConfig, relay: RelayConfig, kern=None,
):
    """Full feedback run; returns (status, columns dict, last_state).

    The columns dict holds t, x_true, y_true, x_meas, y_meas, y_out, r,
    theta, epsilon, each trimmed to the rows actually logged.
    """
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    if det.dt != plant.dt:
        raise ValueError("detector and plant must share dt")
    k = kern if kern is not None else kernels
    rows = n_steps - max(log_start_step, 1) + 1
    if rows < 1:
        raise ValueError("log window is empty: log_start beyond run end")
    cols = {name: np.empty(rows) for name in (
        "t", "x_true", "y_true", "x_meas", "y_meas", "y_out", "r", "theta", "epsilon",
    )}
    status, n, lx, ly, lt = k.closed_loop(
        float(x0), float(y0), n_steps, log_start_step, float(plant.dt),
        *_plant_args(plant), *_interf_args(interf),
        n_sel, vp_re, vp_im,
        float(det.w_hp), float(det.w_lp),
        float(relay.step_k), float(relay.dwell_limit), float(relay.tau_f),
        float(relay.theta_min), float(relay.theta_max),
        float(relay.theta_init), float(relay.epsilon_init),
        cols["t"], cols["x_true"], cols["y_true"], cols["x_meas"], cols["y_meas"],
        cols["y_out"], cols["r"], cols["theta"], cols["epsilon"],
    )
    cols = {name: arr[:n] for name, arr in cols.items()}
    return status, cols, PlantState(x=lx, y=ly, t=lt)
