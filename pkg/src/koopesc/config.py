"""Flat key=value configuration with dotted keys and strict key checking.

One namespace, every key has a default, file values override defaults, and
unknown keys are hard errors.  Lines are `key = value`; blank lines and lines
starting with `#` are ignored.  Booleans accept true/false/yes/no/on/off/1/0.
"""

from __future__ import annotations

from .experiments import TrainingConfig
from .plant import InterferenceParams, PlantParams
from .signal import DetectorConfig, RelayConfig


class ConfigError(Exception):
    """Unreadable file, unknown key, or unparsable value."""


# "auto" resolves to dt/15 when the relay config is built.
AUTO = "auto"

DEFAULTS = {
    "seed": 0,
    "n_modes": 8,
    "svd_cutoff": 1e-10,
    "out_dir": "out",
    "plant.eps0_base": 1.0,
    "plant.drift_amp": 1.0,
    "plant.drift_freq": 0.005,
    "plant.force_amp": 2.2,
    "plant.force_freq": 4.5,
    "plant.mu": 1.0,
    "plant.x_offset": 6.0,
    "plant.theta_star": -3.0,
    "plant.dt": 0.005,
    "interference.a1": 10.5,
    "interference.a2": 11.1,
    "interference.w1": 3.2,
    "interference.w2": 7.8,
    "interference.enabled": True,
    "interference.on_x": True,
    "interference.on_y": True,
    "train.n_trajectories": 100,
    "train.traj_duration": 50.0,
    "train.theta_min": -5.0,
    "train.theta_max": 5.0,
    "train.x_min": 3.0,
    "train.x_max": 9.0,
    "train.y_min": -3.0,
    "train.y_max": 3.0,
    "detector.w_hp": 1.0,
    "detector.w_lp": 0.2,
    "relay.step_k": AUTO,
    "relay.dwell_limit": 15.0,
    "relay.tau_f": 10.0,
    "relay.theta_min": -5.0,
    "relay.theta_max": 5.0,
    "relay.theta_init": 2.0,
    "relay.epsilon_init": 1,
    "map.theta_from": 2.0,
    "map.theta_to": -5.0,
    "map.sweep_duration": 2000.0,
    "map.log_start": 100.0,
    "run.duration": 2500.0,
    "run.log_start": 100.0,
    "run.x0": 9.0,
    "run.y0": 1.0,
    "metrics.tol": 0.25,
    "metrics.tail_frac": 0.3,
    "metrics.smoothing_window": 51,
}

_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


def _parse_value(key: str, raw: str):
    default = DEFAULTS[key]
    if key == "relay.step_k":
        if raw == AUTO:
            return AUTO
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"{key}: expected a number or 'auto', got {raw!r}") from None
    if isinstance(default, bool):
        low = raw.lower()
        if low in _TRUE:
            return True
        if low in _FALSE:
            return False
        raise ConfigError(f"{key}: expected a boolean, got {raw!r}")
    if isinstance(default, int):
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"{key}: expected an integer, got {raw!r}") from None
    if isinstance(default, float):
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"{key}: expected a number, got {raw!r}") from None
    return raw


class Config:
    """Resolved configuration: defaults plus any file overrides."""

    def __init__(self, values=None):
        self.values = dict(DEFAULTS)
        if values:
            for key, val in values.items():
                if key not in DEFAULTS:
                    raise ConfigError(f"unknown config key {key!r}")
                self.values[key] = val

    def __getitem__(self, key):
        return self.values[key]

    def set(self, key, value):
        if key not in DEFAULTS:
            raise ConfigError(f"unknown config key {key!r}")
        self.values[key] = value

    # -- dataclass builders -------------------------------------------------

    def plant_params(self) -> PlantParams:
        v = self.values
        return PlantParams(
            eps0_base=v["plant.eps0_base"],
            drift_amp=v["plant.drift_amp"],
            drift_freq=v["plant.drift_freq"],
            force_amp=v["plant.force_amp"],
            force_freq=v["plant.force_freq"],
            mu=v["plant.mu"],
            x_offset=v["plant.x_offset"],
            theta_star=v["plant.theta_star"],
            dt=v["plant.dt"],
        )

    def interference_params(self) -> InterferenceParams:
        v = self.values
        return InterferenceParams(
            a1=v["interference.a1"],
            a2=v["interference.a2"],
            w1=v["interference.w1"],
            w2=v["interference.w2"],
            enabled=v["interference.enabled"],
            on_x=v["interference.on_x"],
            on_y=v["interference.on_y"],
        )

    def training_config(self) -> TrainingConfig:
        v = self.values
        return TrainingConfig(
            n_trajectories=v["train.n_trajectories"],
            traj_duration=v["train.traj_duration"],
            theta_range=(v["train.theta_min"], v["train.theta_max"]),
            x_init_range=(v["train.x_min"], v["train.x_max"]),
            y_init_range=(v["train.y_min"], v["train.y_max"]),
            seed=v["seed"],
        )

    def detector_config(self) -> DetectorConfig:
        v = self.values
        return DetectorConfig(dt=v["plant.dt"], w_hp=v["detector.w_hp"], w_lp=v["detector.w_lp"])

    def relay_config(self) -> RelayConfig:
        v = self.values
        step_k = v["relay.step_k"]
        if step_k == AUTO:
            step_k = v["plant.dt"] / 15.0
        return RelayConfig(
            step_k=step_k,
            dwell_limit=v["relay.dwell_limit"],
            tau_f=v["relay.tau_f"],
            theta_min=v["relay.theta_min"],
            theta_max=v["relay.theta_max"],
            theta_init=v["relay.theta_init"],
            epsilon_init=v["relay.epsilon_init"],
        )

    def dump(self) -> str:
        """Serialize current values in a form load() reads back identically."""
        lines = []
        for key in sorted(self.values):
            val = self.values[key]
            if isinstance(val, bool):
                text = "true" if val else "false"
            elif isinstance(val, float):
                text = repr(val)
            else:
                text = str(val)
            lines.append(f"{key} = {text}")
        return "\n".join(lines) + "\n"


def parse(text: str) -> Config:
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {stripped!r}")
        key, raw = stripped.split("=", 1)
        key = key.strip()
        raw = raw.strip()
        if key not in DEFAULTS:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        values[key] = _parse_value(key, raw)
    return Config(values)


def load(path) -> Config:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse(text)
