"""Run configuration shared by all CLI commands.

Angles are degrees here (the CLI boundary); library modules use radians.
"""

import dataclasses
import json
import math
from dataclasses import dataclass

from .actuation import ActuationGeometry, ActuationMode
from .errors import ConfigError
from .sensing import DEFAULT_NOISE_SIGMA_T

MODE_NAMES = ("dma", "crma", "rrma")


@dataclass
class RunConfig:
    """Physical and run parameters for one CLI invocation."""

    d_m: float = 0.15
    alpha_deg: float = 10.0
    beta_deg: float = 0.0
    ma_moment_a_m2: float = 68.75
    mc_moment_a_m2: float = 0.97855
    mode: str = "rrma"
    theta_ar_deg: float = 90.0
    spin_rate_deg_s: float = 360.0
    noise_sigma_t: float = DEFAULT_NOISE_SIGMA_T
    dt_s: float = 0.02
    time_budget_s: float = 240.0
    seed: int = 0
    out: str = "out.csv"

    def validate(self):
        if self.d_m <= 0:
            raise ConfigError("d_m must be > 0")
        if not abs(self.alpha_deg) < 90.0:
            raise ConfigError("alpha_deg must satisfy |alpha| < 90")
        if self.ma_moment_a_m2 <= 0 or self.mc_moment_a_m2 <= 0:
            raise ConfigError("magnetic moments must be > 0")
        if self.mode not in MODE_NAMES:
            raise ConfigError(f"mode must be one of {MODE_NAMES}")
        if not 0.0 < self.theta_ar_deg <= 90.0:
            raise ConfigError("theta_ar_deg must be in (0, 90]")
        if self.spin_rate_deg_s <= 0:
            raise ConfigError("spin_rate_deg_s must be > 0")
        if self.noise_sigma_t < 0:
            raise ConfigError("noise_sigma_t must be >= 0")
        if not 1e-4 < self.dt_s <= 0.1:
            raise ConfigError("dt_s outside (1e-4, 0.1] s")
        if self.time_budget_s <= 0:
            raise ConfigError("time_budget_s must be > 0")
        if self.seed < 0:
            raise ConfigError("seed must be >= 0")
        return self

    def geometry(self, omega_dc):
        return ActuationGeometry(self.d_m, math.radians(self.alpha_deg),
                                 math.radians(self.beta_deg), omega_dc)

    def actuation_mode(self, name=None):
        name = (name or self.mode).lower()
        if name == "dma":
            return ActuationMode.dma()
        if name == "crma":
            return ActuationMode.crma()
        if name == "rrma":
            return ActuationMode.rrma(math.radians(self.theta_ar_deg))
        raise ConfigError(f"unknown mode {name!r}")

    @property
    def spin_rate_rad_s(self):
        return math.radians(self.spin_rate_deg_s)


def load_config(path=None, overrides=None):
    """Build a RunConfig from an optional JSON file plus flag overrides.

    File values replace the defaults; non-None overrides win over both.
    """
    values = {}
    if path is not None:
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"bad config file {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"config file {path} must hold a JSON object")
        known = {f.name for f in dataclasses.fields(RunConfig)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        values.update(data)
    for key, val in (overrides or {}).items():
        if val is not None:
            values[key] = val
    return RunConfig(**values).validate()


def write_effective_config(out_path, config, extra=None):
    """Echo the effective config into a sidecar JSON next to the output."""
    payload = dataclasses.asdict(config)
    if extra:
        payload.update(extra)
    sidecar = str(out_path) + ".config.json"
    with open(sidecar, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return sidecar
