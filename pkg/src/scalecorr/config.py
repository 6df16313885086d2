"""Pipeline configuration: key=value file plus command-line overrides."""

import dataclasses
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass
class PipelineConfig:
    prices: str = None            # raw (ticker, date, close) records
    returns: str = None           # alternatively: a serialized return panel
    capitalization: str = None    # optional (ticker, date, cap) records
    k: float = 0.90               # length-filter fraction
    tau_min: int = 1
    tau_max: int = 19
    q_min: float = 0.1
    q_max: float = 1.0
    q_step: float = 0.1
    alpha: float = 0.05
    significance_mode: str = "filtered"
    seed: int = 0
    output_dir: str = "out"

    def validate(self):
        if not (0 < self.k <= 1):
            raise ConfigError(f"k={self.k} outside (0, 1]")
        if self.tau_min < 1 or self.tau_max < self.tau_min:
            raise ConfigError("tau range must satisfy 1 <= tau_min <= tau_max")
        if self.q_step <= 0 or self.q_max < self.q_min or self.q_min <= 0:
            raise ConfigError("q grid must be positive and non-empty")
        if self.significance_mode not in ("all", "filtered"):
            raise ConfigError(
                f"significance_mode={self.significance_mode!r} not in "
                "{'all', 'filtered'}")
        if not (0 < self.alpha < 1):
            raise ConfigError(f"alpha={self.alpha} outside (0, 1)")
        if self.prices is None and self.returns is None:
            raise ConfigError("either a prices file or a returns file is "
                              "required")
        return self

    def tau_range(self):
        return np.arange(self.tau_min, self.tau_max + 1)

    def q_grid(self):
        n = int(round((self.q_max - self.q_min) / self.q_step)) + 1
        return np.round(self.q_min + self.q_step * np.arange(n), 12)

    def to_pairs(self):
        out = []
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if v is not None:
                out.append((f.name, str(v)))
        return out


_FIELD_TYPES = {
    f.name: (f.type if isinstance(f.type, type) else
             {"float": float, "int": int, "str": str}.get(str(f.type), str))
    for f in dataclasses.fields(PipelineConfig)
}


def parse_config_file(path):
    """Read key=value lines (``#`` comments allowed) into a dict."""
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}: line {lineno}: expected key=value")
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
    return values


def build_config(file_values=None, overrides=None):
    """Merge config-file values and CLI overrides into a PipelineConfig."""
    merged = dict(file_values or {})
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value
    cfg = PipelineConfig()
    for key, value in merged.items():
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown config key {key!r}")
        parser = _FIELD_TYPES[key]
        try:
            setattr(cfg, key, parser(value) if isinstance(value, str) else value)
        except ValueError as exc:
            raise ConfigError(f"config key {key}: {exc}") from exc
    return cfg.validate()
