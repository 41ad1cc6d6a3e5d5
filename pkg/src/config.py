"""
Configuration management.

Loads, validates, and provides typed access to run configs. A config file
is JSON with keys mirroring the command-line flags (dashes become
underscores); flags override file keys, and LP_LAB_SEED overrides the seed.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import ConfigError

log = logging.getLogger("lp-lab")

SEED_ENV = "LP_LAB_SEED"
DEFAULT_SEED = 20240101

# config key -> dataclass field, where they differ
KEY_ALIASES = {"lambda": "lam", "seed": "base_seed"}


@dataclass
class RunConfig:
    command: str = ""

    # Sequence selection
    lam: Optional[float] = None
    count: int = 12
    seq_file: Optional[str] = None

    # Parameter grids (None: the command's default grid)
    lambdas: Optional[list[float]] = None
    sigmas: Optional[list[int]] = None
    ps: Optional[list[float]] = None
    Ns: Optional[list[int]] = None
    N: Optional[int] = None
    M: Optional[int] = None
    N_2d: int = 128
    fit_lambda: float = 1.02
    p: Optional[float] = None
    input: Optional[str] = None
    width: int = 512

    # Sampling
    trials: int = 100
    draws: int = 200
    oversampling: int = 8
    base_seed: int = DEFAULT_SEED

    # Runner
    jobs: int = 0  # 0: one worker per logical core
    outdir: str = "out"

    # Flags
    plot: bool = False
    dry_run: bool = False
    pichorides: bool = False
    two_d: bool = False

    extra: dict = field(default_factory=dict, repr=False)

    @classmethod
    def field_names(cls) -> set[str]:
        return {f.name for f in dataclasses.fields(cls)} - {"extra"}

    @classmethod
    def from_dict(cls, raw: dict) -> RunConfig:
        known = cls.field_names()
        values = {}
        for key, value in raw.items():
            name = KEY_ALIASES.get(key, key.replace("-", "_"))
            if name not in known:
                raise ConfigError(f"Unknown config key: {key}")
            values[name] = value
        try:
            return cls(**values)
        except TypeError as e:
            raise ConfigError(f"Invalid config: {e}") from e

    @classmethod
    def from_file(cls, path: Path) -> RunConfig:
        """Load config from a JSON file."""
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"Config file not found at {path}")
        try:
            with open(path) as f:
                raw = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: not valid JSON ({e})") from e
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: expected a JSON object")
        log.debug("Loaded config from %s", path)
        return cls.from_dict(raw)

    def merged(self, overrides: dict) -> RunConfig:
        """Copy with every non-None override applied."""
        changes = {k: v for k, v in overrides.items() if v is not None}
        unknown = set(changes) - self.field_names()
        if unknown:
            raise ConfigError(f"Unknown overrides: {sorted(unknown)}")
        return dataclasses.replace(self, **changes)

    def with_env(self, environ: dict | None = None) -> RunConfig:
        environ = os.environ if environ is None else environ
        raw = environ.get(SEED_ENV)
        if raw is None or raw == "":
            return self
        try:
            seed = int(raw)
        except ValueError:
            raise ConfigError(f"{SEED_ENV} must be an integer, got {raw!r}")
        log.debug("Seed overridden by %s=%d", SEED_ENV, seed)
        return dataclasses.replace(self, base_seed=seed)

    def validate(self):
        """Command-independent checks; commands validate their own preconditions."""
        if not self.command:
            raise ConfigError("No command given")
        for name in ("lambdas", "sigmas", "ps", "Ns"):
            grid = getattr(self, name)
            if grid is not None and len(grid) == 0:
                raise ConfigError(f"{name} must not be empty")
        for name in ("count", "trials", "draws", "oversampling", "width", "N_2d"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.jobs < 0:
            raise ConfigError(f"jobs must be >= 0, got {self.jobs}")
        if self.base_seed < 0:
            raise ConfigError(f"seed must be >= 0, got {self.base_seed}")
        if not self.outdir:
            raise ConfigError("outdir must not be empty")

    @property
    def outdir_path(self) -> Path:
        return Path(self.outdir)

    def to_dict(self) -> dict:
        out = {}
        for name in sorted(self.field_names()):
            key = next((k for k, v in KEY_ALIASES.items() if v == name), name)
            out[key] = getattr(self, name)
        return out
