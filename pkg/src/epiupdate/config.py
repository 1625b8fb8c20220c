"""Tolerances and limits shared by the solver, update operators and CLI."""
from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass
from pathlib import Path

CONFIG_ENV = "EPIUPDATE_CONFIG"


@dataclass(frozen=True)
class Config:
    # satisfaction checks on exact inputs
    check_tol: float = 1e-9
    # satisfaction checks on solver-produced points
    solver_tol: float = 1e-6
    # ProbabilityFunction normalization
    norm_tol: float = 1e-9
    # active-set violation threshold
    active_set_tol: float = 1e-10
    # phase-1 sum of squared violations above this => infeasible
    phase1_tol: float = 1e-8
    phase1_reg: float = 1e-6
    # active-set pivots allowed per (n + m)
    pivot_factor: int = 10
    bregman_tol: float = 1e-9
    bregman_max_sweeps: int = 10_000
    # world-space QPs above this many worlds use the dual Newton solver
    dense_world_limit: int = 1024
    world_cap: int = 20

    def __post_init__(self):
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if v <= 0:
                raise ValueError(f"config value {f.name} must be positive, got {v!r}")
        if self.world_cap < 1:
            raise ValueError("world_cap must be >= 1")

    def replace(self, **changes) -> "Config":
        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})

    @classmethod
    def from_file(cls, path) -> "Config":
        data = json.loads(Path(path).read_text())
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_env(cls) -> "Config":
        path = os.environ.get(CONFIG_ENV)
        return cls.from_file(path) if path else cls()


DEFAULT = Config()
