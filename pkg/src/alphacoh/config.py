"""Run configuration: defaults < JSON file < command-line flags."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .husimi import SearchConfig
from .measures import ConvergenceSchedule
from .pdist import DEFAULT_H, DEFAULT_L


@dataclass(frozen=True)
class Quadrature:
    L: float = DEFAULT_L
    h: float = DEFAULT_H

    def __post_init__(self):
        if not (self.L > 0 and self.h > 0):
            raise ValueError("quadrature L and h must be > 0")


@dataclass(frozen=True)
class RunConfig:
    n_max: int = 60
    search: SearchConfig = field(default_factory=SearchConfig)
    schedule: ConvergenceSchedule = field(default_factory=ConvergenceSchedule)
    quadrature: Quadrature = field(default_factory=Quadrature)
    workers: int = 1
    # no randomness anywhere; kept so the flag is visible in dumped configs
    deterministic: bool = True

    def __post_init__(self):
        if self.n_max < 8:
            raise ValueError("n_max must be >= 8")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def to_json(self) -> dict:
        return {
            "n_max": self.n_max,
            "search": self.search.to_dict(),
            "schedule": self.schedule.to_dict(),
            "quadrature": {"L": self.quadrature.L, "h": self.quadrature.h},
            "workers": self.workers,
            "deterministic": True,
        }

    @classmethod
    def from_json(cls, data: dict) -> "RunConfig":
        unknown = set(data) - {"n_max", "search", "schedule", "quadrature", "workers",
                               "deterministic"}
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(
            n_max=int(data.get("n_max", 60)),
            search=SearchConfig.from_dict(data.get("search", {})),
            schedule=ConvergenceSchedule.from_dict(data.get("schedule", {})),
            quadrature=Quadrature(**data.get("quadrature", {})),
            workers=int(data.get("workers", 1)),
        )

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(Path(path)) as fh:
            return cls.from_json(json.load(fh))

    def with_overrides(self, n_max=None, search=None, schedule=None, quadrature=None,
                       workers=None) -> "RunConfig":
        """Apply non-empty override dicts on top of this config."""
        return RunConfig(
            n_max=self.n_max if n_max is None else n_max,
            search=replace(self.search, **(search or {})),
            schedule=replace(self.schedule, **(schedule or {})),
            quadrature=replace(self.quadrature, **(quadrature or {})),
            workers=self.workers if workers is None else workers,
        )
