"""Sweep configuration and the reciprocal temperature schedule."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any

import numpy as np

from hallspec.graph import LAPLACIAN_FORMS, METRICS, MODALITIES, CouplingWeights


TAU_SCHEDULES = ("inverse_temperature", "fixed")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Schedule:
    """Temperature ``T0 / (1 + gamma * t)`` sampled on ``t_grid``."""

    T0: float = 5.0
    gamma: float = 0.05
    t_grid: tuple[float, ...] = tuple(np.round(np.linspace(0.1, 10.0, 25), 10))

    def __post_init__(self):
        grid = tuple(float(t) for t in self.t_grid)
        object.__setattr__(self, "t_grid", grid)
        if not self.T0 > 0:
            raise ConfigError(f"T0 must be positive, got {self.T0}")
        if not self.gamma >= 0:
            raise ConfigError(f"gamma must be nonnegative, got {self.gamma}")
        if not grid:
            raise ConfigError("t_grid is empty")
        if grid[0] < 0 or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("t_grid must be nonnegative and strictly increasing")

    def temperatures(self) -> list[float]:
        return [temperature_at(self, t) for t in self.t_grid]


def temperature_at(schedule: Schedule, t: float) -> float:
    denom = 1.0 + schedule.gamma * t
    if denom <= 0:
        raise ConfigError(f"schedule undefined at t={t}")
    return schedule.T0 / denom


@dataclass(frozen=True)
class SweepConfig:
    tau: float = 1.0
    coupling: CouplingWeights = field(default_factory=CouplingWeights)
    band: float = 1.0
    plausible_fraction: float = 0.5
    pair_count: int = 1000
    seed: int = 0
    metric: str = "euclidean"
    laplacian_form: str = "zhou"
    mode_threshold: float = 0.5
    # "inverse_temperature": diffusion time tau * T0 / T(t); "fixed": tau at every step
    tau_schedule: str = "inverse_temperature"
    # synthetic generator
    node_count: int = 300
    embedding_dim: int = 32
    modalities: tuple[str, ...] = MODALITIES
    neighbors: int = 4
    cross_neighbors: int = 2
    joint_edges: int = 100
    cluster_separation: float = 1.0
    # decay verdicts use this many points on [0, decay_tau_span * step diffusion time]
    decay_points: int = 50
    decay_tau_span: float = 2.0

    def __post_init__(self):
        if isinstance(self.coupling, dict):
            object.__setattr__(self, "coupling", CouplingWeights(**self.coupling))
        object.__setattr__(self, "modalities", tuple(self.modalities))
        checks = [
            (self.tau > 0, "tau must be positive"),
            (self.band > 0, "band must be positive"),
            (0 < self.plausible_fraction <= 1, "plausible_fraction must lie in (0, 1]"),
            (self.pair_count >= 0, "pair_count must be nonnegative"),
            (self.metric in METRICS, f"metric must be one of {METRICS}"),
            (self.laplacian_form in LAPLACIAN_FORMS, f"laplacian_form must be one of {LAPLACIAN_FORMS}"),
            (0 < self.mode_threshold <= 1, "mode_threshold must lie in (0, 1]"),
            (self.tau_schedule in TAU_SCHEDULES, f"tau_schedule must be one of {TAU_SCHEDULES}"),
            (self.node_count >= 1, "node_count must be positive"),
            (self.embedding_dim >= 1, "embedding_dim must be positive"),
            (bool(self.modalities) and set(self.modalities) <= set(MODALITIES), "bad modalities"),
            (len(set(self.modalities)) == len(self.modalities), "duplicate modalities"),
            (self.neighbors >= 0 and self.cross_neighbors >= 0, "neighbor counts must be nonnegative"),
            (self.joint_edges >= 0, "joint_edges must be nonnegative"),
            (self.decay_points >= 3, "decay_points must be at least 3"),
            (self.decay_tau_span > 0, "decay_tau_span must be positive"),
        ]
        for ok, message in checks:
            if not ok:
                raise ConfigError(message)

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        out["coupling"] = self.coupling.to_dict()
        out["modalities"] = list(self.modalities)
        return out


def diffusion_time(config: SweepConfig, schedule: Schedule, temperature: float) -> float:
    """Diffusion time at a schedule step; grows as the temperature anneals."""
    if config.tau_schedule == "fixed":
        return config.tau
    return config.tau * schedule.T0 / temperature


def _t_grid(value) -> tuple[float, ...]:
    if isinstance(value, dict):
        try:
            return tuple(np.round(np.linspace(value["start"], value["stop"], int(value["num"])), 10))
        except KeyError as exc:
            raise ConfigError(f"t_grid range needs start/stop/num, missing {exc}") from None
    return tuple(value)


def config_from_dict(data: dict[str, Any]) -> tuple[SweepConfig, Schedule]:
    """Split a parsed config document into sweep settings and schedule."""
    data = dict(data)
    sched = dict(data.pop("schedule", {}))
    if "t_grid" in sched:
        sched["t_grid"] = _t_grid(sched["t_grid"])
    known = {f.name for f in fields(SweepConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    unknown = set(sched) - {f.name for f in fields(Schedule)}
    if unknown:
        raise ConfigError(f"unknown schedule fields: {sorted(unknown)}")
    try:
        return SweepConfig(**data), Schedule(**sched)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: str | Path) -> tuple[SweepConfig, Schedule]:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return config_from_dict(data)


def apply_overrides(config: SweepConfig, **overrides) -> SweepConfig:
    overrides = {k: v for k, v in overrides.items() if v is not None}
    try:
        return replace(config, **overrides)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def config_to_dict(config: SweepConfig, schedule: Schedule) -> dict[str, Any]:
    out = config.to_dict()
    out["schedule"] = {"T0": schedule.T0, "gamma": schedule.gamma, "t_grid": list(schedule.t_grid)}
    return out
