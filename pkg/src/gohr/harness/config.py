"""Experiment configuration: defaults, file loading, flag overrides."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from ..board import ConfigError
from ..encoders import EncoderConfig
from ..learner.a2c import Hyperparams
from ..learner.transformer import TransformerConfig
from ..metrics import MetricParams
from ..rules import resolve_rule

DEFAULT_SEEDS = (1, 2, 3, 4, 5)


@dataclass
class ExperimentConfig:
    kind: str = "independent"  # independent | transfer | generalization
    rules: tuple = ()
    trial_lists: tuple = ()  # trial-list texts (one per curriculum)
    representation: str = "FC"
    n_hist: int = 6
    hyperparams: Hyperparams = field(default_factory=Hyperparams)
    metric_params: MetricParams = field(default_factory=MetricParams)
    net: TransformerConfig = field(default_factory=TransformerConfig)
    seeds: tuple = DEFAULT_SEEDS
    out_dir: str = "runs"
    workers: int = 1
    collect_verdicts: bool = False
    eval_episodes: int = 40  # generalization evaluation batch (1:1 train/test)

    def __post_init__(self):
        if self.representation not in ("FC", "OC"):
            raise ConfigError(f"unknown representation: {self.representation}")
        for name in self.rules:
            resolve_rule(name)

    @property
    def encoder(self) -> EncoderConfig:
        return EncoderConfig(n_hist=self.n_hist)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["rules"] = list(self.rules)
        d["trial_lists"] = list(self.trial_lists)
        d["seeds"] = list(self.seeds)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        if "hyperparams" in data and isinstance(data["hyperparams"], dict):
            data["hyperparams"] = Hyperparams(**data["hyperparams"])
        if "metric_params" in data and isinstance(data["metric_params"], dict):
            data["metric_params"] = MetricParams(**data["metric_params"])
        if "net" in data and isinstance(data["net"], dict):
            data["net"] = TransformerConfig(**data["net"])
        for key in ("rules", "trial_lists", "seeds"):
            if key in data and isinstance(data[key], list):
                data[key] = tuple(data[key])
        return cls(**data)

    @classmethod
    def from_file(cls, path, overrides: dict | None = None) -> "ExperimentConfig":
        with open(path) as fh:
            data = json.load(fh)
        data.update(overrides or {})
        return cls.from_dict(data)
