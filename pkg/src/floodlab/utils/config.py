"""
Pipeline configuration: defaults, the --config file and command line overrides.
"""

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

import yaml
from loguru import logger

from floodlab.models.architectures import ArchName
from floodlab.nn.training import TrainConfig
from floodlab.preprocess.matrix import SplitSpec
from floodlab.simcore.config import Scenario, ScenarioConfig
from floodlab.utils.constants import STAGE_INDEX
from floodlab.utils.exceptions import ConfigError

CONFIG_SECTIONS = ("scenario", "split", "train", "models", "runs", "seed")

# the per-run keys the pipeline sets itself
_RUN_KEYS = ("scenario", "seed")


def stage_seed(master: int, stage: str) -> int:
    """Master seed plus the fixed index of the stage."""
    try:
        return int(master) + STAGE_INDEX[stage]
    except KeyError:
        raise ConfigError(f"unknown stage {stage!r}") from None


@dataclass(frozen=True)
class PipelineConfig:
    """
    All settings of a pipeline run.

    Attributes:
        scenario (Dict[str, Any]): ScenarioConfig values shared by both scenarios.
        split (Dict[str, Any]): SplitSpec fractions.
        train (Dict[str, Any]): TrainConfig hyperparameters.
        models (Tuple[ArchName, ...]): Architectures to train, in report order.
        runs (int): Simulation replications per scenario.
        seed (int): Master seed every stage seed derives from.
    """

    scenario: Dict[str, Any] = field(default_factory=dict)
    split: Dict[str, Any] = field(default_factory=dict)
    train: Dict[str, Any] = field(default_factory=dict)
    models: Tuple[ArchName, ...] = (ArchName.CNN, ArchName.FNN)
    runs: int = 1
    seed: int = 0

    def __post_init__(self):
        for key in _RUN_KEYS:
            if key in self.scenario:
                raise ConfigError(f"scenario.{key} is set per run; use --scenario and --seed instead")
        try:
            models = tuple(m if isinstance(m, ArchName) else ArchName(str(m).lower()) for m in self.models)
        except ValueError as e:
            raise ConfigError(f"unknown model in {list(self.models)}") from e
        if not models:
            raise ConfigError("at least one model must be selected")
        object.__setattr__(self, "models", models)
        if int(self.runs) < 1:
            raise ConfigError(f"runs must be at least 1, got {self.runs}")
        # fail early on bad sections
        self.scenario_config(Scenario.NORMAL).validate()
        self.split_spec()
        self.train_config()

    def scenario_config(self, scenario: Union[Scenario, str], run: int = 0) -> ScenarioConfig:
        """Configuration of replication run of one scenario."""
        values = dict(self.scenario)
        values["scenario"] = Scenario(scenario).value
        values["seed"] = stage_seed(self.seed, "simulate") + run
        return ScenarioConfig.from_dict(values)

    def simulation_runs(self, scenarios=(Scenario.NORMAL, Scenario.DDOS)):
        return [self.scenario_config(s, r) for s in scenarios for r in range(self.runs)]

    def split_spec(self) -> SplitSpec:
        values = dict(self.split)
        if "seed" in values:
            raise ConfigError("split.seed derives from the master seed")
        unknown = set(values) - {f.name for f in dataclasses.fields(SplitSpec)}
        if unknown:
            raise ConfigError(f"unknown split keys: {sorted(unknown)}")
        return SplitSpec(**values, seed=stage_seed(self.seed, "preprocess"))

    def train_config(self) -> TrainConfig:
        if "seed" in self.train:
            raise ConfigError("train.seed derives from the master seed")
        return TrainConfig.from_dict({**self.train, "seed": stage_seed(self.seed, "train")})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "scenario": dict(self.scenario),
            "split": dict(self.split),
            "train": dict(self.train),
            "models": [m.value for m in self.models],
            "runs": self.runs,
            "seed": self.seed,
        }


def load_config(path: Optional[Union[str, Path]]) -> Dict[str, Any]:
    """
    Read a YAML or JSON configuration file.

    Args:
        path (Optional[Union[str, Path]]): File to read; None gives an empty mapping.

    Returns:
        Dict[str, Any]: The top-level sections.

    Raises:
        ConfigError: Unreadable file, not a mapping, or unknown sections.
    """
    if path is None:
        return {}
    try:
        with open(path) as f:
            values = yaml.safe_load(f)
    except (OSError, yaml.YAMLError) as e:
        raise ConfigError(f"could not read config {path}: {e}") from e
    if values is None:
        return {}
    if not isinstance(values, dict):
        raise ConfigError(f"config {path} must be a mapping, got {type(values).__name__}")
    unknown = set(values) - set(CONFIG_SECTIONS)
    if unknown:
        raise ConfigError(f"unknown config sections in {path}: {sorted(unknown)}")
    logger.info(f"Read configuration from {path}")
    return values


def merge(base: Mapping[str, Any], overrides: Mapping[str, Any]) -> Dict[str, Any]:
    """Nested merge; None values in overrides leave base untouched."""
    merged = dict(base)
    for key, value in overrides.items():
        if value is None:
            continue
        if isinstance(value, Mapping):
            current = merged.get(key)
            merged[key] = merge(current if isinstance(current, Mapping) else {}, value)
        else:
            merged[key] = value
    return merged


def build_config(path: Optional[Union[str, Path]], overrides: Mapping[str, Any]) -> PipelineConfig:
    """
    Defaults, then the config file, then command line flags.

    Args:
        path (Optional[Union[str, Path]]): --config file.
        overrides (Mapping[str, Any]): Flag values in the config file layout; None means not given.

    Returns:
        PipelineConfig: The validated configuration.
    """
    file_values = load_config(path)
    for section in ("scenario", "split", "train"):
        if file_values.get(section) is not None and not isinstance(file_values[section], Mapping):
            raise ConfigError(f"config section {section} must be a mapping")
    values = merge(file_values, overrides)
    try:
        return PipelineConfig(**values)
    except TypeError as e:
        raise ConfigError(str(e)) from e
