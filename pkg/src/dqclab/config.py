"""Experiment configuration: defaults, JSON loading, validation.

The shipped default configuration reproduces the reference experiment
grid: 3 dataset presets, 4 architectures, 10 seeds, 8 qubits x 10
layers, 1000-row datasets split 700/150/150, SPSA for 1000 iterations
with 64-sample batches, 1000 shots, depolarizing p = 0.03 at test time,
and 4 QPUs of 2 data + 2 communication qubits.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from .ansatz import ArchKind, Architecture
from .data import PRESETS
from .dqc import Topology
from .qml import SpsaConfig, TrainConfig

SPLIT_FRACTIONS = (0.70, 0.15, 0.15)

FAST_SHOTS = 200


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    datasets: tuple[tuple[int, int], ...] = ((1, 0), (2, 0), (3, 0))
    architectures: tuple[str, ...] = (
        "baseline", "fully_entangled", "alternating", "alternating2",
    )
    seeds: tuple[int, ...] = tuple(range(10))
    n_qubits: int = 8
    n_layers: int = 10
    global_period: int = 4
    dataset_size: int = 1000
    split: tuple[float, float, float] = SPLIT_FRACTIONS
    train: TrainConfig = field(default_factory=TrainConfig)
    noise_p: float = 0.03
    topology: Topology = field(default_factory=Topology)
    exact_train: bool = True
    test_subsample: int | None = None
    output_dir: str = "out"

    def __post_init__(self) -> None:
        if not self.datasets:
            raise ConfigError("datasets must be non-empty")
        for entry in self.datasets:
            if len(entry) != 2:
                raise ConfigError(f"dataset entries are (preset_id, seed): {entry!r}")
            preset_id, data_seed = entry
            if preset_id not in PRESETS:
                raise ConfigError(f"unknown dataset preset {preset_id}")
            if data_seed < 0:
                raise ConfigError(f"dataset seed must be non-negative: {entry!r}")
        presets = [p for p, _ in self.datasets]
        if len(set(presets)) != len(presets):
            raise ConfigError("dataset presets must be unique (they name output dirs)")
        if not self.architectures:
            raise ConfigError("architectures must be non-empty")
        for name in self.architectures:
            try:
                ArchKind(name)
            except ValueError:
                raise ConfigError(
                    f"unknown architecture {name!r}; valid: "
                    f"{[k.value for k in ArchKind]}"
                ) from None
        if len(set(self.architectures)) != len(self.architectures):
            raise ConfigError("duplicate architecture names")
        if not self.seeds:
            raise ConfigError("seeds must be non-empty")
        if any(s < 0 for s in self.seeds):
            raise ConfigError("seeds must be non-negative")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError("duplicate seeds")
        if not 0.0 <= self.noise_p <= 1.0:
            raise ConfigError(f"noise_p must be in [0, 1], got {self.noise_p}")
        if self.dataset_size < 7:
            raise ConfigError(f"dataset_size too small to split: {self.dataset_size}")
        if tuple(self.split) != SPLIT_FRACTIONS:
            raise ConfigError(
                f"split fractions are fixed at {SPLIT_FRACTIONS}; got {self.split}"
            )
        if self.test_subsample is not None and self.test_subsample < 1:
            raise ConfigError(f"test_subsample must be >= 1, got {self.test_subsample}")
        if self.n_qubits != 8:
            raise ConfigError("n_qubits is fixed at 8 (one feature per qubit)")
        if self.n_layers < 1 or self.global_period < 1:
            raise ConfigError("n_layers and global_period must be >= 1")

    def architecture(self, name: str) -> Architecture:
        return Architecture(
            kind=ArchKind(name),
            n_qubits=self.n_qubits,
            n_layers=self.n_layers,
            global_period=self.global_period,
        )

    def fast(self) -> "ExperimentConfig":
        """CI variant: shot counts capped at FAST_SHOTS."""
        shots = min(self.train.shots, FAST_SHOTS)
        return replace(self, train=replace(self.train, shots=shots))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["datasets"] = [list(e) for e in self.datasets]
        d["architectures"] = list(self.architectures)
        d["seeds"] = list(self.seeds)
        d["split"] = list(self.split)
        return d


def _build_train(raw: dict) -> TrainConfig:
    spsa_raw = raw.pop("spsa", {})
    if not isinstance(spsa_raw, dict):
        raise ConfigError(f"train.spsa must be an object, got {spsa_raw!r}")
    try:
        spsa = SpsaConfig(**spsa_raw)
        return TrainConfig(spsa=spsa, **raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid train section: {exc}") from exc


def _expand_flat_keys(raw: dict) -> dict:
    """Allow dotted path keys: {"train.shots": 200} -> {"train": {"shots": 200}}."""
    out: dict = {}
    for key, value in raw.items():
        parts = key.split(".")
        node = out
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"key path {key!r} conflicts with a scalar value")
        leaf = parts[-1]
        if leaf in node:
            if isinstance(node[leaf], dict) and isinstance(value, dict):
                node[leaf].update(value)
                continue
            raise ConfigError(f"duplicate config key {key!r}")
        node[leaf] = value
    return out


def config_from_dict(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError(f"config root must be an object, got {type(raw).__name__}")
    raw = _expand_flat_keys(raw)
    kwargs: dict = {}
    if "datasets" in raw:
        kwargs["datasets"] = tuple(tuple(e) for e in raw.pop("datasets"))
    for key in ("architectures", "seeds", "split"):
        if key in raw:
            kwargs[key] = tuple(raw.pop(key))
    if "train" in raw:
        train_raw = raw.pop("train")
        if not isinstance(train_raw, dict):
            raise ConfigError(f"train must be an object, got {train_raw!r}")
        kwargs["train"] = _build_train(dict(train_raw))
    if "topology" in raw:
        topo_raw = raw.pop("topology")
        try:
            kwargs["topology"] = Topology(**topo_raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid topology section: {exc}") from exc
    for key in ("n_qubits", "n_layers", "global_period", "dataset_size",
                "noise_p", "exact_train", "test_subsample", "output_dir"):
        if key in raw:
            kwargs[key] = raw.pop(key)
    if raw:
        raise ConfigError(f"unknown config keys: {sorted(raw)}")
    try:
        return ExperimentConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"invalid config: {exc}") from exc


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    return config_from_dict(raw)


def save_config(config: ExperimentConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n")
