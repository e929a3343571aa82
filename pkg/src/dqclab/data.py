"""Synthetic binary-classification data: generation, splits, scaling.

Three presets of increasing difficulty. A preset places the two class
centroids at opposite corners of a class_sep-scaled hypercube in an
n_informative-dimensional subspace and adds unit Gaussian noise; the
remaining features are split between redundant ones (random normalized
linear combinations of the informative block) and pure noise. Fewer
informative dimensions and smaller separation make the task harder.

Splitting is a seeded shuffled partition in 70/15/15 proportion.
Feature scaling is per-feature min-max onto the rotation-encoding range
[-pi, pi], fitted on the training split only; out-of-range values in
other splits are clamped.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .engine import derive_seed
from .qml import LabeledBatch, one_hot

N_FEATURES = 8
ENCODING_RANGE = (-np.pi, np.pi)

# internal stream tags so generate/split with equal seeds stay independent
_GEN_STREAM = 1
_SPLIT_STREAM = 2


@dataclass(frozen=True)
class DataPreset:
    n_informative: int
    class_sep: float


PRESETS: dict[int, DataPreset] = {
    1: DataPreset(n_informative=8, class_sep=2.0),
    2: DataPreset(n_informative=5, class_sep=1.5),
    3: DataPreset(n_informative=3, class_sep=1.0),
}


@dataclass(frozen=True)
class Dataset:
    X: np.ndarray
    y: np.ndarray
    preset_id: int
    seed: int

    def __len__(self) -> int:
        return self.X.shape[0]

    @property
    def labels(self) -> np.ndarray:
        return np.argmax(self.y, axis=1)


@dataclass(frozen=True)
class Splits:
    train: LabeledBatch
    validation: LabeledBatch
    test: LabeledBatch


def generate(preset_id: int, seed: int, n_rows: int = 1000) -> Dataset:
    """Balanced labeled dataset; bit-identical for equal (preset, seed)."""
    if preset_id not in PRESETS:
        raise ValueError(f"unknown preset {preset_id}, choose from {sorted(PRESETS)}")
    if n_rows < 2:
        raise ValueError(f"n_rows must be >= 2, got {n_rows}")
    preset = PRESETS[preset_id]
    rng = np.random.default_rng(derive_seed(_GEN_STREAM, preset_id, seed))
    n_zero = n_rows // 2
    labels = np.repeat([0, 1], [n_zero, n_rows - n_zero])
    signs = np.where(labels == 0, 1.0, -1.0)[:, None]
    n_inf = preset.n_informative
    x_inf = rng.normal(size=(n_rows, n_inf)) + signs * preset.class_sep
    blocks = [x_inf]
    n_rest = N_FEATURES - n_inf
    n_redundant = (n_rest + 1) // 2
    if n_redundant:
        w = rng.normal(size=(n_inf, n_redundant))
        w /= np.linalg.norm(w, axis=0)
        blocks.append(x_inf @ w)
    n_noise = n_rest - n_redundant
    if n_noise:
        blocks.append(rng.normal(size=(n_rows, n_noise)))
    x = np.hstack(blocks)
    perm = rng.permutation(n_rows)
    return Dataset(X=x[perm], y=one_hot(labels[perm]), preset_id=preset_id, seed=seed)


def split(dataset: Dataset, seed: int) -> Splits:
    """Shuffled 70/15/15 partition, deterministic in ``seed``."""
    n = len(dataset)
    n_train = int(n * 0.70)
    n_val = int(n * 0.15)
    if n_train < 1 or n_val < 1 or n - n_train - n_val < 1:
        raise ValueError(f"dataset of {n} rows is too small to split")
    perm = np.random.default_rng(derive_seed(_SPLIT_STREAM, seed)).permutation(n)
    parts = np.split(perm, [n_train, n_train + n_val])
    return Splits(
        train=LabeledBatch(dataset.X[parts[0]], dataset.y[parts[0]]),
        validation=LabeledBatch(dataset.X[parts[1]], dataset.y[parts[1]]),
        test=LabeledBatch(dataset.X[parts[2]], dataset.y[parts[2]]),
    )


@dataclass(frozen=True)
class FeatureScaler:
    """Per-feature affine map of the train range onto [-pi, pi]."""

    lo: np.ndarray
    hi: np.ndarray

    @classmethod
    def fit(cls, X: np.ndarray) -> "FeatureScaler":
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[0] == 0:
            raise ValueError(f"need a non-empty 2-D matrix, got shape {X.shape}")
        if not np.all(np.isfinite(X)):
            raise ValueError("features must be finite")
        return cls(lo=X.min(axis=0), hi=X.max(axis=0))

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        a, b = ENCODING_RANGE
        span = self.hi - self.lo
        with np.errstate(invalid="ignore", divide="ignore"):
            unit = (X - self.lo) / span
        unit = np.where(span == 0.0, 0.5, unit)  # constant feature maps to 0
        return np.clip(a + (b - a) * unit, a, b)


def scale_features(splits: Splits) -> tuple[Splits, FeatureScaler]:
    """Scale all splits with min-max parameters fitted on train only."""
    scaler = FeatureScaler.fit(splits.train.X)
    return Splits(
        train=LabeledBatch(scaler.transform(splits.train.X), splits.train.y),
        validation=LabeledBatch(scaler.transform(splits.validation.X), splits.validation.y),
        test=LabeledBatch(scaler.transform(splits.test.X), splits.test.y),
    ), scaler


# -- CSV persistence ------------------------------------------------------


def write_csv(batch_x: np.ndarray, labels: np.ndarray, path: str | Path) -> None:
    """``f0..f7,label`` rows; float text round-trips exactly."""
    batch_x = np.asarray(batch_x, dtype=np.float64)
    labels = np.asarray(labels)
    if batch_x.ndim != 2 or batch_x.shape[0] != labels.shape[0]:
        raise ValueError(
            f"row mismatch: {batch_x.shape} features vs {labels.shape} labels"
        )
    header = ",".join(f"f{i}" for i in range(batch_x.shape[1])) + ",label"
    lines = [header]
    for row, lab in zip(batch_x, labels):
        lines.append(",".join(repr(float(v)) for v in row) + f",{int(lab)}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of ``write_csv``: features and integer labels."""
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("f0"):
        raise ValueError(f"{path}: missing f0..,label header")
    n_features = len(lines[0].split(",")) - 1
    x_rows = []
    labels = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != n_features + 1:
            raise ValueError(f"{path}: malformed row {ln!r}")
        x_rows.append([float(v) for v in parts[:-1]])
        labels.append(int(parts[-1]))
    return np.asarray(x_rows, dtype=np.float64), np.asarray(labels, dtype=np.intp)
