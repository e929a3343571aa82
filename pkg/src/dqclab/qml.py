"""Variational binary classifier: model, loss, SPSA, accuracy.

The model output for one sample is the pair of Z expectations on the
readout qubits; class probabilities come from a softmax over that pair
and training minimizes cross-entropy with SPSA, which needs only two
cost evaluations per iteration regardless of parameter count.

Execution modes pair the circuit form (monolithic vs distributed over
the QPU topology) with the noise setting (ideal vs depolarizing noise
on every gate). Ideal modes default to exact statevector expectations;
noisy modes always estimate from shot trajectories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np

from .ansatz import Architecture, build, parameter_count
from .circuit import compact_qubits, strip_terminal_measurements
from .dqc import Topology, allocate, transform
from .engine import (
    CompiledCircuit,
    NoiseConfig,
    derive_seed,
    sample_compiled,
    state_z_expectations,
)

DEFAULT_NOISE_P = 0.03


class Mode(Enum):
    MONOLITHIC_IDEAL = "monolithic_ideal"
    MONOLITHIC_NOISY = "monolithic_noisy"
    DISTRIBUTED_IDEAL = "distributed_ideal"
    DISTRIBUTED_NOISY = "distributed_noisy"

    @property
    def is_distributed(self) -> bool:
        return self in (Mode.DISTRIBUTED_IDEAL, Mode.DISTRIBUTED_NOISY)

    @property
    def is_noisy(self) -> bool:
        return self in (Mode.MONOLITHIC_NOISY, Mode.DISTRIBUTED_NOISY)


@dataclass(frozen=True)
class LabeledBatch:
    """Feature rows with one-hot labels."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        X = np.asarray(self.X, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.float64)
        if X.ndim != 2 or y.ndim != 2:
            raise ValueError(f"X and y must be 2-D, got shapes {X.shape}, {y.shape}")
        if X.shape[0] != y.shape[0]:
            raise ValueError(f"row mismatch: {X.shape[0]} features vs {y.shape[0]} labels")
        if y.size and not (
            np.all((y == 0.0) | (y == 1.0)) and np.all(y.sum(axis=1) == 1.0)
        ):
            raise ValueError("labels must be one-hot rows")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    def __len__(self) -> int:
        return self.X.shape[0]

    def take(self, idx) -> "LabeledBatch":
        return LabeledBatch(self.X[idx], self.y[idx])

    @property
    def labels(self) -> np.ndarray:
        return np.argmax(self.y, axis=1)


def one_hot(labels, n_classes: int = 2) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.intp)
    if labels.size and (labels.min() < 0 or labels.max() >= n_classes):
        raise ValueError(f"labels out of range for {n_classes} classes")
    out = np.zeros((labels.size, n_classes))
    out[np.arange(labels.size), labels] = 1.0
    return out


@dataclass(frozen=True)
class SpsaConfig:
    """Spall-family gain schedules: a_k = a/(k+1+A)^alpha, c_k = c/(k+1)^gamma.

    A defaults to 1% of the iteration count when left unset.
    """

    a: float = 0.2
    c: float = 0.1
    alpha: float = 0.602
    gamma: float = 0.101
    A: float | None = None

    def __post_init__(self) -> None:
        if self.a <= 0 or self.c <= 0 or self.alpha <= 0 or self.gamma <= 0:
            raise ValueError("SPSA coefficients a, c, alpha, gamma must be positive")
        if self.A is not None and self.A < 0:
            raise ValueError(f"A must be non-negative, got {self.A}")

    def stability_offset(self, iterations: int) -> float:
        return 0.01 * iterations if self.A is None else self.A


@dataclass(frozen=True)
class TrainConfig:
    iterations: int = 1000
    batch_size: int = 64
    shots: int = 1000
    spsa: SpsaConfig = field(default_factory=SpsaConfig)
    eval_every: int = 10
    seed: int = 0

    def __post_init__(self) -> None:
        if self.iterations < 0:
            raise ValueError(f"iterations must be >= 0, got {self.iterations}")
        if self.batch_size < 1 or self.shots < 1:
            raise ValueError("batch_size and shots must be >= 1")
        if self.eval_every < 1:
            raise ValueError(f"eval_every must be >= 1, got {self.eval_every}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")


@dataclass(frozen=True)
class HistoryRow:
    iteration: int
    loss: float
    val_accuracy: float | None


class TrainingDiverged(RuntimeError):
    """Cost became non-finite; carries the partial history for inspection."""

    def __init__(self, message: str, theta: np.ndarray, history: list[HistoryRow]):
        super().__init__(message)
        self.theta = theta
        self.history = history


# -- model ---------------------------------------------------------------


@dataclass(frozen=True)
class _ModeCircuits:
    sampled: CompiledCircuit
    exact: CompiledCircuit
    readout_qubits: tuple[int, ...]


@lru_cache(maxsize=64)
def _model_circuits(arch: Architecture, topo: Topology, distributed: bool) -> _ModeCircuits:
    mono = build(arch)
    stripped = strip_terminal_measurements(mono)
    if distributed:
        alloc = allocate(arch.n_qubits, topo)
        phys = alloc.logical_to_physical
        # second comm qubit per QPU is idle; compacting it away shrinks
        # the simulated state without touching any outcome
        sampled, _ = compact_qubits(transform(mono, topo))
        exact, kept = compact_qubits(transform(stripped, topo))
        readout = tuple(kept.index(phys[q]) for q in arch.measured_qubits)
        return _ModeCircuits(
            sampled=CompiledCircuit.from_circuit(sampled),
            exact=CompiledCircuit.from_circuit(exact),
            readout_qubits=readout,
        )
    return _ModeCircuits(
        sampled=CompiledCircuit.from_circuit(mono),
        exact=CompiledCircuit.from_circuit(stripped),
        readout_qubits=arch.measured_qubits,
    )


def forward(theta, x, arch: Architecture, mode: Mode, shots: int = 1000,
            seed: int = 0, *, noise_p: float = DEFAULT_NOISE_P,
            exact: bool = True, topo: Topology = Topology()) -> np.ndarray:
    """Readout-qubit Z expectations for one sample.

    Ideal modes return exact statevector expectations when ``exact``
    (shot-free); otherwise, and always in noisy modes, the estimate is
    (N0 - N1)/shots over `shots` trajectories seeded by ``seed``.
    """
    x = np.asarray(x, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    if x.shape != (arch.n_qubits,):
        raise ValueError(f"x must have shape ({arch.n_qubits},), got {x.shape}")
    n_params = parameter_count(arch)
    if theta.shape != (n_params,):
        raise ValueError(f"theta must have shape ({n_params},), got {theta.shape}")
    mc = _model_circuits(arch, topo, mode.is_distributed)
    k = len(arch.measured_qubits)
    if not mode.is_noisy and exact:
        comp = mc.exact
        c_half, s_half = comp.bind_tables(x, theta)
        r = comp.run(c_half, s_half, base_seed=seed)
        return state_z_expectations(r.state, mc.readout_qubits)
    comp = mc.sampled
    c_half, s_half = comp.bind_tables(x, theta)
    noise = NoiseConfig(noise_p) if mode.is_noisy else None
    res = sample_compiled(comp, c_half, s_half, shots, noise, base_seed=seed)
    return res.z_expectations()[:k]


def forward_batch(theta, X, arch: Architecture, mode: Mode, shots: int = 1000,
                  seed: int = 0, **kwargs) -> np.ndarray:
    """Stacked forward over rows; row i runs under derive_seed(seed, i)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"X must be 2-D, got shape {X.shape}")
    out = np.empty((X.shape[0], len(arch.measured_qubits)))
    for i in range(X.shape[0]):
        out[i] = forward(theta, X[i], arch, mode, shots, derive_seed(seed, i), **kwargs)
    return out


# -- loss ----------------------------------------------------------------


def softmax(z: np.ndarray) -> np.ndarray:
    """Stabilized softmax over the last axis."""
    z = np.asarray(z, dtype=np.float64)
    shifted = z - z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def cross_entropy(y: np.ndarray, p: np.ndarray) -> float:
    """Mean negative log-likelihood of one-hot rows under probabilities p."""
    y = np.asarray(y, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    if y.shape != p.shape:
        raise ValueError(f"shape mismatch: y {y.shape} vs p {p.shape}")
    if y.ndim != 2 or y.shape[0] == 0:
        raise ValueError(f"expected non-empty 2-D arrays, got shape {y.shape}")
    clamped = np.maximum(p, 1e-12)
    return float(-(y * np.log(clamped)).sum() / y.shape[0])


def cost(theta, batch: LabeledBatch, arch: Architecture, mode: Mode,
         shots: int = 1000, seed: int = 0, **kwargs) -> float:
    """Cross-entropy of softmaxed model outputs over the batch."""
    if len(batch) == 0:
        raise ValueError("empty batch")
    expectations = forward_batch(theta, batch.X, arch, mode, shots, seed, **kwargs)
    return cross_entropy(batch.y, softmax(expectations))


def evaluate_accuracy(theta, split: LabeledBatch, arch: Architecture, mode: Mode,
                      shots: int = 1000, seed: int = 0, **kwargs) -> float:
    """Fraction of rows whose argmax expectation matches the label.

    argmax over raw expectations equals argmax over softmax
    probabilities; ties go to class 0.
    """
    if len(split) == 0:
        raise ValueError("empty split")
    expectations = forward_batch(theta, split.X, arch, mode, shots, seed, **kwargs)
    predictions = np.argmax(expectations, axis=1)
    return float(np.mean(predictions == split.labels))


# -- optimizer -----------------------------------------------------------


def spsa_minimize(cost_fn, theta0, iterations: int,
                  config: SpsaConfig | None = None,
                  rng: np.random.Generator | None = None,
                  eval_fn=None, eval_every: int = 10
                  ) -> tuple[np.ndarray, list[HistoryRow]]:
    """Simultaneous-perturbation stochastic approximation.

    cost_fn(theta, k) is evaluated twice per iteration at theta +- c_k
    Delta with a shared Rademacher Delta; the recorded loss is the mean
    of the two evaluations. eval_fn(theta, k), when given, runs every
    ``eval_every`` iterations and at the last one.
    """
    theta = np.asarray(theta0, dtype=np.float64).copy()
    if theta.ndim != 1 or theta.size == 0:
        raise ValueError(f"theta0 must be a non-empty vector, got shape {theta.shape}")
    if iterations < 0:
        raise ValueError(f"iterations must be >= 0, got {iterations}")
    if eval_every < 1:
        raise ValueError(f"eval_every must be >= 1, got {eval_every}")
    config = SpsaConfig() if config is None else config
    rng = np.random.default_rng(0) if rng is None else rng
    big_a = config.stability_offset(iterations)
    history: list[HistoryRow] = []
    for k in range(iterations):
        a_k = config.a / (k + 1 + big_a) ** config.alpha
        c_k = config.c / (k + 1) ** config.gamma
        delta = rng.integers(0, 2, size=theta.size).astype(np.float64) * 2.0 - 1.0
        c_plus = float(cost_fn(theta + c_k * delta, k))
        c_minus = float(cost_fn(theta - c_k * delta, k))
        if not (math.isfinite(c_plus) and math.isfinite(c_minus)):
            raise TrainingDiverged(
                f"non-finite cost at iteration {k}: C+={c_plus}, C-={c_minus}",
                theta=theta, history=history,
            )
        g_hat = (c_plus - c_minus) / (2.0 * c_k) * delta
        theta = theta - a_k * g_hat
        val = None
        if eval_fn is not None and ((k + 1) % eval_every == 0 or k == iterations - 1):
            val = float(eval_fn(theta, k))
        history.append(HistoryRow(k, 0.5 * (c_plus + c_minus), val))
    return theta, history


def initial_theta(arch: Architecture, seed: int) -> np.ndarray:
    """Starting point for training: uniform angles over one full turn."""
    rng = np.random.default_rng(derive_seed(seed, 0))
    return rng.uniform(-np.pi, np.pi, parameter_count(arch))


def train_classifier(train: LabeledBatch, val: LabeledBatch | None,
                     arch: Architecture, mode: Mode, config: TrainConfig, *,
                     noise_p: float = DEFAULT_NOISE_P, exact: bool = True,
                     topo: Topology = Topology(),
                     theta0: np.ndarray | None = None
                     ) -> tuple[np.ndarray, list[HistoryRow]]:
    """Full training run, deterministic in config.seed.

    Each iteration samples one batch (without replacement) shared by the
    two SPSA evaluations; every stochastic choice derives from
    (config.seed, purpose, iteration) so reruns reproduce exactly.
    """
    if len(train) < config.batch_size:
        raise ValueError(
            f"batch_size {config.batch_size} exceeds training rows {len(train)}"
        )
    run_seed = config.seed
    if theta0 is None:
        theta0 = initial_theta(arch, run_seed)

    def cost_fn(theta: np.ndarray, k: int) -> float:
        batch_rng = np.random.default_rng(derive_seed(run_seed, 2, k))
        idx = batch_rng.choice(len(train), size=config.batch_size, replace=False)
        return cost(theta, train.take(idx), arch, mode, config.shots,
                    derive_seed(run_seed, 3, k), noise_p=noise_p, exact=exact,
                    topo=topo)

    eval_fn = None
    if val is not None:
        def eval_fn(theta: np.ndarray, k: int) -> float:
            return evaluate_accuracy(theta, val, arch, mode, config.shots,
                                     derive_seed(run_seed, 4, k), noise_p=noise_p,
                                     exact=exact, topo=topo)

    spsa_rng = np.random.default_rng(derive_seed(run_seed, 1))
    return spsa_minimize(cost_fn, theta0, config.iterations, config.spsa,
                         spsa_rng, eval_fn, config.eval_every)


def history_to_csv(history: list[HistoryRow]) -> str:
    """`iteration,loss,val_accuracy` rows; accuracy blank off-cadence."""
    lines = ["iteration,loss,val_accuracy"]
    for row in history:
        acc = "" if row.val_accuracy is None else repr(row.val_accuracy)
        lines.append(f"{row.iteration},{row.loss!r},{acc}")
    return "\n".join(lines) + "\n"
