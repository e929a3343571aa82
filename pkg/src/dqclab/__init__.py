"""Distributed quantum computing lab.

Statevector simulation with mid-circuit measurement and trajectory
noise, variational circuit architectures, a monolithic-to-distributed
circuit rewriter built on the remote-CX protocol, and an SPSA-trained
binary classifier with a reproducible experiment harness.
"""

from .ansatz import ArchKind, Architecture, build, entangling_gate_census, parameter_count
from .backend import backend_name
from .circuit import (
    Circuit,
    Gate,
    GateKind,
    ParameterRef,
    ParamSpace,
    compact_qubits,
    dump_text,
    parse_text,
    strip_terminal_measurements,
)
from .config import ConfigError, ExperimentConfig, config_from_dict, load_config, save_config
from .data import Dataset, Splits, generate, read_csv, scale_features, split, write_csv
from .dqc import Topology, allocate, count_remote, remote_cx_sequence, transform
from .engine import (
    CompiledCircuit,
    NoiseConfig,
    SampleResult,
    ShotResult,
    SimulationError,
    derive_seed,
    exact_expectations_z,
    run_once,
    sample,
    state_z_expectations,
)
from .experiment import ExperimentError, prepare_datasets, report, run_all, run_test, run_train
from .qml import (
    LabeledBatch,
    Mode,
    SpsaConfig,
    TrainConfig,
    TrainingDiverged,
    cost,
    cross_entropy,
    evaluate_accuracy,
    forward,
    initial_theta,
    softmax,
    spsa_minimize,
    train_classifier,
)

__version__ = "0.1.0"

__all__ = [
    "ArchKind",
    "Architecture",
    "Circuit",
    "CompiledCircuit",
    "ConfigError",
    "Dataset",
    "ExperimentConfig",
    "ExperimentError",
    "Gate",
    "GateKind",
    "LabeledBatch",
    "Mode",
    "NoiseConfig",
    "ParamSpace",
    "ParameterRef",
    "SampleResult",
    "ShotResult",
    "SimulationError",
    "Splits",
    "SpsaConfig",
    "Topology",
    "TrainConfig",
    "TrainingDiverged",
    "allocate",
    "backend_name",
    "build",
    "compact_qubits",
    "config_from_dict",
    "cost",
    "count_remote",
    "cross_entropy",
    "derive_seed",
    "dump_text",
    "entangling_gate_census",
    "evaluate_accuracy",
    "exact_expectations_z",
    "forward",
    "generate",
    "initial_theta",
    "load_config",
    "parameter_count",
    "parse_text",
    "prepare_datasets",
    "read_csv",
    "report",
    "run_all",
    "run_once",
    "run_test",
    "run_train",
    "sample",
    "save_config",
    "scale_features",
    "softmax",
    "split",
    "spsa_minimize",
    "state_z_expectations",
    "strip_terminal_measurements",
    "train_classifier",
    "transform",
    "write_csv",
    "__version__",
]
