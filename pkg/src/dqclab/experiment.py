"""Experiment harness over the (dataset, architecture, seed) grid.

Each grid cell trains one classifier monolithically under ideal
conditions, then scores the held-out test split both as the monolithic
ideal circuit (exact expectations) and as the distributed circuit under
depolarizing noise with finite shots. Artifacts live under

    out/<dataset>/<arch>/<seed>/{history.csv, theta.json, test.json}
    out/<dataset>/<arch>/validation_curve.csv
    out/<dataset>/dataset.csv
    out/test_accuracies.csv
    out/summary.json

Every stochastic choice is derived from the cell coordinates, so
outputs are byte-identical across reruns and worker counts; the only
exception is the generated_at timestamp in summary.json.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .ansatz import ArchKind, build
from .config import ExperimentConfig
from .data import Dataset, Splits, generate, read_csv, scale_features, split, write_csv
from .dqc import count_remote
from .engine import derive_seed
from .qml import (
    HistoryRow,
    Mode,
    TrainingDiverged,
    evaluate_accuracy,
    history_to_csv,
    one_hot,
    train_classifier,
)

_CELL_TRAIN_STREAM = 5
_CELL_TEST_STREAM = 6

ARCH_ORDER = tuple(kind.value for kind in ArchKind)


class ExperimentError(RuntimeError):
    """Missing pipeline artifact or failed grid cell."""


# -- layout ---------------------------------------------------------------


def dataset_tag(preset_id: int) -> str:
    return f"dataset{preset_id}"


def dataset_path(out_dir: str | Path, preset_id: int) -> Path:
    return Path(out_dir) / dataset_tag(preset_id) / "dataset.csv"


def cell_dir(out_dir: str | Path, preset_id: int, arch_name: str,
             run_seed: int) -> Path:
    return Path(out_dir) / dataset_tag(preset_id) / arch_name / str(run_seed)


def cell_train_seed(preset_id: int, data_seed: int, arch_name: str,
                    run_seed: int) -> int:
    arch_id = ARCH_ORDER.index(arch_name)
    return int(derive_seed(_CELL_TRAIN_STREAM, preset_id, data_seed, arch_id, run_seed))


def cell_test_seed(preset_id: int, data_seed: int, arch_name: str,
                   run_seed: int) -> int:
    arch_id = ARCH_ORDER.index(arch_name)
    return int(derive_seed(_CELL_TEST_STREAM, preset_id, data_seed, arch_id, run_seed))


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


# -- data stage -----------------------------------------------------------


def prepare_datasets(config: ExperimentConfig, out_dir: str | Path) -> list[Path]:
    """Materialize one raw (unscaled) CSV per configured dataset."""
    paths = []
    for preset_id, data_seed in config.datasets:
        ds = generate(preset_id, data_seed, config.dataset_size)
        path = dataset_path(out_dir, preset_id)
        path.parent.mkdir(parents=True, exist_ok=True)
        write_csv(ds.X, ds.labels, path)
        paths.append(path)
    return paths


def load_splits(config: ExperimentConfig, out_dir: str | Path, preset_id: int,
                data_seed: int) -> Splits:
    """Read a materialized dataset, split it, and scale to the encoding range."""
    path = dataset_path(out_dir, preset_id)
    if not path.exists():
        raise ExperimentError(f"dataset file missing: {path} (run gen-data first)")
    x, labels = read_csv(path)
    ds = Dataset(X=x, y=one_hot(labels), preset_id=preset_id, seed=data_seed)
    scaled, _ = scale_features(split(ds, data_seed))
    return scaled


# -- grid cells -----------------------------------------------------------


def run_train(config: ExperimentConfig, out_dir: str | Path, preset_id: int,
              data_seed: int, arch_name: str, run_seed: int) -> Path:
    """Train one cell; writes history.csv and theta.json, returns the cell dir.

    A non-finite loss aborts with the partial history preserved on disk
    next to a diverged.json marker.
    """
    splits = load_splits(config, out_dir, preset_id, data_seed)
    arch = config.architecture(arch_name)
    train_cfg = replace(config.train,
                        seed=cell_train_seed(preset_id, data_seed, arch_name, run_seed))
    cdir = cell_dir(out_dir, preset_id, arch_name, run_seed)
    cdir.mkdir(parents=True, exist_ok=True)
    try:
        theta, history = train_classifier(
            splits.train, splits.validation, arch, Mode.MONOLITHIC_IDEAL,
            train_cfg, noise_p=config.noise_p, exact=config.exact_train,
            topo=config.topology,
        )
    except TrainingDiverged as exc:
        (cdir / "history.csv").write_text(history_to_csv(exc.history))
        _write_json(cdir / "diverged.json",
                    {"error": str(exc), "iterations_done": len(exc.history)})
        raise ExperimentError(f"training diverged in {cdir}: {exc}") from exc
    (cdir / "history.csv").write_text(history_to_csv(history))
    _write_json(cdir / "theta.json", {
        "architecture": arch_name,
        "dataset_preset": preset_id,
        "data_seed": data_seed,
        "run_seed": run_seed,
        "train_seed": train_cfg.seed,
        "theta": [float(t) for t in theta],
    })
    return cdir


def run_test(config: ExperimentConfig, out_dir: str | Path, preset_id: int,
             data_seed: int, arch_name: str, run_seed: int) -> dict:
    """Score one trained cell on the test split; writes and returns test.json.

    monolithic_ideal uses exact expectations; distributed_noisy samples
    the transformed circuit with finite shots under depolarizing noise.
    """
    cdir = cell_dir(out_dir, preset_id, arch_name, run_seed)
    theta_path = cdir / "theta.json"
    if not theta_path.exists():
        raise ExperimentError(f"missing theta: {theta_path} (run train first)")
    theta = np.asarray(json.loads(theta_path.read_text())["theta"], dtype=np.float64)
    test = load_splits(config, out_dir, preset_id, data_seed).test
    if config.test_subsample is not None:
        test = test.take(np.arange(min(config.test_subsample, len(test))))
    arch = config.architecture(arch_name)
    seed = cell_test_seed(preset_id, data_seed, arch_name, run_seed)
    ideal = evaluate_accuracy(theta, test, arch, Mode.MONOLITHIC_IDEAL,
                              config.train.shots, seed, noise_p=config.noise_p,
                              exact=True, topo=config.topology)
    noisy = evaluate_accuracy(theta, test, arch, Mode.DISTRIBUTED_NOISY,
                              config.train.shots, seed, noise_p=config.noise_p,
                              topo=config.topology)
    record = {
        "architecture": arch_name,
        "dataset_preset": preset_id,
        "data_seed": data_seed,
        "run_seed": run_seed,
        "test_seed": seed,
        "n_test": len(test),
        "shots": config.train.shots,
        "noise_p": config.noise_p,
        "monolithic_ideal": ideal,
        "distributed_noisy": noisy,
        "remote_cx_count": count_remote(build(arch), config.topology),
    }
    _write_json(cdir / "test.json", record)
    return record


# -- aggregation ----------------------------------------------------------


def _read_history(path: Path) -> list[HistoryRow]:
    rows = []
    lines = path.read_text().splitlines()
    for line in lines[1:]:
        it, loss, acc = line.split(",")
        rows.append(HistoryRow(int(it), float(loss),
                               None if acc == "" else float(acc)))
    return rows


def _box_stats(values) -> dict:
    v = np.asarray(values, dtype=np.float64)
    q1, median, q3 = np.percentile(v, [25.0, 50.0, 75.0])
    return {
        "min": float(v.min()), "q1": float(q1), "median": float(median),
        "q3": float(q3), "max": float(v.max()),
        "mean": float(v.mean()), "std": float(v.std()),
    }


def _validation_curve_csv(histories: list[list[HistoryRow]]) -> str:
    """Mean and std of validation accuracy across seeds, per evaluated iteration."""
    per_seed = [
        {row.iteration: row.val_accuracy for row in h if row.val_accuracy is not None}
        for h in histories
    ]
    common = sorted(set.intersection(*(set(d) for d in per_seed))) if per_seed else []
    lines = ["iteration,mean,std"]
    for it in common:
        vals = np.array([d[it] for d in per_seed])
        lines.append(f"{it},{float(vals.mean())!r},{float(vals.std())!r}")
    return "\n".join(lines) + "\n"


def _discover_cells(out: Path):
    """Yield (dataset_tag, arch_name, seed, cell_dir) in sorted order."""
    for ds_dir in sorted(p for p in out.iterdir() if p.is_dir()):
        for arch_dir in sorted(p for p in ds_dir.iterdir() if p.is_dir()):
            seed_dirs = [p for p in arch_dir.iterdir()
                         if p.is_dir() and p.name.isdigit()]
            for seed_dir in sorted(seed_dirs, key=lambda p: int(p.name)):
                yield ds_dir.name, arch_dir.name, int(seed_dir.name), seed_dir


def report(out_dir: str | Path) -> Path:
    """Aggregate all records under out_dir; returns the summary.json path.

    Emits per-(dataset, architecture) validation curves, a flat
    test-accuracy table, and box-plot statistics over seeds.
    """
    out = Path(out_dir)
    if not out.is_dir():
        raise ExperimentError(f"output directory not found: {out}")
    records: dict[tuple[str, str], list[dict]] = {}
    histories: dict[tuple[str, str], list[list[HistoryRow]]] = {}
    for ds_tag, arch_name, _seed, cdir in _discover_cells(out):
        key = (ds_tag, arch_name)
        test_path = cdir / "test.json"
        if test_path.exists():
            records.setdefault(key, []).append(json.loads(test_path.read_text()))
        hist_path = cdir / "history.csv"
        if hist_path.exists():
            histories.setdefault(key, []).append(_read_history(hist_path))
    if not records:
        raise ExperimentError(f"no test records found under {out}")

    for (ds_tag, arch_name), hists in sorted(histories.items()):
        curve_path = out / ds_tag / arch_name / "validation_curve.csv"
        curve_path.write_text(_validation_curve_csv(hists))

    table = ["dataset,architecture,seed,monolithic_ideal,distributed_noisy,"
             "remote_cx_count"]
    for (ds_tag, arch_name), recs in sorted(records.items()):
        for r in sorted(recs, key=lambda r: r["run_seed"]):
            table.append(f"{ds_tag},{arch_name},{r['run_seed']},"
                         f"{r['monolithic_ideal']!r},{r['distributed_noisy']!r},"
                         f"{r['remote_cx_count']}")
    (out / "test_accuracies.csv").write_text("\n".join(table) + "\n")

    datasets: dict[str, dict] = {}
    for (ds_tag, arch_name), recs in sorted(records.items()):
        datasets.setdefault(ds_tag, {})[arch_name] = {
            "n_seeds": len(recs),
            "remote_cx_count": recs[0]["remote_cx_count"],
            "monolithic_ideal": _box_stats([r["monolithic_ideal"] for r in recs]),
            "distributed_noisy": _box_stats([r["distributed_noisy"] for r in recs]),
        }
    summary_path = out / "summary.json"
    _write_json(summary_path, {
        "generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "datasets": datasets,
    })
    return summary_path


# -- full pipeline --------------------------------------------------------


def grid_cells(config: ExperimentConfig) -> list[tuple[int, int, str, int]]:
    return [
        (preset_id, data_seed, arch_name, run_seed)
        for preset_id, data_seed in config.datasets
        for arch_name in config.architectures
        for run_seed in config.seeds
    ]


def _run_cell(config: ExperimentConfig, out_dir: str,
              cell: tuple[int, int, str, int]) -> tuple[int, int, str, int]:
    preset_id, data_seed, arch_name, run_seed = cell
    run_train(config, out_dir, preset_id, data_seed, arch_name, run_seed)
    run_test(config, out_dir, preset_id, data_seed, arch_name, run_seed)
    return cell


def run_all(config: ExperimentConfig, out_dir: str | Path,
            workers: int = 1) -> Path:
    """gen-data, the full train+test grid, then report; returns summary path.

    Cells are independent and internally seeded, so any worker count
    produces identical artifacts.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    out_dir = str(out_dir)
    prepare_datasets(config, out_dir)
    cells = grid_cells(config)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_cell, config, out_dir, cell)
                       for cell in cells]
            for future in futures:
                future.result()
    else:
        for cell in cells:
            _run_cell(config, out_dir, cell)
    return report(out_dir)
