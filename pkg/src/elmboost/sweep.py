"""Single runs, plain-network baselines, and resumable grid sweeps.

A sweep walks the Cartesian product of partition counts M, boosting
rounds T, hidden-node counts nh, and seeds, appending one CSV row per
cell as it completes. Re-running against the same CSV skips the cells
already present, so an interrupted sweep resumes where it stopped.
"""

from __future__ import annotations

import csv
import io
import itertools
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .data_io import DatasetSpec, apply_normalizer, fit_normalizer, resolve
from .elm import DEFAULT_RCOND, predict_elm, train_elm
from .metrics import confusion, macro_metrics
from .partition import DEFAULT_MIN_PARTITION_ROWS, ensemble_predict, train_ensemble

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("dataset", "M", "T", "nh", "seed", "accuracy", "precision",
               "recall", "f1", "train_ms", "predict_ms", "status")

AXES = ("M", "T", "nh")


@dataclass
class SweepRecord:
    """One evaluated configuration; metric fields are NaN when status != ok."""

    dataset: str
    M: int
    T: int
    nh: int
    seed: int
    accuracy: float
    precision: float
    recall: float
    f1: float
    train_ms: float
    predict_ms: float
    status: str = "ok"

    @property
    def key(self):
        return (self.dataset, self.M, self.T, self.nh, self.seed)

    def to_row(self):
        return [self.dataset, self.M, self.T, self.nh, self.seed,
                repr(self.accuracy), repr(self.precision), repr(self.recall),
                repr(self.f1), repr(self.train_ms), repr(self.predict_ms),
                self.status]

    @classmethod
    def from_row(cls, row):
        if len(row) != len(CSV_COLUMNS):
            raise ValueError(f"expected {len(CSV_COLUMNS)} cells, got {len(row)}")
        return cls(row[0], int(row[1]), int(row[2]), int(row[3]), int(row[4]),
                   float(row[5]), float(row[6]), float(row[7]), float(row[8]),
                   float(row[9]), float(row[10]), row[11])


@dataclass
class SweepConfig:
    """Grid definition plus engine knobs for one dataset."""

    dataset: DatasetSpec
    M_values: list[int]
    T_values: list[int]
    nh_values: list[int]
    seeds: list[int] = field(default_factory=lambda: [0, 1, 2, 3, 4])
    activation: str = "sigmoid"
    output_path: str | Path | None = None
    workers: int | None = None
    min_partition_rows: int = DEFAULT_MIN_PARTITION_ROWS
    rcond: float = DEFAULT_RCOND
    weighted_weak_learner: bool = True
    weighted_error: bool = True

    def __post_init__(self):
        for name in ("M_values", "T_values", "nh_values"):
            values = getattr(self, name)
            if not values or any(v < 1 for v in values):
                raise ValueError(f"{name} must be nonempty with all values >= 1")
        if not self.seeds:
            raise ValueError("at least one seed is required")

    def cells(self):
        return list(itertools.product(self.M_values, self.T_values,
                                      self.nh_values, self.seeds))


def _with_context(exc, context):
    """Prepend run context to an exception message, keeping its type."""
    exc.args = (f"[{context}] {exc}",) + exc.args[1:]
    return exc


def _evaluate_metrics(name, M, T, nh, seed, n_classes, test, predicted,
                      train_ms, predict_ms):
    report = macro_metrics(confusion(test.labels, predicted, n_classes))
    return SweepRecord(name, M, T, nh, seed, report.accuracy,
                       report.macro_precision, report.macro_recall, report.f1,
                       train_ms, predict_ms)


def _class_count(train, test):
    return int(max(train.labels.max(), test.labels.max())) + 1


def _run_cell(name, train, test, M, T, nh, seed, activation, *,
              engine_workers=None, min_partition_rows=DEFAULT_MIN_PARTITION_ROWS,
              rcond=DEFAULT_RCOND, weighted_weak_learner=True, weighted_error=True):
    t0 = time.perf_counter()
    ensemble = train_ensemble(train, M, T, nh, activation, seed,
                              workers=engine_workers,
                              min_partition_rows=min_partition_rows,
                              rcond=rcond,
                              weighted_weak_learner=weighted_weak_learner,
                              weighted_error=weighted_error)
    train_ms = (time.perf_counter() - t0) * 1000.0
    t0 = time.perf_counter()
    predicted, _ = ensemble_predict(ensemble, test.features)
    predict_ms = (time.perf_counter() - t0) * 1000.0
    return _evaluate_metrics(name, M, T, nh, seed, _class_count(train, test),
                             test, predicted, train_ms, predict_ms)


def _load_normalized(spec):
    train, test = resolve(spec)
    params = fit_normalizer(train)
    return apply_normalizer(params, train), apply_normalizer(params, test)


def run_single(spec, M, T, nh, seed=0, activation="sigmoid", *, workers=None,
               min_partition_rows=DEFAULT_MIN_PARTITION_ROWS, rcond=DEFAULT_RCOND,
               weighted_weak_learner=True, weighted_error=True):
    """Train one partitioned ensemble and evaluate it on the test split.

    Parameters are validated before any data is touched; lower-module
    errors are re-raised with the dataset and parameters attached.
    """
    for name, value in (("M", M), ("T", T), ("nh", nh)):
        if value < 1:
            raise ValueError(f"{name} must be >= 1, got {value}")
    context = f"dataset={spec.name} M={M} T={T} nh={nh} seed={seed}"
    try:
        train, test = _load_normalized(spec)
        return _run_cell(spec.name, train, test, M, T, nh, seed, activation,
                         engine_workers=workers,
                         min_partition_rows=min_partition_rows, rcond=rcond,
                         weighted_weak_learner=weighted_weak_learner,
                         weighted_error=weighted_error)
    except Exception as exc:
        raise _with_context(exc, context)


def run_baseline_elm(spec, nh_values, seeds=(0,), activation="sigmoid",
                     rcond=DEFAULT_RCOND):
    """Table-style baseline: plain unpartitioned, unboosted networks.

    Trains one uniform-weight network per (nh, seed), evaluates each on
    the test split, and returns the best-accuracy record (M and T report
    as 1).
    """
    nh_values = list(nh_values)
    if not nh_values:
        raise ValueError("nh_values must be nonempty")
    train, test = _load_normalized(spec)
    weights = np.full(train.n, 1.0 / train.n)
    best = None
    for nh, seed in itertools.product(nh_values, seeds):
        t0 = time.perf_counter()
        model = train_elm(train, weights, nh, activation, seed, rcond=rcond)
        train_ms = (time.perf_counter() - t0) * 1000.0
        t0 = time.perf_counter()
        predicted, _ = predict_elm(model, test.features)
        predict_ms = (time.perf_counter() - t0) * 1000.0
        record = _evaluate_metrics(spec.name, 1, 1, nh, seed, test, predicted,
                                   train_ms, predict_ms)
        logger.info("baseline %s nh=%d seed=%d accuracy=%.4f",
                    spec.name, nh, seed, record.accuracy)
        if best is None or record.accuracy > best.accuracy:
            best = record
    return best


def read_records(path, tolerant=False):
    """Parse a results CSV; with tolerant=True malformed lines are skipped."""
    records = []
    with open(path, newline="") as fh:
        for i, row in enumerate(csv.reader(fh)):
            if not row or (i == 0 and row[0] == CSV_COLUMNS[0]):
                continue
            try:
                records.append(SweepRecord.from_row(row))
            except (ValueError, IndexError):
                if not tolerant:
                    raise
                logger.warning("%s: skipping malformed row %d", path, i + 1)
    return records


def _format_row(cells):
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerow(cells)
    return buf.getvalue()


def run_sweep(config):
    """Evaluate every grid cell, appending finished rows to the output CSV.

    Cells already present in the CSV are skipped (resume semantics); a
    failing cell is recorded with NaN metrics and an error status and the
    sweep continues. Returns the records for the whole grid, previously
    finished ones included, sorted by (M, T, nh, seed).
    """
    out_path = Path(config.output_path) if config.output_path else None
    done = {}
    if out_path is not None and out_path.exists():
        for record in read_records(out_path, tolerant=True):
            done[record.key] = record

    train, test = _load_normalized(config.dataset)
    name = config.dataset.name
    cells = config.cells()
    pending = [(M, T, nh, seed) for M, T, nh, seed in cells
               if (name, M, T, nh, seed) not in done]
    logger.info("sweep %s: %d cells, %d already done", name, len(cells),
                len(cells) - len(pending))

    def evaluate(cell):
        M, T, nh, seed = cell
        try:
            return _run_cell(name, train, test, M, T, nh, seed,
                             config.activation, engine_workers=1,
                             min_partition_rows=config.min_partition_rows,
                             rcond=config.rcond,
                             weighted_weak_learner=config.weighted_weak_learner,
                             weighted_error=config.weighted_error)
        except Exception as exc:  # partial-failure policy: record and move on
            logger.warning("cell M=%d T=%d nh=%d seed=%d failed: %s",
                           M, T, nh, seed, exc)
            nan = float("nan")
            return SweepRecord(name, M, T, nh, seed, nan, nan, nan, nan,
                               nan, nan, status=f"error:{type(exc).__name__}")

    fh = None
    if out_path is not None:
        new_file = not out_path.exists()
        fh = open(out_path, "a", newline="")
        if new_file:
            fh.write(_format_row(CSV_COLUMNS))
            fh.flush()
    fresh = []
    try:
        if config.workers == 1:
            completed = map(evaluate, pending)
        else:
            pool = ThreadPoolExecutor(max_workers=config.workers)
            completed = as_completed([pool.submit(evaluate, cell)
                                      for cell in pending])
            completed = (future.result() for future in completed)
        for record in completed:
            fresh.append(record)
            if fh is not None:
                fh.write(_format_row(record.to_row()))
                fh.flush()
    finally:
        if fh is not None:
            fh.close()
        if config.workers != 1:
            pool.shutdown(wait=True)

    by_key = dict(done)
    for record in fresh:
        by_key[record.key] = record
    wanted = [(name, M, T, nh, seed) for M, T, nh, seed in cells]
    records = [by_key[key] for key in wanted if key in by_key]
    records.sort(key=lambda r: (r.M, r.T, r.nh, r.seed))
    return records


def summarize(records):
    """Per-configuration seed averages, best accuracy first.

    Returns a list of dicts with M, T, nh, the number of seeds, and the
    mean and standard deviation of each metric over seeds; failed cells
    are left out.
    """
    groups = {}
    for record in records:
        if record.status != "ok":
            continue
        groups.setdefault((record.M, record.T, record.nh), []).append(record)
    summary = []
    for (M, T, nh), group in groups.items():
        accuracy = np.array([r.accuracy for r in group])
        f1 = np.array([r.f1 for r in group])
        summary.append({
            "M": M, "T": T, "nh": nh, "seeds": len(group),
            "accuracy_mean": float(accuracy.mean()),
            "accuracy_std": float(accuracy.std()),
            "f1_mean": float(f1.mean()),
            "f1_std": float(f1.std()),
        })
    summary.sort(key=lambda s: s["accuracy_mean"], reverse=True)
    return summary


def emit_heatmap(records, x_axis, y_axis, reduce_rule="max", out_path=None,
                 gnuplot_path=None):
    """Collapse sweep records onto a 2-D accuracy grid.

    Seeds are averaged first; the remaining third axis is then collapsed
    by ``reduce_rule`` (max by default, mean selectable). Returns
    ``(x_values, y_values, grid)`` with grid[y][x]; cells with no data are
    NaN. When ``out_path`` is given, writes a dense CSV with x values as
    columns and y values as rows; ``gnuplot_path`` additionally writes a
    plain matrix file (rows y, columns x) suitable for
    ``plot '...' matrix with image``.
    """
    if x_axis not in AXES or y_axis not in AXES:
        raise ValueError(f"axes must be among {AXES}")
    if x_axis == y_axis:
        raise ValueError("x and y axes must differ")
    if reduce_rule not in ("max", "mean"):
        raise ValueError("reduce_rule must be 'max' or 'mean'")
    ok = [r for r in records if r.status == "ok"]
    if not ok:
        raise ValueError("no successful records to aggregate")

    per_config = {}
    for record in ok:
        key = (record.M, record.T, record.nh)
        per_config.setdefault(key, []).append(record.accuracy)
    averaged = {key: float(np.mean(vals)) for key, vals in per_config.items()}

    index = {axis: i for i, axis in enumerate(AXES)}
    xi, yi = index[x_axis], index[y_axis]
    x_values = sorted({key[xi] for key in averaged})
    y_values = sorted({key[yi] for key in averaged})
    cell_pool = {}
    for key, value in averaged.items():
        cell_pool.setdefault((key[xi], key[yi]), []).append(value)

    grid = np.full((len(y_values), len(x_values)), np.nan)
    reducer = max if reduce_rule == "max" else (lambda v: sum(v) / len(v))
    for (x, y), values in cell_pool.items():
        grid[y_values.index(y), x_values.index(x)] = reducer(values)

    if out_path is not None:
        with open(out_path, "w", newline="") as fh:
            fh.write(_format_row([f"{y_axis}\\{x_axis}"] + x_values))
            for yv, row in zip(y_values, grid):
                fh.write(_format_row([yv] + [repr(float(v)) for v in row]))
    if gnuplot_path is not None:
        with open(gnuplot_path, "w") as fh:
            for row in grid:
                fh.write(" ".join(f"{v:.6f}" if math.isfinite(v) else "nan"
                                  for v in row) + "\n")
    return x_values, y_values, grid
