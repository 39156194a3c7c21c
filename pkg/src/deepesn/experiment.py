"""Layer-wise sweeps over inter-layer scaling and reservoir realizations.

A work unit is one ``(omega_il, realization)`` pair.  Its reservoir seed is
``derive_seed(master_seed, SEED_TAG_REALIZATION, r)``, independent of the
omega_il index, so every grid value rescales the same raw draws.  Because
inter-layer coupling only runs upward, layer ``l`` of one ``layers_max``
network stands in for the top layer of an ``l``-layer network.
"""
from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import data, measures, readout
from .errors import DivergenceError, IllConditionedError
from .reservoir import ReservoirConfig, init_reservoir, run
from .rng import derive_seed

log = logging.getLogger(__name__)

SEED_TAG_REALIZATION = 0x5245414C  # "REAL"
SEED_TAG_DATA = 0x44415441  # "DATA"

RICHNESS_METRICS = ("ase", "ud", "log10_kappa")
PREDICTION_METRICS = ("test_mse_lms", "test_mse_direct")
DEFAULT_TEST_LEN = {"narma10": 5000, "laser": 5092}
CSV_HEADER = ["task", "omega_il", "layer", "metric", "mean", "std", "n", "flags"]
RAW_HEADER = ["task", "omega_il", "realization", "layer", "metric", "value", "flag"]


@dataclass(frozen=True)
class ExperimentConfig:
    task: str = "narma10"
    laser_path: str | None = None
    layers_max: int = 5
    units: int = 100
    rho: float = 0.9
    omega_in: float = 1.0
    omega_il_grid: tuple = (0.5, 1.0, 2.0)
    realizations: int = 15
    train_len: int = 5000
    test_len: int | None = None
    washout: int = 1000
    lms: readout.LmsParams = field(default_factory=readout.LmsParams)
    master_seed: int = 0
    explained: float = 0.9

    def __post_init__(self):
        if self.task not in DEFAULT_TEST_LEN:
            raise ValueError(f"unknown task {self.task!r}; expected one of {sorted(DEFAULT_TEST_LEN)}")
        if self.task == "laser" and not self.laser_path:
            raise ValueError("task 'laser' needs laser_path")
        if self.test_len is None:
            object.__setattr__(self, "test_len", DEFAULT_TEST_LEN[self.task])
        object.__setattr__(self, "omega_il_grid", tuple(float(w) for w in self.omega_il_grid))
        if not self.omega_il_grid:
            raise ValueError("omega_il_grid is empty")
        for name in ("layers_max", "units", "realizations", "train_len"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.test_len < 0:
            raise ValueError("test_len must be >= 0")
        if not 0 <= self.washout < self.train_len:
            raise ValueError("washout must be in [0, train_len)")
        if not 0 < self.explained <= 1:
            raise ValueError("explained must be in (0, 1]")

    def reservoir_config(self, omega_il: float, realization: int) -> ReservoirConfig:
        return ReservoirConfig(
            n_layers=self.layers_max, units=self.units, input_dim=1,
            spectral_radius=self.rho, input_scaling=self.omega_in,
            interlayer_scaling=omega_il, seed=realization_seed(self.master_seed, realization))


def realization_seed(master_seed: int, realization: int) -> int:
    return derive_seed(master_seed, SEED_TAG_REALIZATION, realization)


def build_task(cfg: ExperimentConfig) -> data.TimeSeriesTask:
    if cfg.task == "narma10":
        n = cfg.train_len + cfg.test_len
        return data.generate_narma10(n, derive_seed(cfg.master_seed, SEED_TAG_DATA),
                                     train_len=cfg.train_len, test_len=cfg.test_len)
    series = data.load_laser(cfg.laser_path)
    return data.next_step_task(series, cfg.train_len, cfg.test_len, name="laser")


@dataclass(frozen=True)
class Record:
    """One measured value for one realization."""

    task: str
    omega_il: float
    realization: int
    layer: int
    metric: str
    value: float
    flag: str = ""


@dataclass(frozen=True)
class Row:
    task: str
    omega_il: float
    layer: int
    metric: str
    mean: float
    std: float
    n: int
    flags: str = ""


@dataclass
class ResultTable:
    rows: list
    records: list = field(default_factory=list)

    def get(self, omega_il: float, layer: int, metric: str, task: str | None = None) -> Row:
        for r in self.rows:
            if (r.omega_il == omega_il and r.layer == layer and r.metric == metric
                    and (task is None or r.task == task)):
                return r
        raise KeyError((task, omega_il, layer, metric))

    def values(self, omega_il: float, layer: int, metric: str) -> list[float]:
        """Per-realization values in realization order."""
        recs = [r for r in self.records
                if r.omega_il == omega_il and r.layer == layer and r.metric == metric]
        return [r.value for r in sorted(recs, key=lambda r: r.realization)]


def _sort_key(row):
    return (row.task, row.omega_il, row.layer, row.metric)


def aggregate(records) -> ResultTable:
    """Mean and population std per ``(task, omega_il, layer, metric)``.

    Flagged records count towards ``n``; only finite values enter the mean
    and std.  ``flags`` lists each flag with its count, e.g.
    ``ill_conditioned:2``.
    """
    groups: dict = {}
    for rec in records:
        groups.setdefault((rec.task, rec.omega_il, rec.layer, rec.metric), []).append(rec)
    rows = []
    for key, recs in groups.items():
        if not recs:
            raise ValueError(f"empty group {key}")
        vals = np.array([r.value for r in recs], dtype=np.float64)
        finite = vals[np.isfinite(vals)]
        if finite.size:
            mean = float(np.sum(finite) / finite.size)
            std = float(math.sqrt(np.sum((finite - mean) ** 2) / finite.size))
        else:
            mean = std = math.nan
        counts: dict = {}
        for r in recs:
            if r.flag:
                counts[r.flag] = counts.get(r.flag, 0) + 1
        flags = ";".join(f"{k}:{v}" for k, v in sorted(counts.items()))
        rows.append(Row(*key, mean, std, len(recs), flags))
    rows.sort(key=_sort_key)
    return ResultTable(rows, sorted(records, key=lambda r: (
        r.task, r.omega_il, r.realization, r.layer, r.metric)))


def _richness_unit(args):
    cfg, task_name, inputs, omega_il, r = args
    res = init_reservoir(cfg.reservoir_config(omega_il, r))
    out = []
    for st in run(res, inputs, cfg.washout):
        def rec(metric, value, flag=""):
            out.append(Record(task_name, omega_il, r, st.layer_index, metric, value, flag))
        rec("ase", measures.average_state_entropy(st))
        sv = measures.spectrum(st)
        rec("ud", float(measures.ud_from_spectrum(sv, cfg.explained)))
        try:
            rec("log10_kappa", measures.kappa_from_spectrum(sv)[1])
        except IllConditionedError:
            rec("log10_kappa", math.nan, "ill_conditioned")
    return out


def _prediction_unit(args):
    cfg, task_name, inputs, targets, omega_il, r = args
    res = init_reservoir(cfg.reservoir_config(omega_il, r))
    split_at = cfg.train_len - cfg.washout
    y_train = targets[cfg.washout:cfg.train_len]
    y_test = targets[cfg.train_len:cfg.train_len + cfg.test_len]
    out = []
    for st in run(res, inputs, cfg.washout):
        train_st, test_st = st.columns(0, split_at), st.columns(split_at)
        flag = ""
        try:
            lms, _ = readout.train_lms(train_st, y_train, cfg.lms)
        except DivergenceError as exc:
            lms, flag = exc.weights, "diverged"
        with np.errstate(over="ignore", invalid="ignore"):
            err = readout.mse(readout.predict(lms, test_st), y_test[None, :])
        out.append(Record(task_name, omega_il, r, st.layer_index, "test_mse_lms", err, flag))
        direct = readout.train_direct(train_st, y_train)
        err = readout.mse(readout.predict(direct, test_st), y_test[None, :])
        out.append(Record(task_name, omega_il, r, st.layer_index, "test_mse_direct", err))
    return out


def _execute(fn, units, workers: int):
    if workers <= 1:
        results = []
        for i, u in enumerate(units):
            log.info("unit %d/%d (omega_il=%s, realization=%d)", i + 1, len(units), u[-2], u[-1])
            results.append(fn(u))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(fn, units))
    # map preserves submission order, which is canonical (omega index, realization)
    return [rec for chunk in results for rec in chunk]


def run_richness_sweep(cfg: ExperimentConfig, workers: int = 1,
                       task: data.TimeSeriesTask | None = None) -> ResultTable:
    """ASE, UD and log10 kappa per (omega_il, layer) over the training sequence."""
    task = task or build_task(cfg)
    inputs = task.inputs[:cfg.train_len]
    units = [(cfg, task.name, inputs, w, r)
             for w in cfg.omega_il_grid for r in range(cfg.realizations)]
    return aggregate(_execute(_richness_unit, units, workers))


def run_prediction_sweep(cfg: ExperimentConfig, workers: int = 1,
                         task: data.TimeSeriesTask | None = None) -> ResultTable:
    """Per-layer test MSE of LMS and direct readouts.

    The reservoir runs once over training and test inputs together, so test
    states continue the training trajectory.
    """
    if cfg.test_len < 1:
        raise ValueError("prediction sweep needs test_len >= 1")
    task = task or build_task(cfg)
    n = cfg.train_len + cfg.test_len
    units = [(cfg, task.name, task.inputs[:n], task.targets[:n], w, r)
             for w in cfg.omega_il_grid for r in range(cfg.realizations)]
    return aggregate(_execute(_prediction_unit, units, workers))


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def emit_csv(table: ResultTable, path) -> None:
    """Write the aggregated table, one row per (task, omega_il, layer, metric)."""
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for r in sorted(table.rows, key=_sort_key):
                w.writerow([r.task, _fmt(r.omega_il), r.layer, r.metric,
                            _fmt(r.mean), _fmt(r.std), r.n, r.flags])
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def emit_raw_csv(table: ResultTable, path) -> None:
    """Write per-realization records."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RAW_HEADER)
        for r in table.records:
            w.writerow([r.task, _fmt(r.omega_il), r.realization, r.layer, r.metric,
                        _fmt(r.value), r.flag])


def read_csv(path) -> ResultTable:
    """Parse a file written by :func:`emit_csv`."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_HEADER:
            raise ValueError(f"unexpected header in {path}: {header}")
        rows = [Row(t, float(w), int(l), m, float(mu), float(sd), int(n), flags)
                for t, w, l, m, mu, sd, n, flags in reader]
    return ResultTable(rows)


# config-file keys are the CLI flag names
CONFIG_KEYS = {
    "task": "task", "laser-path": "laser_path", "layers": "layers_max",
    "units": "units", "rho": "rho", "omega-in": "omega_in",
    "omega-il": "omega_il_grid", "realizations": "realizations",
    "train-len": "train_len", "test-len": "test_len", "washout": "washout",
    "lms-eta": "lms_eta", "lms-epochs": "lms_epochs", "seed": "master_seed",
    "explained": "explained",
}


def config_from_mapping(values: dict, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Build a config from flag-named keys, overriding ``base``."""
    unknown = set(values) - set(CONFIG_KEYS)
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    kw = {}
    lms = {}
    for key, value in values.items():
        if value is None:
            continue
        name = CONFIG_KEYS[key]
        if name == "lms_eta":
            lms["learning_rate"] = float(value)
        elif name == "lms_epochs":
            lms["epochs"] = int(value)
        elif name == "omega_il_grid":
            kw[name] = tuple(value) if isinstance(value, (list, tuple)) else (value,)
        else:
            kw[name] = value
    if base is None:
        base_kw = {}
        base_lms = readout.LmsParams()
    else:
        base_kw = {f.name: getattr(base, f.name) for f in fields(base)}
        base_lms = base.lms
        # a task switch re-derives the default test length
        if "task" in kw and kw["task"] != base.task and "test_len" not in kw:
            base_kw["test_len"] = None
    base_kw.update(kw)
    base_kw["lms"] = replace(base_lms, **lms)
    return ExperimentConfig(**base_kw)
