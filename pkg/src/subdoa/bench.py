"""
Seeded Monte-Carlo sweeps and complexity tables.

Every (SNR, trial) cell draws its snapshots from a seed derived only from
``(master_seed, snr_index, trial_index)``, and all requested methods see the
same draw. Results are sorted before aggregation, so the output does not
depend on the number of workers or the order in which cells finish.
"""

import csv
import io
import logging
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from typing import List, Optional, Tuple

import numpy as np
import yaml

from .analytics import ComplexityModel, CrlbInputs, crlb_psac, flops, rmse
from .array_model import ArrayConfig, synthesize
from .errors import DoaError
from .estimators import (Method, ScaSettings, estimate_full_root_music,
                         estimate_pi_max_csca, estimate_psac, estimate_pscc)

log = logging.getLogger(__name__)

TRIAL_COLUMNS = ["method", "snr_db", "trial_index", "estimate_deg", "error_deg",
                 "iterations_pi", "iterations_sca", "elapsed_seconds"]
SUMMARY_COLUMNS = ["method", "snr_db", "trials", "rmse_deg", "crlb_deg", "failures"]
COMPLEXITY_COLUMNS = ["method", "n_total", "m_per_subarray", "flops"]


@dataclass(frozen=True)
class ExperimentSpec:
    array: ArrayConfig
    theta_deg: float
    snr_grid_db: Tuple[float, ...]
    trials: int = 500
    l_snapshots: int = 1
    methods: Tuple[Method, ...] = tuple(Method)
    master_seed: int = 0
    sca: ScaSettings = field(default_factory=ScaSettings)
    source: str = "unit-modulus"
    noiseless: bool = False
    record_timing: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not len(self.snr_grid_db):
            raise ValueError("snr_grid_db must not be empty")
        if not len(self.methods):
            raise ValueError("methods must not be empty")
        object.__setattr__(self, "snr_grid_db", tuple(float(s) for s in self.snr_grid_db))
        object.__setattr__(self, "methods", tuple(Method(m) for m in self.methods))
        if self.master_seed < 0:
            raise ValueError("master_seed must be non-negative")


@dataclass(frozen=True)
class TrialRecord:
    method: Method
    snr_db: float
    trial_index: int
    estimate_deg: Optional[float]
    error_deg: Optional[float]
    iterations_pi: Optional[int] = None
    iterations_sca: Optional[int] = None
    elapsed_seconds: float = 0.0
    failure: Optional[str] = None


@dataclass(frozen=True)
class SummaryRow:
    method: Method
    snr_db: float
    trials: int
    rmse_deg: float
    crlb_deg: float
    failures: int
    mean_iterations_pi: Optional[float] = None
    mean_iterations_sca: Optional[float] = None


def trial_seed(master_seed, snr_index, trial_index):
    """Stable 64-bit seed for one (SNR, trial) cell."""
    ss = np.random.SeedSequence([master_seed, snr_index, trial_index])
    return int(ss.generate_state(1, np.uint64)[0])


def run_trial(spec, snr_index, trial_index):
    """All requested methods on one shared snapshot draw."""
    snr = spec.snr_grid_db[snr_index]
    theta = math.radians(spec.theta_deg)
    Y = synthesize(spec.array, theta, snr, spec.l_snapshots,
                   trial_seed(spec.master_seed, snr_index, trial_index),
                   noiseless=spec.noiseless, source=spec.source)
    records = []
    psac = None
    for method in spec.methods:
        start = time.perf_counter()
        try:
            if method is Method.ROOT_MUSIC_FULL:
                est = estimate_full_root_music(Y)
            elif method is Method.PSAC:
                est = psac = estimate_psac(Y)
            elif method is Method.PSCC:
                if psac is None:
                    psac = estimate_psac(Y)
                est = estimate_pscc(Y, psac)
            else:
                est = estimate_pi_max_csca(Y, spec.sca)
        except (DoaError, np.linalg.LinAlgError) as err:
            records.append(TrialRecord(method, snr, trial_index, None, None,
                                       failure=f"{type(err).__name__}: {err}"))
            continue
        elapsed = time.perf_counter() - start if spec.record_timing else 0.0
        records.append(TrialRecord(
            method, snr, trial_index, est.theta_deg, est.theta_deg - spec.theta_deg,
            est.iterations_pi, est.iterations_sca, elapsed))
    return records


def _run_cells(args):
    spec, cells = args
    return [r for snr_index, trial_index in cells for r in run_trial(spec, snr_index, trial_index)]


def method_crlb_deg(spec, method, snr_db):
    """Standard deviation bound (degrees) that a method is judged against.

    PSAC is compared with the K-fold combined subarray bound; every other
    method with the bound of the whole array.
    """
    cfg = spec.array
    theta = math.radians(spec.theta_deg)
    snr = 10 ** (snr_db / 10)
    if method is Method.PSAC:
        inputs = CrlbInputs(cfg.m_per_subarray, spec.l_snapshots, snr, theta,
                            cfg.spacing, cfg.wavelength, cfg.k_subarrays)
    else:
        inputs = CrlbInputs(cfg.n_total, spec.l_snapshots, snr, theta,
                            cfg.spacing, cfg.wavelength, 1)
    return math.degrees(math.sqrt(crlb_psac(inputs)))


def summarize(spec, records):
    """One row per (method, SNR) in spec order."""
    rows = []
    for snr in spec.snr_grid_db:
        for method in spec.methods:
            cell = [r for r in records if r.method is method and r.snr_db == snr]
            ok = [r for r in cell if r.failure is None]
            err = rmse([r.error_deg for r in ok], 0.0) if ok else math.nan
            pi = [r.iterations_pi for r in ok if r.iterations_pi is not None]
            sca = [r.iterations_sca for r in ok if r.iterations_sca is not None]
            rows.append(SummaryRow(
                method, snr, len(cell), err, method_crlb_deg(spec, method, snr),
                len(cell) - len(ok),
                float(np.mean(pi)) if pi else None, float(np.mean(sca)) if sca else None))
    return rows


def run_sweep(spec, workers=1, chunk_size=50):
    """Run every (SNR, trial) cell and aggregate.

    Returns
    -------
    records : list of TrialRecord
        Sorted by (SNR index, trial index, method order).
    summary : list of SummaryRow
    """
    cells = [(i, t) for i in range(len(spec.snr_grid_db)) for t in range(spec.trials)]
    if workers <= 1:
        records = _run_cells((spec, cells))
    else:
        chunks = [cells[i:i + chunk_size] for i in range(0, len(cells), chunk_size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = [r for part in pool.map(_run_cells, [(spec, c) for c in chunks])
                       for r in part]
    snr_pos = {s: i for i, s in enumerate(spec.snr_grid_db)}
    method_pos = {m: i for i, m in enumerate(spec.methods)}
    records.sort(key=lambda r: (snr_pos[r.snr_db], r.trial_index, method_pos[r.method]))
    for snr in spec.snr_grid_db:
        for method in spec.methods:
            n_fail = sum(1 for r in records
                         if r.method is method and r.snr_db == snr and r.failure)
            if n_fail:
                log.warning("%s at %g dB: %d failed trials", method.value, snr, n_fail)
    return records, summarize(spec, records)


def run_complexity(n_grid, m_fixed, l=1, beta=5):
    """FLOP counts of all four methods with ``M = N0 = m_fixed`` and ``K = N / M``.

    Grid points not divisible by ``m_fixed`` are skipped with a warning.
    """
    rows = []
    for n in n_grid:
        if n % m_fixed:
            warnings.warn(f"N={n} is not divisible by M={m_fixed}; skipped")
            continue
        k = n // m_fixed
        for method in Method:
            model = ComplexityModel(method, n, k, m_fixed, m_fixed, l, beta)
            rows.append({"method": method.value, "n_total": n, "m_per_subarray": m_fixed,
                         "flops": flops(model)})
    return rows


# -- CSV and config I/O ------------------------------------------------------

def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, Method):
        return value.value
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(rows, columns, stream=None):
    """Write dataclass instances or dicts with a fixed column order; return the text."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        get = row.get if isinstance(row, dict) else (lambda c, r=row: getattr(r, c))
        writer.writerow([_fmt(get(c)) for c in columns])
    text = buf.getvalue()
    if stream is not None:
        stream.write(text)
    return text


def trials_csv(records):
    return write_csv(records, TRIAL_COLUMNS)


def summary_csv(summary):
    return write_csv(summary, SUMMARY_COLUMNS)


def complexity_csv(rows):
    return write_csv(rows, COMPLEXITY_COLUMNS)


_ARRAY_KEYS = {f.name for f in fields(ArrayConfig)}


def load_spec(path):
    """Read an :class:`ExperimentSpec` from a YAML file (see :func:`parse_spec`)."""
    with open(path) as fh:
        return parse_spec(yaml.safe_load(fh))


def parse_spec(data):
    """Build an :class:`ExperimentSpec` from a flat mapping or YAML text.

    Keys are the ExperimentSpec field names, the ArrayConfig field names for the
    array, and ``sca_epsilon``, ``sca_max_iter``, ``sca_step_clip_deg`` for the
    Newton settings. Angles are in degrees.
    """
    if isinstance(data, str):
        data = yaml.safe_load(data)
    if not isinstance(data, dict):
        raise ValueError("config must be a key-value mapping")
    data = dict(data)
    array = ArrayConfig(**{k: data.pop(k) for k in list(data) if k in _ARRAY_KEYS})
    sca_kwargs = {}
    if "sca_epsilon" in data:
        sca_kwargs["epsilon"] = data.pop("sca_epsilon")
    if "sca_max_iter" in data:
        sca_kwargs["max_iter"] = data.pop("sca_max_iter")
    if "sca_step_clip_deg" in data:
        sca_kwargs["step_clip"] = math.radians(data.pop("sca_step_clip_deg"))
    known = {f.name for f in fields(ExperimentSpec)} - {"array", "sca"}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    if "snr_grid_db" in data and not isinstance(data["snr_grid_db"], (list, tuple)):
        data["snr_grid_db"] = [data["snr_grid_db"]]
    return ExperimentSpec(array=array, sca=ScaSettings(**sca_kwargs), **data)


def paper_scale(spec):
    """The same sweep on the published geometry (N = 1024, M = N0 = 256)."""
    return replace(spec, array=replace(spec.array, n_total=1024, k_subarrays=4,
                                       m_per_subarray=256, n_init=256))
