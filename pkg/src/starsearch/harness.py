"""Instance generation, (N, d, M) sweeps, scaling fits and serialization.

Randomness comes from a Philox (counter-based) generator keyed by the user
seed and the cell parameters, so every cell draws the same instance no matter
which order or thread it runs in.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import stats

from .errors import (
    InvalidArgumentError,
    InvalidConfigError,
    InvalidDataError,
    StarSearchError,
)
from .oracle import MODES, OracleInstance, auto_window, regime_warnings, run_search
from .trace import PredictionRecord, SearchTrace
from .walk import PhaseProfile, localization_curve

__all__ = [
    "DISTRIBUTIONS",
    "CSV_COLUMNS",
    "SweepConfig",
    "SweepRecord",
    "ScalingFit",
    "WalkOracleComparison",
    "make_rng",
    "generate_instance",
    "sweep_window",
    "run_sweep",
    "records_to_csv",
    "records_to_json",
    "write_records",
    "trace_to_csv",
    "write_trace",
    "fit_scaling",
    "walk_profile_for_instance",
    "compare_walk_oracle",
]

DISTRIBUTIONS = ("even", "balanced", "random")

CSV_COLUMNS = (
    "N", "d", "M", "mode", "seed",
    "k_max_sim", "P_max_sim", "k_max_pred", "P_max_pred",
    "queries", "wall_ms", "regime_warn",
)

MIN_WINDOW = 32

_MODE_KEY = {m: i for i, m in enumerate(MODES)}


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """Philox generator for ``seed`` and an integer key path (e.g. a cell key)."""
    seq = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(seq))


def generate_instance(
    N: int,
    d: int,
    M: int = 1,
    *,
    distribution: str = "even",
    seed: int = 0,
    mode: str = "multi-phase",
) -> OracleInstance:
    """Random oracle instance with M marked inputs at uniformly random positions.

    ``distribution`` controls the nonzero values:

    ``"even"``      each of 1..d-1 exactly (N-M)/(d-1) times (must divide)
    ``"balanced"``  counts differ by at most one
    ``"random"``    independent uniform draws from 1..d-1
    """
    if d < 2:
        raise InvalidArgumentError(f"d must be >= 2, got {d}")
    if not 1 <= M <= N:
        raise InvalidConfigError(f"need 1 <= M <= N, got M={M}, N={N}")
    if distribution not in DISTRIBUTIONS:
        raise InvalidConfigError(f"unknown distribution {distribution!r}; expected {DISTRIBUTIONS}")
    rest = N - M
    if distribution == "even" and rest % (d - 1):
        raise InvalidConfigError(
            f"even distribution needs (N-M) divisible by d-1; {rest} % {d - 1} != 0"
        )
    rng = make_rng(seed, N, d, M, DISTRIBUTIONS.index(distribution))
    if distribution == "random":
        values = rng.integers(1, d, size=rest)
    else:
        values = np.arange(rest) % (d - 1) + 1
        values = rng.permutation(values)
    f = np.zeros(N, dtype=np.int64)
    marked = rng.choice(N, size=M, replace=False)
    others = np.setdiff1d(np.arange(N), marked)
    f[others] = values
    return OracleInstance(d, f, mode=mode, even=(distribution == "even"))


@dataclass(frozen=True)
class SweepConfig:
    Ns: Sequence[int]
    ds: Sequence[int]
    Ms: Sequence[int] = (1,)
    modes: Sequence[str] = ("multi-phase",)
    distribution: str = "even"
    seed: int = 0
    window: int | str = "auto"
    workers: int = 1
    record_timing: bool = False
    csv_path: str | None = None
    json_path: str | None = None

    def __post_init__(self):
        for name in ("Ns", "ds", "Ms", "modes"):
            values = tuple(getattr(self, name))
            if not values:
                raise InvalidConfigError(f"{name} must be nonempty")
            object.__setattr__(self, name, values)
        for mode in self.modes:
            if mode not in MODES:
                raise InvalidConfigError(f"unknown mode {mode!r}")
        if self.distribution not in DISTRIBUTIONS:
            raise InvalidConfigError(f"unknown distribution {self.distribution!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidConfigError("seed must fit in 64 unsigned bits")
        if self.window != "auto" and (not isinstance(self.window, int) or self.window < 1):
            raise InvalidConfigError(f"window must be 'auto' or a positive int, got {self.window!r}")

    def cells(self):
        """Cell keys (N, d, M, mode) in canonical sorted order."""
        keys = {(int(N), int(d), int(M), mode) for N in self.Ns for d in self.ds for M in self.Ms for mode in self.modes}
        return sorted(keys, key=lambda k: (k[0], k[1], k[2], _MODE_KEY[k[3]]))


@dataclass(frozen=True)
class SweepRecord:
    N: int
    d: int
    M: int
    mode: str
    seed: int
    k_max_sim: int | None
    P_max_sim: float | None
    k_max_pred: float
    P_max_pred: float
    queries: int | None
    wall_ms: float | None
    regime_warn: bool
    error: str | None = None

    @property
    def key(self):
        return (self.N, self.d, self.M, _MODE_KEY[self.mode])


def sweep_window(N: int, d: int, M: int, window: int | str = "auto") -> int:
    """2 x predicted k_max, at least MIN_WINDOW iterations."""
    if window == "auto":
        return max(MIN_WINDOW, auto_window(N, d, M))
    return int(window)


def _run_cell(cfg: SweepConfig, key) -> SweepRecord:
    N, d, M, mode = key
    pred = PredictionRecord.from_parameters(N, d, M)
    flagged = bool(regime_warnings(N, d, M))
    base = dict(
        N=N, d=d, M=M, mode=mode, seed=int(cfg.seed),
        k_max_pred=pred.k_max_pred, P_max_pred=pred.p_max_pred, regime_warn=flagged,
    )
    try:
        inst = generate_instance(N, d, M, distribution=cfg.distribution, seed=cfg.seed, mode=mode)
        start = time.perf_counter()
        trace = run_search(inst, sweep_window(N, d, M, cfg.window), warn=False)
        elapsed = (time.perf_counter() - start) * 1e3
    except StarSearchError as exc:
        return SweepRecord(
            **base, k_max_sim=None, P_max_sim=None, queries=None, wall_ms=None,
            error=f"{type(exc).__name__}: {exc}",
        )
    return SweepRecord(
        **base,
        k_max_sim=trace.k_max,
        P_max_sim=trace.p_max,
        queries=trace.queries_per_iteration,
        wall_ms=round(elapsed, 3) if cfg.record_timing else None,
    )


def run_sweep(config: SweepConfig) -> list[SweepRecord]:
    """One record per (N, d, M, mode) cell, in canonical order.

    A failing cell yields a record with ``error`` set rather than aborting.
    Files named in the config are written before returning.
    """
    cells = config.cells()
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            records = list(pool.map(lambda key: _run_cell(config, key), cells))
    else:
        records = [_run_cell(config, key) for key in cells]
    records.sort(key=lambda r: r.key)
    if config.csv_path:
        write_records(records, config.csv_path, "csv")
    if config.json_path:
        write_records(records, config.json_path, "json")
    return records


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def records_to_csv(records: Sequence[SweepRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow([_fmt(getattr(rec, col)) for col in CSV_COLUMNS])
    return buf.getvalue()


def records_to_json(records: Sequence[SweepRecord]) -> str:
    return json.dumps([asdict(r) for r in records], indent=2) + "\n"


def write_records(records, path, fmt: str = "csv") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = records_to_csv(records) if fmt == "csv" else records_to_json(records)
    path.write_text(text, encoding="utf-8", newline="")
    return path


def trace_to_csv(trace: SearchTrace) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    has_pred = trace.predicted is not None
    writer.writerow(["k", "P_k", "P_pred"] if has_pred else ["k", "P_k"])
    for k, p, pp in trace.rows():
        writer.writerow([k, repr(p)] + ([repr(pp)] if has_pred else []))
    return buf.getvalue()


def write_trace(trace: SearchTrace, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(trace_to_csv(trace), encoding="utf-8", newline="")
    return path


@dataclass(frozen=True)
class ScalingFit:
    """log y = exponent * log x + intercept."""

    exponent: float
    intercept: float
    residual: float
    stderr: float
    n_points: int


def fit_scaling(records, x_field: str, y_field: str, *, include_flagged: bool = False) -> ScalingFit:
    """Least-squares power law through (x, y) pairs taken from ``records``.

    Records may be SweepRecords, dicts, or (x, y) tuples. Regime-flagged and
    failed records are skipped unless ``include_flagged``.
    """
    xs, ys = [], []
    for rec in records:
        if isinstance(rec, tuple):
            x, y = rec
        else:
            get = rec.get if isinstance(rec, dict) else (lambda k, r=rec: getattr(r, k))
            if not include_flagged and (get("regime_warn") or get("error")):
                continue
            x, y = get(x_field), get(y_field)
        if x is None or y is None:
            continue
        xs.append(float(x))
        ys.append(float(y))
    if len(xs) < 3:
        raise InvalidDataError(f"need at least 3 usable points, got {len(xs)}")
    lx, ly = np.log(xs), np.log(ys)
    if not (np.all(np.isfinite(lx)) and np.all(np.isfinite(ly))):
        raise InvalidDataError("values must be positive for a log-log fit")
    if np.ptp(lx) == 0:
        raise InvalidDataError(f"{x_field} does not vary")
    fit = stats.linregress(lx, ly)
    resid = ly - (fit.slope * lx + fit.intercept)
    return ScalingFit(
        exponent=float(fit.slope),
        intercept=float(fit.intercept),
        residual=float(math.sqrt(np.mean(resid**2))),
        stderr=float(fit.stderr),
        n_points=len(xs),
    )


def walk_profile_for_instance(instance: OracleInstance) -> PhaseProfile:
    """Star-graph profile with phase 2 pi f(j)/d on edge j."""
    phases = 2 * math.pi * instance.f / instance.d
    order = [2 * math.pi * v / instance.d for v in range(instance.d) if np.any(instance.f == v)]
    return PhaseProfile.from_vertex_phases(phases, class_order=order)


@dataclass(frozen=True)
class WalkOracleComparison:
    """Oracle trace against the walk's marked-class trace, peaks compared at m = 2k."""

    N: int
    d: int
    k_max_oracle: int
    p_max_oracle: float
    m_max_walk: int
    p_max_walk: float
    step_gap: int
    probability_gap: float
    trace_gap: float
    oracle: SearchTrace = field(repr=False)
    walk: SearchTrace = field(repr=False)


def compare_walk_oracle(N: int, d: int, *, seed: int = 0, distribution: str = "even") -> WalkOracleComparison:
    """Run the d-phase oracle search and the matching star-graph walk.

    Two walk steps correspond to one Grover iteration. From the rim-to-hub
    start the walk probability at step 2k+1 equals the oracle P_k, which
    ``trace_gap`` reports as the largest pointwise difference.
    """
    inst = generate_instance(N, d, 1, distribution=distribution, seed=seed)
    window = sweep_window(N, d, 1)
    oracle = run_search(inst, window, warn=False)
    profile = walk_profile_for_instance(inst)
    walk = localization_curve(profile, 0, 2 * window + 1)
    odd = walk.probabilities[1::2][: len(oracle)]
    return WalkOracleComparison(
        N=N,
        d=d,
        k_max_oracle=oracle.k_max,
        p_max_oracle=oracle.p_max,
        m_max_walk=walk.k_max,
        p_max_walk=walk.p_max,
        step_gap=abs(walk.k_max - 2 * oracle.k_max),
        probability_gap=abs(walk.p_max - oracle.p_max),
        trace_gap=float(np.max(np.abs(odd - oracle.probabilities))),
        oracle=oracle,
        walk=walk,
    )
