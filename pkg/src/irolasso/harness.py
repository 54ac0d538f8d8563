"""Monte Carlo experiment orchestration with deterministic seeding.

Every random draw comes from a substream of the spec's master seed,
labelled by what it is for.  The labels deliberately leave out the
ensemble and the noise level wherever pairing helps:

* signal and noise depend only on ``(m, trial)``, so all ensembles and
  all noise levels see the same ``x0`` and noise direction;
* the Gaussian and i.r.o. ensembles share one Gaussian draw ``G``
  (Gaussian uses ``G / sqrt(n)``, i.r.o. uses ``(G G^T)^{-1/2} G``).

Rows are sorted by a total key before writing, so the CSV bytes do not
depend on how work was scheduled.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .ensembles import Ensemble, RandomSource, gen_gaussian, gen_iro, generate
from .errors import SpecError
from .geometry import WidthMethod, random_sparse_signal, width_estimate
from .mcsv import empirical_mcsv
from .predictions import ProblemDims, mcsv_bound_comparison, nse_prediction
from .solver import SolveConfig, solve_classo

log = logging.getLogger(__name__)

__all__ = [
    "ExperimentSpec",
    "TrialRecord",
    "McsvRecord",
    "omega_sq_for",
    "run_nse_sweep",
    "run_sigma_profile",
    "run_mcsv_sweep",
    "run_recovery_trials",
    "write_csv",
    "read_trial_csv",
    "group_stats",
    "summarize",
    "load_config",
    "spec_from_mapping",
]

DEFAULT_M_FRACTIONS = (0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
DEFAULT_K_FRACTIONS = (0.01, 0.025, 0.05, 0.075, 0.1, 0.125, 0.15)


@dataclass(frozen=True)
class ExperimentSpec:
    """Parameters of one sweep.  Defaults follow the 25-trial, n=256, k=10 setup."""

    master_seed: int | None = None
    ensembles: tuple = ("iro",)
    n: int = 256
    k: int = 10
    m_list: tuple = (128,)
    sigma_list: tuple = (1e-3,)
    trials: int = 25
    solver: SolveConfig = field(default_factory=SolveConfig)
    width_method: str = "closed_form_sparse"
    width_samples: int = 10_000
    output_path: str | None = None
    record_timing: bool = False
    workers: int = 1
    # mCSV sweep grid
    m_fractions: tuple = DEFAULT_M_FRACTIONS
    k_fractions: tuple = DEFAULT_K_FRACTIONS
    mcsv_seeds: int = 0
    mcsv_restarts: int = 20
    mcsv_iters: int = 2000

    def validate(self) -> None:
        if self.master_seed is None:
            raise SpecError("master_seed is required (no wall-clock default)")
        if not 0 <= int(self.master_seed) < 2**64:
            raise SpecError("master_seed must be an unsigned 64-bit integer")
        if self.trials < 1:
            raise SpecError("trials must be >= 1")
        if not self.ensembles:
            raise SpecError("ensembles must not be empty")
        for e in self.ensembles:
            try:
                Ensemble(e)
            except ValueError:
                raise SpecError(f"unknown ensemble {e!r}") from None
        if not 1 <= self.k < self.n:
            raise SpecError(f"need 1 <= k < n, got k={self.k}, n={self.n}")
        try:
            WidthMethod(self.width_method)
        except ValueError:
            raise SpecError(f"unknown width_method {self.width_method!r}") from None


@dataclass(frozen=True)
class TrialRecord:
    ensemble: str
    n: int
    m: int
    k: int
    sigma: float
    trial_index: int
    seed_used: int
    omega_sq_used: float
    nse_empirical: float
    nse_predicted: float
    solver_iters: int
    converged: bool
    wall_ms: float | None = None


@dataclass(frozen=True)
class McsvRecord:
    ensemble: str
    n: int
    m: int
    k: int
    seed_index: int | None
    seed_used: int | None
    omega_sq: float
    iro_bound: float
    gaussian_bound: float
    empirical_mcsv: float
    status: str


TRIAL_COLUMNS = [f.name for f in fields(TrialRecord)]
MCSV_COLUMNS = [f.name for f in fields(McsvRecord)]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_csv(records, path=None, columns=None) -> str:
    """Serialise dataclass records; write to ``path`` if given and return the text."""
    records = list(records)
    if columns is None:
        columns = [f.name for f in fields(records[0])] if records else TRIAL_COLUMNS
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for rec in records:
        d = asdict(rec)
        writer.writerow([_fmt(d[c]) for c in columns])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def omega_sq_for(spec: ExperimentSpec, n: int | None = None, k: int | None = None) -> float:
    n = spec.n if n is None else n
    k = spec.k if k is None else k
    src = RandomSource(int(spec.master_seed)).child("width", n, k)
    return width_estimate(n, k, spec.width_method, spec.width_samples, src).omega_sq


def _trial_source(master_seed: int, m: int, trial: int) -> RandomSource:
    return RandomSource(int(master_seed)).child("trial", m, trial)


def _trial_matrix(ensemble: Ensemble, m: int, n: int, trial_src: RandomSource):
    if ensemble is Ensemble.GAUSSIAN:
        return gen_gaussian(m, n, 1.0 / n, trial_src.child("gaussian"))
    if ensemble is Ensemble.IRO:
        return gen_iro(m, n, trial_src.child("gaussian"))
    return generate(ensemble, m, n, trial_src.child("rows", ensemble.value))


def _nse_unit(spec: ExperimentSpec, ensemble: str, m: int, trial: int, omega_sq: float) -> list[TrialRecord]:
    ens = Ensemble(ensemble)
    tsrc = _trial_source(spec.master_seed, m, trial)
    a = _trial_matrix(ens, m, spec.n, tsrc)
    sig = random_sparse_signal(spec.n, spec.k, tsrc.child("signal"))
    noise = tsrc.child("noise").generator().standard_normal(m)
    clean = a.entries @ sig.x0
    predicted = nse_prediction(ens, ProblemDims(spec.n, m, omega_sq))
    rows = []
    for sigma in spec.sigma_list:
        t0 = time.perf_counter()
        res = solve_classo(a, clean + sigma * noise, sig.l1, spec.solver.for_sigma(sigma))
        wall = (time.perf_counter() - t0) * 1e3 if spec.record_timing else None
        err = res.x_hat - sig.x0
        if not res.converged:
            log.warning("solver did not converge: %s m=%d sigma=%g trial=%d", ensemble, m, sigma, trial)
        rows.append(TrialRecord(
            ensemble=ens.value, n=spec.n, m=m, k=spec.k, sigma=float(sigma), trial_index=trial,
            seed_used=tsrc.seed64, omega_sq_used=omega_sq, nse_empirical=float(err @ err) / sigma**2,
            nse_predicted=predicted, solver_iters=res.iters, converged=res.converged, wall_ms=wall,
        ))
    return rows


def _run_units(fn, units, workers: int) -> list:
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(fn, *zip(*units)))
    else:
        chunks = [fn(*u) for u in units]
    return [row for chunk in chunks for row in chunk]


def run_nse_sweep(spec: ExperimentSpec) -> list[TrialRecord]:
    """NSE of the constrained LASSO for every (ensemble, m, sigma, trial).

    Writes a CSV to ``spec.output_path`` when set.  Solver non-convergence
    is recorded in the ``converged`` column; spec violations raise
    :class:`SpecError`.
    """
    spec.validate()
    if not spec.sigma_list:
        raise SpecError("sigma_list must not be empty")
    if any(not s > 0 for s in spec.sigma_list):
        raise SpecError("every sigma must be positive")
    omega_sq = omega_sq_for(spec)
    for m in spec.m_list:
        if not omega_sq < m < spec.n:
            raise SpecError(f"m={m} violates omega_sq={omega_sq:.4f} < m < n={spec.n}")
    units = [(spec, e, m, t, omega_sq) for e in spec.ensembles for m in spec.m_list for t in range(spec.trials)]
    rows = _run_units(_nse_unit, units, spec.workers)
    rows.sort(key=lambda r: (r.ensemble, r.m, r.sigma, r.trial_index))
    if spec.output_path:
        write_csv(rows, spec.output_path, TRIAL_COLUMNS)
    return rows


def run_sigma_profile(spec: ExperimentSpec) -> list[TrialRecord]:
    """NSE(sigma) at one fixed (ensemble, m) across ``sigma_list``."""
    if not spec.sigma_list:
        raise SpecError("sigma_list must not be empty")
    if len(spec.ensembles) != 1 or len(spec.m_list) != 1:
        raise SpecError("sigma profile needs exactly one ensemble and one m")
    return run_nse_sweep(spec)


def _mcsv_unit(spec: ExperimentSpec, ensemble: str, m: int, k: int, omega_sq: float) -> list[McsvRecord]:
    n = spec.n
    bounds = mcsv_bound_comparison(n, m, math.sqrt(omega_sq))
    base = dict(ensemble=ensemble, n=n, m=m, k=k, omega_sq=omega_sq, iro_bound=bounds["iro_bound"],
                gaussian_bound=bounds["gaussian_bound"], status=bounds["status"])
    if spec.mcsv_seeds < 1 or bounds["status"] == "out_of_regime":
        return [McsvRecord(seed_index=None, seed_used=None, empirical_mcsv=math.nan, **base)]
    rows = []
    for s in range(spec.mcsv_seeds):
        src = RandomSource(int(spec.master_seed)).child("mcsv", m, k, s)
        a = _trial_matrix(Ensemble(ensemble), m, n, src)
        sig = random_sparse_signal(n, k, src.child("signal"))
        est = empirical_mcsv(a, sig, spec.mcsv_restarts, spec.mcsv_iters, src.child("restarts"))
        rows.append(McsvRecord(seed_index=s, seed_used=src.seed64, empirical_mcsv=est.value, **base))
    return rows


def run_mcsv_sweep(spec: ExperimentSpec) -> list[McsvRecord]:
    """Both mCSV bounds, and optionally the empirical value, over the (m/n, k/n) grid.

    Points where a bound is undefined are kept with a ``status`` other
    than ``"ok"`` (``out_of_regime``, ``m_equals_n``, ``iro_below_gaussian``).
    """
    spec.validate()
    grid = []
    for kf in spec.k_fractions:
        k = max(1, int(round(kf * spec.n)))
        if k >= spec.n:
            raise SpecError(f"k fraction {kf} gives k >= n")
        omega_sq = omega_sq_for(spec, k=k)
        for mf in spec.m_fractions:
            m = int(round(mf * spec.n))
            if not 1 <= m <= spec.n:
                raise SpecError(f"m fraction {mf} gives m={m} outside [1, n]")
            grid.extend((spec, e, m, k, omega_sq) for e in spec.ensembles)
    rows = _run_units(_mcsv_unit, grid, spec.workers)
    rows.sort(key=lambda r: (r.ensemble, r.k, r.m, -1 if r.seed_index is None else r.seed_index))
    if spec.output_path:
        write_csv(rows, spec.output_path, MCSV_COLUMNS)
    return rows


def run_recovery_trials(ensemble, n: int, k: int, m: int, trials: int, master_seed: int,
                        cfg: SolveConfig | None = None) -> np.ndarray:
    """Noiseless relative squared errors ``||x_hat - x0||^2 / ||x0||^2``, one per trial."""
    ens = Ensemble(ensemble)
    cfg = (cfg or SolveConfig()).for_sigma(0.0)
    out = np.empty(trials)
    for t in range(trials):
        tsrc = _trial_source(master_seed, m, t)
        a = _trial_matrix(ens, m, n, tsrc)
        sig = random_sparse_signal(n, k, tsrc.child("signal"))
        res = solve_classo(a, a.entries @ sig.x0, sig.l1, cfg)
        d = res.x_hat - sig.x0
        out[t] = float(d @ d) / float(sig.x0 @ sig.x0)
    return out


# -- reading and summarising ---------------------------------------------------

_INT_COLS = {"n", "m", "k", "trial_index", "seed_used", "solver_iters"}
_FLOAT_COLS = {"sigma", "omega_sq_used", "nse_empirical", "nse_predicted"}


def read_trial_csv(path) -> list[TrialRecord]:
    """Parse a trial CSV, rejecting malformed input with its line number."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SpecError(f"{path}:1: empty file") from None
        if header != TRIAL_COLUMNS:
            raise SpecError(f"{path}:1: unexpected header {header}")
        rows = []
        for line in reader:
            lineno = reader.line_num
            if not line:
                continue
            if len(line) != len(header):
                raise SpecError(f"{path}:{lineno}: expected {len(header)} fields, found {len(line)}")
            raw = dict(zip(header, line))
            try:
                vals = {}
                for c, v in raw.items():
                    if c in _INT_COLS:
                        vals[c] = int(v)
                    elif c in _FLOAT_COLS:
                        vals[c] = float(v)
                    elif c == "converged":
                        if v not in ("true", "false"):
                            raise ValueError(f"bad boolean {v!r}")
                        vals[c] = v == "true"
                    elif c == "wall_ms":
                        vals[c] = float(v) if v else None
                    else:
                        vals[c] = v
                Ensemble(vals["ensemble"])
            except ValueError as exc:
                raise SpecError(f"{path}:{lineno}: {exc}") from None
            rows.append(TrialRecord(**vals))
    return rows


@dataclass(frozen=True)
class GroupStats:
    ensemble: str
    m: int
    sigma: float
    count: int
    mean: float
    std: float
    ci_low: float
    ci_high: float
    mean_ratio: float
    single: bool


def group_stats(records) -> list[GroupStats]:
    """Mean, sample std, 95% normal CI and mean empirical/predicted ratio per (ensemble, m, sigma)."""
    groups: dict[tuple, list[TrialRecord]] = {}
    for r in records:
        groups.setdefault((r.ensemble, r.m, r.sigma), []).append(r)
    out = []
    for (ens, m, sigma), rows in sorted(groups.items()):
        vals = [r.nse_empirical for r in rows]
        mean = statistics.fmean(vals)
        single = len(vals) == 1
        std = 0.0 if single else statistics.stdev(vals)
        half = 1.959963984540054 * std / math.sqrt(len(vals))
        ratio = statistics.fmean(r.nse_empirical / r.nse_predicted for r in rows)
        out.append(GroupStats(ens, m, sigma, len(vals), mean, std, mean - half, mean + half, ratio, single))
    return out


def summarize(csv_path) -> str:
    """Text table of :func:`group_stats` for a trial CSV."""
    stats = group_stats(read_trial_csv(csv_path))
    head = f"{'ensemble':<10} {'m':>5} {'sigma':>9} {'N':>4} {'mean':>11} {'std':>10} {'95% CI':>23} {'ratio':>7}"
    lines = [head, "-" * len(head)]
    for g in stats:
        flag = "  (single row, std=0)" if g.single else ""
        ci = f"[{g.ci_low:.4g}, {g.ci_high:.4g}]"
        lines.append(f"{g.ensemble:<10} {g.m:>5d} {g.sigma:>9.3g} {g.count:>4d} {g.mean:>11.5g} "
                     f"{g.std:>10.4g} {ci:>23} {g.mean_ratio:>7.4f}{flag}")
    return "\n".join(lines) + "\n"


# -- configuration ---------------------------------------------------------------

_TUPLE_KEYS = {"ensembles": str, "m_list": int, "sigma_list": float, "m_fractions": float, "k_fractions": float}
_SCALAR_KEYS = {"master_seed": int, "n": int, "k": int, "trials": int, "width_method": str, "width_samples": int,
                "output_path": str, "workers": int, "mcsv_seeds": int, "mcsv_restarts": int, "mcsv_iters": int}
_SOLVER_KEYS = {"solver.max_iters": int, "solver.grad_tol": float}


def _parse_bool(v: str) -> bool:
    low = v.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"bad boolean {v!r}")


def load_config(path) -> dict[str, str]:
    """Read a flat ``key = value`` file (``#`` starts a comment)."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


def spec_from_mapping(mapping: dict, base: ExperimentSpec | None = None) -> ExperimentSpec:
    """Build a spec from string values keyed by :class:`ExperimentSpec` field names.

    Solver settings use ``solver.max_iters`` and ``solver.grad_tol``.
    """
    base = base or ExperimentSpec()
    kw, solver_kw = {}, {}
    for key, value in mapping.items():
        try:
            if key in _TUPLE_KEYS:
                conv = _TUPLE_KEYS[key]
                kw[key] = tuple(conv(v.strip()) for v in str(value).split(",") if v.strip())
            elif key in _SCALAR_KEYS:
                kw[key] = _SCALAR_KEYS[key](value)
            elif key == "record_timing":
                kw[key] = _parse_bool(str(value))
            elif key in _SOLVER_KEYS:
                solver_kw[key.split(".", 1)[1]] = _SOLVER_KEYS[key](value)
            else:
                raise SpecError(f"unknown config key {key!r}")
        except ValueError as exc:
            if isinstance(exc, SpecError):
                raise
            raise SpecError(f"bad value for {key!r}: {exc}") from None
    if solver_kw:
        kw["solver"] = replace(base.solver, **solver_kw)
    return replace(base, **kw)
