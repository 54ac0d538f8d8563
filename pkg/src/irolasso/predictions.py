"""Closed-form performance predictions and scalar saddle-point oracles.

All NSE predictions are stated for the ``A A^T = I_m`` convention
(Gaussian entries of variance ``1/n``).  Pass
``scaling=Scaling.ROWS_NORM_SQRT_N`` to get the value for ``A A^T = n I_m``
(standard-normal Gaussian entries), which is smaller by a factor ``n``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from ._scalar import golden_max, golden_min
from .ensembles import Ensemble, Scaling
from .errors import DimensionError, NumericalError, RegimeError

log = logging.getLogger(__name__)

__all__ = [
    "ProblemDims",
    "AOSaddle",
    "AONseComparison",
    "nse_iro",
    "nse_gaussian",
    "nse_prediction",
    "convert_nse",
    "mcsv_chi_rho",
    "mcsv_bound_iro",
    "mcsv_bound_gaussian",
    "mcsv_bound_iro_limit_full",
    "ao_objective",
    "ao_saddle_numeric",
    "ao_reconstruct_nse",
    "ao_nse_comparison",
    "mcsv_ao_objective",
    "mcsv_ao_numeric",
    "mcsv_limit_study",
    "mcsv_bound_comparison",
]

_SADDLE_TOL = 1e-13


@dataclass(frozen=True)
class ProblemDims:
    n: int
    m: int
    omega_sq: float
    scaling: Scaling = Scaling.ROWS_ORTHONORMAL

    def __post_init__(self):
        if not (0 < self.m <= self.n):
            raise DimensionError(f"need 0 < m <= n, got m={self.m}, n={self.n}")
        if self.omega_sq < 0:
            raise ValueError("omega_sq must be non-negative")
        object.__setattr__(self, "scaling", Scaling(self.scaling))

    def check_nse_regime(self) -> None:
        if self.omega_sq >= self.m:
            raise RegimeError(
                f"omega_sq={self.omega_sq:.6g} >= m={self.m}: the NSE diverges at the phase transition"
            )
        if self.m >= self.n:
            raise RegimeError(f"NSE prediction needs m < n, got m={self.m}, n={self.n}")


def convert_nse(value: float, n: int, src: Scaling, dst: Scaling) -> float:
    """Move an NSE value between the ``A A^T = I`` and ``A A^T = n I`` conventions."""
    src, dst = Scaling(src), Scaling(dst)
    if src is dst:
        return value
    return value / n if dst is Scaling.ROWS_NORM_SQRT_N else value * n


def nse_iro(d: ProblemDims) -> float:
    """Asymptotic NSE of the constrained LASSO for i.r.o. measurements.

    ``omega^2 (n - omega^2) / (m - omega^2)`` for orthonormal rows.
    """
    d.check_nse_regime()
    w = d.omega_sq
    value = w * (d.n - w) / (d.m - w)
    return convert_nse(value, d.n, Scaling.ROWS_ORTHONORMAL, d.scaling)


def nse_gaussian(d: ProblemDims) -> float:
    """Asymptotic NSE for Gaussian measurements, ``n omega^2 / (m - omega^2)``."""
    d.check_nse_regime()
    w = d.omega_sq
    value = d.n * w / (d.m - w)
    return convert_nse(value, d.n, Scaling.ROWS_ORTHONORMAL, d.scaling)


def nse_prediction(ensemble, d: ProblemDims) -> float:
    """Gaussian formula for the Gaussian ensemble, i.r.o. formula for the orthogonal ones."""
    if Ensemble(ensemble) is Ensemble.GAUSSIAN:
        return nse_gaussian(d)
    return nse_iro(d)


def mcsv_chi_rho(n: int, m: int, omega: float, parsing: str = "printed") -> tuple[float, float]:
    """The scalar saddle ``(chi, rho)`` behind the i.r.o. mCSV bound.

    ``parsing="printed"`` reads ``chi = sqrt(n - w^2)/sqrt(n - m) * sqrt(m)/n - w/n``.
    ``parsing="alternate"`` puts the ``m/n`` ratio under the root,
    ``chi = sqrt((n - w^2)/(n - m) * m/n) - w/n``; it exists only for the
    ``m -> n`` limit study.
    """
    if not m < n:
        raise RegimeError(f"chi is undefined for m >= n (m={m}, n={n})")
    if omega < 0:
        raise ValueError("omega must be non-negative")
    if omega * omega >= n:
        raise RegimeError("need omega^2 < n")
    if parsing == "printed":
        chi = math.sqrt(n - omega * omega) / math.sqrt(n - m) * math.sqrt(m) / n - omega / n
    elif parsing == "alternate":
        chi = math.sqrt((n - omega * omega) / (n - m) * m / n) - omega / n
    else:
        raise ValueError(f"unknown parsing {parsing!r}")
    if not chi > 0:
        raise RegimeError(f"chi={chi:.6g} <= 0: inputs outside the bound's regime")
    return chi, omega / chi + n - m


def mcsv_bound_iro(n: int, m: int, omega: float, zeta: float = 0.0, parsing: str = "printed") -> float:
    """Asymptotic lower bound on the minimum conic singular value of an i.r.o. matrix."""
    if zeta < 0:
        raise ValueError("zeta must be non-negative")
    if omega >= math.sqrt(m):
        raise RegimeError(f"need omega < sqrt(m), got omega={omega:.6g}, m={m}")
    chi, rho = mcsv_chi_rho(n, m, omega, parsing)
    radicand = (m + rho**2 * chi**2 - 2 * rho * chi * omega - rho * chi**2 * (n - m)) / (m + rho)
    if radicand < 0:
        raise RegimeError(f"negative radicand {radicand:.6g}")
    return math.sqrt(radicand) - zeta


def mcsv_bound_iro_limit_full(n: int, omega: float) -> float:
    """Limit of the printed i.r.o. bound as ``m -> n``: ``sqrt(1 - omega^2/n)``."""
    return math.sqrt(1.0 - omega * omega / n)


def mcsv_bound_gaussian(n: int, m: int, omega: float) -> float:
    """``(sqrt(m) - omega) / sqrt(n)`` for entries of variance ``1/n``."""
    if not 0 < m <= n:
        raise DimensionError(f"need 0 < m <= n, got m={m}, n={n}")
    if omega > math.sqrt(m) or omega < 0:
        raise RegimeError(f"need 0 <= omega <= sqrt(m), got omega={omega:.6g}, m={m}")
    return (math.sqrt(m) - omega) / math.sqrt(n)


# -- LASSO auxiliary problem -------------------------------------------------


@dataclass(frozen=True)
class AOSaddle:
    beta_sq: float
    t: float
    value: float

    @property
    def beta(self) -> float:
        return math.sqrt(self.beta_sq)


def ao_objective(beta_sq: float, t: float, n: int, m: int, omega_sq: float) -> float:
    """Deterministic limit of the scalar auxiliary objective ``d(beta, t)``."""
    den = beta_sq * m + t
    return t + beta_sq * (m - t) / den * n - (t * t + beta_sq * m * m) / (m * den) * omega_sq


def _check_ao(n, m, omega_sq):
    if not 0 <= omega_sq < m < n:
        raise RegimeError(f"need 0 <= omega_sq < m < n, got omega_sq={omega_sq}, m={m}, n={n}")


def ao_saddle_numeric(n: int, m: int, omega_sq: float) -> AOSaddle:
    """``max_{beta^2} min_t d(beta, t)`` by nested golden section.

    The boxes are ten times the closed-form saddle ``beta^2 = (m - w^2)/(n - m)``,
    ``t = m``.

    Raises
    ------
    NumericalError
        If the numerical saddle lands on a box edge.
    """
    _check_ao(n, m, omega_sq)
    b_box = 10.0 * (m - omega_sq) / (n - m)
    t_box = 10.0 * m

    def inner(b):
        return golden_min(lambda t: ao_objective(b, t, n, m, omega_sq), 0.0, t_box,
                          tol=_SADDLE_TOL * t_box, expand=False)

    b_star, value = golden_max(lambda b: inner(b)[1], 0.0, b_box, tol=_SADDLE_TOL * b_box, expand=False)
    t_star = inner(b_star)[0]
    _reject_boundary(b_star, b_box, "beta^2")
    _reject_boundary(t_star, t_box, "t")
    return AOSaddle(b_star, t_star, value)


def _reject_boundary(x, hi, name):
    if x <= 1e-9 * hi or x >= hi * (1 - 1e-9):
        raise NumericalError(f"saddle coordinate {name}={x:.6g} on the box boundary [0, {hi:.6g}]")


def ao_reconstruct_nse(saddle: AOSaddle, n: int, m: int, omega_sq: float) -> float:
    """Squared error norm implied by the auxiliary problem's optimiser.

    Uses ``||w|| = (beta^2 m + t)/(beta m) * sigma_f * omega`` with
    ``sigma_f = beta sqrt(t^2 + beta^2 m^2)/(beta^2 m + t)``.
    """
    if not saddle.beta_sq > 0:
        raise ValueError("beta must be positive")
    beta, t = saddle.beta, saddle.t
    den = saddle.beta_sq * m + t
    sigma_f = beta * math.sqrt(t * t + saddle.beta_sq * m * m) / den
    norm = den / (beta * m) * sigma_f * math.sqrt(omega_sq)
    return norm * norm


@dataclass(frozen=True)
class AONseComparison:
    reconstructed: float
    predicted: float
    agree: bool


def ao_nse_comparison(n: int, m: int, omega_sq: float, rtol: float = 1e-6) -> AONseComparison:
    """Report the reconstructed AO error beside the closed-form NSE prediction.

    The two coincide only when ``n - m == m - omega_sq``.  Disagreement is
    reported and logged, never reconciled.
    """
    saddle = ao_saddle_numeric(n, m, omega_sq)
    rec = ao_reconstruct_nse(saddle, n, m, omega_sq)
    pred = nse_iro(ProblemDims(n, m, omega_sq))
    agree = math.isclose(rec, pred, rel_tol=rtol)
    if not agree:
        log.info("AO reconstruction %.6g differs from the closed-form NSE %.6g (n=%d, m=%d, omega_sq=%.6g)",
                 rec, pred, n, m, omega_sq)
    return AONseComparison(rec, pred, agree)


# -- mCSV auxiliary problem --------------------------------------------------


def mcsv_ao_objective(t: float, beta: float, n: int, m: int, omega: float) -> float:
    """``F(t, beta) = (m + t beta^2 (t - (n - m)) - 2 t beta omega) / (m + t)``."""
    return (m + t * beta * beta * (t - (n - m)) - 2.0 * t * beta * omega) / (m + t)


def mcsv_ao_numeric(n: int, m: int, omega: float) -> AOSaddle:
    """Stationary saddle of ``F`` by nested golden section; ``value = sqrt(F)``.

    ``F`` is convex in ``beta`` for ``t > n - m`` and concave in ``beta``
    below it, so the bound's saddle is ``max_t min_beta F`` over
    ``t in [n - m, T]``.  Boxes are ten times the closed-form ``(chi, rho)``.
    ``beta_sq`` of the result holds ``beta^2``.
    """
    if not m < n:
        raise RegimeError(f"need m < n, got m={m}, n={n}")
    if not 0 <= omega < math.sqrt(m):
        raise RegimeError(f"need 0 <= omega < sqrt(m), got omega={omega:.6g}")
    chi, rho = mcsv_chi_rho(n, m, omega)
    b_box = 10.0 * chi
    t_lo, t_box = float(n - m), 10.0 * rho

    def inner(t):
        return golden_min(lambda b: mcsv_ao_objective(t, b, n, m, omega), 0.0, b_box,
                          tol=_SADDLE_TOL * b_box, expand=False)

    t_star, f_star = golden_max(lambda t: inner(t)[1], t_lo, t_box, tol=_SADDLE_TOL * t_box, expand=False)
    b_star = inner(t_star)[0]
    _reject_boundary(b_star, b_box, "beta")
    if t_star >= t_box * (1 - 1e-9) or t_star <= t_lo * (1 + 1e-12):
        raise NumericalError(f"saddle coordinate t={t_star:.6g} on the box boundary [{t_lo}, {t_box:.6g}]")
    if f_star < 0:
        raise RegimeError(f"F={f_star:.6g} < 0 at the saddle")
    return AOSaddle(b_star * b_star, t_star, math.sqrt(f_star))


def mcsv_limit_study(n: int, omega: float, m_values=None) -> list[dict]:
    """Evaluate both parsings of the i.r.o. bound as ``m`` approaches ``n``.

    Each row holds ``m``, the printed and alternate bounds, and the
    Gaussian bound.  The printed formula tends to ``sqrt(1 - omega^2/n)``,
    see :func:`mcsv_bound_iro_limit_full`.
    """
    if m_values is None:
        m_values = sorted({n - d for d in (n // 2, n // 4, n // 16, n // 64, 4, 1) if d >= 1})
    rows = []
    for m in m_values:
        row = {"m": m, "gaussian": mcsv_bound_gaussian(n, m, omega)}
        for parsing in ("printed", "alternate"):
            try:
                row[parsing] = mcsv_bound_iro(n, m, omega, parsing=parsing)
            except RegimeError:
                row[parsing] = math.nan
        rows.append(row)
    return rows


def mcsv_bound_comparison(n: int, m: int, omega: float) -> dict:
    """Both bounds at one point, with a status string instead of an exception."""
    row = {"iro_bound": math.nan, "gaussian_bound": math.nan, "status": "ok"}
    if omega >= math.sqrt(m):
        row["status"] = "out_of_regime"
        return row
    row["gaussian_bound"] = mcsv_bound_gaussian(n, m, omega)
    if m >= n:
        row["iro_bound"] = mcsv_bound_iro_limit_full(n, omega)
        row["status"] = "m_equals_n"
        return row
    try:
        row["iro_bound"] = mcsv_bound_iro(n, m, omega)
    except RegimeError:
        row["status"] = "out_of_regime"
        return row
    if row["iro_bound"] < row["gaussian_bound"]:
        row["status"] = "iro_below_gaussian"
        log.warning("i.r.o. bound %.6g below Gaussian bound %.6g at n=%d, m=%d, omega=%.6g",
                    row["iro_bound"], row["gaussian_bound"], n, m, omega)
    return row
