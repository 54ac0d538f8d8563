"""Geometry of the l1 norm at a sparse point.

Distances to the (scaled) subdifferential, statistical-dimension
estimates of the tangent cone, and membership / Euclidean projection for
the tangent cone itself.

Throughout, the operational complexity parameter ``omega_sq`` is the
statistical dimension ``E[dist^2(h, cone(subdiff))]`` with ``h`` standard
normal.  It differs from the squared Gaussian width of the cone by at
most one.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ._scalar import golden_min, golden_min_batch
from .ensembles import RandomSource
from .errors import DimensionError

__all__ = [
    "SparseSignal",
    "WidthMethod",
    "WidthEstimate",
    "random_sparse_signal",
    "dist_to_scaled_subdiff",
    "min_dist_to_cone",
    "estimate_width_mc",
    "width_closed_form_sparse",
    "width_log_bound",
    "width_estimate",
    "descent_cone_member",
    "in_descent_set",
    "project_tangent_cone",
]

LAMBDA_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class SparseSignal:
    """Ground-truth vector with its support and sign pattern.

    Build one with ``SparseSignal(x0)``; support and signs are derived.
    """

    x0: np.ndarray

    def __post_init__(self):
        x0 = np.asarray(self.x0, dtype=float)
        if x0.ndim != 1:
            raise DimensionError("x0 must be a vector")
        if not np.any(x0):
            raise ValueError("x0 must have at least one nonzero entry (x0 = 0 minimises the l1 norm)")
        object.__setattr__(self, "x0", x0)

    @property
    def n(self) -> int:
        return self.x0.size

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.x0)

    @property
    def k(self) -> int:
        return int(np.count_nonzero(self.x0))

    @property
    def mask(self) -> np.ndarray:
        return self.x0 != 0

    @property
    def signs(self) -> np.ndarray:
        """Signs on the support, in support order."""
        return np.sign(self.x0[self.support])

    @property
    def sign_vector(self) -> np.ndarray:
        """Length-``n`` sign pattern, zero off the support."""
        return np.sign(self.x0)

    @property
    def l1(self) -> float:
        return float(np.abs(self.x0).sum())


def random_sparse_signal(n: int, k: int, src: RandomSource, normalize: bool = True) -> SparseSignal:
    """Uniform random support of size ``k`` with i.i.d. +-1 entries."""
    if not 1 <= k <= n:
        raise DimensionError(f"need 1 <= k <= n, got k={k}, n={n}")
    rng = src.generator()
    support = rng.permutation(n)[:k]
    x0 = np.zeros(n)
    x0[support] = rng.choice([-1.0, 1.0], size=k)
    if normalize:
        x0 /= math.sqrt(k)
    return SparseSignal(x0)


class WidthMethod(str, enum.Enum):
    MONTE_CARLO = "monte_carlo"
    CLOSED_FORM_SPARSE = "closed_form_sparse"
    LOG_BOUND = "log_bound"


@dataclass(frozen=True)
class WidthEstimate:
    omega_sq: float
    method: WidthMethod
    std_err: float = 0.0
    samples: int | None = None

    @property
    def omega(self) -> float:
        return math.sqrt(self.omega_sq)


def _check_len(v: np.ndarray, sig: SparseSignal) -> None:
    if v.shape[-1] != sig.n:
        raise DimensionError(f"vector length {v.shape[-1]} does not match n={sig.n}")


def dist_to_scaled_subdiff(h, sig: SparseSignal, lam):
    """Squared distance from ``h`` to ``lam * subdiff ||.||_1 (x0)``.

    ``h`` may be a batch of shape ``(..., n)``; ``lam`` broadcasts
    against the leading dimensions.
    """
    h = np.asarray(h, dtype=float)
    _check_len(h, sig)
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0):
        raise ValueError("lambda must be non-negative")
    lam_ = lam[..., None]
    mask = sig.mask
    on = (h[..., mask] - lam_ * sig.signs) ** 2
    off = np.maximum(np.abs(h[..., ~mask]) - lam_, 0.0) ** 2
    out = on.sum(axis=-1) + off.sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def min_dist_to_cone(h, sig: SparseSignal) -> tuple[float, float]:
    """Minimise :func:`dist_to_scaled_subdiff` over ``lam >= 0``.

    Returns ``(lam_star, dist_sq)``; the search is golden section on
    ``[0, max|h| + 1]``, which always brackets the minimiser.
    """
    h = np.asarray(h, dtype=float)
    _check_len(h, sig)
    hi = float(np.max(np.abs(h), initial=0.0)) + 1.0
    lam, val = golden_min(lambda t: dist_to_scaled_subdiff(h, sig, t), 0.0, hi, tol=LAMBDA_TOL)
    return float(lam), float(val)


def _min_dist_batch(h: np.ndarray, sig: SparseSignal) -> np.ndarray:
    hi = np.max(np.abs(h), axis=1) + 1.0
    _, val = golden_min_batch(lambda t: dist_to_scaled_subdiff(h, sig, t), np.zeros(len(h)), hi, tol=LAMBDA_TOL)
    return val


def estimate_width_mc(sig: SparseSignal, samples: int, src: RandomSource, chunk: int = 2048) -> WidthEstimate:
    """Monte Carlo statistical dimension: the sample mean of ``min_lam dist^2``.

    Chunk ``i`` of the Gaussian draws comes from substream ``("width", i)``,
    so the estimate does not depend on evaluation order.
    """
    if samples < 100:
        raise ValueError(f"need at least 100 samples, got {samples}")
    vals = []
    for i, start in enumerate(range(0, samples, chunk)):
        size = min(chunk, samples - start)
        h = src.child("width", i).generator().standard_normal((size, sig.n))
        vals.append(_min_dist_batch(h, sig))
    d = np.concatenate(vals)
    return WidthEstimate(float(d.mean()), WidthMethod.MONTE_CARLO, float(d.std(ddof=1) / math.sqrt(samples)), samples)


def _tail_second_moment(tau: float) -> float:
    # E[(|g| - tau)_+^2] for standard normal g
    return (1.0 + tau * tau) * math.erfc(tau / math.sqrt(2.0)) - tau * math.sqrt(2.0 / math.pi) * math.exp(-tau * tau / 2.0)


def _check_nk(n: int, k: int, allow_full: bool) -> None:
    upper_ok = k <= n if allow_full else k < n
    if not (1 <= k and upper_ok):
        raise DimensionError(f"invalid sparsity k={k} for n={n}")


def width_closed_form_sparse(n: int, k: int) -> WidthEstimate:
    """``min_tau k (1 + tau^2) + (n - k) E[(|g| - tau)_+^2]``.

    This is an upper bound on the statistical dimension that is accurate
    to O(1) in high dimension.
    """
    _check_nk(n, k, allow_full=False)
    _, val = golden_min(lambda t: k * (1.0 + t * t) + (n - k) * _tail_second_moment(t), 0.0, 4.0, tol=1e-10)
    return WidthEstimate(float(val), WidthMethod.CLOSED_FORM_SPARSE)


def width_log_bound(n: int, k: int) -> WidthEstimate:
    """The bound ``2 k (ln(n/k) + 1)``."""
    _check_nk(n, k, allow_full=True)
    return WidthEstimate(2.0 * k * (math.log(n / k) + 1.0), WidthMethod.LOG_BOUND)


def width_estimate(n: int, k: int, method="closed_form_sparse", samples: int = 10_000,
                   src: RandomSource | None = None) -> WidthEstimate:
    """Dispatch on ``method``; Monte Carlo uses a canonical ``k``-sparse sign pattern."""
    method = WidthMethod(method)
    if method is WidthMethod.CLOSED_FORM_SPARSE:
        return width_closed_form_sparse(n, k)
    if method is WidthMethod.LOG_BOUND:
        return width_log_bound(n, k)
    if src is None:
        raise ValueError("Monte Carlo width needs a RandomSource")
    x0 = np.zeros(n)
    x0[:k] = 1.0
    return estimate_width_mc(SparseSignal(x0), samples, src)


def _cone_constraint(w: np.ndarray, sig: SparseSignal) -> float:
    mask = sig.mask
    return float(sig.signs @ w[mask] + np.abs(w[~mask]).sum())


def descent_cone_member(w, sig: SparseSignal, tol: float = 0.0) -> bool:
    """First-order membership test for the l1 tangent cone at ``x0``.

    ``w`` is a member iff ``sum_{S} sign_i w_i + ||w_{S^c}||_1 <= tol``.
    """
    w = np.asarray(w, dtype=float)
    _check_len(w, sig)
    return _cone_constraint(w, sig) <= tol


def in_descent_set(w, sig: SparseSignal, tol: float = 0.0) -> bool:
    """Exact sublevel test ``||x0 + w||_1 <= ||x0||_1 + tol``."""
    w = np.asarray(w, dtype=float)
    _check_len(w, sig)
    return float(np.abs(sig.x0 + w).sum()) <= sig.l1 + tol


def project_tangent_cone(v, sig: SparseSignal) -> np.ndarray:
    """Euclidean projection onto the l1 tangent cone at ``x0``.

    For a multiplier ``mu >= 0`` the candidate is ``w_S = v_S - mu sign``
    and ``w_{S^c} = soft(v_{S^c}, mu)``.  The constraint value
    ``c(mu) = s.v_S - k mu + sum (|v_i| - mu)_+`` is piecewise linear and
    strictly decreasing, so the root is found exactly by scanning the
    sorted breakpoints ``|v_i|``.
    """
    v = np.asarray(v, dtype=float)
    _check_len(v, sig)
    mask = sig.mask
    signs = sig.signs
    head = float(signs @ v[mask])
    tail = np.abs(v[~mask])
    if head + tail.sum() <= 0.0:
        return v.copy()
    u = np.sort(tail)[::-1]
    csum = np.concatenate(([0.0], np.cumsum(u)))
    j = np.arange(u.size + 1)
    # on the piece where exactly j tail entries exceed mu
    mu = (head + csum) / (sig.k + j)
    upper = np.concatenate(([np.inf], u))
    lower = np.concatenate((u, [0.0]))
    ok = (mu <= upper) & (mu >= lower)
    mu_star = float(mu[np.flatnonzero(ok)[0]])
    w = np.empty_like(v)
    w[mask] = v[mask] - mu_star * signs
    vt = v[~mask]
    w[~mask] = np.sign(vt) * np.maximum(np.abs(vt) - mu_star, 0.0)
    return w
