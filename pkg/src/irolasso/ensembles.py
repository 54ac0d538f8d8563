"""Seeded generation of measurement matrices and noise.

Four ensembles are supported: i.i.d. Gaussian, isotropically random
orthogonal (i.r.o.), and row-subsampled DCT / Hadamard matrices.  All
generators are pure functions of their dimensions and a
:class:`RandomSource`, so they can be called concurrently.

The default scaling is ``ROWS_ORTHONORMAL`` (``A @ A.T == I_m``).  The
``A @ A.T == n I_m`` convention is available only through an explicit
:meth:`MeasurementMatrix.rescaled` call.
"""

from __future__ import annotations

import enum
import hashlib
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.linalg import hadamard

from .errors import DimensionError, NumericalError

__all__ = [
    "Ensemble",
    "Scaling",
    "RandomSource",
    "MeasurementMatrix",
    "gen_gaussian",
    "gen_iro",
    "gen_partial_dct",
    "gen_partial_hadamard",
    "gen_noise",
    "generate",
    "dct_matrix",
    "save_matrix",
    "load_matrix",
]

ORTHO_TOL = 1e-10
_MAGIC = b"IROMAT01"
_HEADER = struct.Struct("<8sII")  # 16 bytes: magic, m, n


class Ensemble(str, enum.Enum):
    GAUSSIAN = "gaussian"
    IRO = "iro"
    PARTIAL_DCT = "pdct"
    PARTIAL_HADAMARD = "phadamard"

    @property
    def is_orthogonal(self) -> bool:
        return self is not Ensemble.GAUSSIAN


class Scaling(str, enum.Enum):
    ROWS_ORTHONORMAL = "rows_orthonormal"
    ROWS_NORM_SQRT_N = "rows_norm_sqrt_n"


def _label_part(part) -> int:
    if isinstance(part, (bool, np.bool_)):
        return int(part)
    if isinstance(part, (int, np.integer)):
        part = int(part)
        if part >= 0:
            return part
        part = f"neg{part}"
    if isinstance(part, enum.Enum):
        part = part.value
    digest = hashlib.blake2b(str(part).encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


@dataclass(frozen=True)
class RandomSource:
    """A master seed plus a structured label naming one substream.

    ``RandomSource(7).child("matrix", 128, 3)`` and a second call with the
    same arguments yield bit-identical generators on every platform; any
    change to the label gives an unrelated stream.  Labels may hold
    non-negative ints and strings (strings are hashed with BLAKE2b, never
    Python's salted ``hash``).
    """

    master_seed: int
    label: tuple = field(default=())

    def __post_init__(self):
        if not 0 <= int(self.master_seed) < 2**64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")

    def child(self, *parts) -> "RandomSource":
        return RandomSource(self.master_seed, self.label + tuple(parts))

    def seed_sequence(self) -> np.random.SeedSequence:
        key = tuple(_label_part(p) for p in self.label)
        return np.random.SeedSequence(int(self.master_seed), spawn_key=key)

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.seed_sequence()))

    @property
    def seed64(self) -> int:
        """A 64-bit digest of this substream, suitable for logging."""
        return int(self.seed_sequence().generate_state(1, np.uint64)[0])


@dataclass(frozen=True, eq=False)
class MeasurementMatrix:
    """Dense ``m x n`` matrix tagged with its ensemble and scaling.

    For the Gaussian ensemble ``variance`` holds the entry variance and
    ``scaling`` states the convention met in expectation (``None`` if the
    variance matches neither ``1/n`` nor ``1``).
    """

    entries: np.ndarray
    ensemble: Ensemble
    scaling: Scaling | None = Scaling.ROWS_ORTHONORMAL
    variance: float | None = None

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def orthonormality_error(self) -> float:
        """Max entrywise deviation of ``A A^T`` from its nominal value."""
        target = 1.0 if self.scaling is Scaling.ROWS_ORTHONORMAL else float(self.n)
        gram = self.entries @ self.entries.T
        return float(np.max(np.abs(gram - target * np.eye(self.m))))

    def rescaled(self, scaling: Scaling) -> "MeasurementMatrix":
        """Convert between ``A A^T = I`` and ``A A^T = n I``."""
        scaling = Scaling(scaling)
        if self.scaling is None:
            raise ValueError("matrix has no recognised scaling convention")
        if scaling is self.scaling:
            return self
        factor = math.sqrt(self.n)
        if scaling is Scaling.ROWS_ORTHONORMAL:
            factor = 1.0 / factor
        variance = None if self.variance is None else self.variance * factor**2
        return MeasurementMatrix(self.entries * factor, self.ensemble, scaling, variance)


def _check_dims(m: int, n: int) -> None:
    if m < 1 or n < 1:
        raise DimensionError(f"dimensions must be positive, got m={m}, n={n}")
    if m > n:
        raise DimensionError(f"need m <= n, got m={m}, n={n}")


def _sample_rows(m: int, n: int, src: RandomSource) -> np.ndarray:
    # Generator.permutation is an in-place Fisher-Yates shuffle
    return src.generator().permutation(n)[:m]


def _column_signs(n: int, src: RandomSource) -> np.ndarray:
    return src.child("column-signs").generator().choice([-1.0, 1.0], size=n)


def gen_gaussian(m: int, n: int, variance: float, src: RandomSource) -> MeasurementMatrix:
    """I.i.d. ``N(0, variance)`` entries.

    Uses the same draws as :func:`gen_iro` for the same ``src``, so the
    two ensembles can be paired trial by trial.
    """
    _check_dims(m, n)
    if not variance > 0:
        raise ValueError(f"variance must be positive, got {variance}")
    g = src.generator().standard_normal((m, n))
    if math.isclose(variance * n, 1.0):
        scaling = Scaling.ROWS_ORTHONORMAL
    elif math.isclose(variance, 1.0):
        scaling = Scaling.ROWS_NORM_SQRT_N
    else:
        scaling = None
    return MeasurementMatrix(g * math.sqrt(variance), Ensemble.GAUSSIAN, scaling, float(variance))


def gen_iro(m: int, n: int, src: RandomSource) -> MeasurementMatrix:
    """Isotropically random orthogonal matrix ``(G G^T)^{-1/2} G``.

    The inverse square root of the Gram matrix comes from its symmetric
    eigendecomposition.

    Raises
    ------
    NumericalError
        If ``G G^T`` is numerically singular or the result fails the
        orthonormality post-check.
    """
    _check_dims(m, n)
    g = src.generator().standard_normal((m, n))
    evals, evecs = np.linalg.eigh(g @ g.T)
    if evals[0] < 1e-12 * evals[-1]:
        raise NumericalError("degenerate Gaussian draw: G G^T is numerically singular")
    a = (evecs / np.sqrt(evals)) @ (evecs.T @ g)
    out = MeasurementMatrix(a, Ensemble.IRO)
    err = out.orthonormality_error()
    if err > ORTHO_TOL:
        raise NumericalError(f"i.r.o. post-check failed: max |A A^T - I| = {err:.3e}")
    return out


def dct_matrix(n: int) -> np.ndarray:
    """Orthonormal DCT-II matrix by direct cosine evaluation, O(n^2)."""
    k = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    c = np.cos(np.pi * (2 * j + 1) * k / (2 * n)) * math.sqrt(2.0 / n)
    c[0] = 1.0 / math.sqrt(n)
    return c


def gen_partial_dct(m: int, n: int, src: RandomSource, column_signs: bool = False) -> MeasurementMatrix:
    """``m`` rows of the orthonormal DCT-II, drawn uniformly without replacement.

    ``column_signs=True`` additionally flips column signs at random.  That
    randomisation is an extension; by default only rows are sampled.
    """
    _check_dims(m, n)
    rows = dct_matrix(n)[_sample_rows(m, n, src)]
    if column_signs:
        rows = rows * _column_signs(n, src)
    return MeasurementMatrix(rows, Ensemble.PARTIAL_DCT)


def gen_partial_hadamard(m: int, n: int, src: RandomSource, column_signs: bool = False) -> MeasurementMatrix:
    """``m`` rows of the Sylvester Hadamard matrix scaled by ``1/sqrt(n)``."""
    _check_dims(m, n)
    if n & (n - 1):
        raise DimensionError(f"Hadamard ensemble needs n a power of two, got n={n}")
    rows = hadamard(n, dtype=float)[_sample_rows(m, n, src)] / math.sqrt(n)
    if column_signs:
        rows = rows * _column_signs(n, src)
    return MeasurementMatrix(rows, Ensemble.PARTIAL_HADAMARD)


def gen_noise(m: int, src: RandomSource) -> np.ndarray:
    """Length-``m`` standard normal vector."""
    if m < 0:
        raise DimensionError(f"noise length must be non-negative, got {m}")
    return src.generator().standard_normal(m)


def generate(ensemble, m: int, n: int, src: RandomSource) -> MeasurementMatrix:
    """Draw from ``ensemble`` in the ``A A^T = I`` (in expectation) convention.

    Gaussian entries get variance ``1/n`` so every ensemble shares
    ``E[A A^T] = I_m``.
    """
    ensemble = Ensemble(ensemble)
    if ensemble is Ensemble.GAUSSIAN:
        return gen_gaussian(m, n, 1.0 / n, src)
    if ensemble is Ensemble.IRO:
        return gen_iro(m, n, src)
    if ensemble is Ensemble.PARTIAL_DCT:
        return gen_partial_dct(m, n, src)
    return gen_partial_hadamard(m, n, src)


def save_matrix(path, a) -> None:
    """Write ``a`` as a 16-byte header (magic, m, n) plus little-endian float64 data."""
    arr = np.ascontiguousarray(np.asarray(a), dtype="<f8")
    if arr.ndim != 2:
        raise DimensionError("only 2-D matrices can be saved")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, *arr.shape))
        fh.write(arr.tobytes(order="C"))


def load_matrix(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ValueError(f"{path}: truncated header")
    magic, m, n = _HEADER.unpack_from(data)
    if magic != _MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    body = data[_HEADER.size:]
    if len(body) != 8 * m * n:
        raise ValueError(f"{path}: expected {8 * m * n} data bytes, found {len(body)}")
    return np.frombuffer(body, dtype="<f8").reshape(m, n).astype(float)
