"""Laplace transforms on the Bromwich contour.

Empirical transforms of nonnegative samples, closed-form transforms of a few
analytic models used as oracles and simulators, and the sample file format.
All transforms are evaluated on the closed right half-plane Re(s) >= 0 only.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import ParameterError, SampleFileError

# Largest number of scalar exponential evaluations done in one vectorized
# block when evaluating a transform over a grid directly.
_DIRECT_BLOCK = 1 << 22


def _require_right_half_plane(s: complex | np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=complex)
    if np.any(s.real < 0):
        raise ParameterError("transform arguments must satisfy Re(s) >= 0")
    return s


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Immutable set of nonnegative observations with cached summaries.

    Parameters
    ----------
    values : array_like
        Nonnegative finite reals, at least one.
    zero_tol : float, optional
        Absolute threshold below which a value counts as zero. The default
        0.0 means exact floating equality with 0.0, which is the right
        choice for simulated data where zeros are exact.

    Attributes
    ----------
    n : int
        Number of observations.
    mean : float
        Arithmetic mean of the values.
    zero_fraction : float
        Fraction of values counted as zero.
    """

    values: np.ndarray
    zero_tol: float = 0.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1:
            raise ParameterError("sample values must be one-dimensional")
        if vals.size < 1:
            raise ParameterError("a sample set needs at least one value")
        if not np.all(np.isfinite(vals)):
            raise ParameterError("sample values must be finite")
        if np.any(vals < 0):
            raise ParameterError("sample values must be nonnegative")
        if self.zero_tol < 0:
            raise ParameterError("zero_tol must be nonnegative")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "n", int(vals.size))
        object.__setattr__(self, "mean", float(vals.mean()))
        if self.zero_tol == 0.0:
            zeros = int(np.count_nonzero(vals == 0.0))
        else:
            zeros = int(np.count_nonzero(vals <= self.zero_tol))
        object.__setattr__(self, "zero_fraction", zeros / vals.size)


def sample_mean(samples: SampleSet) -> float:
    """Arithmetic mean of the observations (cached at construction)."""
    return samples.mean


def zero_fraction(samples: SampleSet) -> float:
    """Fraction of observations equal to zero (cached at construction)."""
    return samples.zero_fraction


@dataclass(frozen=True, eq=False)
class ContourGrid:
    """Uniform symmetric grid on the vertical contour Re(s) = c.

    ``ys`` spans [-t_max, t_max], is strictly increasing, symmetric about 0
    and contains 0 exactly; grid points are s = c + i*y.
    """

    c: float
    t_max: float
    ys: np.ndarray

    def __post_init__(self):
        if not (self.c > 0 and math.isfinite(self.c)):
            raise ParameterError("contour abscissa c must be positive")
        if not (self.t_max > 0 and math.isfinite(self.t_max)):
            raise ParameterError("truncation level t_max must be positive")
        ys = np.asarray(self.ys, dtype=float)
        if ys.ndim != 1 or ys.size < 3:
            raise ParameterError("grid needs at least three points")
        if not np.all(np.diff(ys) > 0):
            raise ParameterError("grid ordinates must be strictly increasing")
        if ys[0] != -self.t_max or ys[-1] != self.t_max:
            raise ParameterError("grid must span [-t_max, t_max] exactly")
        if not np.array_equal(ys, -ys[::-1]):
            raise ParameterError("grid must be symmetric about 0")
        if ys[ys.size // 2] != 0.0:
            raise ParameterError("grid must contain 0")
        ys = ys.copy()
        ys.flags.writeable = False
        object.__setattr__(self, "ys", ys)

    @property
    def n_points(self) -> int:
        return self.ys.size

    @property
    def center_index(self) -> int:
        """Index of the point y = 0."""
        return self.ys.size // 2

    @property
    def points(self) -> np.ndarray:
        """Complex grid points c + i*y."""
        return self.c + 1j * self.ys

    @property
    def spacing(self) -> float:
        """Uniform step, validated to relative 1e-9."""
        d = np.diff(self.ys)
        h = float(d[0])
        if np.max(np.abs(d - h)) > 1e-9 * h:
            raise ParameterError("grid spacing is not uniform")
        return h


@dataclass(frozen=True, eq=False)
class TransformValues:
    """Transform values attached to the contour grid they were computed on."""

    grid: ContourGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != self.grid.ys.shape:
            raise ParameterError("one transform value per grid point required")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)


# --------------------------------------------------------------------------
# Analytic models
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Exponential:
    """Exponential distribution with the given rate (mean 1/rate)."""

    rate: float

    def __post_init__(self):
        if not self.rate > 0:
            raise ParameterError("exponential rate must be positive")

    @property
    def mean(self) -> float:
        return 1.0 / self.rate

    @property
    def second_moment(self) -> float:
        return 2.0 / self.rate**2

    def transform(self, s):
        s = _require_right_half_plane(s)
        return self.rate / (self.rate + s)

    def cdf(self, w):
        w = np.asarray(w, dtype=float)
        return np.where(w < 0, 0.0, -np.expm1(-self.rate * np.maximum(w, 0.0)))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.exponential(1.0 / self.rate, size)

    def sample_sums(self, rng: np.random.Generator, counts: np.ndarray) -> np.ndarray:
        # sum of k independent draws is gamma(k, 1/rate); k = 0 gives exact 0.0
        return rng.gamma(counts, 1.0 / self.rate)


@dataclass(frozen=True)
class Deterministic:
    """Unit mass at a fixed nonnegative point."""

    point: float

    def __post_init__(self):
        if self.point < 0 or not math.isfinite(self.point):
            raise ParameterError("deterministic point must be finite and >= 0")

    @property
    def mean(self) -> float:
        return self.point

    @property
    def second_moment(self) -> float:
        return self.point**2

    def transform(self, s):
        s = _require_right_half_plane(s)
        return np.exp(-s * self.point)

    def cdf(self, w):
        w = np.asarray(w, dtype=float)
        return (w >= self.point).astype(float)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.full(size, self.point)

    def sample_sums(self, rng: np.random.Generator, counts: np.ndarray) -> np.ndarray:
        return counts.astype(float) * self.point


@dataclass(frozen=True)
class Gamma:
    """Gamma distribution, shape/scale parameterization."""

    shape: float
    scale: float

    def __post_init__(self):
        if not (self.shape > 0 and self.scale > 0):
            raise ParameterError("gamma shape and scale must be positive")

    @property
    def mean(self) -> float:
        return self.shape * self.scale

    @property
    def second_moment(self) -> float:
        return self.shape * (self.shape + 1.0) * self.scale**2

    def transform(self, s):
        # principal power; 1 + scale*s stays in the right half-plane on C+
        s = _require_right_half_plane(s)
        return (1.0 + self.scale * s) ** (-self.shape)

    def cdf(self, w):
        w = np.asarray(w, dtype=float)
        return special.gammainc(self.shape, np.maximum(w, 0.0) / self.scale)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.gamma(self.shape, self.scale, size)

    def sample_sums(self, rng: np.random.Generator, counts: np.ndarray) -> np.ndarray:
        return rng.gamma(counts * self.shape, self.scale)


JobModel = Exponential | Deterministic | Gamma


@dataclass(frozen=True)
class CompoundPoisson:
    """Poisson(intensity) sum of i.i.d. draws from a job model."""

    intensity: float
    jobs: JobModel

    def __post_init__(self):
        if not self.intensity > 0:
            raise ParameterError("compound Poisson intensity must be positive")

    @property
    def mean(self) -> float:
        return self.intensity * self.jobs.mean

    @property
    def second_moment(self) -> float:
        m = self.mean
        return self.intensity * self.jobs.second_moment + m * m

    def transform(self, s):
        return np.exp(self.intensity * (self.jobs.transform(s) - 1.0))


AnalyticModel = JobModel | CompoundPoisson


def analytic_transform_eval(model: AnalyticModel, s):
    """Closed-form Laplace transform of an analytic model at s, Re(s) >= 0."""
    return model.transform(s)


# --------------------------------------------------------------------------
# Empirical transforms
# --------------------------------------------------------------------------

def empirical_transform_eval(samples: SampleSet, s):
    """Empirical Laplace transform (1/n) sum_i exp(-s x_i).

    ``s`` may be a complex scalar or an array with Re(s) >= 0; the result has
    modulus at most 1 and is conjugate-symmetric in s.
    """
    s = _require_right_half_plane(s)
    x = samples.values
    if s.ndim == 0:
        return complex(np.mean(np.exp(-s * x)))
    flat = s.ravel()
    out = np.empty(flat.size, dtype=complex)
    rows = max(1, _DIRECT_BLOCK // max(x.size, 1))
    for start in range(0, flat.size, rows):
        block = flat[start:start + rows]
        out[start:start + rows] = np.exp(-block[:, None] * x[None, :]).mean(axis=1)
    return out.reshape(s.shape)


def empirical_evaluator(samples: SampleSet):
    """Callable s -> empirical transform value, for branch tracking."""
    def evaluate(s):
        return empirical_transform_eval(samples, s)
    return evaluate


def empirical_transform_grid(samples: SampleSet, grid: ContourGrid,
                             method: str = "recurrence") -> TransformValues:
    """Empirical transform on a full contour grid.

    The default path evaluates the upper half-grid with the one-step phase
    recurrence exp(-(c+i(y+h))x) = exp(-(c+iy)x) * exp(-ihx) per sample and
    mirrors to y < 0 by conjugation, so conjugate symmetry holds exactly.
    ``method="direct"`` evaluates every point independently; both paths
    agree to 1e-10 relative.
    """
    if method == "direct":
        return TransformValues(grid, empirical_transform_eval(samples, grid.points))
    if method != "recurrence":
        raise ParameterError(f"unknown evaluation method {method!r}")
    h = grid.spacing
    x = samples.values
    mid = grid.center_index
    upper_n = grid.n_points - mid
    cur = np.exp(-grid.c * x).astype(complex)
    step = np.exp(-1j * h * x)
    upper = np.empty(upper_n, dtype=complex)
    upper[0] = cur.mean()
    for k in range(1, upper_n):
        cur *= step
        upper[k] = cur.mean()
    values = np.concatenate([np.conj(upper[:0:-1]), upper])
    return TransformValues(grid, values)


# --------------------------------------------------------------------------
# Sample files
# --------------------------------------------------------------------------

def _parse_value(token: str, path: str, line: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise SampleFileError(path, line, f"not a number: {token!r}") from None
    if not math.isfinite(value):
        raise SampleFileError(path, line, f"non-finite value: {token!r}")
    if value < 0:
        raise SampleFileError(path, line, f"negative value: {token!r}")
    return value


def load_samples(path: str, column: str | None = None,
                 zero_tol: float = 0.0) -> SampleSet:
    """Read a sample file.

    Plain text by default: one nonnegative decimal per line, blank lines and
    lines starting with '#' ignored. With ``column`` given the file is read
    as CSV and that column is extracted. Negative, non-finite or unparseable
    entries raise SampleFileError carrying the line number.
    """
    values: list[float] = []
    if column is None:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, start=1):
                text = raw.strip()
                if not text or text.startswith("#"):
                    continue
                values.append(_parse_value(text, path, lineno))
    else:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or column not in reader.fieldnames:
                raise SampleFileError(path, 1, f"no column named {column!r}")
            for row in reader:
                token = row.get(column)
                if token is None or token == "":
                    raise SampleFileError(path, reader.line_num, f"missing value in column {column!r}")
                values.append(_parse_value(token, path, reader.line_num))
    if not values:
        raise SampleFileError(path, 1, "file contains no samples")
    return SampleSet(np.asarray(values), zero_tol=zero_tol)


def save_samples(samples: SampleSet, path: str) -> None:
    """Write one value per line, full precision, loadable by load_samples."""
    with open(path, "w") as fh:
        for v in samples.values:
            fh.write(f"{float(v)!r}\n")
