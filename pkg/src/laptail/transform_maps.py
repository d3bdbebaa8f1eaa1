"""Maps from an observed transform to the transform of a hidden law.

Each map takes the branch-tracked log of the empirical transform of the
observed variable and produces transform values of the quantity we actually
want: the stationary workload of a queue fed by the observed increments, or
the jump-size law of a compound sum observed per time slot. Every map has a
domain event, a sample condition under which the formula is well defined;
outside it the estimator falls back rather than raising.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainEventFailed, ParameterError
from .logtrack import LogPath, track_log
from .transforms import ContourGrid, SampleSet, empirical_evaluator, empirical_transform_grid


@dataclass(frozen=True)
class Mg1Workload:
    """Stationary workload of a queue draining delta per slot.

    Observations are the total work arriving per slot; the output transform
    is the generalized Pollaczek-Khinchine formula with the arriving-work
    transform replaced by its empirical estimate.
    """

    delta: float

    def __post_init__(self):
        if not self.delta > 0:
            raise ParameterError("drain per slot delta must be positive")


@dataclass(frozen=True)
class PoissonDecompound:
    """Jump sizes of a Poisson compound sum observed per unit slot.

    The count intensity is itself estimated from the fraction of empty
    slots, so the map needs no parameters.
    """


@dataclass(frozen=True)
class BinomialDecompound:
    """Jump sizes of a binomial(big_m) compound sum observed per slot."""

    big_m: int

    def __post_init__(self):
        if not (isinstance(self.big_m, int) and self.big_m >= 1):
            raise ParameterError("big_m must be an integer >= 1")


@dataclass(frozen=True)
class NegBinomialDecompound:
    """Jump sizes of a negative binomial(big_m) compound sum per slot."""

    big_m: int

    def __post_init__(self):
        if not (isinstance(self.big_m, int) and self.big_m >= 1):
            raise ParameterError("big_m must be an integer >= 1")


TransformMap = Mg1Workload | PoissonDecompound | BinomialDecompound | NegBinomialDecompound


# --------------------------------------------------------------------------
# Value-level maps: tracked log in, transform values out
# --------------------------------------------------------------------------

def mg1_workload_values(log_path: LogPath, mean: float, delta: float) -> np.ndarray:
    """psi(s) = s (1 - mean/delta) / (s + log_transform(s) / delta)."""
    if not delta > 0:
        raise ParameterError("delta must be positive")
    s = log_path.grid.points
    return s * (1.0 - mean / delta) / (s + log_path.values / delta)


def poisson_decompound_values(log_path: LogPath, zero_frac: float) -> np.ndarray:
    """psi(s) = 1 + log_transform(s) / lambda_hat, lambda_hat = -ln(zero_frac)."""
    lam_hat = -np.log(zero_frac)
    return 1.0 + log_path.values / lam_hat


def binomial_decompound_values(log_path: LogPath, zero_frac: float,
                               big_m: int) -> np.ndarray:
    """Invert transform(s) = (q + (1-q) psi(s))^M with q^M = zero_frac.

    The continuous M-th root exp(log/M) keeps psi continuous on the contour.
    """
    root_q = zero_frac ** (1.0 / big_m)
    root = np.exp(log_path.values / big_m)
    return (root - root_q) / (1.0 - root_q)


def negbinomial_decompound_values(log_path: LogPath, zero_frac: float,
                                  big_m: int) -> np.ndarray:
    """Invert transform(s) = ((1-p) / (1 - p psi(s)))^M with (1-p)^M = zero_frac."""
    root_q = zero_frac ** (1.0 / big_m)
    inv_root = np.exp(-log_path.values / big_m)
    return (1.0 - root_q * inv_root) / (1.0 - root_q)


# --------------------------------------------------------------------------
# Sample-level application
# --------------------------------------------------------------------------

def mg1_domain_check(samples: SampleSet, delta: float) -> None:
    """Stability event: estimated load below 1, i.e. 0 <= mean < delta."""
    if not 0.0 <= samples.mean < delta:
        raise DomainEventFailed(
            f"sample mean {samples.mean:.6g} must lie in [0, delta={delta:g})")


def decompound_domain_check(samples: SampleSet) -> None:
    """Zero-slot event: the fraction of empty slots must be in (0, 1)."""
    zf = samples.zero_fraction
    if not 0.0 < zf < 1.0:
        raise DomainEventFailed(
            f"fraction of zero observations is {zf:g}; need some but not all "
            "slots empty to estimate the count rate")


def domain_check(transform_map: TransformMap, samples: SampleSet) -> None:
    """Raise DomainEventFailed when the map is undefined on this sample."""
    if isinstance(transform_map, Mg1Workload):
        mg1_domain_check(samples, transform_map.delta)
    else:
        decompound_domain_check(samples)


def map_plateau(transform_map: TransformMap, samples: SampleSet) -> float:
    """Limit of the mapped transform as |s| -> infinity along the contour.

    The workload law has an atom at zero of mass 1 - mean/delta, so its
    transform tends to that mass; the decompounding targets are assumed
    atomless at zero and tend to 0. Subtracting the plateau before
    integrating makes contour truncation errors second order.
    """
    if isinstance(transform_map, Mg1Workload):
        return 1.0 - samples.mean / transform_map.delta
    return 0.0


def apply_map(transform_map: TransformMap, samples: SampleSet,
              grid: ContourGrid, refine_limit: int = 40) -> np.ndarray:
    """Empirical transform -> tracked log -> mapped transform values.

    Raises DomainEventFailed when the sample fails the map's domain event
    and propagates log-tracking failures (NearZeroTransform, DomainError).
    """
    domain_check(transform_map, samples)
    observed = empirical_transform_grid(samples, grid)
    log_path = track_log(empirical_evaluator(samples), grid,
                         refine_limit=refine_limit, values=observed.values)
    if isinstance(transform_map, Mg1Workload):
        return mg1_workload_values(log_path, samples.mean, transform_map.delta)
    if isinstance(transform_map, PoissonDecompound):
        return poisson_decompound_values(log_path, samples.zero_fraction)
    if isinstance(transform_map, BinomialDecompound):
        return binomial_decompound_values(log_path, samples.zero_fraction,
                                          transform_map.big_m)
    if isinstance(transform_map, NegBinomialDecompound):
        return negbinomial_decompound_values(log_path, samples.zero_fraction,
                                             transform_map.big_m)
    raise ParameterError(f"unknown transform map {transform_map!r}")


def map_label(transform_map: TransformMap) -> str:
    """Short name used in command-line output."""
    if isinstance(transform_map, Mg1Workload):
        return "mg1"
    if isinstance(transform_map, PoissonDecompound):
        return "poisson"
    if isinstance(transform_map, BinomialDecompound):
        return "binomial"
    if isinstance(transform_map, NegBinomialDecompound):
        return "negbinomial"
    raise ParameterError(f"unknown transform map {transform_map!r}")
