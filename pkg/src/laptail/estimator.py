"""Plug-in distribution estimators built from interval-total samples.

estimate_cdf chains the pieces: empirical transform of the observations,
branch-tracked log, transform map, truncated contour inversion. Its defining
contract is that it never raises: any failure (domain event, log tracking,
grid capacity, non-finite arithmetic) folds into a configured fallback value
with diagnostics saying which path was taken. The comparison estimators used
in the queueing study (direct empirical tail, censored increments) live here
too.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (CapacityError, DomainError, DomainEventFailed, EmptyResult,
                     GridTooCoarse, NearZeroTransform, ParameterError)
from .inversion import DEFAULT_QUAD, QuadratureSpec, bromwich_details, build_grid
from .transform_maps import TransformMap, apply_map, domain_check, map_plateau
from .transforms import SampleSet, TransformValues


@dataclass(frozen=True)
class EstimatorConfig:
    """Settings for one evaluation point of the plug-in estimator.

    t_max_override replaces the default contour truncation sqrt(n); the
    default tracks the sample size so that truncation error and sampling
    error shrink together. fallback_value is returned whenever estimation
    is impossible; clip projects the raw inversion output onto [0, 1].
    """

    w: float
    c: float = 1.0
    t_max_override: float | None = None
    quad: QuadratureSpec = DEFAULT_QUAD
    fallback_value: float = 0.0
    clip: bool = True

    def __post_init__(self):
        if not (self.w > 0 and math.isfinite(self.w)):
            raise ParameterError("evaluation point w must be positive")
        if not (self.c > 0 and math.isfinite(self.c)):
            raise ParameterError("contour abscissa c must be positive")
        if self.t_max_override is not None and not self.t_max_override > 0:
            raise ParameterError("t_max_override must be positive")
        if not 0.0 <= self.fallback_value <= 1.0:
            raise ParameterError("fallback_value must be in [0, 1]")

    def t_max_for(self, n: int) -> float:
        return self.t_max_override if self.t_max_override is not None else math.sqrt(n)


@dataclass(frozen=True)
class EstimateResult:
    """One estimate with full diagnostics.

    on_domain_event is False exactly when the fallback path was taken; then
    value equals the configured fallback, raw_value is None and
    fallback_reason says why ('domain_event', 'log_tracking', 'capacity' or
    'nonfinite'). raw_value records the pre-clip inversion output whenever
    clipping changed it.
    """

    value: float
    raw_value: float | None
    on_domain_event: bool
    clipped: bool
    imag_residual: float
    imag_warning: bool
    t_max_used: float
    n: int
    fallback_reason: str | None = None


def _fallback(config: EstimatorConfig, n: int, reason: str,
              tail: bool = False) -> EstimateResult:
    value = 1.0 - config.fallback_value if tail else config.fallback_value
    return EstimateResult(value=value, raw_value=None, on_domain_event=False,
                          clipped=False, imag_residual=0.0, imag_warning=False,
                          t_max_used=config.t_max_for(n), n=n,
                          fallback_reason=reason)


def _finish(raw: float, config: EstimatorConfig, n: int, imag_residual: float,
            imag_warning: bool) -> EstimateResult:
    if config.clip:
        value = min(1.0, max(0.0, raw))
    else:
        value = raw
    clipped = value != raw
    return EstimateResult(value=value, raw_value=raw if clipped else value,
                          on_domain_event=True, clipped=clipped,
                          imag_residual=imag_residual, imag_warning=imag_warning,
                          t_max_used=config.t_max_for(n), n=n)


def estimate_cdf(samples: SampleSet, transform_map: TransformMap,
                 config: EstimatorConfig) -> EstimateResult:
    """Estimate F(w) of the mapped hidden law from observed interval totals.

    Never raises on statistical or numerical failure; see EstimateResult.
    Programming errors (wrong types) still surface normally.
    """
    n = samples.n
    try:
        domain_check(transform_map, samples)
    except DomainEventFailed:
        return _fallback(config, n, "domain_event")
    t_max = config.t_max_for(n)
    try:
        grid = build_grid(config.c, t_max, config.w, config.quad)
    except CapacityError:
        return _fallback(config, n, "capacity")
    # nonfinite intermediates are legal here: they fold into the fallback,
    # so floating warnings are noise
    with np.errstate(all="ignore"):
        try:
            psi = apply_map(transform_map, samples, grid)
        except (NearZeroTransform, DomainError):
            return _fallback(config, n, "log_tracking")
        plateau = map_plateau(transform_map, samples)
        try:
            details = bromwich_details(TransformValues(grid, psi), config.w,
                                       config.quad, plateau=plateau)
        except GridTooCoarse:
            return _fallback(config, n, "capacity")
    if not math.isfinite(details.value):
        return _fallback(config, n, "nonfinite")
    return _finish(details.value, config, n, details.imag_residual,
                   details.imag_warning)


def estimate_tail(samples: SampleSet, transform_map: TransformMap,
                  config: EstimatorConfig) -> EstimateResult:
    """Estimate P(Y > w) = 1 - F(w); fallback becomes 1 - fallback_value."""
    cdf = estimate_cdf(samples, transform_map, config)
    raw = None if cdf.raw_value is None else 1.0 - cdf.raw_value
    return replace(cdf, value=1.0 - cdf.value, raw_value=raw)


def estimate_cdf_batch(samples: SampleSet, transform_map: TransformMap,
                       ws: list[float],
                       base_config: EstimatorConfig) -> list[EstimateResult]:
    """estimate_cdf at several w sharing one transform evaluation.

    The grid is sized for the largest w (the tightest step bound), built
    once, and each w reuses the mapped transform values; results are
    identical to per-w calls up to the shared-step quadrature, at a fraction
    of the cost. Results come back in the order of ``ws``.
    """
    if not ws:
        return []
    if any(not (w > 0 and math.isfinite(w)) for w in ws):
        raise ParameterError("all evaluation points must be positive")
    n = samples.n
    configs = [replace(base_config, w=w) for w in ws]
    try:
        domain_check(transform_map, samples)
    except DomainEventFailed:
        return [_fallback(cfg, n, "domain_event") for cfg in configs]
    t_max = base_config.t_max_for(n)
    try:
        grid = build_grid(base_config.c, t_max, max(ws), base_config.quad)
    except CapacityError:
        return [_fallback(cfg, n, "capacity") for cfg in configs]
    with np.errstate(all="ignore"):
        try:
            psi = apply_map(transform_map, samples, grid)
        except (NearZeroTransform, DomainError):
            return [_fallback(cfg, n, "log_tracking") for cfg in configs]
        plateau = map_plateau(transform_map, samples)
        values = TransformValues(grid, psi)
        out = []
        for cfg in configs:
            try:
                details = bromwich_details(values, cfg.w, cfg.quad, plateau=plateau)
            except GridTooCoarse:
                out.append(_fallback(cfg, n, "capacity"))
                continue
            if not math.isfinite(details.value):
                out.append(_fallback(cfg, n, "nonfinite"))
                continue
            out.append(_finish(details.value, cfg, n, details.imag_residual,
                               details.imag_warning))
    return out


def estimate_tail_batch(samples: SampleSet, transform_map: TransformMap,
                        ws: list[float],
                        base_config: EstimatorConfig) -> list[EstimateResult]:
    """Tail version of estimate_cdf_batch."""
    out = []
    for cdf in estimate_cdf_batch(samples, transform_map, ws, base_config):
        raw = None if cdf.raw_value is None else 1.0 - cdf.raw_value
        out.append(replace(cdf, value=1.0 - cdf.value, raw_value=raw))
    return out


# --------------------------------------------------------------------------
# Comparison estimators
# --------------------------------------------------------------------------

def empirical_workload_estimator(workload_samples: SampleSet, w: float) -> float:
    """Fraction of sampled workloads strictly above w."""
    if not (w >= 0 and math.isfinite(w)):
        raise ParameterError("threshold w must be nonnegative")
    return float(np.mean(workload_samples.values > w))


def censored_increments(workload_samples: SampleSet, delta: float) -> SampleSet:
    """Per-interval inflow recovered from consecutive workload readings.

    When the previous reading is at least delta the server worked the whole
    interval, so reading_i - (reading_{i-1} - delta) is exactly the work
    that arrived; smaller predecessors hide an unknown idle period and are
    dropped. Tiny negative values from float noise are snapped to 0.
    EmptyResult when no index qualifies.
    """
    if not delta > 0:
        raise ParameterError("delta must be positive")
    y = workload_samples.values
    if y.size < 2:
        raise EmptyResult("need at least two workload readings")
    prev = y[:-1]
    keep = prev >= delta
    if not np.any(keep):
        raise EmptyResult("no interval has its full drain observable")
    q = y[1:][keep] - (prev[keep] - delta)
    return SampleSet(np.maximum(q, 0.0))


def delta_heuristic(alpha_u: float, beta_u: float) -> float:
    """Sampling interval minimizing alpha*sqrt(d) + beta/sqrt(d) over d."""
    if not (alpha_u > 0 and beta_u > 0):
        raise ParameterError("both rate constants must be positive")
    return beta_u / alpha_u
