"""Continuous logarithm of a transform along the Bromwich contour.

The principal logarithm jumps when a curve crosses the negative real axis;
the estimators here need the branch that is continuous along the contour and
real at y = 0. We build it by multiplying incremental logs of consecutive
ratios, each evaluated with a power series that is only valid near 1, and
bisecting any step whose ratio strays too far from 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, NearZeroTransform, ParameterError
from .transforms import ContourGrid

# Series log(1+u) = sum (-1)^(j-1) u^j / j, truncated when the next term
# is below _SERIES_TOL in modulus.
_SERIES_TOL = 1e-17
_SERIES_MAX_TERMS = 64

# A ratio step is accepted only when |ratio - 1| <= _RATIO_RADIUS; larger
# steps are bisected. 1/2 keeps the series comfortably inside its disk of
# convergence while tolerating genuinely fast-varying transforms.
_RATIO_RADIUS = 0.5

# Relative tolerance for the imaginary part of the transform at the real
# anchor point s = c, where the value must be real and positive.
_ANCHOR_IMAG_TOL = 1e-9


def log_near_one(z):
    """log z for z near 1, principal branch, by alternating power series.

    Vectorized; requires |z - 1| < 1 everywhere, else DomainError. At the
    radius used by the tracker (1/2) the truncation error is far below
    double precision roundoff.
    """
    z = np.asarray(z, dtype=complex)
    u = z - 1.0
    if np.any(np.abs(u) >= 1.0):
        raise DomainError("log_near_one needs |z - 1| < 1")
    out = np.zeros_like(u)
    term = np.array(u)
    j = 1
    while True:
        out += term / j
        j += 1
        if j > _SERIES_MAX_TERMS:
            break
        term *= -u
        if np.all(np.abs(term) / j <= _SERIES_TOL):
            out += term / j
            break
    return out if out.ndim else complex(out)


@dataclass(frozen=True, eq=False)
class LogPath:
    """Branch-tracked log values attached to the grid they live on."""

    grid: ContourGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != self.grid.ys.shape:
            raise ParameterError("one log value per grid point required")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)


def _refined_log_ratio(evaluator: Callable, s_from: complex, f_from: complex,
                       s_to: complex, f_to: complex, depth: int) -> complex:
    """Continuous log of f_to/f_from, bisecting until each ratio is near 1."""
    if abs(f_from) == 0.0 or abs(f_to) == 0.0:
        raise NearZeroTransform(f"transform vanishes near s = {s_to}")
    ratio = f_to / f_from
    if abs(ratio - 1.0) <= _RATIO_RADIUS:
        return complex(log_near_one(ratio))
    if depth <= 0:
        raise NearZeroTransform(
            f"log tracking failed to converge between {s_from} and {s_to}; "
            "the transform is too close to zero on the contour")
    s_mid = 0.5 * (s_from + s_to)
    f_mid = complex(evaluator(s_mid))
    left = _refined_log_ratio(evaluator, s_from, f_from, s_mid, f_mid, depth - 1)
    right = _refined_log_ratio(evaluator, s_mid, f_mid, s_to, f_to, depth - 1)
    return left + right


def track_log(evaluator: Callable, grid: ContourGrid, refine_limit: int = 40,
              values: np.ndarray | None = None,
              mirror_negative: bool = True) -> LogPath:
    """Track the continuous logarithm of ``evaluator`` along the contour.

    Starting from the real anchor s = c with log f(c) = ln f(c), the log is
    continued outward point by point: each increment is the series log of
    the ratio of consecutive transform values, with recursive bisection
    (extra evaluator calls, at most ``refine_limit`` levels) whenever the
    ratio leaves the disk |z - 1| <= 1/2. Ratios whose modulus is zero, and
    steps that never settle, raise NearZeroTransform.

    ``values`` may carry precomputed transform values on the grid to avoid
    re-evaluation. With ``mirror_negative`` (the default) the negative half
    is filled by conjugate symmetry, which is exact for transforms of real
    measures; pass False to track both halves independently.

    The anchor value f(c) must be real positive (relative imaginary part
    within 1e-9), else DomainError: transforms of nonnegative measures are
    real on the real axis, so anything else means the evaluator is not one.
    """
    if refine_limit < 0:
        raise ParameterError("refine_limit must be nonnegative")
    pts = grid.points
    if values is None:
        vals = np.asarray(evaluator(pts), dtype=complex)
    else:
        vals = np.asarray(values, dtype=complex)
        if vals.shape != pts.shape:
            raise ParameterError("values must match the grid")
    mid = grid.center_index

    f_c = complex(vals[mid])
    if not (f_c.real > 0.0) or abs(f_c.imag) > _ANCHOR_IMAG_TOL * abs(f_c):
        raise DomainError(
            f"transform at s = {grid.c} must be real and positive, got {f_c}")

    def half_logs(half_pts: np.ndarray, half_vals: np.ndarray) -> np.ndarray:
        # increments for the easy steps in one vectorized pass, then patch
        # the few wide ones by bisection
        if np.any(half_vals == 0.0):
            k = int(np.flatnonzero(half_vals == 0.0)[0])
            raise NearZeroTransform(f"transform vanishes at s = {half_pts[k]}")
        ratios = half_vals[1:] / half_vals[:-1]
        incs = np.empty(ratios.shape, dtype=complex)
        near = np.abs(ratios - 1.0) <= _RATIO_RADIUS
        if np.any(near):
            incs[near] = log_near_one(ratios[near])
        for k in np.flatnonzero(~near):
            incs[k] = _refined_log_ratio(
                evaluator, complex(half_pts[k]), complex(half_vals[k]),
                complex(half_pts[k + 1]), complex(half_vals[k + 1]),
                refine_limit)
        out = np.empty(half_vals.size, dtype=complex)
        out[0] = np.log(f_c.real)
        out[1:] = out[0] + np.cumsum(incs)
        return out

    upper = half_logs(pts[mid:], vals[mid:])
    if mirror_negative:
        lower = np.conj(upper[:0:-1])
    else:
        lower = half_logs(pts[mid::-1], vals[mid::-1])[:0:-1]
    return LogPath(grid, np.concatenate([lower, upper]))
