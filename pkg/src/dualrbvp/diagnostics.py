"""Regularity diagnostics: modulus of continuity, a Dini-type estimate,
and sup norms.

The Dini estimate is an upper-sum approximation of

    sup over anchors tau of  integral_0^1  omega(eta) / eta  d theta_tau(eta)

on a geometrically refined eta grid, with theta_tau the arc length of the
curve within distance eta of the anchor.  Finite sampling cannot decide the
underlying condition; the estimate is advisory and is reported with a
refinement-stability flag instead of a verdict.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebra import DualComplex, dc_norm
from .contour import Contour, theta_measure
from .integral import boundary_samples

ANCHOR_COUNT = 32
ETA_RATIO = 2.0 ** 0.25  # refined dyadic grid: 4 points per octave


def modulus_of_continuity(contour: Contour, g, eps_grid=None):
    """Sampled modulus omega(eps) = max ||g(t1) - g(t2)|| over node pairs
    with |t1 - t2| <= eps.  Returns (eps_grid, omega) arrays."""
    vals = boundary_samples(g, contour)
    xy = contour.xy
    dx = xy[:, 0][:, None] - xy[:, 0][None, :]
    dy = xy[:, 1][:, None] - xy[:, 1][None, :]
    dist = np.hypot(dx, dy)
    d1 = np.asarray(vals.c1)
    d2 = np.asarray(vals.c2)
    gap = np.hypot(np.abs(d1[:, None] - d1[None, :]),
                   np.abs(d2[:, None] - d2[None, :]))
    if eps_grid is None:
        lo = max(float(dist[dist > 0].min()), 1e-12)
        hi = float(dist.max())
        m = int(np.ceil(np.log(hi / lo) / np.log(2.0))) + 1
        eps_grid = hi / (2.0 ** np.arange(m))[::-1]
    eps_grid = np.asarray(eps_grid, dtype=float)
    omega = np.array([gap[dist <= e].max() if np.any(dist <= e) else 0.0
                      for e in eps_grid])
    return eps_grid, omega


def dini_estimate(contour: Contour, g, levels: int = 40,
                  n_anchors: int = ANCHOR_COUNT) -> float:
    """Upper-sum estimate of the Dini integral over a subsample of anchors."""
    est, _ = _dini_partial_sums(contour, g, levels, n_anchors)
    return float(est[-1])


def _dini_partial_sums(contour: Contour, g, levels: int, n_anchors: int):
    """Partial sums of the upper Darboux estimate, coarse eta first."""
    eta = 1.0 / (ETA_RATIO ** np.arange(levels + 1))
    eta = eta[eta >= max(contour.max_spacing, 1e-12)]
    if len(eta) < 2:
        eta = np.array([1.0, contour.max_spacing])
    _, omega = modulus_of_continuity(contour, g, eps_grid=eta[::-1])
    omega = omega[::-1]  # align with descending eta
    anchors = np.linspace(0, contour.n, n_anchors, endpoint=False).astype(int)
    sums = np.zeros((len(anchors), len(eta) - 1))
    for a, k in enumerate(anchors):
        theta = np.array([theta_measure(contour, k, e) for e in eta])
        inc = theta[:-1] - theta[1:]
        sums[a] = (omega[:-1] / eta[1:]) * inc
    partial = np.cumsum(sums, axis=1).max(axis=0)
    return partial, eta


@dataclass
class RegularityReport:
    eps_grid: np.ndarray
    omega: np.ndarray
    dini_estimate: float
    dini_half_depth: float
    is_constant: bool
    lipschitz_slope: Optional[float]
    divergence_suspected: bool


def regularity_report(contour: Contour, g, levels: int = 40) -> RegularityReport:
    """Bundle of regularity diagnostics used by the verification report."""
    eps, omega = modulus_of_continuity(contour, g)
    partial, _ = _dini_partial_sums(contour, g, levels, ANCHOR_COUNT)
    full = float(partial[-1])
    half = float(partial[(len(partial) - 1) // 2])
    is_const = bool(omega.max() <= 1e-14)
    slope = None
    small = eps <= 0.25 * eps.max()
    if not is_const and small.sum() >= 2:
        slope = float(np.polyfit(eps[small], omega[small], 1)[0])
    divergent = half > 0 and full / max(half, 1e-300) > 1.8
    return RegularityReport(eps_grid=eps, omega=omega, dini_estimate=full,
                            dini_half_depth=half, is_constant=is_const,
                            lipschitz_slope=slope,
                            divergence_suspected=bool(divergent))


def sup_norm(f, points) -> float:
    """Largest value norm over a sample set.

    ``f`` may be an evaluator over points, an expression, or a precomputed
    sample set; ``points`` is a PointE array."""
    if isinstance(f, DualComplex):
        return float(np.max(dc_norm(f)))
    from .integral import field_eval
    return float(np.max(dc_norm(field_eval(f, points))))
