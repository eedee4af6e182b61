"""Experiments comparing the lattice dynamics with the continuous map.

Every experiment is a pure function of an :class:`ExperimentConfig` and a few
sizes; random draws come from the counter-based generator in :mod:`.rng`, so
a run is reproducible from its seed alone.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import shapely

from .antiwick import DEFAULT_QUADRATURE, QuadratureSpec, l2_norm, op_norm2, op_norm2_series, sandwich
from .errors import PreconditionUnsatisfiable, Wrapped
from .fields import ScalarField
from .geometry import CurveCache, good_set_mask, n_tilde, nm_threshold, tracking_bound, tracking_error_array
from .lattice import build_permutation, nearest_flat
from .rng import substream, torus_points
from .torus import HYPERBOLIC, TorusPoint, forward_array, iterate_array, spectral, torus_distance_array


@dataclass(frozen=True)
class ExperimentConfig:
    alpha: object
    gamma: float = 3.5
    beta: float = 2.5
    d0: float = 0.1
    n_max: int = 5
    grids: tuple = (64, 256, 1024)
    quadrature: QuadratureSpec = DEFAULT_QUADRATURE
    seed: int = 0
    threshold: float = 0.5
    exploratory: bool = False

    def __post_init__(self):
        if not self.exploratory:
            if self.gamma <= 3:
                raise ValueError("gamma must exceed 3 (set exploratory=True to override)")
            if self.beta <= 2:
                raise ValueError("beta must exceed 2 (set exploratory=True to override)")
        if self.d0 <= 0:
            raise ValueError("d0 must be positive")

    @property
    def params(self):
        return spectral(self.alpha)


def _log_budget(N: int, eta: float, factor: float) -> float:
    return math.log(N) / (factor * math.log(eta))


# --- dynamical localization ----------------------------------------------------

@dataclass(frozen=True)
class LocalizationReport:
    alpha: object
    N: int
    n: int
    d0: float
    beta: float
    x_sampled: int
    x_good: int
    pairs_tested: int
    violations: int
    n_bound: float


def localization_preconditions(cfg: ExperimentConfig, N: int, n: int):
    """Raise PreconditionUnsatisfiable unless (N, n, d0) lies where localisation is guaranteed."""
    par = cfg.params
    if n < 0:
        raise PreconditionUnsatisfiable("n must be >= 0")
    if n == 0:
        if cfg.d0 <= math.sqrt(2) / N:
            raise PreconditionUnsatisfiable(f"d0 = {cfg.d0} must exceed sqrt(2)/N = {math.sqrt(2) / N:.6g}")
        return
    bound = _log_budget(N, par.eta, cfg.beta)
    if not n < bound:
        raise PreconditionUnsatisfiable(f"n = {n} is not below log N / (beta log eta) = {bound:.6g}")
    nm = nm_threshold(par, n, cfg.d0)
    if not N > nm:
        raise PreconditionUnsatisfiable(f"N = {N} is not above the localization threshold {nm:.6g}")


def localization_experiment(cfg: ExperimentConfig, N: int, n: int, x_samples: int = 10**4,
                            y_samples: int = 10**3, curves: Optional[CurveCache] = None) -> LocalizationReport:
    """Count lattice overlaps between evolved x-states and y-states at distance >= d0.

    x is drawn uniformly and kept when its lattice point lies in the good set
    G_n^N(N~/2N); for each kept x, ``y_samples`` uniform y are drawn and those
    within d0 of S^n(x) are discarded.  A violation is a kept pair whose
    lattice sites satisfy V^n(x_hat) = y_hat.
    """
    localization_preconditions(cfg, N, n)
    par = cfg.params
    perm = build_permutation(par.alpha, N)
    xs = torus_points(substream(cfg.seed, 0), x_samples)
    if n > 0:
        curves = curves if curves is not None else CurveCache(par)
        good = good_set_mask(xs, curves, N, n, n_tilde(par, n) / (2 * N))
    else:
        good = np.ones(len(xs), dtype=bool)
    idx = np.flatnonzero(good)
    target_site = perm.evolve_flat(nearest_flat(N, xs[idx]), n)
    target_pt = iterate_array(par.alpha, xs[idx], n)

    y_seed = substream(cfg.seed, 1)
    pairs = violations = 0
    batch = max(1, (1 << 20) // y_samples)
    for s in range(0, len(idx), batch):
        rows = idx[s:s + batch]
        # x number k always uses draws k*y_samples .. (k+1)*y_samples - 1
        ys = np.concatenate([torus_points(y_seed, y_samples, int(k) * y_samples) for k in rows])
        ys = ys.reshape(len(rows), y_samples, 2)
        far = torus_distance_array(ys, target_pt[s:s + batch, None, :]) >= cfg.d0
        hit = nearest_flat(N, ys) == target_site[s:s + batch, None]
        pairs += int(far.sum())
        violations += int((far & hit).sum())
    return LocalizationReport(alpha=par.alpha, N=N, n=n, d0=cfg.d0, beta=cfg.beta, x_sampled=x_samples,
                              x_good=len(idx), pairs_tested=pairs, violations=violations,
                              n_bound=_log_budget(N, par.eta, cfg.beta))


# --- tracking bound -------------------------------------------------------------

@dataclass(frozen=True)
class TrackingReport:
    alpha: object
    N: int
    n: int
    drawn: int
    good: int
    max_ratio: float
    violations: int


def tracking_experiment(cfg: ExperimentConfig, N: int, n: int, samples: int = 10**4,
                        curves: Optional[CurveCache] = None, max_draws: Optional[int] = None) -> TrackingReport:
    """Largest ratio of the lattice tracking error to its bound over ``samples`` good-set points.

    Uniform points are drawn in batches until ``samples`` of them have their
    lattice point in G_n^N(N~/2N).  A violation is a point with some ratio > 1.
    """
    par = cfg.params
    nt = n_tilde(par, n)
    if not N > nt:
        raise PreconditionUnsatisfiable(f"N = {N} is not above N~ = {nt:.6g} for n = {n}")
    eps = nt / (2 * N)
    curves = curves if curves is not None else CurveCache(par)
    perm = build_permutation(par.alpha, N)
    bounds = np.array([tracking_bound(par, N, q) for q in range(n + 1)])
    max_draws = max_draws if max_draws is not None else 100 * samples
    seed = substream(cfg.seed, 2)
    kept, drawn, worst, bad = 0, 0, 0.0, 0
    while kept < samples and drawn < max_draws:
        count = min(max(samples, 1024), max_draws - drawn)
        xs = torus_points(seed, count, drawn)
        drawn += count
        mask = good_set_mask(xs, curves, N, n, eps) if n > 0 else np.ones(len(xs), dtype=bool)
        good = xs[mask][: samples - kept]
        kept += len(good)
        if len(good):
            ratio = tracking_error_array(par.alpha, N, good, n, perm) / bounds
            worst = max(worst, float(ratio.max()))
            bad += int((ratio > 1).any(axis=1).sum())
    if kept < samples:
        raise PreconditionUnsatisfiable(f"only {kept} of {drawn} draws fell in the good set (eps = {eps:.6g})")
    return TrackingReport(alpha=par.alpha, N=N, n=n, drawn=drawn, good=kept, max_ratio=worst, violations=bad)


# --- breaking time ----------------------------------------------------------------

@dataclass(frozen=True)
class BreakingTimeRow:
    alpha: object
    N: int
    j: int
    e_norm: float
    budget: float
    threshold: float
    jstar: Optional[int]


def breaking_time_scan(cfg: ExperimentConfig, f: ScalarField, jmax: int = 8) -> list:
    """op_norm2 for every N in ``cfg.grids`` and j = 0..jmax.

    ``jstar`` is the first j whose error exceeds ``cfg.threshold * ||f||_2``
    (None if no j up to jmax does).
    """
    par = cfg.params
    norm = l2_norm(f, cfg.quadrature, 64)
    rows = []
    for N in cfg.grids:
        series = op_norm2_series(f, par.alpha, N, cfg.quadrature, jmax)
        over = np.flatnonzero(series > cfg.threshold * norm)
        jstar = int(over[0]) if len(over) else None
        budget = _log_budget(N, par.eta, cfg.gamma)
        rows.extend(BreakingTimeRow(par.alpha, N, j, float(e), budget, cfg.threshold, jstar)
                    for j, e in enumerate(series))
    return rows


# --- ball stretching ------------------------------------------------------------

@dataclass(frozen=True)
class StretchStep:
    n: int
    radius: float
    lambda_pred: Optional[float]
    eta_pred: float


@dataclass(frozen=True)
class StretchReport:
    alpha: object
    center: TorusPoint
    v: float
    steps: list = field(default_factory=list)
    wrapped_at: Optional[int] = None


def local_lift(cloud: np.ndarray) -> np.ndarray:
    """Unwrap a torus point cloud around its first point; Wrapped if it spans half the torus."""
    d = cloud - cloud[0]
    lifted = cloud[0] + d - np.round(d)
    hull = np.asarray(shapely.convex_hull(shapely.multipoints(lifted)).exterior.coords
                      if len(lifted) > 2 else lifted)
    diff = hull[:, None, :] - hull[None, :, :]
    if np.hypot(diff[..., 0], diff[..., 1]).max() >= 0.5:
        raise Wrapped("point cloud diameter reached 1/2")
    return lifted


def enclosing_radius(points: np.ndarray) -> float:
    return float(shapely.minimum_bounding_radius(shapely.multipoints(points)))


def ball_stretch(cfg: ExperimentConfig, center: TorusPoint, v: float, n_max: int = 6,
                 boundary_samples: int = 2000) -> StretchReport:
    """Minimal enclosing radius of S^n(circle of radius v about center), n = 0 .. n_max - 1.

    The list stops early, with ``wrapped_at`` set, at the first n whose cloud
    no longer fits in one chart.
    """
    if not 0 < v < 0.25:
        raise ValueError("v must lie in (0, 1/4)")
    par = cfg.params
    theta = 2 * np.pi * np.arange(boundary_samples) / boundary_samples
    cloud = center.as_array() + v * np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    steps, wrapped_at = [], None
    for n in range(n_max):
        if n:
            cloud = forward_array(par.alpha, cloud)
        try:
            radius = enclosing_radius(local_lift(cloud))
        except Wrapped:
            wrapped_at = n
            break
        lam = par.lam ** n * v if par.regime == HYPERBOLIC else None
        steps.append(StretchStep(n, radius, lam, par.eta ** n * v))
    return StretchReport(alpha=par.alpha, center=center, v=v, steps=steps, wrapped_at=wrapped_at)


# --- field comparison -------------------------------------------------------------

@dataclass(frozen=True)
class FieldComparison:
    N: int
    j: int
    koopman: np.ndarray
    sandwich: np.ndarray
    e_norm: float

    @property
    def difference(self) -> np.ndarray:
        return self.koopman - self.sandwich


def pixel_centres(N: int) -> np.ndarray:
    """Lattice points l/N arranged as an N x N image (top row = largest x2)."""
    c = np.arange(N) / N
    x1, x2 = np.meshgrid(c, c[::-1], indexing="xy")
    return np.stack([x1, x2], axis=-1)


def field_compare(cfg: ExperimentConfig, f: ScalarField, N: int, j: int) -> FieldComparison:
    """f(S^j .) sampled at the lattice points next to the reconstructed discrete evolution."""
    par = cfg.params
    perm = build_permutation(par.alpha, N)
    pts = pixel_centres(N)
    cont = f.func(iterate_array(par.alpha, pts, j))
    disc = sandwich(f, par.alpha, N, cfg.quadrature, j, perm).raster()
    return FieldComparison(N=N, j=j, koopman=cont, sandwich=disc,
                           e_norm=op_norm2(f, par.alpha, N, cfg.quadrature, j, perm))
