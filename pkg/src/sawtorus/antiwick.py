"""Anti-Wick style discretisation of torus observables.

A field f is sent to the diagonal matrix of its cell averages (discretize)
and a diagonal matrix back to the simple function that is constant on each
lattice cell (dediscretize).  The continuous evolution composes f with the
map; the discrete one pulls the diagonal back along the lattice permutation.

All integrals are approximated by a tensor rule inside every lattice cell
(see :class:`QuadratureSpec`); partial sums are accumulated block by block in
a fixed order, so results depend only on the inputs.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch
from .fields import ScalarField
from .lattice import LatticePermutation, build_permutation, nearest_flat, unflat
from .torus import TorusPoint, _alpha, forward_array, is_exact, iterate_array, wrap

_BLOCK_POINTS = 1 << 21


@dataclass(frozen=True)
class QuadratureSpec:
    """Per-cell integration rule: ``M`` subdivisions per axis, midpoint or 2-point Gauss."""

    M: int = 8
    rule: str = "midpoint"

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("M must be >= 1")
        if self.rule not in ("midpoint", "gauss-2"):
            raise ValueError(f"unknown rule {self.rule!r}")

    def offsets(self) -> np.ndarray:
        """Node offsets inside a cell, in cell units, all in (-1/2, 1/2); equal weights."""
        centers = (np.arange(self.M) + 0.5) / self.M - 0.5
        if self.rule == "midpoint":
            return centers
        h = 1.0 / (2.0 * np.sqrt(3.0) * self.M)
        return np.sort(np.concatenate([centers - h, centers + h]))


DEFAULT_QUADRATURE = QuadratureSpec()


@dataclass
class DiagonalObservable:
    """Element of the diagonal algebra, stored by its N^2 diagonal entries."""

    N: int
    diag: np.ndarray

    def __post_init__(self):
        self.diag = np.asarray(self.diag, dtype=float)
        if self.diag.shape != (self.N * self.N,):
            raise ValueError(f"expected {self.N * self.N} diagonal entries, got {self.diag.shape}")
        if not np.isfinite(self.diag).all():
            raise ValueError("diagonal entries must be finite")

    @classmethod
    def identity(cls, N: int) -> "DiagonalObservable":
        return cls(N, np.ones(N * N))

    def __mul__(self, other: "DiagonalObservable") -> "DiagonalObservable":
        _same_grid(self.N, other.N)
        return DiagonalObservable(self.N, self.diag * other.diag)

    def conj(self) -> "DiagonalObservable":
        return self

    def rows(self):
        for i, v in enumerate(self.diag.tolist()):
            l1, l2 = unflat(i, self.N)
            yield i, l1, l2, v

    def to_csv(self, path):
        _write_cells(path, self.rows())


@dataclass
class SimpleFunction:
    """Function constant on every lattice cell; ``values`` in flat-index order."""

    N: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.N * self.N,):
            raise ValueError(f"expected {self.N * self.N} cell values, got {self.values.shape}")

    def __call__(self, pts):
        if isinstance(pts, TorusPoint):
            return float(self.values[nearest_flat(self.N, pts.as_array())])
        return self.values[nearest_flat(self.N, pts)]

    def as_field(self) -> ScalarField:
        return ScalarField(lambda x: self(x), name="simple", is_continuous=False,
                           sup_norm_bound=float(np.abs(self.values).max()))

    def raster(self) -> np.ndarray:
        """Cell values as an N x N image, top row = largest x2."""
        return self.values.reshape(self.N, self.N)[::-1]

    def rows(self):
        for i, v in enumerate(self.values.tolist()):
            l1, l2 = unflat(i, self.N)
            yield i, l1, l2, v

    def to_csv(self, path):
        _write_cells(path, self.rows())


def _write_cells(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["flat_index", "l1", "l2", "value"])
        for i, l1, l2, v in rows:
            w.writerow([i, l1, l2, f"{v:.17g}"])


def _same_grid(a: int, b: int):
    if a != b:
        raise GridMismatch(f"lattice sizes differ: {a} vs {b}")


def _cell_blocks(N: int, q: QuadratureSpec):
    """Yield (row_start, row_stop, nodes) with nodes of shape (rows*N, K*K, 2).

    Row r of cells has l2 = r; cell (l1, l2) sits at flat index l1 + N*l2.
    """
    off = q.offsets() / N
    K = off.size
    rows_per_block = max(1, _BLOCK_POINTS // (N * K * K))
    l1 = np.arange(N) / N
    d1, d2 = np.meshgrid(off, off, indexing="xy")
    d = np.stack([d1.ravel(), d2.ravel()], axis=-1)  # (K*K, 2)
    for start in range(0, N, rows_per_block):
        stop = min(N, start + rows_per_block)
        l2 = np.arange(start, stop) / N
        c1, c2 = np.meshgrid(l1, l2, indexing="xy")
        centers = np.stack([c1.ravel(), c2.ravel()], axis=-1)  # (rows*N, 2)
        yield start, stop, wrap(centers[:, None, :] + d[None, :, :])


def _cell_mean(v: np.ndarray) -> np.ndarray:
    """Mean over the last axis, taken as first node + mean deviation so constant cells stay bit-exact."""
    base = v[..., :1]
    return base[..., 0] + (v - base).mean(axis=-1)


def omega_state(f: ScalarField, q: QuadratureSpec = DEFAULT_QUADRATURE, N: int = 16) -> float:
    """Integral of f over the torus with M*N nodes per axis."""
    total = 0.0
    count = 0
    for _, _, nodes in _cell_blocks(N, q):
        v = f(nodes)
        total += float(v.sum())
        count += v.size
    return total / count


def tau_state(X: DiagonalObservable) -> float:
    return float(X.diag.sum()) / (X.N * X.N)


def running_average(f: ScalarField, N: int, q: QuadratureSpec, x) -> np.ndarray | float:
    """N^2 times the integral of f over the side-1/N square centred at x."""
    scalar = isinstance(x, TorusPoint)
    pts = x.as_array()[None, :] if scalar else np.asarray(x, dtype=float)
    off = q.offsets() / N
    d1, d2 = np.meshgrid(off, off, indexing="xy")
    d = np.stack([d1.ravel(), d2.ravel()], axis=-1)
    vals = _cell_mean(f(wrap(pts[..., None, :] + d)))
    return float(vals[0]) if scalar else vals


def discretize(f: ScalarField, N: int, q: QuadratureSpec = DEFAULT_QUADRATURE) -> DiagonalObservable:
    diag = np.empty(N * N)
    for start, stop, nodes in _cell_blocks(N, q):
        diag[start * N:stop * N] = _cell_mean(f(nodes))
    return DiagonalObservable(N, diag)


def dediscretize(X: DiagonalObservable) -> SimpleFunction:
    return SimpleFunction(X.N, X.diag.copy())


def koopman(f: ScalarField, p, j: int) -> ScalarField:
    """x -> f(S^j x)."""
    if j == 0:
        return f
    a = _alpha(p)
    continuous = f.is_continuous and is_exact(a) and a == int(a)
    return ScalarField(lambda x: f.func(iterate_array(a, x, j)), name=f"{f.name}@S^{j}",
                       is_continuous=continuous, sup_norm_bound=f.sup_norm_bound)


def evolve_observable(perm: LatticePermutation, X: DiagonalObservable, j: int) -> DiagonalObservable:
    """Pull-back along the lattice map: out[l] = X[V^j(l)]."""
    _same_grid(perm.N, X.N)
    return DiagonalObservable(X.N, X.diag[perm.power(j)])


def sandwich(f: ScalarField, p, N: int, q: QuadratureSpec = DEFAULT_QUADRATURE, j: int = 0,
             perm: LatticePermutation | None = None) -> SimpleFunction:
    """dediscretize(evolve(discretize(f), j)): cell l carries the average of f around V^j(l)/N."""
    if perm is None:
        perm = build_permutation(p, N)
    return dediscretize(evolve_observable(perm, discretize(f, N, q), j))


def op_norm2(f: ScalarField, p, N: int, q: QuadratureSpec = DEFAULT_QUADRATURE, j: int = 0,
             perm: LatticePermutation | None = None) -> float:
    """L2 distance between f(S^j .) and the discretised-evolved-reconstructed f."""
    if j < 0:
        a = _alpha(p)
        if perm is None:
            perm = build_permutation(a, N)
        disc = discretize(f, N, q).diag[perm.power(j)]
        total, count = 0.0, 0
        for start, stop, nodes in _cell_blocks(N, q):
            d = f.func(iterate_array(a, nodes, j)) - disc[start * N:stop * N, None]
            total += float(np.square(d).sum())
            count += d.size
        return float(np.sqrt(total / count))
    return float(op_norm2_series(f, p, N, q, j, perm)[j])


def op_norm2_series(f: ScalarField, p, N: int, q: QuadratureSpec = DEFAULT_QUADRATURE, jmax: int = 0,
                    perm: LatticePermutation | None = None, disc: DiagonalObservable | None = None) -> np.ndarray:
    """op_norm2 for j = 0..jmax in a single sweep over the sample nodes."""
    a = _alpha(p)
    if perm is None:
        perm = build_permutation(a, N)
    _same_grid(perm.N, N)
    if disc is None:
        disc = discretize(f, N, q)
    values = disc.diag
    fwd = perm.forward
    sums = np.zeros(jmax + 1)
    count = 0
    for start, stop, nodes in _cell_blocks(N, q):
        pts = nodes.reshape(-1, 2)
        K2 = nodes.shape[1]
        idx = np.repeat(np.arange(start * N, stop * N), K2)
        for j in range(jmax + 1):
            if j:
                pts = forward_array(a, pts)
                idx = fwd[idx]
            d = f.func(pts) - values[idx]
            sums[j] += float(np.dot(d, d))
        count += pts.shape[0]
    return np.sqrt(sums / count)


def l2_norm(f: ScalarField, q: QuadratureSpec = DEFAULT_QUADRATURE, N: int = 64) -> float:
    return float(np.sqrt(omega_state(f * f, q, N)))
