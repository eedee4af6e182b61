"""Discontinuity curves of the iterated map and the sets built from them.

gamma_0 is the circle x1 = 0, where the map itself jumps.  Its images under
inverse steps, gamma_m = S^{-m}(gamma_0), are where S^{m+1} is
discontinuous; forward images gamma_{-m} = S^m(gamma_0) are their mirror
family (gamma_{-1} is the diagonal, where S^{-1} jumps).

A curve is stored as a list of straight pieces, each given by a start point
in [0, 1]^2 and a lift vector with both components at most 1/2 in size, so the
piece is the shortest segment between its endpoints.  Since the map is affine
between its discontinuity lines, pushing a curve forward is: split every
piece where it meets the jump line, map both endpoints with the local affine
branch, then cut the images at the unit grid and translate back.

Distances for large point sets use a shapely STRtree to shortlist the
pieces that can be nearest (see :func:`curve_distances`); the brute-force
numpy version checks every piece and serves as the reference.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
import shapely

from .errors import DepthExceeded
from .lattice import LatticePermutation, build_permutation, nearest_flat, nearest_lattice, unflat
from .rng import torus_points
from .torus import (SawtoothParams, TorusPoint, _alpha, forward_array, inverse_array, iterate,
                    spectral, torus_distance, wrap)

MAX_DEPTH = 8
_SHIFTS = np.array([(s1, s2) for s1 in (-1, 0, 1) for s2 in (-1, 0, 1)], dtype=float)
_TINY = 1e-14


def _params(p) -> SawtoothParams:
    return p if isinstance(p, SawtoothParams) else spectral(p)


@dataclass(frozen=True)
class TorusSegment:
    """Straight piece from ``a`` to ``b``; ``lift`` is the copy of b in R^2 the piece ends at."""

    a: TorusPoint
    b: TorusPoint
    lift: tuple

    @property
    def length(self) -> float:
        return math.hypot(self.lift[0] - float(self.a.x1), self.lift[1] - float(self.a.x2))


@dataclass(frozen=True)
class CurveFamily:
    """Piecewise straight curve gamma_p; ``starts`` and ``ends`` are (k, 2) lifts."""

    p: int
    alpha: object
    starts: np.ndarray = field(repr=False)
    ends: np.ndarray = field(repr=False)
    _tree: list = field(default_factory=list, repr=False, compare=False)

    def __len__(self):
        return len(self.starts)

    @property
    def segments(self) -> list:
        out = []
        for a, b in zip(self.starts, self.ends):
            start = TorusPoint(float(a[0]), float(a[1]))
            lift = (float(start.x1 + b[0] - a[0]), float(start.x2 + b[1] - a[1]))
            out.append(TorusSegment(start, TorusPoint(float(b[0]), float(b[1])), lift))
        return out

    @property
    def length(self) -> float:
        return float(np.hypot(*(self.ends - self.starts).T).sum())

    def tree(self):
        """STRtree over the pieces and their eight neighbouring integer translates."""
        if not self._tree:
            shifted_a = (self.starts[None, :, :] + _SHIFTS[:, None, :]).reshape(-1, 2)
            shifted_b = (self.ends[None, :, :] + _SHIFTS[:, None, :]).reshape(-1, 2)
            lines = shapely.linestrings(np.stack([shifted_a, shifted_b], axis=1))
            self._tree.append(shapely.STRtree(lines))
        return self._tree[0]

    def rows(self):
        for k, (a, b) in enumerate(zip(self.starts.tolist(), self.ends.tolist())):
            yield self.p, k, a[0], a[1], b[0], b[1]

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            write_curve_rows(csv.writer(fh, lineterminator="\n"), [self], header=True)


def write_curve_rows(writer, curves, header=True):
    if header:
        writer.writerow(["p", "seg_id", "a1", "a2", "b1", "b2"])
    for c in curves:
        for p, k, a1, a2, b1, b2 in c.rows():
            writer.writerow([p, k, f"{a1:.17g}", f"{a2:.17g}", f"{b1:.17g}", f"{b2:.17g}"])


# --- construction -----------------------------------------------------------

def _cut(a, b, levels_fn):
    """Split segment a->b at the parameters returned by ``levels_fn``; yields sub-segments."""
    ts = sorted(t for t in levels_fn(a, b) if _TINY < t < 1 - _TINY)
    pts = [a] + [a + t * (b - a) for t in ts] + [b]
    for u, v in zip(pts[:-1], pts[1:]):
        if np.hypot(*(v - u)) > _TINY:
            yield u, v


def _grid_crossings(a, b):
    """Parameters where a coordinate of a + t(b - a) is an integer."""
    out = []
    for i in (0, 1):
        lo, hi = sorted((a[i], b[i]))
        if hi - lo < _TINY:
            continue
        for k in range(math.floor(lo) + 1, math.ceil(hi)):
            out.append((k - a[i]) / (b[i] - a[i]))
    return out


def _diagonal_crossings(a, b):
    """Parameters where x1 - x2 is an integer."""
    u0, u1 = a[0] - a[1], b[0] - b[1]
    lo, hi = sorted((u0, u1))
    if hi - lo < _TINY:
        return []
    return [(k - u0) / (u1 - u0) for k in range(math.floor(lo) + 1, math.ceil(hi))]


def _canonical(a, b):
    """Cut a lifted segment at the unit grid, translate each piece into [0,1]^2, halve long ones."""
    out = []
    for u, v in _cut(a, b, _grid_crossings):
        shift = np.floor((u + v) / 2)
        u, v = u - shift, v - shift
        if np.abs(v - u).max() > 0.5 + _TINY:
            m = (u + v) / 2
            out.extend([(u, m), (m, v)])
        else:
            out.append((u, v))
    return out


def _step(alpha: float, pieces, direction: int):
    """Image of a piece list under S (direction +1) or S^{-1} (direction -1)."""
    out = []
    splitter = _grid_crossings if direction == 1 else _diagonal_crossings
    for a, b in pieces:
        for u, v in _cut(a, b, splitter):
            m = (u + v) / 2
            if direction == 1:
                k1 = math.floor(m[0])
                img = [np.array([(1 + alpha) * (w[0] - k1) + w[1], alpha * (w[0] - k1) + w[1]]) for w in (u, v)]
            else:
                k1 = math.floor(m[0] - m[1])
                img = [np.array([w[0] - w[1] - k1, w[1] - alpha * (w[0] - w[1] - k1)]) for w in (u, v)]
            out.extend(_canonical(img[0], img[1]))
    return out


def gamma_curve(p, index: int, max_depth: int = MAX_DEPTH) -> CurveFamily:
    """gamma_index: S^{-index}(gamma_0) for index > 0, S^{|index|}(gamma_0) for index < 0."""
    if abs(index) > max_depth:
        raise DepthExceeded(f"|index| = {abs(index)} exceeds the configured depth {max_depth}")
    par = _params(p)
    alpha = float(par.alpha)
    pieces = _canonical(np.array([0.0, 0.0]), np.array([0.0, 1.0]))
    direction = -1 if index > 0 else 1
    for _ in range(abs(index)):
        pieces = _step(alpha, pieces, direction)
    starts = np.array([u for u, _ in pieces], dtype=float).reshape(-1, 2)
    ends = np.array([v for _, v in pieces], dtype=float).reshape(-1, 2)
    curve = CurveFamily(p=index, alpha=par.alpha, starts=starts, ends=ends)
    if curve.length > par.eta ** abs(index) * (1 + 1e-9) + 1e-9:
        raise AssertionError(f"gamma_{index} has length {curve.length} > eta^{abs(index)}")
    return curve


def curve_length(c: CurveFamily) -> float:
    return c.length


class CurveCache:
    """Lazily built gamma_q for one parameter, shared between membership tests."""

    def __init__(self, p, max_depth: int = MAX_DEPTH):
        self.params = _params(p)
        self.max_depth = max_depth
        self._curves = {}

    def __getitem__(self, q: int) -> CurveFamily:
        if q not in self._curves:
            self._curves[q] = gamma_curve(self.params, q, self.max_depth)
        return self._curves[q]


# --- distances and membership ------------------------------------------------

def _segment_distance(pts, a, b):
    """Distance from every point (n, 2) to every segment (k, 2)->(k, 2); shape (n, k)."""
    d = b - a
    dd = np.einsum("ki,ki->k", d, d)
    w = pts[:, None, :] - a[None, :, :]
    t = np.einsum("nki,ki->nk", w, d) / np.where(dd > 0, dd, 1.0)
    t = np.clip(t, 0.0, 1.0)
    r = w - t[..., None] * d[None, :, :]
    return np.hypot(r[..., 0], r[..., 1])


def distances_brute(pts, c: CurveFamily, chunk: int = 1 << 22) -> np.ndarray:
    """Torus distance from each point to the curve, by checking every piece and shift."""
    pts = wrap(np.atleast_2d(np.asarray(pts, dtype=float)))
    a = (c.starts[None] + _SHIFTS[:, None]).reshape(-1, 2)
    b = (c.ends[None] + _SHIFTS[:, None]).reshape(-1, 2)
    step = max(1, chunk // max(1, len(a)))
    out = np.empty(len(pts))
    for s in range(0, len(pts), step):
        out[s:s + step] = _segment_distance(pts[s:s + step], a, b).min(axis=1)
    return out


def distance_to_curve(x: TorusPoint, c: CurveFamily) -> float:
    return float(distances_brute(x.as_array(), c)[0])


def in_strip(x: TorusPoint, c: CurveFamily, eps: float) -> bool:
    if eps < 0:
        raise ValueError("eps must be >= 0")
    return distance_to_curve(x, c) <= eps


def curve_distances(pts, c: CurveFamily, cells: int = 128, chunk: int = 1 << 18) -> np.ndarray:
    """Torus distance from each point to the curve, for large point sets.

    The unit square is cut into ``cells``^2 boxes of side h.  If the curve is
    at distance D from a box centre, the piece nearest to any point of that
    box lies within D + h*sqrt(2) of the centre, so only those pieces (found
    with the spatial index) are compared exactly.
    """
    pts = wrap(np.atleast_2d(np.asarray(pts, dtype=float)))
    tree = c.tree()
    a = (c.starts[None] + _SHIFTS[:, None]).reshape(-1, 2)
    b = (c.ends[None] + _SHIFTS[:, None]).reshape(-1, 2)
    h = 1.0 / cells
    g1, g2 = np.meshgrid((np.arange(cells) + 0.5) * h, (np.arange(cells) + 0.5) * h, indexing="xy")
    centres = shapely.points(np.stack([g1.ravel(), g2.ravel()], axis=-1))
    _, dc = tree.query_nearest(centres, return_distance=True, all_matches=False)
    box, piece = tree.query(centres, predicate="dwithin", distance=dc + h * math.sqrt(2) + 1e-12)
    order = np.lexsort((piece, box))
    box, piece = box[order], piece[order]
    first = np.searchsorted(box, np.arange(cells * cells))
    count = np.bincount(box, minlength=cells * cells)

    out = np.empty(len(pts))
    for s in range(0, len(pts), chunk):
        x = pts[s:s + chunk]
        cell = np.minimum((x[:, 0] * cells).astype(np.int64), cells - 1)
        cell += cells * np.minimum((x[:, 1] * cells).astype(np.int64), cells - 1)
        k = count[cell]
        owner = np.repeat(np.arange(len(x)), k)
        starts = np.repeat(first[cell] - np.cumsum(k) + k, k)
        cand = piece[np.arange(len(owner)) + starts]
        d = b[cand] - a[cand]
        w = x[owner] - a[cand]
        dd = np.einsum("ij,ij->i", d, d)
        t = np.clip(np.einsum("ij,ij->i", w, d) / np.where(dd > 0, dd, 1.0), 0.0, 1.0)
        r = w - t[:, None] * d
        dist = np.hypot(r[:, 0], r[:, 1])
        out[s:s + chunk] = np.minimum.reduceat(dist, np.cumsum(k) - k)
    return out


def strip_mask(pts, c: CurveFamily, eps: float) -> np.ndarray:
    """Vectorised in_strip."""
    if eps < 0:
        raise ValueError("eps must be >= 0")
    return curve_distances(pts, c) <= eps


def big_gamma_mask(pts, curves, n: int, eps: float) -> np.ndarray:
    """Membership in the union of the closed eps-strips around gamma_0 .. gamma_{n-1}.

    ``curves`` is anything indexable by q (a :class:`CurveCache` or a list).
    """
    return big_gamma_distances(pts, curves, n) <= eps


def big_gamma_distances(pts, curves, n: int) -> np.ndarray:
    """Distance to the nearest of gamma_0 .. gamma_{n-1}."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return np.min([curve_distances(pts, curves[q]) for q in range(n)], axis=0)


def in_big_gamma(x: TorusPoint, p, n: int, eps: float, curves=None) -> bool:
    if n < 1:
        raise ValueError("n must be >= 1")
    curves = curves if curves is not None else CurveCache(p)
    return any(in_strip(x, curves[q], eps) for q in range(n))


def lattice_representative(N: int, pts) -> np.ndarray:
    """x_hat / N for each point."""
    i = nearest_flat(N, pts)
    return np.stack([i % N, i // N], axis=-1) / N


def good_set_mask(pts, curves, N: int, n: int, eps: float) -> np.ndarray:
    """Membership in G_n^N(eps): the lattice representative avoids every strip."""
    return ~big_gamma_mask(lattice_representative(N, pts), curves, n, eps)


def in_good_set(x: TorusPoint, p, N: int, n: int, eps: float, curves=None) -> bool:
    l1, l2 = nearest_lattice(N, x)
    return not in_big_gamma(TorusPoint(l1 / N, l2 / N), p, n, eps, curves)


# --- thresholds --------------------------------------------------------------

def n_tilde(p, n: int) -> float:
    if n < 0:
        raise ValueError("n must be >= 0")
    eta = _params(p).eta
    return 2 * math.sqrt(2) * (math.sqrt(2) + 1) * eta ** (2 * n)


def nm_threshold(p, n: int, d0: float) -> float:
    if d0 <= 0 or n < 1:
        raise ValueError("need d0 > 0 and n >= 1")
    eta = _params(p).eta
    first = (1 + math.sqrt(2) * (eta ** (n + 1) - 1) / (eta - 1) + 1 / math.sqrt(2)) / d0
    return max(first, n_tilde(p, n))


def tracking_bound(p, N: int, q: int) -> float:
    """Allowed distance between the q-th continuous and lattice iterates."""
    eta = _params(p).eta
    return math.sqrt(2) / N * (eta ** (q + 1) - 1) / (eta - 1)


def tracking_error(p, N: int, x: TorusPoint, n: int, perm: LatticePermutation | None = None) -> list:
    """Distances d(S^q x, V^q(x_hat)/N) for q = 0..n."""
    a = _alpha(p)
    l = nearest_lattice(N, x)
    i = l[0] + N * l[1]
    if perm is None:
        perm = build_permutation(a, N)
    out = []
    y = x
    for q in range(n + 1):
        if q:
            y = iterate(a, y, 1)
            i = int(perm.forward[i])
        l1, l2 = unflat(i, N)
        out.append(torus_distance(y, TorusPoint(l1 / N, l2 / N)))
    return out


def tracking_error_array(p, N: int, pts, n: int, perm: LatticePermutation | None = None) -> np.ndarray:
    """Vectorised tracking_error in float arithmetic; shape (len(pts), n + 1)."""
    a = _alpha(p)
    if perm is None:
        perm = build_permutation(a, N)
    y = wrap(np.atleast_2d(np.asarray(pts, dtype=float)))
    i = nearest_flat(N, y)
    out = np.empty((len(y), n + 1))
    for q in range(n + 1):
        if q:
            y = forward_array(a, y)
            i = perm.forward[i]
        site = np.stack([i % N, i // N], axis=-1) / N
        d = y - site
        d -= np.round(d)
        out[:, q] = np.hypot(d[:, 0], d[:, 1])
    return out


# --- Monte Carlo --------------------------------------------------------------

@dataclass(frozen=True)
class RegionEstimate:
    mean: float
    stderr: float
    samples: int
    seed: int

    @classmethod
    def from_mask(cls, mask, seed: int) -> "RegionEstimate":
        mean = float(np.count_nonzero(mask)) / len(mask)
        return cls(mean, math.sqrt(mean * (1 - mean) / len(mask)), len(mask), seed)


def measure_estimate(pred, samples: int = 10**6, seed: int = 0, chunk: int = 1 << 18) -> RegionEstimate:
    """Fraction of ``samples`` uniform torus points accepted by ``pred``.

    ``pred`` maps an (m, 2) array to m booleans.  Sample i is the same point
    whatever the chunking.
    """
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    hits = 0
    for start in range(0, samples, chunk):
        count = min(chunk, samples - start)
        hits += int(np.count_nonzero(pred(torus_points(seed, count, start))))
    mean = hits / samples
    return RegionEstimate(mean=mean, stderr=math.sqrt(mean * (1 - mean) / samples), samples=samples, seed=seed)


def sampled_distances(c: CurveFamily, samples: int, seed: int, chunk: int = 1 << 18) -> np.ndarray:
    """Distances from the curve to the same sample points measure_estimate uses."""
    return np.concatenate([curve_distances(torus_points(seed, min(chunk, samples - s), s), c)
                           for s in range(0, samples, chunk)])


def strip_bound(p, q: int, eps: float) -> float:
    eta = _params(p).eta
    return 2 * eps * eta ** q + math.pi * eps ** 2


def big_gamma_bound(p, n: int, eps: float) -> float:
    eta = _params(p).eta
    return 2 * (math.sqrt(2) + 1) * eps * eta ** n + math.pi * n * eps ** 2


def bad_set_bound(p, n: int, N: int) -> float:
    return 38 * _params(p).eta ** (3 * n) / N


# --- one-step stretch ----------------------------------------------------------

PASS, FAIL, NOT_APPLICABLE = "pass", "fail", "not_applicable"


def stretch_check_array(p, a, b, direction: int = 1) -> np.ndarray:
    """Vectorised stretch_check; returns an array of the three outcome strings."""
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    par = _params(p)
    a = wrap(np.atleast_2d(np.asarray(a, dtype=float)))
    b = wrap(np.atleast_2d(np.asarray(b, dtype=float)))
    lift = a - np.round(a - b)  # copy of a nearest to b
    d = np.hypot(*(lift - b).T)
    if direction == 1:
        crosses = np.floor(lift[:, 0]) != np.floor(b[:, 0])
        fa, fb = forward_array(par, a), forward_array(par, b)
    else:
        crosses = np.floor(lift[:, 0] - lift[:, 1]) != np.floor(b[:, 0] - b[:, 1])
        fa, fb = inverse_array(par, a), inverse_array(par, b)
    e = fa - fb
    e -= np.round(e)
    ok = np.hypot(e[:, 0], e[:, 1]) <= par.eta * d + 1e-12
    out = np.where(ok, PASS, FAIL).astype(object)
    out[(d >= 0.5 / par.eta) | crosses] = NOT_APPLICABLE
    return out


def stretch_check(p, a: TorusPoint, b: TorusPoint, direction: int = 1) -> str:
    return str(stretch_check_array(p, a.as_array(), b.as_array(), direction)[0])
