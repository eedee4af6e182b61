"""Discretised dynamics on the N x N lattice.

Lattice sites l = (l1, l2) in (Z/NZ)^2 are addressed by the flat index
``l1 + N * l2`` everywhere in the package.  A site stands for the basis ket
of the discrete Hilbert space; since every inner product needed here is a
periodic Kronecker delta, kets are never materialised.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import BoundaryAmbiguity, InverseMismatch, NonBijective
from .torus import TorusPoint, _alpha, efloor, frac, is_exact, sawtooth_forward, sawtooth_inverse

AMBIGUITY_TOL = 1e-9


def flat_index(l1, l2, N: int):
    return l1 + N * l2


def unflat(i, N: int):
    return i % N, i // N


def lattice_sites(N: int) -> np.ndarray:
    """All sites as an (N*N, 2) int array in flat-index order."""
    i = np.arange(N * N, dtype=np.int64)
    return np.stack([i % N, i // N], axis=1)


def nearest_lattice(N: int, x: TorusPoint) -> tuple:
    """Site whose half-open cell of side 1/N contains ``x``."""
    return (efloor(N * x.x1 + Fraction(1, 2)) % N if is_exact(x.x1) else math.floor(N * x.x1 + 0.5) % N,
            efloor(N * x.x2 + Fraction(1, 2)) % N if is_exact(x.x2) else math.floor(N * x.x2 + 0.5) % N)


def nearest_lattice_array(N: int, pts) -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    return np.mod(np.floor(N * pts + 0.5), N).astype(np.int64)


def nearest_flat(N: int, pts) -> np.ndarray:
    ij = nearest_lattice_array(N, pts)
    return ij[..., 0] + N * ij[..., 1]


def kron_delta_periodic(N: int, a, b) -> int:
    return int((a[0] - b[0]) % N == 0 and (a[1] - b[1]) % N == 0)


def _mod(t, N):
    r = t % N
    if isinstance(r, float) and r >= N:
        return 0.0
    return r


def u_map(p, N: int, y, direction: int = 1) -> tuple:
    """N * S^{+-1}(y / N) on the enlarged torus [0, N)^2."""
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    step = sawtooth_forward if direction == 1 else sawtooth_inverse
    img = step(p, TorusPoint(y[0] / N, y[1] / N))
    return (_mod(N * img.x1, N), _mod(N * img.x2, N))


def v_step(p, N: int, l, direction: int = 1) -> tuple:
    """One discrete step: floor of the forward image, ceiling of the backward one.

    The sign pattern +-floor(+-.) makes the two directions mutually inverse.
    In float mode a floor argument within ``AMBIGUITY_TOL`` of a nonzero
    integer raises :class:`BoundaryAmbiguity`.
    """
    a = _alpha(p)
    l = (int(l[0]) % N, int(l[1]) % N)
    if not is_exact(a):
        # the only non-integer term inside the floor is alpha * l1 (forward)
        # or alpha * ((l1 - l2) mod N) (backward); N * (l / N) is not exact in floats
        r = l[0] if direction == 1 else (l[0] - l[1]) % N
        t = a * r
        if t != 0 and abs(t - round(t)) < AMBIGUITY_TOL:
            raise BoundaryAmbiguity(f"alpha*l = {t!r} is within {AMBIGUITY_TOL} of an integer")
        if direction == 1:
            return ((math.floor(t) + l[0] + l[1]) % N, (math.floor(t) + l[1]) % N)
        return (r, (l[1] - math.floor(t)) % N)
    y = u_map(a, N, (Fraction(l[0]), Fraction(l[1])), direction)
    if direction == 1:
        return (efloor(y[0]) % N, efloor(y[1]) % N)
    return (-efloor(-y[0]) % N, -efloor(-y[1]) % N)


def _forward_table(alpha, N):
    l1 = np.arange(N * N, dtype=np.int64) % N
    l2 = np.arange(N * N, dtype=np.int64) // N
    if is_exact(alpha):
        a = Fraction(alpha)
        p, q = a.numerator, a.denominator
        m1 = np.floor_divide((q + p) * l1 + q * l2, q) % N
        m2 = np.floor_divide(p * l1 + q * l2, q) % N
    else:
        t = float(alpha) * l1
        _guard(t)
        m1 = np.mod(np.floor(t) + l1 + l2, N).astype(np.int64)
        m2 = np.mod(np.floor(t) + l2, N).astype(np.int64)
    return m1 + N * m2


def _inverse_table(alpha, N):
    m1 = np.arange(N * N, dtype=np.int64) % N
    m2 = np.arange(N * N, dtype=np.int64) // N
    r = np.mod(m1 - m2, N)
    if is_exact(alpha):
        a = Fraction(alpha)
        p, q = a.numerator, a.denominator
        l2 = (-np.floor_divide(-(q * m2 - p * r), q)) % N
    else:
        t = float(alpha) * r
        _guard(t)
        l2 = np.mod(m2 + (-np.floor(t)), N).astype(np.int64)
    return r + N * l2


def _guard(t):
    near = np.abs(t - np.round(t)) < AMBIGUITY_TOL
    near &= t != 0
    if near.any():
        raise BoundaryAmbiguity(f"{int(near.sum())} floor arguments lie within {AMBIGUITY_TOL} of an integer; "
                                "pass alpha as an exact rational")


@dataclass(frozen=True)
class LatticePermutation:
    """The bijection l -> V(l) of the lattice and its inverse, as flat tables."""

    alpha: object
    N: int
    forward: np.ndarray = field(repr=False)
    inverse: np.ndarray = field(repr=False)
    _powers: dict = field(default_factory=dict, repr=False, compare=False)

    def power(self, j: int) -> np.ndarray:
        """Flat table of V^j (V^{-|j|} for negative j)."""
        if j == 0:
            return np.arange(self.N * self.N, dtype=self.forward.dtype)
        if j in self._powers:
            return self._powers[j]
        step = self.forward if j > 0 else self.inverse
        out = step
        for _ in range(abs(j) - 1):
            out = step[out]
        if abs(j) <= 8 and self.N <= 1024:
            self._powers[j] = out
        return out

    def evolve_flat(self, i, j: int):
        step = self.forward if j > 0 else self.inverse
        i = np.asarray(i)
        for _ in range(abs(j)):
            i = step[i]
        return i

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["i", "forward_i", "inverse_i"])
            for i, (f, b) in enumerate(zip(self.forward.tolist(), self.inverse.tolist())):
                w.writerow([i, f, b])


def build_permutation(p, N: int) -> LatticePermutation:
    if N < 1:
        raise ValueError("N must be a positive integer")
    alpha = _alpha(p)
    fwd = _forward_table(alpha, N)
    counts = np.bincount(fwd, minlength=N * N)
    if (counts != 1).any():
        bad = int(np.argmax(counts > 1))
        raise NonBijective(f"alpha={alpha}, N={N}: site {unflat(bad, N)} has {counts[bad]} preimages")
    inv = _inverse_table(alpha, N)
    if not np.array_equal(inv[fwd], np.arange(N * N)):
        raise InverseMismatch(f"alpha={alpha}, N={N}: backward step does not undo the forward step")
    dtype = np.int32 if N * N < 2**31 else np.int64
    fwd, inv = fwd.astype(dtype), inv.astype(dtype)
    fwd.flags.writeable = False
    inv.flags.writeable = False
    return LatticePermutation(alpha=alpha, N=N, forward=fwd, inverse=inv)


def evolve_index(perm: LatticePermutation, l, j: int) -> tuple:
    i = perm.evolve_flat(flat_index(l[0] % perm.N, l[1] % perm.N, perm.N), j)
    return unflat(int(i), perm.N)


def ket_overlap(p, N: int, x: TorusPoint, y: TorusPoint, n: int, perm: LatticePermutation | None = None) -> int:
    """<C(x), W^n C(y)>: 1 iff V^n of x's site is y's site."""
    lx = nearest_lattice(N, x)
    ly = nearest_lattice(N, y)
    if perm is None:
        l = lx
        for _ in range(abs(n)):
            l = v_step(p, N, l, 1 if n > 0 else -1)
        return kron_delta_periodic(N, l, ly)
    return kron_delta_periodic(N, evolve_index(perm, lx, n), ly)


def lattice_orbit(p, N: int, x: TorusPoint, n: int) -> list:
    """Sites V^q(x_hat), q = 0..n, computed step by step."""
    l = nearest_lattice(N, x)
    out = [l]
    for _ in range(n):
        l = v_step(p, N, l, 1)
        out.append(l)
    return out
