"""Continuous sawtooth dynamics on the unit torus.

Points live in the canonical square [0, 1)^2.  Scalars are either exact
rationals (:class:`fractions.Fraction`, also used for plain ints) or binary64
floats; the two never mix silently in the exact direction.

Two evaluation routes are provided for the map itself:

* :func:`sawtooth_forward` / :func:`sawtooth_inverse` work on a single
  :class:`TorusPoint` and stay exact when both the parameter and the point are
  rational;
* :func:`forward_array` / :func:`inverse_array` are the vectorised float
  versions used by the sampling experiments, and :class:`RationalCloud` is the
  vectorised exact version (integer numerators over a shared denominator).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Union

import numpy as np

Scalar = Union[Fraction, float]

HYPERBOLIC = "hyperbolic"
ELLIPTIC = "elliptic"
PARABOLIC = "parabolic"


def parse_scalar(value) -> Scalar:
    """Turn user input into a scalar.

    ``"3/2"``, ``"-1/20"`` and integer strings give exact rationals; decimal
    strings give floats.  Numbers pass through (ints become Fractions).
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, float):
        return value
    text = str(value).strip()
    if "/" in text:
        return Fraction(text)
    try:
        return Fraction(int(text))
    except ValueError:
        return float(text)


def is_exact(value) -> bool:
    return isinstance(value, Rational) and not isinstance(value, bool)


def to_exact(value) -> Fraction:
    """Exact view of ``value``; floats are refused."""
    if is_exact(value):
        return Fraction(value)
    raise TypeError(f"refusing to reinterpret {value!r} as an exact rational")


def _coerce(value) -> Scalar:
    if is_exact(value):
        return Fraction(value)
    return float(value)


def efloor(t) -> int:
    """Largest integer n with t - 1 < n <= t (also for negative t)."""
    return math.floor(t)


def frac(t):
    """Fractional part t - efloor(t), always in [0, 1)."""
    r = t - math.floor(t)
    if isinstance(r, float) and r >= 1.0:
        # t was a tiny negative float and t + 1 rounded to 1.0
        return 0.0
    return r


@dataclass(frozen=True)
class TorusPoint:
    """A point of R^2 / Z^2 stored by its representative in [0, 1)^2."""

    x1: Scalar
    x2: Scalar

    def __post_init__(self):
        object.__setattr__(self, "x1", frac(_coerce(self.x1)))
        object.__setattr__(self, "x2", frac(_coerce(self.x2)))

    @property
    def exact(self) -> bool:
        return is_exact(self.x1) and is_exact(self.x2)

    def as_array(self) -> np.ndarray:
        return np.array([float(self.x1), float(self.x2)])

    def __iter__(self):
        yield self.x1
        yield self.x2


def torus_distance(x: TorusPoint, y: TorusPoint) -> float:
    """Length of the shortest segment joining ``x`` and ``y`` on the torus."""
    d1 = x.x1 - y.x1
    d2 = x.x2 - y.x2
    best = min((d1 + n1) ** 2 + (d2 + n2) ** 2 for n1 in (-1, 0, 1) for n2 in (-1, 0, 1))
    return math.sqrt(best)


def wrap(a):
    """Reduce an array mod 1 into [0, 1)."""
    r = np.mod(a, 1.0)
    return np.where(r >= 1.0, 0.0, r)


def torus_distance_array(a, b) -> np.ndarray:
    """Vectorised torus distance between point arrays of shape (..., 2)."""
    d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    d = d - np.round(d)
    return np.hypot(d[..., 0], d[..., 1])


@dataclass(frozen=True)
class SawtoothParams:
    """Map parameter together with the spectral data of its matrix.

    ``lam`` is the modulus of the expanding eigenvalue (1 outside the
    hyperbolic regime), ``eta`` the largest singular value.
    """

    alpha: Scalar
    eigenvalues: tuple
    lam: float
    eta: float
    regime: str

    @property
    def is_integer(self) -> bool:
        return is_exact(self.alpha) and Fraction(self.alpha).denominator == 1

    @property
    def matrix(self) -> np.ndarray:
        a = float(self.alpha)
        return np.array([[1.0 + a, 1.0], [a, 1.0]])

    @property
    def inverse_matrix(self) -> np.ndarray:
        a = float(self.alpha)
        return np.array([[1.0, -1.0], [-a, 1.0 + a]])


def spectral(alpha) -> SawtoothParams:
    alpha = _coerce(alpha)
    trace = alpha + 2
    disc = trace * trace - 4
    if disc > 0:
        root = math.sqrt(disc)
        pair = ((float(trace) + root) / 2, (float(trace) - root) / 2)
        regime = HYPERBOLIC
        lam = max(abs(pair[0]), abs(pair[1]))
    elif disc == 0:
        pair = (float(trace) / 2, float(trace) / 2)
        regime = PARABOLIC
        lam = 1.0
    else:
        im = math.sqrt(-disc) / 2
        pair = (complex(float(trace) / 2, im), complex(float(trace) / 2, -im))
        regime = ELLIPTIC
        lam = 1.0
    # eta^2 is the larger root of z^2 - c z + 1 with c = 2a^2 + 2a + 3 >= 5/2
    c = float(2 * alpha * alpha + 2 * alpha + 3)
    eta = math.sqrt((c + math.sqrt(c * c - 4.0)) / 2.0)
    return SawtoothParams(alpha=alpha, eigenvalues=pair, lam=lam, eta=eta, regime=regime)


def _alpha(p) -> Scalar:
    if isinstance(p, SawtoothParams):
        return p.alpha
    return _coerce(p)


def sawtooth_forward(p, x: TorusPoint) -> TorusPoint:
    a = _alpha(p)
    u = frac(x.x1)
    return TorusPoint((1 + a) * u + x.x2, a * u + x.x2)


def sawtooth_inverse(p, x: TorusPoint) -> TorusPoint:
    a = _alpha(p)
    u = frac(x.x1 - x.x2)
    return TorusPoint(u, frac(x.x2) - a * u)


def iterate(p, x: TorusPoint, j: int) -> TorusPoint:
    step = sawtooth_forward if j >= 0 else sawtooth_inverse
    for _ in range(abs(j)):
        x = step(p, x)
    return x


def matrix_action(p, v, inverse: bool = False) -> np.ndarray:
    """Plain linear action of the map's matrix (no reduction mod 1)."""
    par = p if isinstance(p, SawtoothParams) else spectral(p)
    m = par.inverse_matrix if inverse else par.matrix
    return np.asarray(v, dtype=float) @ m.T


def forward_array(p, pts) -> np.ndarray:
    a = float(_alpha(p))
    pts = np.asarray(pts, dtype=float)
    u = wrap(pts[..., 0])
    out = np.empty(np.broadcast(u, pts[..., 1]).shape + (2,))
    out[..., 0] = wrap((1.0 + a) * u + pts[..., 1])
    out[..., 1] = wrap(a * u + pts[..., 1])
    return out


def inverse_array(p, pts) -> np.ndarray:
    a = float(_alpha(p))
    pts = np.asarray(pts, dtype=float)
    u = wrap(pts[..., 0] - pts[..., 1])
    out = np.empty(u.shape + (2,))
    out[..., 0] = u
    out[..., 1] = wrap(wrap(pts[..., 1]) - a * u)
    return out


def iterate_array(p, pts, j: int) -> np.ndarray:
    step = forward_array if j >= 0 else inverse_array
    out = np.asarray(pts, dtype=float)
    if j == 0:
        return wrap(out)
    for _ in range(abs(j)):
        out = step(p, out)
    return out


_INT_LIMIT = 2**62


class RationalCloud:
    """Many torus points with exact rational coordinates.

    Coordinates are ``num / den`` with ``num`` an (n, 2) int64 array in
    [0, den).  The denominator grows by the parameter's denominator at every
    step and is reduced by the common gcd afterwards; an OverflowError is
    raised before int64 arithmetic could wrap.
    """

    def __init__(self, num, den: int):
        num = np.asarray(num, dtype=np.int64)
        if num.ndim != 2 or num.shape[1] != 2:
            raise ValueError("numerators must have shape (n, 2)")
        self.den = int(den)
        if self.den <= 0:
            raise ValueError("denominator must be positive")
        self.num = np.mod(num, self.den)
        self._reduce()

    def _reduce(self):
        g = math.gcd(self.den, int(np.gcd.reduce(self.num, axis=None))) if self.num.size else self.den
        if g > 1:
            self.num //= g
            self.den //= g

    @staticmethod
    def _split(alpha):
        a = to_exact(_alpha(alpha))
        return a.numerator, a.denominator

    def _check(self, p, q):
        if (abs(p) + 2 * q + abs(q + p)) * self.den * q >= _INT_LIMIT:
            raise OverflowError("rational cloud denominator too large for int64 arithmetic")

    def forward(self, alpha) -> "RationalCloud":
        p, q = self._split(alpha)
        self._check(p, q)
        n1, n2 = self.num[:, 0], self.num[:, 1]
        den = self.den * q
        out = np.empty_like(self.num)
        out[:, 0] = (q + p) * n1 + q * n2
        out[:, 1] = p * n1 + q * n2
        return RationalCloud(out, den)

    def inverse(self, alpha) -> "RationalCloud":
        p, q = self._split(alpha)
        self._check(p, q)
        n1, n2 = self.num[:, 0], self.num[:, 1]
        u = np.mod(n1 - n2, self.den)
        out = np.empty_like(self.num)
        out[:, 0] = q * u
        out[:, 1] = q * n2 - p * u
        return RationalCloud(out, self.den * q)

    def to_float(self) -> np.ndarray:
        return self.num / float(self.den)

    def points(self) -> list:
        return [TorusPoint(Fraction(int(a), self.den), Fraction(int(b), self.den)) for a, b in self.num]

    def __eq__(self, other):
        if not isinstance(other, RationalCloud):
            return NotImplemented
        return self.den == other.den and np.array_equal(self.num, other.num)

    def __len__(self):
        return len(self.num)
