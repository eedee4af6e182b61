"""Scalar fields on the torus and a small library of test functions."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .torus import TorusPoint, wrap

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class ScalarField:
    """A bounded real function on the torus.

    ``func`` receives an array of shape (..., 2) of points already reduced
    into [0, 1)^2 and returns values of shape (...).
    """

    func: Callable = field(repr=False)
    name: str = "field"
    is_continuous: bool = True
    sup_norm_bound: Optional[float] = None

    def __call__(self, pts):
        if isinstance(pts, TorusPoint):
            return float(self.func(pts.as_array()[None, :])[0])
        return self.func(wrap(np.asarray(pts, dtype=float)))

    def __mul__(self, other: "ScalarField") -> "ScalarField":
        bound = None
        if self.sup_norm_bound is not None and other.sup_norm_bound is not None:
            bound = self.sup_norm_bound * other.sup_norm_bound
        return ScalarField(lambda x: self.func(x) * other.func(x), name=f"{self.name}*{other.name}",
                           is_continuous=self.is_continuous and other.is_continuous, sup_norm_bound=bound)

    def conj(self) -> "ScalarField":
        # real-valued fields only
        return self


def constant(c: float = 1.0) -> ScalarField:
    return ScalarField(lambda x: np.full(x.shape[:-1], float(c)), name=f"const({c:g})", sup_norm_bound=abs(c))


def fourier(k1: int, k2: int, kind: str = "sin") -> ScalarField:
    """sin or cos of 2*pi*(k1*x1 + k2*x2)."""
    fn = {"sin": np.sin, "cos": np.cos}[kind]
    return ScalarField(lambda x: fn(TWO_PI * (k1 * x[..., 0] + k2 * x[..., 1])),
                       name=f"{kind}({k1},{k2})", sup_norm_bound=1.0)


def sin_product() -> ScalarField:
    """sin(2 pi x1) sin(2 pi x2), the default smooth test field."""
    return ScalarField(lambda x: np.sin(TWO_PI * x[..., 0]) * np.sin(TWO_PI * x[..., 1]),
                       name="sin2d", sup_norm_bound=1.0)


def sin_squared() -> ScalarField:
    return ScalarField(lambda x: np.sin(TWO_PI * x[..., 0]) ** 2, name="sin2x1", sup_norm_bound=1.0)


def bump(center=(0.5, 0.5), kappa: float = 4.0) -> ScalarField:
    """Smooth periodic bump peaked at ``center`` with value 1 there."""
    c1, c2 = center

    def f(x):
        return np.exp(kappa * (np.cos(TWO_PI * (x[..., 0] - c1)) + np.cos(TWO_PI * (x[..., 1] - c2)) - 2.0))

    return ScalarField(f, name="bump", sup_norm_bound=1.0)


def sharp_jump(steepness: float = 60.0) -> ScalarField:
    """Smoothed sawtooth in x1 with a steep rise across the circle x1 = 0.

    With s the signed distance of x1 to 0 (in [-1/2, 1/2)), the field is
    ``tanh(k s) - 2 s``: it climbs from -1 to +1 over a width of order 1/k
    around x1 = 0 and descends linearly elsewhere.  Continuous for finite k.
    """

    def f(x):
        s = x[..., 0] - np.floor(x[..., 0] + 0.5)
        return np.tanh(steepness * s) - 2.0 * s

    return ScalarField(f, name="sharp", sup_norm_bound=1.0)


def indicator(x1_range=(0.0, 0.5), x2_range=(0.0, 1.0)) -> ScalarField:
    """Indicator of a half-open axis-aligned rectangle inside [0, 1)^2."""
    (a1, b1), (a2, b2) = x1_range, x2_range

    def f(x):
        inside = (x[..., 0] >= a1) & (x[..., 0] < b1) & (x[..., 1] >= a2) & (x[..., 1] < b2)
        return inside.astype(float)

    return ScalarField(f, name="indicator", is_continuous=False, sup_norm_bound=1.0)


LIBRARY = {
    "one": constant,
    "sin2d": sin_product,
    "sin_x1": lambda: fourier(1, 0, "sin"),
    "cos_x2": lambda: fourier(0, 1, "cos"),
    "bump": bump,
    "sharp": sharp_jump,
}


def by_name(name: str) -> ScalarField:
    try:
        return LIBRARY[name]()
    except KeyError:
        raise KeyError(f"unknown field {name!r}; choose from {sorted(LIBRARY)}") from None
