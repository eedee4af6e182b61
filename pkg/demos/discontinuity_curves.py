"""
Where the map tears the torus
=============================

The map is discontinuous on the circle x1 = 0.  Pulling that circle back
through the map gives a family of curves gamma_p; their lengths grow at most
like eta**p, and thin strips around them carry most of the discretisation
error.  Here we build the curves, check their lengths and estimate strip
measures by Monte Carlo.
"""

from fractions import Fraction

import numpy as np

from sawtorus import CurveCache, big_gamma_bound, curve_length, sampled_distances, spectral, strip_bound

alpha = Fraction(3, 2)
eta = spectral(alpha).eta
curves = CurveCache(alpha)

for p in range(6):
    c = curves[p]
    print(f"gamma_{p}: {len(c):4d} pieces, length {curve_length(c):9.4f}  (eta^p = {eta ** p:9.4f})")

# distances from the same 200k sample points to each curve; strips are thresholds on them
samples, eps = 200_000, 0.01
dist = [sampled_distances(curves[p], samples, seed=0) for p in range(4)]
for p in range(4):
    est = (dist[p] <= eps).mean()
    print(f"strip around gamma_{p}: measure {est:.5f}, bound {strip_bound(alpha, p, eps):.5f}")

for n in range(1, 5):
    est = (np.min(dist[:n], axis=0) <= eps).mean()
    print(f"union of the first {n} strips: {est:.5f}, bound {big_gamma_bound(alpha, n, eps):.5f}")

curves[3].to_csv("gamma_3.csv")
print("wrote gamma_3.csv")
