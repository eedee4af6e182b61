"""
Sawtooth maps and their lattice shadows
=======================================

The sawtooth map moves points of the unit torus by a linear map applied to
the fractional part of x1.  On the lattice of points l/N the same map is
replaced by a permutation, which is what a computer can iterate forever
without rounding error.
"""

from fractions import Fraction

import numpy as np

from sawtorus import TorusPoint, build_permutation, iterate, spectral

alpha = Fraction(3, 2)
par = spectral(alpha)
print(f"alpha = {alpha}: regime {par.regime}, lambda = {par.lam:.4f}, eta = {par.eta:.4f}")

# exact orbit of a rational point
x = TorusPoint(Fraction(1, 7), Fraction(2, 5))
for j in range(4):
    print(j, iterate(alpha, x, j))

# the lattice permutation for N = 64 and the length of its cycles
N = 64
perm = build_permutation(alpha, N)
seen = np.zeros(N * N, dtype=bool)
cycles = []
for start in range(N * N):
    if seen[start]:
        continue
    i, length = start, 0
    while not seen[i]:
        seen[i] = True
        i = perm.forward[i]
        length += 1
    cycles.append(length)
print(f"N = {N}: {len(cycles)} cycles, longest {max(cycles)}")

# the lattice orbit follows the continuous one for a few steps, then drifts away
y = np.array([[0.3141, 0.2718]])
site = int(np.rint(y[0, 0] * N) % N + N * (np.rint(y[0, 1] * N) % N))
for j in range(8):
    cont = iterate(alpha, TorusPoint(*y[0]), j)
    s = perm.evolve_flat(site, j)
    print(j, f"({float(cont.x1):.4f}, {float(cont.x2):.4f})", f"({s % N / N:.4f}, {s // N / N:.4f})")
