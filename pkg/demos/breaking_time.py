"""
How long does the lattice keep up?
==================================

Discretise a smooth field, evolve it with the lattice permutation and
compare with the exactly evolved field.  At a fixed number of steps the
error shrinks as N grows, but for each N there is a step j* after which the
error is of the size of the field itself.  j* grows only like log N.
"""

from fractions import Fraction

from sawtorus import ExperimentConfig, QuadratureSpec, breaking_time_scan, sin_product

cfg = ExperimentConfig(Fraction(3, 2), grids=(64, 256, 1024), quadrature=QuadratureSpec(2))
rows = breaking_time_scan(cfg, sin_product(), jmax=7)

print("   N  " + "".join(f"  j={j}   " for j in range(8)) + " j*")
for N in cfg.grids:
    errs = [r.e_norm for r in rows if r.N == N]
    jstar = next(r.jstar for r in rows if r.N == N)
    print(f"{N:5d} " + "".join(f"{e:8.4f} " for e in errs) + f" {jstar}")

# the log-scale budget the theory allows, for comparison
for N in cfg.grids:
    print(N, f"{next(r.budget for r in rows if r.N == N):.3f}")
