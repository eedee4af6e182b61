"""Sawtooth maps on the 2-torus, their lattice discretisation and its breakdown."""
from .antiwick import (DEFAULT_QUADRATURE, DiagonalObservable, QuadratureSpec, SimpleFunction, dediscretize,
                       discretize, evolve_observable, koopman, l2_norm, op_norm2, op_norm2_series, omega_state,
                       running_average, sandwich, tau_state)
from .errors import (BoundaryAmbiguity, DepthExceeded, GridMismatch, InverseMismatch, NonBijective,
                     PreconditionUnsatisfiable, SawtorusError, Wrapped)
from .experiments import (ExperimentConfig, ball_stretch, breaking_time_scan, field_compare,
                          localization_experiment, tracking_experiment)
from .fields import LIBRARY, ScalarField, bump, by_name, constant, fourier, sharp_jump, sin_product
from .geometry import (CurveCache, CurveFamily, RegionEstimate, TorusSegment, bad_set_bound, big_gamma_bound,
                       curve_distances, curve_length, distance_to_curve, gamma_curve, in_big_gamma, in_good_set,
                       in_strip, measure_estimate, n_tilde, nm_threshold, sampled_distances, stretch_check,
                       strip_bound, tracking_error)
from .lattice import LatticePermutation, build_permutation, ket_overlap, nearest_lattice, u_map, v_step
from .torus import (RationalCloud, SawtoothParams, TorusPoint, iterate, sawtooth_forward, sawtooth_inverse,
                    spectral, torus_distance)

__version__ = "0.1.0"
