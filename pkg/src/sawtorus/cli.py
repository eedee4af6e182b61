"""Command-line front end: ``sawtorus <subcommand> --alpha p/q [flags]``.

Every run writes its outputs plus ``manifest.txt`` (the fully resolved
flags) into ``--output-dir``.  Exit codes: 0 success, 2 bad flags,
3 parameters outside an experiment's validity range, 4 internal or IO failure.
"""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .antiwick import QuadratureSpec, discretize
from .errors import (BoundaryAmbiguity, DepthExceeded, InverseMismatch, NonBijective,
                     PreconditionUnsatisfiable, SawtorusError)
from .experiments import (ExperimentConfig, ball_stretch, breaking_time_scan, field_compare,
                          localization_experiment, tracking_experiment)
from .fields import LIBRARY, by_name
from .geometry import (CurveCache, RegionEstimate, bad_set_bound, big_gamma_bound, curve_distances,
                       lattice_representative, measure_estimate, n_tilde, sampled_distances, strip_bound,
                       write_curve_rows)
from .io import format_value, write_csv, write_manifest, write_pgm
from .lattice import build_permutation
from .torus import TorusPoint, is_exact, iterate, parse_scalar

EXIT_OK, EXIT_USAGE, EXIT_PRECONDITION, EXIT_INTERNAL = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


class _UsageError(Exception):
    pass


# --- flag types ------------------------------------------------------------

def _scalar(text):
    try:
        return parse_scalar(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number or p/q fraction: {text!r}") from None


def _pair(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated coordinates, got {text!r}")
    return tuple(_scalar(t) for t in parts)


def _int_list(text):
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text):
    try:
        return tuple(float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sawtorus", description="Sawtooth maps on the torus and their lattice discretisation.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--alpha", type=_scalar, required=True, help="map parameter, p/q (exact) or decimal")
        p.add_argument("--output-dir", type=Path, default=Path("."))
        p.add_argument("--seed", type=int, default=0)
        return p

    def quadrature(p, M=8):
        p.add_argument("--quad-M", type=_positive_int, default=M, help="subdivisions per cell axis")
        p.add_argument("--quad-rule", choices=("midpoint", "gauss-2"), default="midpoint")

    def field_flag(p, default):
        p.add_argument("--field", choices=sorted(LIBRARY), default=default)

    p = command("evolve", "iterate a point with the continuous map")
    p.add_argument("--x", type=_pair, required=True, help="x1,x2")
    p.add_argument("--steps", type=int, default=1, help="negative for the inverse map")

    p = command("discretize", "diagonal cell averages of a field and the lattice permutation")
    p.add_argument("--N", type=_positive_int, required=True)
    field_flag(p, "sin2d")
    quadrature(p)

    p = command("geometry", "discontinuity curves and Monte Carlo measures of their strips")
    p.add_argument("--p", type=_int_list, default=(0, 1, 2, 3), help="curve indices to export")
    p.add_argument("--eps", type=_float_list, default=(0.01, 0.05))
    p.add_argument("--n-max", type=int, default=4, help="largest n for the strip unions")
    p.add_argument("--N", type=_positive_int, default=None, help="lattice size for the good-set complement")
    p.add_argument("--samples", type=_positive_int, default=10**6)
    p.add_argument("--max-depth", type=int, default=8)

    p = command("localize", "count lattice overlaps far from the continuous orbit")
    p.add_argument("--N", type=_positive_int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d0", type=float, default=0.1)
    p.add_argument("--beta", type=float, default=2.5)
    p.add_argument("--x-samples", type=_positive_int, default=10**4)
    p.add_argument("--y-samples", type=_positive_int, default=10**3)
    p.add_argument("--exploratory", action="store_true")

    p = command("track", "lattice tracking error against its bound")
    p.add_argument("--N", type=_positive_int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=_positive_int, default=10**4)

    p = command("breaking-time", "L2 distance between continuous and discrete evolutions")
    p.add_argument("--N", type=_int_list, required=True, help="comma-separated lattice sizes")
    p.add_argument("--jmax", type=int, default=8)
    p.add_argument("--gamma", type=float, default=3.5)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--exploratory", action="store_true")
    field_flag(p, "sin2d")
    quadrature(p, M=2)

    p = command("stretch", "minimal enclosing circles of an evolved small circle")
    p.add_argument("--center", type=_pair, default=(0.5, 0.5))
    p.add_argument("--v", type=float, default=0.01)
    p.add_argument("--n-max", type=_positive_int, default=6)
    p.add_argument("--boundary-samples", type=_positive_int, default=2000)

    p = command("compare", "rasters of the continuous and discrete evolutions of a field")
    p.add_argument("--N", type=_positive_int, required=True)
    p.add_argument("--j", type=int, default=1)
    field_flag(p, "sharp")
    quadrature(p)
    return parser


# --- subcommands -------------------------------------------------------------

def _quad(args):
    return QuadratureSpec(args.quad_M, args.quad_rule)


def _cfg(args, **extra):
    return ExperimentConfig(alpha=args.alpha, seed=args.seed, **extra)


def run_evolve(args, out):
    x = TorusPoint(*args.x)
    rows = [(0, x.x1, x.x2)]
    step = 1 if args.steps >= 0 else -1
    for k in range(1, abs(args.steps) + 1):
        x = iterate(args.alpha, x, step)
        rows.append((k * step, x.x1, x.x2))
    write_csv(out / "orbit.csv", ["step", "x1", "x2"], rows)
    print(format_value(x.x1), format_value(x.x2))


def run_discretize(args, out):
    X = discretize(by_name(args.field), args.N, _quad(args))
    X.to_csv(out / "diagonal.csv")
    build_permutation(args.alpha, args.N).to_csv(out / "permutation.csv")
    print(f"wrote {args.N * args.N} cells")


def run_geometry(args, out):
    curves = CurveCache(args.alpha, args.max_depth)
    with open(out / "curves.csv", "w", newline="") as fh:
        write_curve_rows(csv.writer(fh, lineterminator="\n"), [curves[q] for q in args.p])

    need = sorted(set(q for q in args.p if q >= 0) | set(range(max(args.n_max, 0))))
    rows = []
    # one distance pass per curve, reused for every eps and every union
    dist = {q: sampled_distances(curves[q], args.samples, args.seed) for q in need}
    for q in need:
        if q in args.p:
            for eps in args.eps:
                est = RegionEstimate.from_mask(dist[q] <= eps, args.seed)
                rows.append(("strip", q, eps, None, est.mean, est.stderr, strip_bound(curves.params, q, eps)))
    for n in range(1, args.n_max + 1):
        union = np.min([dist[q] for q in range(n)], axis=0)
        for eps in args.eps:
            est = RegionEstimate.from_mask(union <= eps, args.seed)
            rows.append(("big_gamma", n, eps, None, est.mean, est.stderr, big_gamma_bound(curves.params, n, eps)))
    if args.N is not None:
        for n in range(1, args.n_max + 1):
            nt = n_tilde(curves.params, n)
            if not args.N > nt:
                continue
            eps = nt / (2 * args.N)

            def bad(pts, n=n, eps=eps):
                reps = lattice_representative(args.N, pts)
                return np.min([curve_distances(reps, curves[q]) for q in range(n)], axis=0) <= eps

            est = measure_estimate(bad, args.samples, args.seed)
            rows.append(("bad_lattice", n, eps, args.N, est.mean, est.stderr, bad_set_bound(curves.params, n, args.N)))
    write_csv(out / "measures.csv", ["set", "n", "eps", "N", "mean", "stderr", "bound"], rows)
    print(f"wrote {sum(len(curves[q]) for q in args.p)} segments and {len(rows)} measures")


def run_localize(args, out):
    cfg = _cfg(args, d0=args.d0, beta=args.beta, exploratory=args.exploratory)
    r = localization_experiment(cfg, args.N, args.n, args.x_samples, args.y_samples)
    write_csv(out / "localization.csv", ["alpha", "N", "n", "d0", "beta", "pairs", "violations"],
              [(r.alpha, r.N, r.n, r.d0, r.beta, r.pairs_tested, r.violations)])
    print(f"{r.violations} violations in {r.pairs_tested} pairs ({r.x_good} of {r.x_sampled} x in the good set)")


def run_track(args, out):
    r = tracking_experiment(_cfg(args), args.N, args.n, args.samples)
    write_csv(out / "tracking.csv", ["alpha", "N", "n", "drawn", "good", "max_ratio", "violations"],
              [(r.alpha, r.N, r.n, r.drawn, r.good, r.max_ratio, r.violations)])
    print(f"max ratio {format_value(r.max_ratio)}, {r.violations} violations over {r.good} good points")


def run_breaking_time(args, out):
    cfg = _cfg(args, gamma=args.gamma, grids=args.N, quadrature=_quad(args), threshold=args.threshold,
               exploratory=args.exploratory)
    rows = breaking_time_scan(cfg, by_name(args.field), args.jmax)
    write_csv(out / "breaking_time.csv", ["alpha", "N", "j", "e_norm", "budget", "threshold", "jstar"],
              [(r.alpha, r.N, r.j, r.e_norm, r.budget, r.threshold, r.jstar) for r in rows])
    for N in args.N:
        print(f"N={N} jstar={format_value(next(r.jstar for r in rows if r.N == N))}")


def run_stretch(args, out):
    r = ball_stretch(_cfg(args), TorusPoint(*args.center), args.v, args.n_max, args.boundary_samples)
    write_csv(out / "stretch.csv", ["alpha", "n", "radius", "lambda_pred", "eta_pred"],
              [(r.alpha, s.n, s.radius, s.lambda_pred, s.eta_pred) for s in r.steps])
    if r.wrapped_at is not None:
        print(f"cloud wrapped around the torus at n={r.wrapped_at}; table truncated", file=sys.stderr)
    print(f"wrote {len(r.steps)} steps")


def run_compare(args, out):
    fc = field_compare(_cfg(args, quadrature=_quad(args)), by_name(args.field), args.N, args.j)
    write_pgm(out / "koopman.pgm", fc.koopman)
    write_pgm(out / "sandwich.pgm", fc.sandwich)
    write_pgm(out / "difference.pgm", fc.difference)
    write_csv(out / "compare.csv", ["alpha", "N", "j", "e_norm"], [(args.alpha, fc.N, fc.j, fc.e_norm)])
    print(f"e_norm {format_value(fc.e_norm)}")


COMMANDS = {
    "evolve": run_evolve,
    "discretize": run_discretize,
    "geometry": run_geometry,
    "localize": run_localize,
    "track": run_track,
    "breaking-time": run_breaking_time,
    "stretch": run_stretch,
    "compare": run_compare,
}


def parse_and_dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"sawtorus: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if not is_exact(args.alpha):
        print(f"sawtorus: warning: --alpha {args.alpha!r} is a decimal; lattice floors are evaluated "
              "in floating point (pass p/q for exact arithmetic)", file=sys.stderr)
    out = args.output_dir
    try:
        out.mkdir(parents=True, exist_ok=True)
        manifest = {k: (",".join(format_value(x) for x in v) if isinstance(v, tuple) else v)
                    for k, v in vars(args).items()}
        manifest["version"] = __version__
        write_manifest(out / "manifest.txt", manifest)
        COMMANDS[args.command](args, out)
    except (PreconditionUnsatisfiable, DepthExceeded, BoundaryAmbiguity) as exc:
        print(f"sawtorus: precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (NonBijective, InverseMismatch, AssertionError, OSError) as exc:
        print(f"sawtorus: internal failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ValueError, SawtorusError) as exc:
        print(f"sawtorus: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def main(argv=None) -> int:
    return parse_and_dispatch(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
