"""Command-line interface.

Subcommands:

* ``classify``     -- closed-form singularity classification for a kernel.
* ``verify``       -- numerical classifier, reported against the analytic one.
* ``simulate``     -- full landmark Brownian motion, CSV output.
* ``distance-sde`` -- scalar distance diffusion ensemble, CSV output.
* ``experiment``   -- figure-style presets (CSV + SVG + metadata).

Exit codes: 0 success, 1 domain or I/O failure (diagnostic on stderr),
2 usage errors.  ``LANDMARKBM_BACKEND`` selects the execution backend
(auto/numba/numpy); ``LANDMARKBM_THREADS`` caps path-parallel workers
on the numba backend (0 = one per CPU).
"""

import argparse
import json
import sys

import numpy as np

from .classifier import classify, classify_numerically
from .distance_sde import DistanceCoefficients, simulate_distance, write_distance_csv
from .experiments import (
    PRESET_NAMES,
    default_initial_positions,
    resolve_preset,
    run_experiment,
)
from .geometry import LandmarkConfig
from .kernels import AsymptoticData, RadialKernel, parse_kernel_spec
from .simulator import simulate, write_mindist_csv, write_trajectory_csv

__all__ = ["main"]


def _bool_str(b):
    return "true" if b else "false"


def _parse_initial(text, n, d):
    rows = [r for r in text.split(";") if r.strip()]
    pts = np.array([[float(x) for x in row.split(",")] for row in rows])
    if pts.shape != (n, d):
        raise ValueError(f"initial configuration must be {n} landmarks x {d} coords")
    return pts


def _add_kernel_dim(parser):
    parser.add_argument("--kernel", required=True,
                        help="kernel spec: matern:<nu>[:<scale>], gauss[:<scale>], "
                             "or asymptotic:<D>:<gamma>[:log]")
    parser.add_argument("--dim", type=int, required=True, help="ambient dimension d >= 1")


def _cmd_classify(args):
    kernel = parse_kernel_spec(args.kernel)
    asym = kernel if isinstance(kernel, AsymptoticData) else kernel.asymptotics
    result = classify(asym.gamma, asym.has_log, args.dim)
    print(
        f"kernel={args.kernel} d={args.dim} gamma={asym.gamma:g} "
        f"kind={result.kind.value} collision={_bool_str(result.collision_possible)} "
        f"complete={_bool_str(result.brownian_complete)}"
    )
    if args.json:
        detail = {
            "kernel": args.kernel,
            "d": args.dim,
            "gamma": asym.gamma,
            "has_log": asym.has_log,
            "kind": result.kind.value,
            "collision_possible": result.collision_possible,
            "brownian_complete": result.brownian_complete,
            "notes": list(result.notes),
        }
        print(json.dumps(detail, indent=2, sort_keys=True))
    return 0


def _cmd_verify(args):
    kernel = parse_kernel_spec(args.kernel)
    if isinstance(kernel, AsymptoticData):
        raise ValueError("verify needs an evaluable kernel, not asymptotic-only data")
    analytic = classify(kernel.asymptotics.gamma, kernel.asymptotics.has_log, args.dim)
    numeric = classify_numerically(kernel, args.dim, a=args.anchor)
    agreement = (not numeric.inconclusive) and numeric.kind == analytic.kind
    print(
        f"kernel={args.kernel} d={args.dim} analytic={analytic.kind.value} "
        f"numerical={numeric.kind.value if numeric.kind else 'none'} "
        f"inconclusive={_bool_str(numeric.inconclusive)} agreement={_bool_str(agreement)}"
    )
    if args.verbose:
        for name, diag in numeric.diagnostics.items():
            print(f"  {name}: slope={diag.slope:.4f} curvature={diag.curvature:.2e} "
                  f"-> {diag.verdict}")
    return 0 if agreement else 1


def _resolve_evaluable(spec):
    kernel = parse_kernel_spec(spec)
    if not isinstance(kernel, RadialKernel):
        raise ValueError(f"{spec!r} has no pointwise evaluator; simulation needs one")
    return kernel


def _cmd_simulate(args):
    kernel = _resolve_evaluable(args.kernel)
    if args.init:
        pts = _parse_initial(args.init, args.nland, args.dim)
    else:
        pts = default_initial_positions(args.nland, args.dim, args.spacing)
    ensemble = simulate(
        kernel,
        LandmarkConfig(pts),
        t_max=args.tmax,
        steps=args.steps,
        paths=args.paths,
        seed=args.seed,
        store_trajectories=True,
    )
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        write_trajectory_csv(ensemble, fh)
    print(f"wrote {args.out}")
    if args.mindist_out:
        with open(args.mindist_out, "w", encoding="utf-8", newline="\n") as fh:
            write_mindist_csv(ensemble, fh)
        print(f"wrote {args.mindist_out}")
    collisions = ensemble.collision_count()
    print(f"paths={args.paths} collisions={collisions}")
    return 0


def _cmd_distance_sde(args):
    kernel = _resolve_evaluable(args.kernel)
    coeffs = DistanceCoefficients(kernel, args.dim)
    ensemble = simulate_distance(
        coeffs, args.r0, args.tmax, args.steps, args.seed, args.paths,
        absorb_eps=args.absorb_eps,
    )
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        write_distance_csv(ensemble, fh)
    print(f"wrote {args.out}")
    print(f"paths={args.paths} absorbed_fraction={ensemble.absorbed_fraction:g}")
    return 0


def _cmd_experiment(args):
    spec = resolve_preset(args.preset, seed=args.seed)
    written = run_experiment(spec, args.outdir)
    for path in written:
        print(f"wrote {path}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="landmarkbm",
        description="Brownian motion on kernel-induced landmark spaces: "
                    "simulation, distance diffusion, collision classification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="closed-form singularity classification")
    _add_kernel_dim(p)
    p.add_argument("--json", action="store_true", help="print a JSON detail block")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("verify", help="numerical classifier vs analytic classification")
    _add_kernel_dim(p)
    p.add_argument("--anchor", type=float, default=1.0, help="anchor a in (0, 1]")
    p.add_argument("--verbose", action="store_true", help="print per-test diagnostics")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("simulate", help="full landmark Brownian motion to CSV")
    _add_kernel_dim(p)
    p.add_argument("--nland", type=int, default=2, help="number of landmarks (>= 2)")
    p.add_argument("--spacing", type=float, default=1.0,
                   help="initial spacing along the first axis")
    p.add_argument("--init", default=None,
                   help="explicit initial configuration 'x11,x12;x21,x22;...'")
    p.add_argument("--tmax", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=10_000)
    p.add_argument("--paths", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="trajectory CSV path")
    p.add_argument("--mindist-out", default=None, help="optional min-distance CSV path")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("distance-sde", help="scalar distance diffusion to CSV")
    _add_kernel_dim(p)
    p.add_argument("--r0", type=float, default=1.0, help="initial distance")
    p.add_argument("--tmax", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=10_000)
    p.add_argument("--paths", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--absorb-eps", type=float, default=None,
                   help="absorption threshold (default 1e-8 * r0)")
    p.add_argument("--out", required=True, help="path CSV output")
    p.set_defaults(func=_cmd_distance_sde)

    p = sub.add_parser("experiment", help="run a figure-style preset")
    p.add_argument("--preset", required=True, choices=PRESET_NAMES,
                   help="fig1: 2 landmarks on a line; fig2: 2 in the plane; "
                        "fig3: 3 on a line; fig4: 4 on a line; fig5: 3 in the "
                        "plane (no separate fig6: the same preset covers that layout)")
    p.add_argument("--outdir", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=None, help="override the shipped seed")
    p.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, TypeError, OSError, RuntimeError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
