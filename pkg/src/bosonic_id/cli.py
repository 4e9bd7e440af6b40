"""Command-line entry point.

Subcommands map one-to-one onto the library studies: ``rate-region`` and
``holevo-converge`` emit CSV plus a rendered figure, ``lemma-check`` and
``simulate-id`` emit JSON reports.  Identical invocations produce byte
identical artifacts; stochastic subcommands refuse to run without --seed.

Exit codes: 0 success, 1 usage or validation, 2 numerical adequacy,
3 property-check failure.
"""

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import idcode, rates, reports, states, typicality
from .config import ConfigError, load_sim_spec
from .fock import BinaryPovm, DensityOperator, fock_projector
from .rates import CutoffError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ADEQUACY = 2
EXIT_PROPERTY = 3

OUTDIR_ENV = "BOSONIC_ID_OUTDIR"

# frozen defaults for the binning study; see the acceptance suite
BINNING_DEFAULTS = dict(pool_rate=0.13, bin_rate=0.07, mu=0.04, id_rate=0.02,
                        m_per_receiver=4)


class _UsageExit(Exception):
    def __init__(self, message):
        super().__init__(message)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageExit(message)


def _float_list(text: str):
    return [float(x) for x in text.split(",") if x]


def _int_list(text: str):
    return [int(x) for x in text.split(",") if x]


def _grid(text: str):
    """start:stop:step inclusive grid."""
    parts = text.split(":")
    if len(parts) == 2:
        start, stop, step = float(parts[0]), float(parts[1]), 1.0
    elif len(parts) == 3:
        start, stop, step = (float(p) for p in parts)
    else:
        raise ValueError(f"grid must be start:stop[:step], got {text!r}")
    if step <= 0 or stop < start:
        raise ValueError(f"bad grid {text!r}")
    count = int(round((stop - start) / step)) + 1
    return [start + k * step for k in range(count)]


def build_parser() -> _Parser:
    parser = _Parser(prog="bosonic-id",
                     description="Identification coding studies for noisy "
                                 "bosonic broadcast channels")
    parser.add_argument("--outdir", default=None,
                        help=f"output directory (default ${OUTDIR_ENV} or .)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rate-region", help="sweep the achievable rate region")
    p.add_argument("--n1", type=float, required=True)
    p.add_argument("--n2", type=float, required=True)
    p.add_argument("--e", type=float, action="append", required=True,
                   help="input energy; repeat for overlaid curves")
    p.add_argument("--steps", type=int, default=101)
    p.add_argument("--no-plot", action="store_true")

    p = sub.add_parser("holevo-converge",
                       help="Holevo quantity of growing discretizations")
    p.add_argument("--e", type=float, required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--noise", type=float, required=True)
    p.add_argument("--sizes", type=_int_list, default=[16, 64, 256])
    p.add_argument("--scheme", choices=("grid", "rings"), default="grid")
    p.add_argument("--cutoff", type=int, default=40)
    p.add_argument("--no-plot", action="store_true")

    p = sub.add_parser("lemma-check", help="numeric verification drivers")
    p.add_argument("--lemma", required=True,
                   choices=("gentle", "truncation", "typicality", "binning"))
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--alpha-grid", type=_grid, default="0:2:0.25")
    p.add_argument("--l-grid", type=_grid, default=None)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--dim", type=int, default=8)
    p.add_argument("--n", type=_int_list, default=None)
    p.add_argument("--delta", type=_float_list, default=None)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--keep", type=int, default=3)
    p.add_argument("--assignments", type=int, default=200)

    p = sub.add_parser("simulate-id", help="end-to-end identification run")
    p.add_argument("--spec", required=True, help="simulation spec file")
    p.add_argument("--seed", type=int, default=None)
    return parser


def _outdir(args) -> Path:
    if args.outdir:
        return Path(args.outdir)
    return Path(os.environ.get(OUTDIR_ENV, "."))


def _cmd_rate_region(args, outdir: Path) -> int:
    for e in args.e:
        if e < 0:
            raise _UsageExit(f"energy must be >= 0, got {e}")
    for name in ("n1", "n2"):
        if getattr(args, name) < 0:
            raise _UsageExit(f"--{name} must be >= 0")
    if args.steps < 2:
        raise _UsageExit("--steps must be >= 2")
    blocks = [(e, rates.rate_region_sweep(args.n1, args.n2, e, args.steps))
              for e in args.e]
    manifest = reports.run_manifest(
        "rate-region",
        {"n1": args.n1, "n2": args.n2, "e": args.e, "steps": args.steps},
        outputs=["rate_region.csv"] + ([] if args.no_plot else ["rate_region.png"]),
    )
    reports.write_rate_region_csv(outdir / "rate_region.csv", manifest, blocks)
    if not args.no_plot:
        reports.render_rate_region_png(outdir / "rate_region.png", blocks)
    print(f"wrote {outdir / 'rate_region.csv'}")
    return EXIT_OK


def _cmd_holevo_converge(args, outdir: Path) -> int:
    if args.e < 0 or not 0 <= args.tau <= 1 or args.noise < 0:
        raise _UsageExit("invalid channel parameters")
    if not args.sizes or args.sizes != sorted(args.sizes):
        raise _UsageExit("--sizes must be ascending")
    rows, summary = rates.convergence_study(
        args.e, args.tau, args.noise, args.sizes,
        spec=states.TruncationSpec(L=args.cutoff), scheme=args.scheme)
    manifest = reports.run_manifest(
        "holevo-converge",
        {"e": args.e, "tau": args.tau, "noise": args.noise,
         "sizes": args.sizes, "scheme": args.scheme, "cutoff": args.cutoff},
        outputs=["holevo_convergence.csv"]
        + ([] if args.no_plot else ["holevo_convergence.png"]),
    )
    reports.write_convergence_csv(outdir / "holevo_convergence.csv",
                                  manifest, rows, summary)
    if not args.no_plot:
        reports.render_convergence_png(outdir / "holevo_convergence.png",
                                       rows, summary["target_bits"])
    print(f"wrote {outdir / 'holevo_convergence.csv'}")
    return EXIT_OK


def _lemma_gentle(args) -> dict:
    if args.seed is None:
        raise _UsageExit("--seed is required for --lemma gentle")
    rng = np.random.default_rng(args.seed)
    dim = args.dim
    results = []
    for _ in range(args.trials):
        raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        mat = raw @ raw.conj().T
        rho = DensityOperator(mat / np.trace(mat).real)
        basis = np.linalg.qr(rng.normal(size=(dim, dim))
                             + 1j * rng.normal(size=(dim, dim)))[0]
        eigs = rng.uniform(0.9, 1.0, size=dim)
        povm = BinaryPovm((basis * eigs) @ basis.conj().T)
        results.append(states.gentle_operator_check(rho, povm))
    fails = [r for r in results if not r["holds"]]
    worst = max(results, key=lambda r: r["lhs"] - r["rhs"])
    return {
        "lemma": "gentle",
        "trials": args.trials,
        "dim": dim,
        "failures": len(fails),
        "worst_margin": worst["rhs"] - worst["lhs"],
        "all_pass": not fails,
    }


def _lemma_truncation(args) -> dict:
    l_grid = [int(x) for x in (args.l_grid or _grid("3:20:1"))]
    rows = [states.truncation_mass_bound_check(a, level)
            for a in args.alpha_grid for level in l_grid]
    return {
        "lemma": "truncation",
        "alpha_grid": args.alpha_grid,
        "l_grid": l_grid,
        "checks": rows,
        "all_pass": all(r["holds"] for r in rows),
    }


def _lemma_typicality(args) -> dict:
    ns = args.n or [8, 12]
    deltas = args.delta or [0.2, 0.3]
    spec = states.TruncationSpec(L=40)
    rho = states.truncation_channel(
        states.displaced_thermal(args.alpha, args.noise, spec), args.keep)
    reports_list = [typicality.verify_typicality_bounds(rho, n, d)
                    for n in ns for d in deltas]
    return {
        "lemma": "typicality",
        "alpha": args.alpha,
        "noise": args.noise,
        "keep": args.keep,
        "reports": reports_list,
        "all_pass": all(r["all_pass"] for r in reports_list),
    }


def _lemma_binning(args) -> dict:
    if args.seed is None:
        raise _UsageExit("--seed is required for --lemma binning")
    ns = args.n or [20, 40, 80]
    rows = idcode.binning_failure_fractions(
        ns, assignments=args.assignments, seed=args.seed, **BINNING_DEFAULTS)
    fractions = [r["failure_fraction"] for r in rows]
    decreasing = all(a > b for a, b in zip(fractions, fractions[1:]))
    return {
        "lemma": "binning",
        "rates": BINNING_DEFAULTS,
        "rows": rows,
        "failure_fraction_strictly_decreasing": decreasing,
        "all_pass": decreasing,
    }


def _cmd_lemma_check(args, outdir: Path) -> int:
    runner = {
        "gentle": _lemma_gentle,
        "truncation": _lemma_truncation,
        "typicality": _lemma_typicality,
        "binning": _lemma_binning,
    }[args.lemma]
    report = runner(args)
    manifest = reports.run_manifest(
        "lemma-check",
        {"lemma": args.lemma, "seed": args.seed},
        seed=args.seed,
        outputs=[f"lemma_check_{args.lemma}.json"],
    )
    payload = {"manifest": manifest, "report": report}
    path = outdir / f"lemma_check_{args.lemma}.json"
    reports.write_json(path, payload)
    print(f"wrote {path}")
    return EXIT_OK if report["all_pass"] else EXIT_PROPERTY


def _cmd_simulate_id(args, outdir: Path) -> int:
    if args.seed is None:
        raise _UsageExit("--seed is required for simulate-id")
    sim = load_sim_spec(args.spec)
    result = idcode.run_simulation(sim, args.seed)
    manifest = reports.run_manifest(
        "simulate-id", {"spec": str(args.spec)}, seed=args.seed,
        outputs=["simulate_id.json"])
    payload = {"manifest": manifest, **result}
    path = outdir / "simulate_id.json"
    reports.write_json(path, payload)
    print(f"wrote {path}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        outdir = _outdir(args)
        if args.command == "rate-region":
            return _cmd_rate_region(args, outdir)
        if args.command == "holevo-converge":
            return _cmd_holevo_converge(args, outdir)
        if args.command == "lemma-check":
            return _cmd_lemma_check(args, outdir)
        if args.command == "simulate-id":
            return _cmd_simulate_id(args, outdir)
        raise _UsageExit(f"unknown command {args.command!r}")
    except _UsageExit as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except CutoffError as err:
        print(f"numerical adequacy failure: {err}", file=sys.stderr)
        return EXIT_ADEQUACY


if __name__ == "__main__":
    sys.exit(main())
