"""Command-line front end.

Subcommands: estimate, simulate, bounds, compare-bases, tile.  A JSON
config file mirroring SimulationConfig may seed any subcommand's
options; explicit flags override file values.  Exit code 0 on
success, 2 on usage errors, 1 on any toolkit error.
"""

import argparse
import json
import sys

import numpy as np

from .estimation import RANK_NPARAMS, maice, mle
from .exceptions import TomographyError
from .fisher import bound_coefficient
from .projectors import inseparable_projector_set, local_projector_set
from .simulate import (
    SimulationConfig,
    compare_bases,
    emit_results,
    preset_state,
    read_counts,
    run_sweep,
    tile_estimates,
    true_model,
)

_PRESETS = ("mixed", "product", "bell")


def _pset(name):
    return local_projector_set() if name == "local" \
        else inseparable_projector_set()


def _print_matrix(label, m):
    print(label)
    for row in m:
        print("  " + "  ".join("%+10.6f" % v for v in row))


def _load_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    allowed = {f for f in SimulationConfig.__dataclass_fields__}
    bad = set(data) - allowed
    if bad:
        raise TomographyError(
            f"unknown config keys: {', '.join(sorted(bad))}")
    return data


def _config_from_args(args):
    base = _load_config(args.config) if getattr(args, "config", None) else {}
    over = {}
    if getattr(args, "state", None) is not None:
        over["true_state"] = args.state
    for flag, key in (("rate", "rate"), ("trials", "trials"),
                      ("estimator", "estimator"), ("basis", "basis"),
                      ("seed", "seed"), ("eps", "epsilon")):
        v = getattr(args, flag, None)
        if v is not None:
            over[key] = v
    if getattr(args, "times", None) is not None:
        over["acquisition_times"] = tuple(
            float(t) for t in args.times.split(","))
    base.update(over)
    if "acquisition_times" in base:
        base["acquisition_times"] = tuple(base["acquisition_times"])
    return SimulationConfig(**base)


def _cmd_estimate(args):
    counts = read_counts(args.counts)
    pset = _pset(args.basis)
    if args.model == "mle16":
        best = mle(4, counts, pset)
        table = (best,)
    else:
        best, table = maice(counts, pset)
    print(f"projector set: {pset.name}")
    print("rank  nparams  log-likelihood        AIC")
    for r in table:
        mark = " *" if r.rank == best.rank else ""
        print(f"  {r.rank}     {RANK_NPARAMS[r.rank]:3d}   {r.log_likelihood:14.4f}  {r.aic:10.3f}{mark}")
    print(f"selected rank: {best.rank}")
    print(f"lambda-hat: {best.lambda_hat:.4f}")
    _print_matrix("rho-hat (real part):", best.rho_hat.real)
    _print_matrix("rho-hat (imaginary part):", best.rho_hat.imag)
    return 0


def _cmd_simulate(args):
    cfg = _config_from_args(args)
    result = run_sweep(cfg)
    if args.out:
        emit_results(result, args.out, fmt=args.format)
        print(f"wrote {args.out}")
    else:
        emit_results(result, "/dev/stdout", fmt=args.format)
    total = sum(result.excluded)
    if total:
        print(f"excluded {total} non-converged trials", file=sys.stderr)
    return 0


def _state_for_bounds(args):
    if args.state in _PRESETS:
        return preset_state(args.state, args.eps)
    counts = read_counts(args.state)
    best, _ = maice(counts, _pset(args.basis))
    return best.rho_hat


def _cmd_bounds(args):
    rho = _state_for_bounds(args)
    rank = None if args.rank == "auto" else int(args.rank)
    model = true_model(rho, rank=rank)
    pset = _pset(args.basis)
    rep = bound_coefficient(model, pset)
    print(f"projector set: {pset.name}")
    print(f"coordinate rank: {model.rank}")
    print(f"C = {rep.coefficient:.6f}")
    print("lambda      bound (2C/lambda)")
    for lam in (1e2, 1e3, 1e4, 1e5, 1e6):
        print(f"  {lam:8.0f}  {2.0 * rep.coefficient / lam:.6e}")
    return 0


def _cmd_compare(args):
    cfg = _config_from_args(args)
    cmp_ = compare_bases(cfg)
    cl, ci = cmp_.coefficients
    print(f"C_local       = {cl:.6f}")
    print(f"C_inseparable = {ci:.6f}")
    better = "inseparable" if ci < cl else "local"
    print(f"smaller asymptotic error: {better} set")
    if args.out:
        sep = ","
        cols = ["basis", "lambda", "mean_fidelity", "mean_bures_sq",
                "std_bures_sq", "cov_trace", "bound"]
        lines = [sep.join(cols)]
        for basis, res in (("local", cmp_.local),
                           ("inseparable", cmp_.inseparable)):
            for i, lam in enumerate(res.lam_values):
                row = (lam, res.mean_fidelity[i], res.mean_bures_sq[i],
                       res.std_bures_sq[i], res.cov_trace[i], res.bound[i])
                lines.append(basis + sep +
                             sep.join("%.12g" % v for v in row))
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
        print(f"wrote {args.out}")
    return 0


def _cmd_tile(args):
    if len(args.estimates) != 9:
        raise TomographyError("tile needs exactly 9 counts files")
    pset = _pset(args.basis)
    mats = []
    for path in args.estimates:
        counts = read_counts(path)
        best, _ = maice(counts, pset)
        mats.append(best.rho_hat)
    grid = tile_estimates(mats)
    w = sys.stdout if not args.out else open(args.out, "w", encoding="utf-8")
    try:
        for row in grid:
            w.write(",".join("%.12g" % v for v in row) + "\n")
    finally:
        if args.out:
            w.close()
            print(f"wrote {args.out}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(
        prog="tomo2q",
        description="Two-qubit state estimation and Monte Carlo "
                    "error-scaling toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    pe = sub.add_parser("estimate", help="fit a state to one counts file")
    pe.add_argument("--counts", required=True)
    pe.add_argument("--basis", choices=("local", "inseparable"),
                    default="local")
    pe.add_argument("--model", choices=("mle16", "maice"), default="maice")
    pe.set_defaults(func=_cmd_estimate)

    ps = sub.add_parser("simulate", help="Monte Carlo error-scaling sweep")
    ps.add_argument("--state", choices=_PRESETS)
    ps.add_argument("--rate", type=float)
    ps.add_argument("--times", help="comma-separated acquisition times")
    ps.add_argument("--trials", type=int)
    ps.add_argument("--estimator", choices=("mle16", "maice"))
    ps.add_argument("--basis", choices=("local", "inseparable"))
    ps.add_argument("--seed", type=int)
    ps.add_argument("--eps", type=float)
    ps.add_argument("--config", help="JSON file with SimulationConfig fields")
    ps.add_argument("--out")
    ps.add_argument("--format", choices=("csv", "tsv"), default="csv")
    ps.set_defaults(func=_cmd_simulate)

    pb = sub.add_parser("bounds", help="asymptotic error bound for a state")
    pb.add_argument("--state", required=True,
                    help="preset name or counts file")
    pb.add_argument("--basis", choices=("local", "inseparable"),
                    default="local")
    pb.add_argument("--rank", choices=("auto", "1", "2", "3", "4"),
                    default="auto")
    pb.add_argument("--eps", type=float)
    pb.set_defaults(func=_cmd_bounds)

    pc = sub.add_parser("compare-bases",
                        help="same sweep under both projector sets")
    pc.add_argument("--state", choices=_PRESETS)
    pc.add_argument("--rate", type=float)
    pc.add_argument("--times", help="comma-separated acquisition times")
    pc.add_argument("--trials", type=int)
    pc.add_argument("--estimator", choices=("mle16", "maice"))
    pc.add_argument("--seed", type=int)
    pc.add_argument("--eps", type=float)
    pc.add_argument("--config", help="JSON file with SimulationConfig fields")
    pc.add_argument("--out")
    pc.set_defaults(func=_cmd_compare)

    pt = sub.add_parser("tile", help="12x12 tiling of nine estimates")
    pt.add_argument("--estimates", nargs="+", required=True,
                    help="nine counts files")
    pt.add_argument("--basis", choices=("local", "inseparable"),
                    default="local")
    pt.add_argument("--out")
    pt.set_defaults(func=_cmd_tile)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TomographyError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
