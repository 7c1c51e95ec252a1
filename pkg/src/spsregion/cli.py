"""Command-line interface: region, bound, coverage, table, sweep.

Exit codes: 0 success, 1 user/input error, 2 valid-but-degenerate result
(unbounded region). Every JSON artifact embeds the package version, the
seed, and a hash of the fully-resolved configuration; reruns with the same
seed are byte-identical.
"""

import argparse
import hashlib
import json
import math
import os
import sys
from importlib import resources

from . import __version__
from .bounds import (PacBoundInputs, gram_ratio_bound, min_sample_size,
                     noise_quadratic_bound, perturbation_norm_bound,
                     size_bound)
from .eoa import boundary_polyline, build_eoa
from .errors import SampleTooSmall, SpsRegionError
from .harness import (CoverageScenario, NoiseModel, TableConfig,
                      coverage_experiment, lambda_sweep, size_table)
from .indicator import sps_init
from .problem import extend, load_csv

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNBOUNDED = 2


def _config_hash(obj):
    canon = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def _meta(seed, config):
    return {"version": __version__, "seed": seed,
            "config_sha256": _config_hash(config)}


def _dump_json(obj, path=None):
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def _load_config(name):
    """Read a JSON config from a path, falling back to the bundled ones."""
    if os.path.exists(name):
        with open(name) as fh:
            return json.load(fh)
    bundled = resources.files("spsregion") / "configs" / os.path.basename(name)
    if bundled.is_file():
        return json.loads(bundled.read_text())
    raise SpsRegionError(f"config {name!r} not found (and not bundled)")


def _noise_from(rec):
    return NoiseModel.from_dict(rec) if rec is not None else None


def _polyline_csv(path, entries):
    """Boundary polylines as theta1,theta2,lambda,series rows."""
    with open(path, "w") as fh:
        fh.write("theta1,theta2,lambda,series\n")
        for idx, entry in enumerate(entries):
            if math.isinf(entry.ellipsoid.radius_sq):
                continue
            for pt in boundary_polyline(entry.ellipsoid):
                fh.write(f"{float(pt[0])!r},{float(pt[1])!r},"
                         f"{float(entry.lam)!r},{idx}\n")


def cmd_region(args):
    data = load_csv(args.data)
    state = sps_init(args.p, data.n, args.seed)
    ep = extend(data, args.lam)
    ell = build_eoa(ep, state)
    unbounded = math.isinf(ell.radius_sq)
    config = {"command": "region", "data": os.path.abspath(args.data),
              "p": args.p, "lambda": args.lam, "seed": args.seed}
    report = {
        "meta": _meta(args.seed, config),
        "config": config,
        "sps": state.to_dict(),
        "status": "unbounded" if unbounded else "ok",
        "ellipsoid": ell.to_dict(),
    }
    os.makedirs(args.out, exist_ok=True)
    json_path = os.path.join(args.out, "region.json")
    text = _dump_json(report, json_path)
    csv_path = None
    if not unbounded and data.d == 2:
        from .harness import SweepEntry
        from .plotting import save_region_figure
        csv_path = os.path.join(args.out, "region_boundary.csv")
        _polyline_csv(csv_path, [SweepEntry(lam=args.lam, ellipsoid=ell)])
        save_region_figure(ell, os.path.join(args.out, "region.png"),
                           label=f"level {args.p:g}")
    if args.format == "csv" and csv_path:
        with open(csv_path) as fh:
            sys.stdout.write(fh.read())
    else:
        sys.stdout.write(text)
    return EXIT_UNBOUNDED if unbounded else EXIT_OK


def cmd_bound(args):
    inputs = PacBoundInputs(
        n=args.n, d=args.d, delta=args.delta, m=args.m, q=args.q,
        sigma=args.sigma, lam=args.lam, ell=args.ell, kappa=args.kappa,
        rho=args.rho, lambda_min_r_tilde=args.lambda_min_r_tilde)
    try:
        bound = size_bound(inputs)
    except SampleTooSmall as exc:
        print(f"error: {exc} (minimum sample size: {exc.required_n})",
              file=sys.stderr)
        return EXIT_ERROR
    config = {"command": "bound", "n": args.n, "d": args.d,
              "delta": args.delta, "m": args.m, "q": args.q,
              "sigma": args.sigma, "lambda": args.lam, "ell": args.ell,
              "kappa": args.kappa, "rho": args.rho,
              "lambda_min_r_tilde": args.lambda_min_r_tilde}
    ratio = gram_ratio_bound(args.delta, args.kappa, args.d, args.n, args.rho,
                             args.lam, args.lambda_min_r_tilde)
    report = {
        "meta": _meta(None, config),
        "config": config,
        "min_sample_size": min_sample_size(inputs),
        "size_bound": bound,
        "perturbation_norm_bound": perturbation_norm_bound(
            args.delta, args.kappa, args.d, args.n, args.rho),
        "gram_ratio_bound": "inf" if math.isinf(ratio) else ratio,
        "noise_quadratic_bound": noise_quadratic_bound(
            args.delta, args.n, args.d, args.sigma, args.lam,
            args.ell ** 2),
    }
    text = _dump_json(report,
                      os.path.join(args.out, "bound.json") if args.out else None)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_coverage(args):
    config = _load_config(args.config)
    seed = args.seed if args.seed is not None else config.get("seed", 0)
    threads = args.threads
    scenario = CoverageScenario(
        region=config.get("region", "indicator"),
        p=config.get("p", 0.9),
        n=config["n"],
        trials=config["trials"],
        seed=seed,
        lam=config.get("lambda", 10.0),
        noise=_noise_from(config.get("noise", {"kind": "laplace", "scale": 1.0})),
        b_star=tuple(config.get("b_star", (2.0, 2.0))))
    result = coverage_experiment(scenario, threads=threads)
    resolved = dict(config, seed=seed)
    report = {
        "meta": _meta(seed, resolved),
        "config": resolved,
        "coverage": result.coverage,
        "ci99": list(result.ci),
        "trials": result.trials,
        "successes": result.successes,
    }
    os.makedirs(args.out, exist_ok=True)
    text = _dump_json(report, os.path.join(args.out, "coverage.json"))
    from .plotting import save_coverage_figure
    save_coverage_figure(result, scenario.p,
                         os.path.join(args.out, "coverage.png"))
    sys.stdout.write(text)
    return EXIT_OK


def cmd_table(args):
    config = _load_config(args.config)
    seed = args.seed if args.seed is not None else config.get("seed", 0)
    table_config = TableConfig(
        n_grid=tuple(config["n_grid"]),
        seed=seed,
        lam=config.get("lambda", 10.0),
        s=config.get("s", 100),
        delta=config.get("delta", 0.5),
        p=config.get("p", 0.9),
        rho=config.get("rho", 1.0),
        noise=_noise_from(config.get("noise",
                                     {"kind": "uniform", "lo": -2.0, "hi": 2.0})),
        b_star=tuple(config.get("b_star", (2.0, 2.0))))
    report = size_table(table_config, threads=args.threads)
    resolved = dict(config, seed=seed)
    doc = {"meta": _meta(seed, resolved), "config": resolved}
    doc.update(report.to_dict())
    os.makedirs(args.out, exist_ok=True)
    csv_text = report.to_csv_text()
    with open(os.path.join(args.out, "table.csv"), "w") as fh:
        fh.write(csv_text)
    text = _dump_json(doc, os.path.join(args.out, "table.json"))
    from .plotting import save_table_figure
    save_table_figure(report, os.path.join(args.out, "table.png"))
    sys.stdout.write(csv_text if args.format == "csv" else text)
    return EXIT_OK


def cmd_sweep(args):
    config = _load_config(args.config)
    seed = args.seed if args.seed is not None else config.get("seed", 0)
    entries = lambda_sweep(
        n=config["n"],
        lambdas=config["lambdas"],
        seed=seed,
        noise=_noise_from(config.get("noise", {"kind": "laplace", "scale": 1.0})),
        p=config.get("p", 0.9),
        b_star=tuple(config.get("b_star", (2.0, 2.0))))
    resolved = dict(config, seed=seed)
    report = {
        "meta": _meta(seed, resolved),
        "config": resolved,
        "entries": [{"lambda": e.lam, "ellipsoid": e.ellipsoid.to_dict()}
                    for e in entries],
    }
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "sweep_polylines.csv")
    _polyline_csv(csv_path, entries)
    text = _dump_json(report, os.path.join(args.out, "sweep.json"))
    from .plotting import save_sweep_figure
    save_sweep_figure(entries, os.path.join(args.out, "sweep.png"))
    if args.format == "csv":
        with open(csv_path) as fh:
            sys.stdout.write(fh.read())
    else:
        sys.stdout.write(text)
    any_unbounded = any(math.isinf(e.ellipsoid.radius_sq) for e in entries)
    return EXIT_UNBOUNDED if any_unbounded else EXIT_OK


def _add_common(sub, seed_default=0):
    sub.add_argument("--seed", type=int, default=seed_default,
                     help="master seed (default: %(default)s)")
    sub.add_argument("--out", default=".",
                     help="output directory (default: current)")
    sub.add_argument("--format", choices=("csv", "json"), default="json",
                     help="stdout echo format (files are always written)")
    sub.add_argument("--threads", type=int, default=None,
                     help="parallel trial cap (default: available cores)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="spsregion",
        description="Distribution-free confidence ellipsoids for ridge "
                    "regression via sign-perturbed sums.")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("region", help="confidence region from a CSV dataset")
    sp.add_argument("data", help="CSV file with header phi1,...,phiD,y")
    sp.add_argument("--p", type=float, default=0.9, help="confidence level")
    sp.add_argument("--lambda", dest="lam", type=float, default=10.0,
                    help="ridge parameter (> 0)")
    _add_common(sp)
    sp.set_defaults(fun=cmd_region)

    sp = subs.add_parser("bound", help="size bound and its companion bounds")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--m", type=int, default=10)
    sp.add_argument("--q", type=int, default=1)
    sp.add_argument("--sigma", type=float, required=True,
                    help="subgaussian noise proxy")
    sp.add_argument("--lambda", dest="lam", type=float, default=0.0,
                    help="ridge parameter (0 gives the unregularized bound)")
    sp.add_argument("--ell", type=float, required=True,
                    help="norm bound on the true parameter")
    sp.add_argument("--kappa", type=float, required=True,
                    help="coherence constant")
    sp.add_argument("--rho", type=float, default=1.0)
    sp.add_argument("--lambda-min-r-tilde", dest="lambda_min_r_tilde",
                    type=float, default=None)
    sp.add_argument("--out", default=None,
                    help="optional directory for bound.json")
    sp.set_defaults(fun=cmd_bound)

    for name, fun, help_text in (
            ("coverage", cmd_coverage, "Monte Carlo coverage experiment"),
            ("table", cmd_table, "empirical vs theoretical size table"),
            ("sweep", cmd_sweep, "regions across a ridge-parameter grid")):
        sp = subs.add_parser(name, help=help_text)
        sp.add_argument("--config", required=True,
                        help="JSON config path or bundled name "
                             "(table4.json, fig1.json)")
        _add_common(sp, seed_default=None)
        sp.set_defaults(fun=fun)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fun(args)
    except (SpsRegionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
