"""Command line interface.

    cherrypick test standard --mu-hat 0.3 --n 25
    cherrypick simulate inspect --config sim.json --seed 7 --format csv --out out.csv
    cherrypick bounds t5 --alpha 0.05 --beta 0.05 --delta 0.05 --n-publish 10
    cherrypick analyze real-data --data kappa.csv --n-publish 5 --n-inspect 5 --seed 1

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical error.
"""

import argparse
import dataclasses
import hashlib
import json
import sys

from . import __version__
from .bounds import bound_report
from .dataio import (
    Schema,
    load_improvements,
    rows_to_csv,
    rows_to_json,
    rows_to_table,
)
from .exceptions import CherryPickError, ParseError
from .experiments import SimulationConfig, run_false_claim, run_inspection, run_power, run_real_data
from .significance import (
    DEFAULT_DRAWS,
    TestKind,
    conservative_p,
    gap_p,
    inspector_p,
    one_sample_t_p,
    standard_p,
    two_sample_t_p,
)

EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 2, 3, 4
NO_SEED = "n/a"  # printed for deterministic commands


class UsageError(Exception):
    pass


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _args_hash(args, exclude=("func", "out", "format")):
    payload = {k: v for k, v in sorted(vars(args).items()) if k not in exclude}
    blob = json.dumps(payload, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


# --- output -----------------------------------------------------------------


def _emit(args, rows, meta):
    meta = {"version": __version__, **meta}
    if args.format == "json":
        text = rows_to_json(rows, meta)
    else:
        stamped = [{**row, **{k: v for k, v in meta.items() if k not in row}} for row in rows]
        if args.format == "csv":
            text = rows_to_csv(stamped)
        else:
            header = "# " + " ".join(f"{k}={v}" for k, v in meta.items())
            text = header + "\n" + rows_to_table(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_output(parser):
    parser.add_argument("--format", choices=("table", "csv", "json"), default="table")
    parser.add_argument("--out", help="write to this file instead of stdout")


# --- test -----------------------------------------------------------------------


def _sample(values, path, label):
    if values is not None and path is not None:
        raise UsageError(f"give either --{label} or --{label}-csv, not both")
    if path is not None:
        return load_improvements(path).values
    return values


def _mean_and_n(args):
    values = _sample(args.values, args.values_csv, "values")
    if values is not None:
        if args.mu_hat is not None or args.n is not None:
            raise UsageError("--mu-hat/--n and --values/--values-csv are exclusive")
        return sum(values) / len(values), len(values)
    if args.mu_hat is None or args.n is None:
        raise UsageError("need --mu-hat and --n (or --values / --values-csv)")
    return args.mu_hat, args.n


def cmd_test(args):
    kind = TestKind(args.kind)
    if kind is TestKind.STANDARD_Z:
        outcome = standard_p(*_mean_and_n(args))
    elif kind is TestKind.GAP_Z:
        outcome = gap_p(*_mean_and_n(args), args.mu_gap)
    elif kind is TestKind.CONSERVATIVE:
        if args.seed is None or args.n_all is None:
            raise UsageError("the conservative test needs --n-all and --seed")
        mu_hat, n = _mean_and_n(args)
        outcome = conservative_p(mu_hat, n, args.n_all, args.draws, args.seed)
    elif kind is TestKind.INSPECTOR_Z:
        pub = _sample(args.pub, args.pub_csv, "pub")
        insp = _sample(args.insp, args.insp_csv, "insp")
        if pub is not None and insp is not None:
            outcome = inspector_p(sum(pub) / len(pub), sum(insp) / len(insp), len(pub), len(insp))
        elif None in (args.mu_pub, args.mu_insp, args.n_publish, args.n_inspect):
            raise UsageError("need --mu-pub --mu-insp --n-publish --n-inspect (or both samples)")
        else:
            outcome = inspector_p(args.mu_pub, args.mu_insp, args.n_publish, args.n_inspect)
    elif kind is TestKind.ONE_SAMPLE_T:
        values = _sample(args.values, args.values_csv, "values")
        if values is None:
            raise UsageError("need --values or --values-csv")
        outcome = one_sample_t_p(values, args.mu_gap)
    else:
        pub = _sample(args.pub, args.pub_csv, "pub")
        insp = _sample(args.insp, args.insp_csv, "insp")
        if pub is None or insp is None:
            raise UsageError("need both samples (--pub/--pub-csv and --insp/--insp-csv)")
        outcome = two_sample_t_p(pub, insp)

    row = outcome.as_dict()
    if outcome.monte_carlo is not None and args.format == "table":
        mc = outcome.monte_carlo
        row["p_value"] = f"{mc.estimate:.6g} ± {mc.std_error:.2g}"
    seed = args.seed if kind is TestKind.CONSERVATIVE else NO_SEED
    _emit(args, [row], {"seed": seed, "config_hash": _args_hash(args)})


def _add_test_parser(sub):
    p = sub.add_parser("test", help="run one significance test")
    p.add_argument("kind", choices=[k.value for k in TestKind])
    p.add_argument("--mu-hat", type=float, help="published mean improvement (unit variance)")
    p.add_argument("--n", type=int, help="number of published datasets")
    p.add_argument("--values", type=_floats, help="comma-separated improvements")
    p.add_argument("--values-csv", help="CSV with header dataset_id,value")
    p.add_argument("--mu-gap", type=float, default=0.0)
    p.add_argument("--n-all", type=int, help="datasets the reporter chose from (conservative)")
    p.add_argument("--draws", type=int, default=DEFAULT_DRAWS)
    p.add_argument("--seed", type=int)
    p.add_argument("--mu-pub", type=float)
    p.add_argument("--mu-insp", type=float)
    p.add_argument("--n-publish", type=int)
    p.add_argument("--n-inspect", type=int)
    p.add_argument("--pub", type=_floats)
    p.add_argument("--pub-csv")
    p.add_argument("--insp", type=_floats)
    p.add_argument("--insp-csv")
    _add_output(p)
    p.set_defaults(func=cmd_test)


# --- simulate -------------------------------------------------------------------


def _config(args):
    data = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{args.config}: {exc.msg}", exc.lineno) from None
        if not isinstance(data, dict):
            raise ParseError(f"{args.config}: expected a JSON object")
        known = {f.name for f in dataclasses.fields(SimulationConfig)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ParseError(f"{args.config}: unknown field(s) {', '.join(unknown)}")
    for f in dataclasses.fields(SimulationConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            data[f.name] = value
    return SimulationConfig.from_dict(data)


def cmd_simulate(args):
    config = _config(args)
    rows = []
    if args.kind == "false-claim":
        grid = args.n_publish_grid or [config.n_publish]
        for n_publish in grid:
            cfg = config
            if args.n_publish_grid:
                n_all = round(n_publish * args.n_all_ratio) if args.n_all_ratio else config.n_all
                cfg = config.replace(n_publish=n_publish, n_all=n_all)
            rows.extend(run_false_claim(cfg, conservative=args.conservative).rows())
    elif args.kind == "power":
        grid = args.mu_grid or [0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0]
        for result in run_power(config, grid):
            rows.extend(result.rows())
    else:
        rows.extend(run_inspection(config).rows())
    _emit(args, rows, {"seed": config.seed, "config_hash": config.digest()})


def _add_simulate_parser(sub):
    p = sub.add_parser("simulate", help="seeded Monte-Carlo experiments")
    p.add_argument("kind", choices=("false-claim", "power", "inspect"))
    p.add_argument("--config", help="JSON file whose keys are SimulationConfig fields")
    p.add_argument("--seed", type=int, required=True)
    types = {int: int, float: float, str: str}
    for f in dataclasses.fields(SimulationConfig):
        if f.name == "seed":
            continue
        flag = "--" + f.name.replace("_", "-")
        names = [flag] if flag == "--" + f.name else [flag, "--" + f.name]
        p.add_argument(*names, dest=f.name, type=types[type(f.default)], default=None)
    p.add_argument("--mu-grid", type=_floats, help="power: true effects to evaluate")
    p.add_argument("--n-publish-grid", type=_ints, help="false-claim: sweep n_publish")
    p.add_argument("--n-all-ratio", type=float, help="false-claim sweep: n_all = ratio * n_publish")
    p.add_argument("--conservative", action="store_true", help="false-claim: also run the conservative test")
    _add_output(p)
    p.set_defaults(func=cmd_simulate)


# --- bounds -----------------------------------------------------------------------


BOUND_PARAMS = {
    "t1": ("alpha", "n_all"),
    "t2": ("alpha", "delta", "epsilon", "n_publish", "n_all"),
    "t3": ("delta", "n_publish", "n_all"),
    "t4": ("delta", "n_publish", "n_all"),
    "t5": ("alpha", "beta", "delta", "n_publish"),
}


def cmd_bounds(args):
    names = BOUND_PARAMS[args.theorem]
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError("bounds {} needs {}".format(
            args.theorem, " ".join("--" + n.replace("_", "-") for n in missing)))
    report = bound_report(args.theorem, **{n: getattr(args, n) for n in names})
    _emit(args, [report.as_dict()], {"seed": NO_SEED, "config_hash": _args_hash(args)})


def _add_bounds_parser(sub):
    p = sub.add_parser("bounds", help="evaluate a closed-form threshold")
    p.add_argument("theorem", choices=tuple(BOUND_PARAMS))
    for name in ("alpha", "beta", "delta", "epsilon"):
        p.add_argument("--" + name, type=float)
    p.add_argument("--n-publish", type=int)
    p.add_argument("--n-all", type=int)
    _add_output(p)
    p.set_defaults(func=cmd_bounds)


# --- analyze ----------------------------------------------------------------------


def cmd_analyze(args):
    sample = load_improvements(args.data, Schema(args.schema))
    result = run_real_data(
        sample, args.n_publish, args.n_inspect, args.trials, args.seed,
        beta=args.beta, exclude_published=args.exclude_published,
    )
    _emit(args, result.rows(), {"seed": args.seed, "config_hash": result.extra["config_hash"]})


def _add_analyze_parser(sub):
    p = sub.add_parser("analyze", help="audit real per-dataset improvements")
    p.add_argument("kind", choices=("real-data",))
    p.add_argument("--data", required=True, help="improvements CSV")
    p.add_argument("--schema", choices=[s.value for s in Schema], default=Schema.RAW_VALUES.value)
    p.add_argument("--n-publish", type=int, default=5)
    p.add_argument("--n-inspect", type=int, default=5)
    p.add_argument("--trials", type=int, default=1000, help="inspector resamples")
    p.add_argument("--beta", type=float, default=0.05)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--exclude-published", action=argparse.BooleanOptionalAction, default=True,
                   help="draw inspection datasets only from the unpublished pool (default)")
    _add_output(p)
    p.set_defaults(func=cmd_analyze)


def build_parser():
    parser = argparse.ArgumentParser(prog="cherrypick", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_test_parser(sub)
    _add_simulate_parser(sub)
    _add_bounds_parser(sub)
    _add_analyze_parser(sub)
    return parser


def _fail(code, kind, message):
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return code


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        return _fail(EXIT_USAGE, "usage", str(exc))
    except (ParseError, OSError) as exc:
        return _fail(EXIT_DATA, "data", str(exc))
    except CherryPickError as exc:
        return _fail(EXIT_NUMERIC, "numerical", str(exc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
