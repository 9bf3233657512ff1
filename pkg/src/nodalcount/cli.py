"""``nodalcount run <experiment> --config cfg.json`` and ``nodalcount verify``."""

import argparse
import json
import os
import sys

from .errors import ConfigError, NodalCountError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VERIFY = 3


def _u64(text):
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser():
    p = argparse.ArgumentParser(prog="nodalcount", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one experiment from a JSON config")
    r.add_argument("experiment")
    r.add_argument("--config", help="JSON config; defaults are used when omitted")
    r.add_argument("--seed", type=_u64)
    r.add_argument("--workers", type=_positive)
    r.add_argument("--out", help="parent directory for the run folder (default: runs)")

    v = sub.add_parser("verify", help="run the verification suite")
    v.add_argument("--seed", type=_u64)
    v.add_argument("--out", help="also write the result table under this directory")
    return p


def load_config(experiment, path=None, seed=None, workers=None, out=None):
    from .experiments import ExperimentConfig

    data = {}
    if path is not None:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
    if data.get("experiment", experiment) != experiment:
        raise ConfigError(f"config is for {data['experiment']!r}, not {experiment!r}")
    data["experiment"] = experiment
    for key, val in (("seed", seed), ("workers", workers), ("out", out)):
        if val is not None:
            data[key] = val
    return ExperimentConfig.from_dict(data)


def _report(result, out_dir, stream):
    for name, ok in result.checks.items():
        print(f"{'PASS' if ok else 'FAIL'}  {name}", file=stream)
    if out_dir:
        print(f"wrote {out_dir}", file=stream)


def main(argv=None):
    from .experiments import run, run_dir_name

    args = build_parser().parse_args(argv)
    experiment = "verify_suite" if args.command == "verify" else args.experiment
    try:
        cfg = load_config(experiment, getattr(args, "config", None), args.seed,
                          getattr(args, "workers", None), args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        result = run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NodalCountError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    out_dir = None
    if args.command == "run" or args.out:
        out_dir = result.write(os.path.join(cfg.out, run_dir_name(cfg)))

    if args.command == "verify":
        header, rows = result.tables["verify.csv"]
        for name, passed, value, threshold, detail in rows:
            print(f"{'PASS' if passed else 'FAIL'}  {name:<24} value={value:.4g} "
                  f"threshold={threshold:.4g}  {detail}")
        return EXIT_OK if result.passed else EXIT_VERIFY

    _report(result, out_dir, sys.stdout)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
