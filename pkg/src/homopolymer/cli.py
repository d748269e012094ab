"""Command-line driver: ``homopolymer --experiment ID [options]``.

Options may also come from a plain ``key = value`` file given with
``--config``; flags on the command line take precedence. The exit status is
0 when every criterion of the experiment passes, 1 when one fails and 2 on
usage or input errors.
"""

import argparse
import sys

from .experiments import EXPERIMENTS, ExperimentConfig, run_experiment

_FLOAT_LIST = {"T", "epsilons"}
_TYPES = {
    "experiment": str, "gamma": float, "kappa": float, "n_paths": int, "seed": int, "grid": int,
    "out": str, "format": str, "start_radius": float, "window_points": int, "workers": int,
}


def _floats(text):
    vals = tuple(float(v) for v in str(text).replace(",", " ").split())
    if not vals:
        raise ValueError("empty list")
    return vals if len(vals) > 1 else vals[0]


def read_config_file(path):
    """Parse ``key = value`` lines; ``#`` starts a comment, dashes in keys are allowed."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{n}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key in _FLOAT_LIST:
                out[key] = _floats(val)
            elif key in _TYPES:
                out[key] = _TYPES[key](val)
            else:
                raise ValueError(f"{path}:{n}: unknown key {key!r}")
    return out


def build_parser():
    p = argparse.ArgumentParser(prog="homopolymer", description=__doc__.splitlines()[0])
    p.add_argument("--experiment", choices=EXPERIMENTS)
    p.add_argument("--config", help="key = value file; flags override it")
    p.add_argument("--gamma", type=float)
    p.add_argument("--kappa", type=float)
    p.add_argument("--T", type=_floats, help="horizon; a comma list for diffusive-scaling")
    p.add_argument("--n-paths", dest="n_paths", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--grid", type=int, help="radial table nodes per sampling step")
    p.add_argument("--out", help="report path (omit to print to stdout)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--start-radius", dest="start_radius", type=float)
    p.add_argument("--epsilons", type=_floats, help="comma list of well radii for smoothed-limit")
    p.add_argument("--window-points", dest="window_points", type=int)
    p.add_argument("--workers", type=int, help="processes used for path shards")
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = read_config_file(args.config) if args.config else {}
    except (OSError, ValueError) as exc:
        parser.exit(2, f"homopolymer: error: {exc}\n")
    for k, v in vars(args).items():
        if k != "config" and v is not None:
            opts[k] = v
    if "experiment" not in opts:
        parser.error("--experiment is required (on the command line or in the config file)")
    if opts["experiment"] not in EXPERIMENTS:
        parser.error(f"unknown experiment {opts['experiment']!r}")
    try:
        cfg = ExperimentConfig(**opts)
        report = run_experiment(cfg)
    except (OSError, ValueError) as exc:
        parser.exit(2, f"homopolymer: error: {exc}\n")
    if not cfg.out:
        fmt = cfg.format
        sys.stdout.write(report.to_csv() if fmt == "csv" else report.to_json() + "\n")
    for name, c in report.criteria.items():
        mark = "PASS" if c["passed"] else "FAIL"
        sys.stderr.write(f"[{mark}] {name}: {c['value']:.6g} {c['op']} {c['threshold']}\n")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
