"""Command-line experiment runner.

    sphlis <experiment> [flags] [--out file.csv]

Experiments: rss-sweep, gamma-sweep, crlb-sweep, position-sim,
reflector-sim, field-map.  Flags may also come from a plain key=value
config file (--config); explicit flags win.  Errors leave a single
machine-parsable line on stderr: ``error: <category>: <message>``.
"""

import argparse
import sys

from .errors import (
    DetectionError,
    EstimationError,
    LayoutError,
    QuadratureBudgetError,
    SphlisError,
    VisibilityError,
)
from .sweeps import EXPERIMENTS, SweepSpec, run, write_csv


class _Parser(argparse.ArgumentParser):
    """argparse that fails with one parsable line instead of usage spam."""

    def error(self, message):
        raise _UsageError(message)


class _UsageError(Exception):
    pass


_FLAGS = [
    # (flag, dest, type, help)
    ("--zk", "zk", float, "terminal range from the center in meters"),
    ("--r-min", "r_min", float, "smallest swept radius (meters)"),
    ("--r-max", "r_max", float, "largest swept radius (meters)"),
    ("--points", "points", int, "number of grid points"),
    ("--seed", "seed", int, "base seed for every stochastic piece"),
    ("--sigma", "sigma", float, "AWGN deviation of power measurements"),
    ("--elements", "elements", int, "surface elements (cells or cap pairs)"),
    ("--trials", "trials", int, "Monte Carlo trials / seeded geometries"),
    ("--series", "series_n", int, "cap-power measurements per trial"),
    ("--threshold", "threshold_mult", float, "ring detection threshold, in sigmas"),
    (
        "--planar-radius-scale",
        "planar_radius_scale",
        float,
        "disk radius as a multiple of the sphere radius (sqrt(2) = equal area)",
    ),
    ("--wavelength", "wavelength", float, "carrier wavelength in meters"),
    ("--radius", "radius", float, "sphere radius for field-map/reflector-sim"),
    ("--cap-separation", "cap_separation", float, "fixed BS/terminal angle (radians)"),
    ("--cap-half-angle", "cap_half_angle", float, "fixed cap half-angle (radians)"),
]

_BOOL_FLAGS = [("--log", "log_spacing", "use log-spaced radii")]


def _build_parser() -> _Parser:
    parser = _Parser(prog="sphlis", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="experiment", metavar="experiment")
    sub.required = True
    for name in EXPERIMENTS:
        p = sub.add_parser(name, add_help=True)
        for flag, dest, typ, help_text in _FLAGS:
            p.add_argument(flag, dest=dest, type=typ, default=None, help=help_text)
        for flag, dest, help_text in _BOOL_FLAGS:
            p.add_argument(
                flag, dest=dest, action="store_const", const=True, default=None,
                help=help_text,
            )
        p.add_argument("--config", default=None, help="key=value defaults file")
        p.add_argument("--out", default=None, help="CSV path (default: stdout)")
    return parser


_CONFIG_TYPES = {dest: typ for _, dest, typ, _ in _FLAGS}
_CONFIG_TYPES["log_spacing"] = lambda s: s.strip().lower() in ("1", "true", "yes")
_CONFIG_TYPES["out"] = str


def _read_config(path: str) -> dict:
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise _UsageError(f"{path}:{lineno}: expected key=value")
            key, _, text = line.partition("=")
            key = key.strip().replace("-", "_")
            if key not in _CONFIG_TYPES:
                raise _UsageError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                values[key] = _CONFIG_TYPES[key](text.strip())
            except ValueError:
                raise _UsageError(f"{path}:{lineno}: bad value for {key!r}")
    return values


def _build_spec(args: argparse.Namespace) -> SweepSpec:
    settings = {}
    if args.config:
        settings.update(_read_config(args.config))
    for f in SweepSpec.__dataclass_fields__:
        if f == "experiment":
            continue
        value = getattr(args, f, None)
        if value is not None:
            settings[f] = value
    return SweepSpec(experiment=args.experiment, **settings)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        spec = _build_spec(args)
        result = run(spec)
    except _UsageError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: invalid-spec: {exc}", file=sys.stderr)
        return 2
    except LayoutError as exc:
        print(f"error: layout: {exc}", file=sys.stderr)
        return 2
    except VisibilityError as exc:
        print(f"error: visibility: {exc}", file=sys.stderr)
        return 2
    except QuadratureBudgetError as exc:
        print(f"error: budget: {exc}", file=sys.stderr)
        return 3
    except (DetectionError, EstimationError) as exc:
        print(f"error: estimation: {exc}", file=sys.stderr)
        return 3
    except SphlisError as exc:
        print(f"error: model: {exc}", file=sys.stderr)
        return 3

    try:
        if spec.out:
            with open(spec.out, "w", newline="") as fh:
                write_csv(result, fh)
        else:
            write_csv(result, sys.stdout)
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
