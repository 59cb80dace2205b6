"""``orderbook-lab`` command line.

Exit codes: 0 success, 2 configuration error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from ..errors import ConfigError

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="orderbook-lab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="run a config file or a named preset")
    sim.add_argument("target", help="path to a YAML config, or a preset name")
    sim.add_argument("--seed", type=int, help="override the config seed")
    sim.add_argument("--scale", type=int, default=1,
                     help="divide run lengths and burn-ins by this factor")
    sim.add_argument("--out", type=Path, help="output directory")
    sim.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    sim.add_argument("--replicas", type=int, help="override the replica count")

    sub.add_parser("presets", help="list figure presets")

    an = sub.add_parser("analyze", help="apply estimators to a t,x price-path CSV")
    an.add_argument("path", type=Path)
    an.add_argument("--measure", nargs="+", required=True, metavar="ESTIMATOR")
    an.add_argument("--lags", help="comma-separated lags (default: log-spaced 1..1000)")
    an.add_argument("--mode", default="step", choices=("step", "trade"))
    an.add_argument("--out", type=Path, default=Path("analysis"))
    return p


def _load_target(target: str):
    from .config import load_config
    from .presets import PRESETS, preset_config

    if target in PRESETS:
        return preset_config(target)
    if Path(target).is_file():
        return load_config(Path(target))
    raise ConfigError(f"{target}: neither a config file nor a preset name "
                      f"(see 'orderbook-lab presets')")


def _simulate(args) -> int:
    from .experiment import run_experiment

    config = _load_target(args.target)
    if args.seed is not None:
        if not 0 <= args.seed < 2 ** 64:
            raise ConfigError("--seed: must fit in 64 unsigned bits")
        config = replace(config, seed=args.seed)
    if args.replicas is not None:
        if args.replicas < 1:
            raise ConfigError("--replicas: must be >= 1")
        config = replace(config, replicas=args.replicas)
    if args.jobs < 1:
        raise ConfigError("--jobs: must be >= 1")
    manifest = run_experiment(config, out=args.out, scale=args.scale, jobs=args.jobs)
    out = args.out or config.output or Path("out") / config.name
    print(f"{manifest.name}: {len(manifest.files)} files in {out} "
          f"({manifest.wall_clock:.1f} s)")
    for note in manifest.skipped:
        print(f"  skipped {note['estimator']} [{note.get('label')}]: {note['reason']}")
    return EXIT_OK


def _presets(_args) -> int:
    from .presets import list_presets

    for name, desc, tags in list_presets():
        tag = f" [{', '.join(tags)}]" if tags else ""
        print(f"{name:36s} {desc}{tag}")
    return EXIT_OK


def _analyze(args) -> int:
    from .config import ESTIMATORS, Measurement
    from .experiment import measure
    from .io import read_path

    for est in args.measure:
        if est not in ESTIMATORS:
            raise ConfigError(f"--measure: unknown estimator {est!r} (one of {', '.join(ESTIMATORS)})")
    params = {"mode": args.mode}
    if args.lags:
        try:
            params["lags"] = [int(v) for v in args.lags.split(",")]
        except ValueError:
            raise ConfigError(f"--lags: expected comma-separated integers, got {args.lags!r}") from None
    try:
        path = read_path(args.path)
    except (OSError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    for est in args.measure:
        series, skipped = measure(path, Measurement(est, params))
        for s in series:
            csv_path, _ = s.to_csv(args.out / f"{s.name}.csv")
            print(csv_path)
        for note in skipped:
            print(f"  skipped {est}: {note['reason']}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {"simulate": _simulate, "presets": _presets, "analyze": _analyze}[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except KeyboardInterrupt:
        return EXIT_RUNTIME
    except Exception as exc:  # noqa: BLE001 - reported as a runtime failure
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
