"""Command line interface: ``lambda-qb {simulate,preset,sweep,spectrum}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import ConfigError, parse_config
from .presets import PRESETS
from .runner import run_preset, run_simulation, run_spectrum, run_sweep


def _read_config(path: str, strict: bool):
    return parse_config(Path(path).read_text(), strict=strict)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lambda-qb", description=__doc__)
    p.add_argument("--workers", type=int, default=1, help="parallel sweep points")
    p.add_argument("--strict", action="store_true", help="reject unknown config keys instead of warning")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run one configuration")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True, help="output directory")

    s = sub.add_parser("preset", help="run a named scenario")
    s.add_argument("--name", required=True, choices=sorted(PRESETS))
    s.add_argument("--out", required=True)

    s = sub.add_parser("sweep", help="vary one parameter")
    s.add_argument("--config", required=True)
    s.add_argument("--param", required=True, help="dotted key, e.g. system.Omega")
    s.add_argument("--values", required=True, help="comma separated, e.g. 0.7pi,0.8pi")
    s.add_argument("--out", required=True)

    s = sub.add_parser("spectrum", help="tabulate J and R on a frequency grid")
    s.add_argument("--config", required=True)
    s.add_argument("--omega-min", type=float)
    s.add_argument("--omega-max", type=float)
    s.add_argument("--points", type=int, default=201)
    s.add_argument("--out", required=True, help="output CSV file")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "simulate":
            path, summary = run_simulation(_read_config(args.config, args.strict), args.out)
            print(f"wrote {path} (peak ergotropy {summary.peak_ergotropy:.6g})")
        elif args.command == "preset":
            run_preset(args.name, args.out, workers=args.workers)
            print(f"wrote preset {args.name} to {args.out}")
        elif args.command == "sweep":
            values = [v.strip() for v in args.values.split(",") if v.strip()]
            rows = run_sweep(_read_config(args.config, args.strict), args.param, values,
                             args.out, workers=args.workers)
            failed = [r for r in rows if r.status != "ok"]
            print(f"wrote {len(rows)} runs to {args.out} ({len(failed)} failed)")
            if failed:
                return 1
        elif args.command == "spectrum":
            cfg = _read_config(args.config, args.strict)
            rows = run_spectrum(cfg, args.out, args.omega_min, args.omega_max, args.points)
            print(f"wrote {len(rows)} rows to {args.out}")
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
