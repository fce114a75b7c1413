"""Command line entry point ``torus-lab``.

    torus-lab run CONFIG [--output PATH] [--figures]
    torus-lab validate CONFIG
    torus-lab acceptance [--fast] [--only 3,5]

Exit codes: 0 success, 1 invalid configuration or failed acceptance,
2 budget abort.  ``TORUS_LAB_WORKERS`` and ``TORUS_LAB_NODE_CAP`` override
the worker count and the y-node cap.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import __version__, config
from .errors import ConfigError

log = logging.getLogger("torus_lab")


def _cmd_run(args):
    try:
        cfg = config.load(args.config)
    except ConfigError as exc:
        log.error("invalid config: %s", exc)
        return 1
    from .experiments import run

    report = run(cfg, args.output, figures=args.figures)
    if report.status == 0:
        for path in report.outputs:
            print(path)
        for k, v in report.summary.items():
            print(f"{k} = {v}")
        log.info("%s finished in %.2fs", cfg.experiment, report.wall_time)
    elif report.status == 2:
        log.error("budget abort: %s", report.message)
    else:
        log.error("invalid input: %s", report.message)
    return report.status


def _cmd_validate(args):
    try:
        cfg = config.load(args.config)
    except ConfigError as exc:
        print(f"invalid: {exc}")
        return 1
    print(f"ok: {cfg.experiment} ({cfg.digest[:12]})")
    return 0


def _cmd_acceptance(args):
    from .acceptance import run_suite

    numbers = None
    if args.only:
        numbers = {int(v) for v in args.only.split(",") if v.strip()}
    results = run_suite(fast=args.fast, numbers=numbers)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return 1 if failed else 0


def build_parser():
    p = argparse.ArgumentParser(prog="torus-lab", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one experiment config")
    r.add_argument("config")
    r.add_argument("--output", help="CSV path (overrides the config's output key)")
    r.add_argument("--figures", action="store_true", help="also render a PNG next to the CSV")
    r.set_defaults(func=_cmd_run)

    v = sub.add_parser("validate", help="check a config against the schema")
    v.add_argument("config")
    v.set_defaults(func=_cmd_validate)

    a = sub.add_parser("acceptance", help="run the acceptance criteria")
    a.add_argument("--fast", action="store_true", help="skip the slow criteria")
    a.add_argument("--only", help="comma-separated criterion numbers")
    a.set_defaults(func=_cmd_acceptance)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
