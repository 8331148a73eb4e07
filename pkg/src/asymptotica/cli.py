"""Command-line entry point: ``asymptotica run | verify | zoo list``.

Exit codes: 0 success, 2 a ``verify`` expectation failed, 1 any error.
"""

import argparse
import logging
import sys

from . import __version__
from .config import CASES, ExperimentConfig, load_config
from .errors import AsymptoticaError
from .experiments import run
from .report import to_summary, write_report
from .zoo import ZOO

log = logging.getLogger("asymptotica")

EXIT_OK, EXIT_ERROR, EXIT_FAIL = 0, 1, 2


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="asymptotica", description="Orbit asymptotics and backward sequences of power-bounded operators.")
    p.add_argument("--version", action="version", version=f"asymptotica {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run an experiment from a JSON config")
    r.add_argument("config", help="path to the config file")
    r.add_argument("--out", help="output directory (overrides the config's 'output')")

    v = sub.add_parser("verify", help="run a canned check with pinned defaults")
    v.add_argument("case", choices=CASES)
    v.add_argument("--dim", type=_positive, help="override the case's size parameter")
    v.add_argument("--horizon", type=_positive, help="override the case's horizon")
    v.add_argument("--out", default=None, help="output directory (default: out/<case>)")

    z = sub.add_parser("zoo", help="operator catalogue")
    z.add_argument("action", choices=["list"])
    return p


def _finish(rep, out_dir) -> int:
    csv_path, _ = write_report(rep, out_dir)
    sys.stdout.write(to_summary(rep))
    log.info("wrote %s", csv_path)
    if rep.checks and not rep.passed:
        c = rep.first_failure
        sys.stderr.write(f"verify failed: {c.name}: {c.detail}\n")
        return EXIT_FAIL
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "zoo":
            width = max(map(len, ZOO))
            for name, desc in ZOO.items():
                print(f"{name:<{width}}  {desc}")
            return EXIT_OK
        if args.command == "run":
            cfg = load_config(args.config)
            out = args.out or cfg.get("output") or "out"
            return _finish(run(cfg), out)
        params = {"case": args.case}
        if args.dim is not None:
            params["dim"] = args.dim
        if args.horizon is not None:
            params["horizon"] = args.horizon
        raw = {"schema": 1, "experiment": "verify", **params}
        cfg = ExperimentConfig("verify", None, 1, params, [], raw)
        return _finish(run(cfg), args.out or f"out/{args.case}")
    except (AsymptoticaError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
