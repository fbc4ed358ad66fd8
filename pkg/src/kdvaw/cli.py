"""Command-line entry point: run | sweep | certify | report."""
import argparse
import glob
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from .errors import ConfigError, KDVAWError
from .harness.certify import SUITES, run_suite
from .harness.config import config_hash, expand_sweep, load_config, parse_config
from .harness.runner import execute, write_outputs
from .harness.scaling import summarize

EXIT_OK, EXIT_CONFIG, EXIT_CERT = 0, 1, 2
LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}

log = logging.getLogger("kdvaw")


def _setup_logging():
    level = os.environ.get("KDVAW_LOG", "error").lower()
    logging.basicConfig(level=LOG_LEVELS.get(level, logging.ERROR), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def build_parser():
    p = argparse.ArgumentParser(prog="kdvaw", description="Kernel discounted VAW benchmark runner.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run one config")
    r.add_argument("--config", required=True)
    r.add_argument("--out", required=True)
    s = sub.add_parser("sweep", help="cross-product over list-valued config fields")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    c = sub.add_parser("certify", help="seeded bound and invariant checks")
    c.add_argument("--suite", choices=SUITES, required=True)
    c.add_argument("--seeds", type=int, default=100)
    c.add_argument("--out")
    rep = sub.add_parser("report", help="scaling table from a sweep directory")
    rep.add_argument("sweep_dir", nargs="?")
    rep.add_argument("--out", help="sweep directory (alternative to the positional argument)")
    return p


def _run_one(cfg, out_dir):
    res = execute(cfg)
    write_outputs(res, out_dir)
    with open(os.path.join(out_dir, "config.json"), "w") as fh:
        json.dump(cfg, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return res.summary()


def cmd_run(args):
    cfg = load_config(args.config)
    parse_config(cfg)
    s = _run_one(cfg, args.out)
    log.info("final regret %.6g", s["final_regret"])
    return EXIT_OK


def cmd_sweep(args):
    base = load_config(args.config)
    combos = expand_sweep(base)
    for c in combos:
        parse_config(c)  # fail before any run starts
    dirs = [os.path.join(args.out, config_hash(c)[:12]) for c in combos]
    os.makedirs(args.out, exist_ok=True)
    if args.jobs > 1 and len(combos) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            list(ex.map(_run_one, combos, dirs))
    else:
        for c, d in zip(combos, dirs):
            _run_one(c, d)
    log.info("sweep wrote %d runs to %s", len(combos), args.out)
    return EXIT_OK


def cmd_certify(args):
    if args.seeds < 1:
        raise ConfigError("must be >= 1", "--seeds")
    res = run_suite(args.suite, args.seeds)
    print(f"{args.suite}: {res.passed} passed, {len(res.failures)} failed")
    for f in res.failures:
        print(f"  FAIL {f}", file=sys.stderr)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, f"certify_{args.suite}.json"), "w") as fh:
            json.dump({"suite": args.suite, "passed": res.passed, "failures": res.failures}, fh, indent=2)
            fh.write("\n")
    return EXIT_OK if res.ok else EXIT_CERT


def cmd_report(args):
    root = args.sweep_dir or args.out
    if not root or not os.path.isdir(root):
        raise ConfigError(f"sweep directory {root!r} not found", "report")
    summaries = []
    for path in sorted(glob.glob(os.path.join(root, "*", "summary.json"))):
        with open(path) as fh:
            summaries.append(json.load(fh))
    if not summaries:
        raise ConfigError("no summary.json files found", "report")
    table = summarize(summaries).table()
    with open(os.path.join(root, "scaling.csv"), "w") as fh:
        fh.write(table + "\n")
    print(table)
    return EXIT_OK


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "certify": cmd_certify, "report": cmd_report}


def main(argv=None):
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except KDVAWError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
