"""Command-line experiment driver.

Subcommands: ``sigma-sweep``, ``rayleigh-sweep``, ``esprit-sweep`` (seeded
Monte-Carlo runs emitting the fixed CSV/JSON schema), ``certify`` (both
certificates for one explicit configuration) and ``adversarial`` (emit one
adversarial signal pair).

Sweep configuration comes from a flat ``key=value`` config file overlaid
by ``--set key=value`` flags; ``--trials`` and ``--seed`` override both.
Exit status: 0 on success, 2 when any trial failed (failures are recorded
in the ``status`` column, never raised) or the configuration is invalid.
"""

from __future__ import annotations

import argparse
import json
import sys

from .experiments import (adversarial_cluster, any_failures, certify_run,
                          emit_results, records_slope, run_esprit_sweep,
                          run_rayleigh_sweep, run_sigma_sweep)
from .minmax import adversarial_report

__all__ = ["main"]

_SWEEPS = {
    "sigma-sweep": (run_sigma_sweep, ("sigma_min",)),
    "rayleigh-sweep": (run_rayleigh_sweep, ("sigma_min", "upper_cert")),
    "esprit-sweep": (run_esprit_sweep, ("E_total",)),
}


def read_config_file(path) -> dict:
    """Parse a flat key=value config file; '#' starts a comment."""
    out: dict = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep or not key.strip():
                raise ValueError(
                    f"{path}:{lineno}: expected key=value, got {raw.strip()!r}"
                )
            out[key.strip()] = value.strip()
    return out


def _add_sweep_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="flat key=value config file")
    sub.add_argument("--set", action="append", metavar="KEY=VALUE",
                     help="override one config key (repeatable)")
    sub.add_argument("--trials", type=int, help="number of trials")
    sub.add_argument("--seed", type=int, help="master seed")
    sub.add_argument("--out", required=True, help="output file path")
    sub.add_argument("--format", choices=("csv", "json"), default="csv",
                     help="output format (default csv)")


def _sweep_config(args) -> dict:
    cfg: dict = {}
    if args.config:
        cfg.update(read_config_file(args.config))
    for item in args.set or []:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ValueError(f"--set expects KEY=VALUE, got {item!r}")
        cfg[key.strip()] = value.strip()
    if args.trials is not None:
        cfg["trials"] = args.trials
    if args.seed is not None:
        cfg["seed"] = args.seed
    return cfg


def _emit_json(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=1)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="confvan",
        description="Conditioning and recovery experiments for spike + "
                    "derivative signals.")
    subs = parser.add_subparsers(dest="command", required=True)

    for name, helptext in (
            ("sigma-sweep", "sigma_min of clustered configurations with "
                            "certified bounds, versus SRF"),
            ("rayleigh-sweep", "Rayleigh quotient of the test vector versus "
                               "sigma_min of the torus matrix"),
            ("esprit-sweep", "subspace recovery errors on near-worst-case "
                             "signals with bounded noise")):
        sub = subs.add_parser(name, help=helptext)
        _add_sweep_flags(sub)

    cert = subs.add_parser("certify", help="certificates for one explicit "
                                           "configuration (JSON)")
    cert.add_argument("--kind", choices=("single_cluster", "multi_cluster"),
                      default="single_cluster")
    cert.add_argument("--s", type=int, required=True, help="node count")
    cert.add_argument("--ell", type=int, required=True, help="cluster size")
    cert.add_argument("--ell1", type=int, help="first cluster size (multi)")
    cert.add_argument("--ell2", type=int, help="second cluster size (multi)")
    cert.add_argument("--delta", type=float, required=True,
                      help="node spacing (radians)")
    cert.add_argument("--n", type=int, required=True, dest="N",
                      help="measurement bandwidth N")
    cert.add_argument("--out", help="output JSON path (default stdout)")

    adv = subs.add_parser("adversarial", help="emit one adversarial signal "
                                              "pair (JSON)")
    adv.add_argument("--ell", type=int, required=True,
                     help="cluster size of each half signal")
    adv.add_argument("--delta", type=float, required=True,
                     help="node spacing of the doubled cluster (radians)")
    adv.add_argument("--n", type=int, required=True, dest="N",
                     help="measurement bandwidth N")
    adv.add_argument("--epsilon", type=float, default=1e-12,
                     help="noise budget (default 1e-12)")
    adv.add_argument("--out", help="output JSON path (default stdout)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command in _SWEEPS:
            runner, slope_columns = _SWEEPS[args.command]
            records = runner(_sweep_config(args))
            emit_results(records, args.out, format=args.format)
            failed = sum(r.status.startswith("failed") for r in records)
            print(f"{args.command}: {len(records)} trials -> {args.out} "
                  f"({failed} failed)")
            for column in slope_columns:
                try:
                    slope = records_slope(records, column)
                except ValueError:
                    continue
                print(f"  log-log slope of {column} vs srf: {slope:.4f}")
            return 2 if any_failures(records) else 0

        if args.command == "certify":
            report = certify_run(kind=args.kind, s=args.s, ell=args.ell,
                                 delta=args.delta, N=args.N,
                                 ell1=args.ell1, ell2=args.ell2)
            _emit_json(report, args.out)
            return 0

        # adversarial
        nodes = adversarial_cluster(args.ell, args.delta)
        report = adversarial_report(nodes, args.N, args.epsilon)
        _emit_json(report, args.out)
        return 0
    except (ValueError, AssertionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
