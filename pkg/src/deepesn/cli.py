"""Command line entry point: ``deepesn {richness,predict,narma-gen,measure}``."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys

import numpy as np

from . import data, experiment, measures
from .errors import IllConditionedError
from .reservoir import LayerStates


def _add_sweep_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with flag-named keys; flags override it")
    p.add_argument("--task", choices=sorted(experiment.DEFAULT_TEST_LEN))
    p.add_argument("--laser-path")
    p.add_argument("--layers", type=int)
    p.add_argument("--units", type=int)
    p.add_argument("--rho", type=float)
    p.add_argument("--omega-in", type=float)
    p.add_argument("--omega-il", type=float, action="append",
                   help="inter-layer scaling; repeat for a grid")
    p.add_argument("--realizations", type=int)
    p.add_argument("--train-len", type=int)
    p.add_argument("--test-len", type=int)
    p.add_argument("--washout", type=int)
    p.add_argument("--lms-eta", type=float)
    p.add_argument("--lms-epochs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--explained", type=float)
    p.add_argument("--out", required=True, help="aggregated CSV output path")
    p.add_argument("--raw-out", help="optional per-realization CSV output path")
    p.add_argument("--workers", type=int, default=1)


def _config(args) -> experiment.ExperimentConfig:
    base = None
    if args.config:
        with open(args.config) as fh:
            base = experiment.config_from_mapping(json.load(fh))
    flags = {key: getattr(args, key.replace("-", "_")) for key in experiment.CONFIG_KEYS}
    return experiment.config_from_mapping(flags, base)


def _sweep(args, fn) -> int:
    cfg = _config(args)
    table = fn(cfg, workers=args.workers)
    experiment.emit_csv(table, args.out)
    if args.raw_out:
        experiment.emit_raw_csv(table, args.raw_out)
    return 0


def _narma_gen(args) -> int:
    task = data.generate_narma10(args.length, args.seed)
    task.to_csv(args.out)
    return 0


def _measure(args) -> int:
    rows = []
    for i, path in enumerate(args.states, start=1):
        x = np.loadtxt(path, delimiter=",", ndmin=2)
        if args.units_by_rows:
            x = x.T
        # file rows are time steps; LayerStates columns are time steps
        st = LayerStates(i, x.T[:, args.washout:], args.washout, x.shape[0])
        sv = measures.spectrum(st)
        try:
            kappa, log_kappa = measures.kappa_from_spectrum(sv)
            flag = ""
        except IllConditionedError:
            kappa = log_kappa = float("nan")
            flag = "ill_conditioned"
        rows.append([i, measures.average_state_entropy(st),
                     measures.ud_from_spectrum(sv, args.explained), kappa, log_kappa, flag])
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["layer", "ase", "ud", "kappa", "log10_kappa", "flags"])
        for layer, ase, ud, kappa, lk, flag in rows:
            w.writerow([layer, f"{ase:.12g}", ud, f"{kappa:.12g}", f"{lk:.12g}", flag])
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="deepesn", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("richness", help="ASE / UD / log10 kappa per layer")
    _add_sweep_flags(p)
    p.set_defaults(func=lambda a: _sweep(a, experiment.run_richness_sweep))

    p = sub.add_parser("predict", help="per-layer test MSE of LMS and direct readouts")
    _add_sweep_flags(p)
    p.set_defaults(func=lambda a: _sweep(a, experiment.run_prediction_sweep))

    p = sub.add_parser("narma-gen", help="write a NARMA-10 series as CSV (t,u,y_tg)")
    p.add_argument("--length", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_narma_gen)

    p = sub.add_parser("measure", help="richness measures of state CSV files")
    p.add_argument("states", nargs="+",
                   help="one CSV per layer; rows are time steps, columns are units")
    p.add_argument("--units-by-rows", action="store_true",
                   help="files are units x time steps instead")
    p.add_argument("--washout", type=int, default=0)
    p.add_argument("--explained", type=float, default=0.9)
    p.add_argument("--out", help="output CSV (default: stdout)")
    p.set_defaults(func=_measure)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError, ArithmeticError, RuntimeError) as exc:
        print(f"deepesn: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
