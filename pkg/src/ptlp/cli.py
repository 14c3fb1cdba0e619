"""Command-line entry point: ``ptlp dist``, ``ptlp knn`` and ``ptlp synth``.

Exit codes: 0 success, 1 usage or data error, 2 a distance precondition failed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from .harness.datasets import gen_separability_data, load_ucr_tsv, save_ucr_tsv
from .harness.pairwise import METHODS, DistanceConfig, MethodError, cross_distances, pairwise_matrix
from .harness.protocol import accuracy, grid_search, knn_1
from .signal import GroundCostParams
from .sliced import DEFAULT_SLICES, sample_slices, slice_lambda_schedule

EXIT_OK, EXIT_USAGE, EXIT_METHOD = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _beta(text: str) -> float:
    t = text.strip().lower()
    if t in ("zero", "0", "0.0"):
        return 0.0
    if t in ("inf", "infinity"):
        return math.inf
    try:
        v = float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid beta {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError("beta must be > 0, 'zero' or 'inf'")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _add_distance_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--method", required=True, choices=METHODS)
    p.add_argument("--p", type=float, default=2.0, help="transport order (default 2)")
    p.add_argument("--beta", type=_beta, default=1.0, help="position weight: real, 'zero' or 'inf'")
    p.add_argument("--lambda", dest="lam", type=float, default=None, help="mass penalty")
    p.add_argument("--slices", type=_positive_int, default=DEFAULT_SLICES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=_positive_int, default=os.cpu_count() or 1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ptlp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("dist", help="pairwise distance matrix of a dataset")
    d.add_argument("--input", required=True)
    d.add_argument("--output", required=True, help="CSV path; metadata goes to <output>.json")
    _add_distance_flags(d)

    k = sub.add_parser("knn", help="1NN classification of a test set")
    k.add_argument("--train", required=True)
    k.add_argument("--test", required=True)
    k.add_argument("--grid-search", action="store_true", help="select beta and lambda by CV first")
    k.add_argument("--folds", type=int, default=5)
    k.add_argument("--beta-grid", type=_beta, nargs="+", default=None)
    k.add_argument("--lambda-grid", type=float, nargs="+", default=None)
    _add_distance_flags(k)

    s = sub.add_parser("synth", help="write the two-class synthetic dataset")
    s.add_argument("--n", type=int, required=True, help="signals per class")
    s.add_argument("--noisy", action="store_true")
    s.add_argument("--points", type=int, default=256)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--output", required=True)
    return parser


def _config(args, method=None, beta=None, lam=None, dim=None, theta0=None) -> DistanceConfig:
    method = method or args.method
    beta = args.beta if beta is None else beta
    lam = args.lam if lam is None else lam
    params = GroundCostParams(p=args.p, beta=beta, lam=lam)
    slices = None
    if method in ("stlp", "sptlp") and dim is not None:
        slices = sample_slices(args.slices, dim, args.seed)
        if method == "sptlp":
            if theta0 is not None:
                slices = slice_lambda_schedule(theta0, params.require_lambda(), slices)
            else:
                slices = slices.with_lambdas(params.require_lambda())
    return DistanceConfig(method, params, slices)


def cmd_dist(args) -> int:
    data = load_ucr_tsv(args.input)
    sig = data.signals[0]
    config = _config(args, dim=sig.dim + sig.channels)
    matrix = pairwise_matrix(data, config, threads=args.threads, seed=args.seed)
    csv_path, meta_path = matrix.save(args.output)
    print(json.dumps({"output": str(csv_path), "metadata": str(meta_path), "size": len(data)}))
    return EXIT_OK


def cmd_knn(args) -> int:
    if args.folds < 2:
        raise UsageError("--folds must be >= 2")
    train = load_ucr_tsv(args.train)
    test = load_ucr_tsv(args.test)
    sig = train.signals[0]
    dim = sig.dim + sig.channels
    beta, lam, theta0 = args.beta, args.lam, None
    report = {}
    if args.grid_search:
        common = dict(folds=args.folds, seed=args.seed, p=args.p, slices=args.slices, threads=args.threads)
        if args.method == "sptlp":
            # beta comes from the unsliced search, then the reference-slice lambda is tuned
            first = grid_search(train, "ptlp", args.beta_grid, args.lambda_grid, **common)
            second = grid_search(train, "sptlp", [first.best_beta], args.lambda_grid, **common)
            report = {"ptlp": first.to_dict(), "sptlp": second.to_dict()}
            beta, lam, theta0 = second.best_beta, second.best_lambda, second.theta0
        else:
            rep = grid_search(train, args.method, args.beta_grid, args.lambda_grid, **common)
            report = {args.method: rep.to_dict()}
            beta = rep.best_beta if rep.best_beta is not None else beta
            lam = rep.best_lambda if rep.best_lambda is not None else lam
    config = _config(args, beta=beta, lam=lam, dim=dim, theta0=theta0)
    dist = cross_distances(test, train, config, threads=args.threads, seed=args.seed)
    pred = knn_1(dist, list(train.labels))
    out = {
        "method": args.method,
        "params": config.params.to_dict(),
        "predictions": pred,
        "accuracy": accuracy(pred, test.labels),
    }
    if args.grid_search:
        out["selected"] = {"beta": config.params.to_dict()["beta"], "lambda": lam}
        out["grid_search"] = report
    print(json.dumps(out))
    return EXIT_OK


def cmd_synth(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    data = gen_separability_data(args.n, noisy=args.noisy, seed=args.seed, n_points=args.points)
    save_ucr_tsv(data, args.output)
    return EXIT_OK


COMMANDS = {"dist": cmd_dist, "knn": cmd_knn, "synth": cmd_synth}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except MethodError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_METHOD
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
