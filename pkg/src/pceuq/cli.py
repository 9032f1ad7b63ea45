"""Command-line interface: ``pceuq {fit,predict,stats,benchmark,copula-fit}``.

Exit codes: 0 success, 2 usage or input error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys

import numpy as np

from .benchmarks.validation import (
    PROTOCOL_P_RANGE,
    NoiseSpec,
    PceFactory,
    get_benchmark,
    reference_statistics,
    run_validation,
)
from .copula.vine import fit_cvine
from .errors import InputError, NumericalError, SchemaMismatch
from .marginals import fit_kde, pit
from .pce import PceConfig, PceModel, fit, resample_statistics

log = logging.getLogger("pceuq")

PDF_POINTS = 512
DEFAULT_SWEEP = (10, 20, 50, 100, 200, 500, 1000)
EXIT_INPUT, EXIT_NUMERIC = 2, 3


# --------------------------------------------------------------------- I/O

def read_csv(path) -> tuple[list[str], np.ndarray]:
    """Header row + numeric body; '.' decimals, malformed rows are errors."""
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot open {path}: {exc.strerror}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise InputError(f"{path} is empty; a header row is required") from None
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise InputError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                raise InputError(f"{path}:{lineno}: non-numeric field") from None
    data = np.asarray(rows, dtype=float).reshape(-1, len(header))
    if not np.all(np.isfinite(data)):
        raise InputError(f"{path} contains non-finite values")
    return header, data


def write_csv(path, header, data) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in np.atleast_2d(data) if len(data) else []:
            w.writerow([repr(float(v)) for v in row])


def _split_target(header, data, target):
    col = len(header) - 1 if target is None else header.index(target) if target in header else None
    if col is None:
        raise InputError(f"target column {target!r} not found")
    X = np.delete(data, col, axis=1)
    return X, data[:, col], [h for i, h in enumerate(header) if i != col]


def _int_range(text: str) -> tuple[int, ...]:
    """'1:6' -> 1..6, '2,4,5' -> (2, 4, 5)."""
    try:
        if ":" in text:
            a, b = text.split(":")
            return tuple(range(int(a), int(b) + 1))
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer range {text!r}") from None


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("PCEUQ_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise InputError(f"PCEUQ_SEED must be an integer, got {env!r}") from None


def _dump_json(obj, path) -> None:
    if path in (None, "-"):
        json.dump(obj, sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(obj, fh, indent=2)


# ---------------------------------------------------------------- commands

def cmd_fit(args) -> int:
    header, data = read_csv(args.data)
    if data.shape[1] < 2:
        raise InputError("training CSV needs at least 2 columns")
    X, y, names = _split_target(header, data, args.target)
    cfg = PceConfig(mode=args.mode, p_range=args.p_range, r_range=args.r_range, q=args.q,
                    fit_copula=not args.no_copula, seed=_seed(args))
    model = fit(X, y, cfg)
    model.metadata["input_names"] = names
    model.save(args.out)
    md = model.metadata
    print(f"mode={model.mode.value} p={md['p']} r={md['r']} q={md['q']} loo={md['loo']:.6e} "
          f"basis={md['n_terms']} nonzero={md['n_nonzero']} -> {args.out}")
    return 0


def cmd_predict(args) -> int:
    model = PceModel.load(args.model)
    header, data = read_csv(args.data)
    if data.shape[1] != model.d:
        raise SchemaMismatch(f"model expects {model.d} input columns, CSV has {data.shape[1]}")
    pred = model.predict(data) if data.shape[0] else np.empty(0)
    out = np.column_stack([data, pred]) if data.shape[0] else np.empty((0, model.d + 1))
    write_csv(args.out, header + ["y_pred"], out)
    frac = model.out_of_hull_fraction(data)
    print(f"predicted {data.shape[0]} rows; out-of-hull fraction {frac:.4f} -> {args.out}")
    return 0


def stats_record(model: PceModel, n_resample: int, sampler: str, seed: int) -> dict:
    st = resample_statistics(model, n_resample, sampler, seed)
    if st.pdf_estimate is None:
        grid = np.linspace(st.mean - 1.0, st.mean + 1.0, PDF_POINTS)
        dens = np.zeros(PDF_POINTS)
        dens[PDF_POINTS // 2] = 1.0 / (grid[1] - grid[0])
        grid[PDF_POINTS // 2] = st.mean
    else:
        grid, dens = st.pdf_on_grid(PDF_POINTS)
    return {"mean": st.mean, "std": st.std, "pdf": {"grid": grid.tolist(), "density": dens.tolist()},
            "n_resample": st.n_resample, "sampler": st.sampler}


def cmd_stats(args) -> int:
    model = PceModel.load(args.model)
    rec = stats_record(model, args.n_resample, args.sampler, _seed(args))
    _dump_json(rec, args.out)
    if args.out not in (None, "-"):
        print(f"mean={rec['mean']:.6g} std={rec['std']:.6g} ({rec['sampler']}, n={rec['n_resample']}) -> {args.out}")
    return 0


def cmd_benchmark(args) -> int:
    sampler, _ = get_benchmark(args.name)
    n_train = args.n_train or DEFAULT_SWEEP
    n_val = args.n_val if args.n_val is not None else (1000 if args.quick else 10_000)
    n_ref = args.n_ref if args.n_ref is not None else (10**5 if args.quick else 10**6)
    n_resample = args.n_resample if args.n_resample is not None else (10**4 if args.quick else 10**5)
    seed = _seed(args)
    reference = None if args.no_stats else reference_statistics(sampler, n_ref, seed + 10**6)
    noise = None
    if args.noise_sigma is not None:
        noise = NoiseSpec(args.noise_sigma, seed + 2 * 10**6)
    cfg = PceConfig(mode=args.mode, p_range=args.p_range or PROTOCOL_P_RANGE, r_range=args.r_range,
                    fit_copula=not args.no_stats, seed=seed)
    jobs = args.jobs or os.cpu_count() or 1
    res = run_validation(PceFactory(cfg), sampler, n_train, n_val=n_val, reps=args.reps, noise=noise,
                         seed_base=seed, reference=reference, n_resample=n_resample,
                         benchmark=args.name, mode=cfg.mode.value, jobs=jobs)
    res.to_csv(args.out)
    for n, (mean, lo, hi) in res.aggregate("rmae").items():
        print(f"n_train={n:6d} rMAE mean={mean:.3e} min={lo:.3e} max={hi:.3e}")
    failed = sum(c.report is None for c in res.cells)
    if failed:
        print(f"{failed} cell(s) failed; see log", file=sys.stderr)
    print(f"-> {args.out}")
    return 0


def cmd_copula_fit(args) -> int:
    header, data = read_csv(args.data)
    if args.target is not None:
        data, _, header = _split_target(header, data, args.target)
    if data.shape[1] < 2:
        raise InputError("copula fitting needs at least 2 columns")
    marginals = [fit_kde(data[:, i]) for i in range(data.shape[1])]
    U = pit(marginals, data)
    vine = fit_cvine(U)
    ll = vine.loglik(U)
    for rec in vine.summary():
        given = ",".join(header[g] for g in rec["given"])
        pair = f"{header[rec['root']]},{header[rec['var']]}" + (f"|{given}" if given else "")
        print(f"tree {rec['tree']}  {pair:<24} {rec['family']:<12} rot={rec['rotation']:<3} "
              f"params={[round(p, 4) for p in rec['params']]} tau={rec['tau']:.4f}")
    print(f"log-likelihood {ll:.4f}")
    out = vine.to_dict()
    out["columns"] = header
    out["loglik"] = ll
    _dump_json(out, args.out)
    return 0


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pceuq", description="Data-driven sparse PCE with vine-copula input models")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    def seed_arg(sp):
        sp.add_argument("--seed", type=int, default=None, help="random seed (fallback: $PCEUQ_SEED, then 0)")

    f = sub.add_parser("fit", help="fit a PCE model on a CSV table")
    f.add_argument("--data", required=True)
    f.add_argument("--target", default=None, help="response column (default: last)")
    f.add_argument("--mode", default="apce-x", help="apce-x | lpce-z | lpce-x")
    f.add_argument("--p-range", type=_int_range, default=None, help="e.g. 1:10")
    f.add_argument("--r-range", type=_int_range, default=None, help="e.g. 1:3")
    f.add_argument("--q", type=float, default=0.75)
    f.add_argument("--no-copula", action="store_true", help="skip the input copula (aPCEonX/lPCEonX)")
    f.add_argument("--out", default="model.json")
    seed_arg(f)
    f.set_defaults(func=cmd_fit)

    pr = sub.add_parser("predict", help="evaluate a fitted model on input rows")
    pr.add_argument("--model", required=True)
    pr.add_argument("--data", required=True)
    pr.add_argument("--out", default="predictions.csv")
    pr.set_defaults(func=cmd_predict)

    s = sub.add_parser("stats", help="output statistics by resampling the input model")
    s.add_argument("--model", required=True)
    s.add_argument("--n-resample", type=int, default=10**6)
    s.add_argument("--sampler", choices=("sobol", "pseudo_random"), default="sobol")
    s.add_argument("--out", default="-")
    seed_arg(s)
    s.set_defaults(func=cmd_stats)

    b = sub.add_parser("benchmark", help="run the validation protocol on a synthetic benchmark")
    b.add_argument("name", help="ishigami | truss")
    b.add_argument("--mode", default="apce-x")
    b.add_argument("--n-train", type=_int_range, default=None, help="e.g. 10,100,1000")
    b.add_argument("--reps", type=int, default=10)
    b.add_argument("--n-val", type=int, default=None)
    b.add_argument("--n-ref", type=int, default=None, help="reference sample size for statistics")
    b.add_argument("--n-resample", type=int, default=None)
    b.add_argument("--noise-sigma", type=float, default=None)
    b.add_argument("--p-range", type=_int_range, default=None)
    b.add_argument("--r-range", type=_int_range, default=None)
    b.add_argument("--no-stats", action="store_true", help="pointwise errors only")
    b.add_argument("--quick", action="store_true", help="smaller validation/reference/resampling sizes")
    b.add_argument("--jobs", type=int, default=None)
    b.add_argument("--out", default="benchmark.csv")
    seed_arg(b)
    b.set_defaults(func=cmd_benchmark)

    c = sub.add_parser("copula-fit", help="fit KDE marginals and a C-vine to CSV columns")
    c.add_argument("--data", required=True)
    c.add_argument("--target", default=None, help="column to exclude (e.g. the response)")
    c.add_argument("--out", default="-")
    c.set_defaults(func=cmd_copula_fit)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
