"""Shared argument handling for the study scripts."""
from __future__ import annotations

import argparse
import logging


def base_parser(description: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--n-train", type=lambda s: [int(v) for v in s.split(",")], default=None,
                   help="comma-separated training sizes")
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--seed-base", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--quick", action="store_true", help="small sizes for a smoke run")
    p.add_argument("--out", default=None, help="CSV output path")
    return p


def setup_logging() -> None:
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(message)s")


def print_table(result, metrics=("rmae", "rel_std_err", "kl_div")) -> None:
    print(f"{result.benchmark} / {result.mode}")
    for metric in metrics:
        for n, (mean, lo, hi) in result.aggregate(metric).items():
            print(f"  {metric:12s} n={n:5d}  mean={mean:.4g}  min={lo:.4g}  max={hi:.4g}")
