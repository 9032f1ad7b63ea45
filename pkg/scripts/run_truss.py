"""Truss study: pointwise error of the three modes on the 23-bar truss."""
from __future__ import annotations

from _common import base_parser, print_table, setup_logging

from pceuq import Mode, PceConfig
from pceuq.benchmarks import PceFactory, run_validation, truss_sampler
from pceuq.benchmarks.validation import PROTOCOL_P_RANGE


def main() -> None:
    p = base_parser(__doc__)
    p.add_argument("--modes", default="apce-x,lpce-z,lpce-x")
    args = p.parse_args()
    setup_logging()
    n_train = args.n_train or ([50, 100] if args.quick else [20, 50, 100, 200, 500])
    n_val = 2000 if args.quick else 10**4
    for name in args.modes.split(","):
        mode = Mode.parse(name)
        factory = PceFactory(PceConfig(mode=mode, p_range=PROTOCOL_P_RANGE))
        res = run_validation(factory, truss_sampler, n_train, n_val=n_val, reps=args.reps,
                             seed_base=args.seed_base, benchmark="truss", mode=mode.value, jobs=args.jobs)
        print_table(res, metrics=("rmae",))
        if args.out:
            res.to_csv(args.out.replace(".csv", f"_{res.mode}.csv"))


if __name__ == "__main__":
    main()
