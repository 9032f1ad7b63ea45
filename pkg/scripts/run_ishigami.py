"""Ishigami study: pointwise error, moment errors and KL for all three modes."""
from __future__ import annotations

from _common import base_parser, print_table, setup_logging

from pceuq import Mode, PceConfig
from pceuq.benchmarks import PceFactory, ishigami_sampler, reference_statistics, run_validation
from pceuq.benchmarks.validation import PROTOCOL_P_RANGE


def main() -> None:
    p = base_parser(__doc__)
    p.add_argument("--modes", default="apce-x,lpce-z,lpce-x")
    args = p.parse_args()
    setup_logging()
    n_train = args.n_train or ([50, 100] if args.quick else [10, 20, 50, 100, 200, 500, 1000])
    n_ref, n_res, n_val = (10**5, 10**4, 2000) if args.quick else (10**6, 10**5, 10**4)
    ref = reference_statistics(ishigami_sampler, n_ref)
    results = []
    for name in args.modes.split(","):
        mode = Mode.parse(name)
        factory = PceFactory(PceConfig(mode=mode, p_range=PROTOCOL_P_RANGE))
        res = run_validation(factory, ishigami_sampler, n_train, n_val=n_val, reps=args.reps,
                             seed_base=args.seed_base, reference=ref, n_resample=n_res,
                             benchmark="ishigami", mode=mode.value, jobs=args.jobs)
        print_table(res)
        results.append(res)
    if args.out:
        for i, res in enumerate(results):
            res.to_csv(args.out if len(results) == 1 else args.out.replace(".csv", f"_{res.mode}.csv"))


if __name__ == "__main__":
    main()
