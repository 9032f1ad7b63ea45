"""Noisy-output study on Ishigami: the PCE denoises the training data, so its
std estimate beats the raw sample std of the noisy outputs."""
from __future__ import annotations

import numpy as np
from _common import base_parser, print_table, setup_logging

from pceuq import PceConfig
from pceuq.benchmarks import NoiseSpec, PceFactory, ishigami_sampler, reference_statistics, run_validation
from pceuq.benchmarks.validation import PROTOCOL_P_RANGE


def main() -> None:
    p = base_parser(__doc__)
    p.add_argument("--noise-ratio", type=float, default=1.22, help="noise std / true output std")
    args = p.parse_args()
    setup_logging()
    n_train = args.n_train or ([100, 500] if args.quick else [100, 200, 500, 1000])
    n_ref, n_res = (10**5, 10**4) if args.quick else (10**6, 10**5)
    ref = reference_statistics(ishigami_sampler, n_ref)
    noise = NoiseSpec(args.noise_ratio * ref.std, seed=77)
    res = run_validation(PceFactory(PceConfig(p_range=PROTOCOL_P_RANGE)), ishigami_sampler, n_train,
                         reps=args.reps, noise=noise, seed_base=args.seed_base, reference=ref,
                         n_resample=n_res, benchmark="ishigami", mode="apce-x+noise", jobs=args.jobs)
    print_table(res, metrics=("rmae", "rel_std_err"))
    for n in n_train:
        s = [abs(c.sample_std_err) for c in res.cells if c.n_train == n and c.sample_std_err is not None]
        print(f"  sample std err n={n:5d}  mean={np.mean(s):.4g}")
    if args.out:
        res.to_csv(args.out)


if __name__ == "__main__":
    main()
