#!/usr/bin/env python3
"""Final batch-weight entropy as a function of the entropy penalty.

Trains the adversarial loop on a fixed synthetic problem for each lambda in a
grid, over several seeds, and prints the median final entropy next to log m
(the uniform-weight ceiling). Larger penalties should push the generator's
weights toward uniform.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from advclf.adversarial import TrainConfig, train
from advclf.data import SplitSpec, SynthSpec, split_dataset, standardize, synth_gaussian_imbalanced


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lams", default="0,0.1,1,10", help="comma-separated penalty grid")
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--batch-size", type=int, default=32)
    ap.add_argument("--train-iters", type=int, default=400)
    ap.add_argument("--pretrain-iters", type=int, default=100)
    ap.add_argument("--eta-g", type=float, default=5.0)
    args = ap.parse_args()
    lams = [float(tok) for tok in args.lams.split(",") if tok.strip()]

    data = synth_gaussian_imbalanced(
        SynthSpec(n_total=2000, imbalance_ratio=10.0, dim=2, class_separation=2.0, seed=0)
    )
    train_set, _, _ = split_dataset(data, SplitSpec(seed=0))
    (train_set,), _, _ = standardize(train_set)

    log_m = float(np.log(args.batch_size))
    print(f"log m = {log_m:.5f} at batch size {args.batch_size}\n")
    print(f"{'lambda':>8} {'median final entropy':>22} {'gap to log m':>14}")
    for lam in lams:
        finals = []
        for seed in range(args.seeds):
            config = TrainConfig(
                batch_size=args.batch_size, pretrain_iters=args.pretrain_iters,
                train_iters=args.train_iters, eta_g=args.eta_g, lam=lam, seed=seed,
            )
            _, _, trace = train(config, train_set)
            finals.append(trace.weight_entropy[-1])
        med = float(np.median(finals))
        print(f"{lam:>8g} {med:>22.5f} {log_m - med:>14.5f}")


if __name__ == "__main__":
    main()
