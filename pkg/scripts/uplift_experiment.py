#!/usr/bin/env python3
"""Paired-seed comparison of adversarial training against the plain baseline.

For each seed, draws an imbalanced Gaussian problem, trains the adversarially
re-weighted model and the pretraining-only baseline on identical batch
streams, and reports per-seed test AUC plus the win count and median uplift.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from advclf.adversarial import TrainConfig, predict, train, train_pretrain_only
from advclf.data import SplitSpec, SynthSpec, split_dataset, standardize, synth_gaussian_imbalanced
from advclf.metrics import evaluate_binary


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=5000)
    ap.add_argument("--ir", type=float, default=50.0)
    ap.add_argument("--dim", type=int, default=2)
    ap.add_argument("--sep", type=float, default=2.0)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--batch-size", type=int, default=64)
    ap.add_argument("--pretrain-iters", type=int, default=200)
    ap.add_argument("--train-iters", type=int, default=500)
    ap.add_argument("--eta-d", type=float, default=0.05)
    ap.add_argument("--eta-g", type=float, default=0.05)
    ap.add_argument("--gamma", type=float, default=None)
    ap.add_argument("--lam", type=float, default=0.1)
    args = ap.parse_args()

    uplifts = []
    wins = 0
    print(f"{'seed':>4} {'adversarial':>12} {'baseline':>12} {'uplift':>10}")
    for seed in range(args.seeds):
        spec = SynthSpec(
            n_total=args.n, imbalance_ratio=args.ir, dim=args.dim,
            class_separation=args.sep, seed=seed,
        )
        data = synth_gaussian_imbalanced(spec)
        train_set, val_set, test_set = split_dataset(data, SplitSpec(seed=seed))
        (train_set, val_set, test_set), _, _ = standardize(train_set, val_set, test_set)
        config = TrainConfig(
            batch_size=args.batch_size, pretrain_iters=args.pretrain_iters,
            train_iters=args.train_iters, eta_d=args.eta_d, eta_g=args.eta_g,
            gamma=args.gamma, lam=args.lam, seed=seed,
        )
        adv, _, _ = train(config, train_set)
        base, _ = train_pretrain_only(config, train_set)
        auc_adv = evaluate_binary(predict(adv, test_set.features), test_set.labels).auc
        auc_base = evaluate_binary(predict(base, test_set.features), test_set.labels).auc
        uplift = auc_adv - auc_base
        uplifts.append(uplift)
        wins += auc_adv >= auc_base
        print(f"{seed:>4} {auc_adv:>12.5f} {auc_base:>12.5f} {uplift:>+10.5f}")
    print(f"\nwins: {wins}/{args.seeds}   median uplift: {np.median(uplifts):+.6f}")


if __name__ == "__main__":
    main()
