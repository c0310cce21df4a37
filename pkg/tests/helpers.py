"""Shared oracles and utilities for the test suite."""

import numpy as np

from advclf.nn import finite_difference_grad


def grad_rel_error(analytic, numeric):
    """Max absolute difference scaled by the largest gradient magnitude seen."""
    a = np.concatenate([g.ravel() for g in analytic])
    n = np.concatenate([g.ravel() for g in numeric])
    scale = max(np.abs(a).max(), np.abs(n).max(), 1e-12)
    return float(np.abs(a - n).max() / scale)


def flatten_param_grads(grads):
    """[(dW, db), ...] from backward() -> flat list matching finite differences."""
    out = []
    for dw, db in grads:
        out.append(dw)
        out.append(db)
    return out


def auc_pair_count(scores, labels):
    """Brute-force AUC: fraction of (pos, neg) pairs ranked correctly, ties count half."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    total = 0.0
    for p in pos:
        for q in neg:
            if p > q:
                total += 1.0
            elif p == q:
                total += 0.5
    return total / (len(pos) * len(neg))


def check_backward_vs_fd(params, loss_and_grads, epsilon=1e-5):
    """Relative error between backward() gradients and finite differences.

    loss_and_grads(params) must return (loss, grads) where grads is the
    [(dW, db), ...] list from backward(); the finite-difference side
    re-evaluates only the loss.
    """
    _, grads = loss_and_grads(params)
    numeric = finite_difference_grad(lambda p: loss_and_grads(p)[0], params, epsilon=epsilon)
    return grad_rel_error(flatten_param_grads(grads), flatten_param_grads(numeric))
