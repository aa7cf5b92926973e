"""The single convolution-node kernel every computation path shares.

All three ways of evaluating the network (full-sequence oracle, cache-free
per-sample recomputation, queue-cached incremental stepping) funnel through
``eval_nodes``. A scalar loop with a pinned accumulation order (taps in
ascending k, input channels ascending, then bias, then activation) makes the
paths bit-identical in float64 regardless of how many nodes a call batches,
which BLAS-backed matvecs would not guarantee.
"""

from __future__ import annotations

import math

from numba import njit

ACT_LINEAR = 0
ACT_TANH = 1

_ACT_CODES = {"linear": ACT_LINEAR, "tanh": ACT_TANH}


def activation_code(name: str) -> int:
    try:
        return _ACT_CODES[name]
    except KeyError:
        raise ValueError(f"unknown activation {name!r}") from None


@njit(cache=True)
def eval_nodes(taps, bias, act_code, prev, gather, out):
    """Evaluate a batch of convolution nodes in place.

    taps    (w, out_ch, in_ch) filter matrices, k = 0 is the current time.
    bias    (out_ch,)
    prev    (n_rows, in_ch) source vectors the taps read from.
    gather  (n_nodes, w) int64 row indices into prev; -1 is the causal
            zero-padding vector.
    out     (n_nodes, out_ch), written in place.
    """
    n_nodes = gather.shape[0]
    w = taps.shape[0]
    out_ch = taps.shape[1]
    in_ch = taps.shape[2]
    for i in range(n_nodes):
        for o in range(out_ch):
            acc = 0.0
            for k in range(w):
                j = gather[i, k]
                if j >= 0:
                    for c in range(in_ch):
                        acc += taps[k, o, c] * prev[j, c]
            acc += bias[o]
            if act_code == ACT_TANH:
                acc = math.tanh(acc)
            out[i, o] = acc
