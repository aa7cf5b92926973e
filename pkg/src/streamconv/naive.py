"""Cache-free baseline generator.

Every sample recomputes, from raw history alone, exactly the nodes its value
depends on: starting from the output node, each layer demands the layer
below at the tap-aligned times, deduplicated within the step. Nothing
persists between steps, so per-sample cost is exponential in depth for the
default width-2, base-2 stack.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence, Union

import numpy as np

from .counters import MacCount
from .kernel import activation_code, eval_nodes
from .model import Model, ModelConfig
from .oracle import SampleSequence, scalar_primer

# The generated-or-consumed scalar samples so far, oldest first. Append-only
# by convention; naive_step never mutates it.
History = Union[Sequence[float], np.ndarray]


@lru_cache(maxsize=None)
def _demand_plan(config: ModelConfig):
    """Static dependency structure of one generation step.

    For each layer, the sorted back-offsets (in samples) of the nodes the
    output demands, plus, per node and tap, the row index of the value it
    reads in the layer below's offset array. The plan depends only on the
    architecture, so it is computed once per config.
    """
    dilations = config.dilations()
    n_layers = config.total_layers
    w = config.filter_width

    demanded: list[np.ndarray] = [np.empty(0, dtype=np.int64)] * n_layers
    need = {0}
    for l in reversed(range(n_layers)):
        demanded[l] = np.array(sorted(need), dtype=np.int64)
        need = {o + k * dilations[l] for o in need for k in range(w)}
    input_offsets = np.array(sorted(need), dtype=np.int64)

    gather: list[np.ndarray] = []
    for l in range(n_layers):
        below = input_offsets if l == 0 else demanded[l - 1]
        position = {int(o): i for i, o in enumerate(below)}
        g = np.empty((len(demanded[l]), w), dtype=np.int64)
        for i, o in enumerate(demanded[l]):
            for k in range(w):
                g[i, k] = position[int(o) + k * dilations[l]]
        g.setflags(write=False)
        gather.append(g)

    for arr in demanded:
        arr.setflags(write=False)
    input_offsets.setflags(write=False)
    return tuple(demanded), input_offsets, tuple(gather)


def naive_step(model: Model, history: History) -> tuple[float, MacCount]:
    """Produce the sample that extends history by one, plus its exact cost.

    The returned value fills history slot len(history): it is the top node
    aligned with the last known sample, identical (bit-exact) to
    forward_full(model, history)'s final element. Samples before time zero
    read as zeros at every layer, and an empty history behaves like the
    single sample [0.0]. Demanded nodes that fall before time zero are zeros
    by causal padding and are neither evaluated nor counted, so the counters
    ramp up until history reaches the receptive field and are constant after.
    """
    hist = np.asarray(history, dtype=np.float64)
    if hist.ndim != 1:
        raise ValueError("history must be a 1-D scalar sequence")
    if hist.shape[0] == 0:
        hist = np.zeros(1, dtype=np.float64)
    t = hist.shape[0] - 1

    config = model.config
    demanded, input_offsets, gather = _demand_plan(config)
    act = activation_code(config.activation)
    w = config.filter_width

    n_in = int(np.searchsorted(input_offsets, t, side="right"))
    prev = hist[t - input_offsets[:n_in]].reshape(-1, 1)
    n_below = n_in
    full_below = len(input_offsets)

    macs = 0
    evals = 0
    for l, layer in enumerate(model.layers):
        offsets = demanded[l]
        m = int(np.searchsorted(offsets, t, side="right"))
        if m == len(offsets) and n_below == full_below:
            g = gather[l]
        else:
            # Reads landing before time zero are causal-padding zeros.
            g = np.where(gather[l][:m] < n_below, gather[l][:m], np.int64(-1))
        out = np.empty((m, layer.out_channels), dtype=np.float64)
        eval_nodes(layer.taps, layer.bias, act, prev, g, out)
        evals += m
        macs += m * w * layer.in_channels * layer.out_channels
        prev = out
        n_below = m
        full_below = len(offsets)

    return float(prev[0, 0]), MacCount(macs, evals)


def naive_generate(
    model: Model, primer: SampleSequence | Sequence[float], steps: int
) -> SampleSequence:
    """Free-run: seed history with the primer, then feed each output back.

    Returns the generated samples only. The first generated sample is the one
    aligned with the last primer sample; an empty primer is treated as the
    single sample [0.0] so that free-running from nothing is well defined.
    """
    if steps < 0:
        raise ValueError("steps must be non-negative")
    seed = scalar_primer(primer)
    n0 = seed.shape[0]
    buf = np.empty(n0 + steps, dtype=np.float64)
    buf[:n0] = seed
    for i in range(steps):
        sample, _ = naive_step(model, buf[: n0 + i])
        buf[n0 + i] = sample
    return SampleSequence.from_scalars(buf[n0:], start_index=n0)
