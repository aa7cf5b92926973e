"""Full-sequence dilated causal convolution, parallel in time.

This is the training-style evaluation: every timestep of every layer is
computed over the whole input at once. It is deliberately plain (one kernel
call per layer, no transform tricks) so it can serve as the auditable ground
truth for both generators.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .kernel import activation_code, eval_nodes
from .model import LayerWeights, Model


@dataclass(frozen=True, eq=False)
class SampleSequence:
    """A finite stretch of channel-vector samples.

    values has shape (timesteps, channels); start_index records where the
    stretch sits on the overall sample timeline (0 for sequences that begin
    at time zero).
    """

    values: np.ndarray
    start_index: int = 0

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=np.float64, copy=True)
        if arr.ndim != 2:
            raise ValueError("values must have shape (timesteps, channels)")
        if not np.isfinite(arr).all():
            raise ValueError("sample values must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @classmethod
    def from_scalars(
        cls, samples: Iterable[float], start_index: int = 0
    ) -> "SampleSequence":
        if not isinstance(samples, np.ndarray):
            samples = np.asarray(list(samples), dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError("scalar samples must be 1-D")
        return cls(values=samples.reshape(-1, 1), start_index=start_index)

    def scalars(self) -> np.ndarray:
        """The samples as a 1-D array; only defined for scalar sequences."""
        if self.channels != 1:
            raise ValueError("sequence is not scalar-channel")
        return self.values[:, 0]

    @property
    def channels(self) -> int:
        return self.values.shape[1]

    def __len__(self) -> int:
        return self.values.shape[0]


def scalar_primer(primer: "SampleSequence | Sequence[float]") -> np.ndarray:
    """Normalize a primer to a 1-D float64 array; empty becomes [0.0].

    Free-running from nothing needs a first input, and a missing sample is a
    zero, so both generators seed an empty primer with one zero sample.
    """
    if isinstance(primer, SampleSequence):
        seed = primer.scalars()
    else:
        seed = np.asarray(primer, dtype=np.float64)
        if seed.ndim != 1:
            raise ValueError("primer must be a 1-D scalar sequence")
        if not np.isfinite(seed).all():
            raise ValueError("primer samples must be finite")
    if seed.shape[0] == 0:
        seed = np.zeros(1, dtype=np.float64)
    return seed


def causal_dilated_conv(
    inputs: SampleSequence,
    weights: LayerWeights,
    dilation: int,
    activation: str = "linear",
) -> SampleSequence:
    """One layer over a whole sequence.

    output[t] = activation(bias + sum_k taps[k] @ input[t - k*dilation]),
    reading the zero vector wherever t - k*dilation < 0. Output length equals
    input length.
    """
    if dilation < 1:
        raise ValueError("dilation must be a positive integer")
    if inputs.channels != weights.in_channels:
        raise ValueError(
            f"input has {inputs.channels} channels, layer expects "
            f"{weights.in_channels}"
        )
    act = activation_code(activation)
    n = len(inputs)
    gather = (
        np.arange(n, dtype=np.int64)[:, None]
        - dilation * np.arange(weights.filter_width, dtype=np.int64)[None, :]
    )
    gather[gather < 0] = -1
    out = np.empty((n, weights.out_channels), dtype=np.float64)
    eval_nodes(weights.taps, weights.bias, act, inputs.values, gather, out)
    return SampleSequence(values=out, start_index=inputs.start_index)


def forward_full(model: Model, inputs: SampleSequence) -> SampleSequence:
    """The whole stack over a whole scalar sequence, bottom to top."""
    if inputs.channels != 1:
        raise ValueError("model input must be scalar-channel")
    seq = inputs
    activation = model.config.activation
    for layer, dilation in zip(model.layers, model.config.dilations()):
        seq = causal_dilated_conv(seq, layer, dilation, activation)
    return seq
