"""Queue-cached incremental generator.

Each layer keeps a FIFO queue of the values it has already consumed from the
layer below (its recurrent states). Producing a sample is then one pop phase
(read the cached tap values, discard the oldest entry per queue), one
bottom-to-top cell evaluation, and one push phase (cache each layer's fresh
input at the back of its queue). Cost per sample is one node per layer,
independent of how many samples came before.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .counters import MacCount
from .kernel import activation_code, eval_nodes
from .model import Model
from .oracle import SampleSequence, scalar_primer


class QueueStateError(RuntimeError):
    """A convolution queue was popped or pushed out of turn."""


class ConvQueue:
    """Fixed-capacity FIFO of past layer-input vectors, ring-buffered.

    Capacity is (filter_width - 1) * dilation. Between steps the queue is
    always full; pop is legal only at capacity and push only when exactly one
    entry short, which makes a missed or doubled phase an immediate error.
    """

    __slots__ = ("_buf", "_start", "_len")

    def __init__(self, capacity: int, channels: int):
        if capacity < 1 or channels < 1:
            raise ValueError("capacity and channels must be positive")
        self._buf = np.zeros((capacity, channels), dtype=np.float64)
        self._start = 0
        self._len = capacity

    @property
    def capacity(self) -> int:
        return self._buf.shape[0]

    @property
    def channels(self) -> int:
        return self._buf.shape[1]

    def __len__(self) -> int:
        return self._len

    def peek(self, index_from_front: int) -> np.ndarray:
        """Copy of the entry index_from_front positions after the oldest."""
        if not 0 <= index_from_front < self._len:
            raise IndexError("queue peek out of range")
        pos = (self._start + index_from_front) % self.capacity
        return self._buf[pos].copy()

    def pop(self) -> np.ndarray:
        """Remove and return the oldest entry; legal only at capacity."""
        if self._len != self.capacity:
            raise QueueStateError(
                "pop on a queue below capacity (missed push?)"
            )
        value = self._buf[self._start].copy()
        self._start = (self._start + 1) % self.capacity
        self._len -= 1
        return value

    def push(self, value: np.ndarray) -> None:
        """Append at the back; legal only when exactly one entry short."""
        if self._len != self.capacity - 1:
            raise QueueStateError(
                "push on a queue at capacity (missed pop?)"
            )
        value = np.asarray(value, dtype=np.float64)
        if value.shape != (self.channels,):
            raise ValueError(
                f"queue entry must have shape ({self.channels},), "
                f"got {value.shape}"
            )
        self._buf[(self._start + self._len) % self.capacity] = value
        self._len += 1


@dataclass(frozen=True)
class RecurrentInputs:
    """Per layer, the w-1 cached past values its taps k = 1..w-1 read."""

    per_layer: tuple[tuple[np.ndarray, ...], ...]


class GenerationState:
    """One generation session: a queue per layer plus the step counter.

    Mutable and single-session: do not share across threads mid-step.
    Independent states over one immutable Model may run in parallel.
    """

    def __init__(self, model: Model):
        config = model.config
        dims = config.channel_dims()
        width = config.filter_width
        self.config = config
        self.queues = tuple(
            ConvQueue(capacity=(width - 1) * d, channels=c_in)
            for d, (c_in, _) in zip(config.dilations(), dims)
        )
        self.step_index = 0
        self.macs_last_step: MacCount | None = None

    def cached_scalar_count(self) -> int:
        """Total float64 scalars held across all queues."""
        return sum(q.capacity * q.channels for q in self.queues)


def init_state(model: Model) -> GenerationState:
    """Fresh session state: every queue filled to capacity with zeros.

    Zero initialization means the cached states agree with causal zero
    padding, so the very first samples already match the oracle.
    """
    return GenerationState(model)


def pop_phase(state: GenerationState) -> RecurrentInputs:
    """Read each layer's w-1 tap values and discard each queue's oldest entry.

    For tap k the value sits (w-1-k)*dilation entries after the front, so for
    w=2 the single value is exactly the popped front. Raises QueueStateError
    if any queue is not at capacity.
    """
    for q in state.queues:
        if len(q) != q.capacity:
            raise QueueStateError("pop phase on a queue below capacity")
    width = state.config.filter_width
    per_layer = []
    for q, d in zip(state.queues, state.config.dilations()):
        rec = tuple(q.peek((width - 1 - k) * d) for k in range(1, width))
        q.pop()
        per_layer.append(rec)
    return RecurrentInputs(per_layer=tuple(per_layer))


@lru_cache(maxsize=None)
def _tap_gather(width: int) -> np.ndarray:
    g = np.arange(width, dtype=np.int64).reshape(1, width)
    g.setflags(write=False)
    return g


def compute_step(
    model: Model, input: float, rec: RecurrentInputs
) -> tuple[float, list[np.ndarray], MacCount]:
    """One bottom-to-top cell evaluation, like a single step of a deep RNN.

    Layer l sees its fresh input (the layer below's output just computed; the
    raw sample for layer 0) at tap 0 and the cached values in rec at the
    other taps. Returns the output sample, the per-layer fresh inputs to be
    cached for future steps, and the exact cost.
    """
    config = model.config
    if len(rec.per_layer) != config.total_layers:
        raise ValueError(
            f"recurrent inputs cover {len(rec.per_layer)} layers, "
            f"model has {config.total_layers}"
        )
    act = activation_code(config.activation)
    width = config.filter_width
    gather = _tap_gather(width)

    h = np.array([float(input)], dtype=np.float64)
    new_states: list[np.ndarray] = []
    macs = 0
    for layer, layer_rec in zip(model.layers, rec.per_layer):
        if len(layer_rec) != width - 1:
            raise ValueError("recurrent inputs must hold w-1 values per layer")
        c_in = layer.in_channels
        if h.shape != (c_in,):
            raise ValueError("recurrent input channel mismatch")
        prev = np.empty((width, c_in), dtype=np.float64)
        prev[0] = h
        for k in range(1, width):
            if layer_rec[k - 1].shape != (c_in,):
                raise ValueError("recurrent input channel mismatch")
            prev[k] = layer_rec[k - 1]
        new_states.append(h)
        out = np.empty((1, layer.out_channels), dtype=np.float64)
        eval_nodes(layer.taps, layer.bias, act, prev, gather, out)
        h = out[0]
        macs += width * c_in * layer.out_channels
    return float(h[0]), new_states, MacCount(macs, config.total_layers)


def push_phase(state: GenerationState, new_states: Sequence[np.ndarray]) -> None:
    """Cache each layer's fresh input at the back of its queue.

    Raises QueueStateError if a queue is already at capacity (pop phase did
    not run). Increments the step counter.
    """
    if len(new_states) != len(state.queues):
        raise ValueError("one new state per layer required")
    for q in state.queues:
        if len(q) != q.capacity - 1:
            raise QueueStateError("push phase on a queue not one short of capacity")
    for q, value in zip(state.queues, new_states):
        q.push(value)
    state.step_index += 1


def fast_step(state: GenerationState, input: float, model: Model) -> float:
    """Pop phase, cell evaluation, push phase; returns the output sample."""
    if state.config is not model.config and state.config != model.config:
        raise ValueError("state was initialized for a different architecture")
    rec = pop_phase(state)
    sample, new_states, macs = compute_step(model, input, rec)
    push_phase(state, new_states)
    state.macs_last_step = macs
    return sample


def fast_generate(
    model: Model, primer: SampleSequence | Sequence[float], steps: int
) -> SampleSequence:
    """Free-run with queue caching; bit-identical to naive_generate.

    The primer is fed through the ordinary step machinery (outputs discarded
    except the last primer position's, which is the first generated sample),
    then each output is fed back as the next input. An empty primer is
    treated as the single sample [0.0].
    """
    if steps < 0:
        raise ValueError("steps must be non-negative")
    seed = scalar_primer(primer)
    start = seed.shape[0]
    if steps == 0:
        return SampleSequence.from_scalars([], start_index=start)
    state = init_state(model)
    for x in seed[:-1]:
        fast_step(state, x, model)
    out = np.empty(steps, dtype=np.float64)
    sample = fast_step(state, seed[-1], model)
    out[0] = sample
    for i in range(1, steps):
        sample = fast_step(state, sample, model)
        out[i] = sample
    return SampleSequence.from_scalars(out, start_index=start)
