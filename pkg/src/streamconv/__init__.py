"""Streaming generation for stacks of dilated causal convolutions.

Two ways to produce the next sample from the same network: recompute the
full dependency tree from raw history (cost exponential in depth), or cache
each layer's past inputs in per-layer FIFO queues and evaluate one node per
layer (cost linear in depth). Both share one convolution kernel and are
bit-identical in float64, verified against a full-sequence oracle.
"""

from .bench import (
    CSV_COLUMNS,
    MODES,
    TimingRecord,
    count_macs,
    default_grid,
    emit_records,
    read_records,
    run_benchmark,
)
from .counters import MacCount
from .fast import (
    ConvQueue,
    GenerationState,
    QueueStateError,
    RecurrentInputs,
    compute_step,
    fast_generate,
    fast_step,
    init_state,
    pop_phase,
    push_phase,
)
from .model import (
    ACTIVATIONS,
    LayerWeights,
    Model,
    ModelConfig,
    ModelFormatError,
    build_model,
    load_model,
    model_from_text,
    model_to_text,
    receptive_field,
    save_model,
)
from .naive import naive_generate, naive_step
from .oracle import SampleSequence, causal_dilated_conv, forward_full

__version__ = "0.1.0"

__all__ = [
    "ACTIVATIONS",
    "CSV_COLUMNS",
    "ConvQueue",
    "GenerationState",
    "LayerWeights",
    "MODES",
    "MacCount",
    "Model",
    "ModelConfig",
    "ModelFormatError",
    "QueueStateError",
    "RecurrentInputs",
    "SampleSequence",
    "TimingRecord",
    "build_model",
    "causal_dilated_conv",
    "compute_step",
    "count_macs",
    "default_grid",
    "emit_records",
    "fast_generate",
    "fast_step",
    "forward_full",
    "init_state",
    "load_model",
    "model_from_text",
    "model_to_text",
    "naive_generate",
    "naive_step",
    "pop_phase",
    "push_phase",
    "read_records",
    "receptive_field",
    "run_benchmark",
    "save_model",
]
