"""Cost counters shared by the generators and the benchmark harness."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class MacCount:
    """Exact cost of producing one sample.

    ``multiply_accumulates`` charges ``filter_width * in_channels *
    out_channels`` per evaluated node, counting taps that read the
    zero-padded region as if performed, so the number depends only on the
    architecture and the generation mode, never on weight values.
    ``node_evaluations`` is the number of convolution nodes evaluated.
    """

    multiply_accumulates: int
    node_evaluations: int

    def __post_init__(self) -> None:
        if self.multiply_accumulates < 0 or self.node_evaluations < 0:
            raise ValueError("counts must be non-negative")

    def __add__(self, other: "MacCount") -> "MacCount":
        return MacCount(
            self.multiply_accumulates + other.multiply_accumulates,
            self.node_evaluations + other.node_evaluations,
        )
