"""Exact cost accounting and the wall-clock timing harness.

Counting is architectural (weight values never matter): the fast path
evaluates one node per layer per sample, the naive path evaluates its
deduplicated dependency set. Timing measures steady-state cost: the naive
history is pre-filled to the receptive field (costs nothing, it is just an
array), and the fast path's per-step cost is constant from step one by
construction, so neither mode's numbers are diluted by warm-up.
"""

from __future__ import annotations

import csv
import sys
import time
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .counters import MacCount
from .fast import fast_step, init_state
from .model import Model, ModelConfig, build_model, receptive_field
from .naive import _demand_plan, naive_step

MODES = ("fast", "naive")


def count_macs(config: ModelConfig, mode: str) -> MacCount:
    """Per-sample cost of one generation step at steady state.

    fast: one node per layer. naive: the deduplicated dependency set of one
    output sample, with history at least the receptive field deep. Matches
    the live counters reported by fast_step and naive_step exactly.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    w = config.filter_width
    dims = config.channel_dims()
    if mode == "fast":
        macs = sum(w * c_in * c_out for c_in, c_out in dims)
        return MacCount(macs, config.total_layers)
    demanded, _, _ = _demand_plan(config)
    macs = sum(
        len(offs) * w * c_in * c_out
        for offs, (c_in, c_out) in zip(demanded, dims)
    )
    return MacCount(macs, sum(len(offs) for offs in demanded))


@dataclass(frozen=True)
class TimingRecord:
    """One config x mode timing result; field order mirrors the CSV columns."""

    mode: str
    blocks: int
    layers: int
    filter_width: int
    dilation_base: int
    channels: int
    steps: int
    repeats: int
    mean_s_per_sample: float
    std_s_per_sample: float
    macs_per_step: int
    node_evals_per_step: int


CSV_COLUMNS = tuple(f.name for f in fields(TimingRecord))


def default_grid(
    layers_from: int = 1,
    layers_to: int = 10,
    blocks: int = 2,
    filter_width: int = 2,
    dilation_base: int = 2,
    channels: int = 16,
    activation: str = "tanh",
    init_seed: int = 2016,
) -> list[ModelConfig]:
    """The layer sweep the timing experiment runs by default."""
    if layers_from < 1 or layers_to < layers_from:
        raise ValueError("need 1 <= layers_from <= layers_to")
    return [
        ModelConfig(
            blocks=blocks,
            layers_per_block=layers,
            filter_width=filter_width,
            dilation_base=dilation_base,
            hidden_channels=channels,
            activation=activation,
            init_seed=init_seed + layers,
        )
        for layers in range(layers_from, layers_to + 1)
    ]


def _timed_run_fast(model: Model, steps: int) -> float:
    state = init_state(model)
    sample = 0.0
    t0 = time.perf_counter()
    for _ in range(steps):
        sample = fast_step(state, sample, model)
    return time.perf_counter() - t0


def _timed_run_naive(model: Model, steps: int) -> float:
    # Steady state: history primed to the receptive field with zeros. Only
    # the generated samples are timed; priming is a plain array fill.
    primed = receptive_field(model.config)
    buf = np.zeros(primed + steps, dtype=np.float64)
    t0 = time.perf_counter()
    for i in range(steps):
        buf[primed + i], _ = naive_step(model, buf[: primed + i])
    return time.perf_counter() - t0


_RUNNERS = {"fast": _timed_run_fast, "naive": _timed_run_naive}


def run_benchmark(
    config_grid: Iterable[ModelConfig],
    steps: int,
    repeats: int,
    warmup: int = 3,
    modes: Sequence[str] = MODES,
    time_budget_s: float | None = None,
) -> list[TimingRecord]:
    """Time free-runs of `steps` samples for every config x mode, serially.

    Each repeat is an independent run measured with a monotonic clock; mean
    and std are taken over the per-repeat per-sample times. A config x mode
    whose projected cost exceeds time_budget_s is skipped with a warning, and
    a budget hit mid-config records the repeats actually completed.
    """
    if steps < 1:
        raise ValueError("steps must be at least 1")
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    if warmup < 0:
        raise ValueError("warmup must be non-negative")
    records = []
    for config in config_grid:
        model = build_model(config)
        for mode in modes:
            runner = _RUNNERS[mode]
            budget_left = time_budget_s
            # A budget needs at least one probe run to project from; the
            # projection uses the last warmup so one-time JIT dispatch cost
            # in a fresh process does not trigger a spurious skip.
            probe_runs = warmup if time_budget_s is None else max(warmup, 1)
            elapsed = None
            for _ in range(probe_runs):
                elapsed = runner(model, steps)
                if budget_left is not None:
                    budget_left -= elapsed
                    if budget_left <= 0.0:
                        break
            if budget_left is not None and (
                budget_left <= 0.0 or elapsed * repeats > budget_left
            ):
                print(
                    f"bench: skipping {mode} layers={config.layers_per_block} "
                    f"(projected {elapsed * repeats:.1f}s, "
                    f"budget left {max(budget_left, 0.0):.1f}s)",
                    file=sys.stderr,
                )
                continue
            per_sample = []
            for _ in range(repeats):
                elapsed = runner(model, steps)
                per_sample.append(elapsed / steps)
                if budget_left is not None:
                    budget_left -= elapsed
                    if budget_left <= 0.0:
                        break
            macs = count_macs(config, mode)
            records.append(
                TimingRecord(
                    mode=mode,
                    blocks=config.blocks,
                    layers=config.layers_per_block,
                    filter_width=config.filter_width,
                    dilation_base=config.dilation_base,
                    channels=config.hidden_channels,
                    steps=steps,
                    repeats=len(per_sample),
                    mean_s_per_sample=float(np.mean(per_sample)),
                    std_s_per_sample=float(np.std(per_sample)),
                    macs_per_step=macs.multiply_accumulates,
                    node_evals_per_step=macs.node_evaluations,
                )
            )
    return records


def emit_records(records: Sequence[TimingRecord], destination: str | Path) -> None:
    """Write the CSV: header plus one row per record, sorted by (layers, mode).

    Floats are written as their shortest round-trip decimal, so parsing the
    file back reproduces every numeric field exactly.
    """
    if not records:
        raise ValueError("no records to emit")
    ordered = sorted(records, key=lambda r: (r.layers, r.mode))
    with open(destination, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rec in ordered:
            writer.writerow(
                [
                    rec.mode,
                    rec.blocks,
                    rec.layers,
                    rec.filter_width,
                    rec.dilation_base,
                    rec.channels,
                    rec.steps,
                    rec.repeats,
                    repr(float(rec.mean_s_per_sample)),
                    repr(float(rec.std_s_per_sample)),
                    rec.macs_per_step,
                    rec.node_evals_per_step,
                ]
            )


def read_records(source: str | Path) -> list[TimingRecord]:
    """Parse a CSV written by emit_records back into records."""
    with open(source, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header: {reader.fieldnames}")
        out = []
        for row in reader:
            out.append(
                TimingRecord(
                    mode=row["mode"],
                    blocks=int(row["blocks"]),
                    layers=int(row["layers"]),
                    filter_width=int(row["filter_width"]),
                    dilation_base=int(row["dilation_base"]),
                    channels=int(row["channels"]),
                    steps=int(row["steps"]),
                    repeats=int(row["repeats"]),
                    mean_s_per_sample=float(row["mean_s_per_sample"]),
                    std_s_per_sample=float(row["std_s_per_sample"]),
                    macs_per_step=int(row["macs_per_step"]),
                    node_evals_per_step=int(row["node_evals_per_step"]),
                )
            )
    return out
