"""Command-line entry point.

Subcommands: init-model (build and save a seeded model), generate (free-run
either generator), verify (cross-check fast, naive, and the full-sequence
oracle), bench (the layer-sweep timing experiment). Exit codes: 0 success,
1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from .bench import count_macs, default_grid, emit_records, run_benchmark
from .fast import fast_generate, fast_step, init_state
from .model import (
    ACTIVATIONS,
    Model,
    ModelConfig,
    build_model,
    load_model,
    receptive_field,
    save_model,
)
from .naive import naive_generate, naive_step
from .oracle import SampleSequence, forward_full


def _write_samples(path: str, samples) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for v in samples:
            fh.write(repr(float(v)) + "\n")


def _read_samples(path: str) -> list[float]:
    values = []
    with open(path, encoding="utf-8") as fh:
        for ln, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                v = float(line)
            except ValueError:
                raise ValueError(f"{path}:{ln}: not a number: {line!r}") from None
            if not np.isfinite(v):
                raise ValueError(f"{path}:{ln}: non-finite sample")
            values.append(v)
    return values


def cmd_init_model(args: argparse.Namespace) -> int:
    config = ModelConfig(
        blocks=args.blocks,
        layers_per_block=args.layers,
        filter_width=args.width,
        dilation_base=args.base,
        hidden_channels=args.channels,
        activation=args.activation,
        init_seed=args.seed,
    )
    model = build_model(config)
    save_model(model, args.out)
    capacities = [(config.filter_width - 1) * d for d in config.dilations()]
    print(f"receptive field: {receptive_field(config)}")
    print("queue capacities: " + " ".join(str(c) for c in capacities))
    return 0


def cmd_generate(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    primer = _read_samples(args.primer) if args.primer else []
    generate = fast_generate if args.mode == "fast" else naive_generate
    t0 = time.perf_counter()
    out = generate(model, primer, args.steps)
    elapsed = time.perf_counter() - t0
    _write_samples(args.out, out.scalars())
    macs = count_macs(model.config, args.mode)
    rate = args.steps / elapsed if elapsed > 0 else float("inf")
    print(
        f"{args.mode}: {args.steps} samples, {rate:.1f} samples/s, "
        f"{macs.multiply_accumulates} MACs/step",
        file=sys.stderr,
    )
    return 0


def _teacher_forced_fast(model: Model, inputs: np.ndarray) -> np.ndarray:
    state = init_state(model)
    return np.array([fast_step(state, x, model) for x in inputs])


def _teacher_forced_naive(model: Model, inputs: np.ndarray) -> np.ndarray:
    return np.array(
        [naive_step(model, inputs[: i + 1])[0] for i in range(len(inputs))]
    )


def verify_model(
    oracle_model: Model,
    steps: int,
    fast_model: Model | None = None,
    naive_model: Model | None = None,
) -> list[tuple[str, float]]:
    """Max absolute deviation of each cross-implementation comparison.

    Teacher-forced: both generators driven with a seeded random input, against
    the full-sequence oracle. Free-run: the two generators against each other.
    All three share one kernel, so every deviation should be exactly 0.0. Each
    role can use its own model instance (the CLI reloads the file per role),
    so any drift between loads surfaces as a deviation.
    """
    fast_model = oracle_model if fast_model is None else fast_model
    naive_model = oracle_model if naive_model is None else naive_model
    rng = np.random.default_rng([oracle_model.config.init_seed, 0xA5])
    inputs = rng.uniform(-1.0, 1.0, steps)
    reference = forward_full(
        oracle_model, SampleSequence.from_scalars(inputs)
    ).scalars()

    def max_dev(a, b) -> float:
        return float(np.max(np.abs(np.asarray(a) - np.asarray(b)), initial=0.0))

    fast_out = _teacher_forced_fast(fast_model, inputs)
    naive_out = _teacher_forced_naive(naive_model, inputs)
    free_fast = fast_generate(fast_model, inputs[:1], steps).scalars()
    free_naive = naive_generate(naive_model, inputs[:1], steps).scalars()
    return [
        ("teacher-forced fast vs oracle", max_dev(fast_out, reference)),
        ("teacher-forced naive vs oracle", max_dev(naive_out, reference)),
        ("free-run fast vs naive", max_dev(free_fast, free_naive)),
    ]


def verification_grid(seed: int = 7) -> list[ModelConfig]:
    """Seeded configs spanning depth, width, channels, and both activations."""
    configs = []
    for blocks in (1, 2, 3):
        for layers in range(1, 7):
            for width in (2, 3):
                for channels in (1, 4):
                    for activation in ("linear", "tanh"):
                        configs.append(
                            ModelConfig(
                                blocks=blocks,
                                layers_per_block=layers,
                                filter_width=width,
                                dilation_base=2,
                                hidden_channels=channels,
                                activation=activation,
                                init_seed=seed + len(configs),
                            )
                        )
    return configs


def cmd_verify(args: argparse.Namespace) -> int:
    if args.steps < 1:
        raise ValueError("verify needs at least one step")
    if args.tol < 0:
        raise ValueError("tolerance must be non-negative")
    if args.model:
        # One load per comparison role, so the roles stay independent.
        oracle_model = load_model(args.model)
        fast_model = load_model(args.model)
        naive_model = load_model(args.model)
        if fast_model.config != oracle_model.config or (
            naive_model.config != oracle_model.config
        ):
            raise ValueError("model file changed between loads")
        deviations = []
        for name, dev in verify_model(
            oracle_model, args.steps, fast_model=fast_model, naive_model=naive_model
        ):
            print(f"{name}: max deviation {dev!r}")
            deviations.append(dev)
    else:
        grid = verification_grid()
        worst = {}
        for config in grid:
            model = build_model(config)
            for name, dev in verify_model(model, args.steps):
                worst[name] = max(worst.get(name, 0.0), dev)
                if dev > args.tol:
                    print(
                        f"FAIL {name}: deviation {dev!r} exceeds tolerance "
                        f"{args.tol!r} for {config}",
                        file=sys.stderr,
                    )
        for name, dev in worst.items():
            print(f"{name}: max deviation {dev!r} over {len(grid)} configs")
        deviations = list(worst.values())
    if all(dev <= args.tol for dev in deviations):
        print("verify: OK")
        return 0
    print("verify: MISMATCH", file=sys.stderr)
    return 1


def cmd_bench(args: argparse.Namespace) -> int:
    grid = default_grid(
        layers_from=args.layers_from,
        layers_to=args.layers_to,
        blocks=args.blocks,
        filter_width=args.width,
        dilation_base=args.base,
        channels=args.channels,
    )
    records = run_benchmark(
        grid,
        steps=args.steps,
        repeats=args.repeats,
        warmup=args.warmup,
        time_budget_s=args.budget_s,
    )
    if not records:
        print("bench: every configuration exceeded the budget", file=sys.stderr)
        return 1
    emit_records(records, args.out)
    by_layers = {}
    for rec in records:
        by_layers.setdefault(rec.layers, {})[rec.mode] = rec.mean_s_per_sample
    print("layers fast/naive")
    for layers in sorted(by_layers):
        times = by_layers[layers]
        if "fast" in times and "naive" in times and times["naive"] > 0:
            print(f"{layers} {times['fast'] / times['naive']:.4f}")
        else:
            print(f"{layers} skipped")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="streamconv",
        description=(
            "Streaming generation for stacks of dilated causal convolutions: "
            "cache-free baseline and queue-cached incremental inference."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init-model", help="build a seeded model and save it")
    p.add_argument("--layers", type=int, required=True, help="layers per block")
    p.add_argument("--blocks", type=int, default=1)
    p.add_argument("--width", type=int, default=2, help="filter taps per layer")
    p.add_argument("--base", type=int, default=2, help="dilation growth base")
    p.add_argument("--channels", type=int, default=1, help="hidden channels")
    p.add_argument("--activation", choices=ACTIVATIONS, default="tanh")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="model file destination")
    p.set_defaults(func=cmd_init_model)

    p = sub.add_parser("generate", help="free-run a generator, one sample per line")
    p.add_argument("--model", required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--mode", choices=("fast", "naive"), required=True)
    p.add_argument("--primer", help="optional primer sample file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("verify", help="cross-check fast, naive, and the oracle")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--model", help="verify one saved model")
    group.add_argument(
        "--random-grid",
        action="store_true",
        help="verify a seeded grid of architectures",
    )
    p.add_argument("--steps", type=int, default=64)
    p.add_argument("--tol", type=float, default=0.0,
                   help="max tolerated deviation (default exact)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="layer-sweep timing experiment, CSV output")
    p.add_argument("--layers-from", type=int, default=1)
    p.add_argument("--layers-to", type=int, default=10)
    p.add_argument("--blocks", type=int, default=2)
    p.add_argument("--width", type=int, default=2)
    p.add_argument("--base", type=int, default=2)
    p.add_argument("--channels", type=int, default=16)
    p.add_argument("--steps", type=int, default=64)
    p.add_argument("--repeats", type=int, default=100)
    p.add_argument("--warmup", type=int, default=3)
    p.add_argument("--budget-s", type=float, default=None,
                   help="per config x mode wall-clock budget in seconds")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
