#!/usr/bin/env python3
"""Run the full layer-sweep timing experiment and write the CSV.

Defaults match the headline experiment: 2 blocks of L layers each for
L = 1..10, 100 repeats of 64 generated samples per config and mode, 16
hidden channels. Expect a few minutes of wall clock; pass --repeats 20 for
a quick look. The CSV lands next to this script unless --out is given.
"""

import argparse
import sys
from pathlib import Path

from streamconv import default_grid, emit_records, run_benchmark


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--layers-to", type=int, default=10)
    parser.add_argument("--repeats", type=int, default=100)
    parser.add_argument("--steps", type=int, default=64)
    parser.add_argument("--channels", type=int, default=16)
    parser.add_argument("--budget-s", type=float, default=None)
    parser.add_argument(
        "--out", default=str(Path(__file__).parent / "timing_grid.csv")
    )
    args = parser.parse_args()

    grid = default_grid(layers_to=args.layers_to, channels=args.channels)
    records = run_benchmark(
        grid,
        steps=args.steps,
        repeats=args.repeats,
        time_budget_s=args.budget_s,
    )
    if not records:
        print("every configuration exceeded the budget", file=sys.stderr)
        return 1
    emit_records(records, args.out)

    times = {(r.mode, r.layers): r.mean_s_per_sample for r in records}
    print(f"wrote {args.out}")
    print("layers  naive_s/sample  fast_s/sample  speedup")
    for layers in sorted({r.layers for r in records}):
        naive = times.get(("naive", layers))
        fast = times.get(("fast", layers))
        if naive is None or fast is None:
            print(f"{layers:>6}  (skipped)")
            continue
        print(f"{layers:>6}  {naive:14.3e}  {fast:13.3e}  {naive / fast:7.2f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
