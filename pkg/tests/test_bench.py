import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import reference
from streamconv import (
    CSV_COLUMNS,
    ModelConfig,
    TimingRecord,
    build_model,
    count_macs,
    default_grid,
    emit_records,
    fast_step,
    init_state,
    naive_step,
    read_records,
    receptive_field,
    run_benchmark,
)


def test_count_macs_examples():
    config = ModelConfig(blocks=1, layers_per_block=4)
    fast = count_macs(config, "fast")
    naive = count_macs(config, "naive")
    assert (fast.node_evaluations, fast.multiply_accumulates) == (4, 8)
    assert (naive.node_evaluations, naive.multiply_accumulates) == (15, 30)


@pytest.mark.parametrize("channels", [1, 3, 16])
def test_single_layer_modes_agree(channels):
    config = ModelConfig(blocks=1, layers_per_block=1, hidden_channels=channels)
    assert count_macs(config, "fast") == count_macs(config, "naive")


def test_unknown_mode_rejected():
    with pytest.raises(ValueError, match="mode"):
        count_macs(ModelConfig(blocks=1, layers_per_block=1), "quick")


@pytest.mark.parametrize("layers", range(1, 11))
def test_exponential_vs_linear_node_growth(layers):
    config = ModelConfig(blocks=1, layers_per_block=layers)
    assert count_macs(config, "naive").node_evaluations == 2**layers - 1
    assert count_macs(config, "fast").node_evaluations == layers


def test_growth_recurrences():
    for layers in range(1, 10):
        small = ModelConfig(blocks=1, layers_per_block=layers)
        big = ModelConfig(blocks=1, layers_per_block=layers + 1)
        naive_small = count_macs(small, "naive").node_evaluations
        naive_big = count_macs(big, "naive").node_evaluations
        assert naive_big == 2 * naive_small + 1
        fast_small = count_macs(small, "fast").node_evaluations
        fast_big = count_macs(big, "fast").node_evaluations
        assert fast_big == fast_small + 1


grid_configs = st.builds(
    ModelConfig,
    blocks=st.integers(1, 3),
    layers_per_block=st.integers(1, 5),
    filter_width=st.integers(2, 3),
    dilation_base=st.integers(2, 3),
    hidden_channels=st.integers(1, 4),
    activation=st.just("tanh"),
    init_seed=st.integers(0, 2**32),
)


@settings(max_examples=25)
@given(config=grid_configs)
def test_counts_agree_with_live_runs_and_enumeration(config):
    model = build_model(config)
    # fast: any step.
    state = init_state(model)
    fast_step(state, 0.1, model)
    assert count_macs(config, "fast") == state.macs_last_step
    # naive: any steady-state step.
    history = np.random.default_rng(0).uniform(-1, 1, receptive_field(config))
    _, live = naive_step(model, history)
    assert count_macs(config, "naive") == live
    # and both against the independent enumerator.
    args = (
        config.blocks,
        config.layers_per_block,
        config.filter_width,
        config.dilation_base,
        config.hidden_channels,
    )
    naive = count_macs(config, "naive")
    assert (naive.multiply_accumulates, naive.node_evaluations) == reference.naive_cost(*args)
    fast = count_macs(config, "fast")
    assert (fast.multiply_accumulates, fast.node_evaluations) == reference.fast_cost(*args)


def test_fast_counts_do_not_depend_on_history_length():
    config = ModelConfig(blocks=2, layers_per_block=3, init_seed=5)
    model = build_model(config)
    state = init_state(model)
    seen = set()
    sample = 0.0
    for _ in range(50):
        sample = fast_step(state, sample, model)
        seen.add(state.macs_last_step)
    assert seen == {count_macs(config, "fast")}


def _tiny_grid():
    return default_grid(layers_from=1, layers_to=2, channels=2)


def test_run_benchmark_degenerate_statistics():
    records = run_benchmark(_tiny_grid(), steps=1, repeats=1, warmup=0)
    assert len(records) == 4  # 2 configs x 2 modes
    for rec in records:
        assert rec.repeats == 1
        assert rec.std_s_per_sample == 0.0
        assert rec.mean_s_per_sample > 0.0


def test_run_benchmark_validates_arguments():
    with pytest.raises(ValueError):
        run_benchmark(_tiny_grid(), steps=0, repeats=1)
    with pytest.raises(ValueError):
        run_benchmark(_tiny_grid(), steps=1, repeats=0)
    with pytest.raises(ValueError):
        default_grid(layers_from=3, layers_to=2)


def test_run_benchmark_attaches_counts():
    records = run_benchmark(_tiny_grid(), steps=2, repeats=2, warmup=1)
    for rec in records:
        config = ModelConfig(
            blocks=rec.blocks,
            layers_per_block=rec.layers,
            filter_width=rec.filter_width,
            dilation_base=rec.dilation_base,
            hidden_channels=rec.channels,
        )
        macs = count_macs(config, rec.mode)
        assert rec.macs_per_step == macs.multiply_accumulates
        assert rec.node_evals_per_step == macs.node_evaluations


def test_budget_skips_impossible_configs(capsys):
    records = run_benchmark(
        _tiny_grid(), steps=1, repeats=10**9, warmup=0, time_budget_s=0.05
    )
    assert records == []


def _sample_records():
    return [
        TimingRecord(
            mode="naive", blocks=2, layers=3, filter_width=2, dilation_base=2,
            channels=16, steps=64, repeats=20,
            mean_s_per_sample=0.0012345678901234567,
            std_s_per_sample=1.25e-05, macs_per_step=1234,
            node_evals_per_step=41,
        ),
        TimingRecord(
            mode="fast", blocks=2, layers=3, filter_width=2, dilation_base=2,
            channels=16, steps=64, repeats=20,
            mean_s_per_sample=3.5e-05, std_s_per_sample=0.0,
            macs_per_step=96, node_evals_per_step=6,
        ),
        TimingRecord(
            mode="fast", blocks=2, layers=1, filter_width=2, dilation_base=2,
            channels=16, steps=64, repeats=20,
            mean_s_per_sample=1.5e-05, std_s_per_sample=0.0,
            macs_per_step=32, node_evals_per_step=2,
        ),
    ]


def test_csv_header_is_the_published_interface():
    assert ",".join(CSV_COLUMNS) == (
        "mode,blocks,layers,filter_width,dilation_base,channels,steps,repeats,"
        "mean_s_per_sample,std_s_per_sample,macs_per_step,node_evals_per_step"
    )


def test_emit_records_layout(tmp_path):
    path = tmp_path / "bench.csv"
    emit_records(_sample_records()[:2], path)
    lines = path.read_text().splitlines()
    assert len(lines) == 3
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert lines[1].startswith("fast,2,3,")
    assert lines[2].startswith("naive,2,3,")


def test_emit_records_sorted_by_layers_then_mode(tmp_path):
    path = tmp_path / "bench.csv"
    emit_records(_sample_records(), path)
    parsed = read_records(path)
    assert [(r.layers, r.mode) for r in parsed] == [
        (1, "fast"), (3, "fast"), (3, "naive"),
    ]


def test_emit_records_round_trip_exact(tmp_path):
    path = tmp_path / "bench.csv"
    records = _sample_records()
    emit_records(records, path)
    parsed = read_records(path)
    assert sorted(parsed, key=lambda r: (r.layers, r.mode)) == sorted(
        records, key=lambda r: (r.layers, r.mode)
    )


def test_emit_records_rejects_empty(tmp_path):
    with pytest.raises(ValueError):
        emit_records([], tmp_path / "bench.csv")


def test_read_records_rejects_foreign_header(tmp_path):
    path = tmp_path / "bench.csv"
    path.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(ValueError, match="header"):
        read_records(path)
