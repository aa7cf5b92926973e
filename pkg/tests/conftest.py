import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from streamconv import LayerWeights, Model, ModelConfig, build_model

# The jitted kernel compiles on first use, which would trip per-example
# deadlines; examples stay deterministic run to run.
settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


def zero_bias(model: Model) -> Model:
    layers = tuple(
        LayerWeights(taps=lw.taps, bias=np.zeros(lw.out_channels))
        for lw in model.layers
    )
    return Model(config=model.config, layers=layers)


def constant_weight_model(config: ModelConfig, tap_value: float, bias_value: float) -> Model:
    layers = []
    for c_in, c_out in config.channel_dims():
        taps = np.full((config.filter_width, c_out, c_in), tap_value)
        bias = np.full(c_out, bias_value)
        layers.append(LayerWeights(taps=taps, bias=bias))
    return Model(config=config, layers=tuple(layers))


def delay_model(layers_per_block: int) -> Model:
    """Pass-through stack whose top layer copies from one dilation back.

    Every layer below the top is the identity (tap 0 = 1, tap 1 = 0); the top
    layer reads only its tap at distance dilation (tap 0 = 0, tap 1 = 1), so
    the whole stack delays the input by the top layer's dilation 2**(L-1).
    """
    config = ModelConfig(
        blocks=1,
        layers_per_block=layers_per_block,
        filter_width=2,
        dilation_base=2,
        hidden_channels=1,
        activation="linear",
        init_seed=0,
    )
    layers = []
    top = config.total_layers - 1
    for l in range(config.total_layers):
        taps = np.zeros((2, 1, 1))
        taps[1 if l == top else 0, 0, 0] = 1.0
        layers.append(LayerWeights(taps=taps, bias=np.zeros(1)))
    return Model(config=config, layers=tuple(layers))


@pytest.fixture(scope="session")
def seeded_model() -> Model:
    return build_model(
        ModelConfig(
            blocks=1,
            layers_per_block=4,
            filter_width=2,
            dilation_base=2,
            hidden_channels=1,
            activation="tanh",
            init_seed=7,
        )
    )
