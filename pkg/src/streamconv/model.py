"""Network architecture, seeded weight construction, and the model file format.

A model is a stack of dilated causal convolution layers grouped into blocks.
Within a block the dilation of layer l is dilation_base**l; dilations reset
to 1 at each block boundary. The bottom layer reads a scalar signal, the top
layer emits one, and everything in between is hidden_channels wide.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

ACTIVATIONS = ("linear", "tanh")

_MAGIC = "streamconv model v1"

_CONFIG_KEYS = (
    "blocks",
    "layers_per_block",
    "filter_width",
    "dilation_base",
    "hidden_channels",
    "activation",
    "init_seed",
)


class ModelFormatError(ValueError):
    """Raised when a model document is malformed or inconsistent."""


@dataclass(frozen=True)
class ModelConfig:
    """Architecture hyperparameters. Immutable and hashable."""

    blocks: int
    layers_per_block: int
    filter_width: int = 2
    dilation_base: int = 2
    hidden_channels: int = 1
    activation: str = "tanh"
    init_seed: int = 0

    def __post_init__(self) -> None:
        if self.blocks < 1:
            raise ValueError("blocks must be a positive integer")
        if self.layers_per_block < 1:
            raise ValueError("layers_per_block must be a positive integer")
        if self.filter_width < 2:
            raise ValueError("filter_width must be at least 2")
        if self.dilation_base < 2:
            raise ValueError("dilation_base must be at least 2")
        if self.hidden_channels < 1:
            raise ValueError("hidden_channels must be a positive integer")
        if self.activation not in ACTIVATIONS:
            raise ValueError(
                f"activation must be one of {ACTIVATIONS}, got {self.activation!r}"
            )
        if not 0 <= self.init_seed < 2**64:
            raise ValueError("init_seed must fit in an unsigned 64-bit integer")

    @property
    def total_layers(self) -> int:
        return self.blocks * self.layers_per_block

    def dilations(self) -> tuple[int, ...]:
        """Per-layer dilation, bottom to top."""
        return tuple(
            self.dilation_base**i
            for _ in range(self.blocks)
            for i in range(self.layers_per_block)
        )

    def channel_dims(self) -> tuple[tuple[int, int], ...]:
        """Per-layer (in_channels, out_channels), bottom to top."""
        n = self.total_layers
        c = self.hidden_channels
        return tuple(
            (1 if l == 0 else c, 1 if l == n - 1 else c) for l in range(n)
        )


def receptive_field(config: ModelConfig) -> int:
    """Number of most recent input samples that can influence one output.

    Closed form: 1 + blocks * (w - 1) * (r**L - 1) / (r - 1). For the default
    w=2, r=2 and a single block this is 2**L.
    """
    r = config.dilation_base
    span = (config.filter_width - 1) * (r**config.layers_per_block - 1) // (r - 1)
    return 1 + config.blocks * span


@dataclass(frozen=True, eq=False)
class LayerWeights:
    """One layer's filter taps and bias.

    taps has shape (filter_width, out_channels, in_channels); taps[0] reads
    the current time step, taps[k] reads k*dilation steps back.
    """

    taps: np.ndarray
    bias: np.ndarray

    def __post_init__(self) -> None:
        if self.taps.ndim != 3:
            raise ValueError("taps must have shape (filter_width, out, in)")
        if self.taps.shape[0] < 2:
            raise ValueError("a layer needs at least two taps")
        if self.bias.ndim != 1 or self.bias.shape[0] != self.taps.shape[1]:
            raise ValueError("bias length must match the tap out dimension")
        if not (np.isfinite(self.taps).all() and np.isfinite(self.bias).all()):
            raise ValueError("layer weights must be finite")

    @property
    def filter_width(self) -> int:
        return self.taps.shape[0]

    @property
    def out_channels(self) -> int:
        return self.taps.shape[1]

    @property
    def in_channels(self) -> int:
        return self.taps.shape[2]


@dataclass(frozen=True, eq=False)
class Model:
    """An immutable weight stack plus its config; safe to share across threads."""

    config: ModelConfig
    layers: tuple[LayerWeights, ...]

    def __post_init__(self) -> None:
        expected = self.config.channel_dims()
        if len(self.layers) != len(expected):
            raise ValueError(
                f"config declares {len(expected)} layers, got {len(self.layers)}"
            )
        for l, (lw, (c_in, c_out)) in enumerate(zip(self.layers, expected)):
            if lw.filter_width != self.config.filter_width:
                raise ValueError(f"layer {l}: tap count mismatch")
            if (lw.in_channels, lw.out_channels) != (c_in, c_out):
                raise ValueError(
                    f"layer {l}: expected {c_in}x{c_out} channels, "
                    f"got {lw.in_channels}x{lw.out_channels}"
                )

    def equals(self, other: "Model") -> bool:
        """Field-wise exact equality, including every weight bit."""
        if self.config != other.config:
            return False
        return all(
            np.array_equal(a.taps, b.taps) and np.array_equal(a.bias, b.bias)
            for a, b in zip(self.layers, other.layers)
        )


def _warn_if_narrow_base(config: ModelConfig) -> None:
    # The queue-cache space bound assumes r >= w; smaller bases still work,
    # they just cache more than that bound suggests.
    if config.dilation_base < config.filter_width:
        warnings.warn(
            f"dilation_base {config.dilation_base} is smaller than "
            f"filter_width {config.filter_width}; space grows past the "
            f"(w-1)*r**L bound",
            UserWarning,
            stacklevel=3,
        )


def build_model(config: ModelConfig) -> Model:
    """Draw weights from a seeded uniform [-0.5, 0.5] distribution.

    The draw order (per layer: taps then bias, bottom to top) is fixed, so an
    identical config yields a bit-identical model on any platform.
    """
    _warn_if_narrow_base(config)
    rng = np.random.default_rng(config.init_seed)
    layers = []
    for c_in, c_out in config.channel_dims():
        taps = rng.uniform(-0.5, 0.5, size=(config.filter_width, c_out, c_in))
        bias = rng.uniform(-0.5, 0.5, size=c_out)
        taps.setflags(write=False)
        bias.setflags(write=False)
        layers.append(LayerWeights(taps=taps, bias=bias))
    return Model(config=config, layers=tuple(layers))


def _fmt(x: float) -> str:
    # 17 significant digits round-trip any float64 exactly.
    return format(float(x), ".17g")


def model_to_text(model: Model) -> str:
    """Serialize to the human-readable model document."""
    cfg = model.config
    lines = [_MAGIC]
    for key in _CONFIG_KEYS:
        lines.append(f"{key} = {getattr(cfg, key)}")
    for l, lw in enumerate(model.layers):
        lines.append("")
        lines.append(f"layer {l}")
        for k in range(lw.filter_width):
            lines.append(f"tap {k}")
            for row in lw.taps[k]:
                lines.append(" ".join(_fmt(v) for v in row))
        lines.append("bias")
        lines.append(" ".join(_fmt(v) for v in lw.bias))
    lines.append("")
    return "\n".join(lines)


def _parse_row(line: str, width: int, context: str) -> np.ndarray:
    parts = line.split()
    if len(parts) != width:
        raise ModelFormatError(
            f"{context}: expected {width} values, got {len(parts)}"
        )
    try:
        row = np.array([float(p) for p in parts], dtype=np.float64)
    except ValueError as exc:
        raise ModelFormatError(f"{context}: {exc}") from None
    if not np.isfinite(row).all():
        raise ModelFormatError(f"{context}: non-finite weight entry")
    return row


def model_from_text(text: str) -> Model:
    """Parse a model document; inverse of model_to_text, bit-exact."""
    lines = [ln.rstrip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln.strip()]
    if not lines or lines[0].strip() != _MAGIC:
        raise ModelFormatError(f"missing header line {_MAGIC!r}")

    fields = {}
    pos = 1
    while pos < len(lines) and not lines[pos].startswith("layer "):
        if "=" not in lines[pos]:
            raise ModelFormatError(f"bad config line: {lines[pos]!r}")
        key, _, value = lines[pos].partition("=")
        fields[key.strip()] = value.strip()
        pos += 1
    missing = set(_CONFIG_KEYS) - set(fields)
    if missing:
        raise ModelFormatError(f"config block missing keys: {sorted(missing)}")
    extra = set(fields) - set(_CONFIG_KEYS)
    if extra:
        raise ModelFormatError(f"config block has unknown keys: {sorted(extra)}")
    try:
        config = ModelConfig(
            blocks=int(fields["blocks"]),
            layers_per_block=int(fields["layers_per_block"]),
            filter_width=int(fields["filter_width"]),
            dilation_base=int(fields["dilation_base"]),
            hidden_channels=int(fields["hidden_channels"]),
            activation=fields["activation"],
            init_seed=int(fields["init_seed"]),
        )
    except ValueError as exc:
        raise ModelFormatError(f"bad config: {exc}") from None

    def expect(tag: str) -> None:
        nonlocal pos
        if pos >= len(lines) or lines[pos].strip() != tag:
            found = lines[pos].strip() if pos < len(lines) else "end of file"
            raise ModelFormatError(f"expected {tag!r}, found {found!r}")
        pos += 1

    layers = []
    for l, (c_in, c_out) in enumerate(config.channel_dims()):
        expect(f"layer {l}")
        taps = np.empty((config.filter_width, c_out, c_in), dtype=np.float64)
        for k in range(config.filter_width):
            expect(f"tap {k}")
            for o in range(c_out):
                if pos >= len(lines):
                    raise ModelFormatError(f"layer {l} tap {k}: truncated")
                taps[k, o] = _parse_row(lines[pos], c_in, f"layer {l} tap {k}")
                pos += 1
        expect("bias")
        if pos >= len(lines):
            raise ModelFormatError(f"layer {l}: missing bias row")
        bias = _parse_row(lines[pos], c_out, f"layer {l} bias")
        pos += 1
        taps.setflags(write=False)
        bias.setflags(write=False)
        layers.append(LayerWeights(taps=taps, bias=bias))
    if pos != len(lines):
        raise ModelFormatError(f"unexpected trailing content: {lines[pos]!r}")
    return Model(config=config, layers=tuple(layers))


def save_model(model: Model, destination: str | Path) -> None:
    Path(destination).write_text(model_to_text(model), encoding="utf-8")


def load_model(source: str | Path) -> Model:
    model = model_from_text(Path(source).read_text(encoding="utf-8"))
    _warn_if_narrow_base(model.config)
    return model
