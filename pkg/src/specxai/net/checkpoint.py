"""Binary checkpoint file format.

Layout (all integers little-endian u32):
    magic "SXAI" | version | header_len | header utf-8 | parameter blocks
Header: `key = value` lines carrying the network config, label order,
the spectrogram pipeline used in training, input-normalization constants,
and training metadata. Parameter block: name_len | name utf-8 | rank |
extents... | float32 payload, written in parameter declaration order.
Floats in the header are written with repr() so a save/load round trip is
bit-exact.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..dsp import StftParams
from ..errors import FormatError
from ..pipeline import SpectroPipeline
from .model import Network, NetworkConfig

MAGIC = b"SXAI"
VERSION = 1


@dataclass(frozen=True)
class TrainingMeta:
    epochs: int
    final_train_loss: float
    seed: int


@dataclass(frozen=True)
class Checkpoint:
    config: NetworkConfig
    label_set: list[str]
    params: dict[str, np.ndarray]
    pipeline: SpectroPipeline
    sample_rate: int
    norm_mean: float
    norm_std: float
    training_meta: TrainingMeta

    def build_network(self) -> Network:
        net = Network(self.config)
        net.params = {k: v.copy() for k, v in self.params.items()}
        return net


def _header_text(ck: Checkpoint) -> str:
    cfg = ck.config
    stft = ck.pipeline.stft_params
    f_max = "nyquist" if ck.pipeline.f_max is None else repr(ck.pipeline.f_max)
    lines = [
        f"input_h = {cfg.input_hw[0]}",
        f"input_w = {cfg.input_hw[1]}",
        f"channels_per_stage = {','.join(map(str, cfg.channels_per_stage))}",
        f"blocks_per_stage = {','.join(map(str, cfg.blocks_per_stage))}",
        f"n_classes = {cfg.n_classes}",
        f"net_seed = {cfg.seed}",
        f"labels = {','.join(ck.label_set)}",
        f"sample_rate = {ck.sample_rate}",
        f"fft_size = {stft.fft_size}",
        f"window_len = {stft.window_len}",
        f"hop = {stft.hop}",
        f"db_floor = {stft.db_floor!r}",
        f"f_max = {f_max}",
        f"norm_mean = {ck.norm_mean!r}",
        f"norm_std = {ck.norm_std!r}",
        f"epochs = {ck.training_meta.epochs}",
        f"final_train_loss = {ck.training_meta.final_train_loss!r}",
        f"train_seed = {ck.training_meta.seed}",
    ]
    return "\n".join(lines) + "\n"


def save_checkpoint(ck: Checkpoint, path) -> None:
    header = _header_text(ck).encode("utf-8")
    out = bytearray()
    out += MAGIC
    out += struct.pack("<I", VERSION)
    out += struct.pack("<I", len(header))
    out += header
    for name, arr in ck.params.items():
        a = np.ascontiguousarray(arr, dtype="<f4")
        name_b = name.encode("utf-8")
        out += struct.pack("<I", len(name_b))
        out += name_b
        out += struct.pack("<I", a.ndim)
        out += struct.pack(f"<{a.ndim}I", *a.shape)
        out += a.tobytes()
    Path(path).write_bytes(bytes(out))


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise FormatError(
                f"truncated checkpoint: wanted {n} bytes at offset {self.pos}, "
                f"file has {len(self.data)}"
            )
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    @property
    def exhausted(self) -> bool:
        return self.pos == len(self.data)


def _parse_header(text: str) -> dict[str, str]:
    fields = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        key, sep, value = line.partition(" = ")
        if not sep:
            raise FormatError(f"bad header line {line!r}")
        fields[key] = value
    return fields


def load_checkpoint(path) -> Checkpoint:
    reader = _Reader(Path(path).read_bytes())
    magic = reader.take(4)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    version = reader.u32()
    if version != VERSION:
        raise FormatError(f"unsupported version {version}, expected {VERSION}")
    header = _parse_header(reader.take(reader.u32()).decode("utf-8"))
    try:
        config = NetworkConfig(
            n_classes=int(header["n_classes"]),
            input_hw=(int(header["input_h"]), int(header["input_w"])),
            channels_per_stage=tuple(
                int(c) for c in header["channels_per_stage"].split(",")
            ),
            blocks_per_stage=tuple(
                int(c) for c in header["blocks_per_stage"].split(",")
            ),
            seed=int(header["net_seed"]),
        )
        label_set = header["labels"].split(",")
        pipeline = SpectroPipeline(
            stft_params=StftParams(
                fft_size=int(header["fft_size"]),
                window_len=int(header["window_len"]),
                hop=int(header["hop"]),
                db_floor=float(header["db_floor"]),
            ),
            f_max=None if header["f_max"] == "nyquist" else float(header["f_max"]),
            image_hw=(int(header["input_h"]), int(header["input_w"])),
        )
        sample_rate = int(header["sample_rate"])
        norm_mean = float(header["norm_mean"])
        norm_std = float(header["norm_std"])
        meta = TrainingMeta(
            epochs=int(header["epochs"]),
            final_train_loss=float(header["final_train_loss"]),
            seed=int(header["train_seed"]),
        )
    except KeyError as exc:
        raise FormatError(f"header missing key {exc}") from None

    params: dict[str, np.ndarray] = {}
    while not reader.exhausted:
        name = reader.take(reader.u32()).decode("utf-8")
        rank = reader.u32()
        shape = tuple(reader.u32() for _ in range(rank))
        count = int(np.prod(shape)) if shape else 1
        payload = reader.take(4 * count)
        params[name] = np.frombuffer(payload, dtype="<f4").reshape(shape).copy()

    template = Network(config).params
    if list(params) != list(template):
        raise FormatError(
            f"parameter names {list(params)} do not match config layout"
        )
    for name, arr in params.items():
        if arr.shape != template[name].shape:
            raise FormatError(
                f"{name}: shape {arr.shape} inconsistent with config "
                f"(expected {template[name].shape})"
            )
    if len(label_set) != config.n_classes:
        raise FormatError(
            f"label count {len(label_set)} != n_classes {config.n_classes}"
        )
    return Checkpoint(
        config, label_set, params, pipeline, sample_rate, norm_mean, norm_std, meta
    )
