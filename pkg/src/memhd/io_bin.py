"""Binary persistence: trained model files and the dataset cache.

Both containers share one framing: the magic string "MEMHD", a u16
format version, a content-kind byte, a little-endian payload, and a
trailing CRC32 over the payload. The encoder is stored as parameters
only (PRNG id, seed, shape); its tables regenerate bit-exactly on load.

Model payload (version 1):
    prng_id   u8 length + ascii
    enc_kind  u8 (0 = projection, 1 = id_level)
    seed      u64   f u32   D u32   L u32
    k         u32   C u32
    class_map C x u32
    am_words  C x ceil(D/64) x u64 (column-major: column 0's words first)
    lr        f64   epochs u32   ratio f64
    dataset   u16 length + utf-8
    accuracy  f64

Dataset-cache payload (version 1):
    name      u16 length + utf-8
    f u32   k u32   n u32
    labels    n x u32
    features  n x f x f64 (row-major)
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import BinaryAM, ClassMap, words_for
from .data import LabeledDataset
from .encoding import Encoder, generate_id_level, generate_projection
from .rng import PRNG_ID

MAGIC = b"MEMHD"
FORMAT_VERSION = 1
KIND_MODEL = 1
KIND_DATASET = 2

_ENC_CODES = {"projection": 0, "id_level": 1}
_ENC_NAMES = {v: k for k, v in _ENC_CODES.items()}


class ModelFormatError(ValueError):
    """A model or cache file is corrupt or from an unknown version."""


@dataclass
class ModelFile:
    """Everything needed to reload and rerun a trained classifier."""

    encoder_kind: str
    seed: int
    features: int
    dim: int
    levels: int
    bam: BinaryAM
    lr: float
    epochs: int
    ratio: float
    dataset: str
    accuracy: float
    prng_id: str = PRNG_ID

    def make_encoder(self) -> Encoder:
        if self.prng_id != PRNG_ID:
            raise ModelFormatError(
                f"model was generated with PRNG {self.prng_id!r}; this build provides {PRNG_ID!r}"
            )
        if self.encoder_kind == "projection":
            return generate_projection(self.seed, self.features, self.dim)
        return generate_id_level(self.seed, self.features, self.levels, self.dim)


def _frame(kind: int, payload: bytes) -> bytes:
    head = MAGIC + struct.pack("<HB", FORMAT_VERSION, kind)
    return head + payload + struct.pack("<I", zlib.crc32(payload))


def _unframe(data: bytes, kind: int, path) -> bytes:
    if len(data) < len(MAGIC) + 3 + 4:
        raise ModelFormatError(f"{path}: file too short")
    if data[: len(MAGIC)] != MAGIC:
        raise ModelFormatError(f"{path}: bad magic {data[:len(MAGIC)]!r}, expected {MAGIC!r}")
    version, got_kind = struct.unpack_from("<HB", data, len(MAGIC))
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"{path}: unsupported format version {version}")
    if got_kind != kind:
        raise ModelFormatError(f"{path}: content kind {got_kind}, expected {kind}")
    payload = data[len(MAGIC) + 3 : -4]
    (crc,) = struct.unpack("<I", data[-4:])
    if zlib.crc32(payload) != crc:
        raise ModelFormatError(f"{path}: checksum mismatch (corrupt file)")
    return payload


class _Reader:
    def __init__(self, payload: bytes, path):
        self.buf = payload
        self.off = 0
        self.path = path

    def take(self, n: int) -> bytes:
        if self.off + n > len(self.buf):
            raise ModelFormatError(f"{self.path}: payload truncated")
        out = self.buf[self.off : self.off + n]
        self.off += n
        return out

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def done(self):
        if self.off != len(self.buf):
            raise ModelFormatError(f"{self.path}: {len(self.buf) - self.off} trailing payload bytes")


def save_model(path, model: ModelFile) -> None:
    parts = [bytes([len(model.prng_id)]), model.prng_id.encode("ascii")]
    parts.append(
        struct.pack(
            "<BQIII",
            _ENC_CODES[model.encoder_kind],
            model.seed,
            model.features,
            model.dim,
            model.levels,
        )
    )
    bam = model.bam
    parts.append(struct.pack("<II", bam.class_map.k, bam.cols))
    parts.append(bam.class_map.labels.astype("<u4").tobytes())
    parts.append(bam.words.astype("<u8").tobytes())
    name = model.dataset.encode("utf-8")
    parts.append(struct.pack("<dId", model.lr, model.epochs, model.ratio))
    parts.append(struct.pack("<H", len(name)) + name)
    parts.append(struct.pack("<d", model.accuracy))
    Path(path).write_bytes(_frame(KIND_MODEL, b"".join(parts)))


def load_model(path) -> ModelFile:
    r = _Reader(_unframe(Path(path).read_bytes(), KIND_MODEL, path), path)
    (id_len,) = r.unpack("<B")
    prng_id = r.take(id_len).decode("ascii")
    enc_code, seed, f, dim, levels = r.unpack("<BQIII")
    if enc_code not in _ENC_NAMES:
        raise ModelFormatError(f"{path}: unknown encoder kind {enc_code}")
    k, cols = r.unpack("<II")
    labels = np.frombuffer(r.take(4 * cols), dtype="<u4").astype(np.int32)
    nw = words_for(dim)
    words = np.frombuffer(r.take(8 * cols * nw), dtype="<u8").astype(np.uint64).reshape(cols, nw)
    lr, epochs, ratio = r.unpack("<dId")
    (name_len,) = r.unpack("<H")
    dataset = r.take(name_len).decode("utf-8")
    (accuracy,) = r.unpack("<d")
    r.done()
    try:
        bam = BinaryAM(dim, words, ClassMap(labels, k))
    except ValueError as e:
        raise ModelFormatError(f"{path}: {e}") from None
    return ModelFile(
        encoder_kind=_ENC_NAMES[enc_code],
        seed=seed,
        features=f,
        dim=dim,
        levels=levels,
        bam=bam,
        lr=lr,
        epochs=epochs,
        ratio=ratio,
        dataset=dataset,
        accuracy=accuracy,
        prng_id=prng_id,
    )


def save_dataset_cache(path, ds: LabeledDataset) -> None:
    name = ds.name.encode("utf-8")
    parts = [
        struct.pack("<H", len(name)),
        name,
        struct.pack("<III", ds.f, ds.k, len(ds)),
        ds.labels.astype("<u4").tobytes(),
        ds.features.astype("<f8").tobytes(),
    ]
    Path(path).write_bytes(_frame(KIND_DATASET, b"".join(parts)))


def load_dataset_cache(path) -> LabeledDataset:
    r = _Reader(_unframe(Path(path).read_bytes(), KIND_DATASET, path), path)
    (name_len,) = r.unpack("<H")
    name = r.take(name_len).decode("utf-8")
    f, k, n = r.unpack("<III")
    labels = np.frombuffer(r.take(4 * n), dtype="<u4").astype(np.int32)
    features = np.frombuffer(r.take(8 * n * f), dtype="<f8").reshape(n, f).copy()
    r.done()
    return LabeledDataset(name, f, k, features, labels)
