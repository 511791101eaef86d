"""Versioned named-parameter container.

Layout, all integers little-endian:

    magic      4 bytes  b"CODW"
    version    u16
    meta_len   u32, then meta_len bytes of UTF-8 JSON
               {"backbone": {...}, "sinet": {...}, "entries": n}
    n entries, each:
        kind   u8       0 = parameter, 1 = batch-norm buffer
        name   u16 length + UTF-8 bytes
        dtype  u8       0 = float64, 1 = float32
        ndim   u8, then ndim x u32 dims
        payload         little-endian values, row-major
"""

from __future__ import annotations

import io
import json
import os
import pathlib
import struct
import typing as t

import numpy as np
import pydantic as pyd

from codbench.config.model.backbone import BackboneConfig
from codbench.config.model.sinet import SinetConfig
from codbench.helper.mixin import LoggingMixin
from codbench.lib.nn.exceptions import WeightFileError
from codbench.lib.nn.exceptions import WeightVersionError
from codbench.lib.nn.params import SinetParams
from codbench.lib.nn.params import buffer_names
from codbench.lib.nn.params import param_names
from codbench.lib.nn.sinet import sinet_layout
from codbench.lib.tensor import Array
from codbench.lib.tensor import ConvSpec
from codbench.lib.tensor import Tensor
from codbench.lib.tensor import runtime

MAGIC = b"CODW"
VERSION = 1

_KIND_PARAM = 0
_KIND_BUFFER = 1
_DTYPES: dict[int, str] = {0: "<f8", 1: "<f4"}
_CODES: dict[str, int] = {"float64": 0, "float32": 1}


class WeightFile(LoggingMixin):
    """Reads and writes `SinetParams` in the CODW container."""

    __logtag__ = "codbench.lib.nn.weights"

    def __init__(self, path: str | os.PathLike[str]) -> None:
        super().__init__()
        self.path = pathlib.Path(path)

    # ============================================================================
    # Public Methods
    # ============================================================================

    def save(self, params: SinetParams, *, precision: str | None = None) -> pathlib.Path:
        """Write `params`; `precision` defaults to the parameter dtype."""
        entries: list[tuple[int, str, Array]] = [
            (_KIND_PARAM, name, tensor.data) for name, tensor in params.tensors.items()
        ] + [(_KIND_BUFFER, name, arr) for name, arr in params.buffers.items()]

        meta = {
            "backbone": params.backbone.model_dump(mode="json"),
            "sinet": params.sinet.model_dump(mode="json"),
            "entries": len(entries),
        }
        meta_bytes = json.dumps(meta, sort_keys=True).encode("utf-8")

        buf = io.BytesIO()
        buf.write(struct.pack("<4sHI", MAGIC, VERSION, len(meta_bytes)))
        buf.write(meta_bytes)
        for kind, name, arr in entries:
            dtype_name = precision or np.dtype(arr.dtype).name
            if dtype_name not in _CODES:
                raise WeightFileError(path=str(self.path), reason=f"unsupported dtype {dtype_name}")
            code = _CODES[dtype_name]
            name_bytes = name.encode("utf-8")
            buf.write(struct.pack("<BH", kind, len(name_bytes)))
            buf.write(name_bytes)
            buf.write(struct.pack(f"<BB{arr.ndim}I", code, arr.ndim, *arr.shape))
            buf.write(np.ascontiguousarray(arr, dtype=_DTYPES[code]).tobytes())

        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.write_bytes(buf.getvalue())
        self.logger.info(f"Saved {len(entries)} entries ({params.sinet.label}) to {self.path}")
        return self.path

    def load(self) -> SinetParams:
        """Read the file and rebuild parameters in the active precision.

        Raises:
            DataIOError: When the file cannot be read.
            WeightVersionError: On an unsupported version tag.
            WeightFileError: On a bad magic, truncation, or entries that do
                not match the layout the metadata declares.
        """
        try:
            raw = self.path.read_bytes()
        except OSError as e:
            raise WeightFileError(path=str(self.path), reason=str(e)) from e

        reader = _Reader(raw, str(self.path))
        magic, version, meta_len = reader.unpack("<4sHI")
        if magic != MAGIC:
            raise WeightFileError(path=str(self.path), reason=f"bad magic {magic!r}")
        if version != VERSION:
            raise WeightVersionError(path=str(self.path), version=version, supported=VERSION)

        try:
            meta = json.loads(reader.take(meta_len).decode("utf-8"))
            sinet = SinetConfig.model_validate(meta["sinet"])
            backbone = BackboneConfig.model_validate(meta["backbone"])
            count = int(meta["entries"])
        except (ValueError, KeyError, TypeError, pyd.ValidationError) as e:
            raise WeightFileError(path=str(self.path), reason=f"invalid metadata: {e}") from e

        tensors: dict[str, Tensor] = {}
        buffers: dict[str, Array] = {}
        dtype = runtime.dtype()
        for _ in range(count):
            kind, name_len = reader.unpack("<BH")
            name = reader.take(name_len).decode("utf-8")
            code, ndim = reader.unpack("<BB")
            if code not in _DTYPES:
                raise WeightFileError(path=str(self.path), reason=f"{name}: unknown dtype code {code}")
            shape = reader.unpack(f"<{ndim}I")
            item = np.dtype(_DTYPES[code])
            size = int(np.prod(shape, dtype=np.int64))
            arr = np.frombuffer(reader.take(size * item.itemsize), dtype=item).reshape(shape)
            if kind == _KIND_PARAM:
                tensors[name] = Tensor.parameter(arr, name=name)
            elif kind == _KIND_BUFFER:
                buffers[name] = arr.astype(dtype)
            else:
                raise WeightFileError(path=str(self.path), reason=f"{name}: unknown entry kind {kind}")
        if reader.remaining:
            raise WeightFileError(path=str(self.path), reason=f"{reader.remaining} trailing bytes")

        specs = sinet_layout(sinet, backbone)
        self._check_layout(specs, tensors, buffers)
        self.logger.info(f"Loaded {count} entries ({sinet.label}) from {self.path}")
        return SinetParams(sinet=sinet, backbone=backbone, specs=specs, tensors=tensors, buffers=buffers)

    # ============================================================================
    # Private Methods
    # ============================================================================

    def _check_layout(
        self,
        specs: t.Mapping[str, ConvSpec],
        tensors: t.Mapping[str, Tensor],
        buffers: t.Mapping[str, Array],
    ) -> None:
        expected: dict[str, tuple[int, ...]] = {}
        for unit, spec in specs.items():
            for name in param_names(unit, spec) + buffer_names(unit, spec):
                expected[name] = spec.weight_shape if name.endswith(".weight") else (spec.out_channels,)
        got = {n: p.shape for n, p in tensors.items()}
        got.update({n: b.shape for n, b in buffers.items()})
        missing = sorted(set(expected) - set(got))
        extra = sorted(set(got) - set(expected))
        if missing or extra:
            raise WeightFileError(
                path=str(self.path),
                reason=f"layout mismatch: missing {missing[:5]}, unexpected {extra[:5]}",
            )
        for name, shape in expected.items():
            if got[name] != shape:
                raise WeightFileError(path=str(self.path), reason=f"{name}: shape {got[name]}, expected {shape}")


class _Reader:
    __slots__ = ("_data", "_offset", "_path")

    def __init__(self, data: bytes, path: str) -> None:
        self._data = data
        self._offset = 0
        self._path = path

    @property
    def remaining(self) -> int:
        return len(self._data) - self._offset

    def take(self, n: int) -> bytes:
        if n > self.remaining:
            raise WeightFileError(path=self._path, reason="truncated file")
        chunk = self._data[self._offset : self._offset + n]
        self._offset += n
        return chunk

    def unpack(self, fmt: str) -> tuple[t.Any, ...]:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def save_weights(params: SinetParams, path: str | os.PathLike[str], *, precision: str | None = None) -> pathlib.Path:
    return WeightFile(path).save(params, precision=precision)


def load_weights(path: str | os.PathLike[str]) -> SinetParams:
    return WeightFile(path).load()
