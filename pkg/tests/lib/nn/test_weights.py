from __future__ import annotations

import struct

import numpy as np
import pytest

from codbench.exceptions import DataIOError
from codbench.lib.nn import WeightFileError
from codbench.lib.nn import WeightVersionError
from codbench.lib.nn import load_weights
from codbench.lib.nn import save_weights
from codbench.lib.nn import sinet_forward
from codbench.lib.tensor import Tensor


class TestWeightFile:
    """Test the versioned parameter container."""

    @pytest.fixture
    def saved(self, tiny_params, temp_dir):
        return save_weights(tiny_params, temp_dir / "w.codw")

    def test_round_trip(self, tiny_params, saved):
        """Test that every tensor, buffer and the architecture survive."""
        loaded = load_weights(saved)
        assert loaded.sinet == tiny_params.sinet
        assert loaded.backbone == tiny_params.backbone
        assert list(loaded.specs) == list(tiny_params.specs)
        for name, tensor in tiny_params.tensors.items():
            np.testing.assert_array_equal(loaded.tensors[name].data, tensor.data)
        for name, arr in tiny_params.buffers.items():
            np.testing.assert_array_equal(loaded.buffers[name], arr)

    def test_round_trip_same_outputs(self, tiny_params, saved, rng):
        image = Tensor(rng.standard_normal((1, 3, 64, 64)))
        before = sinet_forward(image, tiny_params).c3_up.data
        after = sinet_forward(image, load_weights(saved)).c3_up.data
        np.testing.assert_array_equal(after, before)

    def test_header(self, saved):
        magic, version, _ = struct.unpack_from("<4sHI", saved.read_bytes())
        assert magic == b"CODW"
        assert version == 1

    def test_float32_payload(self, tiny_params, temp_dir, saved):
        """Test that single precision halves the payload and stays close."""
        small = save_weights(tiny_params, temp_dir / "w32.codw", precision="float32")
        assert small.stat().st_size < saved.stat().st_size
        loaded = load_weights(small)
        name = "tem3.cat.conv.weight"
        np.testing.assert_allclose(loaded.tensors[name].data, tiny_params.tensors[name].data, rtol=1e-6)

    def test_unknown_version(self, saved):
        raw = bytearray(saved.read_bytes())
        struct.pack_into("<H", raw, 4, 7)
        saved.write_bytes(bytes(raw))
        with pytest.raises(WeightVersionError) as excinfo:
            load_weights(saved)
        assert excinfo.value.version == 7

    def test_bad_magic(self, saved):
        saved.write_bytes(b"XXXX" + saved.read_bytes()[4:])
        with pytest.raises(WeightFileError):
            load_weights(saved)

    def test_truncated(self, saved):
        saved.write_bytes(saved.read_bytes()[:-3])
        with pytest.raises(WeightFileError):
            load_weights(saved)

    def test_trailing_bytes(self, saved):
        saved.write_bytes(saved.read_bytes() + b"\x00")
        with pytest.raises(WeightFileError):
            load_weights(saved)

    def test_missing_file_is_io_error(self, temp_dir):
        """Test that weight errors share the I/O exit category."""
        with pytest.raises(DataIOError):
            load_weights(temp_dir / "absent.codw")
