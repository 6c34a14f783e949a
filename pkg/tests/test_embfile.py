"""Binary embedding file round trips and corruption detection."""

import struct

import numpy as np
import pytest

from tcgat.embfile import MAGIC, EmbeddingFileError, read_embeddings, write_embeddings


def rand_entries(rng, dim, lengths, prefix="s"):
    return [(f"{prefix}{k}", rng.standard_normal((n, dim)).astype(np.float32))
            for k, n in enumerate(lengths)]


class TestRoundTrip:
    def test_values_bit_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        entries = rand_entries(rng, dim=5, lengths=[3, 1, 7])
        path = tmp_path / "vectors.bin"
        write_embeddings(path, entries, dim=5)
        dim, table = read_embeddings(path)
        assert dim == 5
        assert list(table) == ["s0", "s1", "s2"]
        for sid, arr in entries:
            assert table[sid].dtype == np.float32
            assert table[sid].tobytes() == arr.tobytes()

    def test_large_vectors(self, tmp_path):
        rng = np.random.default_rng(1)
        entries = rand_entries(rng, dim=768, lengths=[50])
        path = tmp_path / "big.bin"
        write_embeddings(path, entries, dim=768)
        dim, table = read_embeddings(path)
        assert dim == 768
        assert table["s0"].shape == (50, 768)
        assert np.array_equal(table["s0"], entries[0][1])

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.bin"
        write_embeddings(path, [], dim=4)
        dim, table = read_embeddings(path)
        assert dim == 4
        assert table == {}

    def test_unicode_id(self, tmp_path):
        arr = np.ones((2, 3), dtype=np.float32)
        path = tmp_path / "uni.bin"
        write_embeddings(path, [("sätz-1", arr)], dim=3)
        _, table = read_embeddings(path)
        assert "sätz-1" in table

    def test_special_values_survive(self, tmp_path):
        arr = np.array([[np.float32(1) / 3, -0.0, 1e-30]], dtype=np.float32)
        path = tmp_path / "sv.bin"
        write_embeddings(path, [("x", arr)], dim=3)
        _, table = read_embeddings(path)
        assert table["x"].tobytes() == arr.tobytes()


class TestWriterValidation:
    def test_wrong_dim(self, tmp_path):
        arr = np.zeros((2, 4), dtype=np.float32)
        with pytest.raises(EmbeddingFileError, match="expected"):
            write_embeddings(tmp_path / "f.bin", [("s", arr)], dim=5)

    def test_wrong_rank(self, tmp_path):
        arr = np.zeros(5, dtype=np.float32)
        with pytest.raises(EmbeddingFileError, match="expected"):
            write_embeddings(tmp_path / "f.bin", [("s", arr)], dim=5)

    def test_zero_tokens(self, tmp_path):
        arr = np.zeros((0, 5), dtype=np.float32)
        with pytest.raises(EmbeddingFileError, match="out of range"):
            write_embeddings(tmp_path / "f.bin", [("s", arr)], dim=5)

    def test_duplicate_id(self, tmp_path):
        arr = np.zeros((1, 2), dtype=np.float32)
        with pytest.raises(EmbeddingFileError, match="duplicate"):
            write_embeddings(tmp_path / "f.bin", [("s", arr), ("s", arr)], dim=2)

    def test_empty_id(self, tmp_path):
        arr = np.zeros((1, 2), dtype=np.float32)
        with pytest.raises(EmbeddingFileError, match="length out of range"):
            write_embeddings(tmp_path / "f.bin", [("", arr)], dim=2)


class TestReaderValidation:
    def write_valid(self, tmp_path):
        rng = np.random.default_rng(2)
        path = tmp_path / "v.bin"
        write_embeddings(path, rand_entries(rng, dim=3, lengths=[2, 4]), dim=3)
        return path

    def test_bad_magic(self, tmp_path):
        path = self.write_valid(tmp_path)
        blob = bytearray(path.read_bytes())
        blob[0] ^= 0xFF
        path.write_bytes(bytes(blob))
        with pytest.raises(EmbeddingFileError, match="magic"):
            read_embeddings(path)

    def test_too_short(self, tmp_path):
        path = tmp_path / "short.bin"
        path.write_bytes(MAGIC + b"\x00\x00")
        with pytest.raises(EmbeddingFileError, match="too short"):
            read_embeddings(path)

    def test_truncated_vectors(self, tmp_path):
        path = self.write_valid(tmp_path)
        blob = path.read_bytes()
        path.write_bytes(blob[:-5])
        with pytest.raises(EmbeddingFileError, match="truncated"):
            read_embeddings(path)

    def test_truncated_header(self, tmp_path):
        path = tmp_path / "h.bin"
        path.write_bytes(MAGIC + struct.pack("<II", 3, 1))
        with pytest.raises(EmbeddingFileError, match="truncated sentence header"):
            read_embeddings(path)

    def test_truncated_id(self, tmp_path):
        path = tmp_path / "i.bin"
        path.write_bytes(MAGIC + struct.pack("<II", 3, 1) + struct.pack("<H", 9) + b"ab")
        with pytest.raises(EmbeddingFileError, match="truncated sentence id"):
            read_embeddings(path)

    def test_trailing_bytes(self, tmp_path):
        path = self.write_valid(tmp_path)
        path.write_bytes(path.read_bytes() + b"junk")
        with pytest.raises(EmbeddingFileError, match="trailing"):
            read_embeddings(path)

    def test_duplicate_ids_in_file(self, tmp_path):
        arr = np.zeros((1, 2), dtype=np.float32)
        body = b""
        for _ in range(2):
            body += struct.pack("<H", 1) + b"s" + struct.pack("<H", 1) + arr.tobytes()
        path = tmp_path / "dup.bin"
        path.write_bytes(MAGIC + struct.pack("<II", 2, 2) + body)
        with pytest.raises(EmbeddingFileError, match="duplicate"):
            read_embeddings(path)
