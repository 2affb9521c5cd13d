import numpy as np
import pytest

from facectl.container import ContainerError, load_container, save_container


def test_round_trip(tmp_path):
    arrays = {
        "a": np.arange(12, dtype=np.float32).reshape(3, 4),
        "b": np.array([1, 2, 3], dtype=np.int32),
    }
    path = tmp_path / "data.npz"
    save_container(path, arrays, metadata={"kind": "test", "n": 3})
    loaded, meta = load_container(path)
    assert meta == {"kind": "test", "n": 3}
    for k in arrays:
        np.testing.assert_array_equal(loaded[k], arrays[k])
        assert loaded[k].dtype == arrays[k].dtype


def test_save_load_save_byte_identical(tmp_path):
    arrays = {"x": np.random.default_rng(0).normal(size=(5, 7)).astype(np.float32)}
    p1, p2 = tmp_path / "a.npz", tmp_path / "b.npz"
    save_container(p1, arrays, metadata={"v": 1})
    loaded, meta = load_container(p1)
    save_container(p2, loaded, metadata=meta)
    assert p1.read_bytes() == p2.read_bytes()


def test_numpy_can_read_entries(tmp_path):
    path = tmp_path / "c.npz"
    save_container(path, {"arr": np.ones((2, 2), dtype=np.float64)}, metadata={})
    with np.load(path) as z:
        np.testing.assert_array_equal(z["arr"], np.ones((2, 2)))


def test_truncated_file_rejected(tmp_path):
    path = tmp_path / "t.npz"
    save_container(path, {"x": np.zeros(100, dtype=np.float64)}, metadata={})
    data = path.read_bytes()
    path.write_bytes(data[: len(data) // 2])
    with pytest.raises(ContainerError):
        load_container(path)


def test_missing_file_rejected(tmp_path):
    with pytest.raises(ContainerError):
        load_container(tmp_path / "nope.npz")


def test_garbage_file_rejected(tmp_path):
    path = tmp_path / "g.npz"
    path.write_bytes(b"not a zip at all")
    with pytest.raises(ContainerError):
        load_container(path)
