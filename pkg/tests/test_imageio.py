import numpy as np
import pytest

from facectl.imageio import (
    image_grid,
    read_image,
    read_label_image,
    write_image,
    write_label_image,
)


def test_value_mapping(tmp_path):
    # pixel p maps to 2p/255 - 1
    img = np.zeros((3, 2, 2), dtype=np.uint8)
    img[:, 0, 0] = 0
    img[:, 0, 1] = 255
    img[:, 1, 0] = 128
    from PIL import Image
    Image.fromarray(img.transpose(1, 2, 0), mode="RGB").save(tmp_path / "p.png")
    arr = read_image(tmp_path / "p.png")
    assert arr[0, 0, 0] == pytest.approx(-1.0)
    assert arr[0, 0, 1] == pytest.approx(1.0)
    assert arr[0, 1, 0] == pytest.approx(2 * 128 / 255 - 1, abs=1e-6)


def test_write_read_write_byte_identical(tmp_path):
    rng = np.random.default_rng(3)
    raw = rng.integers(0, 256, size=(3, 9, 11), dtype=np.uint8)
    from PIL import Image
    p1 = tmp_path / "a.png"
    Image.fromarray(raw.transpose(1, 2, 0), mode="RGB").save(p1)
    arr = read_image(p1)
    p2 = tmp_path / "b.png"
    write_image(p2, arr)
    assert np.array_equal(np.asarray(Image.open(p2)), np.asarray(Image.open(p1)))


def test_array_round_trip_quantization_bound(tmp_path):
    rng = np.random.default_rng(4)
    arr = rng.uniform(-1, 1, size=(3, 16, 16)).astype(np.float32)
    write_image(tmp_path / "q.png", arr)
    back = read_image(tmp_path / "q.png")
    assert np.abs(back - arr).max() <= 1.0 / 255.0 + 1e-7


def test_rejects_non_png(tmp_path):
    with pytest.raises(ValueError):
        write_image(tmp_path / "x.jpg", np.zeros((3, 4, 4)))
    with pytest.raises(ValueError):
        read_image(tmp_path / "x.jpg")


def test_label_round_trip(tmp_path):
    labels = np.arange(12).reshape(3, 4) % 8
    write_label_image(tmp_path / "l.png", labels)
    back = read_label_image(tmp_path / "l.png")
    np.testing.assert_array_equal(back, labels)


def test_grid_layout():
    a = np.zeros((3, 4, 5), dtype=np.float32)
    b = np.ones((3, 4, 5), dtype=np.float32)
    grid = image_grid([a, b], separator=2)
    assert grid.shape == (3, 4, 12)
    assert (grid[:, :, 5:7] == 1.0).all()  # separator is white
