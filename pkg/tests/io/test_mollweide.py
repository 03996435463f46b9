import numpy as np
import pytest

from oslo.geometry import Order, all_pixels, npix, pix2ang_array
from oslo.io import mollweide_inverse, mollweide_render
from oslo.tensor import SphereMap


def test_constant_map_fills_ellipse():
    raster = mollweide_render(SphereMap(np.full((1, npix(2)), 0.4), 2), 64)
    assert raster.pixels.shape == (32, 64, 1)
    np.testing.assert_array_equal(raster.pixels[raster.mask], 0.4)
    np.testing.assert_array_equal(raster.pixels[~raster.mask], 0.0)
    assert not raster.mask[0, 0] and raster.mask[16, 32]


def test_ellipse_area():
    _, _, mask = mollweide_inverse(400, 200)
    assert abs(mask.mean() - np.pi / 4) < 0.01


def test_north_pole_renders_top_center():
    order = Order(3)
    theta, _ = pix2ang_array(order, all_pixels(order))
    data = (theta < 0.15).astype(np.float64)[None, :]
    raster = mollweide_render(SphereMap(data, order), 128)
    rows, columns = np.nonzero(raster.pixels[:, :, 0])
    assert rows.size > 0
    assert rows.max() < 8
    assert np.abs(columns - 64).max() < 40


def test_pixel_index_map_shows_every_pixel():
    data = np.arange(48.0)[None, :]
    raster = mollweide_render(SphereMap(data, 1), 512)
    assert np.unique(raster.pixels[raster.mask]).size == 48


def test_center_is_longitude_zero():
    theta, phi, mask = mollweide_inverse(65, 33)
    assert mask[16, 32]
    assert abs(theta[16, 32] - np.pi / 2) < 1e-12
    assert min(phi[16, 32], 2 * np.pi - phi[16, 32]) < 1e-12


def test_rgba_output():
    raster = mollweide_render(SphereMap(np.ones((3, 48)), 1), 16)
    rgba = raster.to_rgba()
    assert rgba.shape == (8, 16, 4)
    np.testing.assert_array_equal(rgba[:, :, 3], raster.mask)


@pytest.mark.parametrize("channels", [2, 4])
def test_channel_count_is_checked(channels):
    with pytest.raises(ValueError, match="1 or 3 channels"):
        mollweide_render(SphereMap(np.ones((channels, 48)), 1), 16)
