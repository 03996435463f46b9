import math

import numpy as np
import pytest
from scipy import stats

from oslo.geometry import (
    Order,
    PixelId,
    SphericalPoint,
    all_pixels,
    ang2pix,
    ang2pix_array,
    nest2xyf,
    npix,
    pix2ang,
    pix2ang_array,
    pix2vec,
    pix2vec_array,
    xyf2nest,
)

JRLL = [2, 2, 2, 2, 3, 3, 3, 3, 4, 4, 4, 4]
JPLL = [1, 3, 5, 7, 0, 2, 4, 6, 1, 3, 5, 7]


def reference_z_phi(order: int, index: int):
    """Loop transcription of the nested pixel-center formulas."""
    nside = 1 << order
    npface = nside * nside
    total = 12 * npface
    face, in_face = divmod(index, npface)
    ix = iy = 0
    for bit in range(order):
        ix |= ((in_face >> (2 * bit)) & 1) << bit
        iy |= ((in_face >> (2 * bit + 1)) & 1) << bit
    jr = JRLL[face] * nside - ix - iy - 1
    if jr < nside:
        nr = jr
        z = 1.0 - nr * nr * 4.0 / total
        kshift = 0
    elif jr > 3 * nside:
        nr = 4 * nside - jr
        z = nr * nr * 4.0 / total - 1.0
        kshift = 0
    else:
        nr = nside
        z = (2 * nside - jr) * 8.0 * nside / total
        kshift = (jr - nside) & 1
    jp = (JPLL[face] * nr + ix - iy + 1 + kshift) // 2
    if jp > 4 * nside:
        jp -= 4 * nside
    if jp < 1:
        jp += 4 * nside
    phi = (jp - (kshift + 1) * 0.5) * (0.5 * math.pi / nr)
    return z, phi


def test_pixel_0_center():
    point = pix2ang(PixelId(0, Order(0)))
    assert point.theta == pytest.approx(0.8410686705679303, abs=1e-15)
    assert point.phi == pytest.approx(math.pi / 4, abs=1e-15)


def test_spherical_point_wraps_longitude():
    assert SphericalPoint(1.0, -math.pi / 2).phi == pytest.approx(1.5 * math.pi)
    assert SphericalPoint(1.0, 2.0 * math.pi).phi == 0.0


@pytest.mark.parametrize("theta, phi", [(-0.1, 0.0), (4.0, 0.0), (math.nan, 0.0)])
def test_spherical_point_rejects_invalid_angles(theta, phi):
    with pytest.raises(ValueError):
        SphericalPoint(theta, phi)


# Test the north/south symmetry of the grid
def test_sum_of_cos_theta_vanishes():
    theta, _ = pix2ang_array(2, all_pixels(2))
    assert abs(np.cos(theta).sum()) < 1e-9


@pytest.mark.parametrize("order", range(0, 5))
def test_pix2ang_matches_loop_transcription(order):
    theta, phi = pix2ang_array(order, all_pixels(order))
    for index in range(npix(order)):
        z, expected_phi = reference_z_phi(order, index)
        assert math.cos(theta[index]) == pytest.approx(z, abs=1e-12)
        assert phi[index] == pytest.approx(expected_phi, abs=1e-12)


@pytest.mark.parametrize("order", range(0, 5))
def test_pix2ang_matches_healpy(order):
    healpy = pytest.importorskip("healpy")
    theta, phi = pix2ang_array(order, all_pixels(order))
    expected_theta, expected_phi = healpy.pix2ang(
        1 << order, np.arange(npix(order)), nest=True
    )
    np.testing.assert_allclose(theta, expected_theta, rtol=0, atol=1e-12)
    np.testing.assert_allclose(phi, expected_phi, rtol=0, atol=1e-12)


def test_pix2vec_unit_norm(rng):
    indices = rng.integers(0, npix(8), size=1000)
    vectors = pix2vec_array(8, indices)
    np.testing.assert_allclose(np.linalg.norm(vectors, axis=1), 1.0, atol=1e-12)
    assert np.linalg.norm(pix2vec(PixelId(17, Order(3)))) == pytest.approx(1.0)


def test_nest_xyf_round_trip():
    indices = all_pixels(4)
    ix, iy, face = nest2xyf(4, indices)
    assert ix.max() == 15 and iy.max() == 15 and face.max() == 11
    np.testing.assert_array_equal(xyf2nest(4, ix, iy, face), indices)


# Test the exhaustive center round trip
@pytest.mark.parametrize("order", range(0, 7))
def test_ang2pix_inverts_pix2ang(order):
    indices = all_pixels(order)
    theta, phi = pix2ang_array(order, indices)
    np.testing.assert_array_equal(ang2pix_array(order, theta, phi), indices)


def test_ang2pix_scalar():
    pixel = PixelId(1234, Order(5))
    assert ang2pix(pix2ang(pixel), 5) == pixel


def test_ang2pix_rejects_non_point():
    with pytest.raises(ValueError, match="SphericalPoint"):
        ang2pix((0.0, 0.0), 3)


@pytest.mark.parametrize("phi", [0.0, 1.0, 4.0])
def test_north_pole_lands_in_northernmost_face_pixel(phi):
    order = 3
    pixel = ang2pix(SphericalPoint(0.0, phi), order)
    face = pixel.index >> (2 * order)
    face_pixels = np.arange(face << (2 * order), (face + 1) << (2 * order))
    theta, _ = pix2ang_array(order, face_pixels)
    assert pix2ang(pixel).theta == pytest.approx(theta.min())


def test_ang2pix_matches_healpy_on_random_points(rng):
    healpy = pytest.importorskip("healpy")
    theta = np.arccos(rng.uniform(-1.0, 1.0, size=100_000))
    phi = rng.uniform(0.0, 2.0 * math.pi, size=100_000)
    expected = healpy.ang2pix(1 << 6, theta, phi, nest=True)
    np.testing.assert_array_equal(ang2pix_array(6, theta, phi), expected)


# Test the equal-area property by containment counting
@pytest.mark.parametrize("order", range(1, 5))
def test_equal_area_containment(rng, order):
    theta = np.arccos(rng.uniform(-1.0, 1.0, size=1_000_000))
    phi = rng.uniform(0.0, 2.0 * math.pi, size=1_000_000)
    counts = np.bincount(ang2pix_array(order, theta, phi), minlength=npix(order))
    assert counts.shape[0] == npix(order)
    assert stats.chisquare(counts).pvalue > 0.001
