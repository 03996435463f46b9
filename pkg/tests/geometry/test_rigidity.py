import io
import math

import numpy as np
import pytest

from oslo.geometry import (
    Direction,
    DIRECTIONS,
    Grid,
    Order,
    PixelId,
    TangentOffset,
    all_pixels,
    erp_rigidity_statistics,
    npix,
    pix2vec_array,
    rigidity_statistics,
    tangent_offset_arrays,
    tangent_offsets,
)

TABLE_II_HEALPIX = {
    Direction.SW: 11.21,
    Direction.W: 10.28,
    Direction.NW: 11.21,
    Direction.N: 13.90,
    Direction.NE: 11.21,
    Direction.E: 10.28,
    Direction.SE: 11.21,
    Direction.S: 13.90,
}


@pytest.fixture(scope="module")
def equator_offsets():
    order = 6
    indices = all_pixels(order)
    on_equator = indices[np.abs(pix2vec_array(order, indices)[:, 2]) < 1e-12]
    return tangent_offset_arrays(order, on_equator)


# Test the orientation of the tangent frame
def test_north_neighbor_points_north_on_equator(equator_offsets):
    north = equator_offsets[:, Direction.N.slot, :]
    np.testing.assert_allclose(north[:, 0], 0.0, atol=1e-12)
    assert (north[:, 1] > 0.0).all()


def test_offsets_are_antisymmetric_on_equator(equator_offsets):
    for direction in DIRECTIONS:
        forward = equator_offsets[:, direction.slot, :]
        backward = equator_offsets[:, direction.opposite.slot, :]
        gap = np.linalg.norm(forward + backward, axis=1)
        assert (gap <= 0.1 * np.linalg.norm(forward, axis=1)).all()


def test_east_distance_matches_pixel_spacing():
    offsets = tangent_offsets(PixelId(npix(6) // 2 + 5, Order(6)))
    spacing = math.sqrt(4.0 * math.pi / npix(6))
    assert 0.5 < offsets[Direction.E.slot].distance / spacing < 2.0


def test_tangent_offsets_mark_missing_neighbor():
    table_offsets = tangent_offset_arrays(1, all_pixels(1))
    missing = np.isnan(table_offsets[:, :, 0])
    assert missing.sum() == 24
    pixel = int(np.flatnonzero(missing.any(axis=1))[0])
    offsets = tangent_offsets(PixelId(pixel, Order(1)))
    assert sum(offset is None for offset in offsets) == 1


def test_tangent_offset_rejects_non_finite():
    with pytest.raises(ValueError, match="finite"):
        TangentOffset(math.nan, 0.0)


def test_tangent_offsets_stay_below_half_pi():
    offsets = tangent_offset_arrays(2, all_pixels(2))
    distances = np.hypot(offsets[..., 0], offsets[..., 1])
    assert np.nanmax(distances) < math.pi / 2


# Test the mirror symmetries of the HEALPix statistics
def test_rigidity_mirror_symmetry():
    report = rigidity_statistics(6)
    assert report.grid == Grid.HEALPIX
    assert not report.sampled
    assert report[Direction.E].rel_std_pct == pytest.approx(
        report[Direction.W].rel_std_pct, abs=0.05
    )
    assert report[Direction.N].rel_std_pct == pytest.approx(
        report[Direction.S].rel_std_pct, abs=0.05
    )
    diagonals = [
        report[d].rel_std_pct
        for d in (Direction.SW, Direction.NW, Direction.NE, Direction.SE)
    ]
    assert max(diagonals) - min(diagonals) < 0.05


def test_full_sample_equals_enumeration():
    assert rigidity_statistics(3) == rigidity_statistics(3, sample_size=npix(3))


def test_partial_sample_is_deterministic():
    first = rigidity_statistics(4, sample_size=500, seed=7)
    second = rigidity_statistics(4, sample_size=500, seed=7)
    assert first.sampled
    assert first == second
    assert first[Direction.N].count <= 500


@pytest.mark.parametrize("order, sample_size", [(0, None), (3, 0)])
def test_rigidity_rejects_invalid_arguments(order, sample_size):
    with pytest.raises(ValueError):
        rigidity_statistics(order, sample_size=sample_size)


def test_report_csv_layout():
    buffer = io.StringIO()
    rigidity_statistics(2).write_csv(buffer)
    lines = buffer.getvalue().splitlines()
    assert lines[0] == "direction,mean_dist,std_dist,rel_std_pct"
    assert [line.split(",")[0] for line in lines[1:]] == [
        d.name for d in DIRECTIONS
    ] + ["mean"]


# Test the ERP column of the regularity table
def test_erp_rigidity():
    report = erp_rigidity_statistics(2508, 5016)
    assert report.grid == Grid.ERP
    assert report[Direction.N].rel_std_pct == 0.0
    assert report[Direction.S].rel_std_pct == 0.0
    assert report.mean_rel_std_pct == pytest.approx(18.09, abs=0.3)


def test_erp_rigidity_rejects_tiny_grid():
    with pytest.raises(ValueError, match="at least 2x2"):
        erp_rigidity_statistics(1, 4)


@pytest.mark.slow
def test_healpix_rigidity_order_10():
    report = rigidity_statistics(10)
    assert report.sampled
    for direction, expected in TABLE_II_HEALPIX.items():
        assert report[direction].rel_std_pct == pytest.approx(expected, abs=0.3)
    assert report.mean_rel_std_pct == pytest.approx(11.65, abs=0.3)
