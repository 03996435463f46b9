import csv

import numpy as np

from oslo.ops import KERNEL_CSV_HEADER, Kernel, kernel_rows, tap_positions, write_kernel_csv


def test_tap_positions():
    positions = tap_positions(3)
    assert set(positions) == {"C", "SW", "W", "NW", "N", "NE", "E", "SE", "S"}
    assert positions["C"] == (0.0, 0.0)
    for label, (dx, dy) in positions.items():
        if label != "C":
            assert np.hypot(dx, dy) > 0.0


def test_kernel_rows_layout(rng):
    kernel = Kernel.create("enc", 2, 3, rng=rng)
    rows = kernel_rows([("enc.0", kernel)], 3)
    assert rows[0] == KERNEL_CSV_HEADER
    assert len(rows) == 1 + 3 * 2 * 9
    first = rows[1]
    assert first[:4] == ("enc.0", "0", "0", "C")
    assert np.isclose(float(first[6]), kernel.theta.values[0, 0, 0])


def test_write_kernel_csv(tmp_path, rng):
    path = tmp_path / "kernels.csv"
    kernels = [("a", Kernel.create("a", 1, 1, rng=rng)), ("b", Kernel.create("b", 1, 2, rng=rng))]
    written = write_kernel_csv(path, kernels, 2)
    assert written == 9 + 18
    with open(path, newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    assert tuple(rows[0]) == KERNEL_CSV_HEADER
    assert len(rows) == written + 1
    assert {row[0] for row in rows[1:]} == {"a", "b"}
