from pathlib import Path

import numpy as np
import pytest

from oslo.codec import CodecConfig, CodecModel
from oslo.geometry import pix2ang_array
from oslo.tensor import SphereMap, set_debug


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def debug_mode():
    set_debug(True)
    yield
    set_debug(False)


def harmonic_erp(width: int, height: int) -> np.ndarray:
    """A smooth 3-channel ERP built from low-order spherical harmonics."""
    v, u = np.meshgrid(np.arange(height), np.arange(width), indexing="ij")
    theta = np.pi * (v + 0.5) / height
    phi = 2.0 * np.pi * (u + 0.5) / width
    x = np.sin(theta) * np.cos(phi)
    y = np.sin(theta) * np.sin(phi)
    z = np.cos(theta)
    channels = [
        0.5 + 0.25 * z + 0.1 * x * y,
        0.5 + 0.2 * x - 0.1 * (3.0 * z**2 - 1.0) / 2.0,
        0.5 + 0.15 * y + 0.1 * x * z,
    ]
    return np.stack(channels, axis=-1)


@pytest.fixture
def smooth_erp():
    return harmonic_erp(256, 128)


def numeric_gradient(fn, array: np.ndarray, step: float = 1e-5) -> np.ndarray:
    """Central finite differences of fn() with respect to array, in place."""
    grad = np.zeros_like(array)
    for index in np.ndindex(array.shape):
        original = array[index]
        array[index] = original + step
        plus = float(fn())
        array[index] = original - step
        minus = float(fn())
        array[index] = original
        grad[index] = (plus - minus) / (2.0 * step)
    return grad


@pytest.fixture
def numeric_grad():
    return numeric_gradient


FIXTURES = Path(__file__).parent / "codec" / "fixtures"


@pytest.fixture
def toy_config():
    return CodecConfig.load(FIXTURES / "toy.json")


@pytest.fixture
def toy_model(toy_config):
    return CodecModel.create(toy_config.arch, seed=3)


@pytest.fixture
def toy_maps():
    """Four smooth 3-channel maps at order 3."""
    theta, phi = pix2ang_array(3, np.arange(768))
    maps = []
    for shift in range(4):
        x = np.sin(theta) * np.cos(phi + shift)
        z = np.cos(theta)
        data = np.stack([0.5 + 0.3 * x, 0.5 + 0.2 * z, 0.5 + 0.1 * x * z])
        maps.append(SphereMap(data, 3))
    return maps
