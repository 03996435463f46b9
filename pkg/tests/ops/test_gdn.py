import numpy as np
import pytest

from oslo.geometry import npix
from oslo.ops import BETA_MIN, GdnParams, gdn
from oslo.tensor import (
    ElementwiseOp,
    Parameter,
    ReduceOp,
    SphereMap,
    Tape,
    backward,
    elementwise,
    reduce,
)


def params(beta, gamma):
    return GdnParams(
        beta=Parameter("gdn.beta", np.asarray(beta, dtype=float)),
        gamma=Parameter("gdn.gamma", np.asarray(gamma, dtype=float)),
    )


@pytest.mark.parametrize("inverse", [False, True])
def test_unit_beta_zero_gamma_is_identity(rng, inverse):
    x = SphereMap(rng.normal(size=(3, npix(1))), 1)
    result = gdn(x, params(np.ones(3), np.zeros((3, 3))), inverse=inverse)
    np.testing.assert_allclose(result.data, x.data)


def test_inverse_undoes_diagonal_gdn(rng):
    x = SphereMap(rng.normal(size=(3, npix(1))), 1)
    layer = params([0.5, 2.0, 4.0], np.zeros((3, 3)))
    restored = gdn(gdn(x, layer), layer, inverse=True)
    np.testing.assert_allclose(restored.data, x.data, atol=1e-12)


def test_gdn_value(rng):
    x = SphereMap(np.array([[3.0] * 48, [4.0] * 48]), 1)
    layer = params([1.0, 1.0], [[1.0, 0.0], [0.0, 0.0]])
    result = gdn(x, layer)
    np.testing.assert_allclose(result.data[0], 3.0 / np.sqrt(10.0))
    np.testing.assert_allclose(result.data[1], 4.0)


def test_create_defaults():
    layer = GdnParams.create("g", 4)
    np.testing.assert_array_equal(layer.beta.values, 1.0)
    np.testing.assert_allclose(layer.gamma.values, 0.1 * np.eye(4))


def test_project_clamps_parameters():
    layer = params([1.0, 1.0], np.eye(2))
    layer.beta.values[0] = -3.0
    layer.gamma.values[0, 1] = -0.5
    layer.project()
    assert layer.beta.values[0] == BETA_MIN
    assert layer.gamma.values[0, 1] == 0.0


def test_shape_validation():
    with pytest.raises(ValueError, match="beta"):
        params(np.ones(2), np.zeros((3, 3)))


def test_channel_mismatch(rng):
    x = SphereMap(rng.normal(size=(2, npix(1))), 1)
    with pytest.raises(ValueError, match="channels"):
        gdn(x, GdnParams.create("g", 3))


# Test gradients through GDN and IGDN
@pytest.mark.parametrize("inverse", [False, True])
def test_gdn_gradients(rng, numeric_grad, inverse):
    x = SphereMap(rng.normal(size=(3, npix(1))), 1)
    layer = params(rng.uniform(0.5, 1.5, 3), rng.uniform(0.05, 0.3, (3, 3)))
    weights = rng.normal(size=(3, npix(1)))

    def build():
        return reduce(
            ReduceOp.SUM, elementwise(ElementwiseOp.MUL, gdn(x, layer, inverse=inverse), weights)
        )

    with Tape() as tape:
        loss = build()
    backward(tape, loss)
    value = lambda: build().item()  # noqa: E731
    np.testing.assert_allclose(x.grad, numeric_grad(value, x.data), rtol=1e-4, atol=1e-9)
    np.testing.assert_allclose(
        layer.beta.grad, numeric_grad(value, layer.beta.values), rtol=1e-4, atol=1e-9
    )
    np.testing.assert_allclose(
        layer.gamma.grad, numeric_grad(value, layer.gamma.values), rtol=1e-4, atol=1e-9
    )
