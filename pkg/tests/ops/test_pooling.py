import numpy as np
import pytest

from oslo.geometry import Order, PixelId, descendants, npix
from oslo.ops import PoolMode, crop_patch, make_patch, pool, upsample_nearest
from oslo.tensor import ElementwiseOp, ReduceOp, SphereMap, Tape, backward, elementwise, reduce


# Test pooling a block of four children
@pytest.mark.parametrize("mode, expected", [(PoolMode.MAX, 4.0), (PoolMode.AVERAGE, 2.5)])
def test_pool_children(mode, expected):
    x = SphereMap(np.array([[1.0, 2.0, 3.0, 4.0] * 12]), 1)
    result = pool(x, mode)
    assert result.order == Order(0)
    np.testing.assert_array_equal(result.data, expected)


@pytest.mark.parametrize("mode", list(PoolMode))
def test_pool_matches_descendant_loop(rng, mode):
    order, levels = 3, 2
    x = SphereMap(rng.normal(size=(2, npix(order))), order)
    expected = np.empty((2, npix(order - levels)))
    for i in range(npix(order - levels)):
        children = [p.index for p in descendants(PixelId(i, Order(order - levels)), levels)]
        block = x.data[:, children]
        expected[:, i] = block.max(axis=1) if mode == PoolMode.MAX else block.mean(axis=1)
    np.testing.assert_allclose(pool(x, mode, levels).data, expected, atol=1e-12)


@pytest.mark.parametrize("mode", list(PoolMode))
def test_pool_upsample_pool_is_idempotent(rng, mode):
    x = SphereMap(rng.normal(size=(3, npix(3))), 3)
    once = pool(x, mode)
    np.testing.assert_allclose(pool(upsample_nearest(once), mode).data, once.data)


def test_upsample_nearest_copies_values(rng):
    x = SphereMap(rng.normal(size=(1, npix(1))), 1)
    result = upsample_nearest(x, 2)
    assert result.order == Order(3)
    np.testing.assert_array_equal(result.data[0, 16:32], x.data[0, 1])


def test_pool_rejects_too_many_levels(rng):
    x = SphereMap(rng.normal(size=(1, npix(1))), 1)
    with pytest.raises(ValueError, match="Cannot pool"):
        pool(x, PoolMode.MAX, 2)


def test_pool_on_patch_coarsens_patch(rng):
    patch = make_patch(3, 4, rng_seed=5)
    x = crop_patch(SphereMap(rng.normal(size=(1, npix(3))), 3), patch)
    result = pool(x, PoolMode.AVERAGE)
    assert result.patch == patch.coarsen(1)
    assert result.npix == 4
    with pytest.raises(ValueError, match="Cannot pool"):
        pool(x, PoolMode.AVERAGE, 3)


# Test gradients through pooling
@pytest.mark.parametrize("mode", list(PoolMode))
def test_pool_gradient(rng, numeric_grad, mode):
    x = SphereMap(rng.normal(size=(2, npix(2))), 2)
    weights = rng.normal(size=(2, npix(1)))

    def build():
        return reduce(ReduceOp.SUM, elementwise(ElementwiseOp.MUL, pool(x, mode), weights))

    with Tape() as tape:
        loss = build()
    backward(tape, loss)
    np.testing.assert_allclose(
        x.grad, numeric_grad(lambda: build().item(), x.data), rtol=1e-4, atol=1e-9
    )


def test_upsample_gradient_sums_children(rng):
    x = SphereMap(rng.normal(size=(1, npix(1))), 1)
    with Tape() as tape:
        loss = reduce(ReduceOp.SUM, upsample_nearest(x))
    backward(tape, loss)
    np.testing.assert_array_equal(x.grad, 4.0)
