import numpy as np
import pytest

from oslo.geometry import Order, PixelId, neighbors, npix
from oslo.ops import (
    AggregationMode,
    Kernel,
    conv1hop,
    conv_nhop,
    crop_patch,
    make_patch,
    strided_subsample,
)
from oslo.tensor import (
    ElementwiseOp,
    Parameter,
    ReduceOp,
    SphereMap,
    Tape,
    backward,
    concat_channels,
    elementwise,
    reduce,
)


def brute_force_conv(data, kernel, order):
    """Loop over pixels and their neighbor records."""
    theta = kernel.theta.values
    result = np.zeros((kernel.out_channels, data.shape[1]))
    for i in range(data.shape[1]):
        record = neighbors(PixelId(i, Order(order)))
        result[:, i] += theta[:, 0, :] @ data[:, i]
        for slot, neighbor in enumerate(record.neighbor):
            if neighbor is not None:
                result[:, i] += theta[:, slot + 1, :] @ data[:, neighbor.index]
    if kernel.bias is not None:
        result += kernel.bias.values[:, None]
    return result


def random_kernel(rng, name, in_channels, out_channels, bias=True):
    kernel = Kernel.create(name, in_channels, out_channels, bias=bias, rng=rng)
    if kernel.bias is not None:
        kernel.bias.assign(rng.normal(size=out_channels))
    return kernel


def test_identity_kernel_passes_input(rng):
    x = SphereMap(rng.normal(size=(3, npix(2))), 2)
    np.testing.assert_array_equal(conv1hop(x, Kernel.identity("id", 3)).data, x.data)


def test_zero_kernel_gives_bias(rng):
    x = SphereMap(rng.normal(size=(2, npix(1))), 1)
    kernel = Kernel(
        theta=Parameter("k.theta", np.zeros((2, 9, 2))),
        bias=Parameter("k.bias", np.array([0.5, -1.5])),
    )
    result = conv1hop(x, kernel).data
    np.testing.assert_array_equal(result[0], 0.5)
    np.testing.assert_array_equal(result[1], -1.5)


@pytest.mark.parametrize("order", [1, 2])
def test_conv1hop_matches_brute_force(rng, order):
    x = SphereMap(rng.normal(size=(3, npix(order))), order)
    kernel = random_kernel(rng, "k", 3, 4)
    np.testing.assert_allclose(
        conv1hop(x, kernel).data, brute_force_conv(x.data, kernel, order), atol=1e-12
    )


def test_conv1hop_is_linear(rng):
    kernel = random_kernel(rng, "k", 2, 2, bias=False)
    a = rng.normal(size=(2, npix(2)))
    b = rng.normal(size=(2, npix(2)))
    combined = conv1hop(SphereMap(2.0 * a - 3.0 * b, 2), kernel).data
    separate = 2.0 * conv1hop(SphereMap(a, 2), kernel).data - 3.0 * conv1hop(
        SphereMap(b, 2), kernel
    ).data
    np.testing.assert_allclose(combined, separate, atol=1e-10)


def test_conv1hop_rejects_channel_mismatch(rng):
    x = SphereMap(rng.normal(size=(2, npix(1))), 1)
    with pytest.raises(ValueError, match="input channels"):
        conv1hop(x, random_kernel(rng, "k", 3, 1))


def test_conv1hop_rejects_base_order(rng):
    x = SphereMap(rng.normal(size=(1, 12)), 0)
    with pytest.raises(ValueError, match="order >= 1"):
        conv1hop(x, random_kernel(rng, "k", 1, 1))


def test_conv1hop_keeps_float32(rng):
    x = SphereMap(rng.normal(size=(2, npix(1))).astype(np.float32), 1)
    assert conv1hop(x, random_kernel(rng, "k", 2, 2)).dtype == np.float32


# Test gradients of the convolution
def test_conv1hop_gradients(rng, numeric_grad):
    x = SphereMap(rng.normal(size=(2, npix(1))), 1)
    kernel = random_kernel(rng, "k", 2, 3)
    weights = rng.normal(size=(3, npix(1)))

    def build():
        return reduce(
            ReduceOp.SUM, elementwise(ElementwiseOp.MUL, conv1hop(x, kernel), weights)
        )

    with Tape() as tape:
        loss = build()
    backward(tape, loss)
    value = lambda: build().item()  # noqa: E731
    np.testing.assert_allclose(x.grad, numeric_grad(value, x.data), rtol=1e-4, atol=1e-9)
    np.testing.assert_allclose(
        kernel.theta.grad, numeric_grad(value, kernel.theta.values), rtol=1e-4, atol=1e-9
    )
    np.testing.assert_allclose(
        kernel.bias.grad, numeric_grad(value, kernel.bias.values), rtol=1e-4, atol=1e-9
    )


def test_shared_kernel_accumulates_gradient(rng, numeric_grad):
    x = SphereMap(rng.normal(size=(2, npix(1))), 1)
    kernel = random_kernel(rng, "k", 2, 2)

    def build():
        return reduce(ReduceOp.SUM, conv1hop(conv1hop(x, kernel), kernel))

    with Tape() as tape:
        loss = build()
    backward(tape, loss)
    expected = numeric_grad(lambda: build().item(), kernel.theta.values)
    np.testing.assert_allclose(kernel.theta.grad, expected, rtol=1e-4, atol=1e-9)


def test_unused_parameter_gets_zero_gradient(rng):
    x = SphereMap(rng.normal(size=(2, npix(1))), 1)
    used = random_kernel(rng, "used", 2, 2)
    unused = random_kernel(rng, "unused", 2, 2)
    with Tape() as tape:
        loss = reduce(ReduceOp.SUM, conv1hop(x, used))
    backward(tape, loss)
    assert (unused.theta.grad == 0).all()
    assert (unused.bias.grad == 0).all()


def test_two_layer_network_gradient(rng, numeric_grad):
    x = SphereMap(rng.normal(size=(2, npix(2))), 2)
    first = random_kernel(rng, "first", 2, 3)
    second = random_kernel(rng, "second", 3, 1)

    def build():
        hidden = elementwise(ElementwiseOp.SQUARE, conv1hop(x, first))
        return reduce(ReduceOp.MEAN, elementwise(ElementwiseOp.SQUARE, conv1hop(hidden, second)))

    with Tape() as tape:
        loss = build()
    backward(tape, loss)
    value = lambda: build().item()  # noqa: E731
    np.testing.assert_allclose(
        first.theta.grad, numeric_grad(value, first.theta.values), rtol=1e-4, atol=1e-9
    )
    np.testing.assert_allclose(
        second.theta.grad, numeric_grad(value, second.theta.values), rtol=1e-4, atol=1e-9
    )


# Test the n-hop filters
@pytest.mark.parametrize("mode", list(AggregationMode))
def test_single_hop_equals_conv1hop(rng, mode):
    x = SphereMap(rng.normal(size=(2, npix(2))), 2)
    kernel = random_kernel(rng, "k", 2, 3)
    np.testing.assert_array_equal(
        conv_nhop(x, [kernel], mode=mode).data, conv1hop(x, kernel).data
    )


def test_addition_with_zero_second_hop(rng):
    x = SphereMap(rng.normal(size=(2, npix(2))), 2)
    first = random_kernel(rng, "first", 2, 2)
    zero = Kernel(theta=Parameter("zero.theta", np.zeros((2, 9, 2))))
    result = conv_nhop(x, [first, zero], mode=AggregationMode.ADDITION, stride=2)
    expected = strided_subsample(conv1hop(x, first), 2)
    np.testing.assert_array_equal(result.data, expected.data)
    assert result.order == Order(1)


def test_two_hop_aggregations(rng):
    x = SphereMap(rng.normal(size=(2, npix(2))), 2)
    first = random_kernel(rng, "first", 2, 3)
    second = random_kernel(rng, "second", 3, 3)
    z1 = brute_force_conv(x.data, first, 2)
    z2 = brute_force_conv(z1, second, 2)

    concatenated = conv_nhop(x, [first, second], mode=AggregationMode.CONCATENATION)
    assert concatenated.channels == 6
    np.testing.assert_allclose(concatenated.data, np.vstack([z1, z2]), atol=1e-12)

    added = conv_nhop(x, [first, second], mode=AggregationMode.ADDITION)
    np.testing.assert_allclose(added.data, z1 + z2, atol=1e-12)

    maxed = conv_nhop(x, [first, second], mode=AggregationMode.MAX)
    np.testing.assert_allclose(maxed.data, np.maximum(z1, z2), atol=1e-12)


def test_max_aggregation_rejects_unequal_channels(rng):
    x = SphereMap(rng.normal(size=(2, npix(2))), 2)
    kernels = [random_kernel(rng, "a", 2, 3), random_kernel(rng, "b", 3, 4)]
    with pytest.raises(ValueError, match="equal channel counts"):
        conv_nhop(x, kernels, mode=AggregationMode.MAX)


def test_broken_kernel_chain(rng):
    x = SphereMap(rng.normal(size=(2, npix(2))), 2)
    kernels = [random_kernel(rng, "a", 2, 3), random_kernel(rng, "b", 2, 3)]
    with pytest.raises(ValueError, match="chain breaks"):
        conv_nhop(x, kernels, mode=AggregationMode.CONCATENATION)


def test_nhop_gradient(rng, numeric_grad):
    x = SphereMap(rng.normal(size=(2, npix(2))), 2)
    kernels = [random_kernel(rng, "a", 2, 2), random_kernel(rng, "b", 2, 2)]

    def build():
        y = conv_nhop(x, kernels, mode=AggregationMode.CONCATENATION, stride=2)
        return reduce(ReduceOp.SUM, elementwise(ElementwiseOp.SQUARE, y))

    with Tape() as tape:
        loss = build()
    backward(tape, loss)
    np.testing.assert_allclose(
        x.grad, numeric_grad(lambda: build().item(), x.data), rtol=1e-4, atol=1e-9
    )


# Test strides
def test_strided_subsample_rule(rng):
    x = SphereMap(rng.normal(size=(1, npix(2))), 2)
    result = strided_subsample(x, 2)
    assert result.order == Order(1)
    np.testing.assert_array_equal(result.data[0], x.data[0, ::4])
    assert strided_subsample(x, 1) is x


def test_strided_subsample_rejects_large_stride(rng):
    x = SphereMap(rng.normal(size=(1, npix(1))), 1)
    with pytest.raises(ValueError, match="too large"):
        strided_subsample(x, 4)


@pytest.mark.parametrize("order, stride", [(2, 2), (3, 2), (3, 4), (4, 4)])
@pytest.mark.parametrize("mode", list(AggregationMode))
def test_stride_consistency(rng, order, stride, mode):
    x = SphereMap(rng.normal(size=(2, npix(order))), order)
    kernels = [random_kernel(rng, "a", 2, 2), random_kernel(rng, "b", 2, 2)]
    strided = conv_nhop(x, kernels, mode=mode, stride=stride)
    dense = conv_nhop(x, kernels, mode=mode, stride=1)
    np.testing.assert_array_equal(strided.data, dense.data[:, :: stride * stride])


# Test patch-local convolution
def test_patched_conv_differs_only_on_boundary(rng):
    order = 3
    x = SphereMap(rng.normal(size=(2, npix(order))), order)
    kernel = random_kernel(rng, "k", 2, 2)
    patch = make_patch(order, 4, rng_seed=3)
    full = conv1hop(x, kernel).data[:, patch.start : patch.start + patch.npix]
    local = conv1hop(crop_patch(x, patch), kernel)
    assert local.patch == patch
    interior = patch.boundary_mask.all(axis=1)
    assert interior.any() and not interior.all()
    np.testing.assert_allclose(local.data[:, interior], full[:, interior], atol=1e-12)
    assert not np.allclose(local.data[:, ~interior], full[:, ~interior])


def test_patch_concat_keeps_patch(rng):
    patch = make_patch(3, 4, rng_seed=1)
    x = crop_patch(SphereMap(rng.normal(size=(1, npix(3))), 3), patch)
    assert concat_channels([x, x]).patch == patch
