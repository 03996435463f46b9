import numpy as np
import pytest

from oslo.tensor import (
    ElementwiseOp,
    ReduceOp,
    SphereMap,
    Tape,
    backward,
    channel_split,
    concat_channels,
    elementwise,
    maximum,
    reduce,
)


@pytest.fixture
def x(rng):
    return SphereMap(rng.normal(size=(2, 48)), 1)


def test_add_negated_self_is_zero(x):
    result = elementwise(ElementwiseOp.ADD, x, elementwise(ElementwiseOp.SCALE, x, -1))
    assert (result.data == 0).all()


def test_relu_of_negative_map_is_zero():
    x = SphereMap(-np.ones((1, 12)), 0)
    assert (elementwise(ElementwiseOp.RELU, x).data == 0).all()


def test_ops_do_not_mutate_inputs(x):
    before = x.data.copy()
    for op in (ElementwiseOp.SQUARE, ElementwiseOp.ABS, ElementwiseOp.EXP):
        elementwise(op, x)
    elementwise(ElementwiseOp.MUL, x, x)
    np.testing.assert_array_equal(x.data, before)


def test_binary_shape_mismatch(x):
    other = SphereMap(np.ones((3, 48)), 1)
    with pytest.raises(ValueError, match="differ in shape"):
        elementwise(ElementwiseOp.ADD, x, other)


def test_binary_needs_operand(x):
    with pytest.raises(ValueError, match="second operand"):
        elementwise(ElementwiseOp.MUL, x)


def test_scale_needs_number(x):
    with pytest.raises(ValueError, match="number"):
        elementwise(ElementwiseOp.SCALE, x, x)


def test_unary_rejects_operand(x):
    with pytest.raises(ValueError, match="single operand"):
        elementwise(ElementwiseOp.RELU, x, 1.0)


@pytest.mark.parametrize(
    "op, value, message",
    [(ElementwiseOp.LOG, 0.0, "strictly positive"), (ElementwiseOp.SQRT, -1.0, "non-negative")],
)
def test_domain_violations(op, value, message):
    x = SphereMap(np.full((1, 12), value), 0)
    with pytest.raises(ValueError, match=message):
        elementwise(op, x)


# Test reductions
def test_mean_of_constant():
    x = SphereMap(np.full((3, 12), 0.75), 0)
    assert reduce(ReduceOp.MEAN, x).item() == pytest.approx(0.75)


def test_sum_backward_distributes_ones(x):
    with Tape() as tape:
        loss = reduce(ReduceOp.SUM, x)
    backward(tape, loss)
    np.testing.assert_array_equal(x.grad, np.ones_like(x.data))


def test_max_routes_gradient_to_first_maximum():
    data = np.zeros((1, 12))
    data[0, [3, 7]] = 2.0
    x = SphereMap(data, 0)
    with Tape() as tape:
        loss = reduce(ReduceOp.MAX, x)
    backward(tape, loss)
    expected = np.zeros_like(data)
    expected[0, 3] = 1.0
    np.testing.assert_array_equal(x.grad, expected)
    assert loss.item() == 2.0


# Test gradients against finite differences
def test_square_sum_gradient_is_two_x(x, numeric_grad):
    with Tape() as tape:
        loss = reduce(ReduceOp.SUM, elementwise(ElementwiseOp.SQUARE, x))
    backward(tape, loss)
    np.testing.assert_allclose(x.grad, 2.0 * x.data, rtol=1e-12)

    def value():
        return np.sum(x.data**2)

    np.testing.assert_allclose(numeric_grad(value, x.data), x.grad, rtol=1e-5)


@pytest.mark.parametrize(
    "op",
    [
        ElementwiseOp.ABS,
        ElementwiseOp.SQUARE,
        ElementwiseOp.EXP,
        ElementwiseOp.LOG,
        ElementwiseOp.SQRT,
        ElementwiseOp.RELU,
    ],
)
def test_unary_gradients(rng, numeric_grad, op):
    data = rng.uniform(0.5, 2.0, size=(2, 12)) * rng.choice([-1.0, 1.0], size=(2, 12))
    if op in (ElementwiseOp.LOG, ElementwiseOp.SQRT):
        data = np.abs(data)
    x = SphereMap(data, 0)
    weights = rng.normal(size=data.shape)

    def value():
        return reduce(
            ReduceOp.SUM, elementwise(ElementwiseOp.MUL, elementwise(op, x), weights)
        ).item()

    with Tape() as tape:
        loss = reduce(
            ReduceOp.SUM, elementwise(ElementwiseOp.MUL, elementwise(op, x), weights)
        )
    backward(tape, loss)
    np.testing.assert_allclose(x.grad, numeric_grad(value, x.data), rtol=1e-4, atol=1e-8)


def test_binary_gradients(rng, numeric_grad):
    a = SphereMap(rng.normal(size=(2, 12)), 0)
    b = SphereMap(rng.normal(size=(2, 12)), 0)

    def build():
        product = elementwise(ElementwiseOp.MUL, a, b)
        difference = elementwise(ElementwiseOp.SUB, product, b)
        return reduce(ReduceOp.MEAN, elementwise(ElementwiseOp.ADD, difference, a))

    with Tape() as tape:
        loss = build()
    backward(tape, loss)
    np.testing.assert_allclose(a.grad, numeric_grad(lambda: build().item(), a.data), rtol=1e-4)
    np.testing.assert_allclose(b.grad, numeric_grad(lambda: build().item(), b.data), rtol=1e-4)


def test_concat_split_and_maximum_gradients(rng, numeric_grad):
    a = SphereMap(rng.normal(size=(1, 12)), 0)
    b = SphereMap(rng.normal(size=(2, 12)), 0)
    weights = rng.normal(size=(3, 12))

    def build():
        joined = concat_channels([a, b])
        first, second = channel_split(joined, [2, 1])
        top = maximum(elementwise(ElementwiseOp.SCALE, second, 2.0), a)
        return reduce(
            ReduceOp.SUM,
            elementwise(ElementwiseOp.MUL, concat_channels([first, top]), weights),
        )

    with Tape() as tape:
        loss = build()
    backward(tape, loss)
    np.testing.assert_allclose(a.grad, numeric_grad(lambda: build().item(), a.data), rtol=1e-4, atol=1e-8)
    np.testing.assert_allclose(b.grad, numeric_grad(lambda: build().item(), b.data), rtol=1e-4, atol=1e-8)


def test_channel_split_rejects_bad_sizes(x):
    with pytest.raises(ValueError, match="partition"):
        channel_split(x, [1, 2])


def test_concat_rejects_mixed_grids(x):
    with pytest.raises(ValueError, match="share order"):
        concat_channels([x, SphereMap(np.zeros((1, 12)), 0)])


def test_scalar_arithmetic_on_tape():
    p = SphereMap(np.full((1, 12), 2.0), 0)
    with Tape() as tape:
        total = reduce(ReduceOp.SUM, p)
        loss = elementwise(ElementwiseOp.ADD, elementwise(ElementwiseOp.SCALE, total, 3.0), total)
    backward(tape, loss)
    np.testing.assert_array_equal(p.grad, np.full((1, 12), 4.0))
