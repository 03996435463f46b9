import numpy as np
import pytest

from oslo.tensor import (
    ElementwiseOp,
    ReduceOp,
    SphereMap,
    Tape,
    active_tape,
    backward,
    elementwise,
    reduce,
)


def test_tape_records_only_inside_context():
    x = SphereMap(np.ones((1, 12)), 0)
    with Tape() as tape:
        assert active_tape() is tape
        y = elementwise(ElementwiseOp.SQUARE, x)
    z = elementwise(ElementwiseOp.SQUARE, x)
    assert active_tape() is None
    assert len(tape) == 1
    assert y.tape is tape and z.tape is None


def test_backward_rejects_foreign_loss():
    x = SphereMap(np.ones((1, 12)), 0)
    with Tape():
        loss = reduce(ReduceOp.SUM, x)
    with pytest.raises(ValueError, match="not produced under this tape"):
        backward(Tape(), loss)


def test_backward_rejects_untaped_loss():
    x = SphereMap(np.ones((1, 12)), 0)
    loss = reduce(ReduceOp.SUM, x)
    with pytest.raises(ValueError, match="not produced under this tape"):
        backward(Tape(), loss)


# Test the sum rule for a value used twice
def test_repeated_input_accumulates():
    x = SphereMap(np.full((1, 12), 3.0), 0)
    with Tape() as tape:
        loss = reduce(ReduceOp.SUM, elementwise(ElementwiseOp.ADD, x, x))
    backward(tape, loss)
    np.testing.assert_array_equal(x.grad, np.full((1, 12), 2.0))


def test_unreached_value_keeps_no_grad():
    x = SphereMap(np.ones((1, 12)), 0)
    unused = SphereMap(np.ones((1, 12)), 0)
    with Tape() as tape:
        elementwise(ElementwiseOp.EXP, unused)
        loss = reduce(ReduceOp.SUM, x)
    backward(tape, loss)
    assert unused.grad is None
    assert loss.grad == 1.0


def test_backward_replay_is_bit_identical(rng):
    x = SphereMap(rng.normal(size=(2, 12)), 0)
    with Tape() as tape:
        y = elementwise(ElementwiseOp.EXP, elementwise(ElementwiseOp.SCALE, x, 0.3))
        loss = reduce(ReduceOp.MEAN, elementwise(ElementwiseOp.MUL, y, y))
    backward(tape, loss)
    first = x.grad.copy()
    backward(tape, loss)
    np.testing.assert_array_equal(x.grad, first)


def test_debug_mode_catches_non_finite_results(debug_mode):
    x = SphereMap(np.full((1, 12), 1000.0), 0)
    with pytest.raises(ValueError, match="exp produced non-finite"):
        elementwise(ElementwiseOp.EXP, x)
