"""
A module for the reverse-mode differentiation tape
"""

import logging
from logging import Logger
from contextvars import ContextVar, Token
from dataclasses import dataclass, field
import os
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

Vjp = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]

_active_tape: ContextVar[Optional["Tape"]] = ContextVar("oslo_tape", default=None)
_debug: bool = os.environ.get("OSLO_DEBUG", "0") not in ("", "0", "false", "False")


def set_debug(enabled: bool) -> None:
    """Turns the finiteness check after every op on or off."""
    global _debug  # pylint: disable=global-statement
    _debug = bool(enabled)


def is_debug() -> bool:
    return _debug


def check_finite(
    name: str, data: np.ndarray, logger: Logger = logging.getLogger(__name__)
) -> None:
    """
    Raises if data holds NaN or Inf.

    Raises:
        ValueError: Naming the op that produced the values.
    """
    if not np.isfinite(data).all():
        msg = f"{name} produced non-finite values"
        logger.error(msg)
        raise ValueError(msg)


@dataclass(eq=False)
class TapeNode:
    """
    One recorded operation.

    Attributes:
        name (str): The op name, for logs and errors.
        inputs (Tuple[Any, ...]): The differentiable inputs, in vjp order.
        output (Any): The produced value.
        vjp (Vjp): Maps the output adjoint to one adjoint per input, None
            where an input gets no gradient.
    """

    name: str
    inputs: Tuple[Any, ...]
    output: Any
    vjp: Vjp


@dataclass(eq=False)
class Tape:
    """
    Records operations in execution order while active.

    Use it as a context manager. Ops evaluated inside the block append a node,
    and values they produce remember the tape.

    Example:
        >>> with Tape() as tape:
        ...     loss = reduce(ReduceOp.SUM, elementwise(ElementwiseOp.SQUARE, x))
        >>> backward(tape, loss)
    """

    nodes: List[TapeNode] = field(default_factory=list)
    _token: Optional[Token] = field(default=None, repr=False)

    def __enter__(self) -> "Tape":
        self._token = _active_tape.set(self)
        return self

    def __exit__(self, *_: Any) -> None:
        if self._token is not None:
            _active_tape.reset(self._token)
            self._token = None

    def __len__(self) -> int:
        return len(self.nodes)

    def __contains__(self, value: Any) -> bool:
        return any(node.output is value for node in self.nodes)


def active_tape() -> Optional[Tape]:
    """The tape of the current context, if any."""
    return _active_tape.get()


def record(name: str, inputs: Sequence[Any], output: Any, vjp: Vjp) -> Any:
    """
    Registers an op on the active tape and returns its output.

    Without an active tape this is a no-op. In debug mode the output is
    checked for finiteness first.
    """
    if _debug:
        check_finite(name, output.data)
    tape: Optional[Tape] = _active_tape.get()
    if tape is None:
        return output
    tape.nodes.append(TapeNode(name=name, inputs=tuple(inputs), output=output, vjp=vjp))
    output.tape = tape
    return output


def backward(
    tape: Tape, loss: Any, logger: Logger = logging.getLogger(__name__)
) -> None:
    """
    Propagates d(loss)/d(value) through the tape in reverse.

    Parameters accumulate into their grad, so a parameter used twice receives
    the sum of both contributions. Maps and scalars reached by the pass have
    their grad overwritten.

    Args:
        tape (Tape): The tape the loss was computed under.
        loss (Scalar): The value to differentiate.
        logger (Logger): The logger to use for logging.

    Raises:
        ValueError: If the loss was not produced under this tape.
    """
    # imported here, the value types import this module
    from oslo.tensor._sphere_map import Parameter  # pylint: disable=import-outside-toplevel

    if getattr(loss, "tape", None) is not tape or loss not in tape:
        msg = "Loss was not produced under this tape"
        logger.error(msg)
        raise ValueError(msg)
    logger.debug("%s - backward over %s nodes", __name__, len(tape))

    adjoints: Dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
    reached: Dict[int, Any] = {id(loss): loss}
    for node in reversed(tape.nodes):
        adjoint: Optional[np.ndarray] = adjoints.get(id(node.output))
        if adjoint is None:
            continue
        for value, grad in zip(node.inputs, node.vjp(adjoint)):
            if grad is None:
                continue
            if isinstance(value, Parameter):
                value.grad += grad
                continue
            key: int = id(value)
            if key in adjoints:
                adjoints[key] = adjoints[key] + grad
            else:
                adjoints[key] = grad
                reached[key] = value
    for key, value in reached.items():
        value.grad = adjoints[key]
