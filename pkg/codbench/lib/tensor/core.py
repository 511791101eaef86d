from __future__ import annotations

import itertools
import threading
import types
import typing as t

import typing_extensions as te

import numpy as np
import numpy.typing as npt

from codbench.lib.tensor import runtime
from codbench.lib.tensor.exceptions import NonFiniteError
from codbench.lib.tensor.exceptions import TapeError

Array = npt.NDArray[np.floating[t.Any]]
BackwardFn = t.Callable[[Array], t.Sequence[Array | None]]

_uids = itertools.count(1)
_local = threading.local()


class Tensor:
    """Immutable dense array, N x C x H x W for image ops.

    The underlying numpy buffer is read-only; every op returns a new
    tensor. A tensor takes part in differentiation when it is a
    parameter leaf or was produced on an active tape from one.

    Attributes:
        uid: Process-unique handle used as the gradient key.
        requires_grad: Whether the tensor is tracked by the tape.
        name: Optional parameter name.
    """

    __slots__ = ("_data", "name", "requires_grad", "uid")

    def __init__(
        self,
        data: npt.ArrayLike,
        *,
        requires_grad: bool = False,
        name: str | None = None,
        dtype: npt.DTypeLike | None = None,
    ) -> None:
        arr = np.array(data, dtype=dtype or runtime.dtype(), copy=True)
        if not np.all(np.isfinite(arr)):
            raise NonFiniteError(name or "Tensor")
        arr.setflags(write=False)
        self._data = arr
        self.uid = next(_uids)
        self.requires_grad = requires_grad
        self.name = name

    @classmethod
    def parameter(cls, data: npt.ArrayLike, name: str | None = None) -> Tensor:
        """Create a tracked leaf."""
        return cls(data, requires_grad=True, name=name)

    @classmethod
    def _wrap(cls, arr: Array, *, op: str, requires_grad: bool) -> Tensor:
        """Adopt an op result without copying."""
        if runtime.debug_enabled() and not np.all(np.isfinite(arr)):
            raise NonFiniteError(op)
        obj = cls.__new__(cls)
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        obj._data = arr
        obj.uid = next(_uids)
        obj.requires_grad = requires_grad
        obj.name = None
        return obj

    @property
    def data(self) -> Array:
        return self._data

    @property
    def shape(self) -> tuple[int, ...]:
        return self._data.shape

    @property
    def ndim(self) -> int:
        return self._data.ndim

    @property
    def size(self) -> int:
        return int(self._data.size)

    @property
    def dtype(self) -> np.dtype[t.Any]:
        return self._data.dtype

    def numpy(self) -> Array:
        """Writable copy of the data."""
        return self._data.copy()

    def item(self) -> float:
        return float(self._data.reshape(-1)[0]) if self.size == 1 else float("nan")

    def detach(self) -> Tensor:
        return Tensor._wrap(self._data, op="detach", requires_grad=False)

    def __repr__(self) -> str:
        tag = f" name={self.name!r}" if self.name else ""
        grad = " requires_grad" if self.requires_grad else ""
        return f"Tensor(shape={self.shape}, dtype={self.dtype}{tag}{grad})"


class _Record(t.NamedTuple):
    op: str
    inputs: tuple[Tensor, ...]
    output: Tensor
    backward: BackwardFn


class Tape:
    """Ordered record of executed ops for reverse-mode differentiation.

    Used as a context manager; ops executed inside the block with at
    least one tracked input are recorded. A tape can be replayed once.

    Example:
        ```python
        w = Tensor.parameter(np.ones((1, 1, 1, 1)), name="w")
        with Tape() as tape:
            loss = sum_all(mul(w, w))
        grads = backward(tape, loss)
        grads[w]  # -> [[[[2.0]]]]
        ```
    """

    def __init__(self) -> None:
        self._records: list[_Record] = []
        self._consumed = False

    def __enter__(self) -> te.Self:
        stack = _stack()
        stack.append(self)
        return self

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc_val: BaseException | None,
        traceback: types.TracebackType | None,
    ) -> t.Literal[False]:
        stack = _stack()
        if stack and stack[-1] is self:
            stack.pop()
        return False

    def __len__(self) -> int:
        return len(self._records)

    @property
    def consumed(self) -> bool:
        return self._consumed

    @property
    def ops(self) -> list[str]:
        return [r.op for r in self._records]

    def append(self, record: _Record) -> None:
        if self._consumed:
            raise TapeError(reason="cannot record onto a consumed tape")
        self._records.append(record)


def _stack() -> list[Tape]:
    stack = getattr(_local, "stack", None)
    if stack is None:
        stack = _local.stack = []
    return stack  # type: ignore[no-any-return]


def active_tape() -> Tape | None:
    stack = _stack()
    return stack[-1] if stack else None


def track(op: str, inputs: t.Sequence[Tensor], out: Array, backward: BackwardFn) -> Tensor:
    """Wrap an op result and record it when any input is tracked.

    Args:
        op: Op name, used in tape listings and debug errors.
        inputs: The tensor operands, in the order `backward` returns
            their gradients.
        out: The forward result.
        backward: Maps the output gradient to one gradient (or None)
            per input.

    Returns:
        The result tensor.
    """
    tape = active_tape()
    needs = tape is not None and any(x.requires_grad for x in inputs)
    result = Tensor._wrap(out, op=op, requires_grad=needs)
    if needs and tape is not None:
        tape.append(_Record(op, tuple(inputs), result, backward))
    return result


class Gradients(t.Mapping[Tensor, Array]):
    """Gradients of tracked leaves, looked up by tensor."""

    __slots__ = ("_by_uid", "_leaves")

    def __init__(self, by_uid: dict[int, Array], leaves: dict[int, Tensor]) -> None:
        self._by_uid = by_uid
        self._leaves = leaves

    def __getitem__(self, key: Tensor) -> Array:
        return self._by_uid[key.uid]

    def __contains__(self, key: object) -> bool:
        return isinstance(key, Tensor) and key.uid in self._by_uid

    def __iter__(self) -> t.Iterator[Tensor]:
        return (self._leaves[uid] for uid in self._by_uid)

    def __len__(self) -> int:
        return len(self._by_uid)

    def named(self) -> dict[str, Array]:
        return {
            self._leaves[uid].name or str(uid): g
            for uid, g in self._by_uid.items()
        }


def backward(tape: Tape, loss: Tensor) -> Gradients:
    """Replay the tape in reverse and return the gradients of every
    tracked leaf the loss depends on.

    Args:
        tape: The tape the loss was computed on.
        loss: A single-element tensor produced through tracked ops.

    Returns:
        Gradients keyed by leaf tensor.

    Raises:
        TapeError: If the tape was already replayed, the loss is not a
            scalar or was not produced on the tape.
    """
    if tape.consumed:
        raise TapeError(reason="backward invoked twice on a consumed tape")
    if loss.size != 1:
        raise TapeError(reason=f"loss must be a scalar, got shape {loss.shape}")
    if not loss.requires_grad:
        raise TapeError(reason="loss was not produced by tracked operations")

    produced = {r.output.uid for r in tape._records}
    grads: dict[int, Array] = {loss.uid: np.ones_like(loss.data)}
    leaves: dict[int, Tensor] = {}

    for record in reversed(tape._records):
        g = grads.pop(record.output.uid, None)
        if g is None:
            continue
        for x, gx in zip(record.inputs, record.backward(g), strict=True):
            if gx is None or not x.requires_grad:
                continue
            if x.uid not in produced:
                leaves[x.uid] = x
            prev = grads.get(x.uid)
            grads[x.uid] = gx if prev is None else prev + gx

    tape._consumed = True
    return Gradients({uid: grads[uid] for uid in leaves if uid in grads}, leaves)
