from __future__ import annotations

import functools as ft
import os
import time
import typing as t

if t.TYPE_CHECKING:
    from codbench.service import BaseService

P = t.ParamSpec("P")
R = t.TypeVar("R")


def _brief(value: t.Any) -> str:
    """Paths print as-is; arrays and long collections by shape or size."""
    if isinstance(value, (str, os.PathLike)):
        return os.fspath(value)
    shape = getattr(value, "shape", None)
    if shape is not None:
        return f"<{type(value).__name__} {tuple(shape)}>"
    if isinstance(value, (list, tuple)) and len(value) > 4:
        return f"<{len(value)} items>"
    return repr(value)


def log_call(func: t.Callable[t.Concatenate[BaseService, P], R]) -> t.Callable[t.Concatenate[BaseService, P], R]:
    """Log a service operation: its arguments on entry, then its wall time
    or the error it raised. Runs with the service's bound logger."""

    @ft.wraps(func)
    def wrapper(self: BaseService, /, *args: P.args, **kwargs: P.kwargs) -> R:
        shown = [_brief(a) for a in args] + [f"{k}={_brief(v)}" for k, v in kwargs.items()]
        self.logger.info(f"{func.__name__}({', '.join(shown)}) threads={self.threads} seed={self.seed}")
        started = time.perf_counter()
        try:
            result = func(self, *args, **kwargs)
        except Exception as e:
            self.logger.error(f"{func.__name__} failed after {time.perf_counter() - started:.2f}s: {e}")
            raise
        self.logger.info(f"{func.__name__} done in {time.perf_counter() - started:.2f}s")
        return result

    return wrapper
