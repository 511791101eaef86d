from __future__ import annotations

import inspect
import typing as t

import loguru


class LoggingMixin:
    """Gives every instance `self.logger`, a loguru logger bound to the
    class's `__logtag__` plus any run context passed to `__init__`.

    Pooled workers share the instance logger; loguru serializes sinks.

    Example:
        ```python
        class Scorer(LoggingMixin):
            __logtag__ = "codbench.lib.scorer"

            def __init__(self, dataset: str) -> None:
                super().__init__(dataset=dataset)
        ```
    """

    __logtag__: t.ClassVar[str]

    def __init_subclass__(cls, **kwargs: t.Any) -> None:
        super().__init_subclass__(**kwargs)
        if not inspect.isabstract(cls) and not getattr(cls, "__logtag__", None):
            raise TypeError(f"{cls.__name__} must define __logtag__ class variable")

    def __init__(self, **context: t.Any) -> None:
        self.logger = loguru.logger.bind(tag=self.__logtag__, **context)

    def bind_context(self, **context: t.Any) -> None:
        """Attach more run context (dataset, variant) to later records."""
        self.logger = self.logger.bind(**context)
