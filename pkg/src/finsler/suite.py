from typing import Iterable, Optional

from finsler._internal.check import Check
from finsler._internal.registry import CheckRegistry
from finsler.identities import ANCHORS
from finsler.run_context import RunContext
from finsler.types import Scalars


class Suite:
    """
    A named group of verification checks.

    Checks are registered with the :meth:`check` decorator and become
    selectable with ``--suite NAME`` and reachable over HTTP at
    ``POST /verify/{suite}/{check}``.

    Example:
        ```python
        quantization = Suite("quantization")

        @quantization.check(anchor="mass_quantization", tolerance=1e-7)
        def mass_quantization(ctx: RunContext):
            return verify_mass_quantization(
                ctx.solution, ctx.quadrature_for("mass_quantization")
            )
        ```
    """

    def __init__(self, name: str):
        self.name = name
        self.registry = CheckRegistry()

    def check(
        self,
        anchor: str,
        dimensions: Optional[Iterable[int]] = None,
        smooth: bool = False,
        tolerance: Scalars = float("nan"),
    ):
        """
        Decorator registering a function as a check of this suite.

        Args:
            anchor (str): key of ``ANCHORS`` naming the identity verified.
            dimensions (Iterable[int], optional): supported N; all when
                omitted. Other dimensions skip the check.
            smooth (bool): skip the check for non-smooth (tabulated) gauges.
            tolerance: pass tolerance shown by discovery and on failures.

        Returns:
            callable: the original function, unmodified.

        Raises:
            ValueError: if the anchor is unknown, or the function does not
                take exactly one ``ctx: RunContext`` parameter.
        """

        def decorator(func):
            if anchor not in ANCHORS:
                raise ValueError(f"Unknown anchor '{anchor}'")
            input_keys = func.__code__.co_varnames[: func.__code__.co_argcount]
            if input_keys != ("ctx",):
                raise ValueError(
                    "The check function must take a single 'ctx' argument."
                )
            if func.__annotations__.get("ctx") is not RunContext:
                raise ValueError(
                    "The 'ctx' argument must be of type RunContext."
                )
            check = Check(
                func,
                self.name,
                anchor,
                dimensions,
                smooth,
                tolerance,
                statement=ANCHORS[anchor].statement,
                identity=ANCHORS[anchor].identity,
            )
            self.registry.register_check(self.name, check)
            self.registry.register_check_in_router(self.name, check)
            return func

        return decorator
