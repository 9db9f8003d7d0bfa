import json
from dataclasses import replace
from typing import Callable, FrozenSet, Iterable, List, Optional, Union

from fastapi import Request

from finsler.config import RunConfig
from finsler.run_context import RunContext
from finsler.types import BadParameter, CheckResult, ConfigError, Scalars

from .utils import serialize_data

CheckOutput = Union[CheckResult, List[CheckResult]]


class Check:
    """
    A registered verification: a function of a RunContext returning one or
    more CheckResults, plus the metadata used for discovery and skipping.

    Attributes:
        func (Callable): the check function, ``func(ctx: RunContext)``.
        name (str): check name, the function name; single results are
            renamed to it so report names stay unique.
        suite (str): name of the owning suite.
        anchor (str): key of the identity verified, from ``ANCHORS``.
        dimensions (FrozenSet[int]): supported N; empty means all.
        smooth (bool): whether a smooth gauge is required.
        tolerance: the pass tolerance, reported by discovery and on
            failed results.
        statement (str): the result the anchored identity belongs to.
        identity (str): the anchored identity as a formula.
    """

    def __init__(
        self,
        func: Callable[[RunContext], CheckOutput],
        suite: str,
        anchor: str,
        dimensions: Optional[Iterable[int]] = None,
        smooth: bool = False,
        tolerance: Scalars = float("nan"),
        statement: str = "",
        identity: str = "",
    ):
        self.func = func
        self.name = func.__name__
        self.suite = suite
        self.anchor = anchor
        self.dimensions: FrozenSet[int] = frozenset(dimensions or ())
        self.smooth = smooth
        self.tolerance = tolerance
        self.statement = statement
        self.identity = identity
        doc = (func.__doc__ or "").strip()
        self.description = doc.splitlines()[0] if doc else ""

    def run(self, ctx: RunContext) -> List[CheckResult]:
        output = self.func(ctx)
        if isinstance(output, CheckResult):
            return [replace(output, name=self.name)]
        return list(output)

    def describe(self) -> dict:
        return {
            "name": self.name,
            "anchor": self.anchor,
            "statement": self.statement,
            "identity": self.identity,
            "description": self.description,
            "dimensions": sorted(self.dimensions),
            "smooth": self.smooth,
            "tolerance": self.tolerance,
        }

    def get_handler_route(self):
        """
        FastAPI handler running this check for a RunConfig JSON body.

        Response Format:
            ``{"output": [CheckResult, ...]}``; numerical failures inside
            the check come back as failed results, while malformed bodies
            and inapplicable configurations raise ConfigError or
            BadParameter (HTTP 422). Bodies may not name a ``norm_path``,
            so requests cannot make the server read local files.
        """

        async def handler(request: Request):
            try:
                body = await request.json()
            except json.JSONDecodeError as e:
                raise ConfigError(
                    "Request body is not valid JSON", output={"error": str(e)}
                )
            if not isinstance(body, dict):
                raise ConfigError(
                    "Request body must be a JSON object", output={}
                )
            if "norm_path" in body:
                raise ConfigError(
                    "norm_path is not accepted over HTTP; send the norm "
                    "spec inline as 'norm'",
                    output={"norm_path": body["norm_path"]},
                )
            ctx = RunContext.from_config(RunConfig.from_sources(None, body))
            ok, reason = ctx.applicable(self)
            if not ok:
                raise BadParameter(
                    f"Check {self.name} does not apply: {reason}",
                    output={"check": self.name, "reason": reason},
                )
            results = await ctx.execute_check(self)
            return {"output": serialize_data(results)}

        return handler
