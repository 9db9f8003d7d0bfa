from dataclasses import asdict

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

import finsler.suites  # noqa: F401
from finsler._internal.registry import CheckRegistry
from finsler._internal.utils import serialize_data
from finsler.types import ErrorResponse, FinslerException


class VerificationApp:
    """
    Wraps a FastAPI application with the verification endpoints.

    This class provides:
    1. Suite discovery via ``GET /discover``
    2. One ``POST /verify/{suite}/{check}`` route per registered check,
       taking a RunConfig JSON body
    3. Error handling turning FinslerException into JSON error responses

    Args:
        app (FastAPI): the application to wrap.

    Example Response from /discover:
        [
            {
                "suite_name": "quantization",
                "checks": [
                    {
                        "name": "mass_quantization",
                        "anchor": "mass_quantization",
                        "description": "Total mass by radial ...",
                        "dimensions": [],
                        "smooth": false,
                        "tolerance": 1e-07
                    }
                ]
            }
        ]
    """

    def __init__(self, app: FastAPI):
        self.app: FastAPI = app
        self.registry = CheckRegistry()
        self.registry.get_router().add_api_route(
            "/discover",
            self._discover,
            methods=["GET"],
        )
        self.app.include_router(self.registry.get_router())
        self.app.add_exception_handler(FinslerException, self.raise_exception)

    def _discover(self):
        return [
            {
                "suite_name": suite_name,
                "checks": serialize_data([c.describe() for c in checks]),
            }
            for suite_name, checks in self.registry.get_suites().items()
        ]

    async def raise_exception(
        self, request: Request, exc: FinslerException, _=None
    ):
        """
        Exception handler for FinslerException.

        Returns a JSON ErrorResponse whose output holds the error code,
        message and payload, with status 422 for invalid input and 500
        for numerical failures.
        """
        return JSONResponse(
            status_code=exc.status_code,
            content=serialize_data(
                asdict(ErrorResponse(output=exc.to_dict()))
            ),
        )


def create_app() -> FastAPI:
    """A FastAPI app serving every registered suite."""
    app = FastAPI(title="finsler-liouville")
    VerificationApp(app)
    return app
