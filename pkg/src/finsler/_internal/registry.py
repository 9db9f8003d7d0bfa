from typing import Dict, Iterable, List

from fastapi import APIRouter

from finsler.types import ConfigError

from .check import Check

ALL_SUITES = "all"


class CheckRegistry:
    """
    Singleton registry of verification suites and their HTTP routes.

    Each suite holds an ordered list of checks; every check gets a
    ``POST /verify/{suite}/{check}`` endpoint on the shared router.

    Attributes:
        _instance (CheckRegistry): the singleton instance.
        _suites (Dict[str, List[Check]]): suite name to registered checks.
        _router (APIRouter): router holding one endpoint per check.
    """

    _instance = None
    _suites: Dict[str, List[Check]]
    _router: APIRouter

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super(CheckRegistry, cls).__new__(cls)
            cls._instance._suites = {}
            cls._instance._router = APIRouter()
        return cls._instance

    def register_check(self, suite_name: str, check: Check):
        """
        Register a check under a suite, creating the suite on first use.

        Raises:
            ValueError: on an empty or reserved suite name, a non-Check
                value, or a check name already taken in any suite.
        """
        if not suite_name or not isinstance(suite_name, str):
            raise ValueError("Suite name must be a non-empty string")
        if suite_name == ALL_SUITES:
            raise ValueError(f"Suite name '{ALL_SUITES}' is reserved")
        if not check or not isinstance(check, Check):
            raise ValueError("Check must be a valid Check instance")
        # report names must be unique across suites
        for name, checks in self._suites.items():
            if any(c.name == check.name for c in checks):
                raise ValueError(
                    f"Check with name '{check.name}' already exists in "
                    f"suite '{name}'"
                )
        self._suites.setdefault(suite_name, []).append(check)

    def register_check_in_router(self, suite_name: str, check: Check):
        self._router.add_api_route(
            f"/verify/{suite_name}/{check.name}",
            check.get_handler_route(),
            methods=["POST"],
        )

    def get_suites(self) -> Dict[str, List[Check]]:
        return self._suites.copy()

    def get_check(self, suite_name: str, check_name: str) -> Check:
        for check in self._suites.get(suite_name, []):
            if check.name == check_name:
                return check
        raise ConfigError(
            f"Unknown check {suite_name}/{check_name}",
            output={"suite": suite_name, "check": check_name},
        )

    def select(self, suite_names: Iterable[str]) -> List[Check]:
        """
        Resolve suite names (``all`` selects every suite) to checks, each
        at most once, in registration order.

        Raises:
            ConfigError: on an unknown suite name.
        """
        names = list(suite_names)
        if ALL_SUITES in names:
            names = list(self._suites)
        unknown = sorted(set(names) - set(self._suites))
        if unknown:
            raise ConfigError(
                f"Unknown suites: {', '.join(unknown)}",
                output={"unknown": unknown, "known": sorted(self._suites)},
            )
        selected: List[Check] = []
        for name in self._suites:
            if name in names:
                selected.extend(self._suites[name])
        return selected

    def get_router(self) -> APIRouter:
        return self._router

    def clear(self):
        """Reset the registry; used by tests."""
        self._suites.clear()
        self._router = APIRouter()
        self.__class__._instance = None
        self.__class__()
