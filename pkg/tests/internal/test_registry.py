import pytest
from fastapi import APIRouter

from finsler._internal.check import Check
from finsler._internal.registry import CheckRegistry
from finsler.run_context import RunContext
from finsler.types import CheckResult, ConfigError


def make_check(name: str, suite: str = "demo") -> Check:
    def func(ctx: RunContext):
        return CheckResult.compare(name, "duality", 0.0, 0.0, 0.0)

    func.__name__ = name
    return Check(func, suite, "duality")


class TestCheckRegistry:
    def test_singleton(self, isolated_registry):
        assert CheckRegistry() is isolated_registry

    def test_register_check(self, isolated_registry):
        check = make_check("first")
        isolated_registry.register_check("demo", check)

        suites = isolated_registry.get_suites()
        assert list(suites) == ["demo"]
        assert suites["demo"] == [check]

    def test_register_check_in_router(self, isolated_registry):
        check = make_check("first")
        isolated_registry.register_check_in_router("demo", check)

        routes = isolated_registry.get_router().routes
        assert len(routes) == 1
        assert routes[0].path == "/verify/demo/first"
        assert "POST" in routes[0].methods

    @pytest.mark.parametrize("suite_name", ["", None, "all"])
    def test_rejects_bad_suite_names(self, isolated_registry, suite_name):
        with pytest.raises(ValueError):
            isolated_registry.register_check(suite_name, make_check("x"))

    def test_rejects_non_checks(self, isolated_registry):
        with pytest.raises(ValueError, match="valid Check"):
            isolated_registry.register_check("demo", lambda ctx: None)

    def test_rejects_duplicate_names(self, isolated_registry):
        isolated_registry.register_check("one", make_check("same"))
        with pytest.raises(ValueError, match="suite 'one'"):
            isolated_registry.register_check("two", make_check("same"))

    def test_get_check(self, isolated_registry):
        check = make_check("first")
        isolated_registry.register_check("demo", check)
        assert isolated_registry.get_check("demo", "first") is check
        with pytest.raises(ConfigError):
            isolated_registry.get_check("demo", "second")

    def test_select(self, isolated_registry):
        a, b, c = make_check("a"), make_check("b"), make_check("c")
        isolated_registry.register_check("one", a)
        isolated_registry.register_check("two", b)
        isolated_registry.register_check("one", c)

        assert isolated_registry.select(["two"]) == [b]
        assert isolated_registry.select(["two", "one"]) == [a, c, b]
        assert isolated_registry.select(["all"]) == [a, c, b]
        assert isolated_registry.select(["one", "all"]) == [a, c, b]

    def test_select_unknown_suite(self, isolated_registry):
        isolated_registry.register_check("one", make_check("a"))
        with pytest.raises(ConfigError) as exc_info:
            isolated_registry.select(["one", "missing"])
        assert exc_info.value.output == {
            "unknown": ["missing"],
            "known": ["one"],
        }

    def test_clear(self, isolated_registry):
        isolated_registry.register_check("demo", make_check("a"))
        isolated_registry.clear()

        registry = CheckRegistry()
        assert registry.get_suites() == {}
        assert isinstance(registry.get_router(), APIRouter)
        assert registry.get_router().routes == []

    def test_get_suites_returns_a_copy(self, isolated_registry):
        isolated_registry.register_check("demo", make_check("a"))
        isolated_registry.get_suites().pop("demo")
        assert "demo" in isolated_registry.get_suites()
