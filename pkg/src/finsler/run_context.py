import asyncio
import logging
import time
import zlib
from typing import TYPE_CHECKING, Dict, Iterable, List, Optional, Tuple

from finsler.anisotropy import AnisotropyNorm, norm_from_spec
from finsler.config import FL_THREADS, VERSION, QuadratureConfig, RunConfig
from finsler.dual_geometry import DualGauge
from finsler.solution import LiouvilleSolution
from finsler.types import (
    CheckLog,
    CheckResult,
    CheckStatus,
    FinslerException,
    VerificationReport,
)

if TYPE_CHECKING:
    from finsler._internal.check import Check


class RunContext:
    """
    Provides everything a check needs for one verification run.

    The context owns the gauge H, its dual, the explicit solution and the
    quadrature settings built from a :class:`~finsler.config.RunConfig`,
    and executes checks with state logging, timing and error capture.
    Numerical errors raised inside a check become failed results; any
    other exception propagates.

    Attributes:
        config (RunConfig): the validated configuration.
        norm (AnisotropyNorm): the gauge H.
        gauge (DualGauge): H0 and Ĥ0 for ``norm``.
        solution (LiouvilleSolution): the explicit solution for
            (N, λ, x0).
        log (List[CheckLog]): STARTED/COMPLETED/FAILED/SKIPPED records.
        timings (Dict[str, float]): wall-clock seconds per check.

    Example:
        ```python
        ctx = RunContext.from_config(RunConfig())

        @suite.check(anchor="mass_quantization")
        def mass(ctx: RunContext):
            return verify_mass_quantization(
                ctx.solution, ctx.quadrature_for("mass")
            )
        ```
    """

    def __init__(
        self,
        config: RunConfig,
        norm: AnisotropyNorm,
        gauge: DualGauge,
        solution: LiouvilleSolution,
    ):
        self.config = config
        self.norm = norm
        self.gauge = gauge
        self.solution = solution
        self.log: List[CheckLog] = []
        self.timings: Dict[str, float] = {}

    @classmethod
    def from_config(cls, config: RunConfig) -> "RunContext":
        """
        Build the gauge, its dual and the solution a config describes.

        Raises:
            BadParameter: if the norm parameters are invalid.
        """
        n = config.solution.dimension
        norm = norm_from_spec(config.norm, n)
        gauge = DualGauge(norm)
        solution = LiouvilleSolution.create(
            gauge, config.solution.lam, config.solution.center
        )
        return cls(config, norm, gauge, solution)

    @property
    def dimension(self) -> int:
        return self.solution.dimension

    @property
    def smooth(self) -> bool:
        return self.norm.smooth

    def seed_for(self, name: str) -> int:
        """Per-check seed derived from the run seed and the check name."""
        base = self.config.quadrature.seed
        return (base + zlib.crc32(name.encode())) % 2**64

    def quadrature_for(self, name: str) -> QuadratureConfig:
        return self.config.quadrature.with_seed(self.seed_for(name))

    def applicable(self, check: "Check") -> Tuple[bool, Optional[str]]:
        if check.dimensions and self.dimension not in check.dimensions:
            return False, f"needs N in {sorted(check.dimensions)}"
        if check.smooth and not self.smooth:
            return False, "needs a smooth gauge"
        return True, None

    async def execute_check(self, check: "Check") -> List[CheckResult]:
        """
        Run one check in a worker thread and record its lifecycle.

        Returns:
            List[CheckResult]: the check's results, or a single failed
            result carrying the error when a FinslerException was raised.
        """
        logging.info(f"Check {check.name}: {CheckStatus.STARTED.value}")
        self.log.append(CheckLog(CheckStatus.STARTED, check.name))
        start = time.perf_counter()
        try:
            results = await asyncio.to_thread(check.run, self)
        except FinslerException as e:
            elapsed = time.perf_counter() - start
            logging.error(
                f"Check {check.name}: {CheckStatus.FAILED.value} after "
                f"{elapsed:.3f}s with {type(e).__name__}: {e} {e.output}"
            )
            self.timings[check.name] = elapsed
            self.log.append(
                CheckLog(CheckStatus.FAILED, check.name, elapsed, e.to_dict())
            )
            return [
                CheckResult.from_failure(
                    check.name,
                    check.anchor,
                    check.tolerance,
                    e,
                    self.seed_for(check.name),
                )
            ]
        elapsed = time.perf_counter() - start
        self.timings[check.name] = elapsed
        passed = all(result.passed for result in results)
        logging.info(
            f"Check {check.name}: {CheckStatus.COMPLETED.value} in "
            f"{elapsed:.3f}s, passed={passed}"
        )
        self.log.append(CheckLog(CheckStatus.COMPLETED, check.name, elapsed))
        return results

    async def run_checks(
        self, checks: Iterable["Check"]
    ) -> VerificationReport:
        """
        Execute the applicable checks concurrently, at most ``FL_THREADS``
        at a time, and assemble the report ordered by check name.
        """
        semaphore = asyncio.Semaphore(FL_THREADS)
        selected = []
        for check in checks:
            ok, reason = self.applicable(check)
            if ok:
                selected.append(check)
                continue
            logging.info(
                f"Check {check.name}: {CheckStatus.SKIPPED.value} ({reason})"
            )
            self.log.append(CheckLog(CheckStatus.SKIPPED, check.name))

        async def bounded(check):
            async with semaphore:
                return await self.execute_check(check)

        batches = await asyncio.gather(*(bounded(c) for c in selected))
        results = [result for batch in batches for result in batch]
        return self.report(results)

    def run(self, checks: Iterable["Check"]) -> VerificationReport:
        return asyncio.run(self.run_checks(checks))

    def report(self, results: List[CheckResult]) -> VerificationReport:
        return VerificationReport(
            version=VERSION,
            norm=self.config.norm.to_dict(),
            solution=self.config.solution.to_dict(),
            config=self.config.snapshot(),
            checks=sorted(results, key=lambda r: r.name),
            timings=dict(self.timings),
            log=list(self.log),
        )
