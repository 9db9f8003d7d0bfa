"""
The registered verification suites.

Importing this module registers every check with the CheckRegistry.
Check names double as result names in reports.
"""

import math

import numpy as np

from finsler.dual_geometry import WulffShape
from finsler.identities import (
    ASYMPTOTICS_TOLERANCES,
    BOUNDARY_TOLERANCE,
    CLOSED_FORM_TOLERANCE,
    DUALITY_TOLERANCES,
    FAR_FLUX_TOLERANCE,
    FLUX_TOLERANCE,
    GAUGE_AXIOM_TOLERANCES,
    HALVING_TOLERANCE,
    ISOPERIMETRIC_TOLERANCE,
    LINEAR_POHOZAEV_TOLERANCE,
    LOWER_BOUND_TOLERANCE,
    MC_SIGMAS,
    PERIMETER_TOLERANCE,
    POHOZAEV_LIMIT_TOLERANCE,
    RADIAL_TOLERANCE,
    RESIDUAL_TOLERANCES,
    RIGIDITY_TOLERANCE,
    WULFF_ISOPERIMETRIC_TOLERANCE,
    polygon_isoperimetric_ratio,
    random_convex_polygons,
    verify_asymptotics,
    verify_coarea,
    verify_dual_consistency,
    verify_duality,
    verify_ellipticity,
    verify_flux_balance,
    verify_gauge_axioms,
    verify_isoperimetric,
    verify_isoperimetric_polygons,
    verify_level_chain,
    verify_level_formulas,
    verify_level_rigidity,
    verify_liouville_pohozaev,
    verify_manufactured_pohozaev,
    verify_mass_lower_bound,
    verify_mass_quantization,
    verify_pde_residual,
    verify_perimeter,
    verify_pohozaev_limit,
    verify_rigidity_negative_control,
    verify_upper_bound,
    verify_wulff_pohozaev_closed_form,
    verify_wulff_volume,
)
from finsler.run_context import RunContext
from finsler.suite import Suite
from finsler.types import CheckResult, Comparison, NormFamily

BOUNDARY_DIMENSIONS = (2, 3)

ellipticity = Suite("ellipticity")
duality = Suite("duality")
geometry = Suite("geometry")
quantization = Suite("quantization")
residual = Suite("residual")
flux = Suite("flux")
pohozaev = Suite("pohozaev")
coarea = Suite("coarea")
asymptotics = Suite("asymptotics")
rigidity = Suite("rigidity")
isoperimetric = Suite("isoperimetric")


def _manufactured_p(dimension: int) -> float:
    return 2.5 if dimension == 3 else 3.0


@ellipticity.check(anchor="ellipticity", tolerance=0.0)
def uniform_ellipticity(ctx: RunContext):
    """Smallest sampled eigenvalue of Hess(H^2) stays above 1e-8."""
    return verify_ellipticity(ctx.norm)


@ellipticity.check(
    anchor="gauge_axioms", smooth=True, tolerance=GAUGE_AXIOM_TOLERANCES
)
def gauge_axioms(ctx: RunContext):
    return verify_gauge_axioms(ctx.norm, seed=ctx.seed_for("gauge_axioms"))


@duality.check(anchor="duality", tolerance=DUALITY_TOLERANCES)
def dual_identities(ctx: RunContext):
    """H0(grad H) = 1, H(grad H0) = 1 and Cauchy-Schwarz."""
    return verify_duality(ctx.gauge, seed=ctx.seed_for("dual_identities"))


@duality.check(anchor="dual_closed_form", tolerance=CLOSED_FORM_TOLERANCE)
def dual_closed_form(ctx: RunContext):
    """Closed-form duals against the brute-force supremum."""
    return verify_dual_consistency(
        ctx.gauge, seed=ctx.seed_for("dual_closed_form")
    )


@geometry.check(anchor="wulff_volume", tolerance=MC_SIGMAS)
def wulff_volume(ctx: RunContext):
    """Polar Wulff volume within 3 standard errors of rejection sampling."""
    cfg = ctx.quadrature_for("wulff_volume")
    return verify_wulff_volume(ctx.gauge, cfg.mc_samples, cfg.seed)


@geometry.check(
    anchor="wulff_perimeter",
    dimensions=BOUNDARY_DIMENSIONS,
    smooth=True,
    tolerance=PERIMETER_TOLERANCE,
)
def wulff_perimeter(ctx: RunContext):
    return verify_perimeter(ctx.gauge)


@quantization.check(anchor="mass_quantization", tolerance=RADIAL_TOLERANCE)
def mass_quantization(ctx: RunContext):
    """Total mass by radial quadrature and importance sampling."""
    return verify_mass_quantization(
        ctx.solution, ctx.quadrature_for("mass_quantization")
    )


@quantization.check(
    anchor="mass_lower_bound", tolerance=LOWER_BOUND_TOLERANCE
)
def mass_lower_bound(ctx: RunContext):
    return verify_mass_lower_bound(
        ctx.solution, ctx.quadrature_for("mass_lower_bound")
    )


@quantization.check(anchor="upper_bound", tolerance=0.0)
def upper_bound(ctx: RunContext):
    """Sampled supremum of u + N log|x|."""
    return verify_upper_bound(ctx.solution)


@residual.check(
    anchor="pde_residual", smooth=True, tolerance=RESIDUAL_TOLERANCES
)
def pde_residual(ctx: RunContext):
    """Relative residual of the explicit solution and the stencil order."""
    return verify_pde_residual(ctx.solution)


@flux.check(
    anchor="flux_balance",
    dimensions=BOUNDARY_DIMENSIONS,
    smooth=True,
    tolerance=FLUX_TOLERANCE,
)
def flux_balance(ctx: RunContext):
    """Divergence theorem on the level set {u > t0 - 1}."""
    sol = ctx.solution
    return verify_flux_balance(
        sol,
        sol.level_radius(sol.t0 - 1.0),
        ctx.quadrature_for("flux_balance"),
    )


@flux.check(
    anchor="flux_balance",
    dimensions=BOUNDARY_DIMENSIONS,
    smooth=True,
    tolerance=[FLUX_TOLERANCE, FLUX_TOLERANCE, FAR_FLUX_TOLERANCE],
)
def flux_balance_far(ctx: RunContext):
    """Boundary flux at R = 1e3 against the total mass."""
    return verify_flux_balance(
        ctx.solution, 1e3, ctx.quadrature_for("flux_balance_far")
    )


@pohozaev.check(
    anchor="pohozaev",
    dimensions=BOUNDARY_DIMENSIONS,
    smooth=True,
    tolerance=BOUNDARY_TOLERANCE,
)
def pohozaev_liouville(ctx: RunContext):
    """Pohozaev identity for the explicit solution, p = N."""
    return verify_liouville_pohozaev(
        ctx.solution,
        ys=ctx.config.pohozaev_points or None,
        cfg=ctx.quadrature_for("pohozaev_liouville"),
    )


@pohozaev.check(
    anchor="pohozaev",
    dimensions=BOUNDARY_DIMENSIONS,
    smooth=True,
    tolerance=LINEAR_POHOZAEV_TOLERANCE,
)
def pohozaev_linear(ctx: RunContext):
    """Linear field, f = 0, p != N."""
    return verify_manufactured_pohozaev(
        ctx.gauge,
        _manufactured_p(ctx.dimension),
        "linear",
        ctx.quadrature_for("pohozaev_linear"),
    )


@pohozaev.check(
    anchor="pohozaev",
    dimensions=BOUNDARY_DIMENSIONS,
    smooth=True,
    tolerance=BOUNDARY_TOLERANCE,
)
def pohozaev_dual_quadratic(ctx: RunContext):
    """u = H0^2/2 with its manufactured source, p != N."""
    return verify_manufactured_pohozaev(
        ctx.gauge,
        _manufactured_p(ctx.dimension),
        "dual_quadratic",
        ctx.quadrature_for("pohozaev_dual_quadratic"),
    )


@pohozaev.check(anchor="wulff_pohozaev", tolerance=CLOSED_FORM_TOLERANCE)
def wulff_pohozaev(ctx: RunContext):
    """Closed-form Wulff-ball split of M(t) on the 16-level grid."""
    return verify_wulff_pohozaev_closed_form(ctx.solution)


@pohozaev.check(
    anchor="pohozaev_limit",
    dimensions=BOUNDARY_DIMENSIONS,
    smooth=True,
    tolerance=POHOZAEV_LIMIT_TOLERANCE,
)
def pohozaev_limit(ctx: RunContext):
    return verify_pohozaev_limit(ctx.solution)


@coarea.check(
    anchor="coarea",
    dimensions=BOUNDARY_DIMENSIONS,
    smooth=True,
    tolerance=[BOUNDARY_TOLERANCE] * 3 + [HALVING_TOLERANCE],
)
def coarea_identities(ctx: RunContext):
    """Coarea identities on the level t0 - 1."""
    return verify_coarea(ctx.solution, ctx.solution.t0 - 1.0)


@coarea.check(
    anchor="level_chain",
    dimensions=BOUNDARY_DIMENSIONS,
    smooth=True,
    tolerance=BOUNDARY_TOLERANCE,
)
def level_chain(ctx: RunContext):
    return verify_level_chain(ctx.solution, ctx.solution.t0 - 1.0)


@asymptotics.check(
    anchor="asymptotics",
    smooth=True,
    tolerance=ASYMPTOTICS_TOLERANCES,
)
def decay_asymptotics(ctx: RunContext):
    """Logarithmic decay with gamma0 from the computed mass."""
    return verify_asymptotics(
        ctx.solution, cfg=ctx.quadrature_for("decay_asymptotics")
    )


@rigidity.check(
    anchor="level_rigidity", smooth=True, tolerance=RIGIDITY_TOLERANCE
)
def level_rigidity(ctx: RunContext):
    """Level sets are concentric Wulff spheres with constant H(grad u)."""
    return verify_level_rigidity(
        ctx.solution, seed=ctx.seed_for("level_rigidity")
    )


@rigidity.check(anchor="level_rigidity", smooth=True, tolerance=0.0)
def rigidity_negative_control(ctx: RunContext):
    """The perturbed field u + 0.01 sin(x_1) must fail rigidity."""
    return verify_rigidity_negative_control(ctx.solution)


@rigidity.check(anchor="level_formulas", tolerance=RADIAL_TOLERANCE)
def level_formulas(ctx: RunContext):
    """R(t), M(t) and the λ ↔ t0 map against independent evaluation."""
    return verify_level_formulas(
        ctx.solution, cfg=ctx.quadrature_for("level_formulas")
    )


@isoperimetric.check(
    anchor="isoperimetric",
    dimensions=BOUNDARY_DIMENSIONS,
    smooth=True,
    tolerance=WULFF_ISOPERIMETRIC_TOLERANCE,
)
def isoperimetric_wulff(ctx: RunContext):
    """Equality case: a Wulff shape of the gauge itself."""
    shape = WulffShape(ctx.solution.center, 1.5, ctx.gauge)
    return verify_isoperimetric(shape, ctx.gauge)


@isoperimetric.check(
    anchor="isoperimetric", dimensions=(2,), tolerance=ISOPERIMETRIC_TOLERANCE
)
def isoperimetric_polygons(ctx: RunContext):
    """Twenty random convex polygons stay above the Wulff bound."""
    polygons = random_convex_polygons(
        seed=ctx.seed_for("isoperimetric_polygons")
    )
    return verify_isoperimetric_polygons(polygons, ctx.gauge)


@isoperimetric.check(
    anchor="isoperimetric", dimensions=(2,), tolerance=ISOPERIMETRIC_TOLERANCE
)
def isoperimetric_square(ctx: RunContext):
    """Unit square: Q = 2/sqrt(pi) for the euclidean gauge, Q >= 1 else."""
    square = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    q, perimeter, area = polygon_isoperimetric_ratio(square, ctx.gauge)
    euclidean = ctx.norm.family is NormFamily.EUCLIDEAN
    return CheckResult.compare(
        name="isoperimetric_square",
        anchor="isoperimetric",
        computed=q,
        target=2.0 / math.sqrt(math.pi) if euclidean else 1.0,
        tolerance=ISOPERIMETRIC_TOLERANCE,
        comparison=Comparison.EQUAL if euclidean else Comparison.AT_LEAST,
        details={"perimeter": perimeter, "volume": area},
    )
