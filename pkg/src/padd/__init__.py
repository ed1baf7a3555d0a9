"""Equilibria of posted-price games against a buyer who commits to an
imitative value function.

The library computes, for a true buyer value `v`, a seller cost `c`, and a
box of producible bundles: the buyer's optimal committed (imitative) value
function, the equilibrium bundle and total payment, the induced unit-price
family, and both sides' payoffs, under linear and concave pricing classes.
It also ships the graph-based construction showing that optimizing the
commitment is as hard as maximum independent set, together with an exact
derandomized rounding.
"""

from .errors import DimensionError, NotDifferentiableError, PreconditionError
from .funcs import (
    Affine,
    BoxDomain,
    FunctionExpr,
    GradMaxResult,
    GraphMinCost,
    Leontief,
    MinOfAffine,
    PowerSum,
    Scale,
    Shape,
    Sum,
    SupergradientSet,
    as_bundle,
    as_price,
    classify,
    evaluate,
    expr_from_dict,
    expr_to_dict,
    grad_max,
    grad_max_info,
    gradient,
    supergradients,
)
from .graphs import GraphInstance, parse_graph_json, parse_graph_text
from .raygeom import RaySlopeResult, bregman, ray_slope_sup
from .response import (
    SellerSolution,
    buyer_best_response,
    optimal_price_family,
    seller_optimal_linear_price,
)
from .equilibrium import (
    EquilibriumOutcome,
    FixedBundleResult,
    ImitativeValue,
    SolverConfig,
    VerificationReport,
    fixed_bundle_optimal,
    fixed_bundle_outcome,
    solve_auto,
    solve_concave,
    solve_convex,
    solve_general,
    verify_equilibrium,
)
from .hardness import (
    RoundingState,
    brute_force_max,
    build_cost,
    derandomize,
    mis_brute_force,
    surplus_U,
    surplus_exact,
)
from .concavepricing import (
    ConcavePriceResult,
    EquivalenceReport,
    OverfitReport,
    PricingClass,
    best_concave_price,
    concave_fop_optimal,
    equivalence_check,
    overfit_scenario,
    seller_best_in_class,
)

__version__ = "0.1.0"
