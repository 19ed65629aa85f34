"""Directional calculus on matrix Lie groups, with identity verification.

The package computes iterated directional derivatives of vector-valued
functions along one-parameter subgroups — exactly, via a nilpotent jet
algebra — and mechanically checks the algebraic identities those
derivatives satisfy: restricted commutation on product groups, the
curry/uncurry exchange laws, product-group expansions, difference-quotient
and integral representations, chain rules, and the Heisenberg
non-commutation defect.
"""

__version__ = "0.1.0"

from .errors import (
    CapacityError,
    ConfigError,
    DomainError,
    EvaluationError,
    GroupCalcError,
)
from .groups import (
    Box,
    GroupElement,
    GroupHom,
    GroupSpec,
    HEISENBERG3,
    LieDirection,
    SE2,
    constant_direction,
    gl,
    hom_push,
    identity,
    multiply,
    one_param_eval,
    parse_group,
    product,
    product_direction,
    translation,
)
from .multidual import (
    MultiDual,
    ORDER_CAP,
    md_compose,
    md_extract,
    md_lift,
    md_mul,
    md_var,
)
from .functions import (
    GroupFunction,
    eval_expr,
    flip,
    format_expr,
    parse_expr,
)
from .calculus import (
    DerivativeRequest,
    QuotientPoint,
    compose_hom,
    compose_lcs,
    compose_linear,
    diff_quotient,
    diff_quotient_partial,
    directional,
    expand_product_derivative,
    fd_oracle,
    heisenberg_defect,
    integral_rep,
    iterated,
    partial_ij,
    rho_identity_check,
)
from .explaw import CurriedFunction, curried_derivative, curry, uncurry, verify_exchange
from .scenarios import Scenario, builtin_corpus, load_scenarios
from .suites import Report, RunContext, SUITE_NAMES, run_suites

__all__ = [
    "Box",
    "CapacityError",
    "ConfigError",
    "CurriedFunction",
    "DerivativeRequest",
    "DomainError",
    "EvaluationError",
    "GroupCalcError",
    "GroupElement",
    "GroupFunction",
    "GroupHom",
    "GroupSpec",
    "HEISENBERG3",
    "LieDirection",
    "MultiDual",
    "ORDER_CAP",
    "QuotientPoint",
    "Report",
    "RunContext",
    "SE2",
    "SUITE_NAMES",
    "Scenario",
    "builtin_corpus",
    "compose_hom",
    "compose_lcs",
    "compose_linear",
    "constant_direction",
    "curried_derivative",
    "curry",
    "diff_quotient",
    "diff_quotient_partial",
    "directional",
    "eval_expr",
    "expand_product_derivative",
    "fd_oracle",
    "flip",
    "format_expr",
    "gl",
    "heisenberg_defect",
    "hom_push",
    "identity",
    "integral_rep",
    "iterated",
    "load_scenarios",
    "md_compose",
    "md_extract",
    "md_lift",
    "md_mul",
    "md_var",
    "multiply",
    "one_param_eval",
    "parse_expr",
    "parse_group",
    "partial_ij",
    "product",
    "product_direction",
    "rho_identity_check",
    "run_suites",
    "translation",
    "uncurry",
    "verify_exchange",
]
