"""Scenario registry: named functions on named groups, plus config loading.

A scenario bundles the group argument(s), the function (as serialized
expression trees), the derivative orders to exercise, and optional
tolerance/sample overrides.  The built-in corpus spans abelian and
non-abelian groups, polynomial and analytic functions, and exact and
floating-point scalar modes.
"""

from __future__ import annotations

import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError, DomainError
from .functions import (
    Add,
    Const,
    Coord,
    Expr,
    GroupFunction,
    Mul,
    Pow,
    Prim,
    format_expr,
    has_exact_constants,
    is_polynomial,
    parse_expr,
)
from .groups import (
    Box,
    GroupElement,
    GroupSpec,
    HEISENBERG3,
    gl,
    parse_group,
    sample_element,
    translation,
)
from .multidual import ORDER_CAP

_EXACT_KINDS = ("heisenberg3", "translation")


def _exact_capable_spec(spec: GroupSpec) -> bool:
    if spec.kind == "product":
        return all(_exact_capable_spec(f) for f in spec.factors)
    return spec.kind in _EXACT_KINDS


@dataclass(frozen=True)
class Scenario:
    """One named verification subject."""

    name: str
    arg_specs: tuple[GroupSpec, ...]
    components: tuple[Expr, ...]
    orders: tuple[int, ...]
    chart: bool = False
    samples: Optional[int] = None
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.name:
            raise ConfigError("scenario needs a name")
        if len(self.orders) != len(self.arg_specs):
            raise ConfigError(f"{self.name}: one derivative order per argument")
        if any(o < 0 or o > ORDER_CAP for o in self.orders):
            raise ConfigError(f"{self.name}: orders must lie in 0..{ORDER_CAP}")
        if self.chart:
            if len(self.arg_specs) != 1 or not self.arg_specs[0].same_group(
                HEISENBERG3
            ):
                raise ConfigError(f"{self.name}: chart scenarios live on heisenberg3")
            if len(self.components) != 1:
                raise ConfigError(f"{self.name}: chart scenarios are scalar-valued")
        # triggers expression validation against the argument specs
        self.function  # noqa: B018

    @property
    def arity(self) -> int:
        return len(self.arg_specs)

    @property
    def expr_arg_specs(self) -> tuple[GroupSpec, ...]:
        """Specs the component trees are written against (the chart
        coordinates for Heisenberg chart scenarios)."""
        if self.chart:
            return (translation(3),)
        return self.arg_specs

    @property
    def chart_g(self) -> GroupFunction:
        if not self.chart:
            raise DomainError(f"{self.name} is not a chart scenario")
        return GroupFunction((translation(3),), self.components)

    @property
    def function(self) -> GroupFunction:
        from .calculus import heisenberg_chart_function

        if self.chart:
            return heisenberg_chart_function(self.chart_g)
        return GroupFunction(self.arg_specs, self.components)

    @property
    def polynomial(self) -> bool:
        return all(is_polynomial(c) for c in self.components)

    @property
    def exact_capable(self) -> bool:
        return (
            all(_exact_capable_spec(s) for s in self.arg_specs)
            and self.polynomial
            and all(has_exact_constants(c) for c in self.components)
        )

    def describe(self) -> str:
        groups = ", ".join(s.describe() for s in self.arg_specs)
        body = "; ".join(format_expr(c) for c in self.components)
        tag = " [chart]" if self.chart else ""
        return f"{self.name}: ({groups}) -> {body}{tag}"

    def sample_point(self, rng: random.Random, exact: bool = False) -> tuple:
        return tuple(sample_element(s, rng, exact) for s in self.arg_specs)


def builtin_corpus() -> tuple[Scenario, ...]:
    r1 = translation(1)
    gl2_box = gl(2).with_domain(
        Box(((0.6, 1.4), (-0.3, 0.3), (-0.3, 0.3), (0.6, 1.4)))
    )
    return (
        Scenario(
            name="heisenberg-x2",
            arg_specs=(HEISENBERG3,),
            components=(parse_expr("(coord 0 1)"),),
            orders=(2,),
            chart=True,
        ),
        Scenario(
            name="heisenberg-poly",
            arg_specs=(HEISENBERG3,),
            components=(
                parse_expr("(add (mul (coord 0 0) (coord 0 1)) (pow (coord 0 2) 2))"),
            ),
            orders=(2,),
            chart=True,
        ),
        Scenario(
            name="translation-poly",
            arg_specs=(r1, r1),
            components=(parse_expr("(mul (coord 0 0) (pow (coord 1 0) 2))"),),
            orders=(4, 4),
        ),
        Scenario(
            name="translation-analytic",
            arg_specs=(r1, r1),
            components=(parse_expr("(mul (sin (coord 0 0)) (cos (coord 1 0)))"),),
            orders=(4, 4),
        ),
        Scenario(
            name="product-heisenberg-r2",
            arg_specs=(HEISENBERG3, translation(2)),
            components=(
                parse_expr(
                    "(add (add (mul (entry 0 0 1) (coord 1 0))"
                    " (mul (entry 0 0 2) (pow (coord 1 1) 2)))"
                    " (mul (entry 0 1 2) (coord 1 1)))"
                ),
            ),
            orders=(4, 4),
        ),
        Scenario(
            name="gl2-trace",
            arg_specs=(gl2_box,),
            # tr(x)^2 - tr(x^2), a conjugation-invariant polynomial
            components=(
                parse_expr(
                    "(sub (pow (add (entry 0 0 0) (entry 0 1 1)) 2)"
                    " (add (add (pow (entry 0 0 0) 2)"
                    " (mul 2 (mul (entry 0 0 1) (entry 0 1 0))))"
                    " (pow (entry 0 1 1) 2)))"
                ),
            ),
            orders=(2,),
        ),
    )


def scenario_by_name(scenarios, name: str) -> Scenario:
    for sc in scenarios:
        if sc.name == name:
            return sc
    raise ConfigError(f"unknown scenario {name!r}")


# -- configuration files ---------------------------------------------------


def load_scenarios(path: str) -> tuple[Scenario, ...]:
    """Read a scenario registry from a TOML file (replaces the corpus)."""
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}")
    entries = data.get("scenarios", [])
    if not isinstance(entries, list):
        raise ConfigError(f"{path}: 'scenarios' must be an array of tables")
    out = []
    names = set()
    for idx, entry in enumerate(entries):
        sc = _scenario_from_table(entry, f"{path}: scenarios[{idx}]")
        if sc.name in names:
            raise ConfigError(f"{path}: duplicate scenario name {sc.name!r}")
        names.add(sc.name)
        out.append(sc)
    return tuple(out)


def _scenario_from_table(entry: dict, where: str) -> Scenario:
    if not isinstance(entry, dict):
        raise ConfigError(f"{where}: expected a table")
    try:
        name = entry["name"]
        groups = entry["groups"]
        function = entry["function"]
    except KeyError as exc:
        raise ConfigError(f"{where}: missing required key {exc}")
    known = {"name", "groups", "function", "orders", "chart", "samples", "tolerances", "domain"}
    for key in entry:
        if key not in known:
            raise ConfigError(f"{where}: unknown key {key!r}")
    try:
        arg_specs = tuple(parse_group(g) for g in groups)
        components = tuple(parse_expr(c) for c in function)
    except (DomainError, TypeError) as exc:
        raise ConfigError(f"{where}: {exc}")
    domain = entry.get("domain", {})
    if domain:
        specs = list(arg_specs)
        for key, bounds in domain.items():
            try:
                slot = int(key)
                box = Box(tuple((float(lo), float(hi)) for lo, hi in bounds))
                specs[slot] = specs[slot].with_domain(box)
            except (ValueError, IndexError, TypeError, DomainError) as exc:
                raise ConfigError(f"{where}: bad domain for argument {key!r}: {exc}")
        arg_specs = tuple(specs)
    orders = entry.get("orders")
    if orders is None:
        orders = tuple(2 for _ in arg_specs)
    try:
        return Scenario(
            name=name,
            arg_specs=arg_specs,
            components=components,
            orders=tuple(int(o) for o in orders),
            chart=bool(entry.get("chart", False)),
            samples=entry.get("samples"),
            tolerances=dict(entry.get("tolerances", {})),
        )
    except (ConfigError, DomainError) as exc:
        raise ConfigError(f"{where}: {exc}")


# -- random smooth functions for the defect sweep ---------------------------


def random_smooth_g(rng: random.Random, exact: bool = False) -> GroupFunction:
    """A random smooth scalar function on R^3: a small polynomial, plus an
    oscillatory term in float mode."""
    terms = []
    for _ in range(rng.randint(2, 4)):
        degrees = [rng.randint(0, 2) for _ in range(3)]
        while sum(degrees) == 0 or sum(degrees) > 3:
            degrees = [rng.randint(0, 2) for _ in range(3)]
        if exact:
            coeff = Fraction(rng.randint(-8, 8), rng.choice((1, 2, 4)))
        else:
            coeff = rng.uniform(-1.0, 1.0)
        term: Expr = Const(coeff)
        for k, d in enumerate(degrees):
            if d == 1:
                term = Mul(term, Coord(0, k))
            elif d > 1:
                term = Mul(term, Pow(Coord(0, k), d))
        terms.append(term)
    if not exact and rng.random() < 0.5:
        phase = Add(
            Mul(Const(rng.uniform(-1, 1)), Coord(0, 0)),
            Add(
                Mul(Const(rng.uniform(-1, 1)), Coord(0, 1)),
                Mul(Const(rng.uniform(-1, 1)), Coord(0, 2)),
            ),
        )
        kind = rng.choice(("sin", "cos"))
        terms.append(Mul(Const(rng.uniform(-1, 1)), Prim(kind, phase)))
    expr = terms[0]
    for t in terms[1:]:
        expr = Add(expr, t)
    return GroupFunction((translation(3),), (expr,))
