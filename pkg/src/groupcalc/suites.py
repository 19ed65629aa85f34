"""Verification suites: run every identity of the calculus at sampled points.

Each suite draws its own deterministic RNG stream from (seed, suite,
scenario), evaluates both sides of one identity family on every applicable
scenario, and reports the worst absolute and relative deviations.  Sample
aggregation is associative (running maxima), so evaluation order never
affects a report.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from . import __version__
from .calculus import (
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
    heisenberg_partial2,
    integral_rep,
    iterated,
    jacobian,
    partial_ij,
    rho_identity_check,
)
from .errors import ConfigError, GroupCalcError
from .explaw import curry, curried_derivative, uncurry, verify_exchange
from .functions import (
    Add,
    Const,
    Coord,
    FixedSlice,
    GroupFunction,
    Mul,
    Pow,
    Prim,
    flip,
)
from .groups import (
    direction_from_coords,
    heisenberg_abelianization,
    hom_push,
    identity_hom,
    line_embedding_hom,
    linear_hom,
    sample_direction,
    sample_element,
    translation,
)
from .scenarios import Scenario, random_smooth_g

SUITE_NAMES = (
    "schwarz",
    "flip",
    "expansion",
    "rho",
    "quotient",
    "integral",
    "exchange",
    "roundtrip",
    "chain",
    "heisenberg",
    "oracle",
)

DEFAULT_TOLERANCES = {
    "schwarz": 1e-9,
    "flip": 1e-10,
    "expansion": 1e-9,
    "rho": 1e-9,
    "quotient": 1e-6,
    "integral": 1e-8,  # analytic scenarios relax to 1e-6
    "exchange": 1e-9,
    "roundtrip": 0.0,
    "chain": 1e-9,
    "heisenberg": 1e-9,
    "oracle": 1e-5,  # relative
}

DEFAULT_SAMPLES = {
    "schwarz": 200,
    "flip": 50,
    "expansion": 50,
    "rho": 25,
    "quotient": 25,
    "integral": 25,
    "exchange": 50,
    "roundtrip": 100,
    "chain": 50,
    "heisenberg": 100,
    "oracle": 50,
}

# suites whose pass/fail compares the relative deviation
_RELATIVE_SUITES = frozenset({"oracle"})


@dataclass
class RunContext:
    seed: int = 42
    mode: str = "float"
    tolerance_override: Optional[float] = None
    samples_override: Optional[int] = None
    fd_step: Optional[float] = None

    @property
    def exact(self) -> bool:
        return self.mode == "exact"

    def rng(self, suite: str, scenario: str) -> random.Random:
        return random.Random(f"{self.seed}/{self.mode}/{suite}/{scenario}")

    def tolerance(self, suite: str, scenario: Scenario, default=None) -> float:
        if self.tolerance_override is not None:
            return self.tolerance_override
        if suite in scenario.tolerances:
            return float(scenario.tolerances[suite])
        if default is not None:
            return default
        return DEFAULT_TOLERANCES[suite]

    def samples(self, suite: str, scenario: Scenario) -> int:
        if self.samples_override is not None:
            return self.samples_override
        if scenario.samples is not None:
            return scenario.samples
        return DEFAULT_SAMPLES[suite]


@dataclass
class SuiteRecord:
    suite: str
    scenario: str
    samples: int
    max_abs_dev: float
    max_rel_dev: float
    passed: bool
    tolerance: float
    seed: int
    mode: str

    def as_dict(self) -> dict:
        return {
            "suite": self.suite,
            "scenario": self.scenario,
            "samples": self.samples,
            "max_abs_dev": self.max_abs_dev,
            "max_rel_dev": self.max_rel_dev,
            "pass": self.passed,
            "tolerance": self.tolerance,
            "seed": self.seed,
            "mode": self.mode,
        }

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return (
            f"{self.suite:<10} {self.scenario:<22} samples={self.samples:<5} "
            f"max_abs={self.max_abs_dev:<12.3e} max_rel={self.max_rel_dev:<12.3e} "
            f"{flag}"
        )


class _Accumulator:
    """Running worst-case deviations between identity sides."""

    def __init__(self) -> None:
        self.max_abs = 0.0
        self.max_rel = 0.0
        self.count = 0

    def add(self, lhs: Sequence, rhs: Sequence) -> None:
        self.count += 1
        for a, b in zip(lhs, rhs):
            dev = abs(a - b)
            dev = float(dev) if isinstance(dev, Fraction) else dev
            scale = abs(float(b)) if isinstance(b, Fraction) else abs(b)
            self.max_abs = max(self.max_abs, dev)
            self.max_rel = max(self.max_rel, dev / max(1.0, scale))

    def record(
        self, suite: str, scenario: str, tol: float, ctx: RunContext
    ) -> SuiteRecord:
        key = self.max_rel if suite in _RELATIVE_SUITES else self.max_abs
        return SuiteRecord(
            suite=suite,
            scenario=scenario,
            samples=self.count,
            max_abs_dev=self.max_abs,
            max_rel_dev=self.max_rel,
            passed=key <= tol,
            tolerance=tol,
            seed=ctx.seed,
            mode=ctx.mode,
        )


def _sample_dirs(spec, rng, count: int, exact: bool) -> tuple:
    return tuple(sample_direction(spec, rng, exact) for _ in range(count))


def _one_arg_views(scenario: Scenario, rng: random.Random, exact: bool):
    """One-argument views of a scenario function: the function itself, or
    slices with one slot frozen at a sampled point."""
    f = scenario.function
    if scenario.arity == 1:
        return (f,)
    x, y = scenario.sample_point(rng, exact)
    return (FixedSlice(f, 1, y), FixedSlice(f, 0, x))


# -- individual suites -----------------------------------------------------


def _suite_schwarz(sc: Scenario, ctx: RunContext) -> list[SuiteRecord]:
    """Restricted commutation: second-slot derivatives commute past
    first-slot derivatives for maps on a product of groups."""
    if sc.arity != 2:
        return []
    rng = ctx.rng("schwarz", sc.name)
    f = sc.function
    acc = _Accumulator()
    n = ctx.samples("schwarz", sc)
    for i in range(1, min(2, sc.orders[0]) + 1):
        for j in range(1, min(2, sc.orders[1]) + 1):
            for _ in range(n):
                x, y = sc.sample_point(rng, ctx.exact)
                gs = _sample_dirs(sc.arg_specs[0], rng, i, ctx.exact)
                hs = _sample_dirs(sc.arg_specs[1], rng, j, ctx.exact)
                eta_last = partial_ij(f, x, y, gs, hs, gamma_outermost=False)
                gamma_last = partial_ij(f, x, y, gs, hs, gamma_outermost=True)
                acc.add(eta_last, gamma_last)
    return [acc.record("schwarz", sc.name, ctx.tolerance("schwarz", sc), ctx)]


def _suite_flip(sc: Scenario, ctx: RunContext) -> list[SuiteRecord]:
    """Argument swap: derivatives of the flipped map match with the
    direction lists exchanged."""
    if sc.arity != 2:
        return []
    rng = ctx.rng("flip", sc.name)
    f = sc.function
    g = flip(f)
    acc = _Accumulator()
    n = ctx.samples("flip", sc)
    for i in range(0, min(2, sc.orders[0]) + 1):
        for j in range(0, min(2, sc.orders[1]) + 1):
            for _ in range(max(1, n // 4)):
                x, y = sc.sample_point(rng, ctx.exact)
                gs = _sample_dirs(sc.arg_specs[0], rng, i, ctx.exact)
                hs = _sample_dirs(sc.arg_specs[1], rng, j, ctx.exact)
                lhs = partial_ij(g, y, x, hs, gs)
                rhs = partial_ij(f, x, y, gs, hs)
                acc.add(lhs, rhs)
    return [acc.record("flip", sc.name, ctx.tolerance("flip", sc), ctx)]


def _suite_expansion(sc: Scenario, ctx: RunContext) -> list[SuiteRecord]:
    """Product-group derivative expansion into 2^i mixed partials over
    ordered slot splits."""
    if sc.arity != 2:
        return []
    rng = ctx.rng("expansion", sc.name)
    f = sc.function
    acc = _Accumulator()
    n = ctx.samples("expansion", sc)
    for i in (1, 2, 3):
        if i > min(sc.orders):
            continue
        for _ in range(max(1, n // 3)):
            x, y = sc.sample_point(rng, ctx.exact)
            pairs = [
                (
                    sample_direction(sc.arg_specs[0], rng, ctx.exact),
                    sample_direction(sc.arg_specs[1], rng, ctx.exact),
                )
                for _ in range(i)
            ]
            res = expand_product_derivative(f, x, y, pairs)
            if len(res.terms) != 2**i:
                raise GroupCalcError(
                    f"expansion produced {len(res.terms)} terms, wanted {2**i}"
                )
            acc.add(res.left, res.right)
    return [acc.record("expansion", sc.name, ctx.tolerance("expansion", sc), ctx)]


def _suite_rho(sc: Scenario, ctx: RunContext) -> list[SuiteRecord]:
    """Mixed partials as product-group derivatives padded with constant
    subgroups in the untouched slot."""
    if sc.arity != 2:
        return []
    rng = ctx.rng("rho", sc.name)
    f = sc.function
    acc = _Accumulator()
    n = ctx.samples("rho", sc)
    for i in range(0, min(4, sc.orders[0]) + 1):
        for j in range(0, min(4, sc.orders[1]) + 1):
            if i + j > 4:
                continue
            for _ in range(max(1, n // 5)):
                x, y = sc.sample_point(rng, ctx.exact)
                gs = _sample_dirs(sc.arg_specs[0], rng, i, ctx.exact)
                hs = _sample_dirs(sc.arg_specs[1], rng, j, ctx.exact)
                lhs, rhs = rho_identity_check(f, x, y, gs, hs)
                acc.add(lhs, rhs)
    return [acc.record("rho", sc.name, ctx.tolerance("rho", sc), ctx)]


def _suite_quotient(sc: Scenario, ctx: RunContext) -> list[SuiteRecord]:
    """Difference quotients converge to the derivative: extrapolate the
    quotient in t and compare with the jet value at t = 0."""
    ts = (1e-2, 1e-3, 1e-4)
    rng = ctx.rng("quotient", sc.name)
    acc = _Accumulator()
    n = ctx.samples("quotient", sc)
    f = sc.function
    for _ in range(n):
        if sc.arity == 1:
            (x,) = sc.sample_point(rng, ctx.exact)
            gamma = sample_direction(sc.arg_specs[0], rng, ctx.exact)
            quot = [diff_quotient(f, QuotientPoint(x, gamma, t)) for t in ts]
            exact_value = diff_quotient(f, QuotientPoint(x, gamma, 0))
        else:
            x, y = sc.sample_point(rng, ctx.exact)
            gamma = sample_direction(sc.arg_specs[0], rng, ctx.exact)
            quot = [
                diff_quotient_partial(f, QuotientPoint(x, gamma, t, y)) for t in ts
            ]
            exact_value = diff_quotient_partial(f, QuotientPoint(x, gamma, 0, y))
        # quotients are derivative + O(t): one extrapolation step at ratio 10
        extrapolated = tuple(
            (10 * fine - coarse) / 9 for coarse, fine in zip(quot[-2], quot[-1])
        )
        acc.add(extrapolated, exact_value)
    return [acc.record("quotient", sc.name, ctx.tolerance("quotient", sc), ctx)]


def _suite_integral(sc: Scenario, ctx: RunContext) -> list[SuiteRecord]:
    """The partial difference quotient equals the quadrature of the
    first-slot derivative along the connecting flow."""
    if sc.arity != 2:
        return []
    rng = ctx.rng("integral", sc.name)
    f = sc.function
    acc = _Accumulator()
    n = ctx.samples("integral", sc)
    default = 1e-8 if sc.polynomial else 1e-6
    tol = ctx.tolerance("integral", sc, default=default)
    for k in range(n):
        x, y = sc.sample_point(rng, ctx.exact)
        gamma = sample_direction(sc.arg_specs[0], rng, ctx.exact)
        t = 0.0 if k == 0 else rng.uniform(-0.8, 0.8)
        lhs = integral_rep(f, x, gamma, t, y)
        rhs = diff_quotient_partial(f, QuotientPoint(x, gamma, t, y))
        acc.add(lhs, rhs)
    return [acc.record("integral", sc.name, tol, ctx)]


def _suite_exchange(sc: Scenario, ctx: RunContext) -> list[SuiteRecord]:
    """Exponential-law exchange: derivatives of the curried family, then of
    its member functions, against the direct mixed partials."""
    if sc.arity != 2:
        return []
    rng = ctx.rng("exchange", sc.name)
    f = sc.function
    g = curry(f)
    acc = _Accumulator()
    n = ctx.samples("exchange", sc)
    for i in range(0, min(2, sc.orders[0]) + 1):
        for j in range(0, min(2, sc.orders[1]) + 1):
            for _ in range(max(1, n // 8)):
                x, y = sc.sample_point(rng, ctx.exact)
                gs = _sample_dirs(sc.arg_specs[0], rng, i, ctx.exact)
                hs = _sample_dirs(sc.arg_specs[1], rng, j, ctx.exact)
                lhs, rhs = verify_exchange(g, x, y, gs, hs)
                acc.add(lhs, rhs)
    return [acc.record("exchange", sc.name, ctx.tolerance("exchange", sc), ctx)]


def _suite_roundtrip(sc: Scenario, ctx: RunContext) -> list[SuiteRecord]:
    """Currying round trips reproduce the original evaluations exactly."""
    if sc.arity != 2:
        return []
    rng = ctx.rng("roundtrip", sc.name)
    f = sc.function
    g = curry(f)
    back = uncurry(g)
    again = curry(back)
    acc = _Accumulator()
    n = ctx.samples("roundtrip", sc)
    for _ in range(n):
        x, y = sc.sample_point(rng, ctx.exact)
        reference = f.values_at((x, y))
        acc.add(back.values_at((x, y)), reference)
        acc.add(g.at(x).values_at((y,)), reference)
        acc.add(again.at(x).values_at((y,)), reference)
    return [acc.record("roundtrip", sc.name, ctx.tolerance("roundtrip", sc), ctx)]


def _post_map(dim: int, exact: bool) -> GroupFunction:
    """A smooth map R^dim -> R for the vector-space chain rule."""
    spec = translation(dim)
    expr = Add(Pow(Coord(0, 0), 2), Mul(Const(3), Coord(0, 0)))
    for k in range(1, dim):
        expr = Add(expr, Pow(Coord(0, k), 2))
    if not exact:
        expr = Add(expr, Prim("sin", Coord(0, 0)))
    return GroupFunction((spec,), (expr,))


def _homs_into(spec, rng: random.Random, exact: bool):
    """Built-in homomorphisms with the given target group."""
    homs = [identity_hom(spec)]
    if spec.kind == "heisenberg3":
        direction = sample_direction(spec, rng, exact)
        homs.append(line_embedding_hom(spec, direction))
    elif spec.kind == "translation":
        source = translation(2)
        matrix = tuple(
            tuple(
                Fraction(rng.randint(-2, 2)) if exact else rng.uniform(-1, 1)
                for _ in range(2)
            )
            for _ in range(spec.n)
        )
        homs.append(linear_hom(source, spec, matrix))
        if spec.n == 2:
            homs.append(heisenberg_abelianization())
    elif spec.kind == "gl" and spec.n >= 2:
        coords = [0] * (spec.n * spec.n)
        coords[1] = 0.2  # nilpotent E12 direction, scaled to stay in box domains
        homs.append(line_embedding_hom(spec, direction_from_coords(spec, coords)))
    return homs


def _suite_chain(sc: Scenario, ctx: RunContext) -> list[SuiteRecord]:
    """Chain rules: composition with homomorphisms, with continuous linear
    maps, and with smooth vector-space maps."""
    rng = ctx.rng("chain", sc.name)
    acc = _Accumulator()
    n = ctx.samples("chain", sc)
    for k in range(n):
        views = _one_arg_views(sc, rng, ctx.exact)
        h = views[k % len(views)]
        spec = h.arg_specs[0]
        z = sample_element(spec, rng, ctx.exact)
        order = 1 + (k % 2)
        dirs = _sample_dirs(spec, rng, order, ctx.exact)

        # linear maps commute with derivatives
        if ctx.exact:
            matrix = tuple(
                tuple(Fraction(rng.randint(-3, 3)) for _ in range(h.target_dim))
                for _ in range(2)
            )
        else:
            matrix = tuple(
                tuple(rng.uniform(-2, 2) for _ in range(h.target_dim))
                for _ in range(2)
            )
        lam = compose_linear(matrix, h)
        lhs = iterated(lam, z, dirs)
        base = iterated(h, z, dirs)
        rhs = tuple(sum(c * v for c, v in zip(row, base)) for row in matrix)
        acc.add(lhs, rhs)

        # group homomorphisms transport directions through their algebra map
        homs = _homs_into(spec, rng, ctx.exact)
        hom = homs[k % len(homs)]
        composite = compose_hom(h, hom)
        src_dirs = _sample_dirs(hom.source, rng, order, ctx.exact)
        zs = sample_element(hom.source, rng, ctx.exact, margin=0.2)
        lhs = iterated(composite, zs, src_dirs)
        rhs = iterated(h, hom(zs), tuple(hom_push(hom, d) for d in src_dirs))
        acc.add(lhs, rhs)

        # smooth post-maps: first-order chain rule through the Jacobian
        post = _post_map(h.target_dim, ctx.exact)
        chained = compose_lcs(post, h)
        gamma = dirs[0]
        lhs = directional(chained, z, gamma)
        value = h.values_at((z,))
        jac = jacobian(post, value)
        dvec = directional(h, z, gamma)
        rhs = tuple(sum(c * v for c, v in zip(row, dvec)) for row in jac)
        acc.add(lhs, rhs)
    return [acc.record("chain", sc.name, ctx.tolerance("chain", sc), ctx)]


def _suite_heisenberg(sc: Scenario, ctx: RunContext) -> list[SuiteRecord]:
    """The non-commutation witness: the mixed-derivative defect along the
    two fixed generators equals the second-coordinate partial of the
    chart function."""
    if not sc.chart:
        return []
    rng = ctx.rng("heisenberg", sc.name)
    g = sc.chart_g
    acc = _Accumulator()
    n = ctx.samples("heisenberg", sc)
    for _ in range(n):
        x = sample_element(sc.arg_specs[0], rng, ctx.exact)
        d_ge, d_eg, defect = heisenberg_defect(g, x)
        expected = heisenberg_partial2(g, x)
        acc.add((defect, d_ge), (expected, d_eg + expected))
    return [acc.record("heisenberg", sc.name, ctx.tolerance("heisenberg", sc), ctx)]


def _heisenberg_sweep(scenarios, ctx: RunContext) -> list[SuiteRecord]:
    """Defect contract over freshly generated random smooth functions."""
    charts = [sc for sc in scenarios if sc.chart]
    if not charts:
        return []
    rng = ctx.rng("heisenberg", "random-smooth-g")
    acc = _Accumulator()
    spec = charts[0].arg_specs[0]
    for _ in range(100):
        g = random_smooth_g(rng, ctx.exact)
        x = sample_element(spec, rng, ctx.exact)
        _, _, defect = heisenberg_defect(g, x)
        expected = heisenberg_partial2(g, x)
        acc.add((defect,), (expected,))
    tol = (
        ctx.tolerance_override
        if ctx.tolerance_override is not None
        else DEFAULT_TOLERANCES["heisenberg"]
    )
    return [acc.record("heisenberg", "random-smooth-g", tol, ctx)]


def _suite_oracle(sc: Scenario, ctx: RunContext) -> list[SuiteRecord]:
    """Jet derivatives against the independent central-difference oracle."""
    rng = ctx.rng("oracle", sc.name)
    acc = _Accumulator()
    n = ctx.samples("oracle", sc)
    for k in range(n):
        views = _one_arg_views(sc, rng, ctx.exact)
        h = views[k % len(views)]
        spec = h.arg_specs[0]
        z = sample_element(spec, rng, ctx.exact)
        gamma = sample_direction(spec, rng, ctx.exact)
        order = 1 + (k % 2)
        jet = iterated(h, z, (gamma,) * order)
        estimate, _ = fd_oracle(h, z, gamma, order, h=ctx.fd_step)
        acc.add(jet, estimate)
    return [acc.record("oracle", sc.name, ctx.tolerance("oracle", sc), ctx)]


SUITE_IMPLS: dict[str, Callable] = {
    "schwarz": _suite_schwarz,
    "flip": _suite_flip,
    "expansion": _suite_expansion,
    "rho": _suite_rho,
    "quotient": _suite_quotient,
    "integral": _suite_integral,
    "exchange": _suite_exchange,
    "roundtrip": _suite_roundtrip,
    "chain": _suite_chain,
    "heisenberg": _suite_heisenberg,
    "oracle": _suite_oracle,
}

# suite-wide checks that run once after the per-scenario records
SUITE_SWEEPS: dict[str, Callable] = {
    "heisenberg": _heisenberg_sweep,
}


def _failure_record(suite: str, scenario: str, ctx: RunContext) -> SuiteRecord:
    """An unevaluable check counts as a failed identity, not a crash."""
    return SuiteRecord(
        suite=suite,
        scenario=scenario,
        samples=0,
        max_abs_dev=float("inf"),
        max_rel_dev=float("inf"),
        passed=False,
        tolerance=ctx.tolerance_override
        if ctx.tolerance_override is not None
        else DEFAULT_TOLERANCES[suite],
        seed=ctx.seed,
        mode=ctx.mode,
    )


@dataclass
class Report:
    meta: dict
    records: list[SuiteRecord]

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.records)

    def to_dict(self) -> dict:
        return {
            "meta": self.meta,
            "records": [r.as_dict() for r in self.records],
        }

    def to_json(self) -> str:
        import json

        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def run_suites(
    scenarios: Sequence[Scenario],
    suites: Optional[Sequence[str]] = None,
    ctx: Optional[RunContext] = None,
) -> Report:
    """Execute the selected suites over the scenario registry."""
    ctx = ctx or RunContext()
    if suites is None:
        suites = SUITE_NAMES
    unknown = [s for s in suites if s not in SUITE_IMPLS]
    if unknown:
        raise ConfigError(f"unknown suites: {', '.join(unknown)}")
    if ctx.mode not in ("float", "exact"):
        raise ConfigError(f"unknown mode {ctx.mode!r}")
    if ctx.exact:
        scenarios = [sc for sc in scenarios if sc.exact_capable]
    started = time.perf_counter()
    records: list[SuiteRecord] = []
    notes: list[str] = []
    for suite in SUITE_NAMES:  # canonical report order
        if suite not in suites:
            continue
        impl = SUITE_IMPLS[suite]
        for sc in scenarios:
            try:
                records.extend(impl(sc, ctx))
            except GroupCalcError as exc:
                records.append(_failure_record(suite, sc.name, ctx))
                notes.append(f"{suite}/{sc.name} could not be evaluated: {exc}")
        sweep = SUITE_SWEEPS.get(suite)
        if sweep is not None:
            try:
                records.extend(sweep(scenarios, ctx))
            except GroupCalcError as exc:
                records.append(_failure_record(suite, "random-smooth-g", ctx))
                notes.append(f"{suite} sweep could not be evaluated: {exc}")
    meta = {
        "seed": ctx.seed,
        "mode": ctx.mode,
        "suites": list(suites),
        "scenarios": [sc.name for sc in scenarios],
        "tolerance_override": ctx.tolerance_override,
        "samples_override": ctx.samples_override,
        "fd_step": ctx.fd_step,
        "notes": notes,
        "version": __version__,
        "wall_time_s": round(time.perf_counter() - started, 6),
    }
    return Report(meta, records)
