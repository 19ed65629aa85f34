"""Directional derivative operators along one-parameter subgroups.

An order-``i`` iterated derivative is read off as the coefficient of the
full generator product in a single jet evaluation: each derivative slot
contributes a right factor ``I + eps_s X_s`` (exact, since ``eps_s**2 = 0``),
with the factor of the *last-applied* operator multiplied nearest the base
point.  In non-abelian groups that factor order matters and is fixed here
once; every identity check in the suites goes through these entry points.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Optional, Sequence

import numpy.polynomial.legendre

from .errors import CapacityError, DomainError
from .functions import GroupFunction, Entry, substitute
from .groups import (
    GroupElement,
    GroupHom,
    GroupSpec,
    HEISENBERG3,
    LieDirection,
    constant_direction,
    contains,
    direction_from_coords,
    element_coords,
    has_real_entries,
    mat_add,
    mat_mul,
    multiply,
    one_param_eval,
    translation,
)
from .multidual import MultiDual, ORDER_CAP, eps, lift, new_space, shift

# -- request/point records (argument bundles with their invariants) ------


@dataclass(frozen=True)
class DerivativeRequest:
    """A derivative query: base point(s) plus direction lists."""

    fn: object
    base: tuple
    g_dirs: tuple = ()
    h_dirs: tuple = ()

    def __post_init__(self):
        if len(self.g_dirs) + len(self.h_dirs) > ORDER_CAP:
            raise CapacityError(f"total order exceeds cap {ORDER_CAP}")
        if len(self.base) != len(self.fn.arg_specs):
            raise DomainError("base tuple does not match the function arity")
        if self.h_dirs and len(self.base) != 2:
            raise DomainError("second-slot directions need a two-argument function")

    def evaluate(self) -> tuple:
        if len(self.base) == 1:
            return iterated(self.fn, self.base[0], self.g_dirs)
        return partial_ij(self.fn, self.base[0], self.base[1], self.g_dirs, self.h_dirs)


@dataclass(frozen=True)
class QuotientPoint:
    """A difference-quotient argument (x, gamma, t) with optional y."""

    x: GroupElement
    gamma: LieDirection
    t: float
    y: Optional[GroupElement] = None


# -- jet plumbing ---------------------------------------------------------


def _lift_element(elem: GroupElement, order: int, space: int) -> GroupElement:
    kind = elem.spec.kind
    if kind == "translation":
        return GroupElement(elem.spec, tuple(lift(v, order, space) for v in elem.data))
    if kind == "product":
        return GroupElement(
            elem.spec,
            (
                _lift_element(elem.data[0], order, space),
                _lift_element(elem.data[1], order, space),
            ),
        )
    return GroupElement(
        elem.spec,
        tuple(tuple(lift(v, order, space) for v in row) for row in elem.data),
    )


def _apply_flow_factor(
    elem: GroupElement, x: LieDirection, bit: int, order: int, space: int
) -> GroupElement:
    """Right-multiply by exp(eps_bit X) = I + eps_bit X (exact)."""
    kind = elem.spec.kind
    if kind == "translation":
        return GroupElement(
            elem.spec,
            tuple(
                c + eps(v, bit, order, space) for c, v in zip(elem.data, x.data)
            ),
        )
    if kind == "product":
        return GroupElement(
            elem.spec,
            (
                _apply_flow_factor(elem.data[0], x.data[0], bit, order, space),
                _apply_flow_factor(elem.data[1], x.data[1], bit, order, space),
            ),
        )
    moved = mat_mul(elem.data, x.data)
    shifted = tuple(tuple(shift(v, bit) for v in row) for row in moved)
    return GroupElement(elem.spec, mat_add(elem.data, shifted))


def _perturb(
    elem: GroupElement,
    factors: Sequence[tuple[LieDirection, int]],
    order: int,
    space: int,
) -> GroupElement:
    out = _lift_element(elem, order, space)
    for direction, bit in factors:  # nearest-to-base factor first
        out = _apply_flow_factor(out, direction, bit, order, space)
    return out


def _extract(value, order: int, space: int):
    if order == 0:
        return value
    if isinstance(value, MultiDual) and value.space == space:
        return value.coeffs[-1]
    return value * 0  # constant along every perturbed slot


def _require_arity(fn, arity: int) -> None:
    if len(fn.arg_specs) != arity:
        raise DomainError(f"expected a {arity}-argument function")


def _require_point(spec: GroupSpec, elem: GroupElement, what: str = "point") -> None:
    if has_real_entries(elem) and not contains(spec, elem):
        raise DomainError(f"{what} lies outside the configured domain")


def _require_directions(spec: GroupSpec, dirs: Sequence[LieDirection]) -> None:
    for d in dirs:
        if not d.spec.same_group(spec):
            raise DomainError(
                f"direction on {d.spec.describe()} does not match {spec.describe()}"
            )


def _check_capacity(order: int) -> None:
    if order > ORDER_CAP:
        raise CapacityError(f"derivative order {order} exceeds cap {ORDER_CAP}")


# -- iterated derivatives -------------------------------------------------


def iterated(fn, x: GroupElement, dirs: Sequence[LieDirection]) -> tuple:
    """d^(i) f(x, dirs): ``dirs[k]`` is differentiated k-th from the inside,
    so the last list entry is the outermost derivative."""
    _require_arity(fn, 1)
    spec = fn.arg_specs[0]
    _require_directions(spec, dirs)
    _require_point(spec, x, "base point")
    i = len(dirs)
    if i == 0:
        return fn.values_at((x,))
    _check_capacity(i)
    space = new_space()
    factors = [(dirs[k], k) for k in reversed(range(i))]
    xp = _perturb(x, factors, i, space)
    return tuple(_extract(v, i, space) for v in fn.values_at((xp,)))


def directional(fn, x: GroupElement, gamma: LieDirection) -> tuple:
    """First derivative along one subgroup (order-one iterated derivative)."""
    return iterated(fn, x, (gamma,))


def partial_ij(
    fn,
    x: GroupElement,
    y: GroupElement,
    g_dirs: Sequence[LieDirection],
    h_dirs: Sequence[LieDirection],
    gamma_outermost: bool = True,
) -> tuple:
    """Mixed derivative d^(i,j) f: second-slot derivatives applied first,
    first-slot derivatives applied after (the definition order).  Passing
    ``gamma_outermost=False`` applies the operators in the swapped order,
    which the restricted commutation suite compares against."""
    _require_arity(fn, 2)
    spec_x, spec_y = fn.arg_specs
    _require_directions(spec_x, g_dirs)
    _require_directions(spec_y, h_dirs)
    _require_point(spec_x, x, "first base point")
    _require_point(spec_y, y, "second base point")
    i, j = len(g_dirs), len(h_dirs)
    order = i + j
    if order == 0:
        return fn.values_at((x, y))
    _check_capacity(order)
    space = new_space()
    if gamma_outermost:
        h_bit = lambda k: k
        g_bit = lambda k: j + k
    else:
        g_bit = lambda k: k
        h_bit = lambda k: i + k
    x_factors = [(g_dirs[k], g_bit(k)) for k in reversed(range(i))]
    y_factors = [(h_dirs[k], h_bit(k)) for k in reversed(range(j))]
    xp = _perturb(x, x_factors, order, space)
    yp = _perturb(y, y_factors, order, space)
    return tuple(_extract(v, order, space) for v in fn.values_at((xp, yp)))


def product_group_derivative(
    fn,
    x: GroupElement,
    y: GroupElement,
    pairs: Sequence[tuple[LieDirection, LieDirection]],
) -> tuple:
    """d^(i) of f viewed on the product group, along pair directions."""
    _require_arity(fn, 2)
    _require_point(fn.arg_specs[0], x, "first base point")
    _require_point(fn.arg_specs[1], y, "second base point")
    i = len(pairs)
    if i == 0:
        return fn.values_at((x, y))
    _check_capacity(i)
    _require_directions(fn.arg_specs[0], [p[0] for p in pairs])
    _require_directions(fn.arg_specs[1], [p[1] for p in pairs])
    space = new_space()
    x_factors = [(pairs[k][0], k) for k in reversed(range(i))]
    y_factors = [(pairs[k][1], k) for k in reversed(range(i))]
    xp = _perturb(x, x_factors, i, space)
    yp = _perturb(y, y_factors, i, space)
    return tuple(_extract(v, i, space) for v in fn.values_at((xp, yp)))


# -- difference quotients and the finite-difference oracle ----------------


def fd_oracle(
    fn, x: GroupElement, gamma: LieDirection, order: int, h: Optional[float] = None
) -> tuple[tuple, float]:
    """Central-difference estimate along t -> f(x * gamma(t)).

    One Richardson extrapolation step; returns the refined estimate and the
    indicator |est(h) - est(h/2)| (max over components).
    """
    _require_arity(fn, 1)
    if order not in (1, 2):
        raise DomainError("the difference oracle supports orders 1 and 2")
    if h is None:
        h = 1e-3 if order == 1 else 1e-2
    if h <= 0:
        raise DomainError("step size must be positive")
    spec = fn.arg_specs[0]

    def curve(t: float) -> tuple:
        point = multiply(x, one_param_eval(gamma, t))
        _require_point(spec, point, f"stencil point at t={t}")
        return fn.values_at((point,))

    f0 = curve(0.0) if order == 2 else None

    def central(step: float) -> tuple:
        plus = curve(step)
        minus = curve(-step)
        if order == 1:
            return tuple((p - m) / (2 * step) for p, m in zip(plus, minus))
        return tuple(
            (p - 2 * z + m) / (step * step) for p, z, m in zip(plus, f0, minus)
        )

    def richardson(coarse: tuple, fine: tuple) -> tuple:
        return tuple((4 * f - c) / 3 for c, f in zip(coarse, fine))

    d_h = central(h)
    d_h2 = central(h / 2)
    d_h4 = central(h / 4)
    est_coarse = richardson(d_h, d_h2)
    est_fine = richardson(d_h2, d_h4)
    indicator = max(abs(a - b) for a, b in zip(est_coarse, est_fine))
    return est_fine, indicator


def diff_quotient(fn, q: QuotientPoint) -> tuple:
    """f^[1](x, gamma, t): the quotient for t != 0, the derivative at t = 0."""
    _require_arity(fn, 1)
    spec = fn.arg_specs[0]
    _require_point(spec, q.x, "base point")
    moved = multiply(q.x, one_param_eval(q.gamma, q.t))
    _require_point(spec, moved, "shifted point")  # the U^[1] condition
    if q.t == 0:
        return directional(fn, q.x, q.gamma)
    return tuple(
        (a - b) / q.t for a, b in zip(fn.values_at((moved,)), fn.values_at((q.x,)))
    )


def diff_quotient_partial(fn, q: QuotientPoint) -> tuple:
    """f^[1,0](x, gamma, t, y): first-slot quotient of a two-argument map."""
    _require_arity(fn, 2)
    if q.y is None:
        raise DomainError("partial quotients need the second base point")
    spec = fn.arg_specs[0]
    _require_point(spec, q.x, "base point")
    _require_point(fn.arg_specs[1], q.y, "second base point")
    moved = multiply(q.x, one_param_eval(q.gamma, q.t))
    _require_point(spec, moved, "shifted point")
    if q.t == 0:
        return partial_ij(fn, q.x, q.y, (q.gamma,), ())
    top = fn.values_at((moved, q.y))
    bottom = fn.values_at((q.x, q.y))
    return tuple((a - b) / q.t for a, b in zip(top, bottom))


@lru_cache(maxsize=None)
def _gauss_unit_interval(n: int) -> tuple[tuple, tuple]:
    nodes, weights = numpy.polynomial.legendre.leggauss(n)
    return (
        tuple((float(u) + 1.0) / 2.0 for u in nodes),
        tuple(float(w) / 2.0 for w in weights),
    )


def integral_rep(
    fn,
    x: GroupElement,
    gamma: LieDirection,
    t: float,
    y: GroupElement,
    quad_nodes: int = 16,
) -> tuple:
    """Evaluate the quotient through its integral form:
    integral over u in [0,1] of d^(1,0) f(x * gamma(t u), y, gamma) du,
    by Gauss-Legendre quadrature (exact on the polynomial corpus)."""
    _require_arity(fn, 2)
    if quad_nodes < 1:
        raise DomainError("need at least one quadrature node")
    nodes, weights = _gauss_unit_interval(quad_nodes)
    spec = fn.arg_specs[0]
    total = None
    for u, w in zip(nodes, weights):
        point = multiply(x, one_param_eval(gamma, t * u))
        _require_point(spec, point, f"path point at u={u}")
        term = partial_ij(fn, point, y, (gamma,), ())
        scaled = tuple(w * v for v in term)
        total = scaled if total is None else tuple(a + b for a, b in zip(total, scaled))
    return total


# -- product-group expansion and the padding identity ----------------------


@dataclass(frozen=True)
class ExpansionResult:
    """Both sides of the product-group derivative expansion."""

    left: tuple
    right: tuple
    terms: tuple  # 2^i mixed-partial summands, split by subset of slots


def expand_product_derivative(
    fn,
    x: GroupElement,
    y: GroupElement,
    pairs: Sequence[tuple[LieDirection, LieDirection]],
) -> ExpansionResult:
    """Compare d^(i) on the product group against the sum of all 2^i
    mixed partials over ordered splits of the slot set."""
    i = len(pairs)
    _check_capacity(i)
    left = product_group_derivative(fn, x, y, pairs)
    terms = []
    right = tuple(0 for _ in range(fn.target_dim))
    for j in range(i + 1):
        for combo in combinations(range(i), j):
            rest = tuple(k for k in range(i) if k not in combo)
            g_dirs = tuple(pairs[k][0] for k in combo)
            h_dirs = tuple(pairs[k][1] for k in rest)
            term = partial_ij(fn, x, y, g_dirs, h_dirs)
            terms.append(term)
            right = tuple(a + b for a, b in zip(right, term))
    return ExpansionResult(left, right, tuple(terms))


def rho_identity_check(
    fn,
    x: GroupElement,
    y: GroupElement,
    g_dirs: Sequence[LieDirection],
    h_dirs: Sequence[LieDirection],
) -> tuple[tuple, tuple]:
    """d^(i,j) f versus d^(i+j) f on the product group with constant padding:
    slot directions (gamma_r, zero) then (zero, eta_s)."""
    spec_x, spec_y = fn.arg_specs
    zero_x = constant_direction(spec_x)
    zero_y = constant_direction(spec_y)
    lhs = partial_ij(fn, x, y, g_dirs, h_dirs)
    pairs = [(g, zero_y) for g in g_dirs] + [(zero_x, h) for h in h_dirs]
    rhs = product_group_derivative(fn, x, y, pairs)
    return lhs, rhs


# -- compositions -----------------------------------------------------------


@dataclass(frozen=True)
class HomComposite:
    """f after a continuous group homomorphism, restricted to the preimage."""

    inner: object
    hom: GroupHom

    @property
    def arg_specs(self) -> tuple:
        return (self.hom.source,)

    @property
    def target_dim(self) -> int:
        return self.inner.target_dim

    def values_at(self, args: tuple) -> tuple:
        image = self.hom(args[0])
        _require_point(self.inner.arg_specs[0], image, "image point")
        return self.inner.values_at((image,))


def compose_hom(fn, hom: GroupHom) -> HomComposite:
    _require_arity(fn, 1)
    if not hom.target.same_group(fn.arg_specs[0]):
        raise DomainError("homomorphism target does not match the function domain")
    return HomComposite(fn, hom)


@dataclass(frozen=True)
class LinearImage:
    """A continuous linear map applied after a function."""

    matrix: tuple
    inner: object

    @property
    def arg_specs(self) -> tuple:
        return self.inner.arg_specs

    @property
    def target_dim(self) -> int:
        return len(self.matrix)

    def values_at(self, args: tuple) -> tuple:
        v = self.inner.values_at(args)
        return tuple(sum(c * x for c, x in zip(row, v)) for row in self.matrix)


def compose_linear(matrix: Sequence[Sequence[float]], fn) -> LinearImage:
    rows = tuple(tuple(row) for row in matrix)
    if not rows or any(len(row) != fn.target_dim for row in rows):
        raise DomainError(
            f"matrix columns must match the target dimension {fn.target_dim}"
        )
    return LinearImage(rows, fn)


@dataclass(frozen=True)
class SmoothChain:
    """g after f, where g is a smooth map on a real vector space."""

    outer: GroupFunction
    inner: object

    @property
    def arg_specs(self) -> tuple:
        return self.inner.arg_specs

    @property
    def target_dim(self) -> int:
        return self.outer.target_dim

    def values_at(self, args: tuple) -> tuple:
        v = self.inner.values_at(args)
        point = GroupElement(self.outer.arg_specs[0], v)
        _require_point(self.outer.arg_specs[0], point, "intermediate point")
        return self.outer.values_at((point,))


def compose_lcs(outer: GroupFunction, fn) -> SmoothChain:
    if len(outer.arg_specs) != 1 or outer.arg_specs[0].kind != "translation":
        raise DomainError("the outer map must be a one-argument vector function")
    if outer.arg_specs[0].n != fn.target_dim:
        raise DomainError(
            f"outer map expects dimension {outer.arg_specs[0].n}, "
            f"inner target is {fn.target_dim}"
        )
    return SmoothChain(outer, fn)


def jacobian(outer: GroupFunction, at: Sequence) -> tuple:
    """Jacobian of a vector-space map at a point, one basis direction per column."""
    spec = outer.arg_specs[0]
    point = GroupElement(spec, tuple(at))
    cols = []
    for k in range(spec.n):
        basis = direction_from_coords(spec, tuple(1 if m == k else 0 for m in range(spec.n)))
        cols.append(directional(outer, point, basis))
    return tuple(tuple(col[r] for col in cols) for r in range(outer.target_dim))


# -- the Heisenberg witness -------------------------------------------------

_HEIS_ENTRIES = ((0, 1), (0, 2), (1, 2))

HEIS_GAMMA = direction_from_coords(HEISENBERG3, (1, 0, 0))
HEIS_ETA = direction_from_coords(HEISENBERG3, (0, 0, 1))
HEIS_CENTER = direction_from_coords(HEISENBERG3, (0, 1, 0))


def heisenberg_chart_function(g: GroupFunction) -> GroupFunction:
    """Pull a function on R^3 back through the coordinate chart of the
    Heisenberg group (chart coordinates are the three free entries)."""
    if len(g.arg_specs) != 1 or not g.arg_specs[0].same_group(translation(3)):
        raise DomainError("expected a one-argument function on translation(3)")

    def remap(node):
        if isinstance(node, Entry):
            raise DomainError("chart functions address coordinates, not entries")
        row, col = _HEIS_ENTRIES[node.k]
        return Entry(node.arg, row, col)

    return GroupFunction(
        (HEISENBERG3,), tuple(substitute(c, remap) for c in g.components)
    )


def heisenberg_defect(g: GroupFunction, x: GroupElement) -> tuple:
    """Both second-order mixed derivatives of g pulled back to the group,
    along the two fixed generators, plus their difference.

    The difference equals the partial derivative of g in its second
    coordinate at the chart image of x (the mixed derivatives do not
    commute whenever that partial is nonzero)."""
    if g.target_dim != 1:
        raise DomainError("the defect witness is defined for scalar functions")
    if not x.spec.same_group(HEISENBERG3):
        raise DomainError("the witness lives on the Heisenberg group")
    f = heisenberg_chart_function(g)
    d_gamma_eta = iterated(f, x, (HEIS_ETA, HEIS_GAMMA))[0]
    d_eta_gamma = iterated(f, x, (HEIS_GAMMA, HEIS_ETA))[0]
    return (d_gamma_eta, d_eta_gamma, d_gamma_eta - d_eta_gamma)


def heisenberg_partial2(g: GroupFunction, x: GroupElement):
    """The second-coordinate partial of g at the chart image of x."""
    point = GroupElement(translation(3), element_coords(x))
    basis = direction_from_coords(translation(3), (0, 1, 0))
    return directional(g, point, basis)[0]
