"""Truncated multivariate dual scalars for exact mixed directional derivatives.

A ``MultiDual`` of order ``i`` carries one square-zero generator per
derivative slot and ``2**i`` coefficients indexed by generator subsets
(bitmasks).  The coefficient of the full product of generators is the
order-``i`` mixed derivative of whatever expression produced the value.

Coefficients may themselves be ``MultiDual`` values from an enclosing
derivative pass.  Every pass works in its own *space* (a monotonically
increasing id): values from the same space convolve, while a value from an
older space is treated as a plain coefficient scalar of the newer one.  This
keeps nested passes (derivatives of derivative-valued functions) from mixing
their generators.
"""

from __future__ import annotations

import itertools
import math
import numbers
from fractions import Fraction

from .errors import CapacityError, DomainError, EvaluationError

ORDER_CAP = 8

_space_counter = itertools.count(1)

SMOOTH_PRIMITIVES = ("exp", "log", "sin", "cos", "pow", "recip")
_TRANSCENDENTAL = frozenset({"exp", "log", "sin", "cos"})


def new_space() -> int:
    """Reserve a fresh generator space for one derivative pass."""
    return next(_space_counter)


class MultiDual:
    """Truncated polynomial in square-zero generators over a scalar ring."""

    __slots__ = ("space", "order", "coeffs")

    def __init__(self, space: int, order: int, coeffs: tuple):
        self.space = space
        self.order = order
        self.coeffs = coeffs

    @property
    def value(self):
        """The underlying scalar (empty-subset coefficient)."""
        return self.coeffs[0]

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        if isinstance(other, MultiDual):
            if other.space == self.space:
                self._check_order(other)
                return MultiDual(
                    self.space,
                    self.order,
                    tuple(a + b for a, b in zip(self.coeffs, other.coeffs)),
                )
            if other.space > self.space:
                return other + self
        elif not isinstance(other, numbers.Real):
            return NotImplemented
        return MultiDual(
            self.space, self.order, (self.coeffs[0] + other,) + self.coeffs[1:]
        )

    __radd__ = __add__

    def __neg__(self):
        return MultiDual(self.space, self.order, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, MultiDual):
            if other.space == self.space:
                self._check_order(other)
                return MultiDual(
                    self.space, self.order, _convolve(self.coeffs, other.coeffs)
                )
            if other.space > self.space:
                # self acts as a coefficient scalar of the newer space
                return MultiDual(
                    other.space, other.order, tuple(self * c for c in other.coeffs)
                )
        elif not isinstance(other, numbers.Real):
            return NotImplemented
        return MultiDual(self.space, self.order, tuple(c * other for c in self.coeffs))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, MultiDual):
            return self * _compose(other, "recip")
        if isinstance(other, numbers.Real):
            return MultiDual(
                self.space, self.order, tuple(c / other for c in self.coeffs)
            )
        return NotImplemented

    def __rtruediv__(self, other):
        return other * _compose(self, "recip")

    def __pow__(self, exponent):
        if isinstance(exponent, numbers.Integral):
            n = int(exponent)
            if n < 0:
                return _compose(self, "recip") ** (-n)
            out = 1 + (self * 0)
            base = self
            while n:
                if n & 1:
                    out = out * base
                base = base * base
                n >>= 1
            return out
        return _compose(self, "pow", exponent=exponent)

    def __eq__(self, other):
        if not isinstance(other, MultiDual):
            return NotImplemented
        return (
            self.space == other.space
            and self.order == other.order
            and self.coeffs == other.coeffs
        )

    def __repr__(self):
        return f"MultiDual(order={self.order}, coeffs={self.coeffs!r})"

    def _check_order(self, other: "MultiDual") -> None:
        if other.order != self.order:
            raise DomainError(
                f"MultiDual order mismatch: {self.order} vs {other.order}"
            )


def _convolve(a: tuple, b: tuple) -> tuple:
    # c[S] = sum over disjoint splits A ∪ B = S; generators square to zero
    out = []
    for s in range(len(a)):
        acc = a[s] * b[0]
        if s:
            sub = (s - 1) & s
            while True:
                acc = acc + a[sub] * b[s ^ sub]
                if sub == 0:
                    break
                sub = (sub - 1) & s
        out.append(acc)
    return tuple(out)


# -- constructors ------------------------------------------------------


def _check_capacity(order: int) -> None:
    if not 0 <= order <= ORDER_CAP:
        raise CapacityError(f"order {order} outside supported range 0..{ORDER_CAP}")


def lift(value, order: int, space: int = 0) -> MultiDual:
    """Embed a scalar as a constant of the given generator space."""
    _check_capacity(order)
    zero = value * 0
    return MultiDual(space, order, (value,) + (zero,) * ((1 << order) - 1))


def eps(value, bit: int, order: int, space: int = 0) -> MultiDual:
    """The term ``value * eps_bit`` (bit is 0-based)."""
    _check_capacity(order)
    zero = value * 0
    coeffs = [zero] * (1 << order)
    coeffs[1 << bit] = value
    return MultiDual(space, order, tuple(coeffs))


def shift(m: MultiDual, bit: int) -> MultiDual:
    """Multiply by the single generator ``eps_bit`` (reindexing, no products)."""
    bitmask = 1 << bit
    zero = m.coeffs[0] * 0
    out = [zero] * len(m.coeffs)
    for mask in range(len(m.coeffs)):
        if not mask & bitmask:
            out[mask | bitmask] = m.coeffs[mask]
    return MultiDual(m.space, m.order, tuple(out))


# -- spec-surface operations ------------------------------------------


def md_lift(value, order: int) -> MultiDual:
    """Constant embedding: value in the empty-subset slot, zeros elsewhere."""
    return lift(value, order)


def md_var(value, slot: int, order: int) -> MultiDual:
    """``value + eps_slot`` with a 1-based slot index (seeded variable)."""
    _check_capacity(order)
    if not 1 <= slot <= order:
        raise DomainError(f"slot {slot} outside 1..{order}")
    return lift(value, order) + eps(value * 0 + 1, slot - 1, order)


def md_mul(a: MultiDual, b: MultiDual) -> MultiDual:
    if a.order != b.order or a.space != b.space:
        raise DomainError("md_mul operands must share order and space")
    return a * b


def md_extract(a: MultiDual, subset) -> object:
    """Coefficient of the product of the (1-based) generators in ``subset``."""
    mask = 0
    for s in subset:
        if not 1 <= s <= a.order:
            raise DomainError(f"generator index {s} outside 1..{a.order}")
        bit = 1 << (s - 1)
        if mask & bit:
            raise DomainError(f"generator index {s} listed twice")
        mask |= bit
    return a.coeffs[mask]


def md_compose(prim: str, a: MultiDual, exponent=None) -> MultiDual:
    """Truncated Taylor composition of a smooth primitive through ``a``."""
    if prim not in SMOOTH_PRIMITIVES:
        raise EvaluationError(f"unknown smooth primitive {prim!r}")
    if prim == "pow" and exponent is None:
        raise EvaluationError("pow requires an exponent")
    return _compose(a, prim, exponent=exponent)


def smooth_apply(name: str, x, exponent=None):
    """Apply a smooth primitive to any supported scalar (real or MultiDual)."""
    if name == "pow":
        exponent = _normalize_exponent(exponent)
        if isinstance(exponent, int):
            return x**exponent
    if isinstance(x, MultiDual):
        return _compose(x, name, exponent=exponent)
    return _prim_derivative(name, 0, x, exponent)


# -- primitive derivative towers ---------------------------------------


def _normalize_exponent(c):
    if isinstance(c, float) and c.is_integer():
        return int(c)
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c)
    if isinstance(c, numbers.Integral):
        return int(c)
    return c


def _leading_real(x):
    while isinstance(x, MultiDual):
        x = x.coeffs[0]
    return x


def _prim_derivative(name: str, k: int, x, exponent=None):
    """k-th derivative of the named primitive, evaluated at ``x``."""
    if isinstance(x, MultiDual):
        return _compose(x, name, order_shift=k, exponent=exponent)
    exact = isinstance(x, Fraction)
    if exact and name in _TRANSCENDENTAL:
        raise EvaluationError(f"{name} is not available on exact rational scalars")
    if name == "exp":
        return math.exp(x)
    if name == "sin":
        return _sin_derivative(k, x)
    if name == "cos":
        return _sin_derivative(k + 1, x)
    if name == "log":
        if _as_float(x) <= 0.0:
            raise EvaluationError(f"log of non-positive value {x!r}")
        if k == 0:
            return math.log(x)
        return (-1) ** (k - 1) * math.factorial(k - 1) / x**k
    if name == "recip":
        if x == 0:
            raise EvaluationError("reciprocal of zero")
        return (-1) ** k * math.factorial(k) / x ** (k + 1)
    if name == "pow":
        return _pow_derivative(k, x, _normalize_exponent(exponent), exact)
    raise EvaluationError(f"unknown smooth primitive {name!r}")


def _sin_derivative(k: int, x):
    r = k % 4
    if r == 0:
        return math.sin(x)
    if r == 1:
        return math.cos(x)
    if r == 2:
        return -math.sin(x)
    return -math.cos(x)


def _pow_derivative(k: int, x, c, exact: bool):
    if exact and not isinstance(c, int):
        raise EvaluationError("non-integer powers need floating-point scalars")
    falling = 1
    for m in range(k):
        falling = falling * (c - m)
    if falling == 0:
        return 0
    shifted = c - k
    if x == 0 and shifted < 0:
        raise EvaluationError(f"power x**{c} singular at zero for derivative {k}")
    if not isinstance(c, int) and _as_float(x) < 0.0:
        raise EvaluationError("non-integer power of a negative value")
    return falling * x**shifted


def _as_float(x) -> float:
    return x.numerator / x.denominator if isinstance(x, Fraction) else float(x)


def _is_zero(c) -> bool:
    if isinstance(c, MultiDual):
        return all(_is_zero(v) for v in c.coeffs)
    return c == 0


def _compose(a: MultiDual, name: str, order_shift: int = 0, exponent=None) -> MultiDual:
    """phi(a0 + n) = sum_k phi^(k+order_shift)(a0) n^k / k!  (n nilpotent)."""
    base = a.coeffs[0]
    zero = base * 0
    nil = MultiDual(a.space, a.order, (zero,) + a.coeffs[1:])
    acc = lift(_prim_derivative(name, order_shift, base, exponent), a.order, a.space)
    power = None
    factorial = 1
    for k in range(1, a.order + 1):
        power = nil if power is None else power * nil
        if all(_is_zero(c) for c in power.coeffs):
            break
        factorial *= k
        deriv = _prim_derivative(name, order_shift + k, base, exponent)
        acc = acc + power * (deriv / factorial)
    return acc
