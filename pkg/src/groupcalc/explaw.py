"""Currying and uncurrying with derivative transport.

``curry`` turns a two-argument function into a family of one-argument
functions; function-space values are represented extensionally, as slices
closed over the inner function and the fixed argument.  Derivatives of the
curried map are again function-valued and are realized pointwise, so the
usual one-argument operators apply to them directly — that is what the
exchange identity check exercises.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .calculus import iterated, partial_ij
from .errors import DomainError
from .functions import FixedSlice
from .groups import GroupElement, LieDirection


@dataclass(frozen=True)
class CurriedFunction:
    """The family x -> f(x, .) of one-argument functions."""

    inner: object  # two-argument function-like

    def at(self, x: GroupElement) -> FixedSlice:
        """The member function f(x, .): one argument, the second slot."""
        return FixedSlice(self.inner, 0, x)

    def __call__(self, x: GroupElement) -> FixedSlice:
        return self.at(x)


def curry(fn) -> CurriedFunction:
    if len(fn.arg_specs) != 2:
        raise DomainError("currying needs a two-argument function")
    return CurriedFunction(fn)


def uncurry(g: CurriedFunction):
    """Recover the two-argument function with g(x)(y) = uncurry(g)(x, y)."""
    return g.inner


@dataclass(frozen=True)
class CurriedDerivative:
    """The function-space-valued derivative of a curried map, realized
    pointwise: evaluating at y yields the first-slot mixed partial."""

    inner: object
    x: GroupElement
    g_dirs: tuple

    @property
    def arg_specs(self) -> tuple:
        return (self.inner.arg_specs[1],)

    @property
    def target_dim(self) -> int:
        return self.inner.target_dim

    def values_at(self, args: tuple) -> tuple:
        if len(args) != 1:
            raise DomainError("a curried derivative takes one argument")
        return partial_ij(self.inner, self.x, args[0], self.g_dirs, ())


def curried_derivative(
    g: CurriedFunction, x: GroupElement, g_dirs: Sequence[LieDirection]
) -> CurriedDerivative:
    """The i-fold derivative of the curried family at x, as a function of y."""
    return CurriedDerivative(g.inner, x, tuple(g_dirs))


def verify_exchange(
    fn,
    x: GroupElement,
    y: GroupElement,
    g_dirs: Sequence[LieDirection],
    h_dirs: Sequence[LieDirection],
) -> tuple[tuple, tuple]:
    """Both routes to the mixed derivative: differentiate the curried family
    in x, then its value in y (left), against the direct mixed partial
    (right).  The two must agree."""
    g = fn if isinstance(fn, CurriedFunction) else curry(fn)
    slice_derivative = curried_derivative(g, x, g_dirs)
    left = iterated(slice_derivative, y, tuple(h_dirs))
    right = partial_ij(g.inner, x, y, tuple(g_dirs), tuple(h_dirs))
    return left, right
