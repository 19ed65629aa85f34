"""Smooth expression trees over group-element entries.

A :class:`GroupFunction` maps one or two group arguments to a real vector.
Components are expression trees over the matrix entries (or translation
coordinates) of the arguments, so evaluation is generic: feed elements whose
entries are floats, exact rationals, or MultiDual jets and the same tree
produces values, exact arithmetic, or derivatives.

Anything with an ``arg_specs`` tuple and a ``values_at(args)`` method is
accepted wherever a "function-like" is expected; this module provides the
tree-backed implementation plus the slice helper used for currying.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import DomainError, EvaluationError
from .groups import GroupElement, GroupSpec
from .multidual import smooth_apply

PRIM_NAMES = ("exp", "log", "sin", "cos", "recip")


@dataclass(frozen=True)
class Const:
    value: Union[int, float, Fraction]


@dataclass(frozen=True)
class Entry:
    arg: int
    row: int
    col: int


@dataclass(frozen=True)
class Coord:
    arg: int
    k: int


@dataclass(frozen=True)
class Add:
    a: "Expr"
    b: "Expr"


@dataclass(frozen=True)
class Sub:
    a: "Expr"
    b: "Expr"


@dataclass(frozen=True)
class Mul:
    a: "Expr"
    b: "Expr"


@dataclass(frozen=True)
class Div:
    a: "Expr"
    b: "Expr"


@dataclass(frozen=True)
class Neg:
    a: "Expr"


@dataclass(frozen=True)
class Prim:
    name: str
    a: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: Union[int, float, Fraction]


Expr = Union[Const, Entry, Coord, Add, Sub, Mul, Div, Neg, Prim, Pow]


def eval_expr(expr: Expr, args: tuple):
    """Evaluate a tree at the given group elements (any scalar ring)."""
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Entry):
        return args[expr.arg].data[expr.row][expr.col]
    if isinstance(expr, Coord):
        return args[expr.arg].data[expr.k]
    if isinstance(expr, Add):
        return eval_expr(expr.a, args) + eval_expr(expr.b, args)
    if isinstance(expr, Sub):
        return eval_expr(expr.a, args) - eval_expr(expr.b, args)
    if isinstance(expr, Mul):
        return eval_expr(expr.a, args) * eval_expr(expr.b, args)
    if isinstance(expr, Div):
        denom = eval_expr(expr.b, args)
        if denom == 0:
            raise EvaluationError("division by zero")
        return eval_expr(expr.a, args) / denom
    if isinstance(expr, Neg):
        return -eval_expr(expr.a, args)
    if isinstance(expr, Prim):
        return smooth_apply(expr.name, eval_expr(expr.a, args))
    if isinstance(expr, Pow):
        return smooth_apply("pow", eval_expr(expr.base, args), expr.exponent)
    raise EvaluationError(f"unknown expression node {expr!r}")


def _walk(expr: Expr):
    yield expr
    for attr in ("a", "b", "base"):
        child = getattr(expr, attr, None)
        if child is not None and not isinstance(child, (int, float, Fraction)):
            yield from _walk(child)


def validate_expr(expr: Expr, arg_specs: tuple[GroupSpec, ...]) -> None:
    for node in _walk(expr):
        if isinstance(node, Entry):
            if not 0 <= node.arg < len(arg_specs):
                raise DomainError(f"argument index {node.arg} out of range")
            spec = arg_specs[node.arg]
            size = spec.matrix_size  # raises for translation/product kinds
            if not (0 <= node.row < size and 0 <= node.col < size):
                raise DomainError(f"entry ({node.row},{node.col}) outside {size}x{size}")
        elif isinstance(node, Coord):
            if not 0 <= node.arg < len(arg_specs):
                raise DomainError(f"argument index {node.arg} out of range")
            spec = arg_specs[node.arg]
            if spec.kind != "translation":
                raise DomainError("coord() addresses translation-group arguments")
            if not 0 <= node.k < spec.n:
                raise DomainError(f"coordinate {node.k} outside 0..{spec.n - 1}")
        elif isinstance(node, Prim):
            if node.name not in PRIM_NAMES:
                raise DomainError(f"unknown primitive {node.name!r}")


def is_polynomial(expr: Expr) -> bool:
    """No transcendental primitives, divisions, or fractional powers."""
    for node in _walk(expr):
        if isinstance(node, (Prim, Div)):
            return False
        if isinstance(node, Pow):
            e = node.exponent
            if not (isinstance(e, int) and e >= 0):
                return False
    return True


def has_exact_constants(expr: Expr) -> bool:
    return all(
        isinstance(node.value, (int, Fraction))
        for node in _walk(expr)
        if isinstance(node, Const)
    )


def substitute(expr: Expr, leaf_map) -> Expr:
    """Rebuild a tree, replacing Entry/Coord leaves via ``leaf_map(node)``."""
    if isinstance(expr, (Entry, Coord)):
        return leaf_map(expr)
    if isinstance(expr, Const):
        return expr
    if isinstance(expr, (Add, Sub, Mul, Div)):
        return type(expr)(substitute(expr.a, leaf_map), substitute(expr.b, leaf_map))
    if isinstance(expr, Neg):
        return Neg(substitute(expr.a, leaf_map))
    if isinstance(expr, Prim):
        return Prim(expr.name, substitute(expr.a, leaf_map))
    if isinstance(expr, Pow):
        return Pow(substitute(expr.base, leaf_map), expr.exponent)
    raise DomainError(f"unknown expression node {expr!r}")


@dataclass(frozen=True)
class GroupFunction:
    """A smooth map from one or two group arguments to R^m."""

    arg_specs: tuple[GroupSpec, ...]
    components: tuple[Expr, ...]

    def __post_init__(self):
        if len(self.arg_specs) not in (1, 2):
            raise DomainError("functions take one or two group arguments")
        if not self.components:
            raise DomainError("a function needs at least one component")
        for comp in self.components:
            validate_expr(comp, self.arg_specs)

    @property
    def arity(self) -> int:
        return len(self.arg_specs)

    @property
    def target_dim(self) -> int:
        return len(self.components)

    def values_at(self, args: tuple) -> tuple:
        if len(args) != self.arity:
            raise DomainError(f"expected {self.arity} arguments, got {len(args)}")
        for arg, spec in zip(args, self.arg_specs):
            if not arg.spec.same_group(spec):
                raise DomainError(
                    f"argument group {arg.spec.describe()} does not match "
                    f"{spec.describe()}"
                )
        return tuple(eval_expr(comp, args) for comp in self.components)

    def __call__(self, *args: GroupElement) -> tuple:
        return self.values_at(args)


def flip(f: GroupFunction) -> GroupFunction:
    """Swap the two arguments: flip(f)(y, x) = f(x, y)."""
    if f.arity != 2:
        raise DomainError("flip needs a two-argument function")

    def swap(node):
        if isinstance(node, Entry):
            return Entry(1 - node.arg, node.row, node.col)
        return Coord(1 - node.arg, node.k)

    return GroupFunction(
        (f.arg_specs[1], f.arg_specs[0]),
        tuple(substitute(c, swap) for c in f.components),
    )


@dataclass(frozen=True)
class FixedSlice:
    """A two-argument function-like with one argument pinned."""

    fn: object
    slot: int
    value: GroupElement

    @property
    def arg_specs(self) -> tuple:
        specs = self.fn.arg_specs
        return tuple(s for i, s in enumerate(specs) if i != self.slot)

    @property
    def target_dim(self) -> int:
        return self.fn.target_dim

    def values_at(self, args: tuple) -> tuple:
        if len(args) != 1:
            raise DomainError("a slice takes exactly one argument")
        full = list(args)
        full.insert(self.slot, self.value)
        return self.fn.values_at(tuple(full))


# -- prefix-notation serialization ---------------------------------------

_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def _parse_atom(token: str):
    if re.fullmatch(r"[+-]?\d+", token):
        return int(token)
    m = re.fullmatch(r"([+-]?\d+)/(\d+)", token)
    if m:
        return Fraction(int(m.group(1)), int(m.group(2)))
    try:
        return float(token)
    except ValueError:
        return None


class _Parser:
    def __init__(self, text: str):
        self.tokens = _TOKEN.findall(text)
        self.pos = 0

    def error(self, message: str) -> DomainError:
        return DomainError(f"expression parse error at token {self.pos}: {message}")

    def next(self) -> str:
        if self.pos >= len(self.tokens):
            raise self.error("unexpected end of input")
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def parse_number(self):
        tok = self.next()
        value = _parse_atom(tok)
        if value is None:
            raise self.error(f"expected a number, got {tok!r}")
        return value

    def parse_int(self) -> int:
        value = self.parse_number()
        if not isinstance(value, int):
            raise self.error(f"expected an integer, got {value!r}")
        return value

    def parse(self) -> Expr:
        tok = self.next()
        if tok != "(":
            value = _parse_atom(tok)
            if value is None:
                raise self.error(f"unknown atom {tok!r}")
            return Const(value)
        head = self.next()
        if head == "entry":
            node = Entry(self.parse_int(), self.parse_int(), self.parse_int())
        elif head == "coord":
            node = Coord(self.parse_int(), self.parse_int())
        elif head in ("add", "sub", "mul", "div"):
            cls = {"add": Add, "sub": Sub, "mul": Mul, "div": Div}[head]
            node = cls(self.parse(), self.parse())
        elif head == "neg":
            node = Neg(self.parse())
        elif head in PRIM_NAMES:
            node = Prim(head, self.parse())
        elif head == "pow":
            node = Pow(self.parse(), self.parse_number())
        elif head == "const":
            node = Const(self.parse_number())
        else:
            raise self.error(f"unknown operator {head!r}")
        closer = self.next()
        if closer != ")":
            raise self.error(f"expected ')', got {closer!r}")
        return node


def parse_expr(text: str) -> Expr:
    parser = _Parser(text)
    node = parser.parse()
    if parser.pos != len(parser.tokens):
        raise parser.error("trailing input after expression")
    return node


def _format_number(value) -> str:
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return repr(value)


def format_expr(expr: Expr) -> str:
    if isinstance(expr, Const):
        return _format_number(expr.value)
    if isinstance(expr, Entry):
        return f"(entry {expr.arg} {expr.row} {expr.col})"
    if isinstance(expr, Coord):
        return f"(coord {expr.arg} {expr.k})"
    if isinstance(expr, Add):
        return f"(add {format_expr(expr.a)} {format_expr(expr.b)})"
    if isinstance(expr, Sub):
        return f"(sub {format_expr(expr.a)} {format_expr(expr.b)})"
    if isinstance(expr, Mul):
        return f"(mul {format_expr(expr.a)} {format_expr(expr.b)})"
    if isinstance(expr, Div):
        return f"(div {format_expr(expr.a)} {format_expr(expr.b)})"
    if isinstance(expr, Neg):
        return f"(neg {format_expr(expr.a)})"
    if isinstance(expr, Prim):
        return f"({expr.name} {format_expr(expr.a)})"
    if isinstance(expr, Pow):
        return f"(pow {format_expr(expr.base)} {_format_number(expr.exponent)})"
    raise DomainError(f"unknown expression node {expr!r}")
