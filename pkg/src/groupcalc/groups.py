"""Matrix-group arithmetic, one-parameter subgroups, and homomorphisms.

Supported groups: the 3x3 Heisenberg group, translation groups R^n, GL(n),
SE(2), and finite products of these.  Group elements and Lie-algebra
directions store their entries as plain tuples so that evaluation stays
generic over the scalar ring (floats, exact rationals, or MultiDual jets).
"""

from __future__ import annotations

import math
import numbers
import random
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Optional

from .errors import DomainError, EvaluationError

KINDS = ("heisenberg3", "translation", "gl", "se2", "product")

_FLOAT_TOL = 1e-9


@dataclass(frozen=True)
class Box:
    """Entry-wise bounds on the free coordinates of a group element."""

    bounds: tuple[tuple[float, float], ...]

    def contains(self, coords) -> bool:
        return all(lo <= c <= hi for c, (lo, hi) in zip(coords, self.bounds))


@dataclass(frozen=True)
class GroupSpec:
    """Which group an element or direction belongs to, plus its domain."""

    kind: str
    n: int = 0
    factors: tuple["GroupSpec", ...] = ()
    domain: Optional[Box] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown group kind {self.kind!r}")
        if self.kind == "translation" and self.n < 1:
            raise DomainError("translation group needs dimension >= 1")
        if self.kind == "gl" and self.n < 1:
            raise DomainError("GL(n) needs n >= 1")
        if self.kind == "product" and len(self.factors) != 2:
            raise DomainError("product spec needs exactly two factors")
        if self.domain is not None and len(self.domain.bounds) != self.dim:
            raise DomainError(
                f"domain box has {len(self.domain.bounds)} ranges, "
                f"expected {self.dim}"
            )

    @property
    def dim(self) -> int:
        """Number of free coordinates (equals the Lie-algebra dimension)."""
        if self.kind == "heisenberg3":
            return 3
        if self.kind == "translation":
            return self.n
        if self.kind == "gl":
            return self.n * self.n
        if self.kind == "se2":
            return 3
        return sum(f.dim for f in self.factors)

    @property
    def matrix_size(self) -> int:
        if self.kind in ("heisenberg3", "se2"):
            return 3
        if self.kind == "gl":
            return self.n
        raise DomainError(f"{self.kind} elements are not single matrices")

    def same_group(self, other: "GroupSpec") -> bool:
        """Structural equality, ignoring domain restrictions."""
        if self.kind != other.kind or self.n != other.n:
            return False
        return all(a.same_group(b) for a, b in zip(self.factors, other.factors))

    def with_domain(self, box: Optional[Box]) -> "GroupSpec":
        return replace(self, domain=box)

    def describe(self) -> str:
        if self.kind == "heisenberg3":
            return "heisenberg3"
        if self.kind == "translation":
            return f"translation({self.n})"
        if self.kind == "gl":
            return f"gl({self.n})"
        if self.kind == "se2":
            return "se2"
        return f"product({self.factors[0].describe()}, {self.factors[1].describe()})"


HEISENBERG3 = GroupSpec("heisenberg3")
SE2 = GroupSpec("se2")


def translation(n: int) -> GroupSpec:
    return GroupSpec("translation", n=n)


def gl(n: int) -> GroupSpec:
    return GroupSpec("gl", n=n)


def product(a: GroupSpec, b: GroupSpec) -> GroupSpec:
    return GroupSpec("product", factors=(a, b))


def parse_group(text: str) -> GroupSpec:
    """Parse spellings like ``heisenberg3``, ``translation(2)``,
    ``gl(2)``, ``se2``, ``product(heisenberg3, translation(2))``."""
    s = text.strip()
    if s == "heisenberg3":
        return HEISENBERG3
    if s == "se2":
        return SE2
    for name in ("translation", "gl"):
        if s.startswith(name + "(") and s.endswith(")"):
            inner = s[len(name) + 1 : -1].strip()
            if not inner.isdigit():
                raise DomainError(f"bad group dimension in {text!r}")
            return GroupSpec(name, n=int(inner))
    if s.startswith("product(") and s.endswith(")"):
        inner = s[len("product(") : -1]
        depth = 0
        for i, ch in enumerate(inner):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == "," and depth == 0:
                return product(parse_group(inner[:i]), parse_group(inner[i + 1 :]))
        raise DomainError(f"product needs two factors: {text!r}")
    raise DomainError(f"unknown group {text!r}")


@dataclass(frozen=True)
class GroupElement:
    """A point of the group; ``data`` is a matrix (tuple of row tuples),
    a translation vector (tuple), or a pair of factor elements."""

    spec: GroupSpec
    data: tuple

    def __repr__(self):
        return f"GroupElement({self.spec.describe()}, {self.data!r})"


@dataclass(frozen=True)
class LieDirection:
    """A Lie-algebra element; generates the subgroup t -> exp(tX)."""

    spec: GroupSpec
    data: tuple

    def __repr__(self):
        return f"LieDirection({self.spec.describe()}, {self.data!r})"


# -- small generic matrix helpers ---------------------------------------


def mat_identity(n: int) -> tuple:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def mat_mul(a: tuple, b: tuple) -> tuple:
    n = len(a)
    m = len(b[0])
    k = len(b)
    return tuple(
        tuple(sum(a[i][t] * b[t][j] for t in range(k)) for j in range(m))
        for i in range(n)
    )


def mat_add(a: tuple, b: tuple) -> tuple:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_scale(a: tuple, s) -> tuple:
    return tuple(tuple(x * s for x in row) for row in a)


def mat_inf_norm(a: tuple) -> float:
    return max(sum(abs(float(x)) for x in row) for row in a)


def mat_det(a: tuple) -> float:
    """Determinant by Gaussian elimination (real entries only)."""
    n = len(a)
    rows = [list(map(float, row)) for row in a]
    det = 1.0
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(rows[r][col]))
        if abs(rows[pivot][col]) == 0.0:
            return 0.0
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = -det
        det *= rows[col][col]
        inv = 1.0 / rows[col][col]
        for r in range(col + 1, n):
            factor = rows[r][col] * inv
            for c in range(col, n):
                rows[r][c] -= factor * rows[col][c]
    return det


def _solve(a: tuple, b: tuple) -> tuple:
    """Solve A X = B for square float A via partial-pivot elimination."""
    n = len(a)
    aug = [list(map(float, ra)) + list(map(float, rb)) for ra, rb in zip(a, b)]
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(aug[r][col]))
        if abs(aug[pivot][col]) < 1e-300:
            raise EvaluationError("singular system in matrix exponential")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1.0 / aug[col][col]
        for r in range(n):
            if r == col:
                continue
            factor = aug[r][col] * inv
            for c in range(col, 2 * n):
                aug[r][c] -= factor * aug[col][c]
    return tuple(
        tuple(aug[i][n + j] / aug[i][i] for j in range(n)) for i in range(n)
    )


# [6/6] diagonal Pade approximant with scaling and squaring; the scaled
# norm bound 0.5 keeps the truncation error far below double roundoff.
_PADE6 = (
    1.0,
    1 / 2,
    5 / 44,
    1 / 66,
    1 / 792,
    1 / 15840,
    1 / 665280,
)


def expm(a: tuple) -> tuple:
    n = len(a)
    norm = mat_inf_norm(a)
    squarings = 0
    if norm > 0.5:
        squarings = max(0, math.ceil(math.log2(norm / 0.5)))
        a = mat_scale(a, 1.0 / (1 << squarings))
    power = mat_identity(n)
    num = mat_identity(n)
    den = mat_identity(n)
    sign = 1.0
    for coeff in _PADE6[1:]:
        power = mat_mul(power, a)
        sign = -sign
        num = mat_add(num, mat_scale(power, coeff))
        den = mat_add(den, mat_scale(power, sign * coeff))
    out = _solve(den, num)
    for _ in range(squarings):
        out = mat_mul(out, out)
    return out


# -- element construction and validation --------------------------------


def identity(spec: GroupSpec) -> GroupElement:
    if spec.kind == "translation":
        return GroupElement(spec, (0,) * spec.n)
    if spec.kind == "product":
        return GroupElement(
            spec, (identity(spec.factors[0]), identity(spec.factors[1]))
        )
    return GroupElement(spec, mat_identity(spec.matrix_size))


def _is_real(x) -> bool:
    return isinstance(x, numbers.Real)


def _entries(elem_or_dir) -> list:
    data = elem_or_dir.data
    if elem_or_dir.spec.kind == "translation":
        return list(data)
    if elem_or_dir.spec.kind == "product":
        return _entries(data[0]) + _entries(data[1])
    return [x for row in data for x in row]


def has_real_entries(elem_or_dir) -> bool:
    return all(_is_real(x) for x in _entries(elem_or_dir))


def _close(x, y) -> bool:
    if isinstance(x, float) or isinstance(y, float):
        return abs(x - y) <= _FLOAT_TOL
    return x == y


def check_element(elem: GroupElement) -> None:
    """Validate structural invariants; only meaningful for real entries."""
    spec = elem.spec
    if spec.kind == "translation":
        if len(elem.data) != spec.n:
            raise DomainError(f"expected {spec.n} coordinates")
        return
    if spec.kind == "product":
        a, b = elem.data
        if not (
            a.spec.same_group(spec.factors[0]) and b.spec.same_group(spec.factors[1])
        ):
            raise DomainError("product element factors do not match the spec")
        check_element(a)
        check_element(b)
        return
    n = spec.matrix_size
    if len(elem.data) != n or any(len(row) != n for row in elem.data):
        raise DomainError(f"expected a {n}x{n} matrix")
    if not has_real_entries(elem):
        return
    if spec.kind == "heisenberg3":
        for i in range(3):
            if not _close(elem.data[i][i], 1):
                raise DomainError("Heisenberg element must have unit diagonal")
            for j in range(i):
                if not _close(elem.data[i][j], 0):
                    raise DomainError("Heisenberg element must be upper triangular")
        return
    if spec.kind == "gl":
        if abs(mat_det(elem.data)) < 1e-12:
            raise DomainError("GL element must be invertible")
        return
    if spec.kind == "se2":
        r = [[float(elem.data[i][j]) for j in range(2)] for i in range(2)]
        gram = [
            [sum(r[k][i] * r[k][j] for k in range(2)) for j in range(2)]
            for i in range(2)
        ]
        ok = (
            abs(gram[0][0] - 1) <= _FLOAT_TOL
            and abs(gram[1][1] - 1) <= _FLOAT_TOL
            and abs(gram[0][1]) <= _FLOAT_TOL
            and r[0][0] * r[1][1] - r[0][1] * r[1][0] > 0
        )
        bottom = elem.data[2]
        if not ok or not (
            _close(bottom[0], 0) and _close(bottom[1], 0) and _close(bottom[2], 1)
        ):
            raise DomainError("not a valid SE(2) matrix")
        return
    raise DomainError(f"unsupported kind {spec.kind!r}")


def check_direction(x: LieDirection) -> None:
    spec = x.spec
    if spec.kind == "translation":
        if len(x.data) != spec.n:
            raise DomainError(f"expected {spec.n} velocity components")
        return
    if spec.kind == "product":
        a, b = x.data
        check_direction(a)
        check_direction(b)
        return
    n = spec.matrix_size
    if len(x.data) != n or any(len(row) != n for row in x.data):
        raise DomainError(f"expected a {n}x{n} Lie-algebra matrix")
    if not all(_is_real(v) for v in _entries(x)):
        return
    if spec.kind == "heisenberg3":
        for i in range(3):
            for j in range(i + 1):
                if not _close(x.data[i][j], 0):
                    raise DomainError("Heisenberg direction must be strictly upper")
        return
    if spec.kind == "se2":
        d = x.data
        ok = (
            _close(d[0][0], 0)
            and _close(d[1][1], 0)
            and _close(d[0][1], -d[1][0])
            and all(_close(v, 0) for v in d[2])
        )
        if not ok:
            raise DomainError("not a valid se(2) matrix")


def element_coords(elem: GroupElement) -> tuple:
    """Free coordinates of an element in the canonical chart of its kind."""
    spec = elem.spec
    if spec.kind == "translation":
        return tuple(elem.data)
    if spec.kind == "heisenberg3":
        return (elem.data[0][1], elem.data[0][2], elem.data[1][2])
    if spec.kind == "gl":
        return tuple(x for row in elem.data for x in row)
    if spec.kind == "se2":
        theta = math.atan2(float(elem.data[1][0]), float(elem.data[0][0]))
        return (theta, elem.data[0][2], elem.data[1][2])
    return element_coords(elem.data[0]) + element_coords(elem.data[1])


def element_from_coords(spec: GroupSpec, coords) -> GroupElement:
    coords = tuple(coords)
    if len(coords) != spec.dim:
        raise DomainError(f"expected {spec.dim} coordinates, got {len(coords)}")
    if spec.kind == "translation":
        return GroupElement(spec, coords)
    if spec.kind == "heisenberg3":
        x1, x2, x3 = coords
        one = x1 * 0 + 1
        zero = x1 * 0
        data = ((one, x1, x2), (zero, one, x3), (zero, zero, one))
        return GroupElement(spec, data)
    if spec.kind == "gl":
        n = spec.n
        data = tuple(tuple(coords[i * n + j] for j in range(n)) for i in range(n))
        elem = GroupElement(spec, data)
        check_element(elem)
        return elem
    if spec.kind == "se2":
        theta, tx, ty = coords
        c, s = math.cos(theta), math.sin(theta)
        return GroupElement(spec, ((c, -s, tx), (s, c, ty), (0, 0, 1)))
    da = spec.factors[0].dim
    return GroupElement(
        spec,
        (
            element_from_coords(spec.factors[0], coords[:da]),
            element_from_coords(spec.factors[1], coords[da:]),
        ),
    )


def direction_from_coords(spec: GroupSpec, coords) -> LieDirection:
    coords = tuple(coords)
    if len(coords) != spec.dim:
        raise DomainError(f"expected {spec.dim} components, got {len(coords)}")
    if spec.kind == "translation":
        return LieDirection(spec, coords)
    if spec.kind == "heisenberg3":
        a, b, c = coords
        z = a * 0
        return LieDirection(spec, ((z, a, b), (z, z, c), (z, z, z)))
    if spec.kind == "gl":
        n = spec.n
        return LieDirection(
            spec, tuple(tuple(coords[i * n + j] for j in range(n)) for i in range(n))
        )
    if spec.kind == "se2":
        w, vx, vy = coords
        z = w * 0
        return LieDirection(spec, ((z, -w, vx), (w, z, vy), (z, z, z)))
    da = spec.factors[0].dim
    return LieDirection(
        spec,
        (
            direction_from_coords(spec.factors[0], coords[:da]),
            direction_from_coords(spec.factors[1], coords[da:]),
        ),
    )


def direction_coords(x: LieDirection) -> tuple:
    spec = x.spec
    if spec.kind == "translation":
        return tuple(x.data)
    if spec.kind == "heisenberg3":
        return (x.data[0][1], x.data[0][2], x.data[1][2])
    if spec.kind == "gl":
        return tuple(v for row in x.data for v in row)
    if spec.kind == "se2":
        return (x.data[1][0], x.data[0][2], x.data[1][2])
    return direction_coords(x.data[0]) + direction_coords(x.data[1])


def contains(spec: GroupSpec, elem: GroupElement) -> bool:
    """Domain membership: structural invariants plus the optional box.

    Elements with non-real (jet) entries are accepted; membership is only
    decidable at concrete points.
    """
    if not elem.spec.same_group(spec):
        return False
    if not has_real_entries(elem):
        return True
    try:
        check_element(elem)
    except DomainError:
        return False
    if spec.domain is not None:
        return spec.domain.contains(element_coords(elem))
    if spec.kind == "product":
        return contains(spec.factors[0], elem.data[0]) and contains(
            spec.factors[1], elem.data[1]
        )
    return True


# -- group operations ----------------------------------------------------


def multiply(a: GroupElement, b: GroupElement) -> GroupElement:
    if not a.spec.same_group(b.spec):
        raise DomainError(
            f"cannot multiply {a.spec.describe()} by {b.spec.describe()}"
        )
    kind = a.spec.kind
    if kind == "translation":
        return GroupElement(a.spec, tuple(x + y for x, y in zip(a.data, b.data)))
    if kind == "product":
        return GroupElement(
            a.spec,
            (multiply(a.data[0], b.data[0]), multiply(a.data[1], b.data[1])),
        )
    return GroupElement(a.spec, mat_mul(a.data, b.data))


def constant_direction(spec: GroupSpec) -> LieDirection:
    """The zero Lie-algebra element; its flow is constantly the identity."""
    if spec.kind == "translation":
        return LieDirection(spec, (0,) * spec.n)
    if spec.kind == "product":
        return LieDirection(
            spec,
            (constant_direction(spec.factors[0]), constant_direction(spec.factors[1])),
        )
    n = spec.matrix_size
    return LieDirection(spec, tuple((0,) * n for _ in range(n)))


def is_zero_direction(x: LieDirection) -> bool:
    return all(v == 0 for v in _entries(x))


def product_direction(a: LieDirection, b: LieDirection) -> LieDirection:
    return LieDirection(product(a.spec, b.spec), (a, b))


def one_param_eval(x: LieDirection, t) -> GroupElement:
    """Evaluate the one-parameter subgroup exp(tX) at parameter ``t``.

    Terminating (exact) series for nilpotent kinds; Pade scaling-and-squaring
    for GL(n) and SE(2), which therefore require a floating-point ``t``.
    """
    spec = x.spec
    if spec.kind == "translation":
        return GroupElement(spec, tuple(t * v for v in x.data))
    if spec.kind == "heisenberg3":
        a, b, c = x.data[0][1], x.data[0][2], x.data[1][2]
        one = t * 0 + 1
        zero = t * 0
        half_sq = t * t * a * c * Fraction(1, 2)
        data = (
            (one, t * a, t * b + half_sq),
            (zero, one, t * c),
            (zero, zero, one),
        )
        return GroupElement(spec, data)
    if spec.kind == "product":
        return GroupElement(
            spec, (one_param_eval(x.data[0], t), one_param_eval(x.data[1], t))
        )
    if isinstance(t, Fraction):
        raise EvaluationError(
            f"{spec.kind} flows are not exactly representable; use float parameters"
        )
    return GroupElement(spec, expm(mat_scale(x.data, float(t))))


@dataclass(frozen=True)
class GroupHom:
    """A continuous group homomorphism with its induced Lie-algebra map.

    ``apply`` must be generic over the scalar ring of the element entries so
    that derivatives can be transported through the composite.
    """

    source: GroupSpec
    target: GroupSpec
    apply: Callable[[GroupElement], GroupElement]
    algebra_map: Callable[[LieDirection], LieDirection]
    name: str = "hom"

    def __call__(self, elem: GroupElement) -> GroupElement:
        if not elem.spec.same_group(self.source):
            raise DomainError(f"{self.name}: element is not in the source group")
        return self.apply(elem)


def hom_push(phi: GroupHom, gamma: LieDirection) -> LieDirection:
    """The induced direction: the flow of the result is phi(flow of gamma)."""
    if not gamma.spec.same_group(phi.source):
        raise DomainError(f"{phi.name}: direction is not in the source algebra")
    pushed = phi.algebra_map(gamma)
    if not pushed.spec.same_group(phi.target):
        raise DomainError(f"{phi.name}: algebra map landed outside the target")
    return pushed


def identity_hom(spec: GroupSpec) -> GroupHom:
    return GroupHom(spec, spec, lambda e: e, lambda d: d, name="id")


def projection_hom(spec: GroupSpec, index: int) -> GroupHom:
    if spec.kind != "product" or index not in (0, 1):
        raise DomainError("projection needs a product spec and index 0 or 1")
    return GroupHom(
        spec,
        spec.factors[index],
        lambda e: e.data[index],
        lambda d: d.data[index],
        name=f"pr{index + 1}",
    )


def linear_hom(source: GroupSpec, target: GroupSpec, matrix: tuple) -> GroupHom:
    """A linear map between translation groups (every such map is a hom)."""
    if source.kind != "translation" or target.kind != "translation":
        raise DomainError("linear_hom connects translation groups")

    def apply_vec(data):
        return tuple(
            sum(matrix[i][j] * data[j] for j in range(source.n))
            for i in range(target.n)
        )

    return GroupHom(
        source,
        target,
        lambda e: GroupElement(target, apply_vec(e.data)),
        lambda d: LieDirection(target, apply_vec(d.data)),
        name="linear",
    )


def line_embedding_hom(target: GroupSpec, direction: LieDirection) -> GroupHom:
    """The homomorphism R -> G along a fixed one-parameter subgroup.

    Only available where the flow is polynomial in t (nilpotent kinds and
    unipotent GL directions), so the map stays generic over jet scalars.
    """
    source = translation(1)
    if not direction.spec.same_group(target):
        raise DomainError("embedding direction must generate the target group")

    if target.kind in ("heisenberg3", "translation"):

        def flow(s):
            return one_param_eval(direction, s)

    elif target.kind == "gl":
        rows = direction.data
        n = target.n
        sq = mat_mul(rows, rows)
        if any(v != 0 for row in mat_mul(sq, rows) for v in row):
            raise DomainError("GL embedding needs a nilpotent direction (X^3 = 0)")

        def flow(s):
            first = mat_scale(rows, s)
            second = mat_scale(sq, s * s * Fraction(1, 2))
            mat = mat_add(mat_add(mat_identity(n), first), second)
            return GroupElement(target, mat)

    else:
        raise DomainError(f"no polynomial embedding into {target.kind}")

    def apply(e):
        return flow(e.data[0])

    return GroupHom(
        source,
        target,
        apply,
        lambda d: LieDirection(
            target, _scale_direction_data(direction, d.data[0]).data
        ),
        name="line-embedding",
    )


def _scale_direction_data(x: LieDirection, s) -> LieDirection:
    if x.spec.kind == "translation":
        return LieDirection(x.spec, tuple(s * v for v in x.data))
    if x.spec.kind == "product":
        return LieDirection(
            x.spec,
            (_scale_direction_data(x.data[0], s), _scale_direction_data(x.data[1], s)),
        )
    return LieDirection(x.spec, mat_scale(x.data, s))


def heisenberg_abelianization() -> GroupHom:
    """Heisenberg -> R^2, dropping the central coordinate."""
    target = translation(2)

    def apply(e):
        return GroupElement(target, (e.data[0][1], e.data[1][2]))

    def algebra(d):
        return LieDirection(target, (d.data[0][1], d.data[1][2]))

    return GroupHom(HEISENBERG3, target, apply, algebra, name="abelianization")


# -- sampling ------------------------------------------------------------


def _sample_scalar(rng: random.Random, lo: float, hi: float, exact: bool):
    if exact:
        den = rng.choice((1, 2, 3, 4))
        num = rng.randint(math.ceil(lo * den), math.floor(hi * den))
        return Fraction(num, den)
    return rng.uniform(lo, hi)


def _box_or_default(spec: GroupSpec, default: tuple[float, float]):
    if spec.domain is not None:
        return spec.domain.bounds
    return tuple(default for _ in range(spec.dim))


def sample_element(
    spec: GroupSpec, rng: random.Random, exact: bool = False, margin: float = 0.1
) -> GroupElement:
    """Draw an element with coordinates inside the (shrunk) domain box."""
    if spec.kind == "product":
        return GroupElement(
            spec,
            (
                sample_element(spec.factors[0], rng, exact, margin),
                sample_element(spec.factors[1], rng, exact, margin),
            ),
        )
    if spec.kind == "gl":
        if exact:
            raise EvaluationError("exact sampling is unavailable on GL(n)")
        bounds = spec.domain.bounds if spec.domain is not None else None
        for _ in range(100):
            if bounds is None:
                coords = [
                    (1.0 if i % (spec.n + 1) == 0 else 0.0) + rng.uniform(-0.3, 0.3)
                    for i in range(spec.dim)
                ]
            else:
                coords = [
                    rng.uniform(lo + margin * (hi - lo), hi - margin * (hi - lo))
                    for lo, hi in bounds
                ]
            elem = GroupElement(
                spec,
                tuple(
                    tuple(coords[i * spec.n + j] for j in range(spec.n))
                    for i in range(spec.n)
                ),
            )
            if abs(mat_det(elem.data)) > 0.05:
                return elem
        raise EvaluationError("failed to sample an invertible matrix")
    if spec.kind == "se2":
        if exact:
            raise EvaluationError("exact sampling is unavailable on SE(2)")
        theta = rng.uniform(-math.pi, math.pi)
        tx, ty = rng.uniform(-1, 1), rng.uniform(-1, 1)
        return element_from_coords(spec, (theta, tx, ty))
    bounds = _box_or_default(spec, (-1.0, 1.0))
    coords = [
        _sample_scalar(rng, lo + margin * (hi - lo), hi - margin * (hi - lo), exact)
        for lo, hi in bounds
    ]
    return element_from_coords(spec, coords)


def sample_direction(
    spec: GroupSpec, rng: random.Random, exact: bool = False
) -> LieDirection:
    if spec.kind == "product":
        return LieDirection(
            spec,
            (
                sample_direction(spec.factors[0], rng, exact),
                sample_direction(spec.factors[1], rng, exact),
            ),
        )
    scale = 0.5 if spec.kind in ("gl", "se2") else 1.0
    coords = [_sample_scalar(rng, -scale, scale, exact) for _ in range(spec.dim)]
    return direction_from_coords(spec, coords)
