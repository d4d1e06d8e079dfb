"""Bullet products, Gram and Heron square volumes, and the squared volume form.

All quantities are computed on a :class:`SimplexInstance`: a quotient ring
together with the vertices ``x0..xk`` as vectors of ring elements.  Results
are returned in normal form, so two values agree iff they compare equal.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Sequence

from .errors import StructuralError, UsageError
from .metric import ExtensionPerturbation, MetricSpec, eval_G, eval_g, eval_g_extended
from .quotient import EXTENDED, MUTUAL, QuotientRing
from .ring import Poly, PolyMatrix

Point = tuple[Poly, ...]


@dataclass(frozen=True)
class SimplexInstance:
    """Vertices of a simplex, living on ``ring``.

    The generic instance has ``x0 = 0`` and ``x_i`` equal to the i-th block of
    variables.  Reordered or specialised instances keep the same ring.
    """

    ring: QuotientRing
    points: tuple[Point, ...]

    def __post_init__(self) -> None:
        pts = tuple(tuple(p) for p in self.points)
        object.__setattr__(self, "points", pts)
        spec = self.ring.spec
        if len(pts) != spec.k + 1:
            raise StructuralError(f"expected {spec.k + 1} vertices, got {len(pts)}")
        for p in pts:
            if len(p) != spec.n:
                raise StructuralError(f"vertex has {len(p)} coordinates, expected {spec.n}")
            for c in p:
                if c.table != self.ring.table or c.cap != self.ring.cap:
                    raise StructuralError("vertex coordinates must live on the ring")

    @classmethod
    def generic(cls, ring: QuotientRing) -> SimplexInstance:
        return cls(ring, tuple(ring.vertex(i) for i in range(ring.spec.k + 1)))

    @property
    def n(self) -> int:
        return self.ring.spec.n

    @property
    def k(self) -> int:
        return self.ring.spec.k

    @property
    def kind(self) -> str:
        return self.ring.spec.kind

    def reordered(self, order: Sequence[int]) -> SimplexInstance:
        """Vertices listed as ``[x_order[0], x_order[1], ...]``."""
        if sorted(order) != list(range(self.k + 1)):
            raise StructuralError(f"{order} is not a permutation of 0..{self.k}")
        return SimplexInstance(self.ring, tuple(self.points[i] for i in order))

    def specialized(self, i: int, j: int) -> SimplexInstance:
        """Set ``x_j := x_i`` by substituting block j's variables (j >= 1)."""
        if not (0 <= i <= self.k and 1 <= j <= self.k) or i == j:
            raise StructuralError(f"cannot specialise x{j} := x{i}")
        table = self.ring.table
        images = {}
        for v in range(table.nvars):
            images[v] = Poly.variable(table, v, self.ring.cap)
        source = self.ring.vertex(i)
        for a in range(self.n):
            images[table.index(j - 1, a)] = source[a]
        pts = tuple(
            tuple(c.substitute(images) for c in p) for p in self.points
        )
        return SimplexInstance(self.ring, pts)


def _diff(x: Point, y: Point) -> Point:
    return tuple(a - b for a, b in zip(x, y))


def bullet(
    s: SimplexInstance,
    m: MetricSpec,
    i: int,
    j: int,
    extension: ExtensionPerturbation | None = None,
) -> Poly:
    """``(x_i - x0) . (x_j - x0) = 1/2 (-gbar(x_i, x_j) + g(x_i, x0) + g(x_j, x0))``.

    On an extended simplex ``x_i`` and ``x_j`` are unrelated, so ``i != j``
    needs an explicit extension (``ExtensionPerturbation.zero`` selects the
    plain coordinate formula).
    """
    if m.n != s.n:
        raise StructuralError(f"metric dimension {m.n} != simplex dimension {s.n}")
    if not (1 <= i <= s.k and 1 <= j <= s.k):
        raise StructuralError(f"bullet indices must lie in 1..{s.k}")
    if s.kind == EXTENDED and i != j and extension is None:
        raise UsageError("extended simplex: bullet of distinct vertices needs an extension of g")
    x0, xi, xj = s.points[0], s.points[i], s.points[j]
    if extension is None:
        gbar = eval_g(m, xi, xj)
    else:
        gbar = eval_g_extended(m, extension, xi, xj)
    value = (-gbar + eval_g(m, xi, x0) + eval_g(m, xj, x0)) / 2
    return s.ring.normal_form(value)


def gram_matrix(
    s: SimplexInstance, m: MetricSpec, extension: ExtensionPerturbation | None = None
) -> PolyMatrix:
    """k x k matrix of bullet products; entry (j, i) mirrors (i, j) for i < j."""
    if extension is None and s.kind == EXTENDED:
        extension = ExtensionPerturbation.zero(s.n)
    k = s.k
    rows = [[None] * k for _ in range(k)]
    for a in range(k):
        for b in range(a, k):
            rows[a][b] = rows[b][a] = bullet(s, m, a + 1, b + 1, extension)
    return PolyMatrix.from_rows(rows)


def det_ring(mat: PolyMatrix) -> Poly:
    """Leibniz expansion of the determinant (intended for sizes up to 4)."""
    if mat.rows != mat.cols:
        raise StructuralError(f"determinant of a non-square {mat.rows}x{mat.cols} matrix")
    size = mat.rows
    total = Poly.zero(mat.table, mat.cap)
    for perm in itertools.permutations(range(size)):
        inversions = sum(
            1 for a, b in itertools.combinations(range(size), 2) if perm[a] > perm[b]
        )
        term = mat[0, perm[0]]
        for r in range(1, size):
            if not term:
                break
            term = term * mat[r, perm[r]]
        total = total - term if inversions % 2 else total + term
    return total


def edge_matrix(s: SimplexInstance) -> PolyMatrix:
    """n x k matrix X whose columns are ``x_i - x0``."""
    cols = [_diff(s.points[i], s.points[0]) for i in range(1, s.k + 1)]
    return PolyMatrix.from_rows([[col[a] for col in cols] for a in range(s.n)])


def coordinate_gram_matrix(s: SimplexInstance, m: MetricSpec) -> PolyMatrix:
    """``X^T G(x0) X``, normal-formed entrywise."""
    X = edge_matrix(s)
    return (X.transpose() @ eval_G(m, s.points[0]) @ X).map(s.ring.normal_form)


def _check_volume_regime(s: SimplexInstance) -> None:
    if s.k > s.n:
        raise UsageError(f"square volumes need k <= n, got k={s.k}, n={s.n}")


def square_volume(
    s: SimplexInstance, m: MetricSpec, extension: ExtensionPerturbation | None = None
) -> Poly:
    """``1/(k!)^2 det((x_i - x0) . (x_j - x0))`` in normal form."""
    _check_volume_regime(s)
    det = det_ring(gram_matrix(s, m, extension))
    return s.ring.normal_form(det / factorial(s.k) ** 2)


def heron_square_area(s: SimplexInstance, m: MetricSpec) -> Poly:
    """``1/8 (g01 g02 + g10 g12 + g20 g21)`` for a second-infinitesimal triangle."""
    if s.k != 2:
        raise UsageError(f"Heron's square area is defined for k = 2, got k = {s.k}")
    x = s.points

    def g(i: int, j: int) -> Poly:
        return eval_g(m, x[i], x[j])

    total = g(0, 1) * g(0, 2) + g(1, 0) * g(1, 2) + g(2, 0) * g(2, 1)
    return s.ring.normal_form(total / 8)


def formal_volume_form(s: SimplexInstance) -> Poly:
    """``det(x_1 - x0, ..., x_n - x0) / n!``, the candidate volume form with
    the ``sqrt(det G(x0))`` factor left out."""
    if s.k != s.n:
        raise UsageError(f"the volume form needs k = n, got k={s.k}, n={s.n}")
    return det_ring(edge_matrix(s)) / factorial(s.n)


def omega_squared(s: SimplexInstance, m: MetricSpec) -> Poly:
    """Square of the candidate volume form: ``det(X)^2 det G(x0) / (n!)^2``."""
    if s.k != s.n:
        raise UsageError(f"the volume form needs k = n, got k={s.k}, n={s.n}")
    if m.n != s.n:
        raise StructuralError(f"metric dimension {m.n} != simplex dimension {s.n}")
    w = formal_volume_form(s)
    return s.ring.normal_form(w * w * det_ring(eval_G(m, s.points[0])))


def multilinear_component(p: Poly, q: QuotientRing) -> Poly:
    """Component of ``p`` of per-block multi-degree exactly ``(1, ..., 1)``."""
    if p.table != q.table:
        raise StructuralError("polynomial does not live on this ring")
    target = (1,) * len(q.table.blocks)
    return p.filter_terms(lambda mono: q.table.block_degrees(mono) == target)


def square_volume_all_orders(s: SimplexInstance, m: MetricSpec) -> list[tuple[tuple[int, ...], Poly]]:
    """Square volume for every ordering of the vertices (mutual simplices)."""
    if s.kind != MUTUAL:
        raise UsageError("vertex permutations need a mutual simplex")
    return [
        (order, square_volume(s.reordered(order), m))
        for order in itertools.permutations(range(s.k + 1))
    ]

