"""Riemannian metrics in coordinates, ``g(x, y) = (y-x)^T G(x) (y-x)``.

A metric is a symmetric matrix ``G`` of polynomials in the ambient
coordinates ``x1..xn``.  Points handed to :func:`eval_G` and :func:`eval_g`
are vectors of ring elements (nilpotent coordinates), so evaluation is an
exact Taylor expansion.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .errors import StructuralError, ValidationError
from .ring import Poly, PolyMatrix, VarTable

Point = Sequence[Poly]


@lru_cache(maxsize=None)
def ambient_table(n: int) -> VarTable:
    return VarTable((("x", n),))


def det_rational(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    """Exact determinant by Gaussian elimination over the rationals."""
    a = [[Fraction(v) for v in r] for r in rows]
    size = len(a)
    det = Fraction(1)
    for col in range(size):
        piv = next((r for r in range(col, size) if a[r][col]), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, size):
            f = a[r][col] / a[col][col]
            if f:
                for c in range(col, size):
                    a[r][c] -= f * a[col][c]
    return det


@dataclass(frozen=True)
class MetricSpec:
    """Validated metric; build through :func:`validate_metric`."""

    n: int
    entries: tuple[tuple[Poly, ...], ...]
    taylor_degree: int
    name: str = "custom"

    @property
    def table(self) -> VarTable:
        return ambient_table(self.n)

    def G0(self) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(tuple(e.constant_term() for e in row) for row in self.entries)

    def det_G0(self) -> Fraction:
        return det_rational(self.G0())

    def render(self) -> str:
        return "[" + ", ".join(
            "[" + ", ".join(e.render() for e in row) + "]" for row in self.entries
        ) + "]"


def validate_metric(raw: Sequence[Sequence[object]], name: str = "custom") -> MetricSpec:
    """Check a square array of polynomials (Poly, str or number) and wrap it.

    Raises :class:`ValidationError` if the array is not square, not symmetric,
    or ``det G(0) <= 0``.
    """
    rows = [list(r) for r in raw]
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise ValidationError("metric must be a non-empty square array")
    table = ambient_table(n)
    entries = []
    for row in rows:
        out = []
        for e in row:
            if isinstance(e, Poly):
                if e.table != table:
                    raise ValidationError("metric entries must use variables x1..xn")
                out.append(e.with_cap(None))
            elif isinstance(e, str):
                out.append(Poly.parse(e, table))
            else:
                out.append(Poly.constant(table, e))
        entries.append(tuple(out))
    entries = tuple(entries)
    for a, b in itertools.combinations(range(n), 2):
        if entries[a][b] != entries[b][a]:
            raise ValidationError(f"metric is not symmetric at ({a}, {b})")
    det0 = det_rational([[e.constant_term() for e in row] for row in entries])
    if det0 <= 0:
        raise ValidationError(f"det G(0) = {det0} is not positive")
    degree = max((e.degree() for row in entries for e in row), default=0)
    return MetricSpec(n, entries, max(degree, 0), name)


def euclidean(n: int) -> MetricSpec:
    return validate_metric(
        [[1 if a == b else 0 for b in range(n)] for a in range(n)], name="euclidean"
    )


def diag_linear(n: int) -> MetricSpec:
    """``diag(1 + x1, 1, ..., 1)``."""
    rows: list[list[object]] = [[1 if a == b else 0 for b in range(n)] for a in range(n)]
    rows[0][0] = "1 + x1"
    return validate_metric(rows, name="diag_linear")


BUILTIN_METRICS = {"euclidean": euclidean, "diag_linear": diag_linear}


def _draw(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-4, 4), rng.choice((1, 2, 3)))


def _ambient_monomials(n: int, lo: int, hi: int) -> list[tuple[int, ...]]:
    out = []
    for d in range(lo, hi + 1):
        for combo in itertools.combinations_with_replacement(range(n), d):
            mono = [0] * n
            for a in combo:
                mono[a] += 1
            out.append(tuple(mono))
    return out


def _random_poly(n: int, rng: random.Random, lo: int, hi: int) -> Poly:
    return Poly(ambient_table(n), [(m, _draw(rng)) for m in _ambient_monomials(n, lo, hi)])


def random_metric(n: int, taylor_degree: int, seed: int) -> MetricSpec:
    """Seeded random metric with ``det G(0) > 0`` (rejection sampled)."""
    if n < 1 or taylor_degree < 0:
        raise ValueError("need n >= 1 and taylor_degree >= 0")
    rng = random.Random(f"metric:{n}:{taylor_degree}:{seed}")
    while True:
        const = [[Fraction(int(a == b)) for b in range(n)] for a in range(n)]
        for a, b in itertools.combinations_with_replacement(range(n), 2):
            const[a][b] += _draw(rng)
            const[b][a] = const[a][b]
        if det_rational(const) > 0:
            break
    table = ambient_table(n)
    entries = [[None] * n for _ in range(n)]
    for a, b in itertools.combinations_with_replacement(range(n), 2):
        e = Poly.constant(table, const[a][b])
        if taylor_degree:
            e = e + _random_poly(n, rng, 1, taylor_degree)
        entries[a][b] = entries[b][a] = e
    return validate_metric(entries, name=f"random(d={taylor_degree},seed={seed})")


@dataclass(frozen=True)
class ExtensionPerturbation:
    """Cubic-in-``(y-x)`` correction ``h`` turning g into an extension g + h.

    ``coefficients`` maps each non-decreasing coordinate triple ``(a, b, c)``
    to a polynomial ``h_abc`` in the ambient variables.
    """

    n: int
    coefficients: tuple[tuple[tuple[int, int, int], Poly], ...]
    seed: int | None = None

    @classmethod
    def zero(cls, n: int) -> ExtensionPerturbation:
        return cls(n, (), None)

    def is_zero(self) -> bool:
        return all(p.is_zero() for _, p in self.coefficients)


def random_perturbation(n: int, taylor_degree: int, seed: int) -> ExtensionPerturbation:
    rng = random.Random(f"extension:{n}:{taylor_degree}:{seed}")
    coeffs = []
    for triple in itertools.combinations_with_replacement(range(n), 3):
        coeffs.append((triple, _random_poly(n, rng, 0, taylor_degree)))
    return ExtensionPerturbation(n, tuple(coeffs), seed)


def _check_point(n: int, point: Point) -> tuple[Poly, ...]:
    point = tuple(point)
    if len(point) != n:
        raise StructuralError(f"point has {len(point)} coordinates, metric needs {n}")
    return point


def _evaluate(p: Poly, point: tuple[Poly, ...]) -> Poly:
    target = point[0]
    return p.substitute(dict(enumerate(point)), table=target.table, cap=target.cap)


@lru_cache(maxsize=4096)
def _eval_G_cached(m: MetricSpec, point: tuple[Poly, ...]) -> PolyMatrix:
    rows = []
    for a in range(m.n):
        row = []
        for b in range(m.n):
            if b < a:
                row.append(rows[b][a])
            else:
                row.append(_evaluate(m.entries[a][b], point))
        rows.append(row)
    return PolyMatrix.from_rows(rows)


def eval_G(m: MetricSpec, point: Point) -> PolyMatrix:
    """``G`` evaluated at a ring-valued point (exact Taylor expansion)."""
    return _eval_G_cached(m, _check_point(m.n, point))


def _quadratic(G: PolyMatrix, d: tuple[Poly, ...]) -> Poly:
    n = len(d)
    acc = Poly.zero(d[0].table, d[0].cap)
    for a in range(n):
        acc = acc + G[a, a] * (d[a] * d[a])
        for b in range(a + 1, n):
            acc = acc + (G[a, b] * (d[a] * d[b])).scale(2)
    return acc


def eval_g(m: MetricSpec, x: Point, y: Point) -> Poly:
    """Square length ``(y-x)^T G(x) (y-x)``."""
    x = _check_point(m.n, x)
    y = _check_point(m.n, y)
    d = tuple(b - a for a, b in zip(x, y))
    return _quadratic(eval_G(m, x), d)


def eval_h(h: ExtensionPerturbation, x: Point, y: Point) -> Poly:
    """The perturbation ``sum h_abc(x) (y-x)_a (y-x)_b (y-x)_c``."""
    x = _check_point(h.n, x)
    y = _check_point(h.n, y)
    d = tuple(b - a for a, b in zip(x, y))
    acc = Poly.zero(x[0].table, x[0].cap)
    for (a, b, c), coeff in h.coefficients:
        if coeff.is_zero():
            continue
        acc = acc + _evaluate(coeff, x) * (d[a] * d[b] * d[c])
    return acc


def eval_g_extended(m: MetricSpec, h: ExtensionPerturbation, x: Point, y: Point) -> Poly:
    """Extension ``g + h`` of the square length beyond second-order pairs."""
    if h.n != m.n:
        raise StructuralError("perturbation and metric dimensions differ")
    return eval_g(m, x, y) + eval_h(h, x, y)
