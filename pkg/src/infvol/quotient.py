"""Quotient rings encoding neighbour relations between simplex vertices.

The base vertex x0 sits at the coordinate origin; vertex i >= 1 owns a block
of n variables (its coordinates).  A relation ``x_i ~m x_j`` is encoded by
the vanishing of every product of m+1 coordinates of ``x_j - x_i``.

The ideal is homogeneous, so it is handled one degree at a time: each slice
of the ideal is stored as a reduced row-echelon basis whose pivots are the
graded-lex leading monomials.  With that pivot rule the normal form agrees
with the remainder modulo a graded-lex Groebner basis.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import prod

from .errors import StructuralError
from .ring import Monomial, Poly, VarTable, grlex_key

MUTUAL = "mutual"
EXTENDED = "extended"
KINDS = (MUTUAL, EXTENDED)

BLOCK_NAMES = ("e", "f", "h", "u", "v", "w", "z")


@dataclass(frozen=True)
class SimplexSpec:
    """Vertex blocks and neighbour orders of an infinitesimal simplex.

    ``block_orders[i-1]`` is the order of ``x_i ~ x0``.  In a mutual simplex
    every pair of non-base vertices is additionally second-order related; an
    extended simplex carries no relation between non-base vertices.
    ``overrides`` lowers the relation of a pair ``(i, j)`` to first order.
    """

    n: int
    k: int
    kind: str = MUTUAL
    block_orders: tuple[int, ...] | None = None
    overrides: tuple[tuple[int, int, int], ...] = ()

    def __post_init__(self) -> None:
        if self.n < 1 or self.k < 1:
            raise StructuralError(f"need n >= 1 and k >= 1, got n={self.n}, k={self.k}")
        if self.kind not in KINDS:
            raise StructuralError(f"unknown simplex kind {self.kind!r}")
        if self.k > len(BLOCK_NAMES):
            raise StructuralError(f"at most {len(BLOCK_NAMES)} non-base vertices supported")
        orders = (2,) * self.k if self.block_orders is None else tuple(self.block_orders)
        if len(orders) != self.k or any(o not in (1, 2) for o in orders):
            raise StructuralError(f"block_orders must be {self.k} values in {{1, 2}}: {orders}")
        object.__setattr__(self, "block_orders", orders)

        cleaned = {}
        for i, j, order in self.overrides:
            i, j = sorted((int(i), int(j)))
            if i == j or i < 0 or j > self.k:
                raise StructuralError(f"override pair ({i}, {j}) is not a vertex pair")
            if self.kind == EXTENDED and i != 0:
                raise StructuralError(
                    f"extended simplices carry no relation between x{i} and x{j}"
                )
            if order != 1:
                raise StructuralError("overrides may only lower a relation to first order")
            cleaned[(i, j)] = 1
        object.__setattr__(
            self, "overrides", tuple((i, j, o) for (i, j), o in sorted(cleaned.items()))
        )

    @property
    def effective_orders(self) -> tuple[int, ...]:
        """Order of ``x_i ~ x0`` for i = 1..k after overrides."""
        low = {j for i, j, _ in self.overrides if i == 0}
        return tuple(1 if i + 1 in low else o for i, o in enumerate(self.block_orders))

    def relations(self) -> tuple[tuple[int, int, int], ...]:
        """All related vertex pairs ``(i, j, order)`` with ``i < j``."""
        over = {(i, j): o for i, j, o in self.overrides}
        rels = [(0, j, o) for j, o in enumerate(self.effective_orders, start=1)]
        if self.kind == MUTUAL:
            for i, j in itertools.combinations(range(1, self.k + 1), 2):
                rels.append((i, j, over.get((i, j), 2)))
        return tuple(rels)

    @property
    def block_names(self) -> tuple[str, ...]:
        return BLOCK_NAMES[: self.k]

    @property
    def var_table(self) -> VarTable:
        return VarTable(tuple((name, self.n) for name in self.block_names))

    @property
    def cap(self) -> int:
        return sum(self.effective_orders)

    def describe(self) -> str:
        s = f"{self.kind} n={self.n} k={self.k}"
        if any(o != 2 for o in self.block_orders):
            s += " orders=" + ",".join(map(str, self.block_orders))
        if self.overrides:
            s += " first-order=" + ",".join(f"({i},{j})" for i, j, _ in self.overrides)
        return s


def _bounded_exponents(dim: int, max_degree: int) -> list[tuple[int, ...]]:
    return [
        e for e in itertools.product(range(max_degree + 1), repeat=dim)
        if sum(e) <= max_degree
    ]


def _insert_row(basis: dict[Monomial, dict], row: dict[Monomial, Fraction]) -> bool:
    """Add ``row`` to a reduced echelon basis in place; False if dependent."""
    for piv in [m for m in row if m in basis]:
        c = row.get(piv)
        if not c:
            continue
        for m, v in basis[piv].items():
            s = row.get(m, 0) - c * v
            if s:
                row[m] = s
            else:
                row.pop(m, None)
    if not row:
        return False
    lead = max(row, key=grlex_key)
    inv = 1 / row[lead]
    row = {m: v * inv for m, v in row.items()}
    for other in basis.values():
        c = other.get(lead)
        if c:
            for m, v in row.items():
                s = other.get(m, 0) - c * v
                if s:
                    other[m] = s
                else:
                    other.pop(m, None)
    basis[lead] = row
    return True


@dataclass(eq=False)
class QuotientRing:
    """Polynomial ring on the vertex blocks modulo the neighbour ideal.

    Built eagerly by :func:`build_ideal`; never mutated afterwards.
    """

    spec: SimplexSpec
    table: VarTable = field(init=False)
    cap: int = field(init=False)
    orders: tuple[int, ...] = field(init=False)
    generators: tuple[Poly, ...] = field(init=False)
    _bases: dict[int, dict[Monomial, dict]] = field(init=False, repr=False)
    _reduced: dict[int, list[Monomial]] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        spec = self.spec
        self.table = spec.var_table
        self.cap = spec.cap
        self.orders = spec.effective_orders
        self._slices = self.table.block_slices
        self.generators = tuple(self._make_generators())
        self._reduced = self._reduced_monomials()
        self._bases = self._build_bases()

    # -- construction -------------------------------------------------------

    def _make_generators(self) -> list[Poly]:
        # Uncapped: a generator may exceed the cap (e.g. e1^3 with cap 2).
        one = Poly.constant(self.table, 1)
        gens = []
        for i, j, order in self.spec.relations():
            xi, xj = (
                (Poly.zero(self.table),) * self.spec.n if v == 0
                else Poly.block_vector(self.table, v - 1)
                for v in (i, j)
            )
            diff = [xj[a] - xi[a] for a in range(self.spec.n)]
            for combo in itertools.combinations_with_replacement(range(self.spec.n), order + 1):
                gens.append(prod((diff[a] for a in combo), start=one))
        return gens

    def _reduced_monomials(self) -> dict[int, list[Monomial]]:
        per_block = [_bounded_exponents(dim, o) for (_, dim), o in zip(self.table.blocks, self.orders)]
        out: dict[int, list[Monomial]] = {}
        for parts in itertools.product(*per_block):
            mono = tuple(e for part in parts for e in part)
            out.setdefault(sum(mono), []).append(mono)
        for d in out:
            out[d].sort(key=grlex_key, reverse=True)
        return out

    def _build_bases(self) -> dict[int, dict[Monomial, dict]]:
        gens = []
        for g in self.generators:
            terms = {m: c for m, c in g.term_map().items() if not self.is_killed(m)}
            if terms:
                gens.append((g.degree(), terms))
        bases: dict[int, dict[Monomial, dict]] = {}
        for d in range(self.cap + 1):
            width = len(self._reduced.get(d, ()))
            basis: dict[Monomial, dict] = {}
            for gdeg, terms in gens:
                if gdeg > d:
                    continue
                for mult in self._reduced.get(d - gdeg, ()):
                    if len(basis) == width:
                        break
                    row = {}
                    for m, c in terms.items():
                        mm = tuple(map(int.__add__, m, mult))
                        if not self.is_killed(mm):
                            row[mm] = row.get(mm, 0) + c
                    row = {m: c for m, c in row.items() if c}
                    if row:
                        _insert_row(basis, row)
            if basis:
                bases[d] = basis
        return bases

    # -- element helpers ----------------------------------------------------

    def zero(self) -> Poly:
        return Poly.zero(self.table, self.cap)

    def one(self) -> Poly:
        return Poly.constant(self.table, 1, self.cap)

    def constant(self, c) -> Poly:
        return Poly.constant(self.table, c, self.cap)

    def vertex(self, i: int) -> tuple[Poly, ...]:
        """Coordinates of vertex ``i`` of the generic simplex (x0 = 0)."""
        if i == 0:
            return (self.zero(),) * self.spec.n
        if not 1 <= i <= self.spec.k:
            raise StructuralError(f"vertex index {i} out of range 0..{self.spec.k}")
        return Poly.block_vector(self.table, i - 1, self.cap)

    def parse(self, text: str) -> Poly:
        return Poly.parse(text, self.table, self.cap)

    # -- quotient structure -------------------------------------------------

    def is_killed(self, mono: Monomial) -> bool:
        """True when ``mono`` exceeds a block order (a monomial of the ideal)."""
        return any(sum(mono[s]) > o for s, o in zip(self._slices, self.orders))

    @property
    def nf_bases(self) -> dict[int, dict[Monomial, Poly]]:
        """Per-degree reduced echelon bases, as ``{degree: {pivot: row}}``.

        Monomials exceeding a block order are ideal members on their own and
        are left out of these bases; :meth:`normal_form` drops them first.
        """
        return {
            d: {piv: Poly._make(self.table, self.cap, dict(row)) for piv, row in basis.items()}
            for d, basis in self._bases.items()
        }

    def standard_monomials(self, degree: int) -> list[Monomial]:
        basis = self._bases.get(degree, {})
        return [m for m in self._reduced.get(degree, ()) if m not in basis]

    def quotient_dimension(self, degree: int) -> int:
        return len(self.standard_monomials(degree))

    def normal_form(self, p: Poly) -> Poly:
        if p.table != self.table or p.cap != self.cap:
            raise StructuralError("polynomial does not live on this quotient ring")
        out: dict[Monomial, Fraction] = {}
        pending = []
        for m, c in p.term_map().items():
            if self.is_killed(m):
                continue
            basis = self._bases.get(sum(m))
            if basis is not None and m in basis:
                pending.append((m, c, basis[m]))
            else:
                out[m] = out.get(m, 0) + c
        for piv, c, row in pending:
            for m, v in row.items():
                if m != piv:
                    out[m] = out.get(m, 0) - c * v
        return Poly._make(self.table, self.cap, {m: c for m, c in out.items() if c})

    def ring_equal(self, p: Poly, q: Poly) -> bool:
        return self.normal_form(p - q).is_zero()

    def contains(self, p: Poly) -> bool:
        return self.normal_form(p).is_zero()


@lru_cache(maxsize=None)
def build_ideal(spec: SimplexSpec) -> QuotientRing:
    """Build (or fetch from cache) the quotient ring of ``spec``."""
    return QuotientRing(spec)


def normal_form(p: Poly, q: QuotientRing) -> Poly:
    return q.normal_form(p)


def ring_equal(p: Poly, p2: Poly, q: QuotientRing) -> bool:
    return q.ring_equal(p, p2)
