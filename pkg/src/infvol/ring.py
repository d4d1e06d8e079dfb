"""Sparse multivariate polynomials over the rationals, with degree truncation.

Variables are organised in named blocks (one block per simplex vertex, or the
ambient coordinates ``x1..xn`` of a metric).  A variable is rendered as the
block name followed by its 1-based coordinate index, e.g. ``e2``.

Monomials are dense exponent tuples over all variables of a :class:`VarTable`.
Terms are ordered graded-lexicographically: higher total degree first, ties
broken by comparing exponent tuples (the earlier variable dominates).
"""

from __future__ import annotations

import operator
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence, Union

from .errors import StructuralError, ValidationError

Monomial = tuple[int, ...]
Scalar = Union[int, Fraction]

_BLOCK_NAME = re.compile(r"[A-Za-z]+\Z")
_VAR_NAME = re.compile(r"([A-Za-z]+)([0-9]+)\Z")


def grlex_key(mono: Monomial) -> tuple[int, Monomial]:
    """Sort key; larger key means larger in graded-lex order."""
    return (sum(mono), mono)


@dataclass(frozen=True)
class VarTable:
    """Ordered blocks of variables, ``((name, dimension), ...)``."""

    blocks: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        blocks = tuple((str(name), int(dim)) for name, dim in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        seen = set()
        for name, dim in blocks:
            if not _BLOCK_NAME.match(name):
                raise StructuralError(f"block name must be alphabetic: {name!r}")
            if name in seen:
                raise StructuralError(f"duplicate block name {name!r}")
            if dim < 1:
                raise StructuralError(f"block {name!r} has dimension {dim} < 1")
            seen.add(name)

    @cached_property
    def nvars(self) -> int:
        return sum(dim for _, dim in self.blocks)

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for _, dim in self.blocks:
            out.append(acc)
            acc += dim
        return tuple(out)

    @cached_property
    def names(self) -> tuple[str, ...]:
        return tuple(f"{name}{c + 1}" for name, dim in self.blocks for c in range(dim))

    @cached_property
    def _index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}

    @cached_property
    def _block_index(self) -> dict[str, int]:
        return {name: b for b, (name, _) in enumerate(self.blocks)}

    @cached_property
    def block_slices(self) -> tuple[slice, ...]:
        return tuple(
            slice(off, off + dim) for off, (_, dim) in zip(self.offsets, self.blocks)
        )

    def block_position(self, block: int | str) -> int:
        if isinstance(block, str):
            try:
                return self._block_index[block]
            except KeyError:
                raise StructuralError(f"unknown block {block!r}") from None
        if not 0 <= block < len(self.blocks):
            raise StructuralError(f"block index {block} out of range")
        return block

    def index(self, block: int | str, coord: int) -> int:
        """Flat variable index of coordinate ``coord`` (0-based) of ``block``."""
        b = self.block_position(block)
        if not 0 <= coord < self.blocks[b][1]:
            raise StructuralError(f"coordinate {coord} out of range for block {b}")
        return self.offsets[b] + coord

    def lookup(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ValidationError(f"unknown variable {name!r}") from None

    def block_degrees(self, mono: Monomial) -> tuple[int, ...]:
        return tuple(sum(mono[s]) for s in self.block_slices)


def _as_fraction(c: object) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int) and not isinstance(c, bool):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"coefficient must be int or Fraction, got {type(c).__name__}")


class Poly:
    """Immutable polynomial on a :class:`VarTable`, truncated above ``cap``.

    ``cap=None`` disables truncation.  Two polynomials are equal iff they
    share table and cap and have identical term maps.
    """

    __slots__ = ("table", "cap", "_terms", "_hash")

    def __init__(
        self,
        table: VarTable,
        terms: Mapping[Monomial, Scalar] | Iterable[tuple[Monomial, Scalar]] = (),
        cap: int | None = None,
    ) -> None:
        nv = table.nvars
        acc: dict[Monomial, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for mono, c in items:
            mono = tuple(int(e) for e in mono)
            if len(mono) != nv or min(mono, default=0) < 0:
                raise StructuralError(f"bad exponent vector {mono} for {nv} variables")
            if cap is not None and sum(mono) > cap:
                continue
            acc[mono] = acc.get(mono, 0) + _as_fraction(c)
        self.table = table
        self.cap = cap
        self._terms = {m: c for m, c in acc.items() if c}
        self._hash = None

    @classmethod
    def _make(cls, table: VarTable, cap: int | None, terms: dict) -> Poly:
        # Trusted constructor: terms already clean and within cap.
        p = cls.__new__(cls)
        p.table = table
        p.cap = cap
        p._terms = terms
        p._hash = None
        return p

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, table: VarTable, cap: int | None = None) -> Poly:
        return cls._make(table, cap, {})

    @classmethod
    def constant(cls, table: VarTable, c: Scalar, cap: int | None = None) -> Poly:
        c = _as_fraction(c)
        return cls._make(table, cap, {(0,) * table.nvars: c} if c else {})

    @classmethod
    def variable(cls, table: VarTable, var: int | str, cap: int | None = None) -> Poly:
        idx = table.lookup(var) if isinstance(var, str) else var
        if not 0 <= idx < table.nvars:
            raise StructuralError(f"variable index {idx} out of range")
        mono = [0] * table.nvars
        mono[idx] = 1
        if cap is not None and cap < 1:
            return cls.zero(table, cap)
        return cls._make(table, cap, {tuple(mono): Fraction(1)})

    @classmethod
    def block_vector(cls, table: VarTable, block: int | str, cap: int | None = None) -> tuple[Poly, ...]:
        b = table.block_position(block)
        return tuple(
            cls.variable(table, table.index(b, c), cap) for c in range(table.blocks[b][1])
        )

    @classmethod
    def parse(cls, text: str, table: VarTable, cap: int | None = None) -> Poly:
        return _Parser(text, table, cap).parse()

    # -- inspection ---------------------------------------------------------

    @property
    def terms(self) -> list[tuple[Monomial, Fraction]]:
        """Terms in descending graded-lex order."""
        return sorted(self._terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def term_map(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self.terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def coefficient(self, mono: Monomial) -> Fraction:
        return self._terms.get(tuple(mono), Fraction(0))

    def degree(self) -> int:
        """Maximum total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self._terms), default=-1)

    def min_degree(self) -> int:
        """Minimum total degree; -1 for the zero polynomial."""
        return min((sum(m) for m in self._terms), default=-1)

    def is_constant(self) -> bool:
        return all(not any(m) for m in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.table.nvars, Fraction(0))

    def variables(self) -> set[int]:
        return {i for m in self._terms for i, e in enumerate(m) if e}

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: Poly) -> None:
        if other.table != self.table:
            raise StructuralError("polynomials live on different variable tables")
        if other.cap != self.cap:
            raise StructuralError(f"degree caps differ: {self.cap} vs {other.cap}")

    def _coerce(self, other: object) -> Poly:
        if isinstance(other, Poly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Poly.constant(self.table, other, self.cap)
        return NotImplemented

    def __add__(self, other: object) -> Poly:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Poly._make(self.table, self.cap, out)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly._make(self.table, self.cap, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other: object) -> Poly:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other: object) -> Poly:
        return (-self) + other

    def scale(self, c: Scalar) -> Poly:
        c = _as_fraction(c)
        if not c:
            return Poly.zero(self.table, self.cap)
        return Poly._make(self.table, self.cap, {m: v * c for m, v in self._terms.items()})

    def __truediv__(self, c: Scalar) -> Poly:
        c = _as_fraction(c)
        if not c:
            raise ZeroDivisionError("polynomial division by zero")
        return self.scale(1 / c)

    def __mul__(self, other: object) -> Poly:
        if not isinstance(other, Poly):
            if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
                return self.scale(other)
            return NotImplemented
        self._check(other)
        a, b = self._terms, other._terms
        if not a or not b:
            return Poly.zero(self.table, self.cap)
        if len(a) > len(b):
            a, b = b, a
        cap = self.cap
        add = operator.add
        out: dict[Monomial, Fraction] = {}
        if cap is None:
            for ma, ca in a.items():
                for mb, cb in b.items():
                    m = tuple(map(add, ma, mb))
                    out[m] = out.get(m, 0) + ca * cb
        else:
            buckets: dict[int, list] = {}
            for mb, cb in b.items():
                buckets.setdefault(sum(mb), []).append((mb, cb))
            groups = sorted(buckets.items())
            for ma, ca in a.items():
                room = cap - sum(ma)
                for deg, items in groups:
                    if deg > room:
                        break
                    for mb, cb in items:
                        m = tuple(map(add, ma, mb))
                        out[m] = out.get(m, 0) + ca * cb
        return Poly._make(self.table, cap, {m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, e: int) -> Poly:
        if not isinstance(e, int) or e < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Poly.constant(self.table, 1, self.cap)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Poly):
            return (
                self.table == other.table
                and self.cap == other.cap
                and self._terms == other._terms
            )
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            other = _as_fraction(other)
            if not other:
                return not self._terms
            return self._terms == {(0,) * self.table.nvars: other}
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.table, self.cap, frozenset(self._terms.items())))
        return self._hash

    # -- structure-changing operations --------------------------------------

    def with_cap(self, cap: int | None) -> Poly:
        if cap is None:
            return Poly._make(self.table, None, dict(self._terms))
        return Poly._make(
            self.table, cap, {m: c for m, c in self._terms.items() if sum(m) <= cap}
        )

    def truncate(self, max_degree: int) -> Poly:
        """Keep only terms of total degree ``<= max_degree`` (cap unchanged)."""
        return Poly._make(
            self.table, self.cap,
            {m: c for m, c in self._terms.items() if sum(m) <= max_degree},
        )

    def filter_terms(self, keep) -> Poly:
        return Poly._make(
            self.table, self.cap, {m: c for m, c in self._terms.items() if keep(m)}
        )

    def substitute(
        self,
        images: Mapping[int | str, Poly],
        table: VarTable | None = None,
        cap: int | None = None,
    ) -> Poly:
        """Ring-homomorphic evaluation ``var -> images[var]``.

        Images must share one variable table and cap; the result lives there.
        ``table``/``cap`` are only consulted when ``images`` is empty.
        """
        imgs: dict[int, Poly] = {}
        for key, img in images.items():
            idx = self.table.lookup(key) if isinstance(key, str) else key
            imgs[idx] = img
        if imgs:
            first = next(iter(imgs.values()))
            table, cap = first.table, first.cap
            for img in imgs.values():
                if img.table != table or img.cap != cap:
                    raise StructuralError("substitution images must share table and cap")
        elif table is None:
            raise StructuralError("substitution target unknown: no images and no table")
        missing = self.variables() - imgs.keys()
        if missing:
            names = ", ".join(self.table.names[i] for i in sorted(missing))
            raise StructuralError(f"no image for variable(s) {names}")

        powers: dict[tuple[int, int], Poly] = {}

        def power(v: int, e: int) -> Poly:
            key = (v, e)
            if key not in powers:
                powers[key] = imgs[v] if e == 1 else power(v, e - 1) * imgs[v]
            return powers[key]

        out = Poly.zero(table, cap)
        for mono, c in self._terms.items():
            term = Poly.constant(table, c, cap)
            for v, e in enumerate(mono):
                if e:
                    term = term * power(v, e)
                    if not term:
                        break
            out = out + term
        return out

    def homogeneous_components(self) -> list[tuple[tuple[int, ...], Poly]]:
        """Split by per-block multi-degree, ascending graded-lex on multi-degrees."""
        parts: dict[tuple[int, ...], dict] = {}
        for m, c in self._terms.items():
            parts.setdefault(self.table.block_degrees(m), {})[m] = c
        if not parts:
            return []
        return [
            (md, Poly._make(self.table, self.cap, parts[md]))
            for md in sorted(parts, key=grlex_key)
        ]

    def degree_components(self) -> dict[int, Poly]:
        parts: dict[int, dict] = {}
        for m, c in self._terms.items():
            parts.setdefault(sum(m), {})[m] = c
        return {d: Poly._make(self.table, self.cap, parts[d]) for d in sorted(parts)}

    # -- rendering ----------------------------------------------------------

    def render(self, max_terms: int | None = None) -> str:
        """Deterministic text form, e.g. ``3/2*e1^2*f1 - e2 + 1``.

        With ``max_terms`` the output is cut after that many terms and
        ``...`` is appended.
        """
        terms = self.terms
        if not terms:
            return "0"
        names = self.table.names
        pieces = []
        shown = terms if max_terms is None else terms[:max_terms]
        for pos, (mono, c) in enumerate(shown):
            body = _render_monomial(mono, names)
            mag = abs(c)
            if not body:
                body = _render_rational(mag)
            elif mag != 1:
                body = f"{_render_rational(mag)}*{body}"
            if pos == 0:
                pieces.append(f"-{body}" if c < 0 else body)
            else:
                pieces.append(f" - {body}" if c < 0 else f" + {body}")
        if len(shown) < len(terms):
            pieces.append(" + ...")
        return "".join(pieces)

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"Poly({self.render()!r})"


def _render_rational(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _render_monomial(mono: Monomial, names: Sequence[str]) -> str:
    return "*".join(
        names[i] if e == 1 else f"{names[i]}^{e}" for i, e in enumerate(mono) if e
    )


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z]+[0-9]+)|(.))")


class _Parser:
    """Recursive descent over ``+ - * / ^ ( )``, integers and variables.

    Division is only allowed by a nonzero constant; exponents are
    non-negative integer literals.
    """

    def __init__(self, text: str, table: VarTable, cap: int | None) -> None:
        self.text = text
        self.table = table
        self.cap = cap
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m.group(0).strip() == "":
                break
            if m.group(1):
                self.tokens.append(("num", m.group(1), m.start(1)))
            elif m.group(2):
                self.tokens.append(("var", m.group(2), m.start(2)))
            else:
                ch = m.group(3)
                if ch not in "+-*/^()":
                    raise ValidationError(f"unexpected character {ch!r} at column {m.start(3) + 1}")
                self.tokens.append(("op", ch, m.start(3)))
            pos = m.end()
        self.i = 0

    def _peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def _fail(self, what: str):
        tok = self._peek()
        col = tok[2] + 1 if tok else len(self.text) + 1
        raise ValidationError(f"{what} at column {col} in {self.text!r}")

    def _accept(self, op: str) -> bool:
        tok = self._peek()
        if tok and tok[0] == "op" and tok[1] == op:
            self.i += 1
            return True
        return False

    def parse(self) -> Poly:
        if not self.tokens:
            self._fail("empty polynomial")
        p = self._expr()
        if self._peek() is not None:
            self._fail("unexpected token")
        return p

    def _expr(self) -> Poly:
        p = self._term()
        while True:
            if self._accept("+"):
                p = p + self._term()
            elif self._accept("-"):
                p = p - self._term()
            else:
                return p

    def _term(self) -> Poly:
        p = self._unary()
        while True:
            if self._accept("*"):
                p = p * self._unary()
            elif self._accept("/"):
                tok = self._peek()
                d = self._unary()
                if not d.is_constant() or d.is_zero():
                    col = tok[2] + 1 if tok else len(self.text) + 1
                    raise ValidationError(
                        f"division by a non-constant or zero at column {col} in {self.text!r}"
                    )
                p = p / d.constant_term()
            else:
                return p

    def _unary(self) -> Poly:
        if self._accept("-"):
            return -self._unary()
        if self._accept("+"):
            return self._unary()
        return self._power()

    def _power(self) -> Poly:
        base = self._atom()
        if self._accept("^"):
            tok = self._peek()
            if not tok or tok[0] != "num":
                self._fail("expected integer exponent")
            self.i += 1
            return base ** int(tok[1])
        return base

    def _atom(self) -> Poly:
        tok = self._peek()
        if tok is None:
            self._fail("unexpected end of input")
        kind, val, col = tok
        if kind == "num":
            self.i += 1
            return Poly.constant(self.table, int(val), self.cap)
        if kind == "var":
            self.i += 1
            if val not in self.table._index:
                raise ValidationError(f"unknown variable {val!r} at column {col + 1}")
            return Poly.variable(self.table, val, self.cap)
        if self._accept("("):
            p = self._expr()
            if not self._accept(")"):
                self._fail("expected ')'")
            return p
        self._fail(f"unexpected {val!r}")


@dataclass(frozen=True)
class PolyMatrix:
    """Dense matrix of polynomials sharing one table and cap (row-major)."""

    rows: int
    cols: int
    entries: tuple[Poly, ...]

    def __post_init__(self) -> None:
        entries = tuple(self.entries)
        object.__setattr__(self, "entries", entries)
        if self.rows < 1 or self.cols < 1 or len(entries) != self.rows * self.cols:
            raise StructuralError(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, "
                f"got {len(entries)}"
            )
        t, c = entries[0].table, entries[0].cap
        if any(e.table != t or e.cap != c for e in entries):
            raise StructuralError("matrix entries must share table and cap")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Poly]]) -> PolyMatrix:
        rows = [list(r) for r in rows]
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise StructuralError("ragged or empty matrix")
        return cls(len(rows), len(rows[0]), tuple(e for r in rows for e in r))

    @property
    def table(self) -> VarTable:
        return self.entries[0].table

    @property
    def cap(self) -> int | None:
        return self.entries[0].cap

    def __getitem__(self, ij: tuple[int, int]) -> Poly:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(ij)
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[Poly, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> tuple[Poly, ...]:
        return tuple(self[i, j] for i in range(self.rows))

    def transpose(self) -> PolyMatrix:
        return PolyMatrix.from_rows([self.column(j) for j in range(self.cols)])

    def __matmul__(self, other: PolyMatrix) -> PolyMatrix:
        if self.cols != other.rows:
            raise StructuralError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        out = []
        for i in range(self.rows):
            r = self.row(i)
            row = []
            for j in range(other.cols):
                acc = Poly.zero(self.table, self.cap)
                for a, b in zip(r, other.column(j)):
                    acc = acc + a * b
                row.append(acc)
            out.append(row)
        return PolyMatrix.from_rows(out)

    def map(self, fn) -> PolyMatrix:
        return PolyMatrix(self.rows, self.cols, tuple(fn(e) for e in self.entries))

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and all(
            self[i, j] == self[j, i] for i in range(self.rows) for j in range(i)
        )

    def render(self) -> str:
        return "[" + ", ".join(
            "[" + ", ".join(e.render() for e in self.row(i)) + "]" for i in range(self.rows)
        ) + "]"
