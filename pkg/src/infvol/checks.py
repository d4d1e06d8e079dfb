"""Named verification checks producing structured, reproducible reports.

Every asserting check reduces its claim to "this normal form is zero".  The
residual of a report is the rendered normal form of what should vanish, so a
passing report always carries the residual ``"0"``.
"""

from __future__ import annotations

import itertools
import logging
import random
import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Callable, Iterable, Sequence

from .errors import InfvolError, StructuralError, UsageError
from .metric import ExtensionPerturbation, MetricSpec, random_perturbation
from .quotient import EXTENDED, KINDS, MUTUAL, SimplexSpec, build_ideal
from .ring import Poly, VarTable
from .volumes import (
    SimplexInstance,
    bullet,
    coordinate_gram_matrix,
    det_ring,
    formal_volume_form,
    gram_matrix,
    heron_square_area,
    multilinear_component,
    omega_squared,
    square_volume,
)

if TYPE_CHECKING:
    from .config import RunConfig

log = logging.getLogger(__name__)

PASS = "pass"
FAIL = "fail"
REPORT_ONLY = "report-only"

# Perturbation coefficients h_abc are drawn with this Taylor degree.
PERTURBATION_DEGREE = 2


@dataclass(frozen=True)
class Instance:
    n: int
    k: int
    metric: str
    seed: int | None = None
    detail: str = ""

    def sort_key(self) -> tuple:
        return (self.n, self.k, self.metric, -1 if self.seed is None else self.seed, self.detail)

    def label(self) -> str:
        parts = [f"n={self.n}", f"k={self.k}", self.metric]
        if self.seed is not None:
            parts.append(f"seed={self.seed}")
        if self.detail:
            parts.append(self.detail)
        return " ".join(parts)


@dataclass(frozen=True)
class CheckReport:
    check_name: str
    instance: Instance
    status: str
    residual: str
    elapsed: float
    provenance: str = ""

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_record(self, timing: bool = True) -> dict:
        record = asdict(self)
        if not timing:
            record.pop("elapsed")
        return record


Residuals = list[tuple[str, Poly]]


def _combine(residuals: Residuals) -> str:
    bad = [(label, p) for label, p in residuals if not p.is_zero()]
    if not bad:
        return "0"
    if len(residuals) == 1:
        return bad[0][1].render()
    return "; ".join(f"{label}: {p.render()}" for label, p in bad)


def _report(
    name: str,
    instance: Instance,
    compute: Callable[[], Residuals],
    report_only: bool = False,
    provenance: str = "",
) -> CheckReport:
    start = time.perf_counter()
    residuals = compute()
    elapsed = time.perf_counter() - start
    residual = _combine(residuals)
    if report_only:
        status = REPORT_ONLY
    else:
        status = PASS if residual == "0" else FAIL
    return CheckReport(name, instance, status, residual, elapsed, provenance)


# -- diagonal-vanishing functions on pairs of points --------------------------


def pair_table(n: int) -> VarTable:
    return VarTable((("x", n), ("y", n)))


def random_diagonal_vanishing(n: int, seed: int, degree: int = 2) -> Poly:
    """Random ``f(x, y) = sum_a (y-x)_a r_a(x, y)`` with ``deg r_a <= degree``."""
    table = pair_table(n)
    rng = random.Random(f"diagonal:{n}:{degree}:{seed}")
    monos = [
        m for m in itertools.product(range(degree + 1), repeat=2 * n) if sum(m) <= degree
    ]
    f = Poly.zero(table)
    for a in range(n):
        r = Poly(table, [(m, Fraction(rng.randint(-3, 3), rng.choice((1, 2)))) for m in monos])
        diff = Poly.variable(table, n + a) - Poly.variable(table, a)
        f = f + diff * r
    return f


def swap_arguments(f: Poly) -> Poly:
    n = f.table.blocks[0][1]
    images = {}
    for a in range(n):
        images[a] = Poly.variable(f.table, n + a)
        images[n + a] = Poly.variable(f.table, a)
    return f.substitute(images)


def evaluate_pair(f: Poly, x: Sequence[Poly], y: Sequence[Poly]) -> Poly:
    n = f.table.blocks[0][1]
    images = {a: x[a] for a in range(n)}
    images.update({n + a: y[a] for a in range(n)})
    return f.substitute(images)


# -- checks --------------------------------------------------------------------


def check_alternating(n: int, seed: int, f: Poly | None = None, provenance: str = "") -> CheckReport:
    """A diagonal-vanishing f(x, y) is alternating on first-order pairs.

    The ring has a base point ``a`` (second order at the origin) and an
    increment ``e`` of first order; the pair is ``(a, a + e)``.  Also checks
    that the symmetrisation ``f(x,y) + f(y,x)`` vanishes on that pair.
    """
    if f is None:
        f = random_diagonal_vanishing(n, seed)
    elif f.table != pair_table(n):
        raise StructuralError("f must live on the pair table x1..xn, y1..yn")

    def compute() -> Residuals:
        q = build_ideal(SimplexSpec(n, 2, EXTENDED, block_orders=(2, 1)))
        base = q.vertex(1)
        moved = tuple(a + e for a, e in zip(base, q.vertex(2)))
        x = Poly.block_vector(f.table, 0)
        on_diagonal = evaluate_pair(f, x, x)
        alternation = evaluate_pair(f, base, moved) + evaluate_pair(f, moved, base)
        symmetric = f + swap_arguments(f)
        return [
            ("f(x,x)", on_diagonal),
            ("f(x,y)+f(y,x)", q.normal_form(alternation)),
            ("fsym on M1", q.normal_form(evaluate_pair(symmetric, base, moved))),
        ]

    return _report("check_alternating", Instance(n, 1, "-", seed), compute, provenance=provenance)


def _g0_form(m: MetricSpec, u: Sequence[Poly], v: Sequence[Poly]) -> Poly:
    G0 = m.G0()
    acc = Poly.zero(u[0].table, u[0].cap)
    for a in range(m.n):
        for b in range(m.n):
            if G0[a][b]:
                acc = acc + (u[a] * v[b]).scale(G0[a][b])
    return acc


def check_bullet_approximation(
    n: int, metric: MetricSpec, seed: int | None = None, provenance: str = ""
) -> CheckReport:
    """``x . y = x^T G(0) y`` up to degree >= 3, and exactly on the diagonal."""

    def compute() -> Residuals:
        q = build_ideal(SimplexSpec(n, 2, MUTUAL))
        s = SimplexInstance.generic(q)
        e, f = q.vertex(1), q.vertex(2)
        cross = q.normal_form(bullet(s, metric, 1, 2) - _g0_form(metric, e, f))
        return [
            ("x.y low degrees", cross.truncate(2)),
            ("x.x", q.normal_form(bullet(s, metric, 1, 1) - _g0_form(metric, e, e))),
            ("y.y", q.normal_form(bullet(s, metric, 2, 2) - _g0_form(metric, f, f))),
        ]

    return _report(
        "check_bullet_approximation", Instance(n, 2, metric.name, seed), compute,
        provenance=provenance,
    )


def check_gram_reduction(
    n: int, k: int, kind: str, metric: MetricSpec, seed: int | None = None, provenance: str = ""
) -> CheckReport:
    """``det(x_i . x_j) == det(X^T G(x0) X)`` in the quotient ring."""

    def compute() -> Residuals:
        q = build_ideal(SimplexSpec(n, k, kind))
        s = SimplexInstance.generic(q)
        lhs = det_ring(gram_matrix(s, metric))
        rhs = det_ring(coordinate_gram_matrix(s, metric))
        return [("det difference", q.normal_form(lhs - rhs))]

    return _report(
        "check_gram_reduction", Instance(n, k, metric.name, seed, kind), compute,
        provenance=provenance,
    )


def check_symmetry(
    n: int, k: int, metric: MetricSpec, seed: int | None = None, provenance: str = ""
) -> CheckReport:
    """Square volume is the same for all (k+1)! vertex orderings."""

    def compute() -> Residuals:
        q = build_ideal(SimplexSpec(n, k, MUTUAL))
        s = SimplexInstance.generic(q)
        reference = square_volume(s, metric)
        out = []
        for order in itertools.permutations(range(k + 1)):
            if order == tuple(range(k + 1)):
                continue
            other = square_volume(s.reordered(order), metric)
            out.append((f"order {''.join(map(str, order))}", q.normal_form(other - reference)))
        return out or [("identity", q.zero())]

    return _report(
        "check_symmetry", Instance(n, k, metric.name, seed), compute, provenance=provenance
    )


def check_vanish_on_first_neighbours(
    n: int,
    k: int,
    metric: MetricSpec,
    seed: int | None = None,
    pair: tuple[int, int] = (1, 2),
    provenance: str = "",
) -> CheckReport:
    """Square volume vanishes when vertices ``pair`` are first-order neighbours.

    Two routes: the ring rebuilt with a first-order relation on the pair, and
    the generic ring with ``x_j := x_i`` substituted.
    """
    i, j = sorted(pair)
    if i == j or i < 0 or j > k:
        raise StructuralError(f"invalid vertex pair {pair} for k={k}")

    def compute() -> Residuals:
        q1 = build_ideal(SimplexSpec(n, k, MUTUAL, overrides=((i, j, 1),)))
        first_order = square_volume(SimplexInstance.generic(q1), metric)
        q = build_ideal(SimplexSpec(n, k, MUTUAL))
        equal = square_volume(SimplexInstance.generic(q).specialized(i, j), metric)
        return [("first-order pair", first_order), ("equal vertices", equal)]

    return _report(
        "check_vanish_on_first_neighbours",
        Instance(n, k, metric.name, seed, f"pair=({i},{j})"),
        compute,
        provenance=provenance,
    )


def check_extension_independence(
    n: int, k: int, metric: MetricSpec, seeds: Sequence[int], provenance: str = ""
) -> CheckReport:
    """Extended-simplex square volume does not depend on the extension of g."""
    seeds = list(seeds)
    if not seeds:
        raise UsageError("need at least one perturbation seed")

    def compute() -> Residuals:
        q = build_ideal(SimplexSpec(n, k, EXTENDED))
        s = SimplexInstance.generic(q)
        canonical = square_volume(s, metric, ExtensionPerturbation.zero(n))
        out = []
        for sd in seeds:
            h = random_perturbation(n, PERTURBATION_DEGREE, sd)
            out.append((f"h seed {sd}", q.normal_form(square_volume(s, metric, h) - canonical)))
        return out

    detail = "seeds=" + ",".join(map(str, seeds))
    return _report(
        "check_extension_independence", Instance(n, k, metric.name, None, detail), compute,
        provenance=provenance,
    )


def symmetric_linear_form(q, seed: int) -> Poly:
    """``sum_a c_a sum_i (x_i)_a``: linear, invariant under vertex swaps."""
    rng = random.Random(f"linear:{q.spec.n}:{seed}")
    coeffs = [Fraction(rng.randint(-4, 4), rng.choice((1, 2, 3))) for _ in range(q.spec.n)]
    acc = q.zero()
    for i in range(1, q.spec.k + 1):
        for a, x in enumerate(q.vertex(i)):
            acc = acc + x.scale(coeffs[a])
    return acc


def check_volume_form_identity(
    n: int, metric: MetricSpec, seed: int = 0, provenance: str = ""
) -> CheckReport:
    """``Omega^2 == Vol^2`` on extended n-simplices, plus a grading identity.

    ``Omega`` is the candidate form without its square-root factor, disturbed
    by ``H = Omega * l`` (l a symmetric linear form) so that it has
    components outside multi-degree (1, ..., 1).
    """

    def compute() -> Residuals:
        q = build_ideal(SimplexSpec(n, n, EXTENDED))
        s = SimplexInstance.generic(q)
        identity = q.normal_form(omega_squared(s, metric) - square_volume(s, metric))
        w = formal_volume_form(s)
        extended = w + w * symmetric_linear_form(q, seed)
        head = multilinear_component(extended, q)
        grading = q.normal_form(head * head - extended * extended)
        det_g0 = metric.det_G0()
        recovered = q.normal_form((head * head).scale(det_g0) - omega_squared(s, metric))
        return [
            ("Omega^2 - Vol^2", identity),
            ("omega^2 - Omega^2", grading),
            ("detG0*omega^2 - Omega^2", recovered),
        ]

    return _report(
        "check_volume_form_identity", Instance(n, n, metric.name, seed), compute,
        provenance=provenance,
    )


def experiment_heron_vs_gram(
    n: int, metric: MetricSpec, seed: int | None = None, provenance: str = ""
) -> CheckReport:
    """Residual ``heron - gram`` for second-infinitesimal triangles (report only)."""
    if n < 2:
        raise UsageError("the Heron experiment needs n >= 2")

    def compute() -> Residuals:
        q = build_ideal(SimplexSpec(n, 2, MUTUAL))
        s = SimplexInstance.generic(q)
        return [("heron - gram", q.normal_form(heron_square_area(s, metric) - square_volume(s, metric)))]

    return _report(
        "experiment_heron_vs_gram", Instance(n, 2, metric.name, seed), compute,
        report_only=True, provenance=provenance,
    )


CHECK_NAMES = (
    "check_alternating",
    "check_bullet_approximation",
    "check_gram_reduction",
    "check_symmetry",
    "check_vanish_on_first_neighbours",
    "check_extension_independence",
    "check_volume_form_identity",
    "experiment_heron_vs_gram",
)

# Checks that draw their own random data from the run seed.
SEEDED_CHECKS = {"check_alternating", "check_volume_form_identity"}


# -- suite ---------------------------------------------------------------------


def _error_report(name: str, instance: Instance, exc: Exception, provenance: str) -> CheckReport:
    return CheckReport(name, instance, FAIL, f"error: {type(exc).__name__}: {exc}", 0.0, provenance)


def _jobs(name: str, config: RunConfig) -> Iterable[tuple[Instance, Callable[[], CheckReport]]]:
    seeds = list(config.seeds) or [0]

    def ks(n: int, lo: int = 1, hi: int | None = None) -> list[int]:
        hi = n if hi is None else hi
        out = []
        for k in config.k_values:
            if lo <= k <= hi:
                out.append(k)
            elif k > n:
                log.info("%s: skipping k=%d > n=%d", name, k, n)
        return out

    def metrics(n: int, seeded_check: bool):
        for desc in config.metrics:
            for sd in seeds if (seeded_check or desc.uses_run_seed) else [None]:
                m = desc.resolve(n, sd)
                if m is not None:
                    yield m, sd

    for n in config.n_values:
        if name == "check_alternating":
            for sd in seeds:
                yield Instance(n, 1, "-", sd), lambda n=n, sd=sd: check_alternating(n, sd)
        elif name == "check_bullet_approximation":
            for m, sd in metrics(n, False):
                yield Instance(n, 2, m.name, sd), lambda n=n, m=m, sd=sd: check_bullet_approximation(n, m, sd)
        elif name == "check_gram_reduction":
            for k in ks(n):
                for kind in KINDS:
                    for m, sd in metrics(n, False):
                        yield (
                            Instance(n, k, m.name, sd, kind),
                            lambda n=n, k=k, kind=kind, m=m, sd=sd: check_gram_reduction(n, k, kind, m, sd),
                        )
        elif name == "check_symmetry":
            for k in ks(n):
                for m, sd in metrics(n, False):
                    yield Instance(n, k, m.name, sd), lambda n=n, k=k, m=m, sd=sd: check_symmetry(n, k, m, sd)
        elif name == "check_vanish_on_first_neighbours":
            for k in ks(n):
                for pair in itertools.combinations(range(k + 1), 2):
                    for m, sd in metrics(n, False):
                        yield (
                            Instance(n, k, m.name, sd, f"pair=({pair[0]},{pair[1]})"),
                            lambda n=n, k=k, m=m, sd=sd, pair=pair: check_vanish_on_first_neighbours(n, k, m, sd, pair),
                        )
        elif name == "check_extension_independence":
            pert_seeds = seeds if len(seeds) >= 2 else seeds + [seeds[-1] + 1]
            for k in ks(n):
                for m, _ in metrics(n, False):
                    yield (
                        Instance(n, k, m.name, None, "seeds=" + ",".join(map(str, pert_seeds))),
                        lambda n=n, k=k, m=m: check_extension_independence(n, k, m, pert_seeds),
                    )
        elif name == "check_volume_form_identity":
            for m, sd in metrics(n, True):
                yield Instance(n, n, m.name, sd), lambda n=n, m=m, sd=sd: check_volume_form_identity(n, m, sd)
        elif name == "experiment_heron_vs_gram":
            if n < 2 or 2 not in config.k_values:
                continue
            for m, sd in metrics(n, False):
                yield Instance(n, 2, m.name, sd), lambda n=n, m=m, sd=sd: experiment_heron_vs_gram(n, m, sd)
        else:
            raise UsageError(f"unknown check {name!r}")


def run_suite(config: RunConfig) -> list[CheckReport]:
    """Run every selected check over the configured grid.

    Errors raised inside a check become failed reports.  The result is sorted
    by check name, then instance.
    """
    digest = config.digest()
    reports = []
    for name in config.checks:
        for instance, job in _jobs(name, config):
            try:
                report = job()
            except InfvolError as exc:
                reports.append(_error_report(name, instance, exc, digest))
                continue
            reports.append(
                CheckReport(
                    report.check_name, report.instance, report.status,
                    report.residual, report.elapsed, digest,
                )
            )
    return sorted(reports, key=lambda r: (r.check_name, r.instance.sort_key()))


def exit_code(reports: Iterable[CheckReport]) -> int:
    """0 iff every asserting check passed; report-only checks never fail."""
    return 1 if any(r.status == FAIL for r in reports) else 0
