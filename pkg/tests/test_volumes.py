import itertools

import pytest

from infvol import (
    EXTENDED,
    ExtensionPerturbation,
    PolyMatrix,
    SimplexInstance,
    SimplexSpec,
    StructuralError,
    UsageError,
    build_ideal,
    bullet,
    det_ring,
    eval_g,
    gram_matrix,
    heron_square_area,
    multilinear_component,
    omega_squared,
    random_metric,
    random_perturbation,
    square_volume,
)
from infvol.metric import diag_linear, euclidean
from infvol.volumes import coordinate_gram_matrix, edge_matrix, formal_volume_form


def generic(n, k, kind="mutual", **kw):
    return SimplexInstance.generic(build_ideal(SimplexSpec(n, k, kind, **kw)))


def g0_form(m, u, v):
    G0 = m.G0()
    acc = u[0] - u[0]
    for a in range(m.n):
        for b in range(m.n):
            acc = acc + (u[a] * v[b]).scale(G0[a][b])
    return acc


# -- bullet ----------------------------------------------------------------------


def test_euclidean_bullet_is_dot_product():
    s = generic(3, 2)
    assert bullet(s, euclidean(3), 1, 2) == s.ring.parse("e1*f1 + e2*f2 + e3*f3")
    assert bullet(s, euclidean(3), 2, 2) == s.ring.parse("f1^2 + f2^2 + f3^2")


@pytest.mark.parametrize("metric", [euclidean(2), diag_linear(2), random_metric(2, 2, 1)])
def test_bullet_diagonal_is_exact_square_length(metric):
    s = generic(2, 2)
    q = s.ring
    for i in (1, 2):
        assert bullet(s, metric, i, i) == q.normal_form(eval_g(metric, q.vertex(0), q.vertex(i)))
        assert bullet(s, metric, i, i) == q.normal_form(g0_form(metric, q.vertex(i), q.vertex(i)))


@pytest.mark.parametrize("seed", [1, 2])
def test_bullet_error_term_starts_in_degree_three(seed):
    m = random_metric(2, 2, seed)
    s = generic(2, 2)
    q = s.ring
    eps = q.normal_form(bullet(s, m, 1, 2) - g0_form(m, q.vertex(1), q.vertex(2)))
    assert not eps.is_zero()
    assert eps.min_degree() >= 3


def test_bullet_is_symmetric_in_indices():
    m = random_metric(3, 2, 4)
    s = generic(3, 3)
    for i, j in itertools.combinations(range(1, 4), 2):
        assert bullet(s, m, i, j) == bullet(s, m, j, i)


def test_extended_bullet_needs_extension():
    s = generic(2, 2, EXTENDED)
    with pytest.raises(UsageError):
        bullet(s, euclidean(2), 1, 2)
    bullet(s, euclidean(2), 1, 1)
    bullet(s, euclidean(2), 1, 2, ExtensionPerturbation.zero(2))


def test_extension_changes_individual_bullets():
    # the perturbation is visible entrywise; only the determinant is blind to it
    m = random_metric(2, 2, 1)
    s = generic(2, 2, EXTENDED)
    h = random_perturbation(2, 2, 1)
    assert bullet(s, m, 1, 2, h) != bullet(s, m, 1, 2, ExtensionPerturbation.zero(2))


def test_bullet_index_errors():
    s = generic(2, 2)
    with pytest.raises(StructuralError):
        bullet(s, euclidean(2), 0, 1)
    with pytest.raises(StructuralError):
        bullet(s, euclidean(3), 1, 1)


# -- gram matrices -----------------------------------------------------------------


def test_gram_k1_is_square_length():
    m = random_metric(2, 2, 3)
    s = generic(2, 1)
    G = gram_matrix(s, m)
    assert (G.rows, G.cols) == (1, 1)
    assert G[0, 0] == s.ring.normal_form(eval_g(m, s.points[0], s.points[1]))


def test_euclidean_gram_n2_k2():
    s = generic(2, 2)
    q = s.ring
    G = gram_matrix(s, euclidean(2))
    assert G[0, 0] == q.parse("e1^2 + e2^2")
    assert G[1, 1] == q.parse("f1^2 + f2^2")
    assert G[0, 1] == G[1, 0] == q.parse("e1*f1 + e2*f2")


@pytest.mark.parametrize("kind", ["mutual", EXTENDED])
@pytest.mark.parametrize("seed", [1, 2])
def test_gram_against_coordinate_gram(kind, seed):
    # Diagonal entries and the determinant agree with X^T G(x0) X; the
    # off-diagonal entries only agree up to terms of degree >= 3.
    m = random_metric(2, 2, seed)
    s = generic(2, 2, kind)
    q = s.ring
    B = gram_matrix(s, m)
    C = coordinate_gram_matrix(s, m)
    assert B.is_symmetric() and C.is_symmetric()
    for i in range(2):
        assert B[i, i] == C[i, i]
    off = q.normal_form(B[0, 1] - C[0, 1])
    assert off.min_degree() >= 3
    assert q.ring_equal(det_ring(B), det_ring(C))


def test_gram_off_diagonal_not_entrywise_equal():
    m = random_metric(2, 2, 1)
    s = generic(2, 2)
    assert gram_matrix(s, m)[0, 1] != coordinate_gram_matrix(s, m)[0, 1]


# -- determinants ------------------------------------------------------------------


def test_det_identity():
    q = build_ideal(SimplexSpec(2, 2))
    one, zero = q.one(), q.zero()
    assert det_ring(PolyMatrix.from_rows([[one, zero], [zero, one]])) == 1


def test_det_equal_columns():
    q = build_ideal(SimplexSpec(2, 3))
    a, b, c = q.parse("e1 + 2"), q.parse("f2"), q.parse("h1*e2 - 1")
    M = PolyMatrix.from_rows([[a, a, b], [b, b, c], [c, c, a]])
    assert det_ring(M) == 0


def test_det_two_by_two():
    q = build_ideal(SimplexSpec(2, 2))
    a, b, c, d = (q.parse(t) for t in ("e1 + 1", "f2", "e2 - 3", "f1*e1"))
    assert det_ring(PolyMatrix.from_rows([[a, b], [c, d]])) == a * d - b * c


def test_det_non_square():
    q = build_ideal(SimplexSpec(2, 2))
    with pytest.raises(StructuralError):
        det_ring(PolyMatrix.from_rows([[q.one(), q.one()]]))


# -- square volumes ----------------------------------------------------------------


@pytest.mark.parametrize("metric", [euclidean(2), random_metric(2, 2, 2)])
def test_square_volume_k1_is_square_length(metric):
    s = generic(2, 1)
    assert square_volume(s, metric) == s.ring.normal_form(eval_g(metric, s.points[0], s.points[1]))


@pytest.mark.parametrize("i, j", [(0, 1), (0, 2), (1, 2)])
def test_square_volume_equal_vertices(i, j):
    s = generic(2, 2).specialized(i, j)
    assert square_volume(s, random_metric(2, 2, 1)).is_zero()


def test_square_volume_generic_nonzero():
    assert not square_volume(generic(2, 2), random_metric(2, 2, 1)).is_zero()


def test_euclidean_square_area():
    s = generic(2, 2)
    q = s.ring
    expected = q.normal_form(
        (q.parse("(e1^2 + e2^2)*(f1^2 + f2^2) - (e1*f1 + e2*f2)^2")) / 4
    )
    assert square_volume(s, euclidean(2)) == expected
    # e1^2*f2^2 == e2^2*f1^2 == -2*e1*e2*f1*f2 in the mutual ring
    assert expected == q.parse("3/4*e2^2*f1^2")


def test_square_volume_needs_k_le_n():
    with pytest.raises(UsageError):
        square_volume(generic(1, 2), euclidean(1))


def test_reordered_and_specialized_errors():
    s = generic(2, 2)
    with pytest.raises(StructuralError):
        s.reordered((0, 1, 1))
    with pytest.raises(StructuralError):
        s.specialized(1, 1)
    with pytest.raises(StructuralError):
        s.specialized(1, 0)


def test_instance_validates_points():
    q = build_ideal(SimplexSpec(2, 2))
    with pytest.raises(StructuralError):
        SimplexInstance(q, (q.vertex(0), q.vertex(1)))
    with pytest.raises(StructuralError):
        SimplexInstance(q, (q.vertex(0), q.vertex(1), q.vertex(2)[:1]))


# -- Heron ---------------------------------------------------------------------------


def test_heron_needs_triangle():
    with pytest.raises(UsageError):
        heron_square_area(generic(3, 3), euclidean(3))


@pytest.mark.parametrize("i, j", [(0, 1), (1, 2)])
def test_heron_degenerate_triangle(i, j):
    s = generic(2, 2).specialized(i, j)
    assert heron_square_area(s, random_metric(2, 2, 2)).is_zero()


def test_heron_euclidean_equals_gram():
    s = generic(2, 2)
    assert heron_square_area(s, euclidean(2)) == square_volume(s, euclidean(2))


@pytest.mark.parametrize("metric", [euclidean(2), random_metric(2, 2, 1)])
def test_heron_invariant_under_vertex_permutations(metric):
    s = generic(2, 2)
    ref = heron_square_area(s, metric)
    for order in itertools.permutations(range(3)):
        assert heron_square_area(s.reordered(order), metric) == ref


def test_heron_wrong_weight_is_detected():
    s = generic(2, 2)
    q = s.ring
    m = euclidean(2)
    e = s.points
    total = sum(
        (eval_g(m, e[a], e[b]) * eval_g(m, e[a], e[c]) for a, b, c in ((0, 1, 2), (1, 0, 2), (2, 0, 1))),
        q.zero(),
    )
    assert not q.ring_equal(total / 4, square_volume(s, m))
    assert q.ring_equal(total / 8, square_volume(s, m))


# -- volume form -----------------------------------------------------------------------


@pytest.mark.parametrize("metric", [euclidean(1), random_metric(1, 2, 1)])
def test_omega_squared_n1(metric):
    s = generic(1, 1, EXTENDED)
    expected = s.ring.normal_form(eval_g(metric, s.points[0], s.points[1]))
    assert omega_squared(s, metric) == expected
    assert square_volume(s, metric) == expected


def test_omega_squared_euclidean_n2():
    s = generic(2, 2, EXTENDED)
    q = s.ring
    assert omega_squared(s, euclidean(2)) == q.normal_form(q.parse("(e1*f2 - e2*f1)^2") / 4)


def test_omega_squared_needs_k_eq_n():
    with pytest.raises(UsageError):
        omega_squared(generic(3, 2), euclidean(3))
    with pytest.raises(UsageError):
        formal_volume_form(generic(3, 2))


def test_edge_matrix_columns():
    s = generic(2, 2)
    X = edge_matrix(s)
    assert X.column(0) == s.points[1] and X.column(1) == s.points[2]


def test_multilinear_component_examples():
    q = build_ideal(SimplexSpec(2, 2, EXTENDED))
    assert multilinear_component(q.parse("e1*f2 + e1^2*f1"), q) == q.parse("e1*f2")
    assert multilinear_component(q.parse("7"), q) == 0


def test_multilinear_component_of_volume_form():
    s = generic(2, 2, EXTENDED)
    q = s.ring
    w = formal_volume_form(s)
    assert multilinear_component(w, q) == w
    bent = w + w * q.parse("e1 + f1") + q.parse("e1^2")
    head = multilinear_component(bent, q)
    assert head == w
    assert q.ring_equal(head * head, w * w)


def test_multilinear_component_rejects_foreign_ring():
    with pytest.raises(StructuralError):
        multilinear_component(build_ideal(SimplexSpec(2, 1)).parse("e1"), build_ideal(SimplexSpec(2, 2)))
