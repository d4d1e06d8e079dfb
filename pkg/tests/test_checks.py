import pytest
from hypothesis import given
from hypothesis import strategies as st

from infvol import EXTENDED, Poly, SimplexInstance, SimplexSpec, StructuralError, UsageError, build_ideal
from infvol import checks
from infvol.checks import (
    CHECK_NAMES,
    FAIL,
    PASS,
    REPORT_ONLY,
    CheckReport,
    Instance,
    check_alternating,
    check_bullet_approximation,
    check_extension_independence,
    check_gram_reduction,
    check_symmetry,
    check_vanish_on_first_neighbours,
    check_volume_form_identity,
    exit_code,
    experiment_heron_vs_gram,
    pair_table,
    random_diagonal_vanishing,
    run_suite,
    swap_arguments,
)
from infvol.config import MetricDescriptor, RunConfig
from infvol.metric import euclidean, random_metric
from infvol.volumes import gram_matrix, square_volume


def pair_poly(n, text):
    return Poly.parse(text, pair_table(n))


# -- alternating -------------------------------------------------------------------


def test_alternating_linear():
    r = check_alternating(2, 0, f=pair_poly(2, "y1 - x1"))
    assert r.status == PASS and r.residual == "0"


def test_alternating_square_length():
    r = check_alternating(2, 0, f=pair_poly(2, "(y1 - x1)^2 + (y2 - x2)^2"))
    assert r.passed


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("seed", [1, 2])
def test_alternating_random(n, seed):
    assert check_alternating(n, seed).passed


def test_alternating_detects_nonvanishing_diagonal():
    r = check_alternating(1, 0, f=pair_poly(1, "x1 + y1"))
    assert r.status == FAIL
    assert r.residual.startswith("f(x,x): 2*x1")


def test_alternating_rejects_foreign_table():
    with pytest.raises(StructuralError):
        check_alternating(2, 0, f=pair_poly(3, "y1 - x1"))


def test_random_diagonal_vanishing_shape():
    f = random_diagonal_vanishing(2, 5)
    x = Poly.block_vector(f.table, 0)
    assert checks.evaluate_pair(f, x, x).is_zero()
    assert swap_arguments(swap_arguments(f)) == f
    assert random_diagonal_vanishing(2, 5) == f


# -- individual checks -------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3])
def test_bullet_approximation_euclidean(n):
    assert check_bullet_approximation(n, euclidean(n)).passed


@pytest.mark.parametrize("d", [1, 2])
def test_bullet_approximation_random(d):
    assert check_bullet_approximation(2, random_metric(2, d, 3), 3).passed


@pytest.mark.parametrize("kind", ["mutual", EXTENDED])
def test_gram_reduction_n2(kind):
    assert check_gram_reduction(2, 2, kind, euclidean(2)).passed
    assert check_gram_reduction(2, 2, kind, random_metric(2, 2, 1), 1).passed


def test_symmetry_small():
    assert check_symmetry(2, 1, euclidean(2)).passed
    assert check_symmetry(2, 2, random_metric(2, 2, 1), 1).passed


def test_reordering_changes_gram_entries():
    # the symmetry check is not vacuous: a reordered simplex has a different
    # Gram matrix, only its determinant is invariant
    m = random_metric(2, 2, 1)
    q = build_ideal(SimplexSpec(2, 2))
    s = SimplexInstance.generic(q)
    moved = s.reordered((1, 0, 2))
    assert gram_matrix(s, m)[1, 1] != gram_matrix(moved, m)[1, 1]
    assert square_volume(s, m) == square_volume(moved, m)


@pytest.mark.parametrize("pair", [(0, 1), (0, 2), (1, 2)])
def test_vanish_on_first_neighbours(pair):
    assert check_vanish_on_first_neighbours(2, 2, euclidean(2), pair=pair).passed


def test_vanish_invalid_pair():
    with pytest.raises(StructuralError):
        check_vanish_on_first_neighbours(2, 2, euclidean(2), pair=(1, 3))
    with pytest.raises(StructuralError):
        check_vanish_on_first_neighbours(2, 2, euclidean(2), pair=(1, 1))


def test_extension_independence():
    assert check_extension_independence(2, 2, euclidean(2), [1]).passed
    with pytest.raises(UsageError):
        check_extension_independence(2, 2, euclidean(2), [])


def test_volume_form_identity_small():
    for n in (1, 2):
        assert check_volume_form_identity(n, euclidean(n)).passed
        assert check_volume_form_identity(n, random_metric(n, 2, 1), 1).passed


def test_heron_experiment_is_report_only():
    r = experiment_heron_vs_gram(2, euclidean(2))
    assert r.status == REPORT_ONLY and r.residual == "0"
    with pytest.raises(UsageError):
        experiment_heron_vs_gram(1, euclidean(1))


# -- suite ---------------------------------------------------------------------------


def test_empty_check_list():
    assert run_suite(RunConfig(checks=())) == []


def test_suite_statuses_and_provenance():
    config = RunConfig(n_values=(1, 2), k_values=(1, 2), seeds=(1,))
    reports = run_suite(config)
    assert {r.check_name for r in reports} == set(CHECK_NAMES)
    assert all(r.status in (PASS, REPORT_ONLY) for r in reports)
    assert all(r.provenance == config.digest() for r in reports)
    assert reports == sorted(reports, key=lambda r: (r.check_name, r.instance.sort_key()))


def test_suite_skips_k_above_n(caplog):
    config = RunConfig(checks=("check_symmetry",), n_values=(1,), k_values=(1, 2),
                       metrics=(MetricDescriptor("builtin", "euclidean"),))
    with caplog.at_level("INFO", logger="infvol.checks"):
        reports = run_suite(config)
    assert [(r.instance.n, r.instance.k) for r in reports] == [(1, 1)]
    assert "skipping k=2 > n=1" in caplog.text


def test_suite_captures_errors(monkeypatch):
    def boom(*args, **kwargs):
        raise StructuralError("broken instance")

    monkeypatch.setattr(checks, "check_symmetry", boom)
    config = RunConfig(checks=("check_symmetry",), n_values=(2,), k_values=(1,),
                       metrics=(MetricDescriptor("builtin", "euclidean"),))
    (report,) = run_suite(config)
    assert report.status == FAIL
    assert report.residual == "error: StructuralError: broken instance"


def test_suite_pads_extension_seeds():
    config = RunConfig(checks=("check_extension_independence",), n_values=(2,), k_values=(2,),
                       metrics=(MetricDescriptor("builtin", "euclidean"),), seeds=(4,))
    (report,) = run_suite(config)
    assert report.instance.detail == "seeds=4,5"


def test_inline_metric_only_for_its_dimension():
    inline = MetricDescriptor("inline", "w", 2, ((1, 1, "1 + x2"), (2, 2, "1")))
    config = RunConfig(checks=("check_bullet_approximation",), n_values=(1, 2, 3),
                       metrics=(inline,))
    reports = run_suite(config)
    assert [(r.instance.n, r.instance.metric) for r in reports] == [(2, "inline:w")]


def test_instance_label():
    assert Instance(2, 2, "euclidean", 1, "mutual").label() == "n=2 k=2 euclidean seed=1 mutual"
    assert Instance(3, 1, "-").label() == "n=3 k=1 -"


statuses = st.sampled_from([PASS, FAIL, REPORT_ONLY])
report_lists = st.lists(statuses, max_size=12).map(
    lambda ss: [CheckReport("c", Instance(1, 1, "m"), s, "0" if s == PASS else "x1", 0.0) for s in ss]
)


@given(report_lists)
def test_exit_code_contract(reports):
    expected = 1 if any(r.status == FAIL for r in reports) else 0
    assert exit_code(reports) == expected
