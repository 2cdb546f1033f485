import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaussnet.classify import CanonicalForm, canonical_array
from gaussnet.errors import InvalidArgumentError
from gaussnet.measure import closed_form, ggqc, m_value, enumerate_bipartitions
from gaussnet.network import (
    Designed,
    NetworkSpec,
    Operation,
    Source,
    Squeezer,
    Standardized,
    attain_threshold,
    build_initial_state,
    chain_example,
    check_sufficiency,
    condition_threshold,
    design_optimal,
    run_protocol,
    standardize_boundary,
    star_example,
    table_threshold,
    tritter_squeezer_cosh2_bound,
    two_mode_squeezer,
    type_iv_condition,
    verify_network,
)
from gaussnet.states import random_state, tritter_coefficients, tritter_state, two_mode_pure
from gaussnet.symplectic import random_symplectic, validate_cm

GAMMAS = [1.0, 1.2, 2.0, 5.0]


def test_two_pure_sources_block_diagonal():
    spec = NetworkSpec([Source("two_mode_pure", {"gamma": 2}), Source("two_mode_pure", {"gamma": 3})])
    cm = build_initial_state(spec).cm
    assert cm.shape == (8, 8)
    assert np.all(cm[:4, 4:] == 0)


def test_three_tritters_make_nine_modes():
    spec = chain_example(0.5)
    s = build_initial_state(spec)
    assert s.n == 9
    assert abs(ggqc(s).value) <= 1e-12


def test_empty_operations_leave_state():
    spec = NetworkSpec([Source("tritter", {"gamma": 0.3})])
    s = build_initial_state(spec)
    out, records = run_protocol(s, spec)
    np.testing.assert_array_equal(out.cm, s.cm)
    assert records == []


def test_chain_structure():
    spec = chain_example(0.5)
    assert len(spec.operations) == 2
    assert [op.modes for op in spec.operations] == [(2, 3), (5, 6)]


def test_star_shares_a_mode():
    a, b = (op.modes for op in star_example(0.5).operations)
    assert len(set(a) & set(b)) == 1


def test_chain_result_is_valid():
    out, _ = run_protocol(build_initial_state(chain_example(0.5)), chain_example(0.5))
    validate_cm(out.cm, 1e-8)
    assert np.linalg.det(out.cm) == pytest.approx(1.0, abs=1e-8)


def test_star_order_matters():
    S = random_symplectic(2, 4)
    ops = [Operation((2, 3), S), Operation((2, 6), S)]
    base = NetworkSpec([Source("tritter", {"gamma": 0.5})] * 3, ops)
    swapped = base.with_operations(ops[::-1])
    s = build_initial_state(base)
    a, _ = run_protocol(s, base)
    b, _ = run_protocol(s, swapped)
    validate_cm(a.cm)
    validate_cm(b.cm)
    assert np.max(np.abs(a.cm - b.cm)) > 1e-3


def test_identity_operations_give_zero():
    spec = chain_example(0.5, np.eye(4))
    assert abs(verify_network(spec).resultant_ggqc) <= 1e-12


def test_standardize_isotropic_mode():
    s = two_mode_pure(2.0)
    out, u = standardize_boundary(s, 0)
    np.testing.assert_allclose(u.S, np.eye(4), atol=1e-15)


@pytest.mark.parametrize("g", [0.2, 0.5, 1.0])
def test_tritter_boundary_mixedness(g):
    out, _ = standardize_boundary(tritter_state(g), 2)
    rp, rm, _ = tritter_coefficients(g)
    expected = np.sqrt(5 + 4 * np.cosh(4 * g)) / 3
    assert np.sqrt(rp * rm) == pytest.approx(expected, rel=1e-14)
    np.testing.assert_allclose(out.block(2), expected * np.eye(2), rtol=1e-12)


@pytest.mark.parametrize("seed", range(20))
def test_random_boundary_isotropy(seed):
    s = random_state(4, seed)
    m = seed % 4
    out, _ = standardize_boundary(s, m)
    g = np.sqrt(np.linalg.det(s.block(m)))
    assert np.max(np.abs(out.block(m) - g * np.eye(2))) <= 1e-9


# -- thresholds and the determinant check -----------------------------------


@pytest.mark.parametrize("g", GAMMAS)
def test_type_one_unit_outgoing_needs_nothing(g):
    assert table_threshold("I", 1.0, g) == 0.0


@pytest.mark.parametrize("g", GAMMAS)
def test_type_one_equal_boundaries(g):
    assert table_threshold("I", g, g) == pytest.approx((np.sqrt(g) - 1) / 2, abs=1e-14)


def test_type_four_vacuum_condition():
    holds, lhs, rhs = type_iv_condition(0.0, 0.0, 1.0, 1.0)
    assert holds and lhs == rhs == 1.0


@pytest.mark.parametrize("lam", [0.1, 1.0, 3.0])
def test_vacuum_boundaries_always_pass(lam):
    assert check_sufficiency(canonical_array("I", lam), 1.0, 1.0).holds


@pytest.mark.parametrize("g1", GAMMAS)
@pytest.mark.parametrize("g2", GAMMAS)
@pytest.mark.parametrize("kind", ["I", "II"])
def test_threshold_is_equality(kind, g1, g2):
    thr = table_threshold(kind, g1, g2)
    if kind == "I" and thr <= 0:
        pytest.skip("no positive threshold")
    suff = check_sufficiency(canonical_array(kind, np.sqrt(thr)), g1, g2)
    assert suff.relative_gap <= 1e-8


@pytest.mark.parametrize("g2", [1.2, 2.0, 5.0])
def test_half_threshold_fails(g2):
    thr = table_threshold("I", g2, g2)
    assert not check_sufficiency(canonical_array("I", np.sqrt(thr / 2)), g2, g2).holds


@pytest.mark.parametrize("g1", GAMMAS)
@pytest.mark.parametrize("g2", GAMMAS)
def test_condition_threshold_type_three(g1, g2):
    thr = condition_threshold("III", g1, g2)
    suff = check_sufficiency(canonical_array("III", np.sqrt(max(thr, 0))), g1, g2)
    if thr > 0:
        assert suff.relative_gap <= 1e-8
        assert not check_sufficiency(canonical_array("III", np.sqrt(thr) * 0.99), g1, g2).holds
    assert check_sufficiency(canonical_array("III", np.sqrt(max(thr, 0)) * 1.01 + 1e-9), g1, g2).holds


def test_tabulated_type_three_threshold_is_negative_on_symmetric_grid():
    # the tabulated formula mixes (g1+g2)^2 and g1^2+g2^2
    for g in GAMMAS:
        assert table_threshold("III", g, g) < 0 < condition_threshold("III", g, g) or g == 1.0


@pytest.mark.parametrize("g1", GAMMAS)
@pytest.mark.parametrize("g2", GAMMAS)
def test_type_four_design_meets_condition(g1, g2):
    d = design_optimal("IV", g1, g2, margin=0.0)
    l1, l2 = d.form.params
    holds, lhs, rhs = type_iv_condition(l1, l2, g1, g2)
    assert abs(lhs - rhs) <= 1e-8 * rhs
    suff = check_sufficiency(canonical_matrix_of(d), g1, g2)
    assert suff.relative_gap <= 1e-8


def canonical_matrix_of(design):
    return canonical_array(design.form.kind, *design.form.params)


@pytest.mark.parametrize("kind", ["V", "VI", "VII"])
def test_design_rejects_untabulated(kind):
    with pytest.raises(InvalidArgumentError):
        design_optimal(kind, 2.0, 2.0)


def test_attain_rule_is_type_one_only():
    with pytest.raises(InvalidArgumentError):
        design_optimal("II", 2.0, 2.0, rule="attain")


def test_design_margin():
    d = design_optimal("I", 2.0, 1.5, margin=1e-6)
    assert d.form.lam**2 == pytest.approx(d.threshold * (1 + 1e-6), rel=1e-14)


def test_zero_threshold_design():
    d = design_optimal("I", 1.0, 3.0)
    assert d.threshold == 0.0
    assert d.form.lam > 0


def test_attain_threshold_symmetric_value():
    g = 1.7
    assert attain_threshold(g, g) == pytest.approx((g - 1) / (g * g + 1))


# -- squeezer ---------------------------------------------------------------


def test_squeezer_zero_is_identity():
    np.testing.assert_array_equal(two_mode_squeezer(0.0), np.eye(4))


@pytest.mark.parametrize("xi", [0.1, 0.6])
def test_squeezer_equals_type_one_sinh(xi):
    np.testing.assert_allclose(two_mode_squeezer(xi), canonical_array("I", np.sinh(xi)), atol=1e-15)


def test_cosh_bound_is_vacuous_for_moderate_squeezing():
    for g in [0.2, 0.5]:
        assert tritter_squeezer_cosh2_bound(g) < 1


# -- bound and attainment ---------------------------------------------------


def test_bound_is_smallest_source():
    spec = NetworkSpec(
        [Source("two_mode_pure", {"gamma": 1.5}), Source("tritter", {"gamma": 0.5})],
        [Operation((1, 2), Designed("I", "attain"))],
    )
    rep = verify_network(spec)
    assert rep.bound == min(closed_form("two_mode_pure", 1.5), closed_form("tritter", 0.5))
    assert abs(rep.gap) <= 1e-6


@pytest.mark.parametrize("factory", [chain_example, star_example])
@pytest.mark.parametrize("gamma", [0.2, 0.5, 1.0])
def test_attain_rule_reaches_bound(factory, gamma):
    rep = verify_network(factory(gamma, Designed("I", "attain")))
    assert abs(rep.gap) <= 1e-6


@pytest.mark.parametrize("gamma", [0.2, 0.5])
def test_table_rule_falls_short_for_weak_squeezing(gamma):
    # the determinant check passes, yet the merging cut still limits the result
    rep = verify_network(chain_example(gamma, Designed("I", "table")))
    assert all(rep.eq9_ok)
    assert rep.gap > 0.05


def test_determinant_check_not_necessary():
    # strong squeezing: the resultant reaches the bound although the check fails
    g = np.sqrt(np.prod(tritter_coefficients(1.0)[:2]))
    lam = np.sqrt(attain_threshold(g, g) * 1.001)
    rep = verify_network(chain_example(1.0, Standardized("I", (lam,))))
    assert abs(rep.gap) <= 1e-6
    assert not any(rep.eq9_ok)


@pytest.mark.parametrize("gamma", [0.3, 0.6])
def test_attain_rule_is_minimal(gamma):
    g = np.sqrt(np.prod(tritter_coefficients(gamma)[:2]))
    lam = np.sqrt(attain_threshold(g, g) * 0.98)
    assert verify_network(chain_example(gamma, Standardized("I", (lam,)))).gap > 1e-4


@pytest.mark.parametrize("seed", range(25))
def test_upper_bound_random_operations(seed):
    rng = np.random.default_rng(seed)
    ops = [random_symplectic(2, int(rng.integers(2**31))) for _ in range(2)]
    spec = chain_example(0.5)
    spec = spec.with_operations(Operation(op.modes, S) for op, S in zip(spec.operations, ops))
    rep = verify_network(spec)
    assert rep.resultant_ggqc <= rep.bound + 1e-9


@pytest.mark.parametrize("gamma", [0.2, 0.5])
def test_every_cut_above_bound_after_attaining_design(gamma):
    spec = chain_example(gamma, Designed("I", "attain"))
    final, _ = run_protocol(build_initial_state(spec), spec)
    bound = closed_form("tritter", gamma)
    for part in enumerate_bipartitions(final.n):
        assert m_value(final, part.modes) >= bound - 1e-8


def test_pure_chain_stays_pure():
    spec = NetworkSpec([Source("two_mode_pure", {"gamma": 2.0})] * 3,
                       [Operation((1, 2), Squeezer(0.4)), Operation((3, 4), CanonicalForm("II", (1.3,)))])
    final, _ = run_protocol(build_initial_state(spec), spec)
    assert np.linalg.det(final.cm) == pytest.approx(1.0, abs=1e-8)


def test_same_source_operation_flagged():
    spec = NetworkSpec([Source("tritter", {"gamma": 0.5})] * 2,
                       [Operation((0, 1), Squeezer(0.3)), Operation((2, 3), Squeezer(0.3)), Operation((1, 4), Squeezer(0.3))])
    _, records = run_protocol(build_initial_state(spec), spec)
    assert [r.in_scope for r in records] == [False, True, False]


def test_operation_needs_distinct_modes():
    with pytest.raises(InvalidArgumentError):
        Operation((2, 2), np.eye(4))


def test_operation_out_of_range():
    spec = NetworkSpec([Source("tritter", {"gamma": 0.5})], [Operation((0, 5), np.eye(4))])
    with pytest.raises(InvalidArgumentError):
        run_protocol(build_initial_state(spec), spec)


def test_single_mode_sources_leave_no_bound():
    spec = NetworkSpec([Source("random", {"n": 1, "seed": 0})] * 2, [Operation((0, 1), Squeezer(0.3))])
    with pytest.raises(InvalidArgumentError):
        verify_network(spec)


def test_report_serializes_one_based():
    d = verify_network(chain_example(0.5)).to_dict()
    assert d["operations"][0]["modes"] == [3, 4]
    assert set(d) >= {"bound", "resultant_ggqc", "gap", "eq9_ok"}


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31), st.integers(2, 3), st.integers(2, 3))
def test_attain_rule_random_pure_sources(seed, n1, n2):
    rng = np.random.default_rng(seed)
    spec = NetworkSpec(
        [Source("random", {"n": n1, "seed": seed, "pure": True}), Source("random", {"n": n2, "seed": seed + 1, "pure": True})],
        [Operation((int(rng.integers(n1)), n1 + int(rng.integers(n2))), Designed("I", "attain"))],
    )
    assert abs(verify_network(spec).gap) <= 1e-6
