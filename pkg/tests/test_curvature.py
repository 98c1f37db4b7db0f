import numpy as np
import pytest

from liegeo import (
    CriterionInapplicableError,
    MetricOperator,
    StructuredBasis,
    UnsupportedSplitError,
    beta_constants,
    biinv_form,
    block_einstein_constants,
    block_einstein_report,
    bracket,
    build_su_basis,
    cartan_condition_check,
    cheeger_sectional,
    misiolek_scan,
    misiolek_value,
    ricci_matrix,
    ricci_numeric,
    ricci_rigid_closed_form,
    sectional_numerator,
    sectional_numerator_arnold,
)


def test_biinvariant_sectional_is_quarter_bracket(su3, rng):
    m = MetricOperator.cheeger(su3, 0.0)
    for _ in range(20):
        u = su3.element(rng.standard_normal(su3.dim))
        v = su3.element(rng.standard_normal(su3.dim))
        br = bracket(u, v)
        assert sectional_numerator(m, u, v) == pytest.approx(
            0.25 * biinv_form(br, br), abs=1e-10
        )


def test_parallel_plane_degenerates(so3, rigid3, rng):
    u = so3.element(rng.standard_normal(3))
    assert sectional_numerator(rigid3, u, -2.5 * u) == pytest.approx(0.0, abs=1e-12)


def test_arnold_formula_agreement(so4, rng):
    m = MetricOperator.diagonal(so4, rng.uniform(0.5, 3.0, so4.dim))
    for _ in range(50):
        u = so4.element(rng.standard_normal(so4.dim))
        v = so4.element(rng.standard_normal(so4.dim))
        assert sectional_numerator(m, u, v) == pytest.approx(
            sectional_numerator_arnold(m, u, v), abs=1e-10
        )


def test_sectional_symmetric_in_arguments(so4, rng):
    m = MetricOperator.diagonal(so4, rng.uniform(0.5, 3.0, so4.dim))
    for _ in range(50):
        u = so4.element(rng.standard_normal(so4.dim))
        v = so4.element(rng.standard_normal(so4.dim))
        assert sectional_numerator(m, u, v) == pytest.approx(
            sectional_numerator(m, v, u), abs=1e-10
        )


def test_rigid_body_ricci_so3(so3, rigid3):
    closed = ricci_rigid_closed_form(3, mu=[1.0, 2.0, 3.0])
    assert np.allclose(closed, [0.2, 0.4, 1.0], atol=1e-14)
    res = ricci_matrix(rigid3)
    assert res.diagonality_residual < 1e-10
    assert np.allclose(np.diag(res.matrix), [0.2, 0.4, 1.0], atol=1e-10)


def test_ricci_closed_form_equal_moments():
    # mu = (1,1,1): single k-term (1)(1)/2 per diagonal entry
    assert np.allclose(ricci_rigid_closed_form(3, mu=[1.0, 1.0, 1.0]), 0.5)


def test_ricci_rigid_positive_random(rng):
    for n in (3, 4, 5):
        for _ in range(10):
            mu = rng.uniform(0.1, 10.0, n)
            assert np.all(ricci_rigid_closed_form(n, mu=mu) > 0)


def test_ricci_nonrigid_can_go_negative():
    # large l12 with l13 = l23 = 1 violates the rigid-body regime
    found = False
    for l12 in np.linspace(1.0, 10.0, 19):
        vals = ricci_rigid_closed_form(3, lam=[l12, 1.0, 1.0])
        if np.any(vals < 0):
            found = True
            break
    assert found


def test_abelian_ricci_vanishes(torus):
    m = MetricOperator.diagonal(torus, [1.0, 2.0])
    res = ricci_matrix(m)
    assert np.abs(res.matrix).max() < 1e-14


def test_ricci_numeric_matches_closed_form_so4(so4, rng):
    lam = rng.uniform(0.5, 3.0, so4.dim)
    m = MetricOperator.diagonal(so4, lam)
    res = ricci_matrix(m)
    assert res.diagonality_residual < 1e-10
    closed = ricci_rigid_closed_form(4, lam=lam)
    assert np.abs(np.diag(res.matrix) - closed).max() < 1e-10


def test_ricci_numeric_single_direction(so3, rigid3):
    e13 = so3.element_by_label("e13")
    assert ricci_numeric(rigid3, e13) == pytest.approx(0.4, abs=1e-10)


def test_cheeger_closed_forms(su3, rng):
    delta = 1.0
    m = MetricOperator.cheeger(su3, delta)
    split = su3.subalgebra_dim
    # u in h
    for _ in range(10):
        coords = np.zeros(su3.dim)
        coords[:split] = rng.standard_normal(split)
        u = su3.element(coords)
        v = su3.element(rng.standard_normal(su3.dim))
        assert cheeger_sectional(m, u, v) == pytest.approx(
            sectional_numerator(m, u, v), abs=1e-10
        )
    # u in h-perp: coefficient on |ad_u Qv|^2 is (1 - 3 delta)/4 = -0.5
    for _ in range(10):
        coords = np.zeros(su3.dim)
        coords[split:] = rng.standard_normal(su3.dim - split)
        u = su3.element(coords)
        v = su3.element(rng.standard_normal(su3.dim))
        assert cheeger_sectional(m, u, v) == pytest.approx(
            sectional_numerator(m, u, v), abs=1e-10
        )
    with pytest.raises(UnsupportedSplitError):
        cheeger_sectional(m, su3.element(np.ones(su3.dim)), v)


def test_cheeger_hperp_negative_coefficient(su3):
    # delta = 1: the h-perp/h-perp plane coefficient (1-3 delta)/4 = -0.5
    m = MetricOperator.cheeger(su3, 1.0)
    u = su3.element_by_label("s12")
    v = su3.element_by_label("s13")
    qbr = bracket(u, v)  # lands in h by the Cartan condition
    val = sectional_numerator(m, u, v)
    assert val == pytest.approx(-0.5 * biinv_form(qbr, qbr), abs=1e-12)
    assert val < 0


def _u1_split_su3():
    """su(3) reordered so h = span{d1}: a split without the Cartan condition."""
    full = build_su_basis(3)
    idx = full.labels.index("d1")
    order = [idx] + [i for i in range(full.dim) if i != idx]
    mats = [full.basis_matrices[i] for i in order]
    labels = [full.labels[i] for i in order]
    return StructuredBasis("su(3)/u(1)", mats, labels, subalgebra_dim=1)


def test_cartan_condition_check(su3):
    assert cartan_condition_check(su3)
    assert not cartan_condition_check(_u1_split_su3())


def test_remark_formula_without_cartan(rng):
    basis = _u1_split_su3()
    m = MetricOperator.cheeger(basis, 0.45)
    for _ in range(20):
        coords = np.zeros(basis.dim)
        coords[1:] = rng.standard_normal(basis.dim - 1)
        u = basis.element(coords)
        v = basis.element(rng.standard_normal(basis.dim))
        assert cheeger_sectional(m, u, v) == pytest.approx(
            sectional_numerator(m, u, v), abs=1e-10
        )


def test_beta_constants(su3, su2):
    bg, bh = beta_constants(su3)
    assert bg == pytest.approx(12.0, abs=1e-12)   # 4n at n = 3
    assert bh == pytest.approx(2.0, abs=1e-12)    # 2(n-2) for so(3)
    bg2, bh2 = beta_constants(su2)
    assert bg2 == pytest.approx(8.0, abs=1e-12)
    assert bh2 == pytest.approx(0.0, abs=1e-12)   # so(2) is abelian


def test_block_einstein_constants_delta_zero():
    c1, c2 = block_einstein_constants(12.0, 2.0, 0.0)
    assert c1 == c2 == 3.0  # bi-invariant Einstein case: beta_G / 4


def test_block_einstein_report(su3):
    for delta in (-2.0 / 3.0, -0.3, 0.5):
        m = MetricOperator.cheeger(su3, delta)
        rep = block_einstein_report(m)
        assert rep["residual"] < 1e-9
        assert rep["C2"] == pytest.approx((1 - delta) * 3.0, abs=1e-12)
    zeitlin = block_einstein_report(MetricOperator.cheeger(su3, -2.0 / 3.0))
    assert zeitlin["C2"] == pytest.approx(5.0, abs=1e-10)


def test_zeitlin_c2_against_numeric(su3):
    m = MetricOperator.cheeger(su3, -2.0 / 3.0)
    s12 = su3.element_by_label("s12")  # h-perp unit vector
    assert ricci_numeric(m, s12) == pytest.approx(5.0, abs=1e-10)


def test_misiolek_values(so3, rigid3, rng):
    e12 = so3.element_by_label("e12")
    e23 = so3.element_by_label("e23")
    # largest eigenvalue direction: scan finds a negative value
    scan = misiolek_scan(rigid3, e23, seed=1)
    assert scan.minimum < 0 and scan.detected
    # smallest eigenvalue direction: (Lambda - lambda I) is PSD on the range
    scan = misiolek_scan(rigid3, e12, seed=1)
    assert scan.minimum >= -1e-12 and not scan.detected
    # v in the kernel of L gives exactly zero
    assert misiolek_value(rigid3, e12, e12) == pytest.approx(0.0, abs=1e-14)


def test_misiolek_quadratic_form(so3, rigid3, rng):
    # eigenvector case: value equals <(Lambda - lambda) L v, L v>
    e13 = so3.element_by_label("e13")
    lam = 2.0
    from liegeo.algebra import ad_matrix_raw

    for _ in range(20):
        v = rng.standard_normal(3)
        lv = ad_matrix_raw(so3, e13.coords) @ v
        expected = float(((rigid3.diag - lam) * lv) @ lv)
        assert misiolek_value(rigid3, e13, so3.element(v)) == pytest.approx(
            expected, abs=1e-12
        )


def test_misiolek_negative_implies_positive_curvature(so3, rigid3, rng):
    e23 = so3.element_by_label("e23")
    for _ in range(200):
        v = so3.element(rng.standard_normal(3))
        if misiolek_value(rigid3, e23, v) < 0:
            assert sectional_numerator(rigid3, e23, v) > 0


def test_misiolek_rejects_nonsteady(so3, rigid3):
    u0 = so3.element([1.0, 0.0, 1.0])
    with pytest.raises(CriterionInapplicableError):
        misiolek_value(rigid3, u0, so3.element([0.0, 1.0, 0.0]))
