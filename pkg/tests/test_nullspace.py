import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import framesens as fs
from framesens.errors import (
    CofactorOrderLimit,
    DeficiencyZero,
    ToleranceAmbiguity,
    ZeroVector,
)

from conftest import random_rank_deficient


def test_rank_profile_diag():
    profile = fs.rank_profile(np.diag([5.0, 0.0, 0.0]), 1e-8)
    assert profile.rank == 1
    assert profile.deficiency == 2
    assert profile.minor_rows == (0,)
    assert profile.minor_cols == (0,)
    np.testing.assert_allclose(profile.singular_values, [5.0, 0.0, 0.0])


def test_rank_profile_zero_matrix():
    profile = fs.rank_profile(np.zeros((3, 3)), 1e-8)
    assert profile.rank == 0
    assert profile.deficiency == 3
    assert profile.minor_rows == () and profile.minor_cols == ()


def test_rank_profile_two_parameter_instance():
    M = fs.corpus("ex8").system.evaluate([1.0, 1.0]).matrix
    profile = fs.rank_profile(M, 1e-8)
    assert profile.rank == 1
    assert profile.minor_rows == (0,) and profile.minor_cols == (0,)
    np.testing.assert_allclose(profile.singular_values, [2.0, 0.0], atol=1e-15)


def test_rank_profile_recovers_construction_rank():
    rng = np.random.default_rng(7)
    for n in (3, 5, 8):
        for r in range(n + 1):
            M = random_rank_deficient(rng, n, r)
            smax = np.linalg.norm(M, 2)
            tol = 1e-8 * smax if smax > 0 else 1e-8
            profile = fs.rank_profile(M, tol)
            assert profile.rank == r, f"n={n} r={r}"


def test_rank_profile_minor_is_nonsingular():
    rng = np.random.default_rng(11)
    for n, r in ((4, 2), (6, 4), (9, 5)):
        M = random_rank_deficient(rng, n, r)
        profile = fs.rank_profile(M)
        minor = M[np.ix_(profile.minor_rows, profile.minor_cols)]
        assert np.linalg.svd(minor, compute_uv=False)[-1] > profile.tol


def test_tolerance_ambiguity_warning():
    with pytest.warns(ToleranceAmbiguity):
        fs.rank_profile(np.diag([1.0, 1e-8]), 1e-8)
    # exact zeros sit below the ambiguity band
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("error", ToleranceAmbiguity)
        fs.rank_profile(np.diag([1.0, 0.0]), 1e-8)


def test_rank_profile_validates_inputs():
    with pytest.raises(ValueError):
        fs.rank_profile(np.diag([1.0, 0.0]), -1.0)
    with pytest.raises(ValueError):
        fs.rank_profile(np.array([[np.inf, 0.0], [0.0, 0.0]]))


def test_cofactor_diag_family():
    # direction is e2 for every eps != 0, from the cofactor (0, eps, 0)
    for eps in (0.5, 1.0, 2.0, -3.0):
        M = np.diag([eps, 0.0, 0.0])
        profile = fs.rank_profile(M)
        f = fs.cofactor_null_vector(M, profile)
        np.testing.assert_allclose(f, [0.0, eps, 0.0], atol=1e-15)
        np.testing.assert_allclose(fs.normalize(f), [0.0, 1.0, 0.0])


@pytest.mark.parametrize("point", [(1.0, 1.0), (2.0, 1.0), (1.0, 3.0), (0.3, -0.7)])
def test_cofactor_matches_closed_form_direction(point):
    e1, e2 = point
    M = fs.corpus("ex8").system.evaluate([e1, e2]).matrix
    f = fs.cofactor_null_vector(M, fs.rank_profile(M))
    expected = np.array([e1**2 - e2**2, 2.0 * e1 * e2])
    cos = abs(f @ expected) / (np.linalg.norm(f) * np.linalg.norm(expected))
    assert cos >= 1.0 - 1e-12


def test_cofactor_degenerate_base_case():
    M = np.zeros((1, 1))
    f = fs.cofactor_null_vector(M, fs.rank_profile(M))
    np.testing.assert_array_equal(f, [1.0])


def test_cofactor_component_equals_minor_determinant():
    rng = np.random.default_rng(3)
    for n, r in ((2, 1), (4, 2), (5, 4), (6, 3)):
        M = random_rank_deficient(rng, n, r)
        profile = fs.rank_profile(M)
        f = fs.cofactor_null_vector(M, profile)
        col_perm = list(profile.minor_cols) + [
            j for j in range(n) if j not in profile.minor_cols
        ]
        minor_det = np.linalg.det(M[np.ix_(profile.minor_rows, profile.minor_cols)])
        assert abs(f[col_perm[r]] - minor_det) <= 1e-10 * abs(minor_det)


def test_cofactor_residual_bound():
    rng = np.random.default_rng(5)
    for n, r in ((3, 2), (5, 3), (8, 6)):
        M = random_rank_deficient(rng, n, r)
        profile = fs.rank_profile(M)
        f = fs.cofactor_null_vector(M, profile)
        assert np.linalg.norm(M @ f) <= 10.0 * profile.tol * np.linalg.norm(f)


def test_cofactor_rejects_full_rank_and_big_orders():
    with pytest.raises(DeficiencyZero):
        fs.cofactor_null_vector(np.eye(3), fs.rank_profile(np.eye(3)))
    big = np.zeros((13, 13))
    with pytest.raises(CofactorOrderLimit):
        fs.cofactor_null_vector(big, fs.rank_profile(big))
    f = fs.cofactor_null_vector(big, fs.rank_profile(big), max_order=13)
    np.testing.assert_array_equal(f, np.eye(13)[0])


def test_normalize_examples():
    np.testing.assert_allclose(fs.normalize([0.0, -3.0, 0.0]), [0.0, 1.0, 0.0])
    np.testing.assert_allclose(fs.normalize([3.0, 4.0]), [0.6, 0.8])
    np.testing.assert_allclose(fs.normalize([0.0, 2.0]), [0.0, 1.0])
    with pytest.raises(ZeroVector):
        fs.normalize(np.zeros(4))


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=1, max_size=6).filter(
        lambda v: any(x != 0.0 for x in v)
    ),
    st.sampled_from([-1000.0, -3.0, -1.0, -0.5, 0.5, 1.0, 2.0, 1000.0]),
)
def test_normalize_idempotent_and_scale_invariant(components, alpha):
    f = np.array(components)
    unit = fs.normalize(f)
    assert abs(np.linalg.norm(unit) - 1.0) <= 1e-12
    np.testing.assert_allclose(fs.normalize(unit), unit, atol=1e-14)
    np.testing.assert_allclose(fs.normalize(alpha * f), unit, atol=1e-14)


def test_null_basis_examples():
    basis = fs.null_basis(np.diag([5.0, 0.0, 0.0]))
    assert len(basis) == 2
    # spans {e2, e3}; the order of the tied zero singular values is free
    projector = sum(np.outer(v, v) for v in basis)
    np.testing.assert_allclose(projector, np.diag([0.0, 1.0, 1.0]), atol=1e-14)
    assert fs.null_basis(np.eye(4)) == []
    only = fs.null_basis(np.array([[0.0, -1.0], [0.0, 0.0]]))
    assert len(only) == 1
    np.testing.assert_allclose(only[0], [1.0, 0.0])


def test_null_basis_invariants():
    rng = np.random.default_rng(13)
    for n, r in ((4, 1), (6, 3), (9, 7)):
        M = random_rank_deficient(rng, n, r)
        tol = fs.default_tolerance(M)
        basis = fs.null_basis(M, tol)
        assert len(basis) == n - r
        G = np.array([[vi @ vj for vj in basis] for vi in basis])
        assert np.abs(G - np.eye(n - r)).max() <= 1e-12
        for v in basis:
            assert np.linalg.norm(M @ v) <= 10.0 * tol


def test_cofactor_and_basis_agree_for_single_deficiency(worked_family):
    cases = [
        worked_family.evaluate([0.7]).matrix,
        fs.corpus("ex8").system.evaluate([1.3, -0.4]).matrix,
    ]
    for M in cases:
        profile = fs.rank_profile(M)
        direction = fs.normalize(fs.cofactor_null_vector(M, profile))
        (v,) = fs.null_basis(M)
        assert abs(direction @ v) >= 1.0 - 1e-10


def test_rank_profile_rectangular_augmented():
    M = np.array([[1.0, 1.0], [1.0, 1.0]])
    aug = np.column_stack([M, np.array([1.0, 0.0])])
    profile = fs.rank_profile(aug, 1e-10)
    assert profile.rank == 2
    assert profile.deficiency == 1
    assert len(profile.singular_values) == 2
