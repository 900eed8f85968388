import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st

from qugauge.dynamics import MixingConfig, build_mixed_basis
from qugauge.linalg2 import (
    IDENTITY,
    KET0,
    KET1,
    SIGMA1,
    DomainError,
    apply,
    exp_sigma1,
    inner,
    is_hermitian,
    is_unitary,
    ket,
    outer,
)

finite = st.floats(-10, 10, allow_nan=False)


def unit_ket(a, b, c, d):
    v = np.array([a + 1j * b, c + 1j * d])
    n = np.linalg.norm(v)
    return v / n if n > 1e-3 else KET0.copy()


def test_inner_orthonormal_basis():
    assert inner(KET0, KET0) == 1
    assert inner(KET0, KET1) == 0


def test_inner_mixed_pair_orthogonal():
    d = build_mixed_basis(MixingConfig(math.pi / 6))
    assert abs(inner(d.phi, d.psi)) < 1e-15


def test_inner_conjugates_first_argument():
    a = ket(1j, 0)
    assert inner(a, KET0) == pytest.approx(-1j)


@given(st.lists(finite, min_size=8, max_size=8))
def test_inner_hermitian_symmetry_and_bound(x):
    a, b = unit_ket(*x[:4]), unit_ket(*x[4:])
    assert inner(a, b) == pytest.approx(np.conj(inner(b, a)), abs=1e-15)
    assert abs(inner(a, b)) <= 1 + 1e-12
    assert abs(inner(a, a) - 1) <= 1e-12


def test_outer_projectors():
    np.testing.assert_array_equal(outer(KET0, KET0), np.diag([1, 0]))
    np.testing.assert_array_equal(outer(KET1, KET1), np.diag([0, 1]))
    h = 1.0 * outer(KET0, KET0) + 2.0 * outer(KET1, KET1)
    np.testing.assert_array_equal(h, np.diag([1, 2]))


def test_outer_trace_is_one_for_unit_ket():
    v = ket(0.6, 0.8j)
    assert np.trace(outer(v, v)) == pytest.approx(1.0, abs=1e-15)


def test_apply():
    np.testing.assert_array_equal(apply(IDENTITY, KET0), KET0)
    np.testing.assert_array_equal(apply(SIGMA1, KET0), KET1)
    v = np.array([1, 1]) / math.sqrt(2)
    np.testing.assert_allclose(apply(np.diag([1, 2]), v), np.array([1, 2]) / math.sqrt(2))


def test_apply_does_not_renormalize():
    out = apply(np.diag([1, 2]), KET1)
    assert np.linalg.norm(out) == 2


@pytest.mark.parametrize(
    "a, expected",
    [
        (0.0, IDENTITY),
        (math.pi, -IDENTITY),
        (math.pi / 2, -1j * SIGMA1),
    ],
)
def test_exp_sigma1_special_values(a, expected):
    np.testing.assert_allclose(exp_sigma1(a), expected, atol=1e-15)


@given(st.floats(-10, 10))
def test_exp_sigma1_matches_matrix_exponential(a):
    # scipy's Pade expm is independent of the closed form
    np.testing.assert_allclose(exp_sigma1(a), scipy.linalg.expm(-1j * a * SIGMA1), atol=1e-13)


@given(finite, finite)
def test_exp_sigma1_group_law(a, b):
    np.testing.assert_allclose(exp_sigma1(a) @ exp_sigma1(b), exp_sigma1(a + b), atol=1e-12)


def test_exp_sigma1_unitary_on_random_arguments(rng):
    for a in rng.uniform(-10, 10, 1000):
        u = exp_sigma1(a)
        assert np.max(np.abs(u.conj().T @ u - IDENTITY)) <= 1e-12


@pytest.mark.parametrize("bad", [math.inf, -math.inf, math.nan])
def test_exp_sigma1_rejects_non_finite(bad):
    with pytest.raises(DomainError):
        exp_sigma1(bad)


def test_ket_validation():
    with pytest.raises(DomainError):
        ket(1, 1)
    with pytest.raises(DomainError):
        ket(math.nan, 0)
    with pytest.raises(DomainError):
        ket(0, 0, normalize=True)
    np.testing.assert_allclose(ket(1, 1, normalize=True), np.array([1, 1]) / math.sqrt(2))


def test_constants_are_read_only():
    with pytest.raises(ValueError):
        SIGMA1[0, 0] = 5


def test_hermitian_and_unitary_tags():
    assert is_hermitian(SIGMA1)
    assert not is_hermitian(np.array([[0, 1], [0, 0]]))
    assert is_unitary(exp_sigma1(0.7))
    assert not is_unitary(2 * IDENTITY)
