import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from spherebranch.core.errors import DimensionMismatchError, NonCompanionError
from spherebranch.core.orientation import (
    OrientedOperator,
    companions_equivalent,
    compose,
    is_companion,
    natural_orientation,
    operator_sign,
    oriented_composition_companion,
    partition_companions,
)


def test_is_companion_examples():
    assert is_companion(np.diag([2.0, 3.0]), np.zeros((2, 2)))
    assert is_companion(np.zeros((2, 2)), np.eye(2))
    assert not is_companion(np.diag([0.0, 1.0]), np.zeros((2, 2)))


def test_is_companion_shape_mismatch():
    with pytest.raises(DimensionMismatchError):
        is_companion(np.eye(2), np.eye(3))


def test_companions_equivalent_examples():
    T = np.diag([0.0, 1.0])
    K = np.diag([1.0, 0.0])
    assert companions_equivalent(T, K, K)
    assert not companions_equivalent(T, np.diag([1.0, 0.0]), np.diag([-1.0, 0.0]))
    assert companions_equivalent(np.eye(2), np.zeros((2, 2)), np.eye(2))


def test_companions_equivalent_rejects_non_companion():
    T = np.diag([0.0, 1.0])
    with pytest.raises(NonCompanionError):
        companions_equivalent(T, np.zeros((2, 2)), np.eye(2))


def test_operator_sign_examples():
    assert operator_sign(natural_orientation(np.eye(3))) == 1
    singular = OrientedOperator.from_companion(np.diag([0.0, 1.0]), np.diag([1.0, 0.0]))
    assert operator_sign(singular) == 0
    T = np.diag([-1.0, 1.0])
    assert operator_sign(OrientedOperator.from_companion(T, np.zeros((2, 2)))) == 1
    # T + K = diag(1, 1) lies in the class opposite to the zero companion
    assert operator_sign(OrientedOperator.from_companion(T, np.diag([2.0, 0.0]))) == -1


def test_oriented_operator_needs_a_companion():
    with pytest.raises(NonCompanionError):
        OrientedOperator.from_companion(np.diag([0.0, 1.0]), np.zeros((2, 2)))


def test_composition_companion_examples():
    I = np.eye(2)
    np.testing.assert_array_equal(oriented_composition_companion(I, 0 * I, I, 0 * I), np.zeros((2, 2)))
    np.testing.assert_array_equal(oriented_composition_companion(0 * I, I, 0 * I, I), I)


def _rank_deficient(rng: np.random.Generator, n: int, deficiency: int) -> np.ndarray:
    U, _ = np.linalg.qr(rng.standard_normal((n, n)))
    V, _ = np.linalg.qr(rng.standard_normal((n, n)))
    sigma = rng.uniform(0.5, 2.0, n)
    sigma[: min(deficiency, n)] = 0.0
    return U @ np.diag(sigma) @ V.T


def _random_companions(rng: np.random.Generator, T: np.ndarray, count: int) -> list:
    """Random companions of T, every other one reflected into the opposite class."""
    n = T.shape[0]
    reflect = np.diag(np.r_[-1.0, np.ones(n - 1)])
    companions = []
    for index in range(count):
        K = rng.standard_normal((n, n))
        if index % 2:
            K = (T + K) @ reflect - T
        companions.append(K)
    return companions


@seed(1234)
@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 6), st.integers(0, 2))
def test_companions_split_into_two_classes(rng_seed, n, deficiency):
    rng = np.random.default_rng(rng_seed)
    T = _rank_deficient(rng, n, deficiency)
    companions = _random_companions(rng, T, 50)
    classes = partition_companions(T, companions)
    assert len(classes) == 2
    assert sorted(i for c in classes for i in c) == list(range(50))
    # Equivalence within a class, inequivalence across
    for members in classes:
        for i in members[1:]:
            assert companions_equivalent(T, companions[members[0]], companions[i])
    assert not companions_equivalent(T, companions[classes[0][0]], companions[classes[1][0]])


@seed(99)
@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_sign_is_multiplicative_under_composition(rng_seed, n):
    rng = np.random.default_rng(rng_seed)
    T1, T2 = _rank_deficient(rng, n, 0), _rank_deficient(rng, n, 0)
    K1, K2 = _random_companions(rng, T1, 1)[0], _random_companions(rng, T2, 2)[1]
    first = OrientedOperator.from_companion(T1, K1)
    second = OrientedOperator.from_companion(T2, K2)
    composed = compose(first, second)
    assert operator_sign(composed) == operator_sign(first) * operator_sign(second)


@seed(5)
@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 6), st.integers(0, 2))
def test_composition_companion_is_a_companion(rng_seed, n, deficiency):
    rng = np.random.default_rng(rng_seed)
    T1, T2 = _rank_deficient(rng, n, deficiency), _rank_deficient(rng, n, deficiency)
    K1, K2 = rng.standard_normal((n, n)), rng.standard_normal((n, n))
    K = oriented_composition_companion(T1, K1, T2, K2)
    assert is_companion(T2 @ T1, K)
