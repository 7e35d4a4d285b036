import numpy as np
import pytest

from spherebranch.core.errors import NotAnEigenvalueError
from spherebranch.core.operators import Pencil, example_problem, kernel_injectivity
from spherebranch.core.spectral import (
    certify,
    choose_resolvent_point,
    eigensphere_dim,
    is_simple_eigenpoint,
    kernel_basis,
    pencil_eigenvalues,
)
from tests.conftest import unit


def _summary(infos):
    return [(round(i.value, 9), i.geometric_mult) for i in infos]


@pytest.mark.parametrize(
    "k, n, window, expected",
    [
        (3, 12, (-1.0, 12.5), [(0.0, 3)] + [(float(m), 1) for m in range(4, 13)]),
        (2, 10, (-1.0, 4.5), [(0.0, 2), (3.0, 1), (4.0, 1)]),
        (1, 8, (-1.0, 4.5), [(0.0, 1), (2.0, 1), (3.0, 1), (4.0, 1)]),
    ],
)
def test_pencil_eigenvalues(k, n, window, expected):
    infos = pencil_eigenvalues(example_problem(k, n).pencil, window)
    assert _summary(infos) == expected
    for info, (value, _) in zip(infos, expected):
        assert abs(info.value - value) <= 1e-9
        assert info.algebraic_mult == info.geometric_mult


def test_kernel_bases_are_orthonormal_eigenvectors(k3):
    pencil = k3.pencil
    for info in pencil_eigenvalues(pencil, (-1.0, 10.5)):
        B = info.kernel_basis
        np.testing.assert_allclose(B.T @ B, np.eye(B.shape[1]), atol=1e-10)
        assert np.linalg.norm(pencil.at(info.value) @ B) <= 1e-8 * pencil.norm_scale(info.value)
        assert kernel_injectivity(pencil, B) > 1e-10


def test_kernel_basis_examples(k3):
    B = kernel_basis(k3.pencil, 0.0)
    assert B.shape == (16, 3)
    # span{e1, e2, e3}
    np.testing.assert_allclose(np.linalg.norm(B[:3], axis=0), np.ones(3), atol=1e-12)
    B5 = kernel_basis(k3.pencil, 5.0)
    assert B5.shape == (16, 1)
    assert abs(abs(B5[4, 0]) - 1.0) <= 1e-12
    assert kernel_basis(k3.pencil, 1.0).shape == (16, 0)


@pytest.mark.parametrize("k, odd, mult", [(3, True, 3), (2, False, 2), (1, True, 1)])
def test_certify_at_zero(k, odd, mult):
    cert = certify(example_problem(k, 16).pencil, 0.0)
    assert cert.h3_holds
    assert cert.h2_odd is odd
    assert cert.geometric_mult == mult
    assert cert.h1_compact
    assert cert.simple is (mult == 1)
    basis = np.column_stack([cert.splitting.H1, cert.splitting.H2])
    assert np.linalg.matrix_rank(basis) == 16


def test_certify_rejects_non_eigenvalue(k3):
    with pytest.raises(NotAnEigenvalueError):
        certify(k3.pencil, 1.0)


def test_eigensphere_dim(k3, k2, k1):
    for problem, expected in ((k3, 2), (k2, 1), (k1, 0)):
        info = pencil_eigenvalues(problem.pencil, (-0.5, 0.5))[0]
        assert eigensphere_dim(info) == expected


def test_defective_eigenvalue_fails_transversality():
    # Jordan block: algebraic multiplicity 2, geometric 1
    pencil = Pencil(np.array([[0.0, 1.0], [0.0, 0.0]]), np.eye(2))
    (info,) = pencil_eigenvalues(pencil, (-1.0, 1.0))
    assert info.geometric_mult == 1
    assert info.algebraic_mult == 2
    cert = certify(pencil, 0.0)
    assert not cert.h3_holds
    assert not cert.simple


def test_simple_criteria_agree(k1):
    pencil = k1.pencil
    for info in pencil_eigenvalues(pencil, (-1.0, 10.5)):
        x = info.kernel_basis[:, 0]
        assert is_simple_eigenpoint(pencil, info.value, x) == certify(pencil, info.value).simple


def test_multiple_eigenvalue_is_not_simple_eigenpoint(k3):
    assert not is_simple_eigenpoint(k3.pencil, 0.0, unit(16, 1))


def test_resolvent_point_avoids_spectrum(k1):
    lam_hat = choose_resolvent_point(k1.pencil, (-1.0, 4.5))
    assert -1.0 <= lam_hat <= 4.5
    assert min(abs(lam_hat - v) for v in (0.0, 2.0, 3.0, 4.0)) > 1e-3
