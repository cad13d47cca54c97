import numpy as np
import pytest

from conftest import seed
from rmtlab.ensembles import sample_ginibre, sample_haar_unitary
from rmtlab.errors import BiorthogonalityViolated
from rmtlab.linalg import EigenSystem, eigen_decompose
from rmtlab.overlaps import diagonal_overlaps, overlap_matrix


def test_normal_matrix_gives_identity():
    U = sample_haar_unitary(8, seed(0).generator())
    O = overlap_matrix(eigen_decompose(U))
    np.testing.assert_allclose(O, np.eye(8), atol=1e-10)


def test_two_by_two_closed_form():
    a = 0.6 - 0.8j
    es = eigen_decompose(np.array([[0.0, a], [0.0, 1.0]]))
    O = overlap_matrix(es)
    expected = np.array([[1 + abs(a) ** 2, -abs(a) ** 2], [-abs(a) ** 2, 1 + abs(a) ** 2]])
    np.testing.assert_allclose(O, expected, atol=1e-12)


@pytest.mark.parametrize("k", range(3))
def test_row_sums_and_diagonal(k):
    es = eigen_decompose(sample_ginibre(6, seed(k).generator()))
    O = overlap_matrix(es)
    np.testing.assert_allclose(O.sum(axis=1), 1.0, atol=1e-9)
    np.testing.assert_allclose(O.sum(axis=0), 1.0, atol=1e-9)
    d = diagonal_overlaps(es)
    assert np.all(d >= 1.0 - 1e-12)
    np.testing.assert_allclose(np.diag(O).real, d, rtol=1e-12)
    np.testing.assert_allclose(O, O.conj().T, atol=1e-12)


def test_invariant_under_eigenvector_rescaling():
    es = eigen_decompose(sample_ginibre(6, seed(7).generator()))
    c = np.exp(1j * np.arange(6)) * np.linspace(0.5, 3.0, 6)
    scaled = EigenSystem(es.values, es.rights * c, es.lefts / c[:, None], es.basis_condition)
    np.testing.assert_allclose(overlap_matrix(scaled), overlap_matrix(es), atol=1e-10)


def test_biorthogonality_is_checked():
    es = eigen_decompose(sample_ginibre(4, seed(1).generator()))
    broken = EigenSystem(es.values, es.rights, 2.0 * es.lefts, es.basis_condition)
    with pytest.raises(BiorthogonalityViolated):
        overlap_matrix(broken)
