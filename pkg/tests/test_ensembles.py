import math

import numpy as np
import pytest

from conftest import seed
from rmtlab.ensembles import (
    RNG_ALGORITHM,
    SeedSpec,
    kostlan_expected_outside,
    kostlan_outside_variance,
    sample_ginibre,
    sample_gue,
    sample_haar_unitary,
    sample_unit_vector,
    semicircle_mass,
)
from rmtlab.errors import InvalidArgument, InvalidDimension


def test_seedspec_determinism_and_independence():
    a = sample_ginibre(4, SeedSpec(1, 2))
    b = sample_ginibre(4, SeedSpec(1, 2))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, sample_ginibre(4, SeedSpec(1, 3)))
    assert not np.array_equal(a, sample_ginibre(4, SeedSpec(2, 2)))
    assert not np.array_equal(a, sample_ginibre(4, SeedSpec(1, 2, stream=1)))
    assert "PCG64" in RNG_ALGORITHM


def test_seedspec_validation():
    with pytest.raises(InvalidArgument):
        SeedSpec(-1)
    with pytest.raises(InvalidArgument):
        SeedSpec(2**64)
    SeedSpec(2**64 - 1)
    with pytest.raises(InvalidArgument):
        SeedSpec(0, -1)


@pytest.mark.parametrize("sampler", [sample_ginibre, sample_gue, sample_haar_unitary])
def test_invalid_dimension(sampler):
    with pytest.raises(InvalidDimension):
        sampler(0, 1)
    with pytest.raises(InvalidDimension):
        sample_unit_vector(0, 1)


def test_ginibre_scalar_variance():
    vals = np.array([sample_ginibre(1, seed(k))[0, 0] for k in range(10_000)])
    assert abs(np.mean(np.abs(vals) ** 2) - 1.0) <= 0.05
    # real and imaginary parts each carry half the variance
    assert abs(np.var(vals.real) - 0.5) <= 0.03


def test_circular_law_containment():
    frac = [np.mean(np.abs(np.linalg.eigvals(sample_ginibre(200, seed(k)))) <= 1.05) for k in range(50)]
    assert np.mean(frac) >= 0.99


def test_kostlan_radii():
    n, r, m = 50, 0.8, 500
    counts = [np.sum(np.abs(np.linalg.eigvals(sample_ginibre(n, seed(k, stream=1)))) > r) for k in range(m)]
    stderr = np.std(counts, ddof=1) / math.sqrt(m)
    assert abs(np.mean(counts) - kostlan_expected_outside(n, r)) <= 3 * stderr
    # the Bernoulli variance is an upper bound scale check for the empirical one
    assert np.var(counts) == pytest.approx(kostlan_outside_variance(n, r), rel=0.25)


def test_gue_structure_and_moments():
    H = sample_gue(6, 3)
    assert np.array_equal(H, H.conj().T)
    diag, off = [], []
    for k in range(2000):
        H = sample_gue(4, seed(k))
        diag.append(H[0, 0].real)
        off.append(H[0, 1])
    assert np.var(diag) == pytest.approx(0.25, rel=0.1)
    assert np.mean(np.abs(off) ** 2) == pytest.approx(0.25, rel=0.1)


def test_gue_edges():
    inside = 0
    for k in range(100):
        ev = np.linalg.eigvalsh(sample_gue(200, seed(k)))
        inside += ev[0] >= -2.3 and ev[-1] <= 2.3
    assert inside / 100 >= 0.95


def test_semicircle_mass():
    assert semicircle_mass(-1, 1) == pytest.approx(0.6089977810442294, abs=1e-14)
    assert semicircle_mass(-3, 3) == pytest.approx(1.0)
    ev = np.concatenate([np.linalg.eigvalsh(sample_gue(200, seed(k))) for k in range(20)])
    assert abs(np.mean(np.abs(ev) <= 1.0) - 0.6090) <= 0.03


def test_haar_unitarity_and_phase():
    U = sample_haar_unitary(30, 4)
    np.testing.assert_allclose(U.conj().T @ U, np.eye(30), atol=1e-12)
    scalars = np.array([sample_haar_unitary(1, seed(k))[0, 0] for k in range(10_000)])
    np.testing.assert_allclose(np.abs(scalars), 1.0, atol=1e-12)
    assert abs(scalars.mean()) <= 0.03


def test_haar_left_invariance_n2():
    # fixed unitary V: the entry moments of V U match those of U
    V = np.array([[1, 1j], [1j, 1]]) / math.sqrt(2)
    U = np.array([sample_haar_unitary(2, seed(k)) for k in range(4000)])
    VU = V @ U
    for X in (U, VU):
        assert np.mean(np.abs(X[:, 0, 0]) ** 2) == pytest.approx(0.5, abs=0.02)
        assert np.mean(np.abs(X[:, 0, 0]) ** 4) == pytest.approx(1 / 3, abs=0.02)
        assert abs(np.mean(X[:, 0, 0])) <= 0.03


def test_haar_arc_counts():
    counts = []
    for k in range(200):
        ang = np.angle(np.linalg.eigvals(sample_haar_unitary(100, seed(k))))
        counts.append(np.sum((ang >= 0.3) & (ang < 0.3 + math.pi / 4)))
    assert abs(np.mean(counts) - 12.5) <= 0.5


def test_unit_vectors():
    v = sample_unit_vector(17, 9)
    assert abs(np.linalg.norm(v) - 1) <= 1e-15
    first = np.array([abs(sample_unit_vector(2, seed(k))[0]) ** 2 for k in range(10_000)])
    assert abs(first.mean() - 0.5) <= 0.02
    dots = [abs(np.vdot(sample_unit_vector(100, seed(k, stream=1)), sample_unit_vector(100, seed(k, stream=2)))) ** 2
            for k in range(2000)]
    assert np.mean(dots) == pytest.approx(0.01, rel=0.2)
