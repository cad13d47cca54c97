import numpy as np
import pytest

from rmtlab.ensembles import SeedSpec
from rmtlab.errors import DegenerateInput, InsufficientTrials, InvalidArgument, InvalidTruncation, TruncationTooSmall
from rmtlab.gaf import (
    GafSample,
    annulus_counts,
    companion_roots,
    compare_clouds,
    gaf_zeros,
    required_truncation,
    sample_gaf,
    winding_number,
)

MASTER = 99


def _samples(count, K=40):
    return [sample_gaf(K, SeedSpec(MASTER, k)) for k in range(count)]


def test_coefficients_are_standard_complex_gaussian():
    g = np.array([s.coefficients for s in _samples(4000, K=8)])
    np.testing.assert_allclose(np.mean(np.abs(g) ** 2, axis=0), 1.0, atol=0.08)
    np.testing.assert_allclose(np.mean(g.real**2, axis=0), 0.5, atol=0.05)
    # circular symmetry: E g^2 = 0
    assert np.max(np.abs(np.mean(g**2, axis=0))) <= 0.06
    corr = np.corrcoef(np.abs(g).T)
    assert np.max(np.abs(corr - np.eye(8))) <= 0.05


def test_sampling_is_deterministic():
    a = sample_gaf(30, SeedSpec(MASTER, 3))
    b = sample_gaf(30, SeedSpec(MASTER, 3))
    np.testing.assert_array_equal(a.coefficients, b.coefficients)
    assert not np.array_equal(a.coefficients, sample_gaf(30, SeedSpec(MASTER, 4)).coefficients)


def test_required_truncation():
    assert required_truncation(0.5) == 21
    assert required_truncation(0.9) > required_truncation(0.7) > required_truncation(0.5)
    with pytest.raises(InvalidArgument):
        required_truncation(1.0)


def test_sample_validation():
    with pytest.raises(InvalidTruncation):
        sample_gaf(1, 0)
    with pytest.raises(InvalidTruncation):
        GafSample([1.0])
    with pytest.raises(InvalidTruncation):
        GafSample([1.0, np.nan])


def test_linear_series_has_one_zero():
    coeffs = np.zeros(21, dtype=complex)
    coeffs[1] = 1.0
    np.testing.assert_allclose(gaf_zeros(GafSample(coeffs), 0.3, 0.5), [0.3])
    assert gaf_zeros(GafSample(coeffs), 0.7, 0.5).shape == (0,)


def test_truncation_too_small():
    with pytest.raises(TruncationTooSmall):
        gaf_zeros(sample_gaf(20, 0), 0.0, 0.5)


def test_constant_series_is_degenerate():
    coeffs = np.zeros(21, dtype=complex)
    coeffs[0] = 0.4
    with pytest.raises(DegenerateInput):
        gaf_zeros(GafSample(coeffs), 0.4, 0.5)
    with pytest.raises(DegenerateInput):
        companion_roots([0.0, 0.0])


def test_companion_roots_match_numpy():
    a = np.array([2.0, -3.0, 1.0], dtype=complex)  # (z - 1)(z - 2)
    np.testing.assert_allclose(np.sort_complex(companion_roots(a)), [1.0, 2.0])
    assert companion_roots([5.0, 0.0]).shape == (0,)


def test_times_z_adds_zero_at_origin():
    g = sample_gaf(30, SeedSpec(MASTER, 0))
    shifted = g.times_z()
    assert shifted.truncation == 31
    z = 0.2 + 0.1j
    assert shifted(z) == pytest.approx(z * g(z))
    zeros = gaf_zeros(shifted, 0.0, 0.5)
    assert np.min(np.abs(zeros)) <= 1e-12


def test_mean_zero_count():
    r = 0.5
    K = required_truncation(r)
    counts = [gaf_zeros(g, 0.0, r).shape[0] for g in _samples(1500, K)]
    assert np.mean(counts) == pytest.approx(r * r / (1 - r * r), abs=0.05)


def test_counts_are_rotation_invariant():
    phase = np.exp(0.7j)
    for g in _samples(20, 30):
        rotated = GafSample(g.coefficients * phase ** np.arange(g.truncation))
        a = gaf_zeros(g, 0.2, 0.6)
        b = gaf_zeros(rotated, 0.2, 0.6)
        np.testing.assert_allclose(np.sort_complex(a * np.conj(phase)), np.sort_complex(b), atol=1e-9)


def test_zeros_stable_under_doubling_truncation():
    r = 0.6
    K = required_truncation(r)
    for g in _samples(20, 2 * K):
        short = gaf_zeros(GafSample(g.coefficients[:K]), 0.0, r)
        full = gaf_zeros(g, 0.0, r)
        # a zero near the circle may cross it when the tail is dropped
        if short.shape != full.shape:
            assert np.min(np.abs(np.abs(full) - r)) < 1e-4 or np.min(np.abs(np.abs(short) - r)) < 1e-4
            continue
        if full.size:
            assert np.max(np.abs(np.sort_complex(short) - np.sort_complex(full))) <= 1e-5


def test_winding_matches_root_count():
    for g in _samples(30, 30):
        roots = companion_roots(g.coefficients)
        assert winding_number(g.coefficients, 0.55) == int(np.sum(np.abs(roots) < 0.55))


def test_compare_identical_ensembles():
    pts = [gaf_zeros(g, 0.0, 0.7) for g in _samples(800, required_truncation(0.7))]
    cmp = compare_clouds(pts[:400], pts[400:], [(0.0, 0.4), (0.4, 0.7)])
    assert all(abs(c.z_score) <= 3.0 for c in cmp)
    same = compare_clouds(pts[:100], pts[:100], [(0.0, 0.7)])
    assert same[0].z_score == 0.0


def test_compare_needs_trials():
    with pytest.raises(InsufficientTrials):
        compare_clouds([[0.1]] * 5, [[0.1]] * 5, [(0.0, 1.0)])


def test_annulus_counts():
    counts = annulus_counts([[0.1, 0.5j, 0.9], []], [(0.0, 0.5), (0.5, 1.0)])
    np.testing.assert_array_equal(counts, [[1, 2], [0, 0]])
