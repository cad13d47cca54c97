"""Seeded samplers for the random inputs.

Normalization conventions used throughout the package:

========== ================================================ =====================
ensemble   entries                                          bulk spectrum
========== ================================================ =====================
Ginibre    i.i.d. complex Gaussian, ``E|G_ij|^2 = 1/n``      uniform on unit disk
GUE        Hermitian, off-diagonal/diagonal variance ``1/n`` semicircle on [-2, 2]
CUE        Haar measure on U(n)                             uniform on unit circle
========== ================================================ =====================

Randomness comes from :class:`SeedSpec`. Each ``(master_seed, trial_index)``
pair maps to an independent PCG64 stream through :class:`numpy.random.SeedSequence`
spawn keys, so trials can run in any order or in parallel and still reproduce
bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaincc

from rmtlab.errors import InvalidArgument, InvalidDimension

RNG_ALGORITHM = "PCG64 via numpy.random.SeedSequence(entropy=master_seed, spawn_key=(trial_index, stream))"


@dataclass(frozen=True)
class SeedSpec:
    """Address of one reproducible random stream.

    ``stream`` separates independent sub-streams within the same trial (for
    instance the base matrix and a GAF sample drawn for comparison).
    """

    master_seed: int
    trial_index: int = 0
    stream: int = 0

    def __post_init__(self):
        if not 0 <= int(self.master_seed) < 2**64:
            raise InvalidArgument("master_seed must be a 64-bit unsigned integer")
        if self.trial_index < 0 or self.stream < 0:
            raise InvalidArgument("trial_index and stream must be non-negative")

    def sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(
            entropy=int(self.master_seed), spawn_key=(int(self.trial_index), int(self.stream))
        )

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.sequence()))

    def substream(self, stream: int) -> SeedSpec:
        return SeedSpec(self.master_seed, self.trial_index, stream)


def as_generator(seed) -> np.random.Generator:
    """Accept a :class:`SeedSpec`, a Generator, or a plain integer seed."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, SeedSpec):
        return seed.generator()
    if isinstance(seed, (int, np.integer)):
        return SeedSpec(int(seed)).generator()
    raise InvalidArgument(f"cannot build a random generator from {type(seed).__name__}")


def _check_n(n) -> int:
    if int(n) != n or n < 1:
        raise InvalidDimension(f"dimension must be a positive integer, got {n!r}")
    return int(n)


def complex_normal(rng: np.random.Generator, size, variance: float = 1.0) -> np.ndarray:
    """Circular complex Gaussians with ``E|z|^2 = variance``."""
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


def sample_ginibre(n: int, seed) -> np.ndarray:
    """Complex Ginibre matrix with entry variance ``1/n``."""
    n = _check_n(n)
    return complex_normal(as_generator(seed), (n, n), 1.0 / n)


def sample_gue(n: int, seed) -> np.ndarray:
    """GUE matrix normalized so the spectrum fills [-2, 2].

    ``H = (A + A^*) / sqrt(2n)`` with ``A`` standard complex Gaussian; the sum
    is exactly Hermitian in floating point.
    """
    n = _check_n(n)
    A = complex_normal(as_generator(seed), (n, n))
    return (A + A.conj().T) / np.sqrt(2.0 * n)


def sample_haar_unitary(n: int, seed) -> np.ndarray:
    """Haar-distributed unitary via QR with the phases of ``diag(R)`` removed."""
    n = _check_n(n)
    Z = complex_normal(as_generator(seed), (n, n))
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


def sample_unit_vector(n: int, seed) -> np.ndarray:
    """Uniform random unit vector on the complex sphere in C^n."""
    n = _check_n(n)
    x = complex_normal(as_generator(seed), n)
    return x / np.linalg.norm(x)


def semicircle_mass(a: float, b: float) -> float:
    """Mass of the semicircle density ``sqrt(4 - x^2) / (2 pi)`` on [a, b]."""
    a, b = max(a, -2.0), min(b, 2.0)
    if b <= a:
        return 0.0

    def F(x):
        return (x * np.sqrt(4.0 - x * x) + 4.0 * np.arcsin(x / 2.0)) / (4.0 * np.pi)

    return float(F(b) - F(a))


def kostlan_expected_outside(n: int, r: float) -> float:
    """Expected number of Ginibre eigenvalues with ``|lambda| > r``.

    Kostlan: the squared moduli ``n |lambda|^2`` are distributed as independent
    Gamma(k, 1) variables, k = 1..n.
    """
    n = _check_n(n)
    k = np.arange(1, n + 1)
    return float(np.sum(gammaincc(k, n * r * r)))


def kostlan_outside_variance(n: int, r: float) -> float:
    """Variance of the same count (sum of independent Bernoulli variables)."""
    k = np.arange(1, _check_n(n) + 1)
    p = gammaincc(k, n * r * r)
    return float(np.sum(p * (1.0 - p)))
