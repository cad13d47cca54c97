"""Outlier detection, localization domains and Monte Carlo count comparisons.

An eigenvalue is a strongly separated outlier for a pair of disjoint domains
``(D1, D2)`` when it lies in ``D1`` and every other eigenvalue lies in ``D2``.
Separation is checked by classifying the fully computed spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Union

import numpy as np

from rmtlab.ensembles import SeedSpec, sample_gue, sample_unit_vector
from rmtlab.errors import (
    DegenerateCoupling,
    InvalidArgument,
    OverlappingDomains,
    RegimeViolation,
)
from rmtlab.models import ModelConfig, ModelKind, build_matrix, expected_count, msc, spectral_function


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def contains(self, z) -> np.ndarray:
        return np.abs(np.asarray(z) - self.center) < self.radius


@dataclass(frozen=True)
class Strip:
    """Horizontal strip ``lower <= Im z < upper`` (``atol`` slack at the bottom)."""

    lower: float
    upper: float
    atol: float = 1e-10

    def contains(self, z) -> np.ndarray:
        y = np.imag(np.asarray(z))
        return (y >= self.lower - self.atol) & (y < self.upper)


@dataclass(frozen=True)
class Annulus:
    """``inner <= |z - center| <= outer``; ``outer`` may be ``inf``."""

    center: complex
    inner: float
    outer: float = math.inf

    def contains(self, z) -> np.ndarray:
        r = np.abs(np.asarray(z) - self.center)
        return (r >= self.inner) & (r <= self.outer)


Region = Union[Disk, Strip, Annulus]


def region_distance(a: Region, b: Region) -> float:
    """Distance between two regions; ``<= 0`` means they touch or overlap.

    Supported pairs are disk/disk, disk/strip and disk/annulus (either order).
    """
    if isinstance(b, Disk) and not isinstance(a, Disk):
        a, b = b, a
    if not isinstance(a, Disk):
        raise InvalidArgument(f"no distance rule for {type(a).__name__}/{type(b).__name__}")
    if isinstance(b, Disk):
        return abs(a.center - b.center) - a.radius - b.radius
    if isinstance(b, Strip):
        y = complex(a.center).imag
        above = (y - a.radius) - b.upper
        below = (b.lower - b.atol) - (y + a.radius)
        return max(above, below)
    if isinstance(b, Annulus):
        d = abs(a.center - b.center)
        inside_hole = b.inner - (d + a.radius)
        outside = d - a.radius - b.outer
        return max(inside_hole, outside)
    raise InvalidArgument(f"unsupported region {type(b).__name__}")


@dataclass
class SeparationReport:
    outlier: complex | None
    outlier_count: int
    d1: Region
    d2: Region
    margin: float
    satisfied: bool
    outliers: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=complex))
    stray_count: int = 0

    def as_record(self) -> dict:
        return {
            "outlier_re": None if self.outlier is None else self.outlier.real,
            "outlier_im": None if self.outlier is None else self.outlier.imag,
            "outlier_count": self.outlier_count,
            "stray_count": self.stray_count,
            "margin": self.margin,
            "satisfied": self.satisfied,
        }


def detect_separation(spectrum, d1: Region, d2: Region, expected: int = 1) -> SeparationReport:
    """Classify a spectrum against disjoint domains ``d1`` and ``d2``.

    ``satisfied`` is true when exactly ``expected`` eigenvalues are in ``d1``
    and all the others are in ``d2``.
    """
    margin = region_distance(d1, d2)
    if not margin > 0:
        raise OverlappingDomains(f"domains are not disjoint (distance {margin:.3e})")
    z = np.asarray(spectrum, dtype=complex).reshape(-1)
    in1 = d1.contains(z)
    in2 = d2.contains(z) & ~in1
    inside = z[in1]
    outlier = None
    if inside.size:
        if isinstance(d1, Disk):
            outlier = complex(inside[np.argmin(np.abs(inside - d1.center))])
        else:
            outlier = complex(inside[0])
    stray = int(np.sum(~in1 & ~in2))
    count = int(in1.sum())
    return SeparationReport(
        outlier=outlier,
        outlier_count=count,
        d1=d1,
        d2=d2,
        margin=float(margin),
        satisfied=bool(count == expected and stray == 0),
        outliers=inside,
        stray_count=stray,
    )


class DomainPair(NamedTuple):
    d1: Disk
    d2: Region


def musical_domains(n: int, t: float, epsilon: float = 0.3) -> DomainPair:
    """Localization domains for ``H + i t v v^*`` with ``t > 1``.

    ``D1``: disk centred at ``i (t - 1/t)`` of radius ``n^eps / sqrt(n (t - 1/t))``.
    ``D2``: strip ``0 <= Im z < n^eps / (n (t - 1/t))``.
    """
    if t <= 1.0:
        raise RegimeViolation("musical-chairs domains need t > 1")
    s = t - 1.0 / t
    scale = float(n) ** epsilon
    d1 = Disk(1j * s, scale / math.sqrt(n * s))
    d2 = Strip(0.0, scale / (n * s))
    return DomainPair(d1, d2)


def domains_degenerate(pair) -> bool:
    """True when the two domains of ``pair = (d1, d2)`` touch, so they certify nothing."""
    d1, d2 = pair
    return region_distance(d1, d2) <= 0


def ua_domain(n: int, t: float, epsilon: float, c1: complex) -> tuple[complex, Callable]:
    """Linearized outlier ``z_t`` and the Rouche region for the UA model.

    ``c1 = v^* U^* v``. The returned predicate accepts an array of points and
    is true where ``|z| < 1`` and ``n^eps |z|^2 / (1 - |z|) < |c1| |z - z_t|``.
    """
    t = float(t)
    if not 0.0 < abs(t) < 1.0:
        raise RegimeViolation("UA domain needs 0 < |t| < 1")
    c1 = complex(c1)
    if abs(c1) <= 1e-12:
        raise DegenerateCoupling("v^* U^* v vanishes; the linearization has no zero")
    z_t = t / ((1.0 - t) * c1)
    scale = float(n) ** epsilon

    def member(z):
        z = np.asarray(z, dtype=complex)
        r = np.abs(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            lhs = np.where(r < 1.0, scale * r * r / (1.0 - r), np.inf)
        return (r < 1.0) & (lhs < abs(c1) * np.abs(z - z_t))

    return complex(z_t), member


def local_law_margin(H, v, z: complex, epsilon: float) -> float:
    """``|v^*(H - z)^{-1} v - m_sc(z)| sqrt(n Im z) / n^eps``.

    A value at most 1 means the isotropic local-law bound holds at this
    exponent.
    """
    z = complex(z)
    if z.imag <= 0:
        raise InvalidArgument("local law margin needs Im z > 0")
    model = ModelConfig(ModelKind.ANTI_HERMITIAN, v)
    n = model.n
    W = spectral_function(model, H, z)
    return abs(W - msc(z)) * math.sqrt(n * z.imag) / n**epsilon


def count_above(spectrum, y: float) -> int:
    return int(np.sum(np.imag(np.asarray(spectrum)) > y))


def antihermitian_spectrum(n: int, t: float, seed) -> np.ndarray:
    """Spectrum of ``H + i t v v^*`` with ``H`` GUE and ``v`` uniform."""
    if isinstance(seed, SeedSpec):
        seed = seed.generator()
    H = sample_gue(n, seed)
    v = sample_unit_vector(n, seed)
    return np.linalg.eigvals(build_matrix(ModelConfig(ModelKind.ANTI_HERMITIAN, v), H, t))


def compare_counts(n: int, t: float, y: float, trials: int, master_seed: int = 0) -> tuple[float, float]:
    """Monte Carlo mean of ``#{Im lambda > y}`` next to :func:`expected_count`."""
    if y <= 0:
        raise InvalidArgument("y must be positive")
    counts = [
        count_above(antihermitian_spectrum(n, t, SeedSpec(master_seed, k)), y) for k in range(trials)
    ]
    return float(np.mean(counts)), expected_count(n, t, y)


def argument_principle_count(f: Callable, center: complex, radius: float, points: int = 4096) -> int:
    """Number of zeros minus poles of ``f`` inside a circle, from the winding of ``f``.

    Cross-validates eigenvalue classification on disk domains: pass the
    characteristic function of ``G(t)``.
    """
    theta = np.linspace(0.0, 2.0 * np.pi, points, endpoint=False)
    vals = np.array([f(center + radius * np.exp(1j * a)) for a in theta], dtype=complex)
    phase = np.angle(np.append(vals, vals[0]))
    jumps = np.diff(phase)
    jumps = (jumps + np.pi) % (2.0 * np.pi) - np.pi
    return int(round(jumps.sum() / (2.0 * np.pi)))
