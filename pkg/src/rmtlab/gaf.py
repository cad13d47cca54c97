"""Truncated Gaussian power series and their zeros in a disk.

``g(z) = sum_k g_k z^k`` with i.i.d. standard complex Gaussian ``g_k``. Its
zeros form a rotation-invariant point process in the unit disk with first
intensity ``1 / (pi (1 - |z|^2)^2)``; the mean number of zeros in
``|z| <= r`` is ``r^2 / (1 - r^2)``.

Zeros are computed as eigenvalues of the companion matrix of the truncated
polynomial, and every count is checked against the winding number of
``g - c`` around the circle ``|z| = r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from rmtlab.ensembles import as_generator, complex_normal
from rmtlab.errors import (
    CountMismatch,
    DegenerateInput,
    InsufficientTrials,
    InvalidArgument,
    InvalidTruncation,
    TruncationTooSmall,
)

TAIL_TOL = 1e-6
CONTOUR_POINTS = 4096
MAX_CONTOUR_POINTS = 2**20


@dataclass(frozen=True)
class GafSample:
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex).reshape(-1)
        if c.shape[0] < 2:
            raise InvalidTruncation("a GAF sample needs at least two coefficients")
        if not np.all(np.isfinite(c)):
            raise InvalidTruncation("coefficients must be finite")
        object.__setattr__(self, "coefficients", c)

    @property
    def truncation(self) -> int:
        return self.coefficients.shape[0]

    def times_z(self) -> GafSample:
        """The series ``z g(z)``: coefficients shifted up by one degree."""
        return GafSample(np.concatenate(([0.0], self.coefficients)))

    def __call__(self, z):
        # numpy's polyval wants the highest degree first
        return np.polyval(self.coefficients[::-1], z)


def sample_gaf(K: int, seed) -> GafSample:
    if K < 2:
        raise InvalidTruncation("K must be at least 2")
    return GafSample(complex_normal(as_generator(seed), int(K)))


def required_truncation(r: float, tol: float = TAIL_TOL) -> int:
    """Smallest ``K`` with ``K >= log(tol (1 - r)) / log r``."""
    if not 0.0 < r < 1.0:
        raise InvalidArgument("radius must lie in (0, 1)")
    return max(2, math.ceil(math.log(tol * (1.0 - r)) / math.log(r)))


def companion_roots(coefficients) -> np.ndarray:
    """Roots of ``sum_k a_k z^k`` (lowest degree first) via the companion matrix."""
    a = np.asarray(coefficients, dtype=complex)
    nz = np.flatnonzero(a)
    if nz.size == 0:
        raise DegenerateInput("the zero polynomial has no isolated roots")
    a = a[: nz[-1] + 1]
    deg = a.shape[0] - 1
    if deg == 0:
        return np.empty(0, dtype=complex)
    C = np.zeros((deg, deg), dtype=complex)
    C[1:, :-1] = np.eye(deg - 1)
    C[:, -1] = -a[:-1] / a[-1]
    return np.linalg.eigvals(C)


def winding_number(coefficients, r: float, points: int = CONTOUR_POINTS) -> int:
    """Zeros of the polynomial inside ``|z| = r`` by the argument principle.

    Trapezoid rule for ``(1 / 2 pi i) oint p'/p dz = mean(z p'(z) / p(z))``
    over equispaced contour points. The resolution doubles (up to
    ``2**20`` points) while the result is not within 0.05 of an integer,
    which happens only for zeros very close to the contour.
    """
    a = np.asarray(coefficients, dtype=complex)
    p = a[::-1]
    dp = np.polyder(p) if a.shape[0] > 1 else np.zeros(1)
    m = points
    while True:
        z = r * np.exp(2j * np.pi * np.arange(m) / m)
        val = np.polyval(p, z)
        if np.any(val == 0):
            m *= 2
            if m > MAX_CONTOUR_POINTS:
                raise CountMismatch(-1, -1)
            continue
        est = np.mean(z * np.polyval(dp, z) / val)
        k = round(est.real)
        if abs(est - k) < 0.05 or m >= MAX_CONTOUR_POINTS:
            return int(k)
        m *= 2


def gaf_zeros(gaf: GafSample, c: complex, r: float) -> np.ndarray:
    """Zeros of ``g - c`` in the closed disk ``|z| <= r``.

    Raises
    ------
    TruncationTooSmall
        If ``gaf.truncation`` is below :func:`required_truncation` for ``r``.
    DegenerateInput
        If ``g - c`` is identically zero.
    CountMismatch
        If the companion-matrix roots and the argument principle disagree.
    """
    need = required_truncation(r)
    if gaf.truncation < need:
        raise TruncationTooSmall(f"truncation {gaf.truncation} < {need} needed for r = {r}")
    a = gaf.coefficients.copy()
    a[0] -= complex(c)
    if not np.any(a):
        raise DegenerateInput("g - c is identically zero")
    roots = companion_roots(a)
    inside = roots[np.abs(roots) <= r]
    wind = winding_number(a, r)
    if wind != inside.shape[0]:
        raise CountMismatch(inside.shape[0], wind)
    return inside[np.lexsort((inside.imag, inside.real))]


@dataclass(frozen=True)
class AnnulusComparison:
    inner: float
    outer: float
    mean_a: float
    stderr_a: float
    mean_b: float
    stderr_b: float
    z_score: float

    def as_record(self) -> dict:
        return dict(self.__dict__)


def annulus_counts(point_sets, annuli) -> np.ndarray:
    """Counts per set (rows) and annulus (columns); annuli are ``inner <= |z| < outer``."""
    out = np.zeros((len(point_sets), len(annuli)), dtype=int)
    for i, pts in enumerate(point_sets):
        r = np.abs(np.asarray(pts, dtype=complex))
        for j, (lo, hi) in enumerate(annuli):
            out[i, j] = int(np.sum((r >= lo) & (r < hi)))
    return out


def compare_clouds(sample_a, sample_b, annuli, min_trials: int = 100) -> list[AnnulusComparison]:
    """Two-sample comparison of mean annulus counts.

    ``z_score`` is the difference of means over the combined standard error;
    it is 0 when both samples have identical constant counts.
    """
    if len(sample_a) < min_trials or len(sample_b) < min_trials:
        raise InsufficientTrials(f"need at least {min_trials} point sets per ensemble")
    A = annulus_counts(sample_a, annuli)
    B = annulus_counts(sample_b, annuli)
    results = []
    for j, (lo, hi) in enumerate(annuli):
        ma, mb = A[:, j].mean(), B[:, j].mean()
        sa = A[:, j].std(ddof=1) / math.sqrt(A.shape[0])
        sb = B[:, j].std(ddof=1) / math.sqrt(B.shape[0])
        se = math.hypot(sa, sb)
        if se > 0:
            z = (ma - mb) / se
        else:
            z = 0.0 if ma == mb else math.copysign(math.inf, ma - mb)
        results.append(AnnulusComparison(float(lo), float(hi), float(ma), float(sa), float(mb), float(sb), float(z)))
    return results
