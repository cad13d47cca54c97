"""The three rank-one perturbation families and their spectral characterizations.

============== ============================ ============================== ===========
kind           matrix ``G(t)``              spectral function              level
============== ============================ ============================== ===========
ADDITIVE       ``G + t v w^*``              ``w^* (z - G)^{-1} v``          ``1/t``
ANTI_HERMITIAN ``H + i t v v^*``            ``v^* (H - z)^{-1} v``          ``i/t``
MULTIPLICATIVE ``U (I - (1 - t) v v^*)``    ``v^* (I - z U^*)^{-1} v``      ``1/(1-t)``
============== ============================ ============================== ===========

In every case ``z`` (away from the poles) is an eigenvalue of ``G(t)`` exactly
when the spectral function equals the level. The multiplicative family also
has a rank-d variant ``U (I - (1 - t) sum_i v_i v_i^*)`` with a shared ``t``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from rmtlab.errors import (
    DegenerateT,
    InvalidArgument,
    KindMismatch,
    NegativeArgument,
    NonOrthonormal,
    OnSupport,
    RegimeViolation,
    TOutOfRange,
)
from rmtlab.linalg import (
    as_square_matrix,
    as_vector,
    bilinear_solve,
    checked_solve,
    is_hermitian,
    is_unitary,
)

UNIT_TOL = 1e-10


class ModelKind(str, enum.Enum):
    ADDITIVE = "additive"
    ANTI_HERMITIAN = "antihermitian"
    MULTIPLICATIVE = "multiplicative"

    @classmethod
    def parse(cls, name) -> ModelKind:
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("-", "").replace("_", "")
        aliases = {
            "additive": cls.ADDITIVE,
            "ginibre": cls.ADDITIVE,
            "antihermitian": cls.ANTI_HERMITIAN,
            "ah": cls.ANTI_HERMITIAN,
            "hermitian": cls.ANTI_HERMITIAN,
            "musicalchairs": cls.ANTI_HERMITIAN,
            "multiplicative": cls.MULTIPLICATIVE,
            "ua": cls.MULTIPLICATIVE,
        }
        try:
            return aliases[key]
        except KeyError:
            raise InvalidArgument(f"unknown model kind {name!r}") from None


@dataclass(frozen=True)
class ModelConfig:
    """One perturbation model: its kind and the perturbing unit vectors.

    For ``ADDITIVE``, ``w=None`` means ``w = v``. ``extra_vectors`` is only
    allowed for ``MULTIPLICATIVE`` and must be orthonormal together with ``v``.
    """

    kind: ModelKind
    v: np.ndarray
    w: np.ndarray | None = None
    extra_vectors: tuple = field(default=())

    def __post_init__(self):
        kind = ModelKind.parse(self.kind)
        object.__setattr__(self, "kind", kind)
        v = as_vector(self.v, name="v")
        object.__setattr__(self, "v", v)
        if abs(np.linalg.norm(v) - 1.0) > UNIT_TOL:
            raise InvalidArgument("v must be a unit vector")
        if self.w is not None:
            if kind is not ModelKind.ADDITIVE:
                raise KindMismatch("w is only meaningful for the additive model")
            w = as_vector(self.w, v.shape[0], "w")
            if abs(np.linalg.norm(w) - 1.0) > UNIT_TOL:
                raise InvalidArgument("w must be a unit vector")
            object.__setattr__(self, "w", w)
        extras = tuple(as_vector(x, v.shape[0], "extra vector") for x in self.extra_vectors)
        if extras:
            if kind is not ModelKind.MULTIPLICATIVE:
                raise KindMismatch("extra_vectors require the multiplicative model")
            V = np.column_stack((v,) + extras)
            if np.max(np.abs(V.conj().T @ V - np.eye(V.shape[1]))) > UNIT_TOL:
                raise NonOrthonormal("perturbation vectors must be orthonormal")
        object.__setattr__(self, "extra_vectors", extras)

    @property
    def n(self) -> int:
        return self.v.shape[0]

    @property
    def rank(self) -> int:
        return 1 + len(self.extra_vectors)

    @property
    def left(self) -> np.ndarray:
        """The vector ``w`` of the additive perturbation (``v`` when unset)."""
        return self.v if self.w is None else self.w

    def vectors(self) -> np.ndarray:
        """The perturbation directions as columns of an ``n x d`` matrix."""
        return np.column_stack((self.v,) + self.extra_vectors)


@dataclass(frozen=True)
class Prediction:
    location: complex
    target: complex
    regime_note: str = ""


def _check_base(model: ModelConfig, base) -> np.ndarray:
    B = as_square_matrix(base, "base")
    if B.shape[0] != model.n:
        raise InvalidArgument(f"base is {B.shape[0]}x{B.shape[0]} but vectors have length {model.n}")
    if model.kind is ModelKind.ANTI_HERMITIAN and not is_hermitian(B):
        raise KindMismatch("anti-Hermitian model needs a Hermitian base matrix")
    if model.kind is ModelKind.MULTIPLICATIVE and not is_unitary(B):
        raise KindMismatch("multiplicative model needs a unitary base matrix")
    return B


def perturbation_derivative(model: ModelConfig, base) -> np.ndarray:
    """``dG/dt``; constant in ``t`` for all three families."""
    B = _check_base(model, base)
    if model.kind is ModelKind.ADDITIVE:
        return np.outer(model.v, model.left.conj())
    if model.kind is ModelKind.ANTI_HERMITIAN:
        return 1j * np.outer(model.v, model.v.conj())
    V = model.vectors()
    return B @ V @ V.conj().T


def build_matrix(model: ModelConfig, base, t: float) -> np.ndarray:
    """The perturbed matrix ``G(t)``."""
    B = _check_base(model, base)
    t = float(t)
    if model.kind is ModelKind.ADDITIVE:
        return B + t * np.outer(model.v, model.left.conj())
    if model.kind is ModelKind.ANTI_HERMITIAN:
        return B + 1j * t * np.outer(model.v, model.v.conj())
    if not -1.0 <= t <= 1.0:
        raise TOutOfRange(f"multiplicative model needs t in [-1, 1], got {t}")
    V = model.vectors()
    return B - (1.0 - t) * (B @ V) @ V.conj().T


def spectral_function(model: ModelConfig, base, z: complex) -> complex:
    """Evaluate the model's characterization function at ``z``.

    Raises :class:`PoleProximity` when ``z`` is numerically a pole.
    """
    B = _check_base(model, base)
    n = B.shape[0]
    z = complex(z)
    if model.kind is ModelKind.ADDITIVE:
        return bilinear_solve(z * np.eye(n) - B, model.v, model.left)
    if model.kind is ModelKind.ANTI_HERMITIAN:
        return bilinear_solve(B - z * np.eye(n), model.v, model.v)
    if model.rank != 1:
        raise KindMismatch("use rank_d_condition for rank-d multiplicative models")
    return bilinear_solve(np.eye(n) - z * B.conj().T, model.v, model.v)


def level_target(model: ModelConfig | ModelKind, t: float) -> complex:
    kind = model.kind if isinstance(model, ModelConfig) else ModelKind.parse(model)
    t = float(t)
    if kind is ModelKind.MULTIPLICATIVE:
        if t == 1.0:
            raise DegenerateT("t = 1 leaves the unitary unperturbed")
        return complex(1.0 / (1.0 - t))
    if t == 0.0:
        raise DegenerateT("t = 0 leaves the base unperturbed")
    return complex(1.0 / t) if kind is ModelKind.ADDITIVE else 1j / t


def series_coefficients(model: ModelConfig, base, K: int) -> np.ndarray:
    """Taylor coefficients of the spectral function, by repeated mat-vecs.

    Additive: ``w^* G^k v`` (coefficients of ``z^{-(k+1)}``).
    Multiplicative: ``v^* (U^*)^k v`` (coefficients of ``z^k``).
    """
    if K < 1:
        raise InvalidArgument("K must be at least 1")
    if model.kind is ModelKind.ANTI_HERMITIAN:
        raise KindMismatch("no series expansion is provided for the anti-Hermitian model")
    B = _check_base(model, base)
    step = B if model.kind is ModelKind.ADDITIVE else B.conj().T
    left = model.left if model.kind is ModelKind.ADDITIVE else model.v
    x = model.v.copy()
    out = np.empty(K, dtype=complex)
    for k in range(K):
        out[k] = np.vdot(left, x)
        x = step @ x
    return out


def msc(z: complex) -> complex:
    """Stieltjes transform of the semicircle law on [-2, 2].

    The root of ``m^2 + z m + 1 = 0`` of smaller modulus (the branch that
    vanishes at infinity). The larger root is formed first without
    cancellation and inverted, since the roots multiply to one.

    >>> msc(1.5j)
    0.5j
    """
    z = complex(z)
    if abs(z.imag) <= 1e-12 and abs(z.real) <= 2.0 + 1e-12:
        raise OnSupport(f"z = {z} lies on the support [-2, 2]")
    s = np.sqrt(z * z - 4.0 + 0j)
    if (z.conjugate() * s).real < 0:
        s = -s
    big = (-z - s) / 2.0
    return complex(1.0 / big)


def predicted_outlier(model: ModelConfig, base, t: float, n: int | None = None) -> Prediction:
    """Leading-order outlier location.

    ADDITIVE (``|t| > 1``): ``t w^* v``, which is ``t`` for ``w = v``.
    ANTI_HERMITIAN (``|t| > 1``): ``i (t - 1/t)``.
    MULTIPLICATIVE (``0 < |t| < 1``): ``t / ((1 - t) v^* U^* v)``, the zero of
    the linearized spectral function.
    """
    t = float(t)
    n = model.n if n is None else int(n)
    target = level_target(model, t) if t != 0.0 else complex("nan")
    if model.kind is ModelKind.ADDITIVE:
        if abs(t) <= 1.0:
            raise RegimeViolation("additive outlier prediction needs |t| > 1")
        overlap = complex(np.vdot(model.left, model.v))
        note = "single outlier near t" if abs(overlap - 1.0) < 1e-12 else (
            "w != v: leading term only, outliers follow a random power series"
        )
        return Prediction(t * overlap, target, note)
    if model.kind is ModelKind.ANTI_HERMITIAN:
        if abs(t) <= 1.0:
            raise RegimeViolation("anti-Hermitian outlier exists only for |t| > 1")
        return Prediction(1j * (t - 1.0 / t), target, f"supercritical, t - 1/t = {t - 1.0 / t:.6g}")
    if not 0.0 < abs(t) < 1.0:
        raise RegimeViolation("multiplicative prediction needs 0 < |t| < 1")
    B = _check_base(model, base)
    c1 = complex(np.vdot(model.v, B.conj().T @ model.v))
    if c1 == 0:
        raise RegimeViolation("v^* U^* v vanishes")
    location = t / ((1.0 - t) * c1)
    scale = "below" if abs(t) < n ** -0.5 else "above"
    return Prediction(location, target, f"|t| {scale} the n^(-1/2) scale")


def bessel_i1(x: float, scaled: bool = False) -> float:
    """Modified Bessel function of the first kind, order one.

    Power series for ``x <= 20``, Hankel asymptotic expansion beyond. With
    ``scaled=True`` returns ``exp(-x) I_1(x)``, which stays finite for large
    arguments.
    """
    x = float(x)
    if x < 0:
        raise NegativeArgument(f"x must be non-negative, got {x}")
    if x <= 20.0:
        half = 0.5 * x
        term = half
        total = term
        k = 0
        while term > 1e-17 * total:
            k += 1
            term *= half * half / (k * (k + 1))
            total += term
        return total * math.exp(-x) if scaled else total
    # I_1(x) ~ e^x / sqrt(2 pi x) * sum_k (-1)^k a_k / x^k,
    # a_k = prod_{j<=k} (4 - (2j-1)^2) / (k! 8^k)
    total = 1.0
    term = 1.0
    for k in range(1, 60):
        nxt = -term * (4.0 - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if abs(nxt) >= abs(term) or abs(nxt) < 1e-17:
            break
        term = nxt
        total += term
    front = 1.0 / math.sqrt(2.0 * math.pi * x)
    return front * total if scaled else front * total * math.exp(x)


def expected_count(n: int, t: float, y: float) -> float:
    """Asymptotic mean number of eigenvalues of ``H + i t v v^*`` above ``Im z = y``.

    ``(1/y) exp(-n y (t + 1/t)) I_1(2 n y)``; evaluated with the scaled Bessel
    function so large ``n y`` does not overflow.
    """
    if y <= 0 or t <= 0 or n < 1:
        raise InvalidArgument("expected_count needs n >= 1, t > 0, y > 0")
    x = 2.0 * n * y
    return math.exp(-n * y * (t + 1.0 / t) + x) * bessel_i1(x, scaled=True) / y


def rank_d_condition(base, vectors, t: float, z: complex) -> complex:
    """``det(I_d - (1-t) V^* (I - z U^*)^{-1} V)`` for the rank-d UA model.

    By Sylvester's identity this is ``det(U A(t) - z) / det(U - z)``, so its
    zeros inside the unit disk are the eigenvalues of ``U A(t)``. For ``d = 1``
    it equals ``1 - (1 - t) W(z)``.
    """
    U = as_square_matrix(base, "base")
    if not is_unitary(U):
        raise KindMismatch("rank_d_condition needs a unitary base")
    V = np.asarray(vectors, dtype=complex)
    if V.ndim == 1:
        V = V[:, None]
    if V.shape[0] != U.shape[0]:
        raise InvalidArgument("vectors do not match the base dimension")
    d = V.shape[1]
    if np.max(np.abs(V.conj().T @ V - np.eye(d))) > UNIT_TOL:
        raise NonOrthonormal("vectors must be orthonormal")
    z = complex(z)
    if abs(z) >= 1.0:
        raise InvalidArgument("rank_d_condition is evaluated inside the unit disk")
    M = np.eye(U.shape[0]) - z * U.conj().T
    gram = V.conj().T @ checked_solve(M, V)
    return complex(np.linalg.det(np.eye(d) - (1.0 - float(t)) * gram))
