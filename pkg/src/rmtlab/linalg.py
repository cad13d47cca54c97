"""Dense complex linear algebra kernel.

Eigendecompositions return both eigenvector families: right eigenvectors are
the columns of ``P`` in ``M = P diag(values) P^{-1}`` and left eigenvectors are
the rows of ``P^{-1}``. Downstream code (velocities, overlaps, level sets)
relies on the biorthogonality ``L_i R_j = delta_ij``, so the left family is
obtained by inverting ``P`` rather than by decomposing ``M^*`` separately.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from rmtlab.errors import (
    DimensionMismatch,
    IllConditionedBasis,
    NonFinite,
    PoleProximity,
)

MAX_BASIS_CONDITION = 1e12
SOLVE_RESIDUAL_TOL = 1e-8
POLE_TOL = 1e-12


def as_square_matrix(M, name: str = "matrix") -> np.ndarray:
    """Validate ``M`` as a finite square complex matrix and return a copy."""
    A = np.array(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise DimensionMismatch(f"{name} must be a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NonFinite(f"{name} has non-finite entries")
    return A


def as_vector(v, n: int | None = None, name: str = "vector") -> np.ndarray:
    x = np.array(v, dtype=complex).reshape(-1)
    if n is not None and x.shape[0] != n:
        raise DimensionMismatch(f"{name} has length {x.shape[0]}, expected {n}")
    if not np.all(np.isfinite(x)):
        raise NonFinite(f"{name} has non-finite entries")
    return x


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues with biorthogonal right/left eigenvector families.

    Attributes
    ----------
    values : ndarray, shape (n,)
    rights : ndarray, shape (n, n)
        Column ``j`` is the unit-norm right eigenvector ``R_j``.
    lefts : ndarray, shape (n, n)
        Row ``j`` is the left eigenvector ``L_j``, scaled so ``L_j R_j = 1``.
    basis_condition : float
        2-norm condition number of the right eigenvector matrix.
    """

    values: np.ndarray
    rights: np.ndarray
    lefts: np.ndarray
    basis_condition: float

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.rights * self.values) @ self.lefts

    def biorthogonality_error(self) -> float:
        return float(np.max(np.abs(self.lefts @ self.rights - np.eye(self.n))))


def eigen_decompose(M, max_condition: float = MAX_BASIS_CONDITION) -> EigenSystem:
    """Full eigendecomposition with right and left eigenvectors.

    LAPACK ``zgeev`` (Hessenberg reduction + shifted QR) provides the values
    and right vectors; the left vectors are the rows of the inverse of the
    right-vector matrix, rescaled so that ``L_j R_j = 1``.

    Raises
    ------
    IllConditionedBasis
        If the condition number of the eigenvector matrix exceeds
        ``max_condition``.
    NonFinite
        If ``M`` has NaN or Inf entries.
    """
    A = as_square_matrix(M)
    values, P = np.linalg.eig(A)
    P = P / np.linalg.norm(P, axis=0)
    cond = float(np.linalg.cond(P))
    if not np.isfinite(cond) or cond > max_condition:
        raise IllConditionedBasis(cond, max_condition)
    Pinv = np.linalg.solve(P, np.eye(A.shape[0], dtype=complex))
    # Row scaling absorbs the (tiny) solve error so L_j R_j = 1 holds exactly
    # on the diagonal.
    diag = np.einsum("ij,ji->i", Pinv, P)
    lefts = Pinv / diag[:, None]
    return EigenSystem(values=values, rights=P, lefts=lefts, basis_condition=cond)


def checked_solve(A, b) -> np.ndarray:
    """Solve ``A x = b`` by pivoted LU, refusing points on the spectrum.

    A residual above ``1e-8 ||b||``, or a solution norm showing that ``A`` is
    singular to within ``1e-12 ||A||``, raises :class:`PoleProximity`.
    """
    A = np.asarray(A, dtype=complex)
    b = np.asarray(b, dtype=complex)
    bnorm = np.linalg.norm(b)
    scale = max(np.linalg.norm(A), 1.0)
    with np.errstate(all="ignore"):
        try:
            x = np.linalg.solve(A, b)
        except np.linalg.LinAlgError as exc:
            raise PoleProximity("matrix is exactly singular at this point") from exc
        if not np.all(np.isfinite(x)):
            raise PoleProximity("solve produced non-finite values")
        residual = np.linalg.norm(A @ x - b)
    if residual > SOLVE_RESIDUAL_TOL * max(bnorm, 1e-300):
        raise PoleProximity(f"solve residual {residual:.3e} too large")
    # ||A^{-1} b|| <= ||b|| / sigma_min(A); a huge ratio means sigma_min below
    # POLE_TOL * ||A||, i.e. the point sits on the spectrum.
    if np.linalg.norm(x) * POLE_TOL * scale > bnorm:
        raise PoleProximity("evaluation point within tolerance of the spectrum")
    return x


def bilinear_solve(A, v, w) -> complex:
    """Return ``w^* A^{-1} v`` from one checked solve (never forms ``A^{-1}``)."""
    return complex(np.vdot(np.asarray(w, dtype=complex), checked_solve(A, v)))


def resolvent_bilinear(M, z: complex, v, w) -> complex:
    """Weighted resolvent ``w^* (z I - M)^{-1} v``.

    Examples
    --------
    >>> resolvent_bilinear([[0.0]], 2.0, [1.0], [1.0])
    (0.5+0j)
    """
    A = as_square_matrix(M)
    n = A.shape[0]
    v = as_vector(v, n, "v")
    w = as_vector(w, n, "w")
    return bilinear_solve(z * np.eye(n) - A, v, w)


def sylvester_check(A, B) -> tuple[complex, complex]:
    """Both sides of ``det(I_n + A B) = det(I_d + B A)``.

    ``A`` is ``n x d`` and ``B`` is ``d x n``. Returns ``(lhs, rhs)``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    B = np.atleast_2d(np.asarray(B, dtype=complex))
    if A.ndim != 2 or B.ndim != 2 or A.shape[1] != B.shape[0] or A.shape[0] != B.shape[1]:
        raise DimensionMismatch(f"incompatible shapes {A.shape} and {B.shape}")
    n, d = A.shape
    lhs = complex(np.linalg.det(np.eye(n) + A @ B))
    rhs = complex(np.linalg.det(np.eye(d) + B @ A))
    return lhs, rhs


def spectral_norm(M) -> float:
    return float(np.linalg.norm(np.asarray(M), 2))


def is_hermitian(M, tol: float = 1e-12) -> bool:
    M = np.asarray(M)
    return bool(np.linalg.norm(M - M.conj().T) <= tol * max(np.linalg.norm(M), 1.0))


def is_unitary(M, tol: float = 1e-10) -> bool:
    M = np.asarray(M)
    return bool(np.linalg.norm(M.conj().T @ M - np.eye(M.shape[0])) <= tol * np.sqrt(M.shape[0]))


def min_pairwise_gap(values) -> tuple[float, tuple[int, int]]:
    """Smallest distance between two entries of a complex array, and the pair."""
    z = np.asarray(values, dtype=complex)
    if z.shape[0] < 2:
        return np.inf, (-1, -1)
    D = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(D, np.inf)
    k = int(np.argmin(D))
    i, j = divmod(k, z.shape[0])
    return float(D[i, j]), (min(i, j), max(i, j))
