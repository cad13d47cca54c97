"""Eigenvector overlap matrix ``O_ij = (L_i L_j^*) (R_j^* R_i)``.

For a normal matrix ``O`` is the identity. In general ``O_ii >= 1`` and every
row sums to one, both as a consequence of ``L_i R_j = delta_ij``.
"""

from __future__ import annotations

import numpy as np

from rmtlab.errors import BiorthogonalityViolated
from rmtlab.linalg import EigenSystem

BIORTHOGONALITY_TOL = 1e-8


def overlap_matrix(es: EigenSystem) -> np.ndarray:
    """Overlap matrix from two Gram matrices, O(n^3)."""
    err = es.biorthogonality_error()
    if err > BIORTHOGONALITY_TOL:
        raise BiorthogonalityViolated(f"max |L R - I| = {err:.3e}")
    left_gram = es.lefts @ es.lefts.conj().T  # [i, j] = L_i L_j^*
    right_gram = es.rights.conj().T @ es.rights  # [j, i] = R_j^* R_i
    O = left_gram * right_gram.T
    idx = np.diag_indices_from(O)
    O[idx] = O[idx].real
    return O


def diagonal_overlaps(es: EigenSystem) -> np.ndarray:
    """``O_ii = ||L_i||^2 ||R_i||^2`` without forming the full matrix."""
    return np.sum(np.abs(es.lefts) ** 2, axis=1) * np.sum(np.abs(es.rights) ** 2, axis=0)
