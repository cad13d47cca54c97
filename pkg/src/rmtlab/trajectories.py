"""Eigenvalue trajectories ``t -> lambda_j(t)``.

Spectra are computed on a parameter grid and linked by an optimal assignment
between consecutive grid points. A step is accepted only when every
eigenvalue moved by at most half the distance to its nearest neighbour;
otherwise the step is bisected (up to ``max_depth`` levels).

For every family here ``G(t)`` is linear in ``t`` with a rank-one derivative
``P``, and the trajectories solve the autonomous second-order system

    lambda_j'' = 2 lambda_j' sum_{k != j} lambda_k' / (lambda_j - lambda_k)

with initial velocities ``lambda_j' = L_j P R_j`` from first-order
perturbation theory.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from rmtlab.errors import (
    CardinalityMismatch,
    CollisionAbort,
    GapTooSmall,
    InvalidArgument,
    KindMismatch,
    RefinementExhausted,
)
from rmtlab.linalg import eigen_decompose, min_pairwise_gap
from rmtlab.models import ModelConfig, ModelKind, build_matrix, perturbation_derivative

MAX_REFINEMENT_DEPTH = 20
COLLISION_GAP = 1e-6


@dataclass
class TrajectoryBundle:
    """Index-aligned eigenvalue paths over a grid of ``t`` values.

    Attributes
    ----------
    grid : ndarray, shape (m,)
    paths : ndarray, shape (n, m)
        ``paths[j, k]`` is the position of path ``j`` at ``grid[k]``.
    min_gap : float
        Smallest pairwise eigenvalue distance seen on the grid.
    refinements : int
        Number of bisections inserted by the tracker.
    on_base_grid : ndarray of bool, shape (m,)
        Marks the points of the original uniform grid (before refinement).
    velocities : ndarray or None
        ``d lambda / dt`` at the grid points when known (ODE integration).
    """

    grid: np.ndarray
    paths: np.ndarray
    min_gap: float
    refinements: int = 0
    on_base_grid: np.ndarray | None = None
    velocities: np.ndarray | None = None

    def __post_init__(self):
        if self.on_base_grid is None:
            self.on_base_grid = np.ones(self.grid.shape[0], dtype=bool)

    @property
    def n(self) -> int:
        return self.paths.shape[0]

    def base_grid(self) -> tuple[np.ndarray, np.ndarray]:
        """Grid and paths restricted to the original uniform grid."""
        return self.grid[self.on_base_grid], self.paths[:, self.on_base_grid]

    def endpoint(self) -> np.ndarray:
        return self.paths[:, -1]


def _lex_order(z: np.ndarray) -> np.ndarray:
    return np.lexsort((z.imag, z.real))


def match_sets(prev, nxt) -> np.ndarray:
    """Optimal assignment between two equal-size point sets.

    Returns ``perm`` such that ``nxt[perm[i]]`` is matched to ``prev[i]`` and
    ``sum_i |prev[i] - nxt[perm[i]]|`` is minimal. Both sets are put in
    lexicographic ``(Re, Im)`` order before solving, so ties resolve the same
    way regardless of input order.
    """
    a = np.asarray(prev, dtype=complex).reshape(-1)
    b = np.asarray(nxt, dtype=complex).reshape(-1)
    if a.shape != b.shape:
        raise CardinalityMismatch(f"cannot match {a.shape[0]} points to {b.shape[0]}")
    oa, ob = _lex_order(a), _lex_order(b)
    cost = np.abs(a[oa][:, None] - b[ob][None, :])
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(a.shape[0], dtype=int)
    perm[oa[rows]] = ob[cols]
    return perm


def _nearest_neighbour_gaps(z: np.ndarray) -> np.ndarray:
    if z.shape[0] < 2:
        return np.full(z.shape[0], np.inf)
    D = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(D, np.inf)
    return D.min(axis=1)


def _spectrum(model: ModelConfig, base, t: float) -> np.ndarray:
    return np.linalg.eigvals(build_matrix(model, base, t))


def track(
    model: ModelConfig,
    base,
    t_start: float,
    t_end: float,
    initial_steps: int = 100,
    max_depth: int = MAX_REFINEMENT_DEPTH,
) -> TrajectoryBundle:
    """Follow every eigenvalue of ``G(t)`` from ``t_start`` to ``t_end``.

    The uniform grid has ``initial_steps + 1`` points. Paths are labelled by
    the lexicographic order of the spectrum at ``t_start``.

    Raises
    ------
    RefinementExhausted
        When ``max_depth`` bisections cannot separate a near-collision.
    """
    if initial_steps < 2:
        raise InvalidArgument("initial_steps must be at least 2")
    grid0 = np.linspace(float(t_start), float(t_end), int(initial_steps) + 1)
    start = _spectrum(model, base, grid0[0])
    start = start[_lex_order(start)]

    times = [grid0[0]]
    points = [start]
    base_flags = [True]
    state = {"refinements": 0}
    min_gap = min_pairwise_gap(start)[0]

    def advance(ta, prev, tb, raw_next, depth):
        nonlocal min_gap
        perm = match_sets(prev, raw_next)
        cand = raw_next[perm]
        if np.all(np.abs(cand - prev) <= 0.5 * _nearest_neighbour_gaps(prev)):
            return [(tb, cand)]
        if depth >= max_depth:
            raise RefinementExhausted(ta, tb, depth)
        state["refinements"] += 1
        tm = 0.5 * (ta + tb)
        mid = _spectrum(model, base, tm)
        left = advance(ta, prev, tm, mid, depth + 1)
        right = advance(tm, left[-1][1], tb, raw_next, depth + 1)
        return left + right

    for ta, tb in zip(grid0[:-1], grid0[1:]):
        raw = _spectrum(model, base, tb)
        segment = advance(ta, points[-1], tb, raw, 0)
        for k, (t, z) in enumerate(segment):
            times.append(t)
            points.append(z)
            base_flags.append(k == len(segment) - 1)
            min_gap = min(min_gap, min_pairwise_gap(z)[0])

    return TrajectoryBundle(
        grid=np.array(times),
        paths=np.array(points).T,
        min_gap=float(min_gap),
        refinements=state["refinements"],
        on_base_grid=np.array(base_flags),
    )


def initial_velocities(model: ModelConfig, base, t0: float | None = None) -> np.ndarray:
    """First-order eigenvalue velocities ``L_j (dG/dt) R_j`` at ``t0``.

    ``t0`` defaults to 0 for the additive and anti-Hermitian families (the
    unperturbed base) and to 1 for the multiplicative one (where ``G(1) = U``).
    The velocities are ordered like :func:`eigen_decompose` of ``G(t0)``;
    the positions are returned alongside by :func:`velocity_field`.
    """
    return velocity_field(model, base, t0)[1]


def velocity_field(model: ModelConfig, base, t0: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues of ``G(t0)`` and their first-order velocities."""
    if t0 is None:
        t0 = 1.0 if model.kind is ModelKind.MULTIPLICATIVE else 0.0
    es = eigen_decompose(build_matrix(model, base, t0))
    P = perturbation_derivative(model, base)
    vel = np.einsum("ij,ji->i", es.lefts @ P, es.rights)
    return es.values, vel


def ode_rhs(positions: np.ndarray, velocities: np.ndarray) -> np.ndarray:
    """Right-hand side ``2 l_j' sum_{k != j} l_k' / (l_j - l_k)``."""
    D = positions[:, None] - positions[None, :]
    np.fill_diagonal(D, 1.0)
    inv = 1.0 / D
    np.fill_diagonal(inv, 0.0)
    return 2.0 * velocities * (inv @ velocities)


def ode_residual(bundle: TrajectoryBundle, absolute: bool = False) -> np.ndarray:
    """Residual of the trajectory ODE along a tracked bundle.

    Uses central differences on the uniform base grid. Returns an array of
    shape ``(n, m - 2)`` with ``|lhs - rhs| / (|lhs| + |rhs| + 1e-12)``, or
    ``|lhs - rhs|`` when ``absolute`` is set. The relative form is only
    meaningful where paths curve: on a straight path both sides vanish and
    rounding in the second difference alone gives a relative value of order 1.

    Raises
    ------
    GapTooSmall
        If the bundle's minimum gap is not above ten grid spacings.
    """
    grid, paths = bundle.base_grid()
    if grid.shape[0] < 3:
        raise InvalidArgument("need at least three grid points")
    steps = np.diff(grid)
    h = steps[0]
    if not np.allclose(steps, h, rtol=1e-9, atol=0.0):
        raise InvalidArgument("base grid is not uniform")
    h = abs(h)
    if bundle.n > 1 and not bundle.min_gap > 10.0 * h:
        raise GapTooSmall(f"min gap {bundle.min_gap:.3e} not above 10 x step {h:.3e}")
    sgn = np.sign(grid[1] - grid[0])
    first = sgn * (paths[:, 2:] - paths[:, :-2]) / (2.0 * h)
    second = (paths[:, 2:] - 2.0 * paths[:, 1:-1] + paths[:, :-2]) / (h * h)
    rhs = np.empty_like(second)
    for k in range(second.shape[1]):
        rhs[:, k] = ode_rhs(paths[:, k + 1], first[:, k])
    diff = np.abs(second - rhs)
    if absolute:
        return diff
    return diff / (np.abs(second) + np.abs(rhs) + 1e-12)


def integrate_ode(positions, velocities, t_span, step: float) -> TrajectoryBundle:
    """Classical RK4 for the trajectory ODE from ``t_span[0]`` to ``t_span[1]``.

    The last step is shortened to land exactly on ``t_span[1]``. Integration
    stops with :class:`CollisionAbort` as soon as two positions come within
    ``1e-6`` of each other. It also stops when the step can no longer resolve
    the closest pair: if ``|h| max|lambda'|`` exceeds their distance, or the
    step produced non-finite values. Without that guard a fixed step can jump
    over a coalescence and continue on garbage.
    """
    z = np.array(positions, dtype=complex).reshape(-1)
    p = np.array(velocities, dtype=complex).reshape(-1)
    if z.shape != p.shape:
        raise CardinalityMismatch("positions and velocities differ in length")
    t0, t1 = float(t_span[0]), float(t_span[1])
    if step <= 0:
        raise InvalidArgument("step must be positive")
    count = max(1, int(np.ceil(abs(t1 - t0) / step - 1e-9)))
    grid = np.linspace(t0, t1, count + 1)

    def check(t, zz):
        gap, pair = min_pairwise_gap(zz)
        if gap < COLLISION_GAP:
            raise CollisionAbort(t, pair, gap)
        return gap

    min_gap = check(t0, z)
    out_z = [z.copy()]
    out_p = [p.copy()]
    for ta, tb in zip(grid[:-1], grid[1:]):
        h = tb - ta
        if z.shape[0] > 1:
            gap, pair = min_pairwise_gap(z)
            if abs(h) * float(np.max(np.abs(p))) > gap:
                raise CollisionAbort(ta, pair, gap)
        with np.errstate(all="ignore"):
            k1z, k1p = p, ode_rhs(z, p)
            k2z = p + 0.5 * h * k1p
            k2p = ode_rhs(z + 0.5 * h * k1z, k2z)
            k3z = p + 0.5 * h * k2p
            k3p = ode_rhs(z + 0.5 * h * k2z, k3z)
            k4z = p + h * k3p
            k4p = ode_rhs(z + h * k3z, k4z)
            z_new = z + (h / 6.0) * (k1z + 2 * k2z + 2 * k3z + k4z)
            p_new = p + (h / 6.0) * (k1p + 2 * k2p + 2 * k3p + k4p)
        if not (np.all(np.isfinite(z_new)) and np.all(np.isfinite(p_new))):
            gap, pair = min_pairwise_gap(z)
            raise CollisionAbort(ta, pair, gap)
        z, p = z_new, p_new
        min_gap = min(min_gap, check(tb, z))
        out_z.append(z.copy())
        out_p.append(p.copy())
    return TrajectoryBundle(
        grid=grid,
        paths=np.array(out_z).T,
        min_gap=float(min_gap),
        velocities=np.array(out_p).T,
    )


def large_t_limits(model: ModelConfig, base, method: str | None = None) -> np.ndarray:
    """The ``n - 1`` finite limits of the spectrum as ``t -> +-infinity``.

    They are the zeros of the spectral function. ``method="polynomial"``
    (default for the additive model) finds the roots of the numerator
    ``sum_j (w^* R_j)(L_j v) prod_{k != j} (z - lambda_k)`` of its
    eigen-expansion. ``method="compression"`` (default for the anti-Hermitian
    model) computes them as the spectrum of the oblique compression
    ``(I - v w^* / w^* v) G`` restricted to ``ker w^*`` (for ``w = v``, and for
    the anti-Hermitian model, the orthogonal compression of the base to the
    complement of ``v``). The two routes agree to about 1e-10 at ``n = 50``.
    """
    if model.kind is ModelKind.MULTIPLICATIVE:
        raise KindMismatch("large-t limits are defined for additive and anti-Hermitian models")
    B = np.asarray(base, dtype=complex)
    build_matrix(model, B, 0.0)  # validates base against the kind
    v = model.v
    w = model.left
    n = B.shape[0]
    if n == 1:
        return np.empty(0, dtype=complex)
    if method is None:
        method = "polynomial" if model.kind is ModelKind.ADDITIVE else "compression"
    if method == "polynomial":
        es = eigen_decompose(B)
        weights = (w.conj() @ es.rights) * (es.lefts @ v)
        coeffs = np.zeros(n, dtype=complex)
        for j in range(n):
            others = np.delete(es.values, j)
            coeffs += weights[j] * np.poly(others)
        return np.roots(coeffs)
    if method != "compression":
        raise InvalidArgument(f"unknown method {method!r}")
    overlap = np.vdot(w, v)
    if abs(overlap) < 1e-12:
        raise InvalidArgument("w^* v vanishes; oblique compression undefined")
    # Orthonormal basis of ker w^* from a full QR of w.
    Q, _ = np.linalg.qr(w.reshape(-1, 1), mode="complete")
    K = Q[:, 1:]
    proj = np.eye(n) - np.outer(v, w.conj()) / overlap
    return np.linalg.eigvals(K.conj().T @ proj @ B @ K)


def split_outlier(spectrum, limits) -> tuple[int, np.ndarray]:
    """Match ``n - 1`` limit points to ``n`` eigenvalues.

    Returns the index of the unmatched eigenvalue (the escaping outlier) and,
    for each limit, the index of its matched eigenvalue.
    """
    z = np.asarray(spectrum, dtype=complex)
    lim = np.asarray(limits, dtype=complex)
    if lim.shape[0] != z.shape[0] - 1:
        raise CardinalityMismatch("expected exactly one more eigenvalue than limits")
    rows, cols = linear_sum_assignment(np.abs(lim[:, None] - z[None, :]))
    matched = np.empty(lim.shape[0], dtype=int)
    matched[rows] = cols
    outlier = int(np.setdiff1d(np.arange(z.shape[0]), cols)[0])
    return outlier, matched
