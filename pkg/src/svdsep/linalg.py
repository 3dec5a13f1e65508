"""Dense decompositions and energy functionals on real matrices.

Everything here is a pure function of its inputs; results are plain frozen
dataclasses wrapping float64 arrays. Singular vectors follow a fixed sign
convention (largest-magnitude entry of each left vector is nonnegative) so
repeated calls on identical input are bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePencilError, InvalidInputError, ShapeError
from .validation import check_index_range, check_matrix, check_unit_vector

__all__ = [
    "SpectrumResult",
    "GsvdResult",
    "svd",
    "gsvd",
    "frobenius_energy",
    "oriented_energy",
    "truncated_sum",
]

_EPS = np.finfo(np.float64).eps


@dataclass(frozen=True)
class SpectrumResult:
    """Full singular value decomposition of a real matrix.

    Attributes
    ----------
    left_basis : ndarray, shape (m, m)
        Orthogonal matrix of left singular vectors (columns).
    right_basis : ndarray, shape (n, n)
        Orthogonal matrix of right singular vectors (columns).
    singular_values : ndarray, shape (min(m, n),)
        Nonnegative values in non-increasing order.
    numerical_rank : int
        Count of singular values above ``rank_tolerance * singular_values[0]``.
    rank_tolerance : float
        The relative tolerance that was applied.
    """

    left_basis: np.ndarray
    right_basis: np.ndarray
    singular_values: np.ndarray
    numerical_rank: int
    rank_tolerance: float

    @property
    def shape(self) -> tuple[int, int]:
        return (self.left_basis.shape[0], self.right_basis.shape[0])


@dataclass(frozen=True)
class GsvdResult:
    """Joint decomposition A = U C X^T, B = V S X^T with C^T C + S^T S = I.

    ``alpha`` and ``beta`` are the diagonals of C and S in storage order:
    alpha non-decreasing, beta non-increasing, so that the nonzero betas
    occupy the representable diagonal of S even when B has fewer rows than
    columns. ``generalized_values`` is the derived sequence alpha/beta
    sorted non-increasing, with ``inf`` marking directions where beta
    vanishes (A dominates B completely); those sort first.
    """

    u_basis: np.ndarray      # (m, m) orthogonal
    v_basis: np.ndarray      # (s, s) orthogonal
    x_factor: np.ndarray     # (n, n) nonsingular
    alpha: np.ndarray        # (n,)
    beta: np.ndarray         # (n,)
    generalized_values: np.ndarray  # (n,) descending, inf first

    def c_matrix(self) -> np.ndarray:
        c = np.zeros((self.u_basis.shape[0], self.alpha.size))
        np.fill_diagonal(c, self.alpha)
        return c

    def s_matrix(self) -> np.ndarray:
        s = np.zeros((self.v_basis.shape[0], self.beta.size))
        np.fill_diagonal(s, self.beta)
        return s

    def reconstruct_a(self) -> np.ndarray:
        return self.u_basis @ self.c_matrix() @ self.x_factor.T

    def reconstruct_b(self) -> np.ndarray:
        return self.v_basis @ self.s_matrix() @ self.x_factor.T


def _fix_signs(u: np.ndarray, vt: np.ndarray) -> None:
    """Make the largest-magnitude entry of each left vector nonnegative.

    The sign flip propagates to the paired right vector; unpaired basis
    vectors are normalized by their own largest entry. In-place.
    """
    m, mm = u.shape
    k = min(mm, vt.shape[0])
    if k:
        idx = np.argmax(np.abs(u[:, :k]), axis=0)
        signs = np.where(u[idx, np.arange(k)] < 0, -1.0, 1.0)
        u[:, :k] *= signs
        vt[:k, :] *= signs[:, np.newaxis]
    for i in range(k, mm):
        if u[np.argmax(np.abs(u[:, i])), i] < 0:
            u[:, i] *= -1.0
    for i in range(k, vt.shape[0]):
        if vt[i, np.argmax(np.abs(vt[i, :]))] < 0:
            vt[i, :] *= -1.0


def svd(a, rank_tolerance: float | None = None) -> SpectrumResult:
    """Full SVD with deterministic signs and a numerical rank.

    Parameters
    ----------
    a : array-like, shape (m, n)
        Real matrix with finite entries.
    rank_tolerance : float, optional
        Relative tolerance: rank counts values above
        ``rank_tolerance * sigma_1``. Defaults to ``max(m, n) * eps``.
    """
    arr = check_matrix(a, "A")
    if rank_tolerance is None:
        rank_tolerance = max(arr.shape) * _EPS
    elif rank_tolerance < 0:
        raise InvalidInputError(f"rank_tolerance must be nonnegative, got {rank_tolerance}")
    u, s, vt = np.linalg.svd(arr, full_matrices=True)
    _fix_signs(u, vt)
    threshold = rank_tolerance * (s[0] if s.size else 0.0)
    rank = int(np.count_nonzero(s > threshold))
    return SpectrumResult(
        left_basis=u,
        right_basis=vt.T.copy(),
        singular_values=s,
        numerical_rank=rank,
        rank_tolerance=float(rank_tolerance),
    )


def gsvd(a, b) -> GsvdResult:
    """Generalized SVD of the pair (A, B) via the CS-decomposition route.

    Requires A with at least as many rows as columns and a stacked matrix
    [A; B] of full column rank. The construction QR-factors the stack,
    splits the orthonormal factor, takes the SVD of the top block, and
    orthogonalizes the image of the bottom block, which is numerically
    stabler than forming A^T A and B^T B.

    Raises
    ------
    ShapeError
        If the column counts differ or A has fewer rows than columns.
    DegeneratePencilError
        If [A; B] is rank deficient (the C^T C + S^T S = I normalization
        is unattainable on the null directions).
    """
    a_arr = check_matrix(a, "A")
    b_arr = check_matrix(b, "B")
    m, n = a_arr.shape
    s_rows = b_arr.shape[0]
    if b_arr.shape[1] != n:
        raise ShapeError(f"A and B must share a column count, got {n} and {b_arr.shape[1]}")
    if m < n:
        raise ShapeError(f"A must have at least as many rows as columns, got {a_arr.shape}")

    stacked = np.vstack([a_arr, b_arr])
    stack_sv = np.linalg.svd(stacked, compute_uv=False)
    if stack_sv[-1] <= max(stacked.shape) * _EPS * stack_sv[0]:
        raise DegeneratePencilError(
            "stacked matrix [A; B] is rank deficient; the pair has no full generalized decomposition"
        )

    q, r_stack = np.linalg.qr(stacked)  # reduced: q is (m+s, n), r is (n, n)
    q1, q2 = q[:m], q[m:]

    u, alpha, wt = np.linalg.svd(q1, full_matrices=True)
    _fix_signs(u, wt)
    # Reorder so alpha ascends: nonzero betas then land on the leading
    # diagonal of S, which is the only representable layout when s < n.
    alpha = np.minimum(alpha[::-1], 1.0)
    u = np.hstack([u[:, n - 1 :: -1], u[:, n:]]) if m > n else u[:, ::-1]
    w = wt[::-1].T

    t = q2 @ w  # columns orthogonal with norms beta_i
    v, r_t = np.linalg.qr(t, mode="complete")
    diag = np.diagonal(r_t).copy()
    flip = diag < 0
    v[:, : diag.size][:, flip] *= -1.0
    beta = np.zeros(n)
    beta[: diag.size] = np.abs(diag)

    x = r_stack.T @ w

    inf_tol = max(m + s_rows, n) * _EPS
    with np.errstate(divide="ignore"):
        values = np.where(beta > inf_tol, alpha / np.maximum(beta, inf_tol), np.inf)
    return GsvdResult(
        u_basis=u,
        v_basis=v,
        x_factor=x,
        alpha=alpha,
        beta=beta,
        generalized_values=values[::-1].copy(),
    )


def frobenius_energy(a) -> float:
    """Total energy of a matrix: the sum of its squared entries."""
    arr = check_matrix(a, "A")
    return float(np.sum(arr * arr))


def oriented_energy(a, q) -> float:
    """Energy of the columns of A projected onto the unit direction q."""
    arr = check_matrix(a, "A")
    q_arr = check_unit_vector(q, arr.shape[0])
    proj = q_arr @ arr
    return float(np.sum(proj * proj))


def truncated_sum(spectrum: SpectrumResult, first: int, last: int) -> np.ndarray:
    """Partial reconstruction from singular triples ``first..last`` (1-based, inclusive)."""
    check_index_range(first, last, spectrum.numerical_rank, "truncation range")
    u = spectrum.left_basis[:, first - 1 : last]
    s = spectrum.singular_values[first - 1 : last]
    v = spectrum.right_basis[:, first - 1 : last]
    return (u * s) @ v.T
