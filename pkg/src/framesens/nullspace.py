"""Numerical rank, minor selection, cofactor null vectors, SVD null bases.

Rank is decided against an absolute singular-value threshold; the default
policy is ``max(shape) * eps * sigma_max``, overridable per call.  Alongside
the rank, :func:`rank_profile` records a nonsingular minor found by greedy
column-then-row pivoting on the singular vectors, which makes the cofactor
construction reproducible.  The constructive cofactor null vector is exact
linear algebra (determinants of one bordered submatrix); the SVD null basis
is the production path for larger or higher-deficiency matrices.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    CofactorOrderLimit,
    DeficiencyZero,
    MinorSelectionError,
    ToleranceAmbiguity,
    ZeroVector,
)

# Determinant-based construction is kept to small orders by default; raise
# per call if you really want cofactors of a bigger matrix.
COFACTOR_MAX_ORDER = 12


def _as_matrix(M) -> np.ndarray:
    A = np.asarray(M, dtype=float)
    if A.ndim != 2 or A.size == 0:
        raise ValueError("expected a non-empty 2-D real matrix")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def default_tolerance(M) -> float:
    """Absolute rank threshold: ``max(shape) * eps * sigma_max`` (floored at
    ``max(shape) * eps`` for the zero matrix)."""
    A = _as_matrix(M)
    smax = float(np.linalg.norm(A, 2))
    scale = max(A.shape) * np.finfo(float).eps
    return scale * smax if smax > 0 else scale


def _resolve_tol(A: np.ndarray, tol) -> float:
    if tol is None:
        return default_tolerance(A)
    tol = float(tol)
    if tol <= 0:
        raise ValueError("tol must be positive")
    return tol


@dataclass(frozen=True, eq=False)
class RankProfile:
    """Numerical rank of a matrix plus the evidence behind the decision.

    ``deficiency`` is the kernel dimension (columns minus rank); for square
    systems that is ``n - rank``.  ``minor_rows``/``minor_cols`` select an
    ``r x r`` submatrix whose smallest singular value exceeds ``tol``.
    """

    rank: int
    deficiency: int
    minor_rows: tuple[int, ...]
    minor_cols: tuple[int, ...]
    singular_values: np.ndarray
    tol: float


def _pivot_order(A: np.ndarray, count: int) -> np.ndarray:
    _, piv = scipy.linalg.qr(A, mode="r", pivoting=True)
    return np.sort(piv[:count])


def _smallest_sv(A: np.ndarray) -> float:
    return float(np.linalg.svd(A, compute_uv=False)[-1])


def _select_minor(A, U, Vt, rank, tol):
    """Greedy column-then-row pivoting on the rank-revealing factors."""
    if rank == 0:
        return (), ()
    cols = _pivot_order(Vt[:rank, :], rank)
    rows = _pivot_order(U[:, :rank].T, rank)
    if _smallest_sv(A[np.ix_(rows, cols)]) > tol:
        return tuple(int(i) for i in rows), tuple(int(j) for j in cols)
    # Pivot on the matrix itself when the singular-vector pick is too tight.
    cols = _pivot_order(A, rank)
    rows = _pivot_order(A[:, cols].T, rank)
    if _smallest_sv(A[np.ix_(rows, cols)]) > tol:
        return tuple(int(i) for i in rows), tuple(int(j) for j in cols)
    raise MinorSelectionError(
        f"no {rank}x{rank} minor with smallest singular value above {tol:g}"
    )


def rank_profile(M, tol: float | None = None) -> RankProfile:
    """Numerical rank of ``M`` with an explicit absolute threshold.

    Warns :class:`ToleranceAmbiguity` (without failing) when some singular
    value lies within a decade of ``tol``, i.e. in ``[tol/10, 10*tol]``.
    """
    A = _as_matrix(M)
    tol_eff = _resolve_tol(A, tol)
    U, s, Vt = np.linalg.svd(A)
    rank = int(np.count_nonzero(s > tol_eff))
    if np.any((s >= tol_eff / 10.0) & (s <= tol_eff * 10.0)):
        warnings.warn(
            ToleranceAmbiguity(
                "a singular value lies within a decade of the rank threshold; "
                "the rank decision is fragile"
            ),
            stacklevel=2,
        )
    rows, cols = _select_minor(A, U, Vt, rank, tol_eff)
    return RankProfile(
        rank=rank,
        deficiency=A.shape[1] - rank,
        minor_rows=rows,
        minor_cols=cols,
        singular_values=s,
        tol=tol_eff,
    )


def _completion_perm(selected, size) -> list[int]:
    rest = [i for i in range(size) if i not in set(selected)]
    return list(selected) + rest


def cofactor_null_vector(M, profile: RankProfile, max_order: int | None = None) -> np.ndarray:
    """Constructive null vector from cofactors of a bordered minor.

    Rows and columns are permuted so the recorded minor occupies the leading
    ``r x r`` block; component ``k`` of the permuted result is the signed
    cofactor of entry ``(r+1, k)`` of the leading ``(r+1) x (r+1)`` submatrix
    (zero beyond it), mapped back through the column permutation.  The
    ``(r+1)``-th permuted component therefore equals ``det(minor)``, which is
    what guarantees the vector is nonzero.  The result is unnormalized.
    """
    A = _as_matrix(M)
    n = A.shape[0]
    if A.shape[1] != n:
        raise ValueError("cofactor construction needs a square matrix")
    limit = COFACTOR_MAX_ORDER if max_order is None else int(max_order)
    if n > limit:
        raise CofactorOrderLimit(
            f"matrix order {n} exceeds the cofactor-path limit {limit}; "
            "use the orthogonal method or raise max_order"
        )
    r = profile.rank
    if r >= n:
        raise DeficiencyZero("matrix has full rank; no null vector exists")
    row_perm = _completion_perm(profile.minor_rows, n)
    col_perm = _completion_perm(profile.minor_cols, n)
    bordered = A[np.ix_(row_perm, col_perm)][: r + 1, : r + 1]
    f_perm = np.zeros(n)
    top = bordered[:r, :]
    for k in range(r + 1):
        keep = [c for c in range(r + 1) if c != k]
        f_perm[k] = (-1.0) ** (r + k) * np.linalg.det(top[:, keep])
    f = np.zeros(n)
    f[col_perm] = f_perm
    return f


def normalize(f) -> np.ndarray:
    """Unit vector along ``f`` with a deterministic sign: the component of
    largest magnitude (lowest index on ties) is made positive.

    Pre-scaling by the largest magnitude keeps the squared norm from
    under- or overflowing at extreme scales.
    """
    v = np.asarray(f, dtype=float)
    pivot = int(np.argmax(np.abs(v)))
    scale = abs(v[pivot])
    if scale == 0.0:
        raise ZeroVector("cannot normalize the zero vector")
    v = v / scale
    v = v / float(np.linalg.norm(v))
    return -v if v[pivot] < 0 else v


def null_basis(M, tol: float | None = None) -> list[np.ndarray]:
    """Orthonormal basis of the numerical null space (may be empty).

    Right singular vectors whose singular values fall at or below ``tol``,
    ordered by ascending singular value, each sign-normalized as in
    :func:`normalize`.
    """
    A = _as_matrix(M)
    tol_eff = _resolve_tol(A, tol)
    _, s, Vt = np.linalg.svd(A)
    n_cols = A.shape[1]
    svals = np.concatenate([s, np.zeros(n_cols - s.size)])
    rank = int(np.count_nonzero(svals > tol_eff))
    order = np.argsort(svals[rank:], kind="stable")
    return [normalize(Vt[rank + int(i), :]) for i in order]
