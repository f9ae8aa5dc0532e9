"""Particular solutions and the general-solution decomposition for D x = b.

Consistency (rank of the augmented matrix equals rank of the matrix) is
checked at the query point; when it holds, a particular solution comes from
a bordered square system: keep the rows covering the selected nonsingular
minor and pin each remaining variable to the matching right-hand-side
component through an appended identity block.  Any solution then splits as
the particular one plus a combination of the homogeneous frame.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InconsistentSystem, SingularAugmented
from .frame_field import Frame, frame_solutions
from .nullspace import RankProfile, _completion_perm, _resolve_tol, rank_profile
from .param_system import as_point


@dataclass(frozen=True, eq=False)
class ConsistencyCheck:
    """Rank profiles of M and [M | b]; consistent when the ranks agree.

    Inconsistency is data, not an error.
    """

    matrix_profile: RankProfile
    augmented_profile: RankProfile
    consistent: bool


@dataclass(frozen=True, eq=False)
class GeneralSolution:
    """Particular solution plus the homogeneous frame at one point."""

    particular: np.ndarray
    homogeneous: Frame
    at: np.ndarray | None = None


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Coefficients of a vector over a general solution's frame.

    ``residual`` is the norm of what remains outside span(frame) after
    removing the particular solution; it vanishes (to tolerance) exactly
    when the decomposed vector solves the system.  ``within_tol`` reports
    the comparison when a tolerance was supplied.
    """

    coefficients: np.ndarray
    residual: float
    within_tol: bool | None = None


def check_consistency(M, b, tol: float | None = None) -> ConsistencyCheck:
    """Compare rank(M) with rank([M | b]) under one shared threshold."""
    A = np.asarray(M, dtype=float)
    rhs = np.asarray(b, dtype=float)
    if rhs.shape != (A.shape[0],):
        raise ValueError(f"rhs shape {rhs.shape} does not match matrix rows {A.shape[0]}")
    tol_eff = _resolve_tol(A, tol)
    matrix_profile = rank_profile(A, tol_eff)
    augmented_profile = rank_profile(np.column_stack([A, rhs]), tol_eff)
    return ConsistencyCheck(
        matrix_profile=matrix_profile,
        augmented_profile=augmented_profile,
        consistent=matrix_profile.rank == augmented_profile.rank,
    )


def particular_solution(M, b, profile: RankProfile | None = None, tol=None) -> np.ndarray:
    """One solution of ``M x = b`` via the bordered square system.

    After permuting so the recorded minor leads, the system solved is

        [ A  B ] [x_head]   [b_head]
        [ 0  I ] [x_tail] = [b_tail]

    with A the minor; the appended equations pin each non-minor variable to
    the right-hand-side component of the matching non-minor row, so those
    components of the result equal b exactly (under the recorded
    permutation).  Residual against the original system is verified and
    InconsistentSystem raised when it exceeds ``10 * tol * (1 + ||b||)``.
    """
    A = np.asarray(M, dtype=float)
    rhs = np.asarray(b, dtype=float)
    n = A.shape[0]
    if A.shape[1] != n:
        raise ValueError("particular_solution expects a square matrix")
    if rhs.shape != (n,):
        raise ValueError(f"rhs shape {rhs.shape} does not match order {n}")
    tol_eff = _resolve_tol(A, tol)
    if profile is None:
        profile = rank_profile(A, tol_eff)
    r = profile.rank
    rows = list(profile.minor_rows)
    cols = list(profile.minor_cols)
    tail_rows = _completion_perm(rows, n)[r:]
    tail_cols = _completion_perm(cols, n)[r:]

    x = np.zeros(n)
    x[tail_cols] = rhs[tail_rows]
    if r > 0:
        minor = A[np.ix_(rows, cols)]
        head_rhs = rhs[rows] - A[np.ix_(rows, tail_cols)] @ x[tail_cols]
        try:
            x[cols] = np.linalg.solve(minor, head_rhs)
        except np.linalg.LinAlgError as exc:
            raise SingularAugmented(
                "selected minor is numerically singular; retry with different pivoting"
            ) from exc
    residual = float(np.linalg.norm(A @ x - rhs))
    bound = 10.0 * tol_eff * (1.0 + float(np.linalg.norm(rhs)))
    if residual > bound:
        raise InconsistentSystem(
            f"residual {residual:g} exceeds {bound:g}; right-hand side is outside "
            "the column space"
        )
    return x


def general_solution(system, at, tol=None, method="auto") -> GeneralSolution:
    """Particular solution plus homogeneous frame of a system with rhs."""
    if not system.has_rhs:
        raise ValueError("system has no right-hand side")
    pt = as_point(at, system.N)
    pair = system.evaluate(pt)
    A, rhs = pair.matrix, pair.rhs
    tol_eff = _resolve_tol(A, tol)
    check = check_consistency(A, rhs, tol_eff)
    if not check.consistent:
        raise InconsistentSystem(
            f"rank of [M | b] is {check.augmented_profile.rank} but rank of M is "
            f"{check.matrix_profile.rank} at {pt.tolist()}"
        )
    particular = particular_solution(A, rhs, check.matrix_profile, tol_eff)
    homogeneous = frame_solutions(A, tol_eff, method=method, at=pt)
    return GeneralSolution(particular=particular, homogeneous=homogeneous, at=pt)


def decompose(x, solution: GeneralSolution, tol: float | None = None) -> Decomposition:
    """Coefficients of ``x`` over the frame: ``lambda_i = <x_i, x - x_p>``."""
    vec = np.asarray(x, dtype=float)
    delta = vec - solution.particular
    coeffs = np.array([float(v @ delta) for v in solution.homogeneous])
    recon = delta.copy()
    for lam, v in zip(coeffs, solution.homogeneous):
        recon -= lam * v
    residual = float(np.linalg.norm(recon))
    within = None if tol is None else residual <= float(tol)
    return Decomposition(coefficients=coeffs, residual=residual, within_tol=within)
