"""Finite-difference oracle for null-direction derivatives, plus a
three-way consistency report (direct vs adjoint vs finite differences).

The oracle deliberately shares nothing with the sensitivity solvers beyond
system evaluation and the SVD null basis: stencil directions are re-extracted
from scratch at each point and sign-aligned to the caller's anchor (alignment
to the anchor is locally stable, whereas the global largest-component sign
convention can flip discontinuously inside a stencil).
"""

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import AlignmentAmbiguous, DeficiencyChanged, FramesensError
from .nullspace import null_basis
from .param_system import as_point
from .sensitivity import Objective, adjoint_prepare, direct_sensitivity


@dataclass(frozen=True, eq=False)
class FDDerivative:
    """Central-difference derivative of the aligned unit null direction.

    ``value`` is the plain central difference at ``h``; ``value_half`` the
    one at ``h/2``; ``refined`` their Richardson combination
    ``(4*value_half - value) / 3``.
    """

    value: np.ndarray
    value_half: np.ndarray
    refined: np.ndarray
    h: float


def _aligned_direction(system, pt, anchor, tol):
    basis = null_basis(system.evaluate(pt).matrix, tol)
    if len(basis) != 1:
        raise DeficiencyChanged(
            f"deficiency {len(basis)} != 1 at stencil point {pt.tolist()}"
        )
    x = basis[0]
    score = float(x @ anchor)
    if abs(score) < 0.1:
        raise AlignmentAmbiguous(
            f"|<x, anchor>| = {abs(score):.3g} < 0.1 at {pt.tolist()}; "
            "step too large near a fast rotation"
        )
    return x if score > 0 else -x


def fd_null_derivative(system, at, anchor, param_index: int, h: float = 1e-5,
                       tol=None) -> FDDerivative:
    """Central difference of the anchor-aligned unit null direction.

    Evaluates the four stencil points ``at +- h e_j`` and ``at +- h/2 e_j``
    (the automatic halving), so the Richardson refinement comes for free.
    The deficiency must be one at every stencil point.
    """
    pt = as_point(at, system.N)
    if not 1 <= param_index <= system.N:
        raise IndexError(f"parameter index {param_index} out of range 1..{system.N}")
    u = np.asarray(anchor, dtype=float)
    jj = param_index - 1

    def central(step):
        up, dn = pt.copy(), pt.copy()
        up[jj] += step
        dn[jj] -= step
        x_up = _aligned_direction(system, up, u, tol)
        x_dn = _aligned_direction(system, dn, u, tol)
        return (x_up - x_dn) / (2.0 * step)

    coarse = central(h)
    fine = central(h / 2.0)
    return FDDerivative(
        value=coarse,
        value_half=fine,
        refined=(4.0 * fine - coarse) / 3.0,
        h=float(h),
    )


def scale_floored_gap(a, b) -> float:
    """Relative disagreement ``||a - b|| / max(||a||, ||b||, 1)``.

    The unit floor keeps the metric meaningful when both derivatives are
    near zero (corpus derivatives are order one).
    """
    va, vb = np.asarray(a, float), np.asarray(b, float)
    return float(np.linalg.norm(va - vb) / max(np.linalg.norm(va), np.linalg.norm(vb), 1.0))


@dataclass(frozen=True, eq=False)
class ReportRow:
    param_index: int
    direct: np.ndarray | None = None
    adjoint: np.ndarray | None = None
    fd: np.ndarray | None = None
    err_direct_adjoint: float | None = None
    err_direct_fd: float | None = None
    err_adjoint_fd: float | None = None
    failures: tuple[str, ...] = ()


def _row_ok(row: ReportRow, threshold_direct_adjoint: float, threshold_fd: float) -> bool:
    if row.failures:
        return False
    return (
        row.err_direct_adjoint <= threshold_direct_adjoint
        and row.err_direct_fd <= threshold_fd
        and row.err_adjoint_fd <= threshold_fd
    )


@dataclass(frozen=True, eq=False)
class ConsistencyReport:
    """Per-parameter comparison of the three derivative routes.

    Verdict is pass only when every row computed cleanly and every pairwise
    gap sits below its threshold.
    """

    rows: tuple[ReportRow, ...]
    h: float
    threshold_direct_adjoint: float
    threshold_fd: float
    solve_count_direct: int
    solve_count_adjoint: int
    passed: bool

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def row_ok(self, row: ReportRow) -> bool:
        return _row_ok(row, self.threshold_direct_adjoint, self.threshold_fd)

    def to_table(self) -> str:
        lines = [
            f"{'param':>5}  {'direct-adjoint':>14}  {'direct-fd':>10}  "
            f"{'adjoint-fd':>10}  status"
        ]
        for row in self.rows:
            if row.failures:
                lines.append(f"{row.param_index:>5}  error: {'; '.join(row.failures)}")
                continue
            status = "ok" if self.row_ok(row) else "EXCEEDS"
            lines.append(
                f"{row.param_index:>5}  {row.err_direct_adjoint:>14.3e}  "
                f"{row.err_direct_fd:>10.3e}  {row.err_adjoint_fd:>10.3e}  {status}"
            )
        lines.append(
            f"solves: direct={self.solve_count_direct} adjoint={self.solve_count_adjoint}"
            f"  h={self.h:g}  verdict: {self.verdict}"
        )
        return "\n".join(lines)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(
            ["param", "err_direct_adjoint", "err_direct_fd", "err_adjoint_fd",
             "status", "failures"]
        )
        for row in self.rows:
            if row.failures:
                writer.writerow([row.param_index, "", "", "", "error",
                                 "; ".join(row.failures)])
            else:
                writer.writerow([
                    row.param_index,
                    f"{row.err_direct_adjoint:.17g}",
                    f"{row.err_direct_fd:.17g}",
                    f"{row.err_adjoint_fd:.17g}",
                    "ok" if self.row_ok(row) else "exceeds",
                    "",
                ])
        writer.writerow([])
        writer.writerow(["verdict", self.verdict])
        return buf.getvalue()


def consistency_report(system, at, anchor=None, tol=None, h: float = 1e-5,
                       threshold_direct_adjoint: float = 1e-8,
                       threshold_fd: float = 1e-6) -> ConsistencyReport:
    """Run all three derivative routes for every parameter and compare.

    Sub-operation errors are captured per row rather than aborting the
    remaining parameters; any captured error fails the verdict.
    """
    pt = as_point(at, system.N)
    n, N = system.n, system.N

    global_failures: list[str] = []
    u = None
    if anchor is not None:
        u = np.asarray(anchor, dtype=float)
    else:
        try:
            basis = null_basis(system.evaluate(pt).matrix, tol)
            if len(basis) != 1:
                raise DeficiencyChanged(f"deficiency {len(basis)} != 1 at query point")
            u = basis[0]
        except FramesensError as exc:
            global_failures.append(f"anchor: {exc}")

    adjoints = None
    solve_count_adjoint = 0
    if u is not None:
        try:
            adjoints = [
                adjoint_prepare(system, pt, Objective.coordinate(i), anchor=u, tol=tol)
                for i in range(1, n + 1)
            ]
            solve_count_adjoint = sum(adj.solve_count for adj in adjoints)
        except FramesensError as exc:
            global_failures.append(f"adjoint: {exc}")

    rows = []
    solve_count_direct = 0
    for j in range(1, N + 1):
        failures = list(global_failures)
        direct = adjoint_vec = fd_vec = None
        if u is not None:
            try:
                result = direct_sensitivity(system, pt, j, anchor=u, tol=tol)
                direct = result.derivative
                solve_count_direct += result.solve_count
            except FramesensError as exc:
                failures.append(f"direct: {exc}")
            if adjoints is not None:
                w = system.partial_derivative(pt, j).matrix @ u
                adjoint_vec = np.array([float(adj.p @ w) for adj in adjoints])
            try:
                fd_vec = fd_null_derivative(system, pt, u, j, h=h, tol=tol).value
            except FramesensError as exc:
                failures.append(f"fd: {exc}")
        if failures:
            rows.append(ReportRow(param_index=j, failures=tuple(failures)))
            continue
        rows.append(
            ReportRow(
                param_index=j,
                direct=direct,
                adjoint=adjoint_vec,
                fd=fd_vec,
                err_direct_adjoint=scale_floored_gap(direct, adjoint_vec),
                err_direct_fd=scale_floored_gap(direct, fd_vec),
                err_adjoint_fd=scale_floored_gap(adjoint_vec, fd_vec),
            )
        )

    passed = not global_failures and all(
        _row_ok(row, threshold_direct_adjoint, threshold_fd) for row in rows
    )
    return ConsistencyReport(
        rows=tuple(rows),
        h=float(h),
        threshold_direct_adjoint=threshold_direct_adjoint,
        threshold_fd=threshold_fd,
        solve_count_direct=solve_count_direct,
        solve_count_adjoint=solve_count_adjoint,
        passed=passed,
    )
