"""Parameter sensitivities of normalized null-direction branches.

Both methods differentiate the unit solution branch x(eps) of
``D(eps) x = 0`` passing through a prescribed anchor ``u`` at the query
point, and both require the null space there to be exactly one-dimensional.

Direct method (one singular solve per parameter):
    1. v  = particular solution of  D v = -(dD/deps_j) u
    2. c  = -v^T u                       (keeps the branch unit-norm)
    3. dx/deps_j = v + c u

Adjoint method (one transposed solve per scalar objective F):
    1. lambda = -<u, grad F(u)>, the unique value making
       D^T p = -lambda u - grad F(u)  solvable; p = its min-norm solution
    2. d F(x)/deps_j = p^T (dD/deps_j) u    (multiplications only)

Singular solves use the minimum-norm least-squares solution with an explicit
residual check; the step-2 corrections make both final answers independent
of which particular solution the solver returned.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    DeficiencyTooHigh,
    InconsistentDerivativeSystem,
    InvalidAnchor,
    NotDeficient,
)
from .nullspace import _resolve_tol, null_basis, rank_profile
from .param_system import as_point

_UNIT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Objective:
    """Scalar function of the solution vector with an available gradient."""

    kind: str
    index: int | None = None
    weights: np.ndarray | None = None
    value_fn: Callable[[np.ndarray], float] | None = None
    gradient_fn: Callable[[np.ndarray], np.ndarray] | None = None

    @classmethod
    def coordinate(cls, i: int) -> "Objective":
        """F(x) = x_i with ``i`` 1-based (matching the CLI convention)."""
        if i < 1:
            raise ValueError("coordinate index is 1-based")
        return cls(kind="coordinate", index=i)

    @classmethod
    def linear(cls, w) -> "Objective":
        """F(x) = w^T x."""
        return cls(kind="linear", weights=np.asarray(w, dtype=float))

    @classmethod
    def from_callable(cls, value_fn, gradient_fn) -> "Objective":
        return cls(kind="callable", value_fn=value_fn, gradient_fn=gradient_fn)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        if self.kind == "coordinate":
            if self.index > x.size:
                raise ValueError(
                    f"coordinate {self.index} out of range for dimension {x.size}"
                )
            g = np.zeros(x.size)
            g[self.index - 1] = 1.0
            return g
        if self.kind == "linear":
            if self.weights.shape != x.shape:
                raise ValueError("linear objective weight length mismatch")
            return self.weights.copy()
        return np.asarray(self.gradient_fn(x), dtype=float)

    def value(self, x: np.ndarray) -> float:
        if self.kind == "coordinate":
            return float(x[self.index - 1])
        if self.kind == "linear":
            return float(self.weights @ x)
        return float(self.value_fn(x))


@dataclass(frozen=True, eq=False)
class SensitivityQuery:
    """Bundle of a sensitivity request: system, point, optional anchor, and
    either a parameter index (direct) or an objective (adjoint)."""

    system: object
    at: np.ndarray
    anchor: np.ndarray | None = None
    param_index: int | None = None
    objective: Objective | None = None

    def run_direct(self, tol=None) -> "SensitivityResult":
        if self.param_index is None:
            raise ValueError("query has no parameter index")
        return direct_sensitivity(
            self.system, self.at, self.param_index, anchor=self.anchor, tol=tol
        )

    def prepare_adjoint(self, tol=None) -> "AdjointSolution":
        if self.objective is None:
            raise ValueError("query has no objective")
        return adjoint_prepare(
            self.system, self.at, self.objective, anchor=self.anchor, tol=tol
        )


@dataclass(frozen=True, eq=False)
class AdjointSolution:
    """Multipliers of one adjoint preparation: D^T p = -lambda u - grad F."""

    lambda_: float
    p: np.ndarray
    anchor: np.ndarray
    solve_count: int = 1


@dataclass(frozen=True, eq=False)
class SensitivityResult:
    derivative: np.ndarray
    method: str
    solve_count: int
    v: np.ndarray | None = None
    c: float | None = None
    anchor: np.ndarray | None = None
    param_index: int | None = None


@dataclass(frozen=True, eq=False)
class JacobianResult:
    """Full derivative matrix d x_i / d eps_j with its solve accounting."""

    matrix: np.ndarray
    method: str
    solve_count: int
    anchor: np.ndarray


def min_norm_solve(M, rhs, tol: float) -> tuple[np.ndarray, float]:
    """Minimum-norm least-squares solution of a (possibly singular) system,
    truncating singular values at ``tol``; returns (x, residual norm)."""
    A = np.asarray(M, dtype=float)
    b = np.asarray(rhs, dtype=float)
    U, s, Vt = np.linalg.svd(A)
    keep = s > tol
    coeffs = (U.T[keep] @ b) / s[keep]
    x = Vt[keep].T @ coeffs
    return x, float(np.linalg.norm(A @ x - b))


def _deficient_point_state(system, at, anchor, tol):
    """Evaluate, rank, and anchor checks shared by both methods."""
    pt = as_point(at, system.N)
    D = system.evaluate(pt).matrix
    tol_eff = _resolve_tol(D, tol)
    profile = rank_profile(D, tol_eff)
    if profile.deficiency == 0:
        raise NotDeficient("matrix is nonsingular at the query point")
    if profile.deficiency > 1:
        raise DeficiencyTooHigh(profile.deficiency)
    if anchor is None:
        u = null_basis(D, tol_eff)[0]
    else:
        u = np.asarray(anchor, dtype=float)
        if u.shape != (system.n,):
            raise InvalidAnchor(f"anchor shape {u.shape} does not match order {system.n}")
        if abs(np.linalg.norm(u) - 1.0) > _UNIT_TOL:
            raise InvalidAnchor("anchor must have unit norm")
        kernel_residual = float(np.linalg.norm(D @ u))
        if kernel_residual > 10.0 * tol_eff:
            raise InvalidAnchor(
                f"||D u|| = {kernel_residual:g} exceeds 10*tol = {10.0 * tol_eff:g}"
            )
    return pt, D, tol_eff, u


def direct_sensitivity(system, at, param_index: int, anchor=None, tol=None) -> SensitivityResult:
    """Derivative of the anchored unit null-direction branch with respect to
    one parameter; exactly one singular solve."""
    pt, D, tol_eff, u = _deficient_point_state(system, at, anchor, tol)
    dD = system.partial_derivative(pt, param_index).matrix
    rhs = -(dD @ u)
    v, residual = min_norm_solve(D, rhs, tol_eff)
    bound = 10.0 * tol_eff * (1.0 + float(np.linalg.norm(rhs)))
    if residual > bound:
        raise InconsistentDerivativeSystem(
            f"derivative system residual {residual:g} exceeds {bound:g}; the "
            "right-hand side has a component along the left null space "
            "(anchor or rank diagnosis is suspect)"
        )
    c = -float(v @ u)
    return SensitivityResult(
        derivative=v + c * u,
        method="direct",
        solve_count=1,
        v=v,
        c=c,
        anchor=u,
        param_index=param_index,
    )


def adjoint_prepare(system, at, objective: Objective, anchor=None, tol=None) -> AdjointSolution:
    """Solve the transposed multiplier system once for a scalar objective.

    ``lambda`` comes in closed form from the solvability condition (the
    right-hand side must be orthogonal to the kernel direction ``u``):
    ``lambda = -<u, grad F(u)>``.  The returned multipliers satisfy
    ``||D^T p + lambda u + grad F(u)|| <= 10 * tol * (1 + ||grad F||)``, which
    is verified before returning.
    """
    pt, D, tol_eff, u = _deficient_point_state(system, at, anchor, tol)
    grad = objective.gradient(u)
    lam = -float(u @ grad)
    rhs = -lam * u - grad
    p, residual = min_norm_solve(D.T, rhs, tol_eff)
    bound = 10.0 * tol_eff * (1.0 + float(np.linalg.norm(grad)))
    if residual > bound:
        raise InconsistentDerivativeSystem(
            f"multiplier system residual {residual:g} exceeds {bound:g}"
        )
    return AdjointSolution(lambda_=lam, p=p, anchor=u, solve_count=1)


def adjoint_derivative(adjoint: AdjointSolution, system, at, param_index: int) -> float:
    """Objective derivative ``p^T (dD/deps_j) u``; no further solves."""
    pt = as_point(at, system.N)
    dD = system.partial_derivative(pt, param_index).matrix
    return float(adjoint.p @ dD @ adjoint.anchor)


def full_jacobian(system, at, anchor=None, method="direct", tol=None) -> JacobianResult:
    """All derivatives d x_i / d eps_j of the anchored branch.

    method "direct" performs one solve per parameter (N solves); "adjoint"
    performs one solve per coordinate objective (n solves) and then only
    multiplications, which wins when N exceeds n.
    """
    pt, D, tol_eff, u = _deficient_point_state(system, at, anchor, tol)
    n, N = system.n, system.N
    jac = np.zeros((n, N))
    if method == "direct":
        count = 0
        for j in range(1, N + 1):
            result = direct_sensitivity(system, pt, j, anchor=u, tol=tol_eff)
            jac[:, j - 1] = result.derivative
            count += result.solve_count
    elif method == "adjoint":
        adjoints = [
            adjoint_prepare(system, pt, Objective.coordinate(i), anchor=u, tol=tol_eff)
            for i in range(1, n + 1)
        ]
        count = sum(adj.solve_count for adj in adjoints)
        for j in range(1, N + 1):
            w = system.partial_derivative(pt, j).matrix @ u
            for i, adj in enumerate(adjoints):
                jac[i, j - 1] = float(adj.p @ w)
    else:
        raise ValueError(f"unknown method {method!r}")
    return JacobianResult(matrix=jac, method=method, solve_count=count, anchor=u)
