"""Orthonormal frames of homogeneous solutions and their tracking along paths.

A frame at a point is an ordered list of mutually orthonormal vectors
annihilated by the matrix.  Frames are built by a deflation recursion: pull
one unit null vector, add its outer product to the matrix (raising the rank
by one without disturbing the rest of the kernel), repeat.  Across a
parameter path, consecutive frames are aligned by an orthogonal Procrustes
rotation inside the null space, which reduces to sign alignment when the
deficiency is one.
"""

import csv
import io
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DeficiencyChanged, NotInKernel
from .nullspace import (
    COFACTOR_MAX_ORDER,
    cofactor_null_vector,
    default_tolerance,
    normalize,
    null_basis,
    rank_profile,
)
from .param_system import as_point

_UNIT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Frame:
    """Ordered orthonormal null vectors of one matrix.

    ``residual`` is ``max_i ||M x_i||`` against the matrix the frame was
    built from; ``at`` records the parameter point when one is known.
    """

    vectors: tuple[np.ndarray, ...]
    dim: int
    at: np.ndarray | None = None
    residual: float = 0.0

    def __len__(self):
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    @property
    def matrix(self) -> np.ndarray:
        """Vectors as columns, shape (dim, k)."""
        if not self.vectors:
            return np.zeros((self.dim, 0))
        return np.column_stack(self.vectors)


@dataclass(frozen=True, eq=False)
class StepAlignment:
    """Per-step tracking diagnostics: the Procrustes rotation magnitude and
    the largest vector displacement between consecutive frames."""

    index: int
    rotation_angle: float
    max_delta: float


@dataclass(frozen=True, eq=False)
class TrackedFrameSequence:
    frames: tuple[Frame, ...]
    alignment_log: tuple[StepAlignment, ...]

    def to_csv(self) -> str:
        """Flat CSV: one row per (point, vector, component), then the
        alignment log as a second section."""
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["point_index", "vector_index", "component_index", "value"])
        for m, frame in enumerate(self.frames):
            for i, vec in enumerate(frame.vectors):
                for c, value in enumerate(vec):
                    writer.writerow([m, i, c, f"{value:.17g}"])
        writer.writerow([])
        writer.writerow(["step", "rotation_angle", "max_delta"])
        for step in self.alignment_log:
            writer.writerow(
                [step.index, f"{step.rotation_angle:.17g}", f"{step.max_delta:.17g}"]
            )
        return buf.getvalue()


def deflate(M, x, tol: float | None = None) -> np.ndarray:
    """Rank-raising update ``M + x x^T`` for a unit vector ``x`` in ker(M).

    The result maps ``x`` to itself while acting unchanged on the rest of the
    kernel, so repeated deflation peels the null space one direction at a
    time.  Raises NotInKernel when ``||M x|| > 10 * tol``.
    """
    A = np.asarray(M, dtype=float)
    v = np.asarray(x, dtype=float)
    if abs(np.linalg.norm(v) - 1.0) > _UNIT_TOL:
        raise ValueError("deflation direction must be a unit vector")
    tol_eff = default_tolerance(A) if tol is None else float(tol)
    kernel_residual = float(np.linalg.norm(A @ v))
    if kernel_residual > 10.0 * tol_eff:
        raise NotInKernel(
            f"||M x|| = {kernel_residual:g} exceeds 10*tol = {10.0 * tol_eff:g}"
        )
    return A + np.outer(v, v)


def _mgs(vectors):
    """One modified Gram-Schmidt pass; deflation alone drifts O(k * cond)."""
    out = []
    for v in vectors:
        w = v.copy()
        for q in out:
            w -= (q @ w) * q
        out.append(normalize(w))
    return out


def frame_solutions(M, tol=None, method="auto", at=None, max_cofactor_order=None) -> Frame:
    """Orthonormal frame spanning the numerical null space of ``M``.

    method: "cofactor" extracts each direction from the bordered-minor
    cofactor vector, "orthogonal" from the smallest singular vector,
    "auto" uses cofactors up to the configured order limit.  Either way the
    matrix is deflated between extractions and the result gets one
    re-orthonormalization pass.  Full rank gives an empty frame.
    """
    A = np.asarray(M, dtype=float)
    n = A.shape[0]
    tol_eff = default_tolerance(A) if tol is None else float(tol)
    limit = COFACTOR_MAX_ORDER if max_cofactor_order is None else int(max_cofactor_order)
    if method == "auto":
        method = "cofactor" if n <= limit else "orthogonal"
    if method not in ("cofactor", "orthogonal"):
        raise ValueError(f"unknown method {method!r}")

    profile = rank_profile(A, tol_eff)
    k = profile.deficiency
    point = None if at is None else np.asarray(at, dtype=float)
    if k == 0:
        return Frame((), n, point, 0.0)

    vectors = []
    B = A.copy()
    for i in range(k):
        if method == "cofactor":
            x = normalize(cofactor_null_vector(B, profile, max_order=limit))
        else:
            x = null_basis(B, tol_eff)[0]
        vectors.append(x)
        if i + 1 < k:
            B = deflate(B, x, tol_eff)
            profile = rank_profile(B, tol_eff)

    vectors = _mgs(vectors)
    residual = max(float(np.linalg.norm(A @ v)) for v in vectors)
    return Frame(tuple(vectors), n, point, residual)


def complete_frame(frame: Frame, n: int) -> list[np.ndarray]:
    """Extend a frame to a full orthonormal basis of R^n.

    Completion vectors come from Gram-Schmidt against canonical basis
    vectors, picking at each step the one with the largest residual after
    projection (lowest index on ties), so the frame vectors stay first and
    untouched.
    """
    if frame.vectors and frame.dim != n:
        raise ValueError(f"frame lives in dimension {frame.dim}, not {n}")
    basis = [v.copy() for v in frame.vectors]
    eye = np.eye(n)
    while len(basis) < n:
        Q = np.column_stack(basis) if basis else np.zeros((n, 0))
        residuals = eye - Q @ (Q.T @ eye)
        norms = np.linalg.norm(residuals, axis=0)
        pick = int(np.argmax(norms))
        w = residuals[:, pick]
        for q in basis:  # second projection pass for hygiene
            w = w - (q @ w) * q
        basis.append(normalize(w))
    return basis


def _rotation_angle(R: np.ndarray) -> float:
    if R.size == 0:
        return 0.0
    return float(np.max(np.abs(np.angle(np.linalg.eigvals(R)))))


def track_frame(system, path, tol=None, method="auto") -> TrackedFrameSequence:
    """Frames along an ordered list of parameter points, aligned step to step.

    The deficiency must stay constant along the path (smoothness fails where
    the rank drops), otherwise DeficiencyChanged reports the offending point
    index.  Each new frame is rotated onto its predecessor by the orthogonal
    Procrustes solution restricted to the null space; the first frame keeps
    the deterministic sign convention.  When ``tol`` is None the threshold is
    re-derived per point, so families whose overall scale varies along the
    path stay correctly ranked.
    """
    points = [as_point(p, system.N) for p in path]
    if not points:
        raise ValueError("path must contain at least one point")

    frames: list[Frame] = []
    log: list[StepAlignment] = []
    expected_k: int | None = None
    for m, pt in enumerate(points):
        A = system.evaluate(pt).matrix
        frame = frame_solutions(A, tol=tol, method=method, at=pt)
        k = len(frame)
        if expected_k is None:
            expected_k = k
        elif k != expected_k:
            raise DeficiencyChanged(
                f"deficiency changed from {expected_k} to {k} at path point {m}",
                point_index=m,
            )
        if frames:
            prev = frames[-1]
            if k > 0:
                R, _ = scipy.linalg.orthogonal_procrustes(frame.matrix, prev.matrix)
                aligned = frame.matrix @ R
                vectors = tuple(aligned[:, i].copy() for i in range(k))
                residual = max(float(np.linalg.norm(A @ v)) for v in vectors)
                frame = Frame(vectors, frame.dim, pt, residual)
                angle = _rotation_angle(R)
                delta = max(
                    float(np.linalg.norm(v - p))
                    for v, p in zip(frame.vectors, prev.vectors)
                )
            else:
                angle, delta = 0.0, 0.0
            log.append(StepAlignment(index=m, rotation_angle=angle, max_delta=delta))
        frames.append(frame)
    return TrackedFrameSequence(tuple(frames), tuple(log))
