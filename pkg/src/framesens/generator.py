"""Random polynomial families with a one-dimensional, analytically known
null space, used as the sensitivity test oracle.

Construction: draw a polynomial vector ``w(eps)`` and set

    D(eps) = L @ R(w(eps))

where ``L`` is a fixed full-column-rank ``n x (n-1)`` matrix and ``R(w)`` is
the ``(n-1) x n`` matrix whose row ``i`` is ``e_i * w[i+1] - e_{i+1} * w[i]``.
Every row of ``R(w)`` annihilates ``w`` identically, so ``w(eps)`` spans the
kernel of ``D(eps)`` wherever consecutive components of ``w`` do not vanish
simultaneously.  The normalized null direction is ``u = w / ||w||`` and its
exact parameter derivative is ``(I - u u^T) w_j' / ||w||``, giving a
closed-form oracle for every sensitivity route.
"""

import itertools
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import GenerationFailed
from .nullspace import rank_profile
from .param_system import ParametrizedSystem, PolyEntry, as_point

_MIN_W_NORM = 0.5
_SV_GAP = 1e-4  # sigma_{n-1} / sigma_1 floor at validated points
_SAMPLE_POINTS = 16


def monomial_exponents(nvars: int, degree: int) -> list[tuple[int, ...]]:
    """All exponent vectors with total degree <= degree, graded-lex order."""
    out = [(0,) * nvars]
    for total in range(1, degree + 1):
        for combo in itertools.combinations_with_replacement(range(nvars), total):
            powers = [0] * nvars
            for var in combo:
                powers[var] += 1
            out.append(tuple(powers))
    # combinations_with_replacement emits lex order on variable multisets;
    # re-sort to the canonical graded-lex on exponent vectors.
    return sorted(set(out), key=lambda p: (sum(p), p))


def wedge_rows(w: list[PolyEntry]) -> list[list[PolyEntry]]:
    """The (n-1) x n grid of alternating rows r_i = e_i*w[i+1] - e_{i+1}*w[i];
    each row annihilates w as a polynomial identity."""
    n = len(w)
    nvars = w[0].nvars
    rows = []
    for i in range(n - 1):
        row = [PolyEntry.zero(nvars) for _ in range(n)]
        row[i] = w[i + 1]
        row[i + 1] = w[i].scaled(-1.0)
        rows.append(row)
    return rows


def family_from_w(w, left_factor: np.ndarray, name: str = "") -> ParametrizedSystem:
    """Assemble D(eps) = L @ R(w(eps)) as a polynomial system."""
    w = list(w)
    n = len(w)
    nvars = w[0].nvars
    L = np.asarray(left_factor, dtype=float)
    if L.shape != (n, n - 1):
        raise ValueError(f"left factor must be {n}x{n - 1}, got {L.shape}")
    R = wedge_rows(w)
    grid = []
    for a in range(n):
        row = []
        for j in range(n):
            entry = PolyEntry.zero(nvars)
            for i in range(n - 1):
                if not R[i][j].is_zero and L[a, i] != 0.0:
                    entry = entry.plus(R[i][j].scaled(L[a, i]))
            row.append(entry)
        grid.append(tuple(row))
    return ParametrizedSystem(n, nvars, tuple(grid), None, name)


@dataclass(frozen=True, eq=False)
class GeneratedFamily:
    """A generated system together with its closed-form null-direction oracle.

    ``validated_points`` are the box samples that passed generation checks
    (norm floor on w, deficiency exactly one, singular-value gap); tests
    should query the oracle at these points.
    """

    seed: int
    n: int
    N: int
    degree: int
    w: tuple[PolyEntry, ...]
    left_factor: np.ndarray
    system: ParametrizedSystem
    validated_points: tuple[np.ndarray, ...]

    def w_values(self, at) -> np.ndarray:
        pt = as_point(at, self.N)
        return np.array([entry.evaluate(pt) for entry in self.w])

    def null_vector(self, at) -> np.ndarray:
        """Exact unit null direction u = w / ||w||."""
        values = self.w_values(at)
        return values / np.linalg.norm(values)

    def null_derivative(self, at, j: int) -> np.ndarray:
        """Exact derivative of the unit null direction for parameter j."""
        pt = as_point(at, self.N)
        values = self.w_values(pt)
        norm = np.linalg.norm(values)
        u = values / norm
        dw = np.array([entry.derivative(j).evaluate(pt) for entry in self.w])
        return (dw - u * (u @ dw)) / norm


def _orthonormal_columns(rng, n: int) -> np.ndarray:
    raw = rng.standard_normal((n, n - 1))
    Q, R = np.linalg.qr(raw)
    return Q * np.sign(np.diag(R))


def _draw_w(rng, n, nvars, exponents) -> list[PolyEntry]:
    polys = []
    for _ in range(n):
        coeffs = rng.uniform(-1.0, 1.0, size=len(exponents))
        # Bump the constant term away from zero so ||w|| clears its floor.
        coeffs[0] += 1.0 if coeffs[0] >= 0 else -1.0
        polys.append(
            PolyEntry.from_terms(zip(coeffs, exponents), nvars)
        )
    return polys


def _validate(family_system, w, points) -> bool:
    for pt in points:
        values = np.array([entry.evaluate(pt) for entry in w])
        if np.linalg.norm(values) < _MIN_W_NORM:
            return False
        matrix = family_system.evaluate(pt).matrix
        s = np.linalg.svd(matrix, compute_uv=False)
        if s[-2] < _SV_GAP * s[0]:
            return False
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # fragility handled by the gap check
            profile = rank_profile(matrix)
        if profile.deficiency != 1:
            return False
    return True


def generate_family(seed: int, n: int, N: int, degree: int,
                    max_tries: int = 100) -> GeneratedFamily:
    """Draw a deficiency-one family with uniform [-1, 1] coefficients.

    Candidate draws are validated on box samples (the origin plus
    pseudo-random points in [-1, 1]^N from the same seeded stream) and
    resampled on violation; GenerationFailed after ``max_tries`` draws.
    """
    if n < 2:
        raise ValueError("family construction needs n >= 2")
    if degree < 1:
        raise ValueError("degree must be at least 1")
    rng = np.random.default_rng(seed)
    exponents = monomial_exponents(N, degree)
    left = _orthonormal_columns(rng, n)
    points = [np.zeros(N)] + [
        rng.uniform(-1.0, 1.0, size=N) for _ in range(_SAMPLE_POINTS)
    ]
    for _ in range(max_tries):
        w = _draw_w(rng, n, N, exponents)
        system = family_from_w(w, left, name=f"gen-n{n}-N{N}-seed{seed}")
        if _validate(system, w, points):
            return GeneratedFamily(
                seed=seed,
                n=n,
                N=N,
                degree=degree,
                w=tuple(w),
                left_factor=left,
                system=system,
                validated_points=tuple(points),
            )
    raise GenerationFailed(
        f"no valid family after {max_tries} draws (seed={seed}, n={n}, N={N}, "
        f"degree={degree})"
    )
