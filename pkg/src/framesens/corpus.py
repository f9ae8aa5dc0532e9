"""Built-in example systems with documented, executable expected behavior.

Each entry bundles a system, notes on where its closed-form expectations
come from, and a list of checks that rerun the referenced operations and
compare against those expectations.  The test suite executes every check;
``framesens corpus run`` does the same from the command line.

Names: ex5 (smooth-but-oscillating callable family), ex8 (two-parameter
family with direction-dependent limits at the origin), ex14 (rank-one
diagonal family with a two-vector frame), ex20 (deficiency-three
indeterminacy demonstrator).
"""

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DeficiencyChanged, DeficiencyTooHigh
from .frame_field import frame_solutions, track_frame
from .nullspace import null_basis, rank_profile
from .param_system import CallableSystem, ParametrizedSystem
from .sensitivity import direct_sensitivity


@dataclass(frozen=True, eq=False)
class CheckResult:
    passed: bool
    detail: str


@dataclass(frozen=True, eq=False)
class CorpusCheck:
    description: str
    run: Callable[[], CheckResult]


@dataclass(frozen=True, eq=False)
class CorpusEntry:
    name: str
    summary: str
    system: object
    domain: str
    notes: tuple[str, ...]
    checks: tuple[CorpusCheck, ...]


def _result(passed: bool, detail: str) -> CheckResult:
    return CheckResult(bool(passed), detail)


def _quiet_rank(matrix, tol=None):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return rank_profile(matrix, tol)


def _unit_match(vec, expected, tol) -> bool:
    """Agreement up to overall sign."""
    expected = np.asarray(expected, float)
    return min(
        np.linalg.norm(vec - expected), np.linalg.norm(vec + expected)
    ) <= tol


# ---------------------------------------------------------------------------
# ex14: diag(eps, 0, 0)


def _build_ex14() -> CorpusEntry:
    system = ParametrizedSystem.from_entry_dict(
        3, 1, {(0, 0): [(1.0, (1,))]}, name="ex14"
    )

    def rank_at_one():
        profile = _quiet_rank(system.evaluate([1.0]).matrix)
        ok = (
            profile.rank == 1
            and profile.deficiency == 2
            and profile.minor_rows == (0,)
            and profile.minor_cols == (0,)
        )
        return _result(ok, f"rank {profile.rank}, deficiency {profile.deficiency}, "
                           f"minor {profile.minor_rows}/{profile.minor_cols}")

    def frame_matches():
        worst = 0.0
        for eps in (0.5, 1.0, 2.0):
            frame = frame_solutions(system.evaluate([eps]).matrix, method="cofactor")
            if len(frame) != 2:
                return _result(False, f"expected 2 vectors at eps={eps}, got {len(frame)}")
            worst = max(
                worst,
                np.linalg.norm(frame.vectors[0] - np.array([0.0, 1.0, 0.0])),
                np.linalg.norm(frame.vectors[1] - np.array([0.0, 0.0, 1.0])),
            )
        return _result(worst <= 1e-12, f"max deviation from (e2, e3): {worst:.2e}")

    def rank_drop_at_zero():
        profile = _quiet_rank(system.evaluate([0.0]).matrix)
        return _result(
            profile.rank == 0 and profile.deficiency == 3,
            f"rank {profile.rank}, deficiency {profile.deficiency}",
        )

    def tracking_stops_at_zero():
        try:
            track_frame(system, [[0.5], [0.25], [0.0]])
        except DeficiencyChanged as exc:
            return _result(exc.point_index == 2, f"stopped at point {exc.point_index}")
        return _result(False, "tracking crossed the rank drop silently")

    def sensitivity_rejected():
        try:
            direct_sensitivity(system, [1.0], 1)
        except DeficiencyTooHigh as exc:
            return _result(exc.deficiency == 2, f"rejected with deficiency {exc.deficiency}")
        return _result(False, "sensitivity returned a numeric answer")

    return CorpusEntry(
        name="ex14",
        summary="diag(eps, 0, 0): rank one away from eps=0, two-vector frame (e2, e3)",
        system=system,
        domain="any eps != 0; the rank drops to zero at eps = 0",
        notes=(
            "Null space of diag(eps, 0, 0) for eps != 0 is span{e2, e3};"
            " the cofactor recursion produces e2 first, then e3 after deflation.",
            "At eps = 0 the matrix vanishes, so frames cannot be continued through it.",
            "With deficiency two, branch derivatives are underdetermined and must be refused.",
        ),
        checks=(
            CorpusCheck("rank 1 / deficiency 2 with minor (0,0) at eps=1", rank_at_one),
            CorpusCheck("cofactor frame is (e2, e3) at eps in {0.5, 1, 2}", frame_matches),
            CorpusCheck("rank 0 / deficiency 3 at eps=0", rank_drop_at_zero),
            CorpusCheck("tracking through eps=0 raises DeficiencyChanged", tracking_stops_at_zero),
            CorpusCheck("sensitivity request raises DeficiencyTooHigh(2)", sensitivity_rejected),
        ),
    )


# ---------------------------------------------------------------------------
# ex8: [[2 e1 e2, e2^2 - e1^2], [0, 0]]


def _ex8_direction(e1: float, e2: float) -> np.ndarray:
    r2 = e1 * e1 + e2 * e2
    return np.array([(e1 * e1 - e2 * e2) / r2, 2.0 * e1 * e2 / r2])


def _build_ex8() -> CorpusEntry:
    system = ParametrizedSystem.from_entry_dict(
        2,
        2,
        {
            (0, 0): [(2.0, (1, 1))],
            (0, 1): [(1.0, (0, 2)), (-1.0, (2, 0))],
        },
        name="ex8",
    )

    def closed_form_match():
        worst = 0.0
        for e1, e2 in ((1.0, 0.0), (1.0, 1.0), (2.0, 1.0), (0.001, 0.001), (0.3, -0.7)):
            vec = null_basis(system.evaluate([e1, e2]).matrix)[0]
            expected = _ex8_direction(e1, e2)
            worst = max(worst, min(np.linalg.norm(vec - expected),
                                   np.linalg.norm(vec + expected)))
        return _result(worst <= 1e-12, f"max deviation from closed form: {worst:.2e}")

    def axis_limit():
        for t in (1e-1, 1e-3):
            vec = null_basis(system.evaluate([t, 0.0]).matrix)[0]
            if np.linalg.norm(vec - np.array([1.0, 0.0])) > 1e-12:
                return _result(False, f"direction along (t, 0) at t={t} is {vec}")
        return _result(True, "direction along (t, 0) is (1, 0)")

    def diagonal_limit():
        for t in (1e-1, 1e-3):
            vec = null_basis(system.evaluate([t, t]).matrix)[0]
            if np.linalg.norm(vec - np.array([0.0, 1.0])) > 1e-12:
                return _result(False, f"direction along (t, t) at t={t} is {vec}")
        return _result(True, "direction along (t, t) is (0, 1)")

    def limits_disagree():
        axis = null_basis(system.evaluate([1e-3, 0.0]).matrix)[0]
        diag = null_basis(system.evaluate([1e-3, 1e-3]).matrix)[0]
        return _result(
            abs(float(axis @ diag)) <= 1e-12,
            "axis and diagonal limits are orthogonal: no continuous unit "
            "solution exists through the origin",
        )

    return CorpusEntry(
        name="ex8",
        summary="two-parameter 2x2 family whose unit null direction has no limit at the origin",
        system=system,
        domain="any (e1, e2) != (0, 0)",
        notes=(
            "The unit null direction is ((e1^2-e2^2), 2 e1 e2) / (e1^2+e2^2):"
            " substitute into the first row and the terms cancel.",
            "Along (t, 0) the direction is constantly (1, 0); along (t, t) it is"
            " (0, 1), so the two paths into the origin disagree.",
        ),
        checks=(
            CorpusCheck("unit direction matches the closed form at sample points", closed_form_match),
            CorpusCheck("axis path (t, 0) gives (1, 0)", axis_limit),
            CorpusCheck("diagonal path (t, t) gives (0, 1)", diagonal_limit),
            CorpusCheck("the two directional limits are orthogonal", limits_disagree),
        ),
    )


# ---------------------------------------------------------------------------
# ex5: oscillating callable family (not polynomial)


def _ex5_matrix(at: np.ndarray) -> np.ndarray:
    eps = float(at[0])
    if eps == 0.0:
        return np.zeros((2, 2))
    damp = math.exp(-1.0 / eps**2)
    c = math.cos(2.0 / eps)
    s = math.sin(2.0 / eps)
    return damp * np.array([[1.0 - c, -s], [-s, 1.0 + c]])


def _ex5_direction(eps: float) -> np.ndarray:
    return np.array([math.cos(1.0 / eps), math.sin(1.0 / eps)])


def _build_ex5() -> CorpusEntry:
    system = CallableSystem(2, 1, _ex5_matrix, name="ex5")

    def direction_match():
        worst = 0.0
        for eps in (0.5, 0.2):
            vec = null_basis(system.evaluate([eps]).matrix)[0]
            expected = _ex5_direction(eps)
            worst = max(worst, min(np.linalg.norm(vec - expected),
                                   np.linalg.norm(vec + expected)))
        return _result(worst <= 1e-10, f"max deviation from (cos 1/eps, sin 1/eps): {worst:.2e}")

    def rank_one():
        profile = _quiet_rank(system.evaluate([0.5]).matrix)
        return _result(
            profile.rank == 1 and profile.deficiency == 1,
            f"rank {profile.rank} at eps=0.5 (matrix scale ~ e^-4)",
        )

    def alternating_signs():
        # Track the branch continuously in theta = 1/eps from 3*pi to 6*pi;
        # at eps = 1/(k*pi) the aligned first component must flip sign with k.
        thetas = np.linspace(3.0 * math.pi, 6.0 * math.pi, 61)
        path = [[1.0 / t] for t in thetas]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            tracked = track_frame(system, path)
        samples = []
        for k in (3, 4, 5, 6):
            frame = tracked.frames[(k - 3) * 20]
            samples.append(float(frame.vectors[0][0]))
        magnitudes_ok = all(abs(s) >= 0.99 for s in samples)
        alternates = all(samples[i] * samples[i + 1] < 0 for i in range(3))
        return _result(
            magnitudes_ok and alternates,
            f"tracked first components at eps=1/(k pi), k=3..6: "
            f"{[f'{s:+.3f}' for s in samples]}",
        )

    return CorpusEntry(
        name="ex5",
        summary="smooth (all orders) 2x2 family whose unit null direction oscillates"
                " as (cos 1/eps, sin 1/eps) and has no limit at eps=0",
        system=system,
        domain="eps != 0 with |eps| large enough that exp(-1/eps^2) stays representable"
               " (|eps| >= 0.05 in double precision)",
        notes=(
            "The matrix factors as 2 exp(-1/eps^2) v v^T with v = (sin 1/eps,"
            " -cos 1/eps), so the null direction is (cos 1/eps, sin 1/eps).",
            "Entries are smooth through eps=0 but not analytic; a continuous unit"
            " solution through 0 would need the oscillation to settle, and it never does.",
            "Non-polynomial, so it lives behind the callable adapter and cannot be"
            " serialized to the system file format.",
        ),
        checks=(
            CorpusCheck("unit direction matches (cos 1/eps, sin 1/eps) at eps in {0.5, 0.2}", direction_match),
            CorpusCheck("rank 1 despite the tiny exp(-1/eps^2) scale", rank_one),
            CorpusCheck("tracked branch alternates sign at eps=1/(k pi), k=3..6", alternating_signs),
        ),
    )


# ---------------------------------------------------------------------------
# ex20: diag(eps, 0, 0, 0)


def _build_ex20() -> CorpusEntry:
    system = ParametrizedSystem.from_entry_dict(
        4, 1, {(0, 0): [(1.0, (1,))]}, name="ex20"
    )

    def sensitivity_rejected():
        anchor = np.array([0.0, 1.0, 0.0, 0.0])
        try:
            direct_sensitivity(system, [1.0], 1, anchor=anchor)
        except DeficiencyTooHigh as exc:
            return _result(exc.deficiency == 3, f"rejected with deficiency {exc.deficiency}")
        return _result(False, "sensitivity returned a numeric answer")

    def rank_at_one():
        profile = _quiet_rank(system.evaluate([1.0]).matrix)
        return _result(
            profile.rank == 1 and profile.deficiency == 3,
            f"rank {profile.rank}, deficiency {profile.deficiency}",
        )

    return CorpusEntry(
        name="ex20",
        summary="diag(eps, 0, 0, 0): deficiency three, so branch derivatives are"
                " underdetermined even with a prescribed anchor",
        system=system,
        domain="any eps != 0",
        notes=(
            "Prescribing x(eps0) = (0, 1, 0, 0) leaves the derivative free in"
            " span{e3, e4}: branches (0, cos eps, sin(a eps), sin(b eps)) realize"
            " every (0, 0, a, b), so no numeric answer is returned.",
        ),
        checks=(
            CorpusCheck("rank 1 / deficiency 3 at eps=1", rank_at_one),
            CorpusCheck("sensitivity request raises DeficiencyTooHigh(3)", sensitivity_rejected),
        ),
    )


_ENTRIES: dict[str, CorpusEntry] = {}
for _entry in (_build_ex5(), _build_ex8(), _build_ex14(), _build_ex20()):
    _ENTRIES[_entry.name] = _entry


def corpus_names() -> tuple[str, ...]:
    return tuple(sorted(_ENTRIES))


def corpus(name: str) -> CorpusEntry:
    try:
        return _ENTRIES[name]
    except KeyError:
        raise KeyError(
            f"unknown corpus entry {name!r}; available: {', '.join(corpus_names())}"
        ) from None
