"""Parametrized linear systems with sparse multivariate polynomial entries.

The core object is :class:`ParametrizedSystem`: an ``n x n`` matrix ``D(eps)``
plus an optional right-hand side ``b(eps)`` whose entries are real
polynomials in ``N`` parameters.  Entries are stored sparsely as monomial
lists, so evaluation and parameter differentiation are exact (power rule on
monomials), never finite differences.

Systems round-trip through a JSON file format::

    {
      "name": "example",
      "n": 2, "N": 2,
      "entries": [
        {"row": 0, "col": 1,
         "monomials": [{"coeff": 1.0, "powers": [0, 2]},
                       {"coeff": -1.0, "powers": [2, 0]}]}
      ],
      "rhs": [{"index": 0, "monomials": [...]}]
    }

Cells absent from ``"entries"`` are zero, and ``"rhs"`` may be omitted
entirely for homogeneous systems.  Serialization is deterministic: entries
sorted by ``(row, col)``, monomials in graded-lexicographic order.
Coefficients survive the round trip exactly (shortest-repr JSON floats).

For matrix families that are not polynomial, :class:`CallableSystem` wraps a
black-box ``matrix_fn`` behind the same evaluate/partial-derivative
interface; its partials fall back to central finite differences, so the
polynomial form stays the canonical persisted one.
"""

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import EvaluationOverflow, SystemFormatError


class Monomial(NamedTuple):
    coeff: float
    powers: tuple[int, ...]


def _graded_lex(m: Monomial):
    return (sum(m.powers), m.powers)


def as_point(at, nvars: int) -> np.ndarray:
    """Validate and convert a parameter point to a 1-D float array."""
    pt = np.atleast_1d(np.asarray(at, dtype=float))
    if pt.ndim != 1 or pt.size != nvars:
        raise ValueError(
            f"parameter point has {pt.size} coordinate(s), expected {nvars}"
        )
    if not np.all(np.isfinite(pt)):
        raise ValueError("parameter point has non-finite coordinates")
    return pt


@dataclass(frozen=True)
class PolyEntry:
    """One polynomial entry: a sparse sum of ``coeff * eps**powers`` terms.

    Monomials are canonicalized on construction: zero coefficients dropped,
    terms sorted graded-lexicographically by power vector.  Two entries with
    the same canonical form compare equal.  An empty monomial tuple is the
    zero polynomial.
    """

    monomials: tuple[Monomial, ...]
    nvars: int

    def __post_init__(self):
        if self.nvars < 1:
            raise ValueError("PolyEntry needs at least one variable")
        canon = []
        seen = set()
        for mono in self.monomials:
            coeff, powers = mono
            powers = tuple(int(p) for p in powers)
            coeff = float(coeff)
            if len(powers) != self.nvars:
                raise ValueError(
                    f"power vector {powers} has length {len(powers)}, "
                    f"expected {self.nvars}"
                )
            if any(p < 0 for p in powers):
                raise ValueError(f"negative exponent in power vector {powers}")
            if not np.isfinite(coeff):
                raise ValueError("non-finite coefficient")
            if powers in seen:
                raise ValueError(f"duplicate power vector {powers}")
            seen.add(powers)
            if coeff != 0.0:
                canon.append(Monomial(coeff, powers))
        canon.sort(key=_graded_lex)
        object.__setattr__(self, "monomials", tuple(canon))

    @classmethod
    def zero(cls, nvars: int) -> "PolyEntry":
        return cls((), nvars)

    @classmethod
    def constant(cls, value: float, nvars: int) -> "PolyEntry":
        return cls((Monomial(float(value), (0,) * nvars),), nvars)

    @classmethod
    def from_terms(cls, terms, nvars: int) -> "PolyEntry":
        """Build from ``[(coeff, powers), ...]``, merging repeated powers."""
        acc: dict[tuple[int, ...], float] = {}
        for coeff, powers in terms:
            key = tuple(int(p) for p in powers)
            acc[key] = acc.get(key, 0.0) + float(coeff)
        return cls(tuple(Monomial(c, p) for p, c in acc.items()), nvars)

    @property
    def is_zero(self) -> bool:
        return not self.monomials

    def evaluate(self, point: np.ndarray) -> float:
        total = 0.0
        for coeff, powers in self.monomials:
            term = coeff
            for x, p in zip(point, powers):
                if p:
                    term *= x**p
            total += term
        return total

    def derivative(self, j: int) -> "PolyEntry":
        """Exact partial derivative with respect to parameter ``j`` (1-based)."""
        if not 1 <= j <= self.nvars:
            raise IndexError(f"parameter index {j} out of range 1..{self.nvars}")
        jj = j - 1
        terms = []
        for coeff, powers in self.monomials:
            if powers[jj] == 0:
                continue
            dp = list(powers)
            dp[jj] -= 1
            terms.append(Monomial(coeff * powers[jj], tuple(dp)))
        return PolyEntry(tuple(terms), self.nvars)

    def scaled(self, factor: float) -> "PolyEntry":
        return PolyEntry(
            tuple(Monomial(factor * c, p) for c, p in self.monomials), self.nvars
        )

    def plus(self, other: "PolyEntry") -> "PolyEntry":
        if other.nvars != self.nvars:
            raise ValueError("cannot add polynomials with different arities")
        return PolyEntry.from_terms(
            list(self.monomials) + list(other.monomials), self.nvars
        )


@dataclass(frozen=True, eq=False)
class EvaluatedPair:
    """A system realized at one parameter point: dense matrix, optional rhs."""

    matrix: np.ndarray
    rhs: np.ndarray | None = None


def _coerce_entry(value, nvars: int) -> PolyEntry:
    if isinstance(value, PolyEntry):
        if value.nvars != nvars:
            raise ValueError("entry arity does not match system N")
        return value
    if isinstance(value, (int, float)):
        return PolyEntry.constant(value, nvars)
    return PolyEntry.from_terms(value, nvars)


@dataclass(frozen=True)
class ParametrizedSystem:
    """Square polynomial matrix family ``D(eps)`` with optional ``b(eps)``.

    Immutable after construction; evaluation and differentiation are pure, so
    instances are safe to share across threads.
    """

    n: int
    N: int
    entries: tuple[tuple[PolyEntry, ...], ...]
    rhs: tuple[PolyEntry, ...] | None = None
    name: str = ""

    def __post_init__(self):
        if self.n < 1 or self.N < 1:
            raise ValueError("system needs n >= 1 and N >= 1")
        grid = tuple(tuple(row) for row in self.entries)
        if len(grid) != self.n or any(len(row) != self.n for row in grid):
            raise ValueError(f"entry grid is not {self.n}x{self.n}")
        for row in grid:
            for entry in row:
                if not isinstance(entry, PolyEntry) or entry.nvars != self.N:
                    raise ValueError("every entry must be a PolyEntry over N variables")
        object.__setattr__(self, "entries", grid)
        if self.rhs is not None:
            rhs = tuple(self.rhs)
            if len(rhs) != self.n:
                raise ValueError(f"rhs has length {len(rhs)}, expected {self.n}")
            for entry in rhs:
                if not isinstance(entry, PolyEntry) or entry.nvars != self.N:
                    raise ValueError("every rhs entry must be a PolyEntry over N variables")
            object.__setattr__(self, "rhs", rhs)

    @classmethod
    def from_entry_dict(cls, n, N, entries, rhs=None, name="") -> "ParametrizedSystem":
        """Build a system from sparse cell data.

        ``entries`` maps ``(row, col)`` to a PolyEntry, a constant, or a list
        of ``(coeff, powers)`` terms; missing cells are zero.  ``rhs`` maps
        indices the same way (or may be a full-length sequence).
        """
        grid = [[PolyEntry.zero(N) for _ in range(n)] for _ in range(n)]
        for (i, j), value in entries.items():
            grid[i][j] = _coerce_entry(value, N)
        rhs_tuple = None
        if rhs is not None:
            vec = [PolyEntry.zero(N) for _ in range(n)]
            items = rhs.items() if isinstance(rhs, dict) else enumerate(rhs)
            for i, value in items:
                vec[i] = _coerce_entry(value, N)
            rhs_tuple = tuple(vec)
        return cls(n, N, tuple(tuple(row) for row in grid), rhs_tuple, name)

    @property
    def has_rhs(self) -> bool:
        return self.rhs is not None

    @cached_property
    def _matrix_terms(self):
        rows, cols, coeffs, powers = [], [], [], []
        for i, row in enumerate(self.entries):
            for j, entry in enumerate(row):
                for coeff, pw in entry.monomials:
                    rows.append(i)
                    cols.append(j)
                    coeffs.append(coeff)
                    powers.append(pw)
        return (
            np.asarray(rows, dtype=np.intp),
            np.asarray(cols, dtype=np.intp),
            np.asarray(coeffs, dtype=float),
            np.asarray(powers, dtype=np.int64).reshape(len(coeffs), self.N),
        )

    @cached_property
    def _rhs_terms(self):
        idx, coeffs, powers = [], [], []
        for i, entry in enumerate(self.rhs or ()):
            for coeff, pw in entry.monomials:
                idx.append(i)
                coeffs.append(coeff)
                powers.append(pw)
        return (
            np.asarray(idx, dtype=np.intp),
            np.asarray(coeffs, dtype=float),
            np.asarray(powers, dtype=np.int64).reshape(len(coeffs), self.N),
        )

    def evaluate(self, at) -> EvaluatedPair:
        """Realize ``D(eps)`` (and ``b(eps)`` when present) at a point."""
        pt = as_point(at, self.N)
        rows, cols, coeffs, powers = self._matrix_terms
        with np.errstate(over="ignore", invalid="ignore"):
            vals = coeffs * np.prod(pt**powers, axis=1)
            matrix = np.bincount(
                rows * self.n + cols, weights=vals, minlength=self.n * self.n
            ).reshape(self.n, self.n)
        bad = np.argwhere(~np.isfinite(matrix))
        if bad.size:
            i, j = (int(v) for v in bad[0])
            raise EvaluationOverflow(
                f"matrix entry ({i}, {j}) is non-finite at {pt.tolist()}", (i, j)
            )
        rhs_vec = None
        if self.rhs is not None:
            idx, rcoeffs, rpowers = self._rhs_terms
            with np.errstate(over="ignore", invalid="ignore"):
                rvals = rcoeffs * np.prod(pt**rpowers, axis=1)
                rhs_vec = np.bincount(idx, weights=rvals, minlength=self.n)
            rbad = np.argwhere(~np.isfinite(rhs_vec))
            if rbad.size:
                i = int(rbad[0][0])
                raise EvaluationOverflow(
                    f"rhs entry {i} is non-finite at {pt.tolist()}", i
                )
        return EvaluatedPair(matrix, rhs_vec)

    def partial_derivative(self, at, j: int) -> EvaluatedPair:
        """Exact derivative of every entry with respect to parameter ``j``
        (1-based), evaluated at ``at``."""
        pt = as_point(at, self.N)
        if not 1 <= j <= self.N:
            raise IndexError(f"parameter index {j} out of range 1..{self.N}")
        jj = j - 1

        def _eval(indices, coeffs, powers, out_len):
            mask = powers[:, jj] > 0
            dc = coeffs[mask] * powers[mask, jj]
            dp = powers[mask].copy()
            dp[:, jj] -= 1
            with np.errstate(over="ignore", invalid="ignore"):
                vals = dc * np.prod(pt**dp, axis=1)
                return np.bincount(indices[mask], weights=vals, minlength=out_len)

        rows, cols, coeffs, powers = self._matrix_terms
        matrix = _eval(rows * self.n + cols, coeffs, powers, self.n * self.n)
        matrix = matrix.reshape(self.n, self.n)
        if not np.all(np.isfinite(matrix)):
            i, c = (int(v) for v in np.argwhere(~np.isfinite(matrix))[0])
            raise EvaluationOverflow(
                f"matrix derivative entry ({i}, {c}) is non-finite", (i, c)
            )
        rhs_vec = None
        if self.rhs is not None:
            idx, rcoeffs, rpowers = self._rhs_terms
            rhs_vec = _eval(idx, rcoeffs, rpowers, self.n)
        return EvaluatedPair(matrix, rhs_vec)


@dataclass(frozen=True, eq=False)
class CallableSystem:
    """Black-box matrix family with the same interface as ParametrizedSystem.

    ``matrix_fn(point) -> (n, n) array`` must be defined wherever queried;
    partial derivatives use central differences with step
    ``fd_step * max(1, |eps_j|)``, so they carry O(h^2) truncation error
    instead of being exact.
    """

    n: int
    N: int
    matrix_fn: Callable[[np.ndarray], np.ndarray]
    rhs_fn: Callable[[np.ndarray], np.ndarray] | None = None
    name: str = ""
    fd_step: float = 1e-6

    @property
    def has_rhs(self) -> bool:
        return self.rhs_fn is not None

    def evaluate(self, at) -> EvaluatedPair:
        pt = as_point(at, self.N)
        matrix = np.asarray(self.matrix_fn(pt), dtype=float)
        if matrix.shape != (self.n, self.n):
            raise ValueError(f"matrix_fn returned shape {matrix.shape}")
        rhs = None if self.rhs_fn is None else np.asarray(self.rhs_fn(pt), float)
        return EvaluatedPair(matrix, rhs)

    def partial_derivative(self, at, j: int) -> EvaluatedPair:
        pt = as_point(at, self.N)
        if not 1 <= j <= self.N:
            raise IndexError(f"parameter index {j} out of range 1..{self.N}")
        h = self.fd_step * max(1.0, abs(pt[j - 1]))
        up, dn = pt.copy(), pt.copy()
        up[j - 1] += h
        dn[j - 1] -= h
        plus, minus = self.evaluate(up), self.evaluate(dn)
        rhs = None
        if plus.rhs is not None:
            rhs = (plus.rhs - minus.rhs) / (2.0 * h)
        return EvaluatedPair((plus.matrix - minus.matrix) / (2.0 * h), rhs)


def _monomials_to_json(entry: PolyEntry):
    return [{"coeff": c, "powers": list(p)} for c, p in entry.monomials]


def serialize_system(system: ParametrizedSystem) -> str:
    """Deterministic JSON text for a polynomial system."""
    cells = []
    for i in range(system.n):
        for j in range(system.n):
            entry = system.entries[i][j]
            if not entry.is_zero:
                cells.append(
                    {"row": i, "col": j, "monomials": _monomials_to_json(entry)}
                )
    doc = {"name": system.name, "n": system.n, "N": system.N, "entries": cells}
    if system.rhs is not None:
        doc["rhs"] = [
            {"index": i, "monomials": _monomials_to_json(entry)}
            for i, entry in enumerate(system.rhs)
            if not entry.is_zero
        ]
    return json.dumps(doc, indent=2)


def _parse_monomials(raw, nvars, where):
    if not isinstance(raw, list):
        raise SystemFormatError(f"{where}: 'monomials' must be a list")
    terms = []
    seen = set()
    for k, mono in enumerate(raw):
        if not isinstance(mono, dict) or set(mono) != {"coeff", "powers"}:
            raise SystemFormatError(
                f"{where}: monomial {k} must be an object with 'coeff' and 'powers'"
            )
        powers = mono["powers"]
        if (
            not isinstance(powers, list)
            or len(powers) != nvars
            or any(not isinstance(p, int) or p < 0 for p in powers)
        ):
            raise SystemFormatError(
                f"{where}: monomial {k} power vector must hold {nvars} "
                "non-negative integers"
            )
        if not isinstance(mono["coeff"], (int, float)):
            raise SystemFormatError(f"{where}: monomial {k} coefficient must be a number")
        key = tuple(powers)
        if key in seen:
            raise SystemFormatError(f"{where}: duplicate power vector {powers}")
        seen.add(key)
        terms.append(Monomial(float(mono["coeff"]), key))
    return PolyEntry(tuple(terms), nvars)


def parse_system(text: str) -> ParametrizedSystem:
    """Parse the JSON system format; inverse of :func:`serialize_system`.

    Raises SystemFormatError with line/column for syntax errors, and with the
    offending cell for structural problems (dimension mismatches, bad power
    vectors, duplicate cells).
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SystemFormatError(
            f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise SystemFormatError("top level must be a JSON object")
    for key in ("n", "N"):
        if not isinstance(doc.get(key), int) or doc[key] < 1:
            raise SystemFormatError(f"'{key}' must be a positive integer")
    n, nvars = doc["n"], doc["N"]
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise SystemFormatError("'name' must be a string")
    grid = [[PolyEntry.zero(nvars) for _ in range(n)] for _ in range(n)]
    raw_entries = doc.get("entries", [])
    if not isinstance(raw_entries, list):
        raise SystemFormatError("'entries' must be a list")
    filled = set()
    for k, cell in enumerate(raw_entries):
        where = f"entries[{k}]"
        if not isinstance(cell, dict) or not {"row", "col", "monomials"} <= set(cell):
            raise SystemFormatError(f"{where}: need 'row', 'col' and 'monomials'")
        i, j = cell["row"], cell["col"]
        if not (isinstance(i, int) and isinstance(j, int) and 0 <= i < n and 0 <= j < n):
            raise SystemFormatError(
                f"{where}: cell ({i}, {j}) outside the {n}x{n} grid"
            )
        if (i, j) in filled:
            raise SystemFormatError(f"{where}: duplicate cell ({i}, {j})")
        filled.add((i, j))
        grid[i][j] = _parse_monomials(cell["monomials"], nvars, where)
    rhs = None
    if "rhs" in doc:
        raw_rhs = doc["rhs"]
        if not isinstance(raw_rhs, list):
            raise SystemFormatError("'rhs' must be a list")
        vec = [PolyEntry.zero(nvars) for _ in range(n)]
        used = set()
        for k, cell in enumerate(raw_rhs):
            where = f"rhs[{k}]"
            if not isinstance(cell, dict) or not {"index", "monomials"} <= set(cell):
                raise SystemFormatError(f"{where}: need 'index' and 'monomials'")
            i = cell["index"]
            if not (isinstance(i, int) and 0 <= i < n):
                raise SystemFormatError(f"{where}: index {i} outside 0..{n - 1}")
            if i in used:
                raise SystemFormatError(f"{where}: duplicate index {i}")
            used.add(i)
            vec[i] = _parse_monomials(cell["monomials"], nvars, where)
        rhs = tuple(vec)
    return ParametrizedSystem(n, nvars, tuple(tuple(row) for row in grid), rhs, name)


def load_system(path) -> ParametrizedSystem:
    with open(path, encoding="utf-8") as handle:
        return parse_system(handle.read())


def save_system(system: ParametrizedSystem, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(serialize_system(system) + "\n")
