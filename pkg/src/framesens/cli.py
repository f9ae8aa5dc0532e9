"""Command-line interface.

Commands: rank, nullsolve, frame, track, solve, decompose,
sens {direct, adjoint, verify}, gen, corpus {list, show, run}, bench.

``--system`` accepts a file in the JSON system format or the name of a
built-in corpus entry (ex5, ex8, ex14, ex20).  Exit codes: 0 success,
1 domain error (deficiency, inconsistency, rank trouble, bad files),
2 usage error.  Numbers print with 6 significant digits in human mode and
17 in CSV mode; JSON output uses native shortest-round-trip floats.
The environment variable RELLICH_SENS_TOL overrides the default tolerance
policy when ``--tol`` is not given.
"""

import argparse
import json
import os
import sys
import time

import numpy as np

from .corpus import corpus as corpus_entry, corpus_names
from .errors import DeficiencyTooHigh, FramesensError, NotDeficient
from .fd_check import consistency_report
from .frame_field import frame_solutions, track_frame
from .generator import generate_family
from .nonhomogeneous import decompose, general_solution
from .nullspace import null_basis, rank_profile
from .param_system import load_system, serialize_system
from .sensitivity import (
    Objective,
    adjoint_derivative,
    adjoint_prepare,
    direct_sensitivity,
    full_jacobian,
)

TOL_ENV_VAR = "RELLICH_SENS_TOL"


class _UsageError(Exception):
    pass


def _parse_vector(text: str) -> np.ndarray:
    try:
        return np.array([float(tok) for tok in text.split(",") if tok.strip() != ""])
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated real vector: {text!r}")


def _parse_path(text: str) -> list[np.ndarray]:
    points = [tok for tok in text.split(";") if tok.strip() != ""]
    if not points:
        raise argparse.ArgumentTypeError("empty path")
    return [_parse_vector(tok) for tok in points]


def _parse_objective(text: str) -> Objective:
    kind, _, rest = text.partition(":")
    if kind == "coord":
        try:
            return Objective.coordinate(int(rest))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad coordinate objective: {text!r}")
    if kind == "linear":
        return Objective.linear(_parse_vector(rest))
    raise argparse.ArgumentTypeError(
        f"objective must be 'coord:<i>' or 'linear:<vector>', got {text!r}"
    )


def _fmt(x: float, mode: str) -> str:
    return f"{x:.17g}" if mode == "csv" else f"{x:.6g}"


def _fmt_vec(vec, mode: str) -> str:
    return " ".join(_fmt(float(x), mode) for x in vec)


def _resolve_tol(args) -> float | None:
    if getattr(args, "tol", None) is not None:
        return args.tol
    env = os.environ.get(TOL_ENV_VAR)
    if env is not None:
        try:
            return float(env)
        except ValueError:
            raise _UsageError(f"{TOL_ENV_VAR} is not a real number: {env!r}")
    return None


def _load_system_arg(name: str):
    if os.path.exists(name):
        return load_system(name)
    try:
        return corpus_entry(name).system
    except KeyError:
        raise FramesensError(
            f"cannot load system {name!r}: no such file and not a corpus entry "
            f"({', '.join(corpus_names())})"
        )


def _require(args, attr, flag):
    value = getattr(args, attr, None)
    if value is None:
        raise _UsageError(f"this command requires {flag}")
    return value


# ---------------------------------------------------------------------------
# command handlers


def _cmd_rank(args) -> int:
    system = _load_system_arg(args.system)
    at = _require(args, "at", "--at")
    matrix = system.evaluate(at).matrix
    profile = rank_profile(matrix, _resolve_tol(args))
    if args.format == "json":
        print(json.dumps({
            "rank": profile.rank,
            "deficiency": profile.deficiency,
            "minor_rows": list(profile.minor_rows),
            "minor_cols": list(profile.minor_cols),
            "singular_values": profile.singular_values.tolist(),
            "tol": profile.tol,
        }))
        return 0
    if args.format == "csv":
        print("field,value")
        print(f"rank,{profile.rank}")
        print(f"deficiency,{profile.deficiency}")
        print(f"minor_rows,{' '.join(map(str, profile.minor_rows))}")
        print(f"minor_cols,{' '.join(map(str, profile.minor_cols))}")
        print(f"tol,{_fmt(profile.tol, 'csv')}")
        for i, s in enumerate(profile.singular_values):
            print(f"singular_value[{i}],{_fmt(float(s), 'csv')}")
        return 0
    print(f"rank: {profile.rank}")
    print(f"deficiency: {profile.deficiency}")
    print(f"minor_rows: {' '.join(map(str, profile.minor_rows))}")
    print(f"minor_cols: {' '.join(map(str, profile.minor_cols))}")
    print(f"tol: {_fmt(profile.tol, 'human')}")
    print(f"singular_values: {_fmt_vec(profile.singular_values, 'human')}")
    return 0


def _cmd_nullsolve(args) -> int:
    system = _load_system_arg(args.system)
    at = _require(args, "at", "--at")
    tol = _resolve_tol(args)
    basis = null_basis(system.evaluate(at).matrix, tol)
    if len(basis) == 0:
        raise NotDeficient("matrix is nonsingular at the query point")
    if len(basis) > 1:
        raise DeficiencyTooHigh(
            len(basis),
            f"deficiency {len(basis)} > 1: no single distinguished direction; "
            "use the frame command",
        )
    vec = basis[0]
    if args.u is not None and float(vec @ args.u) < 0:
        vec = -vec
    if args.format == "json":
        print(json.dumps({"vector": vec.tolist()}))
    elif args.format == "csv":
        print("component,value")
        for i, x in enumerate(vec):
            print(f"{i},{_fmt(float(x), 'csv')}")
    else:
        print(f"x: {_fmt_vec(vec, 'human')}")
    return 0


def _cmd_frame(args) -> int:
    system = _load_system_arg(args.system)
    at = _require(args, "at", "--at")
    frame = frame_solutions(
        system.evaluate(at).matrix, _resolve_tol(args), method=args.method, at=at
    )
    if args.format == "json":
        print(json.dumps({
            "k": len(frame),
            "residual": frame.residual,
            "vectors": [v.tolist() for v in frame.vectors],
        }))
    elif args.format == "csv":
        print("vector,component,value")
        for i, vec in enumerate(frame.vectors):
            for c, x in enumerate(vec):
                print(f"{i},{c},{_fmt(float(x), 'csv')}")
    else:
        print(f"k: {len(frame)}")
        print(f"residual: {_fmt(frame.residual, 'human')}")
        for i, vec in enumerate(frame.vectors):
            print(f"x{i + 1}: {_fmt_vec(vec, 'human')}")
    return 0


def _cmd_track(args) -> int:
    system = _load_system_arg(args.system)
    path = _require(args, "path", "--path")
    tracked = track_frame(system, path, _resolve_tol(args), method=args.method)
    if args.format == "csv":
        sys.stdout.write(tracked.to_csv())
        return 0
    if args.format == "json":
        print(json.dumps({
            "points": [f.at.tolist() for f in tracked.frames],
            "frames": [[v.tolist() for v in f.vectors] for f in tracked.frames],
            "alignment": [
                {"step": s.index, "rotation_angle": s.rotation_angle,
                 "max_delta": s.max_delta}
                for s in tracked.alignment_log
            ],
        }))
        return 0
    k = len(tracked.frames[0]) if tracked.frames else 0
    print(f"points: {len(tracked.frames)}")
    print(f"k: {k}")
    for step in tracked.alignment_log:
        print(
            f"step {step.index}: rotation {_fmt(step.rotation_angle, 'human')} "
            f"delta {_fmt(step.max_delta, 'human')}"
        )
    last = tracked.frames[-1]
    for i, vec in enumerate(last.vectors):
        print(f"x{i + 1}@end: {_fmt_vec(vec, 'human')}")
    return 0


def _require_rhs(system, name):
    if not system.has_rhs:
        raise FramesensError(
            f"system {name!r} has no right-hand side; this command needs one"
        )


def _cmd_solve(args) -> int:
    system = _load_system_arg(args.system)
    at = _require(args, "at", "--at")
    _require_rhs(system, args.system)
    solution = general_solution(system, at, _resolve_tol(args), method=args.method)
    if args.format == "json":
        print(json.dumps({
            "particular": solution.particular.tolist(),
            "k": len(solution.homogeneous),
            "frame": [v.tolist() for v in solution.homogeneous.vectors],
            "frame_residual": solution.homogeneous.residual,
        }))
        return 0
    mode = args.format
    print(f"particular: {_fmt_vec(solution.particular, mode)}")
    print(f"k: {len(solution.homogeneous)}")
    for i, vec in enumerate(solution.homogeneous.vectors):
        print(f"x{i + 1}: {_fmt_vec(vec, mode)}")
    return 0


def _cmd_decompose(args) -> int:
    system = _load_system_arg(args.system)
    at = _require(args, "at", "--at")
    x = _require(args, "x", "--x")
    _require_rhs(system, args.system)
    tol = _resolve_tol(args)
    solution = general_solution(system, at, tol)
    result = decompose(x, solution, tol)
    if args.format == "json":
        print(json.dumps({
            "coefficients": result.coefficients.tolist(),
            "residual": result.residual,
        }))
        return 0
    mode = args.format
    print(f"coefficients: {_fmt_vec(result.coefficients, mode)}")
    print(f"residual: {_fmt(result.residual, mode)}")
    return 0


def _cmd_sens_direct(args) -> int:
    system = _load_system_arg(args.system)
    at = _require(args, "at", "--at")
    param = _require(args, "param", "--param")
    result = direct_sensitivity(system, at, param, anchor=args.u, tol=_resolve_tol(args))
    if args.format == "json":
        print(json.dumps({
            "method": "direct",
            "param": param,
            "derivative": result.derivative.tolist(),
            "c": result.c,
            "anchor": result.anchor.tolist(),
            "solve_count": result.solve_count,
        }))
        return 0
    mode = args.format
    print("method: direct")
    print(f"param: {param}")
    print(f"derivative: {_fmt_vec(result.derivative, mode)}")
    print(f"c: {_fmt(result.c, mode)}")
    print(f"anchor: {_fmt_vec(result.anchor, mode)}")
    print(f"solves: {result.solve_count}")
    return 0


def _cmd_sens_adjoint(args) -> int:
    system = _load_system_arg(args.system)
    at = _require(args, "at", "--at")
    objective = _require(args, "objective", "--objective")
    adj = adjoint_prepare(system, at, objective, anchor=args.u, tol=_resolve_tol(args))
    params = [args.param] if args.param is not None else list(range(1, system.N + 1))
    derivatives = {j: adjoint_derivative(adj, system, at, j) for j in params}
    if args.format == "json":
        print(json.dumps({
            "method": "adjoint",
            "lambda": adj.lambda_,
            "p": adj.p.tolist(),
            "anchor": adj.anchor.tolist(),
            "solve_count": adj.solve_count,
            "derivatives": {str(j): d for j, d in derivatives.items()},
        }))
        return 0
    mode = args.format
    print("method: adjoint")
    print(f"lambda: {_fmt(adj.lambda_, mode)}")
    print(f"p: {_fmt_vec(adj.p, mode)}")
    print(f"anchor: {_fmt_vec(adj.anchor, mode)}")
    print(f"solves: {adj.solve_count}")
    for j in params:
        print(f"d[{j}]: {_fmt(derivatives[j], mode)}")
    return 0


def _cmd_sens_verify(args) -> int:
    system = _load_system_arg(args.system)
    at = _require(args, "at", "--at")
    report = consistency_report(
        system, at, anchor=args.u, tol=_resolve_tol(args), h=args.fd_step
    )
    if args.format == "json":
        print(json.dumps({
            "verdict": report.verdict,
            "h": report.h,
            "solve_count_direct": report.solve_count_direct,
            "solve_count_adjoint": report.solve_count_adjoint,
            "rows": [
                {
                    "param": row.param_index,
                    "err_direct_adjoint": row.err_direct_adjoint,
                    "err_direct_fd": row.err_direct_fd,
                    "err_adjoint_fd": row.err_adjoint_fd,
                    "failures": list(row.failures),
                }
                for row in report.rows
            ],
        }))
    elif args.format == "csv":
        sys.stdout.write(report.to_csv())
    else:
        print(report.to_table())
    return 0 if report.passed else 1


def _cmd_gen(args) -> int:
    family = generate_family(args.seed, args.n, args.N, args.degree)
    text = serialize_system(family.system)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
        print(f"wrote {args.out} ({family.system.name}, degree {args.degree})")
        print(f"validated points: {len(family.validated_points)}")
    else:
        print(text)
    return 0


def _cmd_corpus(args) -> int:
    if args.corpus_cmd == "list":
        for name in corpus_names():
            print(f"{name}: {corpus_entry(name).summary}")
        return 0
    if args.corpus_cmd == "show":
        try:
            entry = corpus_entry(args.name)
        except KeyError as exc:
            raise _UsageError(str(exc.args[0]))
        if args.format == "json":
            polynomial = hasattr(entry.system, "entries")
            print(json.dumps({
                "name": entry.name,
                "summary": entry.summary,
                "domain": entry.domain,
                "notes": list(entry.notes),
                "polynomial": polynomial,
                "system": json.loads(serialize_system(entry.system)) if polynomial else None,
                "checks": [check.description for check in entry.checks],
            }))
            return 0
        print(f"name: {entry.name}")
        print(f"summary: {entry.summary}")
        print(f"domain: {entry.domain}")
        for note in entry.notes:
            print(f"note: {note}")
        for check in entry.checks:
            print(f"check: {check.description}")
        return 0
    # run
    if args.name in (None, "all"):
        names = corpus_names()
    else:
        try:
            corpus_entry(args.name)
        except KeyError as exc:
            raise _UsageError(str(exc.args[0]))
        names = (args.name,)
    failures = 0
    for name in names:
        entry = corpus_entry(name)
        for i, check in enumerate(entry.checks):
            result = check.run()
            status = "PASS" if result.passed else "FAIL"
            failures += 0 if result.passed else 1
            print(f"{name}[{i}] {status} {check.description} ({result.detail})")
    if failures:
        print(f"{failures} corpus check(s) failed")
        return 1
    return 0


def _cmd_bench(args) -> int:
    family = generate_family(args.seed, args.n, args.N, args.degree)
    at = family.validated_points[1]
    anchor = family.null_vector(at)
    timings = {}
    for method in ("direct", "adjoint"):
        start = time.perf_counter()
        result = full_jacobian(family.system, at, anchor=anchor, method=method)
        timings[method] = (time.perf_counter() - start, result.solve_count)
    for method, (elapsed, count) in timings.items():
        print(f"{method}: {count} solves, {elapsed * 1e3:.2f} ms")
    n, N = args.n, args.N
    if N > n:
        note = "adjoint wins (N > n)"
    elif N < n:
        note = "direct wins (N < n)"
    else:
        note = "crossover (N = n)"
    print(f"solve-count crossover at n = N: {note}")
    return 0


# ---------------------------------------------------------------------------
# parser assembly


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--system", help="system file or corpus entry name")
    common.add_argument("--at", type=_parse_vector, help="parameter point, comma-separated")
    common.add_argument("--tol", type=float, help="absolute rank threshold (default: auto)")
    common.add_argument("--method", choices=["auto", "cofactor", "orthogonal"],
                        default="auto", help="frame construction method")
    common.add_argument("--param", type=int, help="parameter index, 1-based")
    common.add_argument("--u", type=_parse_vector, help="anchor vector (default: computed)")
    common.add_argument("--objective", type=_parse_objective,
                        help="coord:<i> or linear:<vector>")
    common.add_argument("--fd-step", type=float, default=1e-5, dest="fd_step",
                        help="finite-difference step h")
    common.add_argument("--format", choices=["human", "csv", "json"], default="human")
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(
        prog="framesens",
        description="Null-space frames and parameter sensitivities of "
                    "singular parametrized linear systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("rank", parents=[common]).set_defaults(handler=_cmd_rank)
    sub.add_parser("nullsolve", parents=[common]).set_defaults(handler=_cmd_nullsolve)
    sub.add_parser("frame", parents=[common]).set_defaults(handler=_cmd_frame)

    track = sub.add_parser("track", parents=[common])
    track.add_argument("--path", type=_parse_path,
                       help="semicolon-separated list of parameter points")
    track.set_defaults(handler=_cmd_track)

    sub.add_parser("solve", parents=[common]).set_defaults(handler=_cmd_solve)

    dec = sub.add_parser("decompose", parents=[common])
    dec.add_argument("--x", type=_parse_vector, help="vector to decompose")
    dec.set_defaults(handler=_cmd_decompose)

    sens = sub.add_parser("sens")
    sens_sub = sens.add_subparsers(dest="sens_cmd", required=True)
    sens_sub.add_parser("direct", parents=[common]).set_defaults(handler=_cmd_sens_direct)
    sens_sub.add_parser("adjoint", parents=[common]).set_defaults(handler=_cmd_sens_adjoint)
    sens_sub.add_parser("verify", parents=[common]).set_defaults(handler=_cmd_sens_verify)

    gen = sub.add_parser("gen", parents=[common])
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--N", type=int, required=True, dest="N")
    gen.add_argument("--degree", type=int, default=1)
    gen.add_argument("--out", help="output system file (default: stdout)")
    gen.set_defaults(handler=_cmd_gen)

    corpus_p = sub.add_parser("corpus", parents=[common])
    corpus_p.add_argument("corpus_cmd", choices=["list", "show", "run"])
    corpus_p.add_argument("name", nargs="?")
    corpus_p.set_defaults(handler=_cmd_corpus)

    bench = sub.add_parser("bench", parents=[common])
    bench.add_argument("--n", type=int, default=10)
    bench.add_argument("--N", type=int, default=10, dest="N")
    bench.add_argument("--degree", type=int, default=1)
    bench.set_defaults(handler=_cmd_bench)

    return parser


def run_command(argv) -> int:
    """Parse and execute one CLI invocation; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except FramesensError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))
