"""Command-line interface.

Subcommands: check, solve, coefficients, oracle, generate.  Exit codes:
0 success/feasible, 1 input error (parse, validation, missing file),
2 infeasible data or numerical breakdown, 3 free-parameter violation.
The LEECH_LOG environment variable sets the logging level on stderr.
"""

import argparse
import logging
import os
import sys

import numpy as np

from . import files
from .coefficients import (
    apply_lft,
    build_redheffer,
    build_upsilon,
    solution_report,
)
from .core import solve, theta0_defect, validate
from .errors import (
    DefinitenessError,
    FileFormatError,
    InfeasibleError,
    LeechError,
    NotInvertibleError,
    ParameterError,
    RiccatiError,
    StabilityError,
    ValidationError,
)
from .generate import random_problem
from .realization import evaluate, zeros
from .toeplitz import OracleContext, oracle_upsilon, theta0_defect_oracle

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INFEASIBLE = 2
EXIT_PARAMETER = 3

log = logging.getLogger("leechsolve.cli")


def _setup_logging():
    level_name = os.environ.get("LEECH_LOG", "WARNING").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(stream=sys.stderr, level=level,
                        format="%(levelname)s %(name)s: %(message)s")


def _opt(args, options, key, default):
    val = getattr(args, key, None)
    if val is not None:
        return val
    if key in options:
        return options[key]
    return default


def _emit(doc, out_path, summary_lines):
    """Write a JSON artifact to --out (summary to stdout) or to stdout
    (summary to stderr)."""
    if out_path:
        files.dump(doc, out_path)
        for line in summary_lines:
            print(line)
    else:
        print(files.dump(doc))
        for line in summary_lines:
            print(line, file=sys.stderr)


def cmd_check(args):
    data, options = files.read_problem(args.problem)
    tol = float(_opt(args, options, "tol", 1e-9))
    report = validate(data, tol=tol)
    for check in report.checks:
        print(f"validation: {check.name} {'ok' if check.passed else 'FAIL'} ({check.detail})")
    if not report.ok:
        print("verdict: INVALID")
        return EXIT_INPUT
    rank_tol = float(_opt(args, options, "rank_tol", 1e-8))
    try:
        derived = solve(data, tol=tol, rank_tol=rank_tol)
    except (InfeasibleError, RiccatiError) as exc:
        print(f"verdict: INFEASIBLE ({exc})")
        return EXIT_INFEASIBLE
    mg = derived.margins
    print(f"riccati: pair converged in {mg['riccati_iterations']} iterations, "
          f"residual {mg['riccati_residual']:.3e}")
    print(f"riccati: kernel converged in {mg['kernel_riccati_iterations']} iterations, "
          f"residual {mg['kernel_riccati_residual']:.3e}")
    print(f"margin: positivity gap min eigenvalue {mg['gap_min_eig']:.6e}")
    print(f"margin: kernel gap min eigenvalue {mg['gap0_min_eig']:.6e}")
    print("verdict: FEASIBLE")
    return EXIT_OK


def cmd_solve(args):
    data, options = files.read_problem(args.problem)
    tol = float(_opt(args, options, "tol", 1e-9))
    rank_tol = float(_opt(args, options, "rank_tol", 1e-8))
    grid = int(_opt(args, options, "grid", 512))
    derived = solve(data, tol=tol, rank_tol=rank_tol)
    coeffs = build_upsilon(derived)
    if args.parameter:
        Y = files.read_realization(args.parameter)
    else:
        Y = zeros(coeffs.free_dim, coeffs.q)
    X = apply_lft(coeffs, Y, tol=tol)
    verification = solution_report(derived, coeffs, X, grid=grid)
    residual = verification["interpolation_residual"]
    norm = verification["norm_estimate"]
    if residual > 1e-5 * (1.0 + float(np.linalg.norm(data.D2))):
        raise InfeasibleError(
            f"solution failed verification: interpolation residual {residual:.3e}")
    if norm > 1.0 + 1e-6:
        raise InfeasibleError(
            f"solution failed verification: norm estimate {norm:.9f} exceeds 1")
    _emit(files.solution_to_dict(X, verification), args.out, [
        f"solution: state dimension {X.state_dim}, "
        f"residual {residual:.3e}, norm estimate {norm:.9f}",
    ])
    return EXIT_OK


def cmd_coefficients(args):
    data, options = files.read_problem(args.problem)
    tol = float(_opt(args, options, "tol", 1e-9))
    rank_tol = float(_opt(args, options, "rank_tol", 1e-8))
    derived = solve(data, tol=tol, rank_tol=rank_tol)
    coeffs = build_upsilon(derived)
    phi = build_redheffer(coeffs)
    _emit(files.coefficients_to_dict(coeffs, phi), args.out, [
        f"coefficients: free parameter size {coeffs.free_dim}x{coeffs.q}, "
        f"shared state dimension {derived.A0.shape[0]}",
    ])
    return EXIT_OK


def _sample_points(radii=(0.3, 0.6, 0.9), angles=5):
    pts = [0.0 + 0.0j]
    for r in radii:
        for j in range(angles):
            pts.append(r * np.exp(2j * np.pi * (j + 0.25) / angles))
    return pts


def cmd_oracle(args):
    data, options = files.read_problem(args.problem)
    tol = float(_opt(args, options, "tol", 1e-9))
    rank_tol = float(_opt(args, options, "rank_tol", 1e-8))
    trunc = _opt(args, options, "truncation", None)
    if trunc is None:
        ladder = [50, 100, 200]
    else:
        trunc = int(trunc)
        ladder = sorted({max(8, trunc // 4), max(16, trunc // 2), trunc})
    contexts = {N: OracleContext(data, N) for N in ladder}
    margins = {N: contexts[N].margin for N in ladder}
    for N in ladder:
        print(f"margin: N={N} smallest eigenvalue {margins[N]:.6e}")
    report = {"type": "oracle_report", "truncations": ladder,
              "margins": {str(N): margins[N] for N in ladder}}
    feasible = all(m > 0.0 for m in margins.values())
    derived = None
    if feasible:
        try:
            derived = solve(data, tol=tol, rank_tol=rank_tol)
        except (InfeasibleError, RiccatiError) as exc:
            report["verdict"] = f"infeasible: {exc}"
            feasible = False
    if not feasible or derived is None:
        report.setdefault("verdict", "infeasible: truncated Gram margin not positive")
        print("verdict: INFEASIBLE -- oracle comparison skipped")
        if args.out:
            files.dump(report, args.out)
        return EXIT_INFEASIBLE

    coeffs = build_upsilon(derived)
    pts = _sample_points()
    names = ("U11", "U12", "U21", "U22")
    ss = {name: [evaluate(getattr(coeffs, name), z) for z in pts] for name in names}
    M_ss = theta0_defect(data, derived.Q0, derived.P1)
    report["comparisons"] = {}
    for N in ladder:
        ctx = contexts[N]
        orc = oracle_upsilon(ctx, derived.Theta0, pts)
        entry = {}
        for name in names:
            entry[name] = max(
                float(np.linalg.norm(a - b)) for a, b in zip(ss[name], orc[name]))
        entry["Delta0"] = float(np.linalg.norm(orc["Delta0"] - derived.Delta0))
        entry["Delta1"] = float(np.linalg.norm(orc["Delta1"] - derived.Delta1))
        entry["theta0_defect"] = float(np.linalg.norm(theta0_defect_oracle(ctx) - M_ss))
        report["comparisons"][str(N)] = entry
        row = ", ".join(f"{name} {entry[name]:.3e}" for name in
                        names + ("Delta0", "Delta1", "theta0_defect"))
        print(f"compare: N={N} {row}")
    report["verdict"] = "feasible"
    print("verdict: FEASIBLE")
    if args.out:
        files.dump(report, args.out)
    return EXIT_OK


def cmd_generate(args):
    seed = args.seed
    if seed is None:
        seed = int.from_bytes(os.urandom(4), "little")
    data, meta = random_problem(seed)
    meta = {key: (float(val) if isinstance(val, (float, np.floating)) else val)
            for key, val in meta.items()}
    doc = files.problem_to_dict(data, provenance=meta)
    _emit(doc, args.out, [
        f"generated: seed {seed}, dims {meta['dims']}, "
        f"margin estimate {meta['margin_estimate']:.6e}",
    ])
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="leechsolve",
        description="Solve and parametrize suboptimal rational Leech problems "
                    "G X = K with contractive X, from state-space data.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, rank=True):
        sp.add_argument("--tol", type=float, default=None,
                        help="positivity / verification tolerance (default 1e-9)")
        if rank:
            sp.add_argument("--rank-tol", dest="rank_tol", type=float, default=None,
                            help="rank decision tolerance (default 1e-8)")

    sp = sub.add_parser("check", help="validate a problem and decide feasibility")
    sp.add_argument("problem")
    add_common(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("solve", help="compute a solution (central unless a "
                                      "parameter file is given)")
    sp.add_argument("problem")
    sp.add_argument("parameter", nargs="?", default=None,
                    help="optional realization file for the free parameter Y")
    sp.add_argument("--out", default=None, help="output path (default stdout)")
    sp.add_argument("--grid", type=int, default=None,
                    help="circle grid for the norm estimate (default 512)")
    add_common(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("coefficients",
                        help="write the parametrization coefficients")
    sp.add_argument("problem")
    sp.add_argument("--out", default=None, help="output path (default stdout)")
    add_common(sp)
    sp.set_defaults(func=cmd_coefficients)

    sp = sub.add_parser("oracle",
                        help="cross-validate against truncated Toeplitz compressions")
    sp.add_argument("problem")
    sp.add_argument("--truncation", type=int, default=None,
                    help="largest truncation order (ladder N/4, N/2, N; default 200)")
    sp.add_argument("--out", default=None, help="optional JSON report path")
    add_common(sp)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("generate", help="generate a random feasible problem")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--out", default=None, help="output path (default stdout)")
    sp.set_defaults(func=cmd_generate)

    return parser


def main(argv=None):
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FileFormatError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMETER
    except (InfeasibleError, RiccatiError, StabilityError,
            NotInvertibleError, DefinitenessError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except LeechError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
