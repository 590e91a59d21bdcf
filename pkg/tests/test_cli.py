"""Command-line interface: exit codes, artifacts, and cross-command flows."""

import json
import subprocess
import sys

import numpy as np
import pytest

from leechsolve.cli import main
from leechsolve.files import (
    coefficients_from_dict,
    load,
    read_problem,
    read_solution,
    write_problem,
    write_realization,
)
from leechsolve.generate import random_contraction, random_problem
from leechsolve.realization import Realization, constant, evaluate, product
from tests.conftest import circle_points


@pytest.fixture()
def problem_file(tmp_path):
    data, _ = random_problem(120)
    path = tmp_path / "problem.json"
    write_problem(data, path)
    return path, data


@pytest.fixture()
def kernel_file(tmp_path, kernel_case):
    path = tmp_path / "kernel.json"
    write_problem(kernel_case.data, path)
    return path


class TestCheck:
    def test_feasible(self, problem_file, capsys):
        path, _ = problem_file
        assert main(["check", str(path)]) == 0
        out = capsys.readouterr().out
        assert "validation: dimensions ok" in out
        assert "verdict: FEASIBLE" in out
        assert "positivity gap min eigenvalue" in out

    def test_infeasible(self, tmp_path, capsys):
        data, _ = random_problem(121, kind="infeasible")
        path = tmp_path / "bad.json"
        write_problem(data, path)
        assert main(["check", str(path)]) == 2
        assert "verdict: INFEASIBLE" in capsys.readouterr().out

    def test_invalid_data(self, tmp_path, capsys):
        data, _ = random_problem(122)
        from leechsolve.core import LeechData
        bad = LeechData(np.eye(data.n), data.B1, data.B2, data.C, data.D1, data.D2)
        path = tmp_path / "unstable.json"
        write_problem(bad, path)
        assert main(["check", str(path)]) == 1
        out = capsys.readouterr().out
        assert "validation: stability FAIL" in out
        assert "verdict: INVALID" in out


class TestSolve:
    def test_central_solution_artifact(self, problem_file, tmp_path, capsys):
        path, data = problem_file
        out_path = tmp_path / "solution.json"
        assert main(["solve", str(path), "--out", str(out_path)]) == 0
        assert "solution:" in capsys.readouterr().out
        X, verification = read_solution(out_path)
        assert verification["interpolation_residual"] <= 1e-7
        assert verification["norm_estimate"] <= 1.0 + 1e-7
        G, K = data.g(), data.k()
        for z in circle_points(16):
            res = evaluate(G, z) @ evaluate(X, z) - evaluate(K, z)
            assert np.linalg.norm(res, 2) <= 1e-7

    def test_json_on_stdout_without_out(self, problem_file, capsys):
        path, _ = problem_file
        assert main(["solve", str(path)]) == 0
        captured = capsys.readouterr()
        doc = json.loads(captured.out)
        assert doc["type"] == "leech_solution"
        assert "solution:" in captured.err

    def test_zero_numerator_reproduces_kernel_action(
            self, kernel_file, tmp_path, kernel_case, capsys):
        c = kernel_case.coeffs
        Y = random_contraction(11, c.free_dim, c.q, constant_only=True)
        ypath = tmp_path / "y.json"
        write_realization(Y, ypath)
        out_path = tmp_path / "x.json"
        assert main(["solve", str(kernel_file), str(ypath),
                     "--out", str(out_path)]) == 0
        X, _ = read_solution(out_path)
        ref = product(c.U11, Y)
        for z in circle_points(8):
            np.testing.assert_allclose(evaluate(X, z), evaluate(ref, z), atol=1e-10)

    def test_distinct_parameters_give_distinct_solutions(
            self, problem_file, tmp_path, capsys):
        path, data = problem_file
        outs = []
        for pseed in (12, 13):
            ypath = tmp_path / f"y{pseed}.json"
            from leechsolve import build_upsilon, solve as solve_data
            coeffs = build_upsilon(solve_data(data))
            write_realization(
                random_contraction(pseed, coeffs.free_dim, coeffs.q), ypath)
            out_path = tmp_path / f"x{pseed}.json"
            assert main(["solve", str(path), str(ypath),
                         "--out", str(out_path)]) == 0
            outs.append(read_solution(out_path)[0])
        diff = max(np.linalg.norm(evaluate(outs[0], z) - evaluate(outs[1], z))
                   for z in circle_points(8))
        assert diff > 1e-3

    def test_norm_violation_exits_3(self, problem_file, tmp_path, capsys):
        path, data = problem_file
        from leechsolve import build_upsilon, solve as solve_data
        coeffs = build_upsilon(solve_data(data))
        Y = constant(1.2 * np.eye(coeffs.free_dim, coeffs.q))
        ypath = tmp_path / "big.json"
        write_realization(Y, ypath)
        assert main(["solve", str(path), str(ypath)]) == 3
        assert "error:" in capsys.readouterr().err

    def test_unstable_parameter_exits_3(self, problem_file, tmp_path, capsys):
        path, data = problem_file
        from leechsolve import build_upsilon, solve as solve_data
        coeffs = build_upsilon(solve_data(data))
        k, q = coeffs.free_dim, coeffs.q
        Y = Realization(1.5 * np.eye(1), np.ones((1, q)),
                        0.01 * np.ones((k, 1)), np.zeros((k, q)))
        ypath = tmp_path / "unstable.json"
        write_realization(Y, ypath)
        assert main(["solve", str(path), str(ypath)]) == 3

    def test_wrong_shape_parameter_exits_3(self, problem_file, tmp_path, capsys):
        path, _ = problem_file
        ypath = tmp_path / "shape.json"
        write_realization(constant(np.zeros((7, 7))), ypath)
        assert main(["solve", str(path), str(ypath)]) == 3

    def test_infeasible_exits_2(self, tmp_path, capsys):
        data, _ = random_problem(123, kind="infeasible")
        path = tmp_path / "bad.json"
        write_problem(data, path)
        assert main(["solve", str(path)]) == 2


class TestCoefficients:
    def test_zero_numerator_artifact(self, kernel_file, tmp_path, kernel_case, capsys):
        out_path = tmp_path / "coeffs.json"
        assert main(["coefficients", str(kernel_file),
                     "--out", str(out_path)]) == 0
        assert "coefficients:" in capsys.readouterr().out
        doc = coefficients_from_dict(load(out_path))
        q = kernel_case.data.q
        # with K = 0 the lower-right coefficient is constantly the identity
        np.testing.assert_allclose(doc["U22"].D, np.eye(q), atol=1e-12)
        assert np.linalg.norm(doc["U22"].B) <= 1e-13
        np.testing.assert_allclose(doc["Delta0"], np.eye(q), atol=1e-12)
        for name in ("Phi11", "Phi12", "Phi21", "Phi22"):
            assert name in doc

    def test_matches_library(self, problem_file, tmp_path, capsys):
        path, data = problem_file
        out_path = tmp_path / "coeffs.json"
        assert main(["coefficients", str(path), "--out", str(out_path)]) == 0
        doc = coefficients_from_dict(load(out_path))
        from leechsolve import build_upsilon, solve as solve_data
        coeffs = build_upsilon(solve_data(data))
        np.testing.assert_allclose(doc["Theta0"], coeffs.Theta0, atol=0.0)
        np.testing.assert_allclose(doc["U11"].D, coeffs.U11.D, atol=0.0)


class TestOracle:
    def test_ladder_report(self, problem_file, tmp_path, capsys):
        path, _ = problem_file
        out_path = tmp_path / "report.json"
        assert main(["oracle", str(path), "--truncation", "120",
                     "--out", str(out_path)]) == 0
        out = capsys.readouterr().out
        assert "margin: N=30" in out and "margin: N=120" in out
        assert "verdict: FEASIBLE" in out
        report = load(out_path)
        assert report["truncations"] == [30, 60, 120]
        margins = [report["margins"][str(N)] for N in (30, 60, 120)]
        assert margins[2] <= margins[1] + 1e-12 <= margins[0] + 2e-12
        assert all(m > 0 for m in margins)
        # agreement tightens as the window grows
        c30 = report["comparisons"]["30"]
        c120 = report["comparisons"]["120"]
        for key in ("U11", "U12", "U21", "U22", "Delta0", "Delta1"):
            assert c120[key] <= c30[key] + 1e-12
        assert c120["U11"] <= 1e-5

    def test_infeasible_skips_comparison(self, tmp_path, capsys):
        data, _ = random_problem(124, kind="infeasible")
        path = tmp_path / "bad.json"
        write_problem(data, path)
        out_path = tmp_path / "report.json"
        assert main(["oracle", str(path), "--truncation", "60",
                     "--out", str(out_path)]) == 2
        out = capsys.readouterr().out
        assert "oracle comparison skipped" in out
        report = load(out_path)
        assert report["verdict"].startswith("infeasible")
        assert "comparisons" not in report


class TestGenerateAndErrors:
    def test_generate_then_check(self, tmp_path, capsys):
        path = tmp_path / "generated.json"
        assert main(["generate", "--seed", "5", "--out", str(path)]) == 0
        assert "generated: seed 5" in capsys.readouterr().out
        data, _ = read_problem(path)
        doc = load(path)
        assert doc["provenance"]["seed"] == 5
        assert doc["provenance"]["margin_estimate"] > 0
        assert main(["check", str(path)]) == 0

    def test_generate_is_deterministic(self, tmp_path):
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["generate", "--seed", "6", "--out", str(p1)]) == 0
        assert main(["generate", "--seed", "6", "--out", str(p2)]) == 0
        assert p1.read_text() == p2.read_text()

    def test_ragged_file_exits_1(self, tmp_path, capsys):
        data, _ = random_problem(125)
        from leechsolve.files import problem_to_dict, dump
        doc = problem_to_dict(data)
        doc["A"][0] = doc["A"][0][:-1]
        path = tmp_path / "ragged.json"
        dump(doc, path)
        assert main(["check", str(path)]) == 1
        assert "error:" in capsys.readouterr().err

    def test_missing_file_exits_1(self, tmp_path, capsys):
        assert main(["check", str(tmp_path / "nope.json")]) == 1

    def test_malformed_json_exits_1(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        assert main(["solve", str(path)]) == 1
        assert "line" in capsys.readouterr().err


class TestProcessLevel:
    def test_console_script_and_logging(self, tmp_path):
        data, _ = random_problem(126)
        path = tmp_path / "problem.json"
        write_problem(data, path)
        proc = subprocess.run(
            [sys.executable, "-m", "leechsolve.cli", "check", str(path)],
            capture_output=True, text=True,
            env={"PATH": "/usr/bin:/bin", "LEECH_LOG": "DEBUG"})
        assert proc.returncode == 0
        assert "verdict: FEASIBLE" in proc.stdout
        assert "positivity gaps" in proc.stderr

    def test_log_level_defaults_quiet(self, tmp_path):
        data, _ = random_problem(126)
        path = tmp_path / "problem.json"
        write_problem(data, path)
        proc = subprocess.run(
            [sys.executable, "-m", "leechsolve.cli", "check", str(path)],
            capture_output=True, text=True, env={"PATH": "/usr/bin:/bin"})
        assert proc.returncode == 0
        assert "positivity gaps" not in proc.stderr
