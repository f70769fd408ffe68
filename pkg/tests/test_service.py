import pytest

import ratsode.curves as curves
from ratsode.algebra import WP, RatFunc
from ratsode.exprio import parse_problem, parse_ratfunc, render_expr, result_to_dict
from ratsode.service import (
    ERROR,
    INCONCLUSIVE,
    NO_RGS,
    SOLVED,
    SolverService,
    solve_pipeline,
    verify_general_solution,
)

from conftest import EXAMPLE1_PARAM_W, EXAMPLE2_SOLUTION, integer_residue_potential


def test_verify_general_solution_trivial(z, lam):
    assert verify_general_solution(WP - 1, z + lam)
    assert not verify_general_solution(WP - 1, z * z)
    assert not verify_general_solution(WP - 1, z)


def test_verify_printed_example2_solution(example2_text):
    problem = parse_problem(example2_text)
    assert verify_general_solution(problem.equation, parse_ratfunc(EXAMPLE2_SOLUTION))


def test_verify_printed_example1_family(example1_text, z, lam):
    problem = parse_problem(example1_text)
    family = parse_ratfunc(EXAMPLE1_PARAM_W).subs({"t": z / 27 + lam})
    assert verify_general_solution(problem.equation, family)


def test_example1_with_parametrization(example1_param_text, z, lam):
    result = solve_pipeline(parse_problem(example1_param_text))
    assert result.status == SOLVED
    assert result.verified
    assert result.genus.consensus == 0
    assert result.riccati.C == RatFunc.new(1) / 27
    assert result.riccati.A.is_zero and result.riccati.B.is_zero
    assert result.solution.provenance == "constant_coeff"
    assert result.solution.expr == parse_ratfunc(EXAMPLE1_PARAM_W).subs({"t": z / 27 + lam})


def test_example1_without_parametrization_is_inconclusive(example1_text):
    result = solve_pipeline(parse_problem(example1_text))
    assert result.status == INCONCLUSIVE
    assert result.genus.consensus == 0
    assert "param_w" in result.reason


def test_example2_end_to_end(example2_text):
    result = solve_pipeline(parse_problem(example2_text))
    assert result.status == SOLVED
    assert result.verified
    assert result.normal_r == parse_ratfunc("-6/(z^2 + 2)^2")
    assert result.solution.stage == "w"
    assert result.solution.provenance == "case1"
    assert verify_general_solution(parse_problem(example2_text).equation, result.solution.expr)
    assert [step.target for step in result.chain.steps] == ["w", "t", "u"]


def test_elliptic_has_no_rational_general_solution():
    result = solve_pipeline(parse_problem("equation: wp^2 - w^3 - 1\n"))
    assert result.status == NO_RGS
    assert result.genus.consensus == 1
    assert "genus is 1" in result.reason
    assert result.solution is None


@pytest.mark.parametrize("seed", [0, 1, 17])
def test_elliptic_rejected_for_any_seed(seed):
    result = SolverService(seed=seed).solve(parse_problem("equation: wp^2 - w^3 - 1\n"))
    assert result.status == NO_RGS
    assert len(result.genus.valid_samples) >= 5


def test_leading_coefficient_failure():
    result = solve_pipeline(parse_problem("equation: w*wp^2 - 1\n"))
    assert result.status == NO_RGS
    assert "Fuchs" in result.reason


def test_repeated_factor_screened():
    result = solve_pipeline(parse_problem("equation: (wp - w)^2\n"))
    assert result.status == INCONCLUSIVE
    assert "repeated factor" in result.reason


def test_reducible_equation_inconclusive():
    result = solve_pipeline(parse_problem("equation: wp^2 - w^2\n"))
    assert result.status == INCONCLUSIVE
    assert result.genus.consensus == "reducible_suspected"


def test_autonomous_line(z, lam):
    result = solve_pipeline(parse_problem("equation: wp - 1\n"))
    assert result.status == SOLVED
    assert result.solution.expr == z + lam


def test_exponential_family_rejected():
    result = solve_pipeline(parse_problem("equation: wp - w\n"))
    assert result.status == NO_RGS
    assert "constant-coefficient" in result.reason


def test_linear_case(z, lam):
    result = solve_pipeline(parse_problem("equation: z*wp - w\n"))
    assert result.status == SOLVED
    assert result.solution.provenance == "case2"
    assert result.solution.expr == lam * z


def test_riccati_through_conic(z):
    result = solve_pipeline(parse_problem("equation: wp + w^2 - 2/z^2\n"))
    assert result.status == SOLVED
    assert result.parametrization.source == "builtin_conic"
    assert result.normal_r == 2 / (z * z)
    assert result.verified


def test_manufactured_riccati_equations_solve(rng):
    solved = 0
    while solved < 6:
        _, r, rational = integer_residue_potential(rng, max_poles=3, max_residue=4)
        if not rational or not r.depends_on("z"):
            continue
        result = solve_pipeline(parse_problem(f"equation: wp + w^2 - ({render_expr(r)})\n"))
        assert result.status == SOLVED, (r, result.reason)
        assert result.verified
        assert result.normal_r == r
        solved += 1


def test_riccati_pole_clause_in_reason():
    result = solve_pipeline(parse_problem("equation: wp + w^2 - 1/z^2\n"))
    assert result.status == NO_RGS
    assert "4*beta = n^2 - 1" in result.reason


def test_bad_user_parametrization_is_error():
    text = "equation: wp - 1\nparam_w: t\nparam_wp: t\n"
    result = solve_pipeline(parse_problem(text))
    assert result.status == ERROR
    assert "parametrization rejected" in result.reason


def test_no_verify_reports_unverified(z, lam):
    result = solve_pipeline(parse_problem("equation: wp - 1\n"), verify=False)
    assert result.status == SOLVED
    assert result.verified is False
    assert "skipped" in result.reason


def test_resource_cap(monkeypatch):
    monkeypatch.setattr(curves, "BLOWUP_DEPTH_CAP", 0)
    result = solve_pipeline(parse_problem("equation: wp^2 - w^3\n"))
    assert result.status == INCONCLUSIVE
    assert result.resource_cap


def test_solve_file_reports_format_errors(tmp_problems):
    result = SolverService().solve_file(tmp_problems["broken"])
    assert result.status == ERROR
    assert "line 1" in result.reason
    missing = SolverService().solve_file(tmp_problems["data_dir"] / "absent.problem")
    assert missing.status == ERROR


def test_solve_file_overrides(tmp_problems):
    svc = SolverService(samples=3, seed=5)
    result = svc.solve_file(tmp_problems["elliptic"], samples=4)
    assert result.status == NO_RGS
    assert len(result.genus.valid_samples) == 4


def test_unexpected_exception_becomes_error(monkeypatch):
    import ratsode.service as service

    def explode(*args, **kwargs):
        raise RuntimeError("boom")

    monkeypatch.setattr(service, "algebraic_genus", explode)
    result = solve_pipeline(parse_problem("equation: wp - 1\n"))
    assert result.status == ERROR
    assert "boom" in result.reason


def test_pipeline_is_deterministic(example2_text):
    problem = parse_problem(example2_text)
    first = result_to_dict(solve_pipeline(problem))
    second = result_to_dict(solve_pipeline(problem))
    assert first == second

