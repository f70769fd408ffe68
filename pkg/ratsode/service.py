from __future__ import annotations

import logging
from dataclasses import dataclass

from .algebra import RatFunc, derivative, free_variables, is_squarefree, substitute
from .config import DEFAULT_SAMPLES, DEFAULT_SEED
from .curves import GenusReport, algebraic_genus
from .errors import (
    DegenerateSolution,
    FuchsViolation,
    GenusVerdictError,
    NotConstantCase,
    NotSupported,
    RatsodeError,
    ResourceCapError,
)
from .exprio import Problem, load_problem
from .parametrization import Parametrization, auto_parametrize
from .reduction import (
    LinearCase,
    RiccatiODE,
    SubstitutionChain,
    back_substitute,
    cast_to_riccati,
    derive_param_ode,
    leading_coeff_check,
    normalize_riccati,
)
from .riccati import GeneralSolution, NoRGS, solve_classical, solve_constant_coeff, solve_linear_riccati

logger = logging.getLogger(__name__)

SOLVED = "solved"
NO_RGS = "no_rational_general_solution"
INCONCLUSIVE = "inconclusive"
ERROR = "error"


@dataclass(frozen=True)
class PipelineResult:
    status: str
    reason: str
    genus: GenusReport | None = None
    riccati: RiccatiODE | None = None
    normal_r: RatFunc | None = None
    solution: GeneralSolution | None = None
    verified: bool = False
    parametrization: Parametrization | None = None
    chain: SubstitutionChain | None = None
    resource_cap: bool = False


def verify_general_solution(F, w: RatFunc) -> bool:
    """F(z, w, dw/dz) vanishes identically and w really depends on lambda."""
    if derivative(w, "lambda").is_zero:
        return False
    return substitute(F, {"w": w, "wp": derivative(w, "z")}).is_zero


class _Stop(Exception):
    """Ends a pipeline run early with a finished result."""

    def __init__(self, result: PipelineResult):
        super().__init__(result.reason)
        self.result = result


class SolverService:
    def __init__(self, samples: int | None = None, seed: int | None = None, verify: bool = True):
        self.samples = samples
        self.seed = seed
        self.verify = verify

    def solve_file(self, path, samples: int | None = None, seed: int | None = None,
                   verify: bool | None = None) -> PipelineResult:
        try:
            problem = load_problem(path)
        except RatsodeError as err:
            return PipelineResult(ERROR, str(err))
        return self.solve(problem, samples=samples, seed=seed, verify=verify)

    def solve(self, problem: Problem, samples: int | None = None, seed: int | None = None,
              verify: bool | None = None) -> PipelineResult:
        samples = samples or self.samples or problem.samples or DEFAULT_SAMPLES
        seed = seed if seed is not None else self.seed if self.seed is not None else problem.seed
        seed = DEFAULT_SEED if seed is None else seed
        verify = self.verify if verify is None else verify

        run = _Run(problem, samples, seed, verify)
        try:
            return run.execute()
        except _Stop as stop:
            return stop.result
        except ResourceCapError as err:
            logger.info("resource cap hit: %s", err)
            return run.result(INCONCLUSIVE, f"resource cap: {err}", resource_cap=True)
        except RatsodeError as err:
            return run.result(ERROR, str(err))
        except Exception as err:
            logger.exception("unexpected failure while solving %s", problem.source)
            return run.result(ERROR, f"internal error: {err}")


class _Run:
    """State of one pass through the pipeline."""

    def __init__(self, problem: Problem, samples: int, seed: int, verify: bool):
        self.F = problem.equation
        self.problem = problem
        self.samples = samples
        self.seed = seed
        self.verify = verify
        self.genus: GenusReport | None = None
        self.riccati: RiccatiODE | None = None
        self.normal_r: RatFunc | None = None
        self.parametrization: Parametrization | None = None
        self.chain: SubstitutionChain | None = None

    def result(self, status: str, reason: str, solution: GeneralSolution | None = None,
               verified: bool = False, resource_cap: bool = False) -> PipelineResult:
        return PipelineResult(
            status=status,
            reason=reason,
            genus=self.genus,
            riccati=self.riccati,
            normal_r=self.normal_r,
            solution=solution,
            verified=verified,
            parametrization=self.parametrization,
            chain=self.chain,
            resource_cap=resource_cap,
        )

    def stop(self, status: str, reason: str, **kwargs) -> _Stop:
        logger.info("%s: %s", status, reason)
        return _Stop(self.result(status, reason, **kwargs))

    def execute(self) -> PipelineResult:
        self.screen()
        self.check_genus()
        self.check_leading_coefficient()
        self.parametrize()
        solution = self.solve_constant_case()
        if solution is None:
            solution = self.solve_riccati()
        return self.finish(solution)

    def screen(self):
        if not is_squarefree(self.F, ("w", "wp")):
            raise self.stop(INCONCLUSIVE, "equation has a repeated factor in (w, wp); factor it first")

    def check_genus(self):
        try:
            self.genus = algebraic_genus(self.F, self.samples, self.seed)
        except GenusVerdictError as err:
            self.genus = err.report
            raise self.stop(INCONCLUSIVE, f"genus test inconclusive: {err}")
        g = self.genus.consensus
        if g != 0:
            agreeing = sum(1 for value in self.genus.valid_samples if value == g)
            raise self.stop(NO_RGS, f"algebraic genus is {g} on {agreeing} of "
                                    f"{len(self.genus.valid_samples)} samples; a rational general "
                                    f"solution needs genus 0")

    def check_leading_coefficient(self):
        check = leading_coeff_check(self.F)
        if not check.passed:
            raise self.stop(NO_RGS, f"leading coefficient {check.leading.as_expr()} of wp depends on w "
                                    f"(Fuchs condition 1: movable singularities)")

    def parametrize(self):
        supplied = self.problem.parametrization
        if supplied is not None:
            try:
                self.parametrization = Parametrization.checked(self.F, *supplied, source="user_supplied")
            except NotSupported as err:
                raise self.stop(ERROR, f"supplied parametrization rejected: {err}")
        else:
            try:
                self.parametrization = auto_parametrize(self.F)
            except NotSupported as err:
                raise self.stop(INCONCLUSIVE, f"no built-in parametrization ({err}); "
                                              f"supply param_w and param_wp")
        logger.info("parametrization from %s: w = %s", self.parametrization.source,
                    self.parametrization.r1)

    def cast(self) -> RiccatiODE:
        try:
            self.riccati = cast_to_riccati(derive_param_ode(self.parametrization))
        except FuchsViolation as err:
            raise self.stop(NO_RGS, f"{err}; the reduced equation is not Riccati, so solutions "
                                    f"have movable critical points")
        return self.riccati

    def solve_constant_case(self) -> GeneralSolution | None:
        if "z" in free_variables(self.F):
            return None
        rc = self.cast()
        try:
            solution = solve_constant_coeff(self.F, self.parametrization)
        except NotConstantCase as err:
            logger.debug("constant-coefficient route skipped: %s", err)
            return None
        self.chain = SubstitutionChain(()).with_parametrization(self.parametrization)
        if not rc.A.is_zero:
            self.normal_r = rc.B * rc.B / 4 - rc.A * rc.C
        if solution is None:
            raise self.stop(NO_RGS, "constant-coefficient reduction gives u' = b*u + c with b != 0 "
                                    "or u' + u^2 = c with c != 0, neither of which has a rational "
                                    "general solution")
        return solution

    def solve_riccati(self) -> GeneralSolution:
        rc = self.riccati or self.cast()
        normal = normalize_riccati(rc)
        if isinstance(normal, LinearCase):
            found = solve_linear_riccati(normal.B, normal.C)
            if found is None:
                raise self.stop(NO_RGS, "linear case: exp(int B) or int C*exp(-int B) is not rational "
                                        "(non-rational exponential/integral)")
            self.chain = SubstitutionChain(()).with_parametrization(self.parametrization)
            provenance = "case2"
        else:
            self.normal_r, chain = normal
            found = solve_classical(self.normal_r)
            if isinstance(found, NoRGS):
                raise self.stop(NO_RGS, f"v' + v^2 = r: {found}")
            self.chain = chain.with_parametrization(self.parametrization)
            provenance = "case1"
        try:
            w = back_substitute(self.chain, found.expr)
        except DegenerateSolution as err:
            raise self.stop(INCONCLUSIVE, f"back-substitution degenerated: {err}")
        return GeneralSolution(w, "w", provenance)

    def finish(self, solution: GeneralSolution) -> PipelineResult:
        if not self.verify:
            return self.result(SOLVED, "verification skipped (--no-verify)", solution=solution)
        if verify_general_solution(self.F, solution.expr):
            return self.result(SOLVED, f"rational general solution found ({solution.provenance})",
                               solution=solution, verified=True)
        return self.result(INCONCLUSIVE, "candidate family failed exact verification; the "
                                         "parametrization may not be proper", solution=solution)


def solve_pipeline(problem: Problem, verify: bool = True) -> PipelineResult:
    return SolverService(verify=verify).solve(problem)
