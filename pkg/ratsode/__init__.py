from .exprio import Problem, load_problem, parse_problem
from .service import PipelineResult, SolverService, solve_pipeline, verify_general_solution

__all__ = [
    "PipelineResult",
    "Problem",
    "SolverService",
    "load_problem",
    "parse_problem",
    "solve_pipeline",
    "verify_general_solution",
]
