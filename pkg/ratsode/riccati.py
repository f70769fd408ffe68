"""Rational general solutions of Riccati equations.

``solve_classical`` handles v' + v^2 = r by the rational (first) case of
Kovacic's algorithm followed by a reduction to a linear equation; the linear
and constant-coefficient cases are solved directly.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass

from sympy import Matrix
from sympy.polys.domains import QQ

from .algebra import (
    ONE,
    R,
    Z,
    RatFunc,
    degree_in,
    derivative,
    extension_residue,
    factor_univariate,
    free_variables,
    hermite_integrate,
    partial_fractions,
    poly_lcm,
    rational_sqrt,
    substitute,
)
from .config import MAX_POLE_CLUSTERS
from .errors import ClusterCapExceeded, DegenerateSolution, NotConstantCase
from .numberfield import FieldElement
from .parametrization import Parametrization
from .reduction import (
    RiccatiODE,
    SubstitutionChain,
    SubstitutionStep,
    back_substitute,
    cast_to_riccati,
    derive_param_ode,
    riccati_residual,
)

logger = logging.getLogger(__name__)

STAGES = ("v", "t", "u", "w")
PROVENANCES = ("constant_coeff", "case1", "case2")


@dataclass(frozen=True)
class PoleDatum:
    q: object  # monic irreducible PolyElement in z
    mult: int
    beta: FieldElement
    gamma: FieldElement
    n: int | None


@dataclass(frozen=True)
class NoRGS:
    reason: str
    clause: str

    def __str__(self) -> str:
        return f"{self.reason} ({self.clause})"


@dataclass(frozen=True)
class Case1Candidate:
    omega: RatFunc
    residue_choices: tuple
    degree_bound: int


@dataclass(frozen=True)
class GeneralSolution:
    expr: RatFunc
    stage: str
    provenance: str

    @classmethod
    def certified(cls, expr: RatFunc, stage: str, provenance: str, residual) -> "GeneralSolution":
        """Build a solution after checking λ-dependence and ``residual(expr) == 0``."""
        if stage not in STAGES or provenance not in PROVENANCES:
            raise ValueError(f"bad solution tag {stage!r}/{provenance!r}")
        if derivative(expr, "lambda").is_zero:
            raise DegenerateSolution("solution family does not depend on lambda")
        if not residual(expr).is_zero:
            raise DegenerateSolution(f"{stage}-stage family fails its equation")
        return cls(expr, stage, provenance)


def classical_residual(r: RatFunc):
    def residual(v: RatFunc) -> RatFunc:
        return derivative(v, "z") + v * v - r

    return residual


def _simple_family() -> RatFunc:
    return ONE / (RatFunc.var("z") + RatFunc.var("lambda"))


# Poles


def _is_univariate_z(r: RatFunc) -> bool:
    return set(r.variables) <= {"z"}


def analyze_poles(r: RatFunc):
    """Pole data of r, or ``NoRGS`` naming the violated condition."""
    if not _is_univariate_z(r):
        raise ValueError("r must be a rational function of z")
    if degree_in(r.num, "z") - degree_in(r.den, "z") > -2:
        return NoRGS("r does not vanish to order 2 at infinity", "deg(num) - deg(den) <= -2")
    _, factors = factor_univariate(r.den)
    if len(factors) > MAX_POLE_CLUSTERS:
        raise ClusterCapExceeded(f"{len(factors)} pole clusters exceed the cap of {MAX_POLE_CLUSTERS}")
    data = []
    for q, m in factors:
        if m != 2:
            kind = "simple" if m == 1 else f"order-{m}"
            return NoRGS(f"{kind} pole at the roots of {q.as_expr()}", "only double poles")
        beta = extension_residue(r, q, 2)
        gamma = extension_residue(r, q, 1)
        if not beta.is_rational:
            return NoRGS(f"double-pole coefficient {beta} varies over the roots of {q.as_expr()}",
                         "4*beta = n^2 - 1")
        root = rational_sqrt(4 * beta.as_rational() + 1)
        if root is None or root.denominator != 1 or root < 2:
            return NoRGS(f"4*beta + 1 = {4 * beta.as_rational() + 1} is not the square of an integer n >= 2",
                         "4*beta = n^2 - 1")
        data.append(PoleDatum(q, m, beta, gamma, int(root.numerator)))
    return data


def _exponents_at_infinity(r: RatFunc):
    order = degree_in(r.den, "z") - degree_in(r.num, "z")
    if r.is_zero or order > 2:
        return [QQ(0), QQ(1)]
    if order < 2:
        return []
    b_inf = r.num.LC / r.den.LC
    root = rational_sqrt(1 + 4 * b_inf)
    if root is None:
        return []
    return sorted({(1 + root) / 2, (1 - root) / 2}, reverse=True)


# Case 1


def polynomial_solutions(omega: RatFunc, r: RatFunc, d: int) -> list:
    """Basis of polynomials P of degree <= d with P'' + 2 omega P' + (omega' + omega^2 - r) P = 0."""
    if d < 0:
        return []
    potential = derivative(omega, "z") + omega * omega - r
    columns = []
    for k in range(d + 1):
        P = RatFunc.new(Z**k)
        dP = derivative(P, "z")
        columns.append(derivative(dP, "z") + 2 * omega * dP + potential * P)
    common = R.one
    for col in columns:
        common = poly_lcm(common, col.den)
    cleared = [col.num * common.exquo(col.den) for col in columns]
    terms = [dict(p.items()) for p in cleared]
    rows = sorted({monom for p in terms for monom in p})
    if not rows:
        vectors = [[QQ(int(i == k)) for i in range(d + 1)] for k in range(d + 1)]
    else:
        matrix = Matrix([[QQ.to_sympy(p.get(m, QQ.zero)) for p in terms] for m in rows])
        vectors = [[QQ.from_sympy(c) for c in vec] for vec in matrix.nullspace()]
    return [sum((Z**k * c for k, c in enumerate(vec) if c), R.zero) for vec in vectors]


def case1_candidates(r: RatFunc, poles: list[PoleDatum]):
    """Yield (candidate, v0) over every residue branch that produces a solution."""
    exponents = _exponents_at_infinity(r)
    branches = [(QQ(1 + p.n, 2), QQ(1 - p.n, 2)) for p in poles]
    logger.debug("case 1: %d residue branches, %d exponents at infinity",
                 2 ** len(poles), len(exponents))
    for choice in itertools.product(*branches):
        omega = RatFunc.new(R.zero)
        for a, pole in zip(choice, poles):
            omega = omega + RatFunc.new(pole.q.diff(Z)) * a / RatFunc.new(pole.q)
        poles_weight = sum((a * pole.q.degree(Z) for a, pole in zip(choice, poles)), QQ(0))
        for a_inf in exponents:
            d = a_inf - poles_weight
            if d.denominator != 1 or d < 0:
                continue
            d = int(d.numerator)
            for P in polynomial_solutions(omega, r, d):
                v0 = omega + derivative(RatFunc.new(P), "z") / RatFunc.new(P)
                if (derivative(v0, "z") + v0 * v0 - r).is_zero:
                    yield Case1Candidate(omega, tuple(choice), d), v0
                    break


def particular_rational_solution(r: RatFunc, poles: list[PoleDatum]) -> RatFunc | None:
    if r.is_zero:
        return RatFunc.new(R.zero)
    for _, v0 in case1_candidates(r, poles):
        return v0
    return None


def rational_exponential(f: RatFunc) -> RatFunc | None:
    """exp(integral of f) when it is rational: a product of q^m over the poles of f."""
    pf = partial_fractions(f)
    if pf.poly_part:
        return None
    out = RatFunc.new(R.one)
    for q, k, a in pf.terms:
        if k != 1:
            return None
        ratio = RatFunc.new(a, q.diff(Z))
        if not ratio.is_constant:
            return None
        m = ratio.constant_value()
        if m.denominator != 1:
            return None
        out = out * RatFunc.new(q) ** int(m.numerator)
    return out


def general_from_particular(v0: RatFunc, r: RatFunc) -> GeneralSolution | None:
    """v = v0 + 1/u with u' = 2 v0 u + 1, so u = N (lambda + int 1/N) with N = exp(int 2 v0)."""
    N = rational_exponential(2 * v0)
    if N is None:
        return None
    integral, log_free = hermite_integrate(ONE / N)
    if not log_free:
        return None
    v = v0 + ONE / (N * (RatFunc.var("lambda") + integral))
    return GeneralSolution.certified(v, "v", "case1", classical_residual(r))


def solve_classical(r: RatFunc):
    """General solution of v' + v^2 = r, or ``NoRGS``."""
    if r.is_zero:
        return GeneralSolution.certified(_simple_family(), "v", "case1", classical_residual(r))
    poles = analyze_poles(r)
    if isinstance(poles, NoRGS):
        return poles
    found = False
    for candidate, v0 in case1_candidates(r, poles):
        found = True
        logger.debug("particular solution %s from residues %s", v0, candidate.residue_choices)
        solution = general_from_particular(v0, r)
        if solution is not None:
            return solution
    if found:
        return NoRGS("exp(2*int v0) or int exp(-2*int v0) is not rational on any branch",
                     "non-rational exponential/integral")
    return NoRGS("no residue branch gives a polynomial solution of the auxiliary equation",
                 "Kovacic case 1")


# Linear and constant cases


def linear_residual(B: RatFunc, C: RatFunc):
    def residual(t: RatFunc) -> RatFunc:
        return derivative(t, "z") - B * t - C

    return residual


def equation_residual(F):
    def residual(w: RatFunc) -> RatFunc:
        return substitute(F, {"w": w, "wp": derivative(w, "z")})

    return residual


def solve_linear_riccati(B: RatFunc, C: RatFunc) -> GeneralSolution | None:
    """t = E (lambda + int C/E) with E = exp(int B), when both pieces are rational."""
    E = rational_exponential(B)
    if E is None:
        return None
    integral, log_free = hermite_integrate(C / E)
    if not log_free:
        return None
    t = E * (RatFunc.var("lambda") + integral)
    return GeneralSolution.certified(t, "t", "case2", linear_residual(B, C))


def solve_constant_riccati(rc: RiccatiODE) -> GeneralSolution | None:
    """t' = A t^2 + B t + C with constant coefficients."""
    if not rc.is_constant:
        raise NotConstantCase("Riccati coefficients depend on z")
    if rc.A.is_zero:
        if not rc.B.is_zero:
            return None
        t = rc.C * RatFunc.var("z") + RatFunc.var("lambda")
        return GeneralSolution.certified(t, "t", "constant_coeff", linear_residual(rc.B, rc.C))
    c = rc.B * rc.B / 4 - rc.A * rc.C
    if not c.is_zero:
        return None
    # v' + v^2 = 0 after t = -(v + B/2)/A
    t = -(_simple_family() + rc.B / 2) / rc.A
    return GeneralSolution.certified(t, "t", "constant_coeff", lambda e: riccati_residual(rc, e))


def solve_constant_coeff(F, param: Parametrization) -> GeneralSolution | None:
    """Solve a z-free equation through its constant Riccati reduction.

    None means the reduced equation u' = b u + c (b != 0) or u' + u^2 = c
    (c != 0) has no rational general solution.
    """
    if "z" in free_variables(F):
        raise NotConstantCase("equation involves z")
    rc = cast_to_riccati(derive_param_ode(param))
    if not rc.is_constant:
        raise NotConstantCase("parametrization introduces z into the Riccati coefficients")
    t_solution = solve_constant_riccati(rc)
    if t_solution is None:
        return None
    chain = SubstitutionChain((SubstitutionStep("w", "t", param.r1),))
    w = back_substitute(chain, t_solution.expr)
    logger.debug("constant-coefficient family %s", w)
    return GeneralSolution.certified(w, "w", "constant_coeff", equation_residual(F))

