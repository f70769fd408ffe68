"""From a parametrized equation to Riccati form and on to v' + v^2 = r."""
from __future__ import annotations

import logging
from dataclasses import dataclass

from .algebra import (
    RatFunc,
    coefficients_in,
    degree_in,
    depends_on,
    derivative,
)
from .errors import DegenerateSolution, FuchsViolation, RatsodeError
from .parametrization import Parametrization

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FuchsCheck:
    passed: bool
    leading: object  # PolyElement, coefficient of the top power of wp


@dataclass(frozen=True)
class TParamODE:
    rhs: RatFunc  # dt/dz in (t, z)


@dataclass(frozen=True)
class RiccatiODE:
    A: RatFunc
    B: RatFunc
    C: RatFunc

    def rhs(self, t: RatFunc) -> RatFunc:
        return self.A * t * t + self.B * t + self.C

    @property
    def is_constant(self) -> bool:
        return all(c.is_constant for c in (self.A, self.B, self.C))


@dataclass(frozen=True)
class LinearCase:
    """t' = B t + C, the Riccati equation with A = 0."""

    B: RatFunc
    C: RatFunc


@dataclass(frozen=True)
class SubstitutionStep:
    """``target = expr``, where ``expr`` is written in ``source`` and z."""

    target: str
    source: str
    expr: RatFunc

    def apply(self, value: RatFunc) -> RatFunc:
        return self.expr.subs({self.source: value})

    def __str__(self) -> str:
        return f"{self.target} = {self.expr}"


@dataclass(frozen=True)
class SubstitutionChain:
    steps: tuple[SubstitutionStep, ...]
    target: RatFunc | None = None  # r of v' + v^2 = r, when the chain ends in v

    @property
    def stage(self) -> str:
        return self.steps[-1].source if self.steps else "w"

    def with_parametrization(self, p: Parametrization) -> "SubstitutionChain":
        head = SubstitutionStep("w", "t", p.r1)
        return SubstitutionChain((head,) + self.steps, self.target)


def leading_coeff_check(F) -> FuchsCheck:
    """The coefficient of the top power of wp must not involve w."""
    m = degree_in(F, "wp")
    if m < 1:
        raise ValueError("equation does not involve wp")
    leading = coefficients_in(F, "wp")[m]
    return FuchsCheck(not depends_on(leading, "w"), leading)


def derive_param_ode(p: Parametrization) -> TParamODE:
    dt = derivative(p.r1, "t")
    if dt.is_zero:
        raise ValueError("parametrization of w does not depend on t")
    rhs = (p.r2 - derivative(p.r1, "z")) / dt
    logger.debug("dt/dz = %s", rhs)
    return TParamODE(rhs)


def cast_to_riccati(o: TParamODE) -> RiccatiODE:
    rhs = o.rhs
    if depends_on(rhs.den, "t"):
        raise FuchsViolation(f"dt/dz = {rhs} has t in its denominator")
    deg = degree_in(rhs.num, "t")
    if deg > 2:
        raise FuchsViolation(f"dt/dz has degree {deg} in t")
    parts = coefficients_in(rhs.num, "t")
    den = RatFunc.new(rhs.den)
    zero = rhs.num.ring.zero
    A, B, C = (RatFunc.new(parts.get(k, zero)) / den for k in (2, 1, 0))
    logger.info("Riccati coefficients A = %s, B = %s, C = %s", A, B, C)
    return RiccatiODE(A, B, C)


def normalize_riccati(rc: RiccatiODE):
    """Return ``(r, chain)`` for v' + v^2 = r, or ``LinearCase`` when A = 0."""
    if rc.A.is_zero:
        return LinearCase(rc.B, rc.C)
    b_tilde = rc.B + derivative(rc.A, "z") / rc.A
    beta = b_tilde / 2
    r = b_tilde * b_tilde / 4 - derivative(b_tilde, "z") / 2 - rc.A * rc.C
    u, v = RatFunc.var("u"), RatFunc.var("v")
    chain = SubstitutionChain(
        (
            SubstitutionStep("t", "u", -u / rc.A),
            SubstitutionStep("u", "v", v + beta),
        ),
        r,
    )
    check_chain(rc, chain)
    logger.info("normal form r = %s", r)
    return r, chain


def check_chain(rc: RiccatiODE, chain: SubstitutionChain) -> None:
    """Push a generic v with v' = r - v^2 through the chain into t' - (A t^2 + B t + C)."""
    v = RatFunc.var("v")
    t = chain.steps[0].apply(chain.steps[1].apply(v))
    dv = chain.target - v * v
    dt = derivative(t, "z") + derivative(t, "v") * dv
    if not (dt - rc.rhs(t)).is_zero:
        raise RatsodeError("substitution chain does not carry v' + v^2 = r to the Riccati equation")


def back_substitute(chain: SubstitutionChain, general: RatFunc) -> RatFunc:
    value = general
    try:
        for step in reversed(chain.steps):
            value = step.apply(value)
    except ZeroDivisionError as err:
        raise DegenerateSolution(str(err)) from err
    return value


def riccati_residual(rc: RiccatiODE, t: RatFunc) -> RatFunc:
    return derivative(t, "z") - rc.rhs(t)
