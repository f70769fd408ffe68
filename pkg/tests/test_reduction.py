import pytest

from ratsode.algebra import W, WP, RatFunc, derivative
from ratsode.errors import DegenerateSolution, FuchsViolation, RatsodeError
from ratsode.exprio import parse_problem, parse_ratfunc
from ratsode.parametrization import Parametrization
from ratsode.reduction import (
    LinearCase,
    RiccatiODE,
    SubstitutionChain,
    SubstitutionStep,
    TParamODE,
    back_substitute,
    cast_to_riccati,
    check_chain,
    derive_param_ode,
    leading_coeff_check,
    normalize_riccati,
    riccati_residual,
)


def _riccati_of(text):
    problem = parse_problem(text)
    p = Parametrization.checked(problem.equation, *problem.parametrization, source="user_supplied")
    return cast_to_riccati(derive_param_ode(p))


def test_leading_coefficient_check():
    assert leading_coeff_check(WP**2 - W**3 - 1).passed
    check = leading_coeff_check(W * WP**2 - 1)
    assert not check.passed
    assert check.leading == W
    with pytest.raises(ValueError):
        leading_coeff_check(W**2 - 1)


def test_example1_reduces_to_constant_rate(example1_param_text):
    rc = _riccati_of(example1_param_text)
    assert rc.A.is_zero and rc.B.is_zero
    assert rc.C == RatFunc.new(1) / 27
    assert rc.is_constant
    assert isinstance(normalize_riccati(rc), LinearCase)


def test_example2_riccati_and_normal_form(example2_text):
    rc = _riccati_of(example2_text)
    assert rc.A == parse_ratfunc("(z^2 + 2)/(2*(z^2 + 1))")
    assert rc.C == parse_ratfunc("3/(2*(z^2 + 1))")
    assert not rc.is_constant
    r, chain = normalize_riccati(rc)
    assert r == parse_ratfunc("-6/(z^2 + 2)^2")
    assert chain.target == r
    assert [step.target for step in chain.steps] == ["t", "u"]
    assert chain.stage == "v"


def test_cast_rejects_non_riccati_shapes():
    t = RatFunc.var("t")
    with pytest.raises(FuchsViolation):
        cast_to_riccati(TParamODE(t**3))
    with pytest.raises(FuchsViolation):
        cast_to_riccati(TParamODE(1 / t))


def test_cubic_rhs_from_fake_parametrization():
    # w = t^2, wp = t^4 sits on wp = w^2, and dt/dz = t^3 / 2
    t = RatFunc.var("t")
    p = Parametrization.checked(WP - W**2, t * t, t**4, "user_supplied")
    with pytest.raises(FuchsViolation):
        cast_to_riccati(derive_param_ode(p))


def test_normal_form_chain_is_sound(z):
    rc = RiccatiODE(A=z, B=RatFunc.new(1) / z, C=z * z + 1)
    r, chain = normalize_riccati(rc)
    check_chain(rc, chain)
    b_tilde = rc.B + derivative(rc.A, "z") / rc.A
    assert r == b_tilde * b_tilde / 4 - derivative(b_tilde, "z") / 2 - rc.A * rc.C
    assert chain.steps[1].expr == RatFunc.var("v") + b_tilde / 2


def test_check_chain_detects_wrong_shift(z):
    rc = RiccatiODE(A=RatFunc.new(1), B=z, C=RatFunc.new(0))
    r, chain = normalize_riccati(rc)
    v = RatFunc.var("v")
    broken = SubstitutionChain((chain.steps[0], SubstitutionStep("u", "v", v + 1)), r)
    with pytest.raises(RatsodeError):
        check_chain(rc, broken)


def test_back_substitute_and_residual(z, lam):
    rc = RiccatiODE(A=RatFunc.new(1), B=RatFunc.new(0), C=RatFunc.new(0))
    r, chain = normalize_riccati(rc)
    assert r.is_zero
    v = 1 / (z + lam)
    t = back_substitute(chain, v)
    assert t == -1 / (z + lam)
    assert riccati_residual(rc, t).is_zero


def test_back_substitute_degenerate():
    u = RatFunc.var("u")
    chain = SubstitutionChain((SubstitutionStep("t", "u", 1 / u),))
    with pytest.raises(DegenerateSolution):
        back_substitute(chain, RatFunc.new(0))


def test_chain_with_parametrization(z):
    p = Parametrization(RatFunc.var("t") + z, RatFunc.new(1), "user_supplied")
    chain = SubstitutionChain(()).with_parametrization(p)
    assert chain.stage == "t"
    assert str(chain.steps[0]) == "w = z + t"
    assert back_substitute(chain, RatFunc.var("lambda")) == z + RatFunc.var("lambda")
