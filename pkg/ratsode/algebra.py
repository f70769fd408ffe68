"""Exact algebra over the rationals.

Polynomials live in one sparse ring over ``QQ`` with graded-lexicographic
order, so equal polynomials share one representation. ``RatFunc`` keeps a
numerator/denominator pair with the common gcd removed and a monic
denominator; equality of rational functions is therefore equality of pairs.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import reduce

from sympy import Poly, cancel, fraction, resultant as sympy_resultant, together
from sympy.core.numbers import Rational as SympyRational
from sympy.integrals.rationaltools import ratint_ratpart
from sympy.polys.domains import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement, ring

from .config import VARIABLES
from .numberfield import FieldElement, NumberField

logger = logging.getLogger(__name__)

R, Z, W, WP, T, LAM, X, Y, U, V = ring(",".join(VARIABLES), QQ, grlex)

MultiPoly = PolyElement

GENS = dict(zip(VARIABLES, R.gens))
SYMBOLS = dict(zip(VARIABLES, R.symbols))


def rational(value) -> QQ.dtype:
    """Coerce ints, sympy Rationals and ``QQ`` elements to ``QQ``."""
    if isinstance(value, QQ.dtype):
        return value
    if isinstance(value, SympyRational):
        return QQ.from_sympy(value)
    if isinstance(value, int):
        return QQ(value)
    raise TypeError(f"cannot interpret {value!r} as a rational number")


def var_index(name: str) -> int:
    try:
        return VARIABLES.index(name)
    except ValueError:
        raise ValueError(f"unknown variable {name!r}") from None


def degree_in(p: PolyElement, name: str) -> int:
    """Degree of ``p`` in one variable; -1 for the zero polynomial."""
    i = var_index(name)
    return max((monom[i] for monom in p.keys()), default=-1)


def total_degree_in(p: PolyElement, names) -> int:
    idx = [var_index(n) for n in names]
    return max((sum(monom[i] for i in idx) for monom in p.keys()), default=-1)


def free_variables(p: PolyElement) -> tuple[str, ...]:
    used = [False] * len(VARIABLES)
    for monom in p.keys():
        for i, e in enumerate(monom):
            if e:
                used[i] = True
    return tuple(name for name, flag in zip(VARIABLES, used) if flag)


def depends_on(p: PolyElement, name: str) -> bool:
    return degree_in(p, name) > 0


def coefficients_in(p: PolyElement, name: str) -> dict[int, PolyElement]:
    """Split ``p`` as sum of c_k * name^k, returning {k: c_k}."""
    i = var_index(name)
    parts: dict[int, dict] = {}
    for monom, c in p.items():
        rest = monom[:i] + (0,) + monom[i + 1:]
        parts.setdefault(monom[i], {})[rest] = c
    return {k: R.from_dict(terms) for k, terms in parts.items()}


def coefficient_in(p: PolyElement, name: str, k: int) -> PolyElement:
    return coefficients_in(p, name).get(k, R.zero)


def leading_coeff_in(p: PolyElement, name: str) -> PolyElement:
    if not p:
        return R.zero
    return coefficient_in(p, name, degree_in(p, name))


def coefficients_in_many(p: PolyElement, names) -> dict[tuple[int, ...], PolyElement]:
    """Group ``p`` by the exponents of several variables at once."""
    idx = [var_index(n) for n in names]
    parts: dict[tuple[int, ...], dict] = {}
    for monom, c in p.items():
        key = tuple(monom[i] for i in idx)
        rest = list(monom)
        for i in idx:
            rest[i] = 0
        parts.setdefault(key, {})[tuple(rest)] = c
    return {k: R.from_dict(terms) for k, terms in parts.items()}


def rename(p: PolyElement, mapping: dict[str, str]) -> PolyElement:
    """Move exponents between variables, e.g. {"w": "x", "wp": "y"}."""
    moves = [(var_index(a), var_index(b)) for a, b in mapping.items()]
    terms: dict[tuple[int, ...], object] = {}
    for monom, c in p.items():
        new = list(monom)
        for src, _ in moves:
            new[src] = 0
        for src, dst in moves:
            new[dst] += monom[src]
        key = tuple(new)
        terms[key] = terms.get(key, QQ.zero) + c
    return R.from_dict({k: c for k, c in terms.items() if c})


def to_univariate(p: PolyElement, name: str = "z") -> Poly:
    i = var_index(name)
    terms = {}
    for monom, c in p.items():
        if any(e for j, e in enumerate(monom) if j != i):
            raise ValueError(f"polynomial {p.as_expr()} is not univariate in {name}")
        terms[(monom[i],)] = c
    if not terms:
        return Poly(0, SYMBOLS[name], domain=QQ)
    return Poly.from_dict(terms, SYMBOLS[name], domain=QQ)


def from_univariate(poly: Poly, name: str = "z") -> PolyElement:
    i = var_index(name)
    terms = {}
    for (e,), c in poly.terms():
        monom = [0] * len(VARIABLES)
        monom[i] = e
        terms[tuple(monom)] = QQ.from_sympy(c)
    return R.from_dict(terms)


def from_expr(expr) -> PolyElement:
    return R.from_expr(expr)


@dataclass(frozen=True)
class RatFunc:
    num: PolyElement
    den: PolyElement

    @classmethod
    def new(cls, num, den=None) -> "RatFunc":
        num = _as_poly(num)
        den = R.one if den is None else _as_poly(den)
        if not den:
            raise ZeroDivisionError("rational function with zero denominator")
        if not num:
            return cls(R.zero, R.one)
        p, q = num.cancel(den)
        lc = q.LC
        if lc != 1:
            p, q = p.quo_ground(lc), q.quo_ground(lc)
        return cls(p, q)

    @classmethod
    def coerce(cls, value) -> "RatFunc":
        if isinstance(value, RatFunc):
            return value
        return cls.new(value)

    @classmethod
    def var(cls, name: str) -> "RatFunc":
        return cls(GENS[name], R.one)

    @property
    def is_zero(self) -> bool:
        return not self.num

    @property
    def is_polynomial(self) -> bool:
        return self.den == R.one

    @property
    def is_constant(self) -> bool:
        return self.num.is_ground and self.den.is_ground

    def constant_value(self):
        if not self.is_constant:
            raise ValueError("rational function is not constant")
        return self.num.LC if self.num else QQ.zero

    @property
    def variables(self) -> tuple[str, ...]:
        used = set(free_variables(self.num)) | set(free_variables(self.den))
        return tuple(n for n in VARIABLES if n in used)

    def depends_on(self, name: str) -> bool:
        return depends_on(self.num, name) or depends_on(self.den, name)

    def subs(self, mapping: dict) -> "RatFunc":
        return substitute(self.num, mapping) / substitute(self.den, mapping)

    def diff(self, name: str) -> "RatFunc":
        return derivative(self, name)

    def as_expr(self):
        return self.num.as_expr() / self.den.as_expr()

    def __add__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        if self.den == other.den:
            return RatFunc.new(self.num + other.num, self.den)
        return RatFunc.new(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return RatFunc.new(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        if other.is_zero:
            raise ZeroDivisionError("division by the zero rational function")
        return RatFunc.new(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return other / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k >= 0:
            return RatFunc(self.num ** k, self.den ** k) if k else RatFunc(R.one, R.one)
        return RatFunc.new(R.one) / (self ** (-k))

    def __str__(self) -> str:
        from .exprio import render_expr

        return render_expr(self)


def _as_poly(value) -> PolyElement:
    if isinstance(value, PolyElement):
        return value
    return R.ground_new(rational(value))


def _coerce_or_none(value):
    if isinstance(value, RatFunc):
        return value
    try:
        return RatFunc.new(value)
    except TypeError:
        return None


ZERO = RatFunc(R.zero, R.one)
ONE = RatFunc(R.one, R.one)


def substitute(p: PolyElement, mapping: dict) -> RatFunc:
    """Substitute rational functions for variables of ``p``.

    Denominators are cleared per variable (num^e * den^(deg-e)), so the
    result is assembled with polynomial arithmetic only.
    """
    if not p:
        return ZERO
    subs = [(var_index(name), RatFunc.coerce(value)) for name, value in mapping.items()]
    degs = {i: max(m[i] for m in p.keys()) for i, _ in subs}
    num_pows, den_pows = {}, {}
    for i, val in subs:
        num_pows[i] = _powers(val.num, degs[i])
        den_pows[i] = _powers(val.den, degs[i])
    num = R.zero
    for monom, c in p.items():
        rest = list(monom)
        for i, _ in subs:
            rest[i] = 0
        term = R.term_new(tuple(rest), c)
        for i, _ in subs:
            e = monom[i]
            term = term * num_pows[i][e] * den_pows[i][degs[i] - e]
        num += term
    den = reduce(lambda a, b: a * b, (den_pows[i][degs[i]] for i, _ in subs), R.one)
    return RatFunc.new(num, den)


def _powers(p: PolyElement, n: int) -> list[PolyElement]:
    out = [R.one]
    for _ in range(n):
        out.append(out[-1] * p)
    return out


def ratfunc_from_expr(expr) -> RatFunc:
    num, den = fraction(cancel(together(expr)))
    return RatFunc.new(R.from_expr(num), R.from_expr(den))


def poly_gcd(a: PolyElement, b: PolyElement, var: str = "z") -> PolyElement:
    """gcd normalized to leading coefficient 1 in ``var`` (monic when that is a polynomial)."""
    if not a and not b:
        return R.zero
    g = a.gcd(b)
    lc = leading_coeff_in(g, var)
    if lc.is_ground and lc:
        return g.quo_ground(lc.LC)
    return g.monic()


def poly_lcm(a: PolyElement, b: PolyElement) -> PolyElement:
    if not a or not b:
        return R.zero
    return (a * b).exquo(a.gcd(b)).monic()


def resultant(f: PolyElement, g: PolyElement, var: str) -> PolyElement:
    if degree_in(f, var) <= 0 or degree_in(g, var) <= 0:
        raise ValueError(f"resultant needs positive degree in {var}")
    res = sympy_resultant(f.as_expr(), g.as_expr(), SYMBOLS[var])
    return R.from_expr(res)


def squarefree_factor(p: PolyElement, var: str = "z") -> list[tuple[PolyElement, int]]:
    if not p:
        raise ValueError("squarefree factorization of zero")
    _, factors = to_univariate(p, var).sqf_list()
    return [(from_univariate(f.monic(), var), k) for f, k in factors]


def factor_univariate(p: PolyElement, var: str = "z"):
    """Return (constant, [(monic irreducible factor, multiplicity), ...])."""
    if not p:
        raise ValueError("factorization of zero")
    coeff, factors = to_univariate(p, var).factor_list()
    content = QQ.from_sympy(coeff)
    out = []
    for f, k in factors:
        lc = QQ.from_sympy(f.LC())
        content *= lc ** k
        out.append((from_univariate(f.monic(), var), k))
    out.sort(key=lambda item: (to_univariate(item[0], var).degree(), str(item[0].as_expr())))
    return content, out


def is_squarefree(p: PolyElement, names) -> bool:
    """True when no nonconstant factor of ``p`` divides every partial in ``names``."""
    g = p
    for name in names:
        g = g.gcd(p.diff(GENS[name]))
    return g.is_ground


@dataclass(frozen=True)
class PartialFractions:
    poly_part: PolyElement
    terms: tuple[tuple[PolyElement, int, PolyElement], ...]
    var: str = "z"

    def reassemble(self) -> RatFunc:
        total = RatFunc.new(self.poly_part)
        for q, k, a in self.terms:
            total = total + RatFunc.new(a, q ** k)
        return total


def partial_fractions(r: RatFunc, var: str = "z") -> PartialFractions:
    num = to_univariate(r.num, var)
    den = to_univariate(r.den, var)
    quo, rem = num.div(den)
    terms = []
    if not rem.is_zero:
        _, factors = den.factor_list()
        for q, m in factors:
            q = q.monic()
            qm = q ** m
            cofactor = den.exquo(qm)
            a = (rem * cofactor.invert(qm)).rem(qm)
            # q-adic digits of a: a = sum c_j q^j, giving c_j / q^(m - j)
            for j in range(m):
                a, digit = a.div(q)
                if not digit.is_zero:
                    terms.append((from_univariate(q, var), m - j, from_univariate(digit, var)))
    terms.sort(key=lambda item: (str(item[0].as_expr()), item[1]))
    return PartialFractions(from_univariate(quo, var), tuple(terms), var)


def derivative(e: RatFunc, var: str) -> RatFunc:
    x = GENS[var]
    if e.is_polynomial:
        return RatFunc.new(e.num.diff(x))
    return RatFunc.new(e.num.diff(x) * e.den - e.num * e.den.diff(x), e.den ** 2)


def hermite_integrate(r: RatFunc, var: str = "z") -> tuple[RatFunc, bool]:
    """Rational part of the integral of ``r`` and whether nothing logarithmic remains."""
    num = to_univariate(r.num, var)
    den = to_univariate(r.den, var)
    quo, rem = num.div(den)
    integral = RatFunc.new(from_univariate(quo.integrate(), var))
    if rem.is_zero:
        return integral, True
    rat_part, log_part = ratint_ratpart(rem, den, SYMBOLS[var])
    integral = integral + ratfunc_from_expr(rat_part)
    log_free = log_part == 0
    logger.debug("hermite: rational part %s, log-free %s", integral, log_free)
    return integral, log_free


def extension_residue(r: RatFunc, q: PolyElement, k: int, var: str = "z") -> FieldElement:
    """Coefficient of (z - a)^(-k) in the Laurent expansion of ``r`` at a root ``a`` of ``q``."""
    num = to_univariate(r.num, var)
    den = to_univariate(r.den, var)
    qp = to_univariate(q, var).monic()
    m, rest = 0, den
    while True:
        quo, rem = rest.div(qp)
        if not rem.is_zero:
            break
        m, rest = m + 1, quo
    if m < max(k, 1):
        raise ValueError(f"{q.as_expr()} does not divide the denominator to order {k}")
    field = NumberField.from_poly(qp)
    order = m - k
    # r(a + e) = e^-m * N(e) / D(e) with D(0) != 0
    n_series = [field.taylor_coefficient(num, j) for j in range(order + 1)]
    d_series = [field.taylor_coefficient(den, m + j) for j in range(order + 1)]
    quotient: list[FieldElement] = []
    for j in range(order + 1):
        acc = n_series[j]
        for i in range(j):
            acc = acc - quotient[i] * d_series[j - i]
        quotient.append(acc / d_series[0])
    return quotient[order]


def rational_sqrt(c) -> QQ.dtype | None:
    from sympy import integer_nthroot

    c = rational(c)
    if c < 0:
        return None
    n, exact_n = integer_nthroot(int(c.numerator), 2)
    d, exact_d = integer_nthroot(int(c.denominator), 2)
    if exact_n and exact_d:
        return QQ(n, d)
    return None


def poly_sqrt(p: PolyElement, var: str = "z") -> PolyElement | None:
    """Exact square root of a univariate polynomial, if it is a square."""
    if not p:
        return R.zero
    if p.is_ground:
        root = rational_sqrt(p.LC)
        return None if root is None else R.ground_new(root)
    uni = to_univariate(p, var)
    if uni.degree() % 2:
        return None
    coeff, factors = uni.sqf_list()
    if any(k % 2 for _, k in factors):
        return None
    root = rational_sqrt(QQ.from_sympy(coeff))
    if root is None:
        return None
    out = R.ground_new(root)
    for f, k in factors:
        out *= from_univariate(f, var) ** (k // 2)
    return out
