"""Simple algebraic extensions Q(alpha).

Elements are sympy ``Poly`` objects in the generator, reduced modulo the
minimal polynomial. Polynomials over a field are sympy ``Poly`` objects over
the matching ``AlgebraicField``, which supplies gcd, squarefree decomposition,
factoring and squarefree norms.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from math import factorial

from sympy import CRootOf, Poly, Symbol
from sympy.polys.domains import QQ

from .errors import GenericPositionFailure

logger = logging.getLogger(__name__)

ALPHA = Symbol("alpha")
Y = Symbol("y_")


@dataclass(frozen=True)
class NumberField:
    minimal_poly: Poly

    def __post_init__(self):
        p = self.minimal_poly
        if p.degree() < 1:
            raise ValueError("minimal polynomial must have positive degree")
        if p.LC() != 1:
            raise ValueError("minimal polynomial must be monic")
        if p.degree() > 1 and not p.is_irreducible:
            raise ValueError(f"{p.as_expr()} is reducible over Q")

    @classmethod
    def from_poly(cls, p: Poly) -> "NumberField":
        coeffs = [QQ.from_sympy(c) for c in p.all_coeffs()]
        return cls(Poly(coeffs, ALPHA, domain=QQ).monic())

    @classmethod
    def rationals(cls) -> "NumberField":
        return cls(Poly(ALPHA, ALPHA, domain=QQ))

    @property
    def degree(self) -> int:
        return self.minimal_poly.degree()

    @cached_property
    def domain(self):
        """The sympy coefficient domain: ``QQ`` or ``QQ<alpha>``."""
        if self.degree == 1:
            return QQ
        _, integral = self.minimal_poly.clear_denoms(convert=True)
        return QQ.algebraic_field(CRootOf(integral, 0, radicals=False))

    def element(self, rep) -> "FieldElement":
        if isinstance(rep, Poly):
            coeffs = [QQ.from_sympy(c) for c in rep.all_coeffs()]
            rep = Poly(coeffs, ALPHA, domain=QQ)
        else:
            rep = Poly(rep, ALPHA, domain=QQ)
        return FieldElement(self, rep.rem(self.minimal_poly))

    def from_rational(self, c) -> "FieldElement":
        return FieldElement(self, Poly([QQ.convert(c)], ALPHA, domain=QQ))

    @property
    def zero(self) -> "FieldElement":
        return self.from_rational(0)

    @property
    def one(self) -> "FieldElement":
        return self.from_rational(1)

    @property
    def gen(self) -> "FieldElement":
        return self.element(Poly(ALPHA, ALPHA, domain=QQ))

    def to_domain(self, e: "FieldElement"):
        if self.degree == 1:
            return e.as_rational()
        return self.domain([QQ.from_sympy(c) for c in e.rep.all_coeffs()])

    def from_domain(self, a) -> "FieldElement":
        if self.degree == 1:
            return self.from_rational(a)
        return self.element(Poly(a.to_list() or [QQ.zero], ALPHA, domain=QQ))

    def poly(self, coeffs, gen: Symbol = Y) -> Poly:
        """Univariate ``Poly`` over ``domain`` from coefficients listed low to high."""
        lifted = [self.to_domain(c if isinstance(c, FieldElement) else self.from_rational(c))
                  for c in reversed(coeffs)]
        return Poly(lifted or [self.domain.zero], gen, domain=self.domain)

    def coefficients(self, p: Poly) -> list["FieldElement"]:
        """Coefficients of a ``Poly`` over ``domain``, low to high."""
        return [self.from_domain(c) for c in reversed(p.rep.to_list())]

    def root_of_linear(self, p: Poly) -> "FieldElement":
        c0, c1 = self.coefficients(p)
        return -c0 / c1

    def taylor_coefficient(self, p: Poly, j: int) -> "FieldElement":
        """p^(j)(alpha) / j! for a univariate rational polynomial ``p``."""
        d = p
        for _ in range(j):
            d = d.diff()
        return self.element(d) / factorial(j)

    def __str__(self) -> str:
        if self.degree == 1:
            return "Q"
        return f"Q(alpha), {self.minimal_poly.as_expr()} = 0"


@dataclass(frozen=True)
class FieldElement:
    field: NumberField
    rep: Poly

    @property
    def is_zero(self) -> bool:
        return self.rep.is_zero

    @property
    def is_rational(self) -> bool:
        return self.rep.degree() <= 0

    def as_rational(self):
        if not self.is_rational:
            raise ValueError(f"{self} is not rational")
        return QQ.from_sympy(self.rep.LC()) if not self.rep.is_zero else QQ.zero

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError("elements of different number fields")
            return other
        return self.field.from_rational(other)

    def __add__(self, other):
        other = self._coerce(other)
        return FieldElement(self.field, self.rep + other.rep)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return FieldElement(self.field, self.rep - other.rep)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return FieldElement(self.field, -self.rep)

    def __mul__(self, other):
        other = self._coerce(other)
        return FieldElement(self.field, (self.rep * other.rep).rem(self.field.minimal_poly))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if self.is_zero:
            raise ZeroDivisionError("inverse of zero in a number field")
        if self.is_rational:
            return self.field.from_rational(QQ.one / self.as_rational())
        return FieldElement(self.field, self.rep.invert(self.field.minimal_poly))

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        base = self if k >= 0 else self.inverse()
        out = self.field.one
        for _ in range(abs(k)):
            out = out * base
        return out

    def __str__(self) -> str:
        return str(self.rep.as_expr())


def extend_field(field: NumberField, h: Poly):
    """Adjoin a root of ``h``, irreducible over ``field.domain``, to ``field``.

    Returns ``(L, embed, root)`` where ``embed`` maps elements of ``field``
    into ``L`` and ``root`` is a root of the image of ``h`` in ``L``.
    """
    if h.degree() < 2:
        raise ValueError("extension needs an irreducible factor of degree >= 2")
    if field.degree == 1:
        big = NumberField.from_poly(h)
        return big, lambda e: big.from_rational(e.as_rational()), big.gen

    # L = Q(gamma) with gamma a root of a squarefree norm of h(y - s*alpha)
    _, _, norm = h.sqf_norm()
    big = NumberField.from_poly(norm)
    h_coeffs = field.coefficients(h)
    # roots of the minimal polynomial in L are the embeddings of field into L
    p = [QQ.from_sympy(c) for c in reversed(field.minimal_poly.all_coeffs())]
    for candidate, _ in big.poly(p, ALPHA).factor_list()[1]:
        if candidate.degree() != 1:
            continue
        theta = big.root_of_linear(candidate)

        def embed(e: FieldElement, _theta=theta, _big=big) -> FieldElement:
            acc = _big.zero
            for c in e.rep.all_coeffs():
                acc = acc * _theta + _big.from_rational(QQ.from_sympy(c))
            return acc

        image = big.poly([embed(c) for c in h_coeffs])
        for factor, _ in image.factor_list()[1]:
            if factor.degree() == 1:
                logger.debug("extended %s by a degree %d factor to %s", field, h.degree(), big)
                return big, embed, big.root_of_linear(factor)
    raise GenericPositionFailure(f"no embedding of {field} splits a degree {h.degree()} factor")
