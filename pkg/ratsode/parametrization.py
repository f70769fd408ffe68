"""Rational parametrizations of F(z, w, wp) = 0 over Q(z).

Built-in strategies cover lines, conics and curves with a point of
multiplicity d - 1. Each result is checked by substitution before use.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

from sympy.polys.domains import QQ

from .algebra import (
    GENS,
    RatFunc,
    coefficients_in,
    coefficients_in_many,
    degree_in,
    poly_gcd,
    poly_sqrt,
    resultant,
    substitute,
    total_degree_in,
)
from .config import CONIC_SEARCH_HEIGHT
from .errors import NotSupported

logger = logging.getLogger(__name__)

SOURCES = ("user_supplied", "builtin_line", "builtin_conic", "builtin_monoid")


@dataclass(frozen=True)
class Parametrization:
    r1: RatFunc
    r2: RatFunc
    source: str

    @classmethod
    def checked(cls, F, r1: RatFunc, r2: RatFunc, source: str) -> "Parametrization":
        if source not in SOURCES:
            raise ValueError(f"unknown parametrization source {source!r}")
        if not r1.depends_on("t"):
            raise NotSupported("parametrization of w does not depend on t")
        if not verify_parametrization(F, r1, r2):
            raise NotSupported("parametrization does not satisfy the equation")
        return cls(r1, r2, source)


def verify_parametrization(F, r1: RatFunc, r2: RatFunc) -> bool:
    return substitute(F, {"w": r1, "wp": r2}).is_zero


def _coeff(F, i: int, j: int) -> RatFunc:
    """Coefficient of w^i wp^j, a polynomial in z."""
    return RatFunc.new(coefficients_in_many(F, ("w", "wp")).get((i, j), F.ring.zero))


def _solve_linear(p, var: str) -> RatFunc | None:
    """Root of a polynomial of degree exactly one in ``var``."""
    if degree_in(p, var) != 1:
        return None
    c = coefficients_in(p, var)
    return -RatFunc.new(c.get(0, p.ring.zero)) / RatFunc.new(c[1])


def _line(F) -> Parametrization:
    b = _coeff(F, 0, 1)
    if b.is_zero:
        raise NotSupported("linear equation without wp")
    r1 = RatFunc.var("t")
    r2 = -(_coeff(F, 1, 0) * r1 + _coeff(F, 0, 0)) / b
    return Parametrization.checked(F, r1, r2, "builtin_line")


def _pencil(F, a: RatFunc, b: RatFunc, source: str) -> Parametrization:
    """Lines wp - b = t (w - a) through (a, b) meet the curve once more."""
    d = total_degree_in(F, ("w", "wp"))
    u, t = RatFunc.var("u"), RatFunc.var("t")
    g = substitute(F, {"w": a + u, "wp": b + t * u}).num
    coeffs = coefficients_in(g, "u")
    if any(k < d - 1 and c for k, c in coeffs.items()):
        raise NotSupported("base point is not of multiplicity d - 1")
    low, high = coeffs.get(d - 1), coeffs.get(d)
    if not low or not high:
        raise NotSupported("pencil through the base point is degenerate")
    s = -RatFunc.new(low) / RatFunc.new(high)
    return Parametrization.checked(F, a + s, b + t * s, source)


def _height_sequence(height: int) -> list[QQ.dtype]:
    """Rationals p/q with |p|, q <= height: 0, 1, -1, 2, -2, 1/2, -1/2, ..."""
    values = {QQ(p, q) for q in range(1, height + 1) for p in range(-height, height + 1)}
    return sorted(values, key=lambda v: (max(abs(v.numerator), v.denominator), v.denominator,
                                         abs(v.numerator), v < 0))


def _root_on_line(F, var: str, fixed: str, value) -> RatFunc | None:
    """A root in Q(z) of F restricted to ``fixed = value``, solving for ``var``."""
    restricted = substitute(F, {fixed: RatFunc.new(value)}).num
    deg = degree_in(restricted, var)
    if deg == 1:
        return _solve_linear(restricted, var)
    if deg != 2:
        return None
    c = coefficients_in(restricted, var)
    zero = restricted.ring.zero
    qa, qb, qc = c.get(2, zero), c.get(1, zero), c.get(0, zero)
    disc = qb**2 - 4 * qa * qc
    root = poly_sqrt(disc)
    if root is None:
        return None
    return (-RatFunc.new(qb) + RatFunc.new(root)) / (2 * RatFunc.new(qa))


def _is_smooth_at(F, a: RatFunc, b: RatFunc) -> bool:
    point = {"w": a, "wp": b}
    return any(not substitute(F.diff(GENS[v]), point).is_zero for v in ("w", "wp"))


def _conic_point(F):
    for value in _height_sequence(CONIC_SEARCH_HEIGHT):
        b = _root_on_line(F, "wp", "w", value)
        if b is not None:
            a = RatFunc.new(value)
            if _is_smooth_at(F, a, b):
                return a, b
        a = _root_on_line(F, "w", "wp", value)
        if a is not None:
            b = RatFunc.new(value)
            if _is_smooth_at(F, a, b):
                return a, b
    return None


def _conic_at_infinity(F) -> Parametrization | None:
    """Parallel lines through a rational point at infinity."""
    qa, qb, qc = _coeff(F, 2, 0), _coeff(F, 1, 1), _coeff(F, 0, 2)
    t = RatFunc.var("t")
    if qc.is_zero:
        # direction (0 : 1): lines w = t
        wp = _solve_linear(substitute(F, {"w": t}).num, "wp")
        if wp is not None:
            return Parametrization.checked(F, t, wp, "builtin_conic")
    if qa.is_zero:
        # direction (1 : 0): lines wp = t; t must stay the parameter of w
        w = _solve_linear(substitute(F, {"wp": t}).num, "w")
        if w is not None and w.depends_on("t"):
            return Parametrization.checked(F, w, t, "builtin_conic")
    if not qc.is_zero:
        disc = qb * qb - 4 * qa * qc
        if not disc.is_polynomial:
            return None
        root = poly_sqrt(disc.num)
        if root is None:
            return None
        for sign in (1, -1):
            slope = (-qb + sign * RatFunc.new(root)) / (2 * qc)
            w_var = RatFunc.var("w")
            line = substitute(F, {"wp": slope * w_var + t}).num
            w = _solve_linear(line, "w")
            if w is not None and w.depends_on("t"):
                return Parametrization.checked(F, w, slope * w + t, "builtin_conic")
    return None


def _conic(F) -> Parametrization:
    point = _conic_point(F)
    if point is not None:
        logger.debug("conic base point (%s, %s)", *point)
        return _pencil(F, *point, source="builtin_conic")
    found = _conic_at_infinity(F)
    if found is not None:
        return found
    raise NotSupported("no rational point found on the conic")


def _partials(F, order: int) -> list:
    out, frontier = [F], [F]
    for _ in range(order):
        nxt = []
        for p in frontier:
            for v in ("w", "wp"):
                dp = p.diff(GENS[v])
                if dp and dp not in nxt:
                    nxt.append(dp)
        out.extend(nxt)
        frontier = nxt
    return out


def _squarefree_linear_root(polys: list, var: str) -> RatFunc | None:
    """The common root in ``var`` of ``polys`` when their gcd has one distinct root."""
    g = None
    for p in polys:
        if not p:
            continue
        g = p if g is None else poly_gcd(g, p, var)
    if g is None or degree_in(g, var) < 1:
        return None
    content = None
    for c in coefficients_in(g, var).values():
        content = c if content is None else poly_gcd(content, c)
    if not content.is_ground:
        g = g.exquo(content)
    radical = g.exquo(poly_gcd(g, g.diff(GENS[var]), var))
    return _solve_linear(radical, var)


def _monoid_point(F, d: int):
    partials = _partials(F, d - 2)
    with_wp = [p for p in partials if degree_in(p, "wp") > 0]
    eliminated = [p for p in partials if degree_in(p, "wp") <= 0]
    for p in with_wp[1:]:
        res = resultant(with_wp[0], p, "wp")
        if res:
            eliminated.append(res)
    a = _squarefree_linear_root(eliminated, "w")
    if a is None:
        return None
    on_vertical = [substitute(p, {"w": a}).num for p in with_wp]
    b = _squarefree_linear_root(on_vertical, "wp")
    if b is None:
        return None
    point = {"w": a, "wp": b}
    if any(not substitute(p, point).is_zero for p in partials):
        return None
    return a, b


def _monoid(F, d: int) -> Parametrization:
    point = _monoid_point(F, d)
    if point is None:
        raise NotSupported(f"no point of multiplicity {d - 1} over Q(z)")
    logger.debug("monoid base point (%s, %s)", *point)
    return _pencil(F, *point, source="builtin_monoid")


def auto_parametrize(F) -> Parametrization:
    d = total_degree_in(F, ("w", "wp"))
    if d < 1:
        raise NotSupported("equation has no w or wp terms")
    if d == 1:
        return _line(F)
    if d == 2:
        return _conic(F)
    return _monoid(F, d)
