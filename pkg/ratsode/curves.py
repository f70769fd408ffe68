"""Plane curves over Q: singular points, delta invariants and genus.

Singular points are grouped into clusters of conjugate points, one cluster
per irreducible factor over Q, and each cluster is handled in the number
field generated by one of its points. Delta invariants come from repeated
quadratic transforms of the local equation.
"""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, replace
from math import comb

import numpy as np
from sympy import Poly, resultant as sympy_resultant
from sympy.polys.domains import QQ

from .algebra import (
    SYMBOLS,
    Z,
    free_variables,
    is_squarefree,
    rational,
    rename,
    total_degree_in,
    var_index,
)
from .config import (
    BLOWUP_DEPTH_CAP,
    GENERIC_POSITION_ATTEMPTS,
    MAX_DEGENERATE_DRAWS,
    MAX_SAMPLE_FACTOR,
    SAMPLE_BOUND,
    SAMPLE_BOUND_GROWTH,
)
from .errors import (
    BlowupDepthExceeded,
    DegenerateSample,
    GenericPositionFailure,
    InconsistentGenus,
    ReducibleSuspected,
)
from .numberfield import FieldElement, NumberField, extend_field

logger = logging.getLogger(__name__)

_X, _Y = SYMBOLS["x"], SYMBOLS["y"]


def shift_sequence(count: int):
    """0, 1, -1, 2, -2, ..."""
    for i in range(count):
        yield (i + 1) // 2 * (1 if i % 2 else -1)


@dataclass(frozen=True)
class PlaneCurve:
    f: object  # PolyElement in x, y
    degree: int

    @classmethod
    def new(cls, f) -> "PlaneCurve":
        if not f:
            raise ValueError("zero polynomial does not define a curve")
        extra = set(free_variables(f)) - {"x", "y"}
        if extra:
            raise ValueError(f"plane curve involves {sorted(extra)}")
        degree = total_degree_in(f, ("x", "y"))
        if degree < 1:
            raise ValueError("constant polynomial does not define a curve")
        if not is_squarefree(f, ("x", "y")):
            raise ValueError("plane curve polynomial is not squarefree")
        return cls(f, degree)


@dataclass(frozen=True)
class SingularCluster:
    chart: str
    field: NumberField
    point: tuple[FieldElement, FieldElement]
    multiplicity: int
    delta: int | None = None

    @property
    def size(self) -> int:
        return self.field.degree

    @property
    def is_rational(self) -> bool:
        return self.field.degree == 1


@dataclass(frozen=True)
class GenusReport:
    samples: tuple[tuple[int, object], ...]  # (z0, genus | "degenerate" | "reducible")
    consensus: object  # int | "inconsistent" | "reducible_suspected"

    @property
    def valid_samples(self) -> list[int]:
        return [g for _, g in self.samples if isinstance(g, int)]


# Local polynomials {(i, j): FieldElement}


def _chart_terms(curve: PlaneCurve, chart: str) -> dict[tuple[int, int], object]:
    """Rational coefficients of the curve in one chart of the projective plane."""
    d = curve.degree
    ix, iy = var_index("x"), var_index("y")
    out = {}
    for monom, c in curve.f.items():
        i, j = monom[ix], monom[iy]
        if chart == "affine":
            key = (i, j)
        elif chart == "infinity_x":
            key = (j, d - i - j)
        else:
            key = (i, d - i - j)
        out[key] = c
    return out


def _lift(terms: dict, field: NumberField) -> dict:
    return {k: field.from_rational(c) for k, c in terms.items()}


def _shift(g: dict, a: FieldElement, b: FieldElement) -> dict:
    """g(x + a, y + b)."""
    field = a.field
    if not g:
        return {}
    max_i = max(i for i, _ in g)
    max_j = max(j for _, j in g)
    pow_a = [field.one]
    for _ in range(max_i):
        pow_a.append(pow_a[-1] * a)
    pow_b = [field.one]
    for _ in range(max_j):
        pow_b.append(pow_b[-1] * b)
    out: dict = {}
    for (i, j), c in g.items():
        for k in range(i + 1):
            ck = c * comb(i, k) * pow_a[i - k]
            if ck.is_zero:
                continue
            for m in range(j + 1):
                term = ck * comb(j, m) * pow_b[j - m]
                key = (k, m)
                out[key] = out[key] + term if key in out else term
    return {k: c for k, c in out.items() if not c.is_zero}


def _order(g: dict) -> int:
    return min(i + j for i, j in g)


def _embed(g: dict, embed) -> dict:
    return {k: embed(c) for k, c in g.items()}


def _tangent_cone(g: dict, m: int, field: NumberField) -> Poly:
    """T(1, y) for the lowest form T of ``g``, over ``field.domain``."""
    coeffs = [field.zero] * (m + 1)
    for (i, j), c in g.items():
        if i + j == m:
            coeffs[j] = c
    return field.poly(coeffs)


def _delta_total(g: dict, field: NumberField, depth: int) -> int:
    """Sum over infinitely near points of [K:Q] * m(m-1)/2, starting at the origin of ``g``."""
    if depth > BLOWUP_DEPTH_CAP:
        raise BlowupDepthExceeded(f"resolution deeper than {BLOWUP_DEPTH_CAP} blow-ups")
    m = _order(g)
    if m < 2:
        return 0
    total = field.degree * m * (m - 1) // 2
    cone = _tangent_cone(g, m, field)
    # directions (1 : c) with c a repeated root of T(1, y)
    for factor, mu in cone.sqf_list()[1]:
        if mu < 2:
            continue
        for irreducible, _ in factor.factor_list()[1]:
            if irreducible.degree() == 1:
                c = field.root_of_linear(irreducible)
                sub_field, local = field, g
            else:
                sub_field, embed, c = extend_field(field, irreducible)
                local = _embed(g, embed)
            strict = {(i + j - m, j): v for (i, j), v in local.items()}
            total += _delta_total(_shift(strict, sub_field.zero, c), sub_field, depth + 1)
    # the direction (0 : 1), present when T(1, y) drops degree by at least 2
    vertical = m - cone.degree() if not cone.is_zero else m
    if vertical >= 2:
        strict = {(i, i + j - m): v for (i, j), v in g.items()}
        total += _delta_total(strict, field, depth + 1)
    return total


# Singular points


def _terms_poly(terms: dict) -> Poly:
    return Poly.from_dict(terms, _X, _Y, domain=QQ)


def _multiplicity(terms: dict, field: NumberField, a: FieldElement, b: FieldElement) -> int:
    local = _shift(_lift(terms, field), a, b)
    return _order(local) if local else 0


def _at_x(field: NumberField, q: Poly) -> Poly:
    """q(alpha, y) over ``field.domain``, with q in Q[y, x]."""
    coeffs: dict[int, FieldElement] = {}
    for (j, i), c in q.terms():
        coeffs[j] = coeffs.get(j, field.zero) + field.gen ** i * QQ.from_sympy(c)
    n = max(coeffs, default=-1)
    return field.poly([coeffs.get(j, field.zero) for j in range(n + 1)])


def _affine_clusters(curve: PlaneCurve) -> list[SingularCluster]:
    d = curve.degree
    if d < 2:
        return []
    terms = _chart_terms(curve, "affine")
    f = _terms_poly(terms).as_expr()
    for s in shift_sequence(GENERIC_POSITION_ATTEMPTS):
        # shear x = x' + s*y; y must keep full degree so the projection is proper
        fs = Poly(f.subs(_X, _X + s * _Y), _Y, _X, domain=QQ)
        if fs.degree(_Y) != d:
            continue
        fs_x, fs_y = fs.diff(_X), fs.diff(_Y)
        disc = Poly(sympy_resultant(fs.as_expr(), fs_y.as_expr(), _Y), _X, domain=QQ)
        if disc.is_zero:
            continue
        factors = disc.factor_list()[1] if disc.degree() > 0 else []
        clusters = []
        for p, _ in factors:
            field = NumberField.from_poly(p)
            g = _at_x(field, fs)
            for q in (fs_x, fs_y):
                g = g.gcd(_at_x(field, q))
            if g.degree() < 1:
                continue
            if g.degree() > 1:
                break
            y0 = field.root_of_linear(g)
            x0 = field.gen + y0 * s
            clusters.append(SingularCluster("affine", field, (x0, y0), _multiplicity(terms, field, x0, y0)))
        else:
            return clusters
        logger.debug("shear %d leaves two singular points over one x; retrying", s)
    raise GenericPositionFailure("no shear separates the affine singular points")


def _infinity_clusters(curve: PlaneCurve) -> list[SingularCluster]:
    clusters = []
    # chart X = 1, coordinates (y, z) stored as (x, y); candidates lie on z = 0
    h_terms = _chart_terms(curve, "infinity_x")
    h = _terms_poly(h_terms)
    candidates = None
    for part in (h, h.diff(_X), h.diff(_Y)):
        on_line = part.eval(_Y, 0)
        candidates = on_line if candidates is None else candidates.gcd(on_line)
    if candidates.degree() > 0:
        for p, _ in candidates.factor_list()[1]:
            field = NumberField.from_poly(p)
            a, b = field.gen, field.zero
            mult = _multiplicity(h_terms, field, a, b)
            if mult >= 2:
                clusters.append(SingularCluster("infinity_x", field, (a, b), mult))
    # chart Y = 1 only adds the point (0 : 1 : 0)
    k_terms = _chart_terms(curve, "infinity_y")
    rationals = NumberField.rationals()
    origin = (rationals.zero, rationals.zero)
    mult = _multiplicity(k_terms, rationals, *origin)
    if mult >= 2:
        clusters.append(SingularCluster("infinity_y", rationals, origin, mult))
    return clusters


def singular_points(curve: PlaneCurve) -> list[SingularCluster]:
    """Singular points of the projective closure, as Galois-conjugate clusters."""
    clusters = _affine_clusters(curve) + _infinity_clusters(curve)
    logger.debug("curve of degree %d has %d singular clusters", curve.degree, len(clusters))
    return clusters


def delta_invariant(curve: PlaneCurve, cluster: SingularCluster) -> int:
    """Delta invariant of one point of the cluster."""
    local = _shift(_lift(_chart_terms(curve, cluster.chart), cluster.field), *cluster.point)
    return _delta_total(local, cluster.field, 0) // cluster.size


def resolve_singularities(curve: PlaneCurve) -> list[SingularCluster]:
    return [replace(c, delta=delta_invariant(curve, c)) for c in singular_points(curve)]


def genus_plane(curve: PlaneCurve) -> int:
    d = curve.degree
    genus = (d - 1) * (d - 2) // 2
    for cluster in resolve_singularities(curve):
        logger.debug("%s cluster over %s: multiplicity %d, delta %d",
                     cluster.chart, cluster.field, cluster.multiplicity, cluster.delta)
        genus -= cluster.delta * cluster.size
    if genus < 0:
        raise ReducibleSuspected(f"singularities exceed the genus bound of a degree {d} curve")
    return genus


# The equation as a family of curves


def specialize(F, z0) -> PlaneCurve:
    """The plane curve F(z0, x, y) = 0, with w -> x and wp -> y."""
    z0 = rational(z0)
    fz = rename(F.subs(Z, z0), {"w": "x", "wp": "y"})
    if not fz or total_degree_in(fz, ("x", "y")) != total_degree_in(F, ("w", "wp")):
        raise DegenerateSample(f"degree drops at z = {z0}")
    try:
        return PlaneCurve.new(fz)
    except ValueError as err:
        raise DegenerateSample(f"z = {z0}: {err}") from err


def _majority(values: list[int]):
    value, count = Counter(values).most_common(1)[0]
    return value if 2 * count > len(values) else None


def algebraic_genus(F, samples: int = 5, seed: int = 0) -> GenusReport:
    """Genus of F(z0, w, wp) = 0 agreed on by a strict majority of random samples.

    Degenerate z0 are skipped and widen the sampling interval. Without a
    majority after ``samples`` values, sampling continues up to three times
    as many before giving up.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    rng = np.random.default_rng(seed)
    bound = SAMPLE_BOUND
    records: list[tuple[int, object]] = []
    valid: list[int] = []
    seen: set[int] = set()
    limit = MAX_SAMPLE_FACTOR * samples
    for _ in range(limit + MAX_DEGENERATE_DRAWS):
        if len(valid) >= limit:
            break
        z0 = int(rng.integers(-bound, bound + 1))
        if z0 in seen:
            bound *= SAMPLE_BOUND_GROWTH
            continue
        seen.add(z0)
        try:
            curve = specialize(F, z0)
        except DegenerateSample as err:
            logger.debug("skipping degenerate sample: %s", err)
            records.append((z0, "degenerate"))
            bound *= SAMPLE_BOUND_GROWTH
            continue
        try:
            genus = genus_plane(curve)
        except ReducibleSuspected as err:
            records.append((z0, "reducible"))
            raise ReducibleSuspected(str(err), GenusReport(tuple(records), "reducible_suspected")) from err
        records.append((z0, genus))
        valid.append(genus)
        logger.info("genus at z = %d is %d", z0, genus)
        if len(valid) >= samples:
            agreed = _majority(valid)
            if agreed is not None:
                return GenusReport(tuple(records), agreed)
    report = GenusReport(tuple(records), "inconsistent")
    raise InconsistentGenus(f"no genus value reached a strict majority over {len(valid)} samples", report)
