"""Factored binary forms over F_p (or over an abstract root alphabet).

A form is a product of pairwise coprime places raised to bounded
multiplicities.  A place is either the point at infinity (the linear form t),
or a monic-in-s irreducible binary form, stored dehomogenized at t = 1 as a
monic univariate polynomial.  The abstract mode keeps only opaque root labels
and multiplicities, which is all the classification needs.

Conventions: points of P^1 are written (s : t) with canonical representative
t = 1 or (1 : 0); the linear place with root r is s - r*t, so "root r" means
the place vanishes at (r : 1), and "inf" means it vanishes at (1 : 0).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .errors import ValidationError
from .gf import FieldContext, FieldElement, ProjPoint, make_field, poly_is_irreducible


@dataclass(frozen=True)
class JCase:
    """Constant j-invariant family: cover exponent and multiplicity cap."""

    tag: str
    exponent: int  # 6 for j=0, 4 for j=1728

    @property
    def max_mult(self) -> int:
        return self.exponent - 1

    def __repr__(self) -> str:  # pragma: no cover
        return self.tag


J0 = JCase("j0", 6)
J1728 = JCase("j1728", 4)


def jcase_from_tag(tag: Union[str, int]) -> JCase:
    key = str(tag).lower()
    if key in ("0", "j0"):
        return J0
    if key in ("1728", "j1728"):
        return J1728
    raise ValidationError(f"unknown j-case {tag!r} (expected 0 or 1728)")


@dataclass(frozen=True)
class Place:
    """One zero locus: infinity, a monic irreducible over F_p, or a label."""

    poly: Optional[tuple[int, ...]] = None  # monic univariate, low degree first
    at_infinity: bool = False
    label: Optional[str] = None

    @classmethod
    def infinity(cls) -> "Place":
        return cls(at_infinity=True)

    @classmethod
    def linear(cls, root: int, p: int) -> "Place":
        return cls(poly=((-root) % p, 1))

    @classmethod
    def from_poly(cls, coeffs: Sequence[int], p: int) -> "Place":
        c = tuple(x % p for x in coeffs)
        if len(c) < 2 or c[-1] != 1:
            raise ValidationError(f"place polynomial must be monic of degree >= 1: {coeffs}")
        return cls(poly=c)

    @classmethod
    def abstract(cls, label: str) -> "Place":
        return cls(label=label)

    @property
    def degree(self) -> int:
        if self.poly is not None:
            return len(self.poly) - 1
        return 1  # infinity and abstract labels are single geometric zeroes

    @property
    def is_abstract(self) -> bool:
        return self.label is not None

    def sort_key(self) -> tuple:
        if self.is_abstract:
            return (1, self.degree, (), self.label)
        if self.at_infinity:
            return (0, self.degree, (), "")
        return (0, self.degree, self.poly, "")

    def describe(self) -> str:
        if self.is_abstract:
            return str(self.label)
        if self.at_infinity:
            return "t"
        c0 = self.poly[0]
        if self.degree == 1:
            return "s" if c0 == 0 else f"(s+{c0}t)"
        inner = "+".join(
            f"{c}" if e == 0 else (f"s^{e}" if c == 1 else f"{c}s^{e}")
            for e, c in reversed(list(enumerate(self.poly)))
            if c
        )
        return f"({inner})".replace("s^1+", "s+")


@dataclass(frozen=True)
class FactoredForm:
    """A binary form given by its places and multiplicities.

    This is the single source of truth: degree, n, k, the radical, the
    complement, evaluation, and all downstream invariants derive from it.
    Instances built through parse_form are validated; direct construction is
    for internal/toy use.
    """

    jcase: JCase
    places: tuple[tuple[Place, int], ...]
    p: Optional[int] = None  # None = abstract mode

    @property
    def is_abstract(self) -> bool:
        return self.p is None

    @property
    def degree(self) -> int:
        return sum(pl.degree * m for pl, m in self.places)

    @property
    def k(self) -> int:
        """Number of geometric zeroes."""
        return sum(pl.degree for pl, _ in self.places)

    @property
    def n(self) -> int:
        return self.degree // self.jcase.exponent

    @property
    def multiplicities(self) -> tuple[int, ...]:
        """One multiplicity per geometric zero, sorted descending."""
        out: list[int] = []
        for pl, m in self.places:
            out.extend([m] * pl.degree)
        return tuple(sorted(out, reverse=True))

    @property
    def pattern(self) -> tuple[int, ...]:
        return self.multiplicities

    def complement(self) -> "FactoredForm":
        """Swap each multiplicity m for exponent - m (the partner form)."""
        n_exp = self.jcase.exponent
        places = tuple((pl, n_exp - m) for pl, m in self.places)
        return FactoredForm(jcase=self.jcase, places=_sort_places(places), p=self.p)

    def serialize(self) -> str:
        """Canonical serialization: sorted places, lowest coefficient first."""
        parts = [self.jcase.tag, "abstract" if self.is_abstract else f"p={self.p}"]
        for pl, m in _sort_places(self.places):
            if pl.is_abstract:
                body = f"L:{pl.label}"
            elif pl.at_infinity:
                body = "inf"
            else:
                body = ",".join(str(c) for c in pl.poly)
            parts.append(f"[{body}]^{m}")
        return ";".join(parts)

    def key(self) -> str:
        return hashlib.sha256(self.serialize().encode()).hexdigest()[:16]


def _sort_places(places: Sequence[tuple[Place, int]]) -> tuple[tuple[Place, int], ...]:
    return tuple(sorted(places, key=lambda pm: pm[0].sort_key()))


def parse_form(
    jcase: JCase,
    places: Sequence[tuple[Place, int]],
    p: Optional[int] = None,
) -> FactoredForm:
    """Validate and build a FactoredForm.

    Rejects repeated places, multiplicities outside [1, exponent-1], total
    degree not divisible by the exponent, and (in concrete mode) reducible
    place polynomials.
    """
    if p is not None:
        make_field(p, 1)  # validates p prime > 3
    seen = set()
    for pl, m in places:
        where = pl.describe()
        if pl.is_abstract:
            if p is not None:
                raise ValidationError(f"abstract place {where} in concrete form")
        else:
            if p is None and not pl.at_infinity:
                raise ValidationError(f"concrete place {where} requires a prime p")
            if pl.poly is not None:
                if any(not 0 <= c < p for c in pl.poly):
                    raise ValidationError(f"place {where}: coefficients out of range mod {p}")
                if not poly_is_irreducible(pl.poly, p):
                    raise ValidationError(f"place {where}: polynomial is reducible over F_{p}")
        if not 1 <= m <= jcase.max_mult:
            raise ValidationError(f"place {where}: multiplicity {m} > {jcase.max_mult}"
                                  if m > jcase.max_mult
                                  else f"place {where}: multiplicity {m} < 1")
        key = pl.sort_key()
        if key in seen:
            raise ValidationError(f"repeated place {where}")
        seen.add(key)
    form = FactoredForm(jcase=jcase, places=_sort_places(places), p=p)
    if form.degree % jcase.exponent != 0:
        raise ValidationError(
            f"degree {form.degree} is not divisible by {jcase.exponent}"
        )
    if form.n < 1:
        raise ValidationError("form must have positive degree")
    return form


def form_from_roots(
    jcase: JCase,
    mults: Sequence[int],
    roots: Sequence[Union[int, str]],
    p: Optional[int] = None,
) -> FactoredForm:
    """Build a form with linear places at the given roots of P^1.

    A root is an element of F_p (the place s - r*t) or the string "inf"
    (the place t).  In abstract mode roots become opaque labels.
    """
    if len(mults) != len(roots):
        raise ValidationError(f"{len(mults)} multiplicities but {len(roots)} roots")
    if len(set(str(r) for r in roots)) != len(roots):
        raise ValidationError(f"roots must be pairwise distinct: {list(roots)}")
    places = []
    for m, r in zip(mults, roots):
        if p is None:
            places.append((Place.abstract(str(r)), m))
        elif isinstance(r, str) and r.lower() in ("inf", "oo", "infinity"):
            places.append((Place.infinity(), m))
        else:
            r_int = int(r)
            if not 0 <= r_int < p:
                raise ValidationError(f"root {r} out of range for F_{p}")
            places.append((Place.linear(r_int, p), m))
    return parse_form(jcase, places, p=p)


def abstract_pattern(jcase: JCase, mults: Sequence[int]) -> FactoredForm:
    """Abstract-mode form from a bare multiplicity pattern."""
    return form_from_roots(jcase, list(mults), [f"r{i}" for i in range(len(mults))], p=None)


def radical(f: FactoredForm) -> tuple[Place, ...]:
    """The distinct places of f (each with multiplicity one); degree = k."""
    return tuple(pl for pl, _ in f.places)


def complement(f: FactoredForm) -> FactoredForm:
    return f.complement()


def place_value(pl: Place, point: ProjPoint, ctx: FieldContext) -> FieldElement:
    """Value of the place's form at a canonical representative.

    Finite points use the chart t = 1, infinity uses s = 1; places are monic
    in s, so every finite place has value 1 at (1 : 0).
    """
    if pl.is_abstract:
        raise ValidationError("cannot evaluate an abstract place")
    if pl.at_infinity:
        return point.t
    if point.is_infinity:
        return ctx.one()
    acc = ctx.zero()
    for c in reversed(pl.poly):
        acc = acc * point.s + ctx.el(c)
    return acc


def evaluate(f: FactoredForm, point: ProjPoint, ctx: FieldContext) -> FieldElement:
    """Value of the dehomogenized form at the canonical representative."""
    if f.is_abstract:
        raise ValidationError("cannot evaluate an abstract form")
    if ctx.p != f.p:
        raise ValidationError(f"form over F_{f.p} evaluated in characteristic {ctx.p}")
    acc = ctx.one()
    for pl, m in f.places:
        acc = acc * ctx.pow(place_value(pl, point, ctx), m)
    return acc


def local_unit(
    f: FactoredForm,
    point: ProjPoint,
    ctx: FieldContext,
    siblings: Optional[Sequence[FieldElement]] = None,
) -> tuple[int, FieldElement]:
    """Multiplicity m and unit part c of f at one of its zeroes.

    c is the value of f with the one F_q-linear factor vanishing at the point
    removed m times: the product of all other places' values and, for a
    higher-degree place, of (s - s') over the place's other F_q-roots s'.
    Those other roots can be passed in (the counting sweep collects them);
    otherwise they are found by scanning F_q, which is only sensible at small q.
    """
    vanishing = None
    c = ctx.one()
    for pl, m in f.places:
        v = place_value(pl, point, ctx)
        if v.is_zero():
            if vanishing is not None:
                raise ValidationError("point lies on two places; places must be coprime")
            vanishing = (pl, m)
        else:
            c = c * ctx.pow(v, m)
    if vanishing is None:
        raise ValidationError("local_unit called at a point where f does not vanish")
    pl, m = vanishing
    if not pl.at_infinity and pl.degree > 1:
        if siblings is None:
            siblings = []
            for code in range(ctx.q):
                x = ctx.from_code(code)
                if place_value(pl, ProjPoint.finite(x), ctx).is_zero():
                    siblings.append(x)
        others = [x for x in siblings if x != point.s]
        if len(others) != pl.degree - 1:
            raise ValidationError(
                f"expected {pl.degree - 1} sibling roots of {pl.describe()}, got {len(others)}"
            )
        for x in others:
            c = c * ctx.pow(point.s - x, m)
    if c.is_zero():
        raise ValidationError("local unit must be nonzero")
    return m, c
