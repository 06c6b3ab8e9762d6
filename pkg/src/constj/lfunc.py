"""Zeta numerators from point counts, eigenspace factors, Newton polygons.

The numerator of the zeta function of a (possibly disconnected, with
F_q-rational components) smooth projective curve is reconstructed from
power sums s_i = r(q^i + 1) - N(q^i) via Newton's identities, with the
upper half filled in by the functional equation c_{2g-i} = q^{g-i} c_i.
Every division must be exact; a non-integral coefficient means the counts
are wrong and is reported as such.

The interesting part of H^1 of the full cover is the exact quotient of its
numerator by the subcover numerators; a nonzero remainder would falsify the
branch-corrected counting and aborts the run.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional

import numpy as np

from .count import CountCache, CountSeries, count_series
from .curve import CurveSpec, eigenspace_dims
from .errors import (
    BranchInconsistencyError,
    CountDataError,
    FalsifiedClaimError,
    InvariantViolation,
    ValidationError,
)
from .forms import FactoredForm, J0, JCase
from .taxonomy import is_partner_rational

ROOT_MODULUS_RTOL = 1e-6


def _frac_divmod(num: list[Fraction], den: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    num = num[:]
    deg_d = len(den) - 1
    quot = [Fraction(0)] * max(len(num) - deg_d, 1)
    for i in range(len(num) - 1 - deg_d, -1, -1):
        c = num[i + deg_d] / den[-1]
        quot[i] = c
        if c:
            for j in range(deg_d + 1):
                num[i + j] -= c * den[j]
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    return quot, num


def _squarefree_part(coeffs: tuple[int, ...]) -> list[Fraction]:
    """Exact squarefree part: P / gcd(P, P')."""
    poly = [Fraction(c) for c in coeffs]
    deriv = [Fraction(i * c) for i, c in enumerate(coeffs)][1:] or [Fraction(0)]
    a, b = poly, deriv
    while len(b) > 1 or b[0] != 0:
        _, r = _frac_divmod(a, b)
        a, b = b, r
    gcd_poly = [c / a[-1] for c in a]
    quot, rem = _frac_divmod(poly, gcd_poly)
    if len(rem) > 1 or rem[0] != 0:
        raise InvariantViolation("squarefree-part division must be exact")
    return quot


@dataclass(frozen=True)
class LPolynomial:
    """Integer zeta numerator: degree 2g, c_0 = 1, reciprocal roots of
    modulus sqrt(q)."""

    coeffs: tuple[int, ...]
    q: int
    g: int

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __post_init__(self) -> None:
        if self.degree != 2 * self.g:
            raise InvariantViolation(f"degree {self.degree} != 2g = {2 * self.g}")
        if self.coeffs[0] != 1:
            raise InvariantViolation("constant coefficient must be 1")
        if self.g and self.coeffs[-1] != self.q**self.g:
            raise InvariantViolation("leading coefficient must be q^g")

    def check_functional_equation(self) -> None:
        for i in range(self.g + 1):
            if self.coeffs[2 * self.g - i] != self.q ** (self.g - i) * self.coeffs[i]:
                raise InvariantViolation(f"functional equation fails at i={i}")

    def check_root_moduli(self, rtol: float = ROOT_MODULUS_RTOL) -> None:
        """All complex reciprocal roots have |alpha| = sqrt(q), floating check.

        Repeated roots are ill-conditioned for numeric root finders, so the
        roots are taken from the squarefree part (computed exactly first).
        """
        if self.degree == 0:
            return
        squarefree = _squarefree_part(self.coeffs)
        scale = float(self.q) ** 0.5
        balanced = [float(c) / scale**i for i, c in enumerate(squarefree)]
        roots = np.roots(balanced[::-1])
        err = np.abs(np.abs(roots) - 1.0)
        if err.size and float(err.max()) > rtol:
            raise InvariantViolation(f"reciprocal root off the sqrt(q) circle by {err.max():.3g}")

    def power_sum(self, i: int) -> int:
        """Sum of i-th powers of the reciprocal roots, by Newton's identities."""
        if i < 1:
            raise ValidationError("power sum index must be positive")
        c = self.coeffs
        deg = self.degree
        sums: list[int] = []
        for j in range(1, i + 1):
            if j <= deg:
                val = -(j * c[j] + sum(c[t] * sums[j - t - 1] for t in range(1, j)))
            else:
                val = -sum(c[t] * sums[j - t - 1] for t in range(1, deg + 1))
            sums.append(val)
        return sums[i - 1]


def lpolynomial(series: CountSeries) -> LPolynomial:
    """Reconstruct the zeta numerator from counts at levels 1..g.

    Counts beyond level g, when present, are checked against the
    reconstruction (functional-equation redundancy); any mismatch or
    non-integral coefficient raises CountDataError.
    """
    curve = series.curve
    q = series.p
    g_tot = curve.total_genus
    r = curve.components
    if g_tot == 0:
        return LPolynomial(coeffs=(1,), q=q, g=0)
    if r > 1 and (q - 1) % r != 0:
        raise ValidationError(
            f"{r} components are permuted by Frobenius over F_{q}; reconstruction unsupported"
        )
    if series.i_max < g_tot:
        raise ValidationError(f"need counts up to level {g_tot}, have {series.i_max}")

    sums = [r * (q**i + 1) - series.n(i) for i in range(1, g_tot + 1)]
    coeffs = [1]
    for j in range(1, g_tot + 1):
        num = -(sums[j - 1] + sum(coeffs[t] * sums[j - t - 1] for t in range(1, j)))
        if num % j != 0:
            raise CountDataError(f"count data inconsistent: coefficient {j} is not integral")
        coeffs.append(num // j)
    for i in range(g_tot - 1, -1, -1):
        coeffs.append(q ** (g_tot - i) * coeffs[i])

    lpoly = LPolynomial(coeffs=tuple(coeffs), q=q, g=g_tot)
    lpoly.check_functional_equation()
    lpoly.check_root_moduli()
    for i, n_actual in series.counts:
        if i > g_tot:
            predicted = r * (q**i + 1) - lpoly.power_sum(i)
            if predicted != n_actual:
                raise CountDataError(
                    f"count data inconsistent: level {i} has {n_actual}, zeta predicts {predicted}"
                )
    return lpoly


def predicted_count(lpoly: LPolynomial, components: int, i: int) -> int:
    return components * (lpoly.q**i + 1) - lpoly.power_sum(i)


def poly_mul(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return tuple(out)


def exact_quotient(numerator: tuple[int, ...], denominator: tuple[int, ...]) -> tuple[int, ...]:
    """Divide integer polynomials with constant term 1; remainder must vanish."""
    if denominator[0] != 1 or numerator[0] != 1:
        raise ValidationError("expected constant term 1 on both sides")
    deg_q = len(numerator) - len(denominator)
    if deg_q < 0:
        raise BranchInconsistencyError("denominator degree exceeds numerator degree")
    quot = [1]
    for n in range(1, deg_q + 1):
        val = numerator[n] - sum(
            denominator[j] * quot[n - j] for j in range(1, min(n, len(denominator) - 1) + 1)
        )
        quot.append(val)
    if poly_mul(tuple(quot), denominator) != tuple(numerator):
        raise BranchInconsistencyError(
            "branch-correction inconsistency: eigenspace factor division has a remainder"
        )
    return tuple(quot)


# ---------------------------------------------------------------------------
# full pipeline bundles

def cover_orders(jcase: JCase) -> tuple[int, ...]:
    return (6, 2, 3) if jcase == J0 else (4, 2)


def required_level(curve: CurveSpec) -> int:
    """Levels to count: the total genus, plus one redundancy level when small."""
    g_tot = curve.total_genus
    return g_tot + 1 if 0 < g_tot <= 4 else g_tot


@dataclass(frozen=True)
class ZetaBundle:
    """All counting and zeta data for one form at one prime."""

    f: FactoredForm
    p: int
    curves: tuple[CurveSpec, ...]
    series: tuple[CountSeries, ...]
    lpolys: tuple[LPolynomial, ...]
    new_factor: LPolynomial

    def curve_by_order(self, a: int) -> int:
        for idx, curve in enumerate(self.curves):
            if curve.a == a:
                return idx
        raise KeyError(a)


def zeta_bundle(
    f: FactoredForm,
    p: int,
    cache: Optional[CountCache] = None,
    jobs: int = 1,
    i_max_override: Optional[int] = None,
) -> ZetaBundle:
    """Count all covers of f over F_p, reconstruct numerators, split off the
    primitive eigenspace factor by exact division."""
    if f.is_abstract or f.p != p:
        raise ValidationError(f"need a concrete form over F_{p}")
    curves = tuple(CurveSpec(f, a) for a in cover_orders(f.jcase))
    needed = [required_level(c) for c in curves]
    if i_max_override is not None:
        too_low = [
            f"cover u^{c.a}: levels 1..{n}" for c, n in zip(curves, needed) if i_max_override < n
        ]
        if too_low:
            raise ValidationError(
                "i_max too small; count " + "; ".join(too_low)
            )
        needed = [i_max_override] * len(curves)
    series = tuple(
        count_series(c, n, cache=cache, jobs=jobs) for c, n in zip(curves, needed)
    )
    lpolys = tuple(lpolynomial(s) for s in series)

    denom = (1,)
    for lp in lpolys[1:]:
        denom = poly_mul(denom, lp.coeffs)
    quotient = exact_quotient(lpolys[0].coeffs, denom)

    expected = 2 * (f.k - 2)
    if len(quotient) - 1 != expected:
        raise InvariantViolation(
            f"eigenspace factor degree {len(quotient) - 1} != 2(k-2) = {expected}"
        )
    dims = eigenspace_dims(f)
    if expected != 2 * dims[1]:
        raise InvariantViolation("eigenspace factor degree disagrees with eigenspace dimension")
    new = LPolynomial(coeffs=quotient, q=p, g=f.k - 2)
    new.check_functional_equation()
    new.check_root_moduli()
    return ZetaBundle(f=f, p=p, curves=curves, series=series, lpolys=lpolys, new_factor=new)


def new_factor(
    f: FactoredForm,
    p: int,
    cache: Optional[CountCache] = None,
    jobs: int = 1,
) -> LPolynomial:
    """Exact quotient of the full-cover numerator by the subcover numerators;
    degree 2(k-2)."""
    return zeta_bundle(f, p, cache=cache, jobs=jobs).new_factor


# ---------------------------------------------------------------------------
# Newton polygons and the supersingularity verdict

@dataclass(frozen=True)
class NewtonPolygon:
    """Slope/length pairs of the lower convex hull of (i, v_p(c_i))."""

    segments: tuple[tuple[Fraction, int], ...]

    def __post_init__(self) -> None:
        slopes = [s for s, _ in self.segments]
        if slopes != sorted(slopes):
            raise InvariantViolation("Newton polygon slopes must be nondecreasing")

    @property
    def total_length(self) -> int:
        return sum(length for _, length in self.segments)


def _v_p(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def newton_polygon(lpoly: LPolynomial, p: int) -> NewtonPolygon:
    """Lower hull of the p-adic valuations, slopes normalized so v(q) = 1."""
    if lpoly.degree == 0:
        return NewtonPolygon(segments=())
    e = _v_p(lpoly.q, p)
    if p ** e != lpoly.q:
        raise ValidationError(f"{lpoly.q} is not a power of {p}")
    pts = [(i, _v_p(c, p)) for i, c in enumerate(lpoly.coeffs) if c != 0]
    hull: list[tuple[int, int]] = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop hull[-1] when it sits on or above the chord hull[-2] -> pt
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    segments: list[tuple[Fraction, int]] = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        slope = Fraction(y2 - y1, (x2 - x1) * e)
        length = x2 - x1
        if segments and segments[-1][0] == slope:
            segments[-1] = (slope, segments[-1][1] + length)
        else:
            segments.append((slope, length))
    polygon = NewtonPolygon(segments=tuple(segments))
    if polygon.total_length != lpoly.degree:
        raise InvariantViolation("Newton polygon lengths must sum to the degree")
    return polygon


def is_pure_half(lpoly: LPolynomial, p: int) -> bool:
    """True when the Newton polygon is the single slope 1/2 (vacuous for L = 1)."""
    segs = newton_polygon(lpoly, p).segments
    return segs == () or segs == ((Fraction(1, 2), lpoly.degree),)


def e_curve_trace(jcase: JCase, p: int) -> int:
    """Frobenius trace of the CM elliptic curve of the family, by direct count.

    j = 0 uses y^2 = x^3 + 1; j = 1728 uses y^2 = x^3 - x.  The curve is
    supersingular exactly when the trace vanishes (p >= 5).
    """
    if p <= 3 or not _is_prime_int(p):
        raise ValidationError("p must be prime > 3")
    count = 1  # point at infinity
    for x in range(p):
        rhs = (x * x * x + 1) % p if jcase == J0 else (x * x * x - x) % p
        if rhs == 0:
            count += 1
        elif pow(rhs, (p - 1) // 2, p) == 1:
            count += 2
    return p + 1 - count


def _is_prime_int(n: int) -> bool:
    from .gf import is_prime

    return is_prime(n)


@dataclass(frozen=True)
class Verdict:
    jcase: JCase
    p: int
    pattern: tuple[int, ...]
    theorem_applicable: bool
    curve_new_factor_pure: bool
    e_supersingular: bool
    surface_artin_supersingular: bool
    e_trace: int
    new_factor: LPolynomial
    new_factor_polygon: NewtonPolygon

    def __post_init__(self) -> None:
        if self.surface_artin_supersingular != (
            self.curve_new_factor_pure and self.e_supersingular
        ):
            raise InvariantViolation("verdict conjunction is inconsistent")


def congruence_holds(jcase: JCase, p: int) -> bool:
    return p % 6 == 5 if jcase == J0 else p % 4 == 3


def verdict_from_bundle(bundle: ZetaBundle, strict: bool = True) -> Verdict:
    f, p = bundle.f, bundle.p
    pure = is_pure_half(bundle.new_factor, p)
    trace = e_curve_trace(f.jcase, p)
    e_ss = trace == 0
    applicable = congruence_holds(f.jcase, p)
    result = Verdict(
        jcase=f.jcase,
        p=p,
        pattern=f.pattern,
        theorem_applicable=applicable,
        curve_new_factor_pure=pure,
        e_supersingular=e_ss,
        surface_artin_supersingular=pure and e_ss,
        e_trace=trace,
        new_factor=bundle.new_factor,
        new_factor_polygon=newton_polygon(bundle.new_factor, p),
    )
    if strict and applicable and not result.surface_artin_supersingular:
        raise FalsifiedClaimError(
            f"supersingularity fails for pattern {f.pattern} at p={p} "
            f"(pure={pure}, trace={trace}); this should be impossible"
        )
    return result


def verdict(
    f: FactoredForm,
    p: int,
    cache: Optional[CountCache] = None,
    jobs: int = 1,
    strict: bool = True,
) -> Verdict:
    """Supersingularity verdict for a form whose partner surface is rational."""
    if not is_partner_rational(f):
        raise ValidationError(
            f"pattern {f.pattern} does not have a rational partner surface"
        )
    return verdict_from_bundle(zeta_bundle(f, p, cache=cache, jobs=jobs), strict=strict)
