"""Shared fixtures and independent oracles for the test suite."""

from __future__ import annotations

import pytest

from constj.forms import FactoredForm, J0, J1728, JCase, form_from_roots
from constj.gf import FieldContext, ProjPoint, enumerate_p1
from constj import forms


ROOT_POOL = ["0", "1", "inf", "2", "3", "4", "5", "6"]


def concrete_form(jcase: JCase, pattern, p: int = 5) -> FactoredForm:
    """Form with the given multiplicities at the first k canonical roots."""
    k = len(pattern)
    return form_from_roots(jcase, list(pattern), ROOT_POOL[:k], p=p)


def brute_force_count(f: FactoredForm, a: int, ctx: FieldContext) -> int:
    """Literal (x, u) double loop over the affine model, plus infinity.

    A valid smooth-model oracle whenever gcd(a, m) = 1 at every place
    (no branch needs normalization data there).
    """
    total = 0
    for x_code in range(ctx.q):
        point = ProjPoint.finite(ctx.from_code(x_code))
        val = forms.evaluate(f, point, ctx)
        for u_code in range(ctx.q):
            if ctx.pow(ctx.from_code(u_code), a) == val:
                total += 1
    if any(pl.at_infinity for pl, _ in f.places):
        total += 1  # u^a = 0 above (1:0)
    else:
        one = ctx.one()
        total += sum(
            1 for u_code in range(ctx.q) if ctx.pow(ctx.from_code(u_code), a) == one
        )
    return total


def enumeration_power_count(ctx: FieldContext, c, n: int) -> int:
    """#\\{u : u^n = c\\} by exhausting u; the oracle for nth_power_count."""
    return sum(1 for code in range(ctx.q) if ctx.pow(ctx.from_code(code), n) == c)


@pytest.fixture(scope="session")
def shared_cache(tmp_path_factory):
    """One point-count cache for the whole session; heavy counts run once."""
    from constj.count import CountCache

    return CountCache(tmp_path_factory.mktemp("counts"))


@pytest.fixture(scope="session")
def f5553():
    return concrete_form(J0, (5, 5, 5, 3))


@pytest.fixture(scope="session")
def f_squarefree_sextic():
    return concrete_form(J0, (5, 5, 5, 5, 5, 5))


@pytest.fixture(scope="session")
def f1728_3333():
    return form_from_roots(J1728, [3, 3, 3, 3], ["0", "1", "3", "inf"], p=7)
