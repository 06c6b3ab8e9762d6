"""Point counting: brute-force oracles, partner equality, cache, parallelism."""

import warnings

import pytest

import constj.count as count_mod
from constj.count import CountCache, CountSeries, count_points, count_series, naive_count
from constj.curve import CurveSpec
from constj.errors import InvariantViolation
from constj.forms import J0, J1728, Place, form_from_roots, parse_form
from constj.gf import make_field
from constj.taxonomy import catalog

from conftest import brute_force_count, concrete_form


def x_cubed_plus_one_form():
    """u^2 = t^3 (s+t)(s^2+4st+t^2) dehomogenizes to y^2 = x^3 + 1 over F_5."""
    return parse_form(
        J0,
        [(Place.infinity(), 3), (Place.linear(4, 5), 1), (Place.from_poly((1, 4, 1), 5), 1)],
        p=5,
    )


@pytest.mark.parametrize("i", [1, 2, 3])
def test_rational_curve_counts(i):
    curve = CurveSpec(concrete_form(J0, (5, 1)), 6)
    ctx = make_field(5, i)
    assert count_points(curve, ctx) == ctx.q + 1


def test_elliptic_curve_counts_frozen():
    curve = CurveSpec(x_cubed_plus_one_form(), 2)
    assert count_points(curve, make_field(5, 1)) == 6
    assert count_points(curve, make_field(5, 2)) == 36


@pytest.mark.parametrize("i", [1, 2])
def test_elliptic_curve_counts_brute_force(i):
    curve = CurveSpec(x_cubed_plus_one_form(), 2)
    ctx = make_field(5, i)
    assert count_points(curve, ctx) == brute_force_count(curve.f, 2, ctx)


@pytest.mark.parametrize(
    "pattern,a",
    [((5, 5, 5, 3), 2), ((5, 5, 2), 3), ((5, 5, 4, 4), 3)],
)
@pytest.mark.parametrize("i", [1, 2])
def test_subcover_counts_brute_force(pattern, a, i):
    # patterns chosen so gcd(a, m) = 1 at every zero: the singular model
    # is then a valid smooth-count oracle
    f = concrete_form(J0, pattern)
    ctx = make_field(5, i)
    assert count_points(CurveSpec(f, a), ctx) == brute_force_count(f, a, ctx)


def test_full_cover_brute_force_on_squarefree():
    f = parse_form(
        J0,
        [(Place.infinity(), 1), (Place.linear(0, 5), 5), (Place.linear(1, 5), 5),
         (Place.linear(2, 5), 1)],
        p=5,
    )
    for i in (1, 2):
        ctx = make_field(5, i)
        assert count_points(CurveSpec(f, 6), ctx) == brute_force_count(f, 6, ctx)


def test_disconnected_cover_counts_by_components():
    """(4,4,4): u^6 = f splits as u^3 = w and u^3 = -w; count each by brute force."""
    f = concrete_form(J0, (4, 4, 4))  # roots 0, 1, inf
    # w = s^2 (s-t)^2 t^2; each component has all gcd(3, m) = 1
    w_plus = parse_form(
        J0,
        [(Place.linear(0, 5), 2), (Place.linear(1, 5), 2), (Place.infinity(), 2)],
        p=5,
    )
    for i in (1, 2):
        ctx = make_field(5, i)
        n_plus = brute_force_count(w_plus, 3, ctx)
        # u^3 = -w: count pairs with u^3 = -w(x) directly
        n_minus = 0
        from constj.forms import evaluate
        from constj.gf import ProjPoint

        for code in range(ctx.q):
            val = -evaluate(w_plus, ProjPoint.finite(ctx.from_code(code)), ctx)
            n_minus += sum(
                1 for u in range(ctx.q) if ctx.pow(ctx.from_code(u), 3) == val
            )
        n_minus += 1  # above (1:0), w vanishes there
        assert count_points(CurveSpec(f, 6), ctx) == n_plus + n_minus


@pytest.mark.parametrize(
    "p,i_list,mults,roots",
    [
        (5, (1, 2, 3), [1] * 6, ["0", "1", "2", "3", "4", "inf"]),
        (7, (1, 2, 3), [1] * 6, ["0", "1", "2", "3", "4", "5"]),
        (11, (1, 2), [1] * 6, ["0", "1", "2", "3", "4", "inf"]),
    ],
)
def test_squarefree_agreement(p, i_list, mults, roots):
    """Branch-corrected counting equals the naive fiber-sum for squarefree f."""
    f = form_from_roots(J0, mults, roots, p=p)
    for a in (2, 3, 6):
        for i in i_list:
            ctx = make_field(p, i)
            assert count_points(CurveSpec(f, a), ctx) == naive_count(f, a, ctx)


def test_squarefree_agreement_with_quadratic_place():
    places = [
        (Place.infinity(), 1),
        (Place.linear(0, 7), 1),
        (Place.linear(1, 7), 1),
        (Place.linear(2, 7), 1),
        (Place.from_poly((1, 0, 1), 7), 1),  # x^2 + 1, roots in F_49
    ]
    f = parse_form(J0, places, p=7)
    for i in (1, 2, 3):
        ctx = make_field(7, i)
        for a in (2, 6):
            assert count_points(CurveSpec(f, a), ctx) == naive_count(f, a, ctx)


@pytest.mark.parametrize("row_idx", range(7))
def test_partner_equality_all_catalog_patterns(row_idx):
    row = catalog(J0)[row_idx]
    f = concrete_form(J0, row.pattern)
    g = f.complement()
    for i in (1, 2):
        ctx = make_field(5, i)
        assert count_points(CurveSpec(f, 6), ctx) == count_points(CurveSpec(g, 6), ctx)


def test_partner_equality_subcovers(f5553):
    g = f5553.complement()
    for a in (2, 3):
        for i in (1, 2):
            ctx = make_field(5, i)
            assert count_points(CurveSpec(f5553, a), ctx) == count_points(
                CurveSpec(g, a), ctx
            )


def test_weil_bound_enforced(f5553):
    series = count_series(CurveSpec(f5553, 6), 3)
    # tamper: a count far outside the Weil interval must be rejected
    bad = tuple((i, n + 10_000) for i, n in series.counts)
    with pytest.raises(InvariantViolation, match="Weil"):
        CountSeries(curve=series.curve, p=5, counts=bad)


def test_parallel_matches_serial_across_chunks(monkeypatch, f5553):
    monkeypatch.setattr(count_mod, "_CHUNK", 500)  # force many chunks
    curve = CurveSpec(f5553, 6)
    ctx = make_field(5, 5)
    serial = count_points(curve, ctx, jobs=1)
    parallel = count_points(curve, ctx, jobs=3)
    assert serial == parallel


def test_count_series_and_cache(tmp_path, f5553):
    cache = CountCache(tmp_path)
    curve = CurveSpec(f5553, 6)
    series = count_series(curve, 4, cache=cache)
    assert [i for i, _ in series.counts] == [1, 2, 3, 4]
    assert cache.path.exists()
    lines = cache.path.read_text().splitlines()
    assert len(lines) == 4 and all(len(line.split()) == 5 for line in lines)

    # second invocation: all cache hits, zero sweeps
    def boom(*args, **kwargs):
        raise AssertionError("sweep ran despite a warm cache")

    fresh = CountCache(tmp_path)
    monkey_target = count_mod.count_points
    count_mod.count_points = boom
    try:
        again = count_series(curve, 4, cache=fresh)
    finally:
        count_mod.count_points = monkey_target
    assert again.counts == series.counts


def test_cache_corruption_recounts_with_warning(tmp_path, f5553):
    cache = CountCache(tmp_path)
    curve = CurveSpec(f5553, 2)
    series = count_series(curve, 2, cache=cache)
    cache.path.write_text("garbage line\n5 x {key} 1 v\n".format(key=curve.key()))
    fresh = CountCache(tmp_path)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        again = count_series(curve, 2, cache=fresh)
    assert again.counts == series.counts
    assert any("corrupt" in str(w.message) for w in caught)
    # the recount appended valid records: a third pass is pure cache hits
    final = CountCache(tmp_path)
    assert final.get(5, 1, curve.key()) == series.n(1)


def test_count_series_below_genus_is_fine_but_lfunc_rejects(f5553):
    from constj.errors import ValidationError
    from constj.lfunc import lpolynomial

    series = count_series(CurveSpec(f5553, 6), 2)
    assert series.i_max == 2
    with pytest.raises(ValidationError, match="level"):
        lpolynomial(series)


def test_small_q_infinity_handling():
    # no place at infinity: f(1:0) = 1 contributes gcd(a, q-1) points
    f = form_from_roots(J1728, [3, 1], ["0", "1"], p=7)
    ctx = make_field(7, 1)
    assert count_points(CurveSpec(f, 4), ctx) == brute_force_count(f, 4, ctx)
