"""Exact point counts of smooth models of u^a = f over F_{p^i}.

The count is a single pass over P^1(F_q).  Away from the zeroes of f the
fiber size depends only on the class of f(P) modulo d-th powers
(d = gcd(a, q-1)), so the sweep works with a precomputed table mapping each
element code to its discrete-log residue modulo D = gcd(exponent, q-1).
The table is built by walking the cyclic group F_q* once, vectorized in
blocks.  Zeroes of f are detected inline (a place value hits 0) and receive
the branch-corrected local count #{Y : Y^gcd(a,m) = local unit}.

Chunks of the sweep are independent, so they can be fanned out to worker
processes; partial sums are combined in chunk order and the result is
bit-identical to a serial run.
"""

from __future__ import annotations

import multiprocessing
import os
import warnings
from dataclasses import dataclass
from math import gcd
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__ as TOOL_VERSION
from .curve import CurveSpec
from .errors import InvariantViolation, ValidationError
from .forms import FactoredForm, ProjPoint, evaluate, local_unit
from .gf import FieldContext, FieldElement, enumerate_p1, make_field, nth_power_count

_CHUNK = 1 << 20
_TABLE_CACHE: dict[tuple[int, int, int], tuple[np.ndarray, int]] = {}
_TABLE_CACHE_LIMIT = 4
_GENERATOR_CACHE: dict[tuple[int, int], int] = {}


# ---------------------------------------------------------------------------
# vectorized arithmetic on blocks of field elements (coefficient columns)

def _reduction_rows(ctx: FieldContext) -> np.ndarray:
    """Coefficients of x^(deg+t) mod modulus, for t = 0 .. deg-2."""
    deg, p = ctx.degree, ctx.p
    rows = np.zeros((max(deg - 1, 1), deg), dtype=np.int32)
    if deg == 1:
        return rows
    cur = [(-c) % p for c in ctx.modulus[:deg]]  # x^deg
    rows[0] = cur
    for t in range(1, deg - 1):
        shifted = [0] + cur[:-1]
        lead = cur[-1]
        if lead:
            for j in range(deg):
                shifted[j] = (shifted[j] + lead * rows[0][j]) % p
        cur = [c % p for c in shifted]
        rows[t] = cur
    return rows


def _mul_fixed(h: tuple[int, ...], block: np.ndarray, ctx: FieldContext, red: np.ndarray) -> np.ndarray:
    """Multiply the fixed element h into a (deg, M) block of coefficients."""
    deg, p = ctx.degree, ctx.p
    m_cols = block.shape[1]
    work = np.zeros((2 * deg - 1, m_cols), dtype=np.int32)
    for j, hj in enumerate(h):
        if hj:
            work[j:j + deg] += hj * block
    for t in range(2 * deg - 2, deg - 1, -1):
        w = work[t]
        for jj in range(deg):
            rj = int(red[t - deg, jj])
            if rj:
                work[jj] += rj * w
    return work[:deg] % p


def _mul_blocks(a: np.ndarray, b: np.ndarray, ctx: FieldContext, red: np.ndarray) -> np.ndarray:
    """Columnwise product of two (deg, M) coefficient blocks."""
    deg, p = ctx.degree, ctx.p
    m_cols = a.shape[1]
    work = np.zeros((2 * deg - 1, m_cols), dtype=np.int32)
    for j in range(deg):
        aj = a[j]
        work[j:j + deg] += aj * b
    for t in range(2 * deg - 2, deg - 1, -1):
        w = work[t]
        for jj in range(deg):
            rj = int(red[t - deg, jj])
            if rj:
                work[jj] += rj * w
    return work[:deg] % p


def _digits(codes: np.ndarray, ctx: FieldContext) -> np.ndarray:
    out = np.empty((ctx.degree, codes.shape[0]), dtype=np.int32)
    rem = codes.copy()
    for j in range(ctx.degree):
        out[j] = rem % ctx.p
        rem //= ctx.p
    return out


def _codes_of(block: np.ndarray, ctx: FieldContext) -> np.ndarray:
    out = np.zeros(block.shape[1], dtype=np.int64)
    for j in range(ctx.degree - 1, -1, -1):
        out *= ctx.p
        out += block[j]
    return out


# ---------------------------------------------------------------------------
# multiplicative structure: generator and power-class table

def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


def find_generator(ctx: FieldContext) -> FieldElement:
    """Smallest-code generator of F_q*; deterministic."""
    key = (ctx.p, ctx.degree)
    if key in _GENERATOR_CACHE:
        return ctx.from_code(_GENERATOR_CACHE[key])
    order = ctx.q - 1
    cofactors = [order // ell for ell in _prime_factors(order)]
    one = ctx.one()
    start = 2 if ctx.degree == 1 else ctx.p  # constants never generate an extension
    for code in range(start, ctx.q):
        cand = ctx.from_code(code)
        if all(ctx.pow(cand, cf) != one for cf in cofactors):
            _GENERATOR_CACHE[key] = code
            return cand
    raise InvariantViolation("no generator found; field construction is broken")


def power_class_table(ctx: FieldContext, exponent: int) -> tuple[np.ndarray, int]:
    """uint8 array T with T[code(c)] = dlog(c) mod D, D = gcd(exponent, q-1).

    T[0] (the zero element) is the sentinel 255.  Built by walking the powers
    of a generator in vectorized blocks.
    """
    cache_key = (ctx.p, ctx.degree, exponent)
    if cache_key in _TABLE_CACHE:
        return _TABLE_CACHE[cache_key]
    q = ctx.q
    d_cls = gcd(exponent, q - 1)
    g = find_generator(ctx)
    red = _reduction_rows(ctx)

    block_cap = min(q - 1, _CHUNK)
    block = np.zeros((ctx.degree, 1), dtype=np.int32)
    block[0, 0] = 1
    size = 1
    while size < block_cap:
        step = ctx.pow(g, size)
        ext = _mul_fixed(step.coeffs, block[:, : min(size, block_cap - size)], ctx, red)
        block = np.concatenate([block, ext], axis=1)
        size = block.shape[1]

    cls = np.full(q, 255, dtype=np.uint8)
    idx = 0
    h = ctx.one()
    g_blk = ctx.pow(g, block_cap)
    while idx < q - 1:
        length = min(block_cap, q - 1 - idx)
        seg = block[:, :length] if idx == 0 else _mul_fixed(h.coeffs, block[:, :length], ctx, red)
        codes = _codes_of(seg, ctx)
        cls[codes] = (np.arange(idx, idx + length, dtype=np.int64) % d_cls).astype(np.uint8)
        idx += length
        if idx < q - 1:
            h = ctx.mul(h, g_blk)
    if int(np.count_nonzero(cls == 255)) != 1:
        raise InvariantViolation("power-class table incomplete; generator order is wrong")

    while len(_TABLE_CACHE) >= _TABLE_CACHE_LIMIT:
        _TABLE_CACHE.pop(next(iter(_TABLE_CACHE)))
    _TABLE_CACHE[cache_key] = (cls, d_cls)
    return cls, d_cls


# ---------------------------------------------------------------------------
# the sweep

def _place_value_codes(pl, codes: np.ndarray, ctx: FieldContext, red: np.ndarray) -> np.ndarray:
    """Codes of the place values at the finite points given by codes."""
    if pl.degree == 1 and not pl.at_infinity:
        c0 = pl.poly[0]
        digit0 = codes % ctx.p
        return codes - digit0 + (digit0 + c0) % ctx.p
    # general place: Horner with full block products
    x_blk = _digits(codes, ctx)
    acc = np.zeros_like(x_blk)
    acc[0] = 1
    for c in reversed(pl.poly[:-1]):
        acc = _mul_blocks(acc, x_blk, ctx, red)
        if c:
            acc[0] = (acc[0] + c) % ctx.p
    return _codes_of(acc, ctx)


_SWEEP_STATE: dict = {}


def _sweep_chunk(bounds: tuple[int, int]) -> tuple[int, list[tuple[int, int]]]:
    """Bulk fiber count over [lo, hi) plus the zeroes of f seen there."""
    st = _SWEEP_STATE
    ctx: FieldContext = st["ctx"]
    lo, hi = bounds
    codes = np.arange(lo, hi, dtype=np.int64)
    acc = np.zeros(hi - lo, dtype=np.int32)
    vanish = np.zeros(hi - lo, dtype=bool)
    zeros: list[tuple[int, int]] = []
    for place_idx, (pl, m) in enumerate(st["places"]):
        if pl.at_infinity:
            continue  # value 1 at every finite point
        vals = _place_value_codes(pl, codes, ctx, st["red"])
        z = vals == 0
        if z.any():
            vanish |= z
            zeros.extend((place_idx, int(c)) for c in codes[z])
        acc += m * st["cls"][vals].astype(np.int32)
    ok = (~vanish) & (acc % st["d_a"] == 0)
    return st["d_a"] * int(np.count_nonzero(ok)), zeros


def _run_sweep(jobs: int, q: int) -> tuple[int, list[tuple[int, int]]]:
    bounds = [(lo, min(lo + _CHUNK, q)) for lo in range(0, q, _CHUNK)]
    if jobs <= 1 or len(bounds) < 2 or os.name != "posix":
        parts = [_sweep_chunk(b) for b in bounds]
    else:
        mp = multiprocessing.get_context("fork")
        with mp.Pool(processes=min(jobs, len(bounds))) as pool:
            parts = pool.map(_sweep_chunk, bounds)
    total = 0
    zeros: list[tuple[int, int]] = []
    for bulk, zs in parts:
        total += bulk
        zeros.extend(zs)
    return total, zeros


def count_points(curve: CurveSpec, ctx: FieldContext, jobs: int = 1) -> int:
    """Number of F_q-points of the smooth projective model of the cover."""
    f = curve.f
    if f.is_abstract:
        raise ValidationError("cannot count points of an abstract form")
    if ctx.p != f.p:
        raise ValidationError(f"curve over F_{f.p} counted in characteristic {ctx.p}")
    if curve.a % ctx.p == 0:
        raise ValidationError("cover order divisible by the characteristic")
    q = ctx.q
    cls, _ = power_class_table(ctx, f.jcase.exponent)
    d_a = gcd(curve.a, q - 1)

    _SWEEP_STATE.clear()
    _SWEEP_STATE.update(
        ctx=ctx, places=f.places, cls=cls, d_a=d_a, red=_reduction_rows(ctx)
    )
    total, zero_list = _run_sweep(jobs, q)
    _SWEEP_STATE.clear()

    # point at infinity
    inf_mult = next((m for pl, m in f.places if pl.at_infinity), None)
    if inf_mult is None:
        total += gcd(curve.a, q - 1)  # f(1:0) = 1, always an a-th power
    else:
        total += gcd(gcd(curve.a, inf_mult), q - 1)  # unit there is 1

    # finite zeroes, grouped per place so sibling roots are known
    by_place: dict[int, list[int]] = {}
    for place_idx, code in zero_list:
        by_place.setdefault(place_idx, []).append(code)
    for place_idx, codes in by_place.items():
        pl, m = f.places[place_idx]
        if len(codes) != pl.degree:
            raise InvariantViolation(
                f"place {pl.describe()} has {len(codes)} roots in F_{q}, expected {pl.degree}"
            )
        sibs = [ctx.from_code(c) for c in codes]
        d = gcd(curve.a, m)
        for x in sibs:
            _, unit = local_unit(f, ProjPoint.finite(x), ctx, siblings=sibs)
            total += nth_power_count(ctx, unit, d)

    _assert_weil(curve, q, total)
    return total


def _assert_weil(curve: CurveSpec, q: int, n_points: int) -> None:
    """|N - r_q(q+1)| <= 2 G sqrt(q), exactly, with r_q the number of
    Frobenius-stable components and G the total geometric genus."""
    r_q = gcd(curve.components, q - 1)
    g_tot = curve.total_genus
    lhs = (n_points - r_q * (q + 1)) ** 2
    if lhs > 4 * g_tot * g_tot * q:
        raise InvariantViolation(
            f"Weil bound violated: N={n_points}, q={q}, components={r_q}, total genus={g_tot}"
        )


def naive_count(f: FactoredForm, a: int, ctx: FieldContext) -> int:
    """Count of the singular model: sum of #{u : u^a = f(P)} over P^1(F_q).

    Agrees with count_points whenever gcd(a, m) = 1 at every place; used as
    the squarefree-agreement oracle.
    """
    total = 0
    for point in enumerate_p1(ctx):
        total += nth_power_count(ctx, evaluate(f, point, ctx), a)
    return total


# ---------------------------------------------------------------------------
# series and cache

@dataclass(frozen=True)
class CountSeries:
    curve: CurveSpec
    p: int
    counts: tuple[tuple[int, int], ...]  # (level i, N(p^i)), ascending i

    def __post_init__(self) -> None:
        for i, n_pts in self.counts:
            q = self.p**i
            r_q = gcd(self.curve.components, q - 1)
            if (n_pts - r_q * (q + 1)) ** 2 > 4 * self.curve.total_genus**2 * q:
                raise InvariantViolation(f"Weil bound violated at level {i}")

    @property
    def i_max(self) -> int:
        return max((i for i, _ in self.counts), default=0)

    def n(self, i: int) -> int:
        for level, value in self.counts:
            if level == i:
                return value
        raise KeyError(f"no count at level {i}")


class CountCache:
    """Append-only line cache: p, level, curve key, count, tool version."""

    def __init__(self, directory) -> None:
        self.path = Path(directory) / "counts.cache"
        self._records: Optional[dict[tuple[int, int, str], int]] = None

    def _load(self) -> dict[tuple[int, int, str], int]:
        if self._records is None:
            self._records = {}
            if self.path.exists():
                for lineno, line in enumerate(self.path.read_text().splitlines(), 1):
                    if not line.strip():
                        continue
                    fields = line.split()
                    try:
                        p, i, key, value = int(fields[0]), int(fields[1]), fields[2], int(fields[3])
                        if len(fields) != 5:
                            raise ValueError
                    except (ValueError, IndexError):
                        warnings.warn(f"{self.path}:{lineno}: corrupt cache record; recounting")
                        continue
                    self._records[(p, i, key)] = value
        return self._records

    def get(self, p: int, i: int, key: str) -> Optional[int]:
        return self._load().get((p, i, key))

    def put(self, p: int, i: int, key: str, count: int) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a") as fh:
            fh.write(f"{p} {i} {key} {count} {TOOL_VERSION}\n")
            fh.flush()
        self._load()[(p, i, key)] = count


def count_series(
    curve: CurveSpec,
    i_max: int,
    cache: Optional[CountCache] = None,
    jobs: int = 1,
) -> CountSeries:
    """Counts at levels 1..i_max, loading from and refreshing the cache."""
    p = curve.f.p
    key = curve.key()
    counts = []
    for i in range(1, i_max + 1):
        value = cache.get(p, i, key) if cache is not None else None
        if value is None:
            value = count_points(curve, make_field(p, i), jobs=jobs)
            if cache is not None:
                cache.put(p, i, key, value)
        counts.append((i, value))
    return CountSeries(curve=curve, p=p, counts=tuple(counts))
