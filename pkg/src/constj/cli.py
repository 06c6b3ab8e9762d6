"""Command-line front end: catalog, verify, zeta, report.

Exit codes: 0 success (including "congruence does not apply"), 1 validation
error, 2 hard failure (a verdict that should hold came out false, or an
internal consistency check tripped).  Reports are deterministic for a given
config and tool version; wall-clock timing goes to stderr only.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from fractions import Fraction
from typing import Optional, Sequence

from . import __version__ as TOOL_VERSION
from . import count, curve, forms, lfunc, surface, taxonomy
from .errors import FalsifiedClaimError, InvariantViolation, ValidationError

_JSON_INT_LIMIT = 1 << 53


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="constj",
        description="Constant j-invariant elliptic surfaces: classification tables, "
        "superelliptic point counts, zeta factors, supersingularity checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p_cmd, with_run_flags: bool) -> None:
        p_cmd.add_argument("--jcase", choices=["0", "1728"], default="0",
                           help="constant j-invariant family (default 0)")
        p_cmd.add_argument("--format", choices=["text", "json", "csv"], default="text")
        if with_run_flags:
            p_cmd.add_argument("--p", type=int, required=True, help="prime > 3")
            p_cmd.add_argument("--pattern", required=True,
                               help="multiplicities, e.g. 5,5,5,3")
            p_cmd.add_argument("--roots", default=None,
                               help="root list matching the pattern, e.g. 0,1,inf,2 "
                                    "(default: 0,1,inf,2,3,...)")
            p_cmd.add_argument("--imax", type=int, default=None,
                               help="count levels 1..imax (must cover the genus)")
            p_cmd.add_argument("--cache-dir", default=None,
                               help="directory for the point-count cache")
            p_cmd.add_argument("--jobs", type=int, default=1,
                               help="parallel workers for the sweep")

    common(sub.add_parser("catalog", help="reproduce the classification tables"), False)
    common(sub.add_parser("verify", help="run the full pipeline and gate on the verdict"), True)
    common(sub.add_parser("zeta", help="counts, zeta factors and Newton polygons only"), True)
    common(sub.add_parser("report", help="full report without verdict gating"), True)
    return parser


# ---------------------------------------------------------------------------
# rendering

def _json_safe(obj):
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, int):
        return str(obj) if abs(obj) > _JSON_INT_LIMIT else obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if dataclasses.is_dataclass(obj):
        return _json_safe(dataclasses.asdict(obj))
    if isinstance(obj, taxonomy.SurfaceClass):
        return obj.value
    return obj


def render_json(payload: dict) -> str:
    return json.dumps(_json_safe(payload), indent=2, sort_keys=True) + "\n"


def _flatten(obj, prefix: str = "") -> list[tuple[str, str]]:
    rows: list[tuple[str, str]] = []
    if isinstance(obj, dict):
        for key in sorted(obj):
            rows.extend(_flatten(obj[key], f"{prefix}{key}."))
    elif isinstance(obj, (list, tuple)):
        for idx, item in enumerate(obj):
            rows.extend(_flatten(item, f"{prefix}{idx}."))
    else:
        rows.append((prefix.rstrip("."), "" if obj is None else str(obj)))
    return rows


def render_csv(payload: dict) -> str:
    lines = ["key,value"]
    for key, value in _flatten(_json_safe(payload)):
        value = value.replace('"', '""')
        lines.append(f'{key},"{value}"')
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# catalog

def _catalog_payload(jcase: forms.JCase) -> dict:
    rows = [dataclasses.asdict(row) for row in taxonomy.catalog(jcase)]
    for row in rows:
        row["surface_class"] = row["surface_class"].value
    excluded = [
        {"pattern": pat, "note": "X_f rational - excluded"}
        for pat in taxonomy.enumerate_patterns(jcase)
        if len(pat) == 2
    ]
    return {
        "jcase": jcase.tag,
        "rows": rows,
        "excluded": excluded,
        "meta": {"tool_version": TOOL_VERSION},
    }


def _catalog_text(payload: dict) -> str:
    out = [f"catalog for {payload['jcase']}"]
    header = f"{'pattern':>18} {'n':>2} {'k':>2} {'class':>22} {'torelli':>8}  congruence"
    out.append(header)
    for row in payload["rows"]:
        pat = ",".join(str(m) for m in row["pattern"])
        flag = "X" if row["torelli_failure_expected"] else "-"
        out.append(
            f"{pat:>18} {row['n']:>2} {row['k']:>2} {row['surface_class']:>22} "
            f"{flag:>8}  {row['supersingular_congruence']}"
        )
    for row in payload["excluded"]:
        pat = ",".join(str(m) for m in row["pattern"])
        out.append(f"{pat:>18}  {row['note']}")
    return "\n".join(out) + "\n"


def cmd_catalog(args) -> int:
    payload = _catalog_payload(forms.jcase_from_tag(args.jcase))
    if args.format == "json":
        sys.stdout.write(render_json(payload))
    elif args.format == "csv":
        sys.stdout.write(render_csv(payload))
    else:
        sys.stdout.write(_catalog_text(payload))
    return 0


# ---------------------------------------------------------------------------
# verify / zeta / report

def _default_roots(k: int, p: int) -> list[str]:
    pool = ["0", "1", "inf"] + [str(v) for v in range(2, p)]
    if k > len(pool):
        raise ValidationError(f"pattern needs {k} distinct roots but P^1(F_{p}) is too small")
    return pool[:k]


def _parse_run_config(args, command: str) -> dict:
    jcase = forms.jcase_from_tag(args.jcase)
    try:
        pattern = [int(tok) for tok in args.pattern.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise ValidationError(f"bad pattern {args.pattern!r}") from exc
    if args.roots is None:
        roots = _default_roots(len(pattern), args.p)
    else:
        roots = [tok.strip() for tok in args.roots.split(",") if tok.strip() != ""]
    return {
        "command": command,
        "jcase": jcase.tag,
        "p": args.p,
        "pattern": pattern,
        "roots": roots,
        "i_max": args.imax,
        "cache_dir": args.cache_dir,
        "format": args.format,
        "jobs": args.jobs,
    }


def _curve_section(f: forms.FactoredForm) -> dict:
    orders = lfunc.cover_orders(f.jcase)
    dims = curve.eigenspace_dims(f)
    return {
        "genus": {str(a): curve.genus(f, a) for a in orders},
        "components": {str(a): curve.geometric_components(f, a) for a in orders},
        "h1_dim": {str(a): curve.h1_dim(f, a) for a in orders},
        "chi_singular": {str(a): curve.chi_singular(f, a) for a in orders},
        "branch_correction": {str(a): curve.branch_correction(f, a) for a in orders},
        "eigenspace_dims": list(dims.dims),
    }


def _surface_section(f: forms.FactoredForm) -> dict:
    def one(g: forms.FactoredForm) -> dict:
        inv = dataclasses.asdict(surface.invariants(g))
        inv["fibers"] = [fb["symbol"] for fb in inv["fibers"]]
        return inv

    return {
        "f_side": one(f),
        "partner": one(f.complement()),
        "ns_perp_check": surface.ns_perp_check(f),
    }


def _taxonomy_section(f: forms.FactoredForm) -> dict:
    row = next(
        (r for r in taxonomy.catalog(f.jcase) if r.pattern == f.pattern), None
    )
    if row is not None:
        data = dataclasses.asdict(row)
        data["surface_class"] = row.surface_class.value
        data["in_catalog"] = True
        return data
    return {
        "pattern": list(f.pattern),
        "n": f.n,
        "k": f.k,
        "surface_class": taxonomy.classify_Xf(f.pattern).value,
        "in_catalog": False,
    }


def _polygon_json(poly: lfunc.NewtonPolygon) -> list[list[str]]:
    return [[str(slope), str(length)] for slope, length in poly.segments]


def run_pipeline(cfg: dict, with_verdict: bool) -> tuple[dict, Optional[lfunc.Verdict]]:
    jcase = forms.jcase_from_tag(cfg["jcase"])
    f = forms.form_from_roots(jcase, cfg["pattern"], cfg["roots"], p=cfg["p"])
    cache = count.CountCache(cfg["cache_dir"]) if cfg["cache_dir"] else None

    if with_verdict and not taxonomy.is_partner_rational(f):
        raise ValidationError(
            f"pattern {list(f.pattern)} has no rational partner; use zeta instead"
        )

    bundle = lfunc.zeta_bundle(
        f, cfg["p"], cache=cache, jobs=cfg["jobs"], i_max_override=cfg["i_max"]
    )
    verdict_obj = lfunc.verdict_from_bundle(bundle, strict=False) if with_verdict else None

    counts_section = {
        str(c.a): [[i, n] for i, n in s.counts]
        for c, s in zip(bundle.curves, bundle.series)
    }
    lf_section = {
        "covers": {str(c.a): list(lp.coeffs) for c, lp in zip(bundle.curves, bundle.lpolys)},
        "new_factor": list(bundle.new_factor.coeffs),
        "new_factor_degree": bundle.new_factor.degree,
        "newton_polygons": {
            str(c.a): _polygon_json(lfunc.newton_polygon(lp, cfg["p"]))
            for c, lp in zip(bundle.curves, bundle.lpolys)
        },
        "new_factor_polygon": _polygon_json(lfunc.newton_polygon(bundle.new_factor, cfg["p"])),
    }

    verdict_section = None
    if verdict_obj is not None:
        verdict_section = {
            "theorem_applicable": verdict_obj.theorem_applicable,
            "curve_new_factor_pure": verdict_obj.curve_new_factor_pure,
            "e_supersingular": verdict_obj.e_supersingular,
            "e_trace": verdict_obj.e_trace,
            "surface_artin_supersingular": verdict_obj.surface_artin_supersingular,
        }

    report = {
        "config": cfg,
        "taxonomy": _taxonomy_section(f),
        "curve": _curve_section(f),
        "surface": _surface_section(f),
        "counts": counts_section,
        "lfunctions": lf_section,
        "verdict": verdict_section,
        "meta": {"tool_version": TOOL_VERSION, "form_key": f.key()},
    }
    return report, verdict_obj


def _report_text(report: dict) -> str:
    out = []
    cfg = report["config"]
    out.append(f"{cfg['command']} jcase={cfg['jcase']} p={cfg['p']} "
               f"pattern={','.join(str(m) for m in cfg['pattern'])} "
               f"roots={','.join(cfg['roots'])}")
    tax = report["taxonomy"]
    out.append(f"surface class: {tax['surface_class']}; n={tax['n']} k={tax['k']}")
    cur = report["curve"]
    out.append(f"cover genera: " + " ".join(f"a={a}:{g}" for a, g in sorted(cur["genus"].items())))
    out.append(f"eigenspace dims: {cur['eigenspace_dims']}")
    srf = report["surface"]["f_side"]
    out.append(f"e={srf['euler']} p_g={srf['p_g']} h11={srf['h11']} "
               f"MW rank (char 0)={srf['mw_rank_char0']}; "
               f"partner MW rank={report['surface']['partner']['mw_rank_char0']}")
    for a, rows in sorted(report["counts"].items()):
        out.append(f"counts a={a}: " + " ".join(f"N(p^{i})={n}" for i, n in rows))
    lf = report["lfunctions"]
    for a, coeffs in sorted(lf["covers"].items()):
        out.append(f"L a={a}: {coeffs}")
    out.append(f"new factor (deg {lf['new_factor_degree']}): {lf['new_factor']}")
    out.append("new factor Newton polygon: "
               + (" ".join(f"slope {s} x{l}" for s, l in lf["new_factor_polygon"]) or "(empty)"))
    if report["verdict"] is not None:
        v = report["verdict"]
        out.append(
            f"verdict: applicable={v['theorem_applicable']} "
            f"pure_half={v['curve_new_factor_pure']} "
            f"E_trace={v['e_trace']} "
            f"supersingular={v['surface_artin_supersingular']}"
        )
    return "\n".join(out) + "\n"


def cmd_run(args, command: str) -> int:
    cfg = _parse_run_config(args, command)
    started = time.perf_counter()
    report, verdict_obj = run_pipeline(cfg, with_verdict=command in ("verify", "report"))
    elapsed_ms = int(1000 * (time.perf_counter() - started))
    if args.format == "json":
        sys.stdout.write(render_json(report))
    elif args.format == "csv":
        sys.stdout.write(render_csv(report))
    else:
        sys.stdout.write(_report_text(report))
    print(f"# elapsed_ms={elapsed_ms}", file=sys.stderr)
    if command == "verify" and verdict_obj is not None:
        if verdict_obj.theorem_applicable and not verdict_obj.surface_artin_supersingular:
            print("FAILURE: applicable verdict came out false", file=sys.stderr)
            return 2
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "catalog":
            return cmd_catalog(args)
        return cmd_run(args, args.command)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FalsifiedClaimError as exc:
        print(f"FAILURE: {exc}", file=sys.stderr)
        return 2
    except InvariantViolation as exc:
        print(f"HARD FAILURE: {exc}", file=sys.stderr)
        return 2


def entry() -> None:  # console-script hook
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    entry()
