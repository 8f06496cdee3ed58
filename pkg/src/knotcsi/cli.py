"""Command-line surface: invariants, diagram combinatorics, integrals, skein sums.

Subcommands
    invariant   lk | writhe | v2 | type-k    on a curve spec
    diagrams    enumerate | dims | coboundary | verify-complex | dump-matrix
    integrate   an arbitrary degree-0 diagram on a curve
    skein       alternating sums over the resolutions of a singular knot

Curves are given as `builtin:<name>`, a path to a CurveSpec JSON document, or
inline JSON.  All randomness flows through --seed; omitting it draws a random
seed that is echoed in the report.  Reports are JSON by default (csv and text
also available) and contain no timestamps, so identical inputs give
byte-identical reports.  Completed invariant/integrate/skein runs are cached
under --cache-dir (or $KNOTCSI_CACHE_DIR, default ~/.cache/knotcsi); a cache
hit differs from a cold run only in its "cached" field.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import secrets
import sys
from fractions import Fraction
from pathlib import Path

from . import algebra, diagrams, exact, geometry, integrator


class CliError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# inputs


def parse_curve_spec(text):
    """builtin:<name>, a JSON document, or a path to one -> geometry object."""
    if text.startswith("builtin:"):
        doc = {"kind": "builtin", "name": text.split(":", 1)[1]}
    elif text.lstrip().startswith("{"):
        doc = json.loads(text)
    else:
        path = Path(text)
        if not path.exists():
            raise CliError(f"curve spec file not found: {text}")
        doc = json.loads(path.read_text())
    obj = geometry.from_spec(doc)
    if isinstance(obj, (geometry.LongLink2, geometry.LongCurve)):
        sep = geometry.min_separation(obj)
        if sep <= 1e-9:
            raise CliError(f"embedding validation failed: separation {sep}")
    return obj, doc


def curve_digest(doc) -> str:
    return hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest()[:16]


def load_weight_system(path) -> algebra.WeightSystem:
    """Weight-system file: {"degree": k, "family": ..., "values":
    {"<diagram encoding>": "rational", ...}}.  The vanishing constraints are
    re-verified before use; unsound inputs are refused."""
    doc = json.loads(Path(path).read_text())
    k = int(doc["degree"])
    family = doc.get("family", "trivalent")
    values = {}
    for enc, val in doc["values"].items():
        d = diagrams.parse(enc)
        c, s = diagrams.canonical_form(d)
        values[c] = values.get(c, Fraction(0)) + s * Fraction(val)
    ws = algebra.WeightSystem(k, family, {d: v for d, v in values.items() if v})
    kinds = ("1T", "STU", "IHX") if family == "trivalent" else ("1T", "4T")
    for kind in kinds:
        for g in algebra.relation_generators(kind, k, family=family).generators:
            if ws(g):
                raise CliError(f"weight system violates a {kind} relation at degree {k}")
    return ws


# ---------------------------------------------------------------------------
# reports and cache


def _cache_dir(arg):
    if arg:
        return Path(arg)
    env = os.environ.get("KNOTCSI_CACHE_DIR")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "knotcsi"


def _with_cache(args, key_payload, compute):
    cdir = _cache_dir(args.cache_dir)
    key = hashlib.sha256(json.dumps(key_payload, sort_keys=True).encode()).hexdigest()
    path = cdir / f"{key}.json"
    if path.exists():
        report = json.loads(path.read_text())
        report["cached"] = True
        return report
    report = compute()
    report["cached"] = False
    cdir.mkdir(parents=True, exist_ok=True)
    stored = dict(report)
    stored.pop("cached", None)
    path.write_text(json.dumps(stored, sort_keys=True))
    return report


def emit(report, fmt, out=None):
    if fmt == "json":
        text = json.dumps(report, sort_keys=True, indent=2)
    elif fmt == "csv":
        if "rows" in report:
            header = list(report["rows"][0].keys()) if report["rows"] else ["empty"]
            lines = [",".join(header)]
            for row in report["rows"]:
                lines.append(",".join(str(row[h]) for h in header))
            text = "\n".join(lines)
        else:
            keys = [k for k in ("operation", "value", "stderr", "n_effective",
                                "seed", "cached") if k in report]
            text = ",".join(keys) + "\n" + ",".join(str(report[k]) for k in keys)
    elif fmt == "text":
        text = "\n".join(f"{k}: {v}" for k, v in sorted(report.items()))
    else:
        raise CliError(f"unknown format {fmt!r}")
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _mc_params(args):
    kw = dict(n_samples=args.samples, seed=args.seed, workers=args.workers)
    if args.L is not None:
        kw["L"] = args.L
    if getattr(args, "rng", None):
        kw["rng"] = args.rng
    return integrator.MCParams(**kw)


def _resolve_seed(args):
    if args.seed is None:
        args.seed = secrets.randbits(32)
        args.seed_was_random = True
    else:
        args.seed_was_random = False


def _estimate_report(op, doc, est, args):
    rep = est.report()
    rep.update({
        "operation": op,
        "curve_spec_digest": curve_digest(doc),
        "N": args.samples,
        "seed_was_random": args.seed_was_random,
    })
    rep.setdefault("L", None)
    return rep


def _plain_curve(obj):
    if isinstance(obj, geometry.SingularLongKnot):
        raise CliError("this invariant needs an embedded curve, not a singular knot")
    if isinstance(obj, geometry.LongLink2):
        raise CliError("this invariant needs a single curve, not a link")
    return obj


# ---------------------------------------------------------------------------
# subcommands


def cmd_invariant(args):
    _resolve_seed(args)
    obj, doc = parse_curve_spec(args.curve)
    params = _mc_params(args)
    weights_digest = None
    if getattr(args, "weights", None):
        weights_digest = hashlib.sha256(Path(args.weights).read_bytes()).hexdigest()[:16]
    payload = {"op": f"invariant:{args.kind}", "curve": doc, "seed": args.seed,
               "n": args.samples, "L": args.L, "k": args.k, "weights": weights_digest}

    def compute():
        if args.kind == "lk":
            if not isinstance(obj, geometry.LongLink2):
                raise CliError("lk needs a two-component link")
            est = integrator.linking_number(obj, params)
        elif args.kind == "writhe":
            est = integrator.self_linking_A(_plain_curve(obj), params)
        elif args.kind == "v2":
            est = integrator.casson_v2(_plain_curve(obj), params)
        elif args.kind == "type-k":
            ws = load_weight_system(args.weights) if args.weights \
                else algebra.casson_weight_system()
            est = integrator.type_k_invariant(ws, _plain_curve(obj), params)
        else:
            raise CliError(f"unknown invariant {args.kind!r}")
        return _estimate_report(f"invariant:{args.kind}", doc, est, args)

    # validate weight-system files before consulting the cache
    if args.kind == "type-k" and args.weights:
        load_weight_system(args.weights)
    report = _with_cache(args, payload, compute)
    emit(report, args.format, args.out)
    return 0


def cmd_integrate(args):
    _resolve_seed(args)
    obj, doc = parse_curve_spec(args.curve)
    d = diagrams.parse(args.diagram)
    bad = diagrams.validate(d)
    if bad:
        raise CliError("invalid diagram: " + "; ".join(bad))
    if diagrams.degree(d) != 0:
        raise CliError(
            f"only degree-0 diagrams are numerically integrable on a fixed curve; "
            f"form degree 2*(#connections) - 3q - p = {diagrams.degree(d)}")
    params = _mc_params(args)
    payload = {"op": "integrate", "curve": doc, "diagram": diagrams.encode(d),
               "seed": args.seed, "n": args.samples, "L": args.L}

    def compute():
        est = integrator.integrate_diagram(d, _plain_curve(obj), params)
        rep = _estimate_report("integrate", doc, est, args)
        rep["diagram"] = diagrams.encode(d)
        return rep

    report = _with_cache(args, payload, compute)
    emit(report, args.format, args.out)
    return 0


def cmd_skein(args):
    _resolve_seed(args)
    obj, doc = parse_curve_spec(args.curve)
    if not isinstance(obj, geometry.SingularLongKnot):
        raise CliError("skein needs a singular knot spec")
    params = _mc_params(args)
    payload = {"op": f"skein:{args.invariant}", "curve": doc, "seed": args.seed,
               "n": args.samples, "L": args.L, "eps": args.epsilon}

    def compute():
        if args.invariant == "v2":
            inv = integrator.casson_v2
        else:
            inv = integrator.self_linking_A
        est = integrator.skein_alternating_sum(obj, inv, eps=args.epsilon, params=params)
        return _estimate_report(f"skein:{args.invariant}", doc, est, args)

    report = _with_cache(args, payload, compute)
    emit(report, args.format, args.out)
    return 0


def cmd_diagrams(args):
    if args.action == "enumerate":
        out = diagrams.enumerate_diagrams(
            args.degree, args.parity, max_vertices=args.max_vertices,
            trivalent_only=args.trivalent)
        report = {"operation": "diagrams:enumerate", "count": len(out),
                  "rows": [{"diagram": diagrams.encode(d)} for d in out]}
        emit(report, "json" if args.format == "csv" else args.format, args.out)
        return 0
    if args.action == "dims":
        ks = [args.k] if args.k is not None else ([1, 2, 3, 4] if args.family == "chord" else [1, 2, 3])
        rows = [algebra.dims_row(args.family, k) for k in ks]
        if args.format == "csv" or args.out:
            import io

            buf = io.StringIO()
            algebra.write_dims_csv(rows, buf)
            text = buf.getvalue().rstrip("\n")
            if args.out:
                Path(args.out).write_text(text + "\n")
            else:
                print(text)
        else:
            emit({"operation": "diagrams:dims", "rows": rows}, args.format)
        return 0
    if args.action == "coboundary":
        if not args.diagram:
            raise CliError("coboundary needs --diagram")
        d = diagrams.parse(args.diagram)
        bad = diagrams.validate(d)
        if bad:
            raise CliError("invalid diagram: " + "; ".join(bad))
        db = algebra.coboundary(d)
        rows = [{"coefficient": str(c), "diagram": diagrams.encode(t)}
                for t, c in sorted(db.terms.items(), key=lambda kv: diagrams.encode(kv[0]))]
        emit({"operation": "diagrams:coboundary", "input": diagrams.encode(d),
              "rows": rows}, args.format, args.out)
        return 0
    if args.action == "verify-complex":
        ok = True
        details = []
        parity = "odd" if args.n % 2 else "even"
        for deg in range(0, args.max_degree + 1):
            lo = algebra.complex_slice(args.n, deg, args.max_vertices, parity=parity)
            hi = algebra.complex_slice(args.n, deg + 1, args.max_vertices, parity=parity)
            good = algebra.compose_is_zero(lo, hi)
            ok &= good
            details.append({"degree": deg, "basis": len(lo.basis),
                            "targets": len(lo.target_basis), "dd_zero": good})
        print(f"δ²=0: {'PASS' if ok else 'FAIL'} "
              f"(n={args.n}, degrees 0..{args.max_degree}, ≤{args.max_vertices} vertices)")
        if args.out:
            emit({"operation": "diagrams:verify-complex", "pass": ok, "rows": details},
                 "json", args.out)
        return 0 if ok else 1
    if args.action == "dump-matrix":
        parity = "odd" if args.n % 2 else "even"
        sl = algebra.complex_slice(args.n, args.degree, args.max_vertices, parity=parity)
        target = args.out or "matrix.txt"
        exact.dump_triplets(sl.matrix, len(sl.basis), target)
        print(f"wrote {len(sl.target_basis)} x {len(sl.basis)} boundary matrix to {target}")
        return 0
    raise CliError(f"unknown diagrams action {args.action!r}")


# ---------------------------------------------------------------------------
# parser


def _add_sampling(p):
    p.add_argument("--seed", type=int, default=None,
                   help="RNG seed; omitted = random, echoed in the report")
    p.add_argument("--samples", type=int, default=2_000_000, help="total sample budget")
    p.add_argument("--workers", type=int, default=1,
                   help="worker threads (results are bit-identical for any count)")
    p.add_argument("--L", type=float, default=None,
                   help="time box half-width (default 4*(support radius + 1))")
    p.add_argument("--rng", choices=("qmc", "mc"), default="qmc", help="sampler family")


def _add_io(p):
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")
    p.add_argument("--out", default=None, help="write the report to a file")
    p.add_argument("--cache-dir", default=None,
                   help="result cache directory (default $KNOTCSI_CACHE_DIR or ~/.cache/knotcsi)")


def build_parser():
    ap = argparse.ArgumentParser(prog="knotcsi",
                                 description="Configuration space integrals for long knots")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("invariant", help="linking number, writhe, v2, or type-k sums")
    p.add_argument("kind", choices=("lk", "writhe", "v2", "type-k"))
    p.add_argument("--curve", required=True, help="builtin:<name>, JSON file, or inline JSON")
    p.add_argument("--k", type=int, default=2, help="degree for type-k")
    p.add_argument("--weights", default=None, help="weight-system JSON file for type-k")
    _add_sampling(p)
    _add_io(p)
    p.set_defaults(func=cmd_invariant)

    p = sub.add_parser("integrate", help="integrate one degree-0 diagram on a curve")
    p.add_argument("--diagram", required=True, help="diagram text encoding")
    p.add_argument("--curve", required=True)
    _add_sampling(p)
    _add_io(p)
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("skein", help="alternating sums over singular-knot resolutions")
    p.add_argument("--curve", required=True, help="a singular builtin, e.g. builtin:singular_x3")
    p.add_argument("--invariant", default="v2", choices=("v2", "writhe"))
    p.add_argument("--epsilon", type=float, default=0.3, help="resolution displacement")
    _add_sampling(p)
    _add_io(p)
    p.set_defaults(func=cmd_skein)

    p = sub.add_parser("diagrams", help="diagram combinatorics")
    p.add_argument("action", choices=("enumerate", "dims", "coboundary",
                                      "verify-complex", "dump-matrix"))
    p.add_argument("--degree", type=int, default=0)
    p.add_argument("--parity", choices=("odd", "even"), default="odd")
    p.add_argument("--max-vertices", type=int, default=6)
    p.add_argument("--trivalent", action="store_true")
    p.add_argument("--family", choices=("chord", "trivalent"), default="chord")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--diagram", default=None)
    p.add_argument("--n", type=int, default=3, help="ambient dimension (fixes the parity)")
    p.add_argument("--max-degree", type=int, default=1)
    _add_io(p)
    p.set_defaults(func=cmd_diagrams)

    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, diagrams.DiagramError, geometry.GeometryError,
            integrator.IntegratorError, algebra.DimensionMismatchError,
            json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
