"""Command line front end.

``schottky <command> --config FILE [--depth N] [--budget K] [--out PATH]
[--format json|csv|svg]``.  Exit codes: 0 ok, 2 validation failure or other
domain error, 3 budget exceeded, 4 I/O, parse or schema error.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys

import numpy as np

from . import __version__, construct, orbit, qcmod
from .config import CircleSystem, FamilySpec, accumulation_points, check_star, handlebody_summary, validate
from .document import ConfigDocument, dumps, encode_system, load_config, recipe_from, write_atomic
from .errors import BudgetExceeded, IoError, ParseError, SchemaError, SchottkyError
from .moebius import INF
from .render import render_svg

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_BUDGET = 3
EXIT_IO = 4


def _point(z):
    return "inf" if z is INF else [float(z.real) + 0.0, float(z.imag) + 0.0]


def _circle(c):
    return {"cx": c.center.real + 0.0, "cy": c.center.imag + 0.0, "r": c.radius}


def _csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([format(r[c], ".17g") if isinstance(r[c], float) else r[c] for c in columns])
    return buf.getvalue()


PROFILE_COLUMNS = ["depth", "count", "max_diam", "mean_diam"]


# --------------------------------------------------------------------- commands


def _doc(args) -> ConfigDocument:
    doc = load_config(args.config) if args.config else ConfigDocument()
    for key in ("depth", "budget", "workers", "seed", "trials", "samples"):
        v = getattr(args, key, None)
        if v is not None:
            doc.options[key] = v
    return doc


def _need_config(args):
    if not args.config:
        raise SchemaError("this command needs --config", "config")


def _resolved(args, doc: ConfigDocument) -> dict:
    # thread count and kernel backend never change results, so they stay out
    # of the report and serial and parallel runs produce identical bytes
    opts = {k: v for k, v in doc.options.items() if k != "workers"}
    opts["format"] = args.format
    opts["config"] = args.config
    return opts


def _report(command: str, args, doc, result) -> dict:
    return {"version": 1, "command": command, "options": _resolved(args, doc), "result": result}


def cmd_validate(args, doc):
    _need_config(args)
    obj = doc.build()
    sys_ = obj.materialize() if isinstance(obj, FamilySpec) else doc.system()
    rep = validate(sys_)
    result = rep.to_dict()
    if isinstance(obj, FamilySpec) and obj.is_infinite:
        star = check_star(obj, max(1, obj.radius))
        result["star"] = star.to_dict()
        result["truncation_limited"] = True
    ok = rep.admissible and result.get("star", {}).get("passed", True)
    return _report("validate", args, doc, result), ok


def cmd_orbit(args, doc):
    _need_config(args)
    s = doc.system()
    o = doc.options
    D = max(o["depth"], 1)
    prof = orbit.diameter_profile(s, D, o["threshold"], o["budget"], o["workers"])
    if args.format == "csv":
        return _csv(prof.rows(), PROFILE_COLUMNS), True
    tcs = orbit.translated_circles(s, o["depth"], o["budget"], o["workers"])
    chains = orbit.maximal_chains(s, D, o["budget"], o["workers"])
    result = {
        "translated": [
            {"word": list(t.word.signed()), "base": [t.base[0], t.base[1]], "depth": t.depth, "circle": _circle(t.circle)}
            for t in tcs
        ],
        "chains": [
            {
                "word": list(c.circles[-1].edge_word.signed()),
                "diameters": [float(x) for x in c.diameters()],
                "nested": c.is_nested(),
            }
            for c in chains
        ],
        "profile": prof.to_dict(),
    }
    return _report("orbit", args, doc, result), True


def cmd_census(args, doc):
    _need_config(args)
    s = doc.system()
    o = doc.options
    M = args.threshold if args.threshold is not None else o["census_threshold"]
    doc.options["census_threshold"] = M
    c = orbit.census_large(s, o["depth"], M, o["budget"], o["workers"])
    if args.format == "csv":
        return _csv(c.rows(), PROFILE_COLUMNS), True
    return _report("census", args, doc, c.to_dict()), True


def cmd_limitset(args, doc):
    _need_config(args)
    s = doc.system()
    o = doc.options
    D = max(o["depth"], 1)
    pts = orbit.limit_set_sample(s, D, o["budget"], o["workers"])
    if args.format == "svg":
        return render_svg(s, limit=pts, accumulation=_accumulation(doc)), True
    if args.format == "csv":
        rows = [{"x": p.real + 0.0, "y": p.imag + 0.0} for p in pts if p is not INF]
        return _csv(rows, ["x", "y"]), True
    return _report("limitset", args, doc, {"depth": D, "points": [_point(p) for p in pts]}), True


def _accumulation(doc) -> list:
    if doc.source in ("family", "ends"):
        return accumulation_points(doc.build())
    return []


def cmd_render(args, doc):
    _need_config(args)
    s = doc.system()
    o = doc.options
    d = o["depth"]
    tcs = orbit.translated_circles(s, d, o["budget"], o["workers"]) if d >= 1 else []
    pts = orbit.limit_set_sample(s, d, o["budget"], o["workers"]) if d >= 1 else []
    return render_svg(s, tcs, pts, _accumulation(doc)), True


def cmd_summary(args, doc):
    _need_config(args)
    obj = doc.build()
    target = obj if isinstance(obj, (FamilySpec, CircleSystem)) else obj.sys
    summ = handlebody_summary(target)
    result = summ.to_dict()
    result["accumulation"] = [_point(p) for p in summ.accumulation]
    return _report("summary", args, doc, result), True


def cmd_construct(args, doc):
    kind = args.kind
    section = {"ends": "ends", "counterexample": "counterexample", "fatset": "fatset"}[kind]
    d = doc.section(section)
    if kind == "ends":
        for k in ("N", "margin"):
            if getattr(args, k, None) is not None:
                d[k] = getattr(args, k)
        spec = construct.EndSetSpec(tuple(d["points"]), d["cantor_depth"], d["handles"])
        fam = construct.realize_end_space(spec, d["N"], d["margin"])
        s = fam.materialize()
        rep = validate(s)
        result = {
            "parameters": d,
            "families": len(fam.families),
            "tails": len(fam.tails),
            "pairs": len(s),
            "accumulation": [_point(p) for p in accumulation_points(fam)],
            "outer_layer_distance": construct.outer_layer_distance(fam, d["N"]),
            "metadata": fam.metadata,
            "validation": rep.to_dict(),
            "star": check_star(fam, d["N"]).to_dict(),
            "system": encode_system(s),
        }
        ok = rep.admissible
    elif kind == "counterexample":
        res = construct.build_nested_counterexample(recipe_from(d))
        rep = validate(res.sys)
        result = {
            "parameters": d,
            "chain_radii": [float(x) for x in res.chain.radii],
            "chain_nested": res.chain.is_nested(),
            "limit_radius_lower_bound": res.limit_radius_lower_bound,
            "limit_diameter": res.limit_diameter,
            "metadata": res.metadata,
            "validation": rep.to_dict(),
            "system": encode_system(res.sys),
        }
        ok = rep.admissible
    else:
        if args.n is not None:
            d["n"] = args.n
        if args.delta is not None:
            d["delta"] = args.delta
        s = construct.build_fat_limit_set(d["n"], d["delta"])
        rep = validate(s)
        result = {
            "parameters": d,
            "radius": s.pairs[0].c.radius,
            "validation": rep.to_dict(),
            "system": encode_system(s),
        }
        ok = rep.admissible
    return _report(f"construct {kind}", args, doc, result), ok


def cmd_qc(args, doc):
    what = args.what
    if what == "mu":
        if args.m is not None:
            result = {"m": args.m, "mu_inv": qcmod.mu_inv(args.m)}
        else:
            r = 1.0 / math.sqrt(2.0) if args.r is None else args.r
            result = {"r": r, "mu": qcmod.mu(r)}
        return _report("qc mu", args, doc, result), True
    if what == "bound":
        o = doc.options
        rng = np.random.default_rng(o["seed"])
        worst = 0.0
        violations = 0
        for _ in range(o["trials"]):
            f, a1, a2 = qcmod.random_annulus_instance(rng)
            rep = qcmod.check_derivative_bound(f, a1, a2, o["samples"])
            worst = max(worst, rep.max_derivative / rep.bound)
            violations += not rep.passed
        result = {"trials": o["trials"], "seed": o["seed"], "violations": violations, "max_ratio_to_bound": worst}
        return _report("qc bound", args, doc, result), violations == 0
    amp = 0.5 if args.amplitude is None else args.amplitude
    radius = math.e if args.radius is None else args.radius
    grid = (args.grid, args.grid)
    rep = qcmod.collar_interpolation(qcmod.BoundaryProfile.cosine(amp), radius, grid)
    if args.format == "csv":
        return _csv(rep.rows(), ["t", "theta", "abs_mu"]), True
    result = rep.to_dict()
    result["amplitude"] = amp
    return _report("qc collar", args, doc, result), rep.max_abs_mu < 1.0


COMMANDS = {
    "validate": cmd_validate,
    "orbit": cmd_orbit,
    "census": cmd_census,
    "limitset": cmd_limitset,
    "render": cmd_render,
    "summary": cmd_summary,
    "construct": cmd_construct,
    "qc": cmd_qc,
}


# ----------------------------------------------------------------------- parser


def _common(p: argparse.ArgumentParser, fmt: str = "json", formats=("json", "csv", "svg")):
    p.add_argument("--config", help="JSON configuration document")
    p.add_argument("--depth", type=int, help="tree depth (overrides options.depth)")
    p.add_argument("--budget", type=int, help="maximum number of circles or words")
    p.add_argument("--workers", type=int, help="threads for per-subtree work")
    p.add_argument("--seed", type=int, help="random seed for property runs")
    p.add_argument("--out", help="output file (written atomically); default stdout")
    p.add_argument("--format", choices=formats, default=fmt)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="schottky", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("validate", help="check admissibility"), formats=("json",))
    _common(sub.add_parser("orbit", help="translated circles, chains, diameter profile"), formats=("json", "csv"))
    p = sub.add_parser("census", help="count large translated circles per depth")
    _common(p, formats=("json", "csv"))
    p.add_argument("--threshold", type=float, help="diameter threshold M")
    _common(sub.add_parser("limitset", help="limit set sample"))
    _common(sub.add_parser("render", help="SVG drawing"), fmt="svg", formats=("svg",))
    _common(sub.add_parser("summary", help="handlebody genus and ends"), formats=("json",))
    p = sub.add_parser("construct", help="build a named configuration")
    p.add_argument("kind", choices=("ends", "counterexample", "fatset"))
    _common(p, formats=("json",))
    p.add_argument("--N", type=int, help="truncation radius (ends)")
    p.add_argument("--margin", type=float, help="gap to radius margin (ends)")
    p.add_argument("--n", type=int, help="number of pairs (fatset)")
    p.add_argument("--delta", type=float, help="plane distance lower bound (fatset)")
    p = sub.add_parser("qc", help="quasiconformal toolkit")
    p.add_argument("what", choices=("mu", "bound", "collar"))
    _common(p, formats=("json", "csv"))
    p.add_argument("--r", type=float, help="slit length for mu")
    p.add_argument("--m", type=float, help="modulus for mu_inv")
    p.add_argument("--trials", type=int, help="random instances (bound)")
    p.add_argument("--samples", type=int, help="core samples per instance (bound)")
    p.add_argument("--amplitude", type=float, help="profile amplitude (collar)")
    p.add_argument("--radius", type=float, help="outer collar radius (collar)")
    p.add_argument("--grid", type=int, default=64, help="grid size per axis (collar)")
    return ap


def _emit(text: str, out):
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, BudgetExceeded):
        return EXIT_BUDGET
    if isinstance(exc, (IoError, ParseError, SchemaError, OSError)):
        return EXIT_IO
    return EXIT_INVALID


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        doc = _doc(args)
        payload, ok = COMMANDS[args.command](args, doc)
        text = payload if isinstance(payload, str) else dumps(payload) + "\n"
        _emit(text, args.out)
    except (SchottkyError, ValueError, OSError) as exc:
        kind = getattr(exc, "kind", type(exc).__name__)
        print(f"error: {kind}: {exc}", file=sys.stderr)
        return _exit_code(exc)
    if not ok:
        print(f"error: ValidationFailed: {args.command} reported a negative verdict", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
