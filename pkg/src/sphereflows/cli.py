"""Command-line front end.

Every subcommand prints one JSON document (schema ``sphere-flows/1``) to
stdout or to ``--output``.  Exit codes: 0 success, 1 usage error, 2 analysis
failure, 3 verification failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import __version__
from .analysis import AnalysisError, analyze, trace_all
from .combinat import (
    BudgetExceeded,
    count_nc_trees,
    count_planar_trees,
    enumerate_nc_trees,
    enumerate_planar_trees,
    nc_from_code,
)
from .field import FieldError, RationalField, build_field, classify, field_from_json
from .flow import IntegratorConfig
from .io import document, dumps
from .nondeg import NondegConfig, check_nondegeneracy
from .poly import ComplexPoly, find_roots
from .portrait import graph_from_code
from .realize import (
    RealizationError,
    realize_antipolynomial,
    realize_polynomial,
    realize_rational,
)
from .render import RenderSpec, render_svg

EXIT_OK, EXIT_USAGE, EXIT_ANALYSIS, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# inputs


def _complex_list(data) -> list[complex]:
    return [complex(x[0], x[1]) if isinstance(x, (list, tuple)) else complex(x) for x in data]


def load_field(source: str) -> RationalField:
    """Field from inline JSON, a file path, or ``-`` for stdin.

    Accepted forms: ``{"zeros": [[re, im], ...], "poles": [...], "a": [re, im]}``
    or ``{"P": [...], "Q": [...]}`` with coefficients in ascending degree
    (repeated roots allowed in ``P`` when ``Q`` is absent).
    """
    if source == "-":
        text = sys.stdin.read()
    elif source.lstrip().startswith("{"):
        text = source
    else:
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read field file {source!r}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed field JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("field JSON must be an object")
    data = data.get("field", data)
    try:
        if "P" in data:
            P = ComplexPoly(_complex_list(data["P"]))
            if "Q" not in data:
                return RationalField(P.leading, tuple(find_roots(P).expanded()), (), "polynomial")
            Q = ComplexPoly(_complex_list(data["Q"]))
            return build_field(find_roots(P).expanded(), find_roots(Q).expanded(), P.leading / Q.leading)
        return field_from_json(data)
    except (FieldError, KeyError, TypeError, IndexError) as exc:
        raise UsageError(f"invalid field: {exc}") from exc


def _override(obj, values: dict, what: str):
    names = {f.name for f in dataclasses.fields(obj)}
    unknown = set(values) - names
    if unknown:
        raise UsageError(f"unknown {what} option(s): {sorted(unknown)}")
    if "chart_switch" in values:
        values = dict(values, chart_switch=tuple(values["chart_switch"]))
    return dataclasses.replace(obj, **values)


def load_config(path: str | None) -> dict:
    """``{"integrator": {...}, "nondeg": {...}, "render": {...}}`` overrides."""
    cfg = {"integrator": IntegratorConfig(), "nondeg": NondegConfig(), "render": RenderSpec()}
    if not path:
        return cfg
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from exc
    unknown = set(data) - set(cfg)
    if unknown:
        raise UsageError(f"unknown config section(s): {sorted(unknown)}")
    for key, values in data.items():
        cfg[key] = _override(cfg[key], values, key)
    return cfg


def _emit(args, doc: dict) -> None:
    text = dumps(doc)
    out = getattr(args, "output", None)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands


def cmd_analyze(args, cfg) -> int:
    fld = load_field(args.field)
    try:
        res = analyze(fld, cfg["integrator"], cfg["nondeg"])
    except AnalysisError as exc:
        _emit(args, document("analysis", {"field": fld.to_json(), "error": {"stage": exc.stage, "message": exc.message}}))
        return EXIT_ANALYSIS
    _emit(args, document("analysis", res.to_json(samples=args.samples)))
    if args.render:
        Path(args.render).write_text(render_svg(res, cfg["render"]))
    return EXIT_OK


def cmd_classify(args, cfg) -> int:
    fld = load_field(args.field)
    _emit(args, document("classification", {"field": fld.to_json(), "equilibria": [r.to_json() for r in classify(fld)]}))
    return EXIT_OK


def cmd_trace(args, cfg) -> int:
    fld = load_field(args.field)
    try:
        seps = trace_all(fld, cfg["integrator"])
    except Exception as exc:
        _emit(args, document("separatrices", {"field": fld.to_json(), "error": {"stage": "trace", "message": str(exc)}}))
        return EXIT_ANALYSIS
    if args.pole:
        seps = [s for s in seps if s.owner == args.pole]
    _emit(args, document("separatrices", {"field": fld.to_json(), "separatrices": [s.to_json() for s in seps]}))
    return EXIT_OK


def cmd_portrait(args, cfg) -> int:
    fld = load_field(args.field)
    try:
        res = analyze(fld, cfg["integrator"], cfg["nondeg"])
    except AnalysisError as exc:
        _emit(args, document("portrait", {"field": fld.to_json(), "error": {"stage": exc.stage, "message": exc.message}}))
        return EXIT_ANALYSIS
    full = res.to_json()
    _emit(args, document("portrait", {k: full[k] for k in ("field", "portraits", "duality", "codes")}))
    return EXIT_OK


def cmd_check_nondeg(args, cfg) -> int:
    fld = load_field(args.field)
    rep = check_nondegeneracy(fld, cfg["nondeg"])
    _emit(args, document("nondegeneracy", {"field": fld.to_json(), "report": rep.to_json()}))
    return EXIT_OK if rep.overall else EXIT_VERIFY


def cmd_render(args, cfg) -> int:
    fld = load_field(args.field)
    spec = cfg["render"]
    if args.charts:
        spec = dataclasses.replace(spec, view="charts")
    for name in ("size", "density", "radius"):
        if getattr(args, name) is not None:
            spec = dataclasses.replace(spec, **{name: getattr(args, name)})
    try:
        res = analyze(fld, cfg["integrator"], cfg["nondeg"], portraits=False)
    except AnalysisError as exc:
        print(f"analysis failed: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS
    svg = render_svg(res, spec)
    out = getattr(args, "output", None)
    if out:
        Path(out).write_text(svg)
    else:
        sys.stdout.write(svg)
    return EXIT_OK


_KINDS = ("planar-trees", "nc-trees")


def _catalog(kind: str, size: int, orientation: str) -> dict:
    if kind == "planar-trees":
        return enumerate_planar_trees(size, orientation)
    return enumerate_nc_trees(size, orientation)


def cmd_enumerate(args, cfg) -> int:
    orientation = args.orientation or ("preserve" if args.kind == "planar-trees" else "allow_reflection")
    cat = _catalog(args.kind, args.size, orientation)
    codes = sorted(cat)
    _emit(args, document("catalog", {"kind": args.kind, "size": args.size, "orientation": orientation, "count": len(codes), "codes": codes}))
    return EXIT_OK


def cmd_count(args, cfg) -> int:
    if args.kind == "planar-trees":
        n = count_planar_trees(args.size)
    else:
        # size is the vertex count, d' + 1
        n = count_nc_trees(args.size - 1)
    _emit(args, document("count", {"kind": args.kind, "size": args.size, "count": n}))
    return EXIT_OK


def _resolve_target(args):
    """Target from a canonical code or a catalog index (``--size`` required)."""
    text = args.target
    if text.isdigit():
        if args.size is None:
            raise UsageError("a catalog index needs --size")
        kind = "nc-trees" if args.mode == "antipolynomial" else "planar-trees"
        orientation = "preserve"
        if args.mode == "rational":
            raise UsageError("rational targets are given by the C+ code")
        codes = sorted(_catalog(kind, args.size, orientation))
        idx = int(text)
        if idx >= len(codes):
            raise UsageError(f"index {idx} out of range (catalog has {len(codes)} entries)")
        text = codes[idx]
    if args.mode == "antipolynomial":
        return nc_from_code(text)
    return graph_from_code(text)


def cmd_realize(args, cfg) -> int:
    try:
        target = _resolve_target(args)
    except (ValueError, KeyError, IndexError) as exc:
        raise UsageError(f"unknown target {args.target!r}: {exc}") from exc
    try:
        if args.mode == "polynomial":
            fld, plan = realize_polynomial(target)
        elif args.mode == "rational":
            cminus = graph_from_code(args.cminus) if args.cminus else None
            fld, plan = realize_rational(target, cminus)
        else:
            fld, plan = realize_antipolynomial(target)
    except RealizationError as exc:
        payload = {"mode": args.mode, "error": str(exc), "plan": exc.plan.to_json() if exc.plan else None}
        _emit(args, document("realization", payload))
        return EXIT_VERIFY
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit(args, document("realization", {"mode": args.mode, "plan": plan.to_json(), "verification": "pass"}))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    # accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="JSON file with integrator/nondeg/render overrides")
    common.add_argument("-o", "--output", default=argparse.SUPPRESS, help="write the result here instead of stdout")
    p = argparse.ArgumentParser(prog="sphereflows", description="Rational flows on the Riemann sphere.", parents=[common])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[common], **kw)

    sub.add_parser = add_parser

    def with_field(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("field", help="field JSON: a path, inline JSON, or - for stdin")
        sp.set_defaults(func=func)
        return sp

    sp = with_field("analyze", cmd_analyze, "full analysis")
    sp.add_argument("--render", metavar="SVG", help="also write a phase portrait")
    sp.add_argument("--samples", action="store_true", help="include separatrix samples")
    with_field("classify", cmd_classify, "equilibria and their types")
    sp = with_field("trace", cmd_trace, "separatrices with samples")
    sp.add_argument("--pole", help="only the separatrices owned by this saddle id")
    with_field("portrait", cmd_portrait, "portraits, duality and canonical codes")
    with_field("check-nondeg", cmd_check_nondeg, "nondegeneracy conditions; exit 3 when any fails")
    sp = with_field("render", cmd_render, "SVG phase portrait")
    sp.add_argument("--charts", action="store_true", help="draw charts w and z side by side")
    sp.add_argument("--size", type=int)
    sp.add_argument("--density", type=int)
    sp.add_argument("--radius", type=float)

    sp = sub.add_parser("realize", help="construct a field with a prescribed portrait")
    sp.add_argument("mode", choices=("polynomial", "rational", "antipolynomial"))
    sp.add_argument("target", help="canonical code (C+ for rational) or catalog index")
    sp.add_argument("--size", type=int, help="vertex count, for catalog indices")
    sp.add_argument("--cminus", help="C- code (rational; defaults to the dual of C+)")
    sp.set_defaults(func=cmd_realize)

    sp = sub.add_parser("enumerate", help="catalog of canonical codes")
    sp.add_argument("kind", choices=_KINDS)
    sp.add_argument("size", type=int, help="number of vertices")
    sp.add_argument("--orientation", choices=("preserve", "allow_reflection"))
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("count", help="closed-form counts")
    sp.add_argument("kind", choices=_KINDS)
    sp.add_argument("size", type=int, help="number of vertices")
    sp.set_defaults(func=cmd_count)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the message
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = load_config(getattr(args, "config", None))
        return args.func(args, cfg)
    except (UsageError, BudgetExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
