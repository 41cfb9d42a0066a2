"""``lattc`` command line: check files, print assumption reports, inspect lattices."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from lattc import lattice as lat
from lattc.conversion import DEFAULT_FUEL
from lattc.elaborate import ModuleResult, check_source
from lattc.errors import (
    ConfigError, LattcError, LatticeError, ParseError, TypeCheckError, UnknownName,
)
from lattc.kernel import GlobalEnv
from lattc.report import as_dict, assumptions, render

OK, FAILED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def load_lattice(path: str | None) -> lat.LatticeConfig:
    """--lattice, then $LATTC_LATTICE, then the embedded default."""
    path = path or os.environ.get("LATTC_LATTICE")
    if not path:
        return lat.default_config()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read lattice config {path}: {exc.strerror}") from None
    try:
        return lat.load_config(text)
    except (ParseError, ConfigError) as exc:
        raise UsageError(f"{path}: {exc.message}") from None


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _where(exc: LattcError, sources: dict) -> str:
    span = exc.span
    if span is None:
        return "<unknown>"
    text = sources.get(span.file)
    if text is None and Path(span.file).is_file():
        text = Path(span.file).read_text(encoding="utf-8")
    return span.location(text)


def _fmt_error(exc: LattcError, sources) -> str:
    return f"{_where(exc, sources)}: {exc.kind}: {exc.message}"


def _level_text(cfg, level) -> str:
    alias = cfg.alias_for(level)
    text = lat.format_level(level)
    return f"{text} ({alias})" if alias else text


def _check_file(path, cfg, env, args, sources) -> ModuleResult:
    text = _read(path)
    sources[path] = text
    return check_source(text, cfg, path, env, args.fuel, args.keep_going)


def _load_prelude(args, cfg, sources) -> GlobalEnv:
    env = GlobalEnv()
    if not args.prelude:
        return env
    result = _check_file(args.prelude, cfg, env, args, sources)
    if not result.ok:
        first = result.errors[0] if result.errors else None
        detail = _fmt_error(first, sources) if first else "assertion failure"
        raise TypeCheckError(f"prelude {args.prelude} does not check: {detail}")
    return result.env


# -- check -------------------------------------------------------------------------


def _file_json(path, result: ModuleResult, sources):
    decls, asserts = [], []
    for o in result.outcomes:
        if o.assertion is not None:
            a = o.assertion
            asserts.append({"name": a.name, "bound": sorted(a.bound), "level": sorted(a.level),
                            "ok": a.ok, "offending": sorted(a.offending)})
        elif o.error is None:
            decls.append({"name": o.name, "kind": o.kind, "level": sorted(o.level),
                          "report": as_dict(result.env.get(o.name).report)})
    errors = [{"kind": e.kind, "message": e.message, "location": _where(e, sources)}
              for e in result.errors]
    return {"file": path, "ok": result.ok, "declarations": decls,
            "assertions": asserts, "errors": errors}


def cmd_check(args) -> int:
    cfg = load_lattice(args.lattice)
    sources: dict[str, str] = {}
    status = OK
    records = []
    try:
        base = _load_prelude(args, cfg, sources)
    except TypeCheckError as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return FAILED
    for path in args.files:
        try:
            result = _check_file(path, cfg, base, args, sources)
        except (ParseError, LatticeError) as exc:
            print(_fmt_error(exc, sources), file=sys.stderr)
            status = USAGE
            if not args.keep_going:
                break
            continue
        except TypeCheckError as exc:  # resolution (scope) errors
            print(_fmt_error(exc, sources), file=sys.stderr)
            status = max(status, FAILED)
            if not args.keep_going:
                break
            continue
        if args.json:
            records.append(_file_json(path, result, sources))
        else:
            for o in result.outcomes:
                if o.assertion is not None:
                    print(f"{path}: {o.assertion}")
                elif o.error is None:
                    print(f"{path}: {o.name} :^{_level_text(cfg, o.level)}")
        for exc in result.errors:
            print(_fmt_error(exc, sources), file=sys.stderr)
        if not result.ok:
            status = max(status, FAILED)
            if not args.keep_going:
                break
    if args.json:
        print(json.dumps({"ok": status == OK, "files": records}, indent=2))
    return status


# -- assumptions -------------------------------------------------------------------


def cmd_assumptions(args) -> int:
    cfg = load_lattice(args.lattice)
    sources: dict[str, str] = {}
    args.keep_going = False
    base = _load_prelude(args, cfg, sources)
    result = _check_file(args.file, cfg, base, args, sources)
    try:
        report = assumptions(result.env, args.name)
    except UnknownName as exc:
        for err in result.errors:
            print(_fmt_error(err, sources), file=sys.stderr)
        print(f"error: {exc.message}", file=sys.stderr)
        return FAILED
    print(render(report, "json" if args.json else "text"))
    return OK


# -- lattice -----------------------------------------------------------------------


def _lattice_tables(cfg):
    levels = cfg.levels()
    pairs = [(a, b) for i, a in enumerate(levels) for b in levels[i:]]
    return levels, pairs


def cmd_lattice(args) -> int:
    if args.action == "init":
        text = lat.default_document()
        if args.output in (None, "-"):
            sys.stdout.write(text)
            return OK
        out = Path(args.output)
        if out.exists() and not args.force:
            raise UsageError(f"{out} exists; pass --force to overwrite")
        out.write_text(text, encoding="utf-8")
        print(f"wrote {out}")
        return OK

    path = args.lattice or os.environ.get("LATTC_LATTICE")
    text = _read(path) if path else lat.default_document()
    try:
        cfg = lat.from_document(json.loads(text))
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed lattice config: {exc}") from None
    except ParseError as exc:
        raise UsageError(exc.message) from None
    diags = cfg.validate()

    if args.action == "validate":
        if args.json:
            print(json.dumps({"ok": not diags, "diagnostics": [
                {"invariant": d.invariant, "ids": list(d.ids), "message": d.message} for d in diags]}))
        else:
            for d in diags:
                print(d)
            if not diags:
                print(f"ok: {len(cfg.levels())} legal levels")
        return FAILED if diags else OK

    if diags:
        for d in diags:
            print(d, file=sys.stderr)
        return FAILED
    levels, pairs = _lattice_tables(cfg)
    fmt = lat.format_level
    if args.json:
        print(json.dumps({
            "levels": [sorted(l) for l in levels],
            "aliases": {name: sorted(cfg.alias(name)) for name in sorted(cfg.aliases)},
            "meet": [[sorted(a), sorted(b), sorted(cfg.meet(a, b))] for a, b in pairs],
            "join": [[sorted(a), sorted(b), None if (j := cfg.join(a, b)) is None else sorted(j)]
                     for a, b in pairs],
        }))
    else:
        print(f"levels ({len(levels)}):")
        for level in levels:
            print(f"  {_level_text(cfg, level)}")
        print("meet:")
        for a, b in pairs:
            print(f"  meet({fmt(a)},{fmt(b)}) = {fmt(cfg.meet(a, b))}")
        print("join:")
        for a, b in pairs:
            j = cfg.join(a, b)
            print(f"  join({fmt(a)},{fmt(b)}) = {'undefined' if j is None else fmt(j)}")
    if args.figure:
        from lattc.figure import hasse_figure
        hasse_figure(cfg, args.figure)
        print(f"wrote {args.figure}", file=sys.stderr if args.json else sys.stdout)
    return OK


# -- entry point -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lattc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fuel=True):
        p.add_argument("--lattice", metavar="PATH",
                       help="lattice config (default: $LATTC_LATTICE or the built-in one)")
        if fuel:
            p.add_argument("--fuel", type=int, default=DEFAULT_FUEL,
                           help="reduction steps allowed per declaration")
            p.add_argument("--prelude", metavar="FILE", help="definitions checked before each file")
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("check", help="type check .ltc files")
    p.add_argument("files", nargs="+")
    p.add_argument("--keep-going", action="store_true", help="report every error, not just the first")
    common(p)
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("assumptions", help="print the assumption report of one definition")
    p.add_argument("file")
    p.add_argument("name")
    common(p)
    p.set_defaults(run=cmd_assumptions)

    p = sub.add_parser("lattice", help="show, validate or write a lattice config")
    p.add_argument("action", choices=["show", "validate", "init"])
    p.add_argument("output", nargs="?", help="init: file to write (default stdout)")
    p.add_argument("--force", action="store_true", help="init: overwrite an existing file")
    p.add_argument("--figure", metavar="PNG", help="show: also draw the Hasse diagram")
    common(p, fuel=False)
    p.set_defaults(run=cmd_lattice)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "fuel", 1) is not None and getattr(args, "fuel", 1) <= 0:
        parser.error("--fuel must be positive")
    try:
        return args.run(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except (ParseError, LatticeError) as exc:
        print(f"{_where(exc, {})}: {exc.kind}: {exc.message}", file=sys.stderr)
        return USAGE
    except TypeCheckError as exc:
        print(f"error: {exc.kind}: {exc.message}", file=sys.stderr)
        return FAILED


if __name__ == "__main__":
    sys.exit(main())
