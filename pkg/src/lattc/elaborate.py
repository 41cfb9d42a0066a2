"""Default annotations, level inference and the per-module driver."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from lattc import usage
from lattc.errors import LattcError, LevelJoinError, TypeCheckError, UnknownName
from lattc.kernel import GlobalEnv, check_declaration
from lattc.lattice import LatticeConfig, format_level as fmt
from lattc.syntax import terms as T
from lattc.syntax.parser import parse_module
from lattc.syntax.resolve import FORMERS, resolve
from lattc.syntax.surface import SDecl, SKeyword, SLam, SLevel, SModule, SPi, SSpine, SArg, map_surface

BASE_ANNOTATION = SLevel(())
_LEVELED_HEADS = {"Eq", *T.ELIMINATORS}


def _fill(lvl):
    return BASE_ANNOTATION if lvl is None else lvl


def _default_node(t):
    match t:
        case SPi():
            return replace(t, level=_fill(t.level))
        case SLam():
            return replace(t, binders=tuple(replace(b, level=_fill(b.level)) for b in t.binders))
        case SSpine(head, head_level, args):
            if isinstance(head, SKeyword) and head.name in _LEVELED_HEADS:
                head_level = _fill(head_level)
            args = tuple(SArg(a.term, _fill(a.level)) if not _builtin_arg(head, i) else a
                         for i, a in enumerate(args))
            return replace(t, head_level=head_level, args=args)
    return t


def _builtin_arg(head, i) -> bool:
    """Leading arguments of keyword formers take no level."""
    if not isinstance(head, SKeyword) or head.name not in FORMERS:
        return False
    return i < FORMERS[head.name][0]


def default_annotations(d: SDecl) -> SDecl:
    """Unwritten binder and argument levels become ``{}``; an unwritten
    declaration level is marked for inference."""
    if d.kind == "assert_level":
        return d
    ty = map_surface(d.type, _default_node)
    body = map_surface(d.body, _default_node) if d.body is not None else None
    return replace(d, type=ty, body=body, infer_level=d.level is None)


# -- inference --------------------------------------------------------------------


def contributions(env, cfg: LatticeConfig, d: T.Declaration):
    """(occurrence, demanded level) for every term-mode requirement of the body."""
    if d.body is None:
        return []
    return usage.demands(cfg, usage.scan(env, cfg, d.body))


def required_level(env, cfg: LatticeConfig, d: T.Declaration) -> frozenset:
    """Closure of everything the body demands; LevelJoinError if illegal."""
    found = contributions(env, cfg, d)
    need = cfg.closure(frozenset().union(*(lvl for _, lvl in found)))
    if cfg.is_legal(need):
        return frozenset(need)
    seen, parts = set(), []
    for occ, lvl in found:
        key = (occ.kind, occ.item, lvl)
        if key not in seen:
            seen.add(key)
            parts.append(f"{usage.describe(occ)} needs {fmt(lvl)}")
    raise LevelJoinError(f"{d.name}: no legal level joins the requirements: {'; '.join(parts)}",
                         d.span)


def infer_level(env, cfg: LatticeConfig, d: T.Declaration, fuel: int | None = None) -> frozenset:
    level = required_level(env, cfg, d)
    check_declaration(env, cfg, replace(d, level=level), fuel)
    return level


@dataclass(frozen=True)
class AssertionResult:
    name: str
    bound: frozenset
    level: frozenset

    @property
    def ok(self) -> bool:
        return self.level <= self.bound

    @property
    def offending(self) -> frozenset:
        return self.level - self.bound

    def __str__(self):
        if self.ok:
            return f"assert_level {self.name} <= {fmt(self.bound)}: ok"
        return (f"assert_level {self.name} <= {fmt(self.bound)}: FAILED, "
                f"level {fmt(self.level)} also uses {fmt(self.offending)}")


def check_assertion(env: GlobalEnv, a: T.Declaration) -> AssertionResult:
    entry = env.get(a.name)
    if entry is None:
        raise UnknownName(f"assertion about unknown definition {a.name!r}", a.span)
    return AssertionResult(a.name, a.level, entry.level)


# -- module driver -------------------------------------------------------------------


@dataclass
class Outcome:
    name: str
    kind: str
    level: Optional[frozenset] = None
    error: Optional[LattcError] = None
    assertion: Optional[AssertionResult] = None

    @property
    def ok(self) -> bool:
        if self.error is not None:
            return False
        return self.assertion is None or self.assertion.ok


@dataclass
class ModuleResult:
    env: GlobalEnv
    declarations: list = field(default_factory=list)
    outcomes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(o.ok for o in self.outcomes)

    @property
    def errors(self):
        return [o.error for o in self.outcomes if o.error is not None]

    @property
    def failed_assertions(self):
        return [o.assertion for o in self.outcomes if o.assertion is not None and not o.assertion.ok]


def elaborate_module(module: SModule, cfg: LatticeConfig, env: GlobalEnv) -> list[T.Declaration]:
    decls = tuple(default_annotations(d) for d in module.decls)
    return resolve(replace(module, decls=decls), cfg, env.names())


def check_declarations(decls, cfg: LatticeConfig, env: GlobalEnv | None = None,
                       fuel: int | None = None, keep_going: bool = False) -> ModuleResult:
    env = env if env is not None else GlobalEnv()
    result = ModuleResult(env, list(decls))
    for d in decls:
        if d.kind == "assert_level":
            try:
                res = check_assertion(result.env, d)
                result.outcomes.append(Outcome(d.name, d.kind, res.level, assertion=res))
            except UnknownName as exc:
                result.outcomes.append(Outcome(d.name, d.kind, error=exc))
            continue
        try:
            result.env = check_declaration(result.env, cfg, d, fuel)
            level = result.env.get(d.name).level
            result.outcomes.append(Outcome(d.name, d.kind, level))
        except TypeCheckError as exc:
            exc.span = exc.span or d.span
            result.outcomes.append(Outcome(d.name, d.kind, error=exc))
            if not keep_going:
                break
    return result


def check_source(text: str, cfg: LatticeConfig, file: str = "<input>",
                 env: GlobalEnv | None = None, fuel: int | None = None,
                 keep_going: bool = False) -> ModuleResult:
    """Parse, default, resolve and check a whole file.

    Parse and resolution errors propagate; type errors are collected in
    the result (stopping at the first one unless ``keep_going``).
    """
    env = env if env is not None else GlobalEnv()
    decls = elaborate_module(parse_module(text, file), cfg, env)
    return check_declarations(decls, cfg, env, fuel, keep_going)
