"""Surface syntax tree produced by the parser.

Level annotations that were not written stay ``None`` here; filling them in
is the elaborator's job.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from lattc.errors import SourceSpan


@dataclass(frozen=True)
class SLevel:
    """``{a,b}`` (names are extension ids) or an alias such as ``H``."""

    names: tuple[str, ...]
    alias: Optional[str] = None
    span: Optional[SourceSpan] = field(default=None, compare=False)


class STerm:
    __slots__ = ()


@dataclass(frozen=True)
class SName(STerm):
    name: str
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class SKeyword(STerm):
    name: str
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class SUniverse(STerm):
    index: int
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class SNum(STerm):
    value: int
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class SPi(STerm):
    """Dependent when ``name`` is set, otherwise a plain arrow."""

    name: Optional[str]
    level: Optional[SLevel]
    dom: STerm
    cod: STerm
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class SBinder:
    name: str
    level: Optional[SLevel]
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class SLam(STerm):
    binders: tuple[SBinder, ...]
    body: STerm
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class SArg:
    term: STerm
    level: Optional[SLevel]


@dataclass(frozen=True)
class SSpine(STerm):
    """``head^lvl a1^l1 ... an^ln``.  The head level is only meaningful for
    keywords that carry one (``Eq``, ``J`` and the eliminators)."""

    head: STerm
    head_level: Optional[SLevel]
    args: tuple[SArg, ...]
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class SSigma(STerm):
    name: str
    dom: STerm
    body: STerm
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class SDecl:
    kind: str  # "def" | "postulate" | "assert_level"
    name: str
    level: Optional[SLevel]
    type: Optional[STerm] = None
    body: Optional[STerm] = None
    span: Optional[SourceSpan] = field(default=None, compare=False)
    infer_level: bool = False  # set by default_annotations


@dataclass(frozen=True)
class SModule:
    decls: tuple[SDecl, ...]
    source: str = field(default="", compare=False, repr=False)
    file: str = field(default="<input>", compare=False)


def map_surface(t: STerm, f) -> STerm:
    """Apply ``f`` bottom-up to every surface node."""
    match t:
        case SPi():
            t = replace(t, dom=map_surface(t.dom, f), cod=map_surface(t.cod, f))
        case SLam():
            t = replace(t, body=map_surface(t.body, f))
        case SSpine():
            t = replace(t, head=map_surface(t.head, f),
                        args=tuple(SArg(map_surface(a.term, f), a.level) for a in t.args))
        case SSigma():
            t = replace(t, dom=map_surface(t.dom, f), body=map_surface(t.body, f))
    return f(t)
