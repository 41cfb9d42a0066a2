"""Finite meet-semilattices of theories.

A theory is the set of extensions it enables.  Sets are kept closed under the
configured implication edges (``ua`` implies ``funext`` and so on), ordered by
inclusion, and a set containing a forbidden pair is not a theory at all.  Meets
are intersections and always exist; joins are closed unions and exist only
when the union is legal.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Mapping

from lattc.errors import ConfigError, IllegalLevel, ParseError, UnknownExtension

Level = frozenset  # frozenset[str] of extension ids, canonical and legal

BASE: Level = frozenset()

GATED_CONSTRUCTS = ("K", "em", "funext_ax", "ua_ax")

_EXT_RE = re.compile(r"[a-z][a-z0-9_]*\Z")
_ALIAS_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
_KEYS = {"extensions", "implies", "forbidden", "aliases", "homes"}


def format_level(level: Iterable[str]) -> str:
    return "{" + ",".join(sorted(level)) + "}"


@dataclass(frozen=True)
class Diagnostic:
    invariant: str
    ids: tuple[str, ...]
    message: str

    def __str__(self):
        return f"{self.invariant}: {self.message}"


@dataclass(frozen=True)
class LatticeConfig:
    extensions: tuple[str, ...] = ()
    implies: tuple[tuple[str, str], ...] = ()
    forbidden: tuple[frozenset, ...] = ()
    aliases: Mapping[str, frozenset] = field(default_factory=dict)
    homes: Mapping[str, frozenset] = field(default_factory=dict)

    # -- closure and legality ------------------------------------------------

    def closure(self, raw: Iterable[str]) -> frozenset:
        out = set(raw)
        todo = list(out)
        while todo:
            ext = todo.pop()
            for stronger, weaker in self.implies:
                if stronger == ext and weaker not in out:
                    out.add(weaker)
                    todo.append(weaker)
        return frozenset(out)

    def _clash(self, members: frozenset) -> frozenset | None:
        for pair in self.forbidden:
            if pair <= members:
                return pair
        return None

    def is_legal(self, members: Iterable[str]) -> bool:
        return self._clash(frozenset(members)) is None

    def canonicalize(self, raw: Iterable[str]) -> Level:
        """Smallest implication-closed superset of ``raw``.

        Raises IllegalLevel when the closure contains a forbidden pair.
        """
        raw = frozenset(raw)
        unknown = sorted(raw - set(self.extensions))
        if unknown:
            raise UnknownExtension(f"unknown extension(s) {', '.join(unknown)}")
        closed = self.closure(raw)
        clash = self._clash(closed)
        if clash is not None:
            raise IllegalLevel(
                f"{format_level(closed)} contains the forbidden pair {format_level(clash)}"
            )
        return Level(closed)

    # -- order ----------------------------------------------------------------

    @staticmethod
    def leq(l0: Level, l1: Level) -> bool:
        return l0 <= l1

    @staticmethod
    def meet(l0: Level, l1: Level) -> Level:
        return l0 & l1

    def join(self, l0: Level, l1: Level) -> Level | None:
        """Least upper bound, or None when no legal theory contains both."""
        union = self.closure(l0 | l1)
        if self._clash(union) is not None:
            return None
        return Level(union)

    def levels(self) -> list[Level]:
        """Every legal level, smallest first."""
        seen = set()
        for r in range(len(self.extensions) + 1):
            for combo in itertools.combinations(self.extensions, r):
                members = frozenset(combo)
                if self.closure(members) == members and self.is_legal(members):
                    seen.add(Level(members))
        return sorted(seen, key=lambda l: (len(l), sorted(l)))

    # -- names ------------------------------------------------------------------

    def alias(self, name: str) -> Level:
        if name not in self.aliases:
            raise UnknownExtension(f"unknown level alias {name!r}")
        return self.canonicalize(self.aliases[name])

    def alias_for(self, level: Level) -> str | None:
        for name in sorted(self.aliases):
            try:
                if self.alias(name) == level:
                    return name
            except (IllegalLevel, UnknownExtension):
                continue
        return None

    def home(self, construct: str) -> Level | None:
        if construct not in self.homes:
            return None
        return self.canonicalize(self.homes[construct])

    # -- validation -----------------------------------------------------------------

    def validate(self) -> list[Diagnostic]:
        diags: list[Diagnostic] = []
        declared = set()
        for ext in self.extensions:
            if not isinstance(ext, str) or not _EXT_RE.match(ext):
                diags.append(Diagnostic("extension-name", (str(ext),),
                                        f"{ext!r} is not a valid extension identifier"))
            if ext in declared:
                diags.append(Diagnostic("extension-unique", (ext,),
                                        f"extension {ext!r} declared twice"))
            declared.add(ext)

        def undeclared(where, ids):
            missing = tuple(sorted(set(ids) - declared))
            if missing:
                diags.append(Diagnostic(f"{where}-declared", missing,
                                        f"{where} references undeclared {', '.join(missing)}"))
            return bool(missing)

        for stronger, weaker in self.implies:
            undeclared("implies", (stronger, weaker))
        cycle = _find_cycle(self.implies)
        if cycle:
            diags.append(Diagnostic("implies-acyclic", tuple(cycle),
                                    "implication cycle " + " => ".join(cycle + [cycle[0]])))
        for pair in self.forbidden:
            undeclared("forbidden", pair)

        for kind, table in (("alias", self.aliases), ("home", self.homes)):
            for name in sorted(table):
                members = frozenset(table[name])
                if kind == "alias" and not _ALIAS_RE.match(name):
                    diags.append(Diagnostic("alias-name", (name,),
                                            f"{name!r} is not a valid alias name"))
                if kind == "home" and name not in GATED_CONSTRUCTS:
                    diags.append(Diagnostic("home-construct", (name,),
                                            f"{name!r} is not a gated construct"))
                if undeclared(kind, members):
                    continue
                clash = self._clash(self.closure(members))
                if clash is not None:
                    diags.append(Diagnostic(
                        f"{kind}-legal", (name,) + tuple(sorted(clash)),
                        f"{kind} {name} = {format_level(members)} closes over the "
                        f"forbidden pair {format_level(clash)}"))
        return diags


def _find_cycle(edges) -> list[str]:
    graph: dict[str, list[str]] = {}
    for a, b in edges:
        if a != b:
            graph.setdefault(a, []).append(b)
    state: dict[str, int] = {}
    stack: list[str] = []

    def visit(node):
        state[node] = 1
        stack.append(node)
        for nxt in graph.get(node, ()):
            if state.get(nxt) == 1:
                return stack[stack.index(nxt):]
            if nxt not in state:
                found = visit(nxt)
                if found:
                    return found
        stack.pop()
        state[node] = 2
        return None

    for node in sorted(graph):
        if node not in state:
            found = visit(node)
            if found:
                return list(found)
    return []


def _string_list(value, where):
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise ParseError(f"{where} must be a list of strings")
    return value


def from_document(doc) -> LatticeConfig:
    """Build an unvalidated config from an already-decoded JSON object."""
    if not isinstance(doc, dict):
        raise ParseError("lattice config must be a JSON object")
    unknown = set(doc) - _KEYS - {"_comment"}
    if unknown:
        raise ParseError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    extensions = _string_list(doc.get("extensions", []), "extensions")
    implies = []
    for pair in doc.get("implies", []):
        pair = _string_list(pair, "implies entry")
        if len(pair) != 2:
            raise ParseError("implies entries are [stronger, weaker] pairs")
        implies.append((pair[0], pair[1]))
    forbidden = []
    for pair in doc.get("forbidden", []):
        pair = _string_list(pair, "forbidden entry")
        if len(pair) != 2:
            raise ParseError("forbidden entries are pairs")
        forbidden.append(frozenset(pair))
    tables = {}
    for key in ("aliases", "homes"):
        table = doc.get(key, {})
        if not isinstance(table, dict):
            raise ParseError(f"{key} must be an object")
        tables[key] = {k: frozenset(_string_list(v, f"{key}.{k}")) for k, v in table.items()}
    return LatticeConfig(tuple(extensions), tuple(implies), tuple(forbidden),
                         tables["aliases"], tables["homes"])


def load_config(text: str) -> LatticeConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed lattice config: {exc}") from None
    cfg = from_document(doc)
    diags = cfg.validate()
    if diags:
        raise ConfigError("; ".join(str(d) for d in diags))
    return cfg


def default_document() -> str:
    return resources.files("lattc.data").joinpath("default_lattice.json").read_text("utf-8")


def chain_document() -> str:
    return resources.files("lattc.data").joinpath("chain_lattice.json").read_text("utf-8")


def default_config() -> LatticeConfig:
    return load_config(default_document())


def chain_config() -> LatticeConfig:
    return load_config(chain_document())
