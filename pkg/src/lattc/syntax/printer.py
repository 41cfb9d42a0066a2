"""Pretty printer producing text the parser reads back to the same core term."""

from __future__ import annotations

from typing import Iterable

from lattc.lattice import LatticeConfig, format_level
from lattc.syntax import terms as T
from lattc.syntax.parser import KEYWORDS

# precedence: 0 = anything (fun, arrows), 1 = application, 2 = atom
_TOP, _APP, _ATOM = 0, 1, 2

_ALWAYS_LEVELED = ("Eq", "J")


class Printer:
    def __init__(self, cfg: LatticeConfig | None = None, reserved: Iterable[str] = ()):
        self.cfg = cfg
        self.reserved = set(reserved) | KEYWORDS

    def level(self, level: frozenset, force: bool = False) -> str:
        """Text after ``^``, or "" when the annotation may be omitted."""
        if self.cfg is not None:
            alias = self.cfg.alias_for(level)
            if alias is not None:
                return alias
        if not level and not force:
            return ""
        return format_level(level)

    def hat(self, level, force=False) -> str:
        text = self.level(level, force)
        return "^" + text if text else ""

    def fresh(self, hint: str, names: list[str], used: bool) -> str:
        if hint == "_" and not used:
            return "_"
        base = "x" if hint == "_" else hint
        taken = set(names) | self.reserved
        if base not in taken:
            return base
        i = 1
        while f"{base}{i}" in taken:
            i += 1
        return f"{base}{i}"

    def term(self, t: T.Term, names: list[str], prec: int = _TOP) -> str:
        text, own = self._term(t, names)
        return f"({text})" if own < prec else text

    def _term(self, t: T.Term, names: list[str]) -> tuple[str, int]:
        match t:
            case T.Var(i):
                if i >= len(names):
                    return f"#{i}", _ATOM
                return names[-1 - i], _ATOM
            case T.Global(name) | T.Gated(name):
                return name, _ATOM
            case T.Prim(name):
                return name, _ATOM
            case T.Universe(i):
                return f"Type {i}", _APP
            case T.Succ():
                n, base = 0, t
                while isinstance(base, T.Succ):
                    n, base = n + 1, base.pred
                if base == T.Prim("zero"):
                    return str(n), _ATOM
                return "succ " + self.term(t.pred, names, _ATOM), _APP
            case T.Pi(level, dom, cod, name):
                used = T.occurs(cod, 0)
                if used:
                    x = self.fresh(name, names, True)
                    lvl = self.level(level)
                    colon = f":^{lvl}" if lvl else ":"
                    head = f"({x} {colon} {self.term(dom, names)})"
                    return f"{head} -> {self.term(cod, names + [x])}", _TOP
                lvl = self.hat(level)
                dom_text = self.term(dom, names, _ATOM if lvl else _APP)
                return f"{dom_text}{lvl} -> {self.term(cod, names + ['_'])}", _TOP
            case T.Lam():
                binders = []
                body, scope = t, list(names)
                while isinstance(body, T.Lam):
                    x = self.fresh(body.name, scope, T.occurs(body.body, 0))
                    binders.append(x + self.hat(body.level))
                    scope.append(x)
                    body = body.body
                return f"fun {' '.join(binders)} => {self.term(body, scope)}", _TOP
            case T.App():
                head, args = T.spine(t)
                parts = [self.term(head, names, _ATOM)]
                for level, arg in args:
                    parts.append(self.term(arg, names, _ATOM) + self.hat(level))
                return " ".join(parts), _APP
            case T.Eq(obs, ty, lhs, rhs):
                return self.keyword(f"Eq{self.hat(obs, True)}", [ty, lhs, rhs], names)
            case T.SigmaT(fst, snd, name):
                x = self.fresh(name, names, T.occurs(snd, 0))
                if x == "_":
                    x = self.fresh("x", names, True)
                inner = f"Sigma ({x} : {self.term(fst, names)}) {self.term(snd, names + [x], _ATOM)}"
                return inner, _APP
            case T.ListT(elem):
                return self.keyword("List", [elem], names)
            case T.SumT(left, right):
                return self.keyword("Sum", [left, right], names)
            case T.Cons(head, tail):
                return self.keyword("cons", [head, tail], names)
            case T.Inl(value):
                return self.keyword("inl", [value], names)
            case T.Inr(value):
                return self.keyword("inr", [value], names)
            case T.Pair(fst, snd):
                return self.keyword("pair", [fst, snd], names)
            case T.Absurd(scrut, ty):
                return self.keyword("absurd", [scrut, ty], names)
            case T.Elim(kind, level, scrut, motive, branches):
                head = kind + self.hat(level, kind in _ALWAYS_LEVELED)
                return self.keyword(head, [scrut, motive, *branches], names)
        raise TypeError(f"not a core term: {t!r}")

    def keyword(self, head: str, args, names) -> tuple[str, int]:
        return " ".join([head] + [self.term(a, names, _ATOM) for a in args]), _APP

    def declaration(self, d: T.Declaration) -> str:
        if d.kind == "assert_level":
            return f"assert_level {d.name} <= {self.level(d.level, True)}"
        lvl = "" if d.level is None else "^" + self.level(d.level, True)
        text = f"{d.kind} {d.name} :{lvl} {self.term(d.type, [])}"
        if d.body is not None:
            text += f"\n  := {self.term(d.body, [])}"
        return text


def print_term(t: T.Term, names: Iterable[str] = (), cfg: LatticeConfig | None = None,
               reserved: Iterable[str] = ()) -> str:
    names = list(names)
    return Printer(cfg, set(reserved) | set(names)).term(t, names)


def print_declarations(decls: Iterable[T.Declaration], cfg: LatticeConfig | None = None) -> str:
    decls = list(decls)
    printer = Printer(cfg, {d.name for d in decls})
    return "\n\n".join(printer.declaration(d) for d in decls) + "\n"
