"""Recursive-descent parser for ``.ltc`` files.

    module   := decl*
    decl     := "def" name level? ":" level? term ":=" term
              | "postulate" name level? ":" level? term
              | "assert_level" name "<=" levelset
    level    := "^" levelset
    levelset := "{" "}" | "{" id ("," id)* "}" | alias
    term     := "fun" (name level?)+ "=>" term
              | "(" name+ ":" level? term ")" "->" term
              | app ("->" term)?
    app      := atom level? (atom level?)*
    atom     := name | keyword | "Type" nat | nat | "(" term ")"
              | "Sigma" "(" name ":" term ")" atom

A level written directly after a lone atom in arrow-domain position
(``A^H -> B``) annotates the arrow's domain.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from lattc.errors import ParseError, SourceSpan
from lattc.syntax.surface import (
    SArg, SBinder, SDecl, SKeyword, SLam, SLevel, SModule, SName, SNum, SPi,
    SSigma, SSpine, STerm, SUniverse,
)

KEYWORDS = frozenset("""
    def postulate assert_level fun Type Eq refl J absurd K em funext_ax ua_ax
    Void Unit tt Bool true false Nat zero succ List nil cons Sum inl inr Sigma pair
    UnitElim BoolElim NatElim ListElim SumElim SigmaElim
""".split())

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+|--[^\n]*)
  | (?P<sym>:=|=>|->|<=|[:^{}(),])
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # "sym" | "num" | "ident" | "kw" | "eof"
    text: str
    start: int
    end: int


def tokenize(text: str, file: str = "<input>") -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}",
                             SourceSpan(file, pos, pos + 1))
        kind = m.lastgroup
        if kind != "ws":
            word = m.group()
            if kind == "ident" and word in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, word, m.start(), m.end()))
        pos = m.end()
    tokens.append(Token("eof", "", len(text), len(text)))
    return tokens


_ATOM_START = {"ident", "num", "kw"}
_NOT_ATOMS = {"def", "postulate", "assert_level", "fun"}


class Parser:
    def __init__(self, text: str, file: str = "<input>"):
        self.text = text
        self.file = file
        self.tokens = tokenize(text, file)
        self.pos = 0

    # -- token helpers ----------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.kind in ("sym", "kw") and self.tok.text == text

    def advance(self) -> Token:
        tok = self.tok
        self.pos += 1
        return tok

    def fail(self, expected) -> ParseError:
        tok = self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        return ParseError(f"expected {' or '.join(sorted(expected))}, found {found}",
                          SourceSpan(self.file, tok.start, tok.end), expected)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.fail([repr(text)])
        return self.advance()

    def name(self) -> Token:
        if self.tok.kind != "ident":
            raise self.fail(["identifier"])
        return self.advance()

    def span_from(self, start: int) -> SourceSpan:
        end = self.tokens[self.pos - 1].end if self.pos else start
        return SourceSpan(self.file, start, max(start, end))

    # -- levels ---------------------------------------------------------------------

    def levelset(self) -> SLevel:
        start = self.tok.start
        if self.at("{"):
            self.advance()
            names = []
            if not self.at("}"):
                names.append(self.name().text)
                while self.at(","):
                    self.advance()
                    names.append(self.name().text)
            self.expect("}")
            return SLevel(tuple(names), None, self.span_from(start))
        if self.tok.kind == "ident":
            return SLevel((), self.advance().text, self.span_from(start))
        raise self.fail(["'{'", "level alias"])

    def opt_level(self) -> SLevel | None:
        if self.at("^"):
            self.advance()
            return self.levelset()
        return None

    # -- declarations -------------------------------------------------------------------

    def module(self) -> SModule:
        decls = []
        while self.tok.kind != "eof":
            decls.append(self.decl())
        return SModule(tuple(decls), self.text, self.file)

    def decl(self) -> SDecl:
        start = self.tok.start
        if self.at("assert_level"):
            self.advance()
            name = self.name().text
            self.expect("<=")
            level = self.levelset()
            return SDecl("assert_level", name, level, span=self.span_from(start))
        if not (self.at("def") or self.at("postulate")):
            raise self.fail(["'def'", "'postulate'", "'assert_level'"])
        kind = self.advance().text
        name = self.name().text
        level = self.opt_level()
        self.expect(":")
        if level is None:
            level = self.opt_level()
        ty = self.term()
        body = None
        if kind == "def":
            self.expect(":=")
            body = self.term()
        return SDecl(kind, name, level, ty, body, self.span_from(start))

    # -- terms -------------------------------------------------------------------------

    def term(self) -> STerm:
        start = self.tok.start
        if self.at("fun"):
            self.advance()
            binders = []
            while self.tok.kind == "ident":
                bstart = self.tok.start
                bname = self.advance().text
                binders.append(SBinder(bname, self.opt_level(), self.span_from(bstart)))
            if not binders:
                raise self.fail(["binder name"])
            self.expect("=>")
            body = self.term()
            return SLam(tuple(binders), body, self.span_from(start))
        if self._dependent_binder_ahead():
            return self.dependent_pi()
        left = self.app()
        if self.at("->"):
            self.advance()
            cod = self.term()
            level = None
            if isinstance(left, SSpine) and not left.args and left.head_level is not None:
                left, level = left.head, left.head_level
            return SPi(None, level, left, cod, self.span_from(start))
        if isinstance(left, SSpine) and not left.args and left.head_level is not None \
                and not isinstance(left.head, SKeyword):
            raise ParseError("a level on a lone term is only allowed on an arrow domain",
                             left.span)
        return left

    def _dependent_binder_ahead(self) -> bool:
        if not self.at("("):
            return False
        k = 1
        while self.peek(k).kind == "ident":
            k += 1
        nxt = self.peek(k)
        return k > 1 and nxt.kind == "sym" and nxt.text == ":"

    def dependent_pi(self) -> STerm:
        start = self.tok.start
        self.expect("(")
        names = []
        while self.tok.kind == "ident":
            tok = self.advance()
            names.append(tok.text)
        self.expect(":")
        level = self.opt_level()
        dom = self.term()
        self.expect(")")
        self.expect("->")
        cod = self.term()
        span = self.span_from(start)
        for name in reversed(names):
            cod = SPi(name, level, dom, cod, span)
        return cod

    def _atom_ahead(self) -> bool:
        tok = self.tok
        if tok.kind in _ATOM_START:
            return not (tok.kind == "kw" and tok.text in _NOT_ATOMS)
        return tok.kind == "sym" and tok.text == "("

    def app(self) -> STerm:
        start = self.tok.start
        if not self._atom_ahead():
            raise self.fail(["term"])
        head = self.atom()
        head_level = self.opt_level()
        args = []
        while self._atom_ahead():
            arg = self.atom()
            args.append(SArg(arg, self.opt_level()))
        if not args and head_level is None:
            return head
        return SSpine(head, head_level, tuple(args), self.span_from(start))

    def atom(self) -> STerm:
        start = self.tok.start
        tok = self.tok
        if tok.kind == "ident":
            self.advance()
            return SName(tok.text, self.span_from(start))
        if tok.kind == "num":
            self.advance()
            return SNum(int(tok.text), self.span_from(start))
        if self.at("Type"):
            self.advance()
            if self.tok.kind != "num":
                raise self.fail(["universe index"])
            return SUniverse(int(self.advance().text), self.span_from(start))
        if self.at("Sigma"):
            self.advance()
            self.expect("(")
            name = self.name().text
            self.expect(":")
            dom = self.term()
            self.expect(")")
            if not self._atom_ahead():
                raise self.fail(["Sigma body"])
            body = self.atom()
            return SSigma(name, dom, body, self.span_from(start))
        if tok.kind == "kw" and tok.text not in _NOT_ATOMS:
            self.advance()
            return SKeyword(tok.text, self.span_from(start))
        if self.at("("):
            self.advance()
            inner = self.term()
            self.expect(")")
            return inner
        raise self.fail(["term"])


def parse_module(text: str, file: str = "<input>") -> SModule:
    return Parser(text, file).module()


def parse_term(text: str, file: str = "<input>") -> STerm:
    p = Parser(text, file)
    t = p.term()
    if p.tok.kind != "eof":
        raise p.fail(["end of input"])
    return t
