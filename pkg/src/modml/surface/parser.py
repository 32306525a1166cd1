"""Lexer and recursive-descent parser for ``.mml`` sources.

The concrete grammar is documented in ``docs/grammar.md``.  Each package
notation is available in three spellings (modal, OCaml, MoscowML) and all
of them produce the same node.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from modml.errors import Span, SyntaxErr
from modml.surface import ast as A

KEYWORDS = {
    "signature", "sig", "end", "structure", "struct", "functor", "val", "fun", "type",
    "fn", "if", "then", "else", "let", "in", "bind", "unpack", "pack", "as", "exists",
    "forall", "Fun", "module", "with", "eff", "ref", "true", "false", "eta", "Mod",
}

# unicode spellings of keywords
ALIASES = {"∃": "exists", "∀": "forall", "Λ": "Fun", "η": "eta", "○": "Mod"}

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<int>\d+)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym>=>|->|:>|[()\[\],.:;=*+\-|<>]|[∃∀Λη○→×⟨⟩])
    """,
    re.VERBOSE,
)

_SYMBOL_ALIASES = {"→": "->", "×": "*", "⟨": "<", "⟩": ">"}


@dataclass(frozen=True)
class Token:
    kind: str  # "int" | "string" | "ident" | "kw" | "sym" | "eof"
    text: str
    span: Span


def _unescape(s: str) -> str:
    return bytes(s[1:-1], "utf-8").decode("unicode_escape") if "\\" in s else s[1:-1]


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    pos, line, col = 0, 1, 1
    n = len(source)
    while pos < n:
        if source.startswith("(*", pos):
            depth, start = 0, Span(line, col)
            while pos < n:
                if source.startswith("(*", pos):
                    depth += 1
                    pos, col = pos + 2, col + 2
                elif source.startswith("*)", pos):
                    depth -= 1
                    pos, col = pos + 2, col + 2
                    if depth == 0:
                        break
                else:
                    if source[pos] == "\n":
                        line, col = line + 1, 1
                    else:
                        col += 1
                    pos += 1
            else:
                raise SyntaxErr("unterminated comment", start, frozenset({"*)"}))
            continue
        m = _TOKEN.match(source, pos)
        if m is None:
            raise SyntaxErr(f"unexpected character {source[pos]!r}", Span(line, col))
        text = m.group()
        span = Span(line, col, line, col + len(text))
        match m.lastgroup:
            case "nl":
                line, col = line + 1, 1
                pos = m.end()
                continue
            case "ws":
                pass
            case "int":
                tokens.append(Token("int", text, span))
            case "string":
                tokens.append(Token("string", _unescape(text), span))
            case "ident":
                tokens.append(Token("kw" if text in KEYWORDS else "ident", text, span))
            case "sym":
                if text in ALIASES:
                    tokens.append(Token("kw", ALIASES[text], span))
                else:
                    tokens.append(Token("sym", _SYMBOL_ALIASES.get(text, text), span))
        pos = m.end()
        col += len(text)
    tokens.append(Token("eof", "", Span(line, col, line, col)))
    return tokens


class Parser:
    def __init__(self, source: str):
        self.toks = tokenize(source)
        self.i = 0

    # -- token helpers ----------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str, k: int = 0) -> bool:
        t = self.peek(k) if k else self.tok
        return t.kind in ("kw", "sym") and t.text == text

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def fail(self, *expected: str):
        t = self.tok
        got = "end of input" if t.kind == "eof" else repr(t.text)
        raise SyntaxErr(f"expected {' or '.join(expected)}, got {got}", t.span, frozenset(expected))

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(repr(text))
        return self.advance()

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.advance()
            return True
        return False

    def ident(self) -> str:
        if self.tok.kind != "ident":
            self.fail("an identifier")
        return self.advance().text

    def path(self) -> tuple[str, ...]:
        parts = [self.ident()]
        while self.at(".") and (self.peek().kind in ("ident", "kw") or self.peek().text in ("1", "2")):
            self.advance()
            parts.append(self.advance().text)
        return tuple(parts)

    # -- declarations -------------------------------------------------------------

    def program(self) -> list:
        decls = []
        while self.tok.kind != "eof":
            decls.append(self.decl())
            self.accept(";")
        return decls

    def decls_until_end(self) -> tuple:
        decls = []
        while not self.at("end"):
            if self.tok.kind == "eof":
                self.fail("'end'")
            decls.append(self.decl())
            self.accept(";")
        self.advance()
        return tuple(decls)

    def decl(self):
        span = self.tok.span
        if self.accept("signature"):
            name = self.ident()
            self.expect("=")
            return A.SignatureDecl(name, self.cls(), span=span)
        if self.accept("structure"):
            name = self.ident()
            asc, opaque = None, False
            if self.at(":") or self.at(":>"):
                opaque = self.advance().text == ":>"
                asc = self.cls()
            self.expect("=")
            body = self.expr()
            return A.StructureDecl(name, asc, body, opaque=opaque, span=span)
        if self.accept("functor"):
            name = self.ident()
            self.expect("(")
            param = self.ident()
            self.expect(":")
            psig = self.cls()
            self.expect(")")
            rsig = self.cls() if self.accept(":") else None
            self.expect("=")
            return A.FunctorDecl(name, param, psig, rsig, self.expr(), span=span)
        if self.accept("val"):
            name = self.ident()
            ty = self.cls() if self.accept(":") else None
            self.expect("=")
            return A.ValDecl(name, ty, self.expr(), span=span)
        if self.accept("fun"):
            name = self.ident()
            params = []
            while not (self.at("=") or self.at(":")):
                params.append(self.param())
            if not params:
                self.fail("a parameter")
            result = self.cls() if self.accept(":") else None
            self.expect("=")
            return A.FunDecl(name, tuple(params), result, self.expr(), span=span)
        if self.accept("type"):
            name = self.ident()
            manifest = self.cls() if self.accept("=") else None
            return A.TypeDecl(name, manifest, span=span)
        self.fail("a declaration")

    def param(self) -> A.Param:
        span = self.tok.span
        if self.accept("("):
            name = self.ident()
            self.expect(":")
            cls = self.cls()
            self.expect(")")
            return A.Param(name, cls, span=span)
        return A.Param(self.ident(), None, span=span)

    # -- classifiers --------------------------------------------------------------

    def cls(self):
        span = self.tok.span
        if self.at("exists") or self.at("forall"):
            quant = self.advance().text
            binders = self.binders()
            self.expect(".")
            body = self.cls()
            node = A.Exists if quant == "exists" else A.Forall
            for name, c in reversed(binders):
                body = node(name, c, body, span=span)
            return body
        return self.with_cls()

    def binders(self) -> list[tuple[str, object]]:
        out = []
        if self.at("("):
            while self.accept("("):
                name = self.ident()
                self.expect(":")
                out.append((name, self.cls()))
                self.expect(")")
        else:
            name = self.ident()
            self.expect(":")
            out.append((name, self.cls()))
        return out

    def with_cls(self):
        span = self.tok.span
        c = self.arrow_cls()
        while self.accept("with"):
            self.expect("type")
            p = self.path()
            self.expect("=")
            c = A.WithType(c, p, self.arrow_cls(), span=span)
        return c

    def arrow_cls(self):
        span = self.tok.span
        # dependent arrow (x : A) -> B
        if self.at("(") and self.peek().kind == "ident" and self.at(":", 2):
            save = self.i
            self.advance()
            binder = self.ident()
            self.expect(":")
            dom = self.cls()
            self.expect(")")
            if self.accept("->"):
                return A.TyArrow(dom, self.cls(), binder, span=span)
            self.i = save
        dom = self.prod_cls()
        if self.accept("->"):
            return A.TyArrow(dom, self.cls(), None, span=span)
        return dom

    def prod_cls(self):
        span = self.tok.span
        items = [self.post_cls()]
        while self.accept("*"):
            items.append(self.post_cls())
        out = items[-1]
        for left in reversed(items[:-1]):
            out = A.TyProd(left, out, span=span)
        return out

    def post_cls(self):
        span = self.tok.span
        c = self.atom_cls()
        while self.at("eff") or self.at("ref"):
            c = A.TyEff(c, span=span) if self.advance().text == "eff" else A.TyRef(c, span=span)
        return c

    def atom_cls(self):
        span = self.tok.span
        t = self.tok
        if t.kind == "ident":
            return A.TyName(self.path(), span=span)
        if self.accept("type"):
            return A.TyType(span=span)
        if self.accept("Mod"):
            return A.ModType(self.atom_cls(), "modal", span=span)
        if self.accept("sig"):
            specs = []
            while not self.accept("end"):
                specs.append(self.spec())
                self.accept(";")
            return A.SigBody(tuple(specs), span=span)
        if self.accept("["):
            inner = self.cls()
            self.expect("]")
            return A.ModType(inner, "moscow", span=span)
        if self.accept("("):
            if self.accept("module"):
                inner = self.cls()
                self.expect(")")
                return A.ModType(inner, "ocaml", span=span)
            inner = self.cls()
            self.expect(")")
            return inner
        self.fail("a type or signature")

    def spec(self):
        span = self.tok.span
        if self.accept("type"):
            name = self.ident()
            manifest = self.cls() if self.accept("=") else None
            return A.SpecType(name, manifest, span=span)
        if self.accept("val"):
            name = self.ident()
            self.expect(":")
            return A.SpecVal(name, self.cls(), span=span)
        if self.accept("structure"):
            name = self.ident()
            self.expect(":")
            return A.SpecStructure(name, self.cls(), span=span)
        self.fail("'type'", "'val'", "'structure'", "'end'")

    # -- expressions --------------------------------------------------------------

    def expr(self):
        span = self.tok.span
        if self.accept("fn"):
            if self.at("true") or self.at("false"):
                return self.fn_case(span)
            param = self.param()
            self.expect("=>")
            return A.Fn(param, self.expr(), span=span)
        if self.accept("Fun"):
            param = self.param()
            self.expect("=>")
            return A.BigLambda(param, self.expr(), span=span)
        if self.accept("if"):
            c = self.expr()
            self.expect("then")
            a = self.expr()
            self.expect("else")
            return A.IfExpr(c, a, self.expr(), span=span)
        if self.accept("let"):
            return self.let_expr(span)
        if self.accept("bind"):
            sig = None
            if self.accept("["):
                sig = self.cls()
                self.expect("]")
            name = self.ident()
            self.expect("=")
            pkg = self.expr()
            self.expect("in")
            return A.BindModule(name, pkg, self.expr(), sig, "modal", span=span)
        if self.accept("unpack"):
            pkg = self.expr()
            self.expect("as")
            self.expect("<")
            x = self.ident()
            self.expect(",")
            y = self.ident()
            self.expect(">")
            self.expect("in")
            return A.Unpack(pkg, x, y, self.expr(), span=span)
        if self.accept("pack"):
            self.expect("<")
            w = self.expr()
            self.expect(",")
            b = self.expr()
            self.expect(">")
            ty = self.cls() if self.accept("as") else None
            return A.Pack(w, b, ty, span=span)
        return self.infix()

    def fn_case(self, span):
        branches = {}
        while True:
            if not (self.at("true") or self.at("false")):
                self.fail("'true'", "'false'")
            key = self.advance().text
            if key in branches:
                raise SyntaxErr(f"duplicate branch {key}", self.tok.span)
            self.expect("=>")
            branches[key] = self.expr()
            if len(branches) == 2 or not self.accept("|"):
                break
        if len(branches) != 2:
            self.fail("'|'")
        return A.FnCase(branches["true"], branches["false"], span=span)

    def let_expr(self, span):
        if self.accept("val"):
            name = self.ident()
            ty = self.cls() if self.accept(":") else None
            self.expect("=")
            value = self.expr()
            if ty is not None:
                value = A.Annot(value, ty, span=value.span)
            self.expect("in")
            body = self.expr()
            self.accept("end")
            return A.LetVal(name, value, body, span=span)
        if self.accept("module"):
            # OCaml: let module X = (val u : A) in e
            name = self.ident()
            self.expect("=")
            self.expect("(")
            self.expect("val")
            pkg = self.expr()
            self.expect(":")
            sig = self.cls()
            self.expect(")")
            self.expect("in")
            body = self.expr()
            self.accept("end")
            return A.BindModule(name, pkg, body, sig, "ocaml", span=span)
        if self.accept("structure"):
            # MoscowML: let structure X as A = u in e
            name = self.ident()
            self.expect("as")
            sig = self.cls()
            self.expect("=")
            pkg = self.expr()
            self.expect("in")
            body = self.expr()
            self.accept("end")
            return A.BindModule(name, pkg, body, sig, "moscow", span=span)
        self.fail("'val'", "'module'", "'structure'")

    def infix(self):
        span = self.tok.span
        e = self.app()
        while self.at("+") or self.at("-"):
            op = "add" if self.advance().text == "+" else "sub"
            fn = A.Proj(A.Name("Int", span=span), op, span=span)
            e = A.Apply(A.Apply(fn, e, span=span), self.app(), span=span)
        return e

    def _starts_atom(self) -> bool:
        t = self.tok
        if t.kind in ("ident", "int", "string"):
            return True
        if t.kind == "kw":
            return t.text in ("true", "false", "struct", "eta")
        return t.kind == "sym" and t.text in ("(", "[")

    def app(self):
        span = self.tok.span
        e = self.post()
        while self._starts_atom():
            if self.at("[") and not self.at("structure", 1):
                self.advance()
                arg = self.cls()
                self.expect("]")
                e = A.TypeApp(e, arg, span=span)
            else:
                e = A.Apply(e, self.post(), span=span)
        return e

    def post(self):
        span = self.tok.span
        e = self.atom()
        while self.at(".") and (self.peek().kind in ("ident", "kw") or self.peek().text in ("1", "2")):
            self.advance()
            e = A.Proj(e, self.advance().text, span=span)
        return e

    def atom(self):
        span = self.tok.span
        t = self.tok
        match t.kind:
            case "ident":
                self.advance()
                return A.Name(t.text, span=span)
            case "int":
                self.advance()
                return A.Literal(int(t.text), span=span)
            case "string":
                self.advance()
                return A.Literal(t.text, span=span)
        if self.accept("true"):
            return A.Literal(True, span=span)
        if self.accept("false"):
            return A.Literal(False, span=span)
        if self.accept("struct"):
            return A.StructExpr(self.decls_until_end(), span=span)
        if self.accept("eta"):
            sig = None
            if self.accept("["):
                sig = self.cls()
                self.expect("]")
            return A.EtaNotation(self.post(), sig, "modal", span=span)
        if self.accept("["):
            # MoscowML: [structure u as A]
            self.expect("structure")
            u = self.expr()
            self.expect("as")
            sig = self.cls()
            self.expect("]")
            return A.EtaNotation(u, sig, "moscow", span=span)
        if self.accept("("):
            if self.accept(")"):
                return A.Literal((), span=span)
            if self.accept("module"):
                # OCaml: (module u : A)
                u = self.expr()
                self.expect(":")
                sig = self.cls()
                self.expect(")")
                return A.EtaNotation(u, sig, "ocaml", span=span)
            e = self.expr()
            if self.accept(":"):
                ty = self.cls()
                self.expect(")")
                return A.Annot(e, ty, span=span)
            if self.at(","):
                items = [e]
                while self.accept(","):
                    items.append(self.expr())
                self.expect(")")
                return A.Tuple(tuple(items), span=span)
            self.expect(")")
            return e
        self.fail("an expression")


def parse(source: str) -> list:
    """Parse a whole ``.mml`` source into a list of declarations."""
    return Parser(source).program()


def parse_expr(source: str):
    p = Parser(source)
    e = p.expr()
    if p.tok.kind != "eof":
        p.fail("end of input")
    return e


def parse_cls(source: str):
    p = Parser(source)
    c = p.cls()
    if p.tok.kind != "eof":
        p.fail("end of input")
    return c
