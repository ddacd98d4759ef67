"""Concrete syntax for forest (``.fst``) and M-SRL (``.srl``) sources.

Forest grammar::

    program := stmt (";" stmt)*
    stmt    := "skip" | ident "+=" aexp | ident "-=" aexp
             | "if" "(" bexp ")" "{" program "}" "else" "{" program "}"
             | "from" "(" header ")" "to" "(" header ")" "{" program "}"
    header  := bexp            -- must have the shape  ident "=" aexp "or" bexp
    aexp    := term (("+" | "-") term)*
    term    := intlit | ident | "-" term | "(" aexp ")"
    bexp    := conj ("or" conj)*
    conj    := atom ("and" atom)*
    atom    := "0" | "1" | "!" atom | aexp "=" aexp | "(" bexp ")"

A bare ``0``/``1`` in boolean position is a truth value; as an operand of
``=`` it is an integer.  ``-`` directly followed by an integer literal is a
negative literal, otherwise ``-e`` means ``0 - e``.

M-SRL grammar::

    program := stmt (";" stmt)*
    stmt    := "INC" ident | "DEC" ident | "for" ident "{" program "}"

Both languages use ``//`` line comments.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .syntax import (
    Add,
    And,
    BoolLit,
    Dec,
    Eq,
    FromTo,
    Gt,
    If,
    Inc,
    IntLit,
    Le,
    Loc,
    Node,
    Not,
    Or,
    Skip,
    Sub,
    Term,
    VarRef,
    flatten,
    seq,
)
from . import msrl as _msrl

FOREST_KEYWORDS = frozenset({"skip", "if", "else", "from", "to", "or", "and"})
MSRL_KEYWORDS = frozenset({"INC", "DEC", "for"}) | FOREST_KEYWORDS

WIDTH = 72
INDENT = "    "


@dataclass(frozen=True)
class SourceFile:
    text: str
    origin: str = "<string>"

    @classmethod
    def read(cls, path: str | Path) -> "SourceFile":
        p = Path(path)
        return cls(p.read_bytes().decode("utf-8"), str(p))


@dataclass(frozen=True)
class Diagnostic:
    line: int
    col: int
    message: str
    origin: str = "<string>"
    kind: str = "syntax"

    def __str__(self) -> str:
        return f"{self.origin}:{self.line}:{self.col}: {self.message}"


class ParseError(Exception):
    def __init__(self, errors: list[Diagnostic]):
        self.errors = errors
        super().__init__("\n".join(str(e) for e in errors))


# -- lexing -------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<int>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>\+=|-=|[-+=!(){};])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "ident", "op", "eof"
    text: str
    line: int
    col: int


def tokenize(src: SourceFile) -> list[Token]:
    text = src.text
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError([Diagnostic(
                line, pos - line_start + 1, f"unexpected character {text[pos]!r}", src.origin
            )])
        kind = m.lastgroup
        if kind in ("int", "ident", "op"):
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Fail(Exception):
    def __init__(self, diag: Diagnostic):
        self.diag = diag


class _Base:
    keywords: frozenset[str] = frozenset()

    def __init__(self, src: SourceFile, allow_internal: bool, warnings: list | None):
        self.src = src
        self.toks = tokenize(src)
        self.pos = 0
        self.allow_internal = allow_internal
        self.warnings = warnings if warnings is not None else []

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def loc(self) -> Loc:
        return Loc(self.tok.line, self.tok.col)

    def error(self, message: str, tok: Token | None = None, kind: str = "syntax") -> _Fail:
        t = tok or self.tok
        return _Fail(Diagnostic(t.line, t.col, message, self.src.origin, kind))

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "ident") and self.tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        t = self.tok
        self.pos += 1
        return t

    def ident(self) -> str:
        t = self.tok
        if t.kind != "ident":
            raise self.error(f"expected identifier, found {t.text or 'end of input'!r}")
        if t.text in self.keywords:
            raise self.error(f"reserved word {t.text!r} used as identifier")
        if t.text.startswith("_") and not self.allow_internal:
            raise self.error(f"identifiers starting with '_' are reserved: {t.text!r}")
        self.pos += 1
        return t.text

    def program(self, closer: str | None) -> list:
        stmts = [self.stmt()]
        while self.at(";"):
            semi = self.tok
            self.pos += 1
            if (closer and self.at(closer)) or (closer is None and self.tok.kind == "eof"):
                self.warnings.append(Diagnostic(
                    semi.line, semi.col, "trailing ';' ignored", self.src.origin, "warning"
                ))
                break
            stmts.append(self.stmt())
        return stmts

    def finish(self) -> None:
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}; expected ';' or end of input")


class _ForestParser(_Base):
    keywords = FOREST_KEYWORDS

    def __init__(self, *args):
        super().__init__(*args)
        self.shape_errors: list[Diagnostic] = []

    def stmt(self) -> Term:
        loc = self.loc()
        t = self.tok
        if self.at("skip"):
            self.pos += 1
            return Skip(loc)
        if self.at("if"):
            self.pos += 1
            self.expect("(")
            guard = self.bexp()
            self.expect(")")
            then = self.block()
            self.expect("else")
            other = self.block()
            return If(guard, then, other, loc)
        if self.at("from"):
            return self.from_to(loc)
        if t.kind == "ident":
            name = self.ident()
            if self.at("+="):
                self.pos += 1
                return Inc(name, self.aexp(), loc)
            if self.at("-="):
                self.pos += 1
                return Dec(name, self.aexp(), loc)
            raise self.error(f"expected '+=' or '-=' after {name!r}")
        raise self.error(f"expected a statement, found {t.text or 'end of input'!r}")

    def block(self) -> Term:
        self.expect("{")
        body = seq(*self.program("}"))
        self.expect("}")
        return body

    def from_to(self, loc: Loc) -> Term:
        self.expect("from")
        self.expect("(")
        first_tok = self.tok
        start = self.bexp()
        self.expect(")")
        self.expect("to")
        self.expect("(")
        second_tok = self.tok
        stop = self.bexp()
        self.expect(")")
        body = self.block()
        lead_u, bound_u, esc_in = self.header(start, first_tok)
        lead_v, bound_v, esc_out = self.header(stop, second_tok)
        if lead_u is not None and lead_v is not None and lead_u != lead_v:
            self.shape_errors.append(Diagnostic(
                second_tok.line, second_tok.col,
                f"leading variable mismatch {lead_u} vs {lead_v}",
                self.src.origin, "header",
            ))
        if lead_u is None or lead_v is None:
            lead_u = lead_u or lead_v or "?"
        return FromTo(lead_u, bound_u, esc_in, bound_v, esc_out, body, loc)

    def header(self, expr, tok: Token):
        """Split ``i = e or b1 or ... or bk`` into ``(i, e, b1 or ... or bk)``."""
        spine = []
        while isinstance(expr, Or):
            spine.append(expr.right)
            expr = expr.left
        spine.reverse()
        if spine and isinstance(expr, Eq) and isinstance(expr.left, VarRef):
            escape = spine[0]
            for b in spine[1:]:
                escape = Or(escape, b)
            return expr.left.name, expr.right, escape
        self.shape_errors.append(Diagnostic(
            tok.line, tok.col,
            "loop header must have the shape (<ident> = <expr> or <condition>)",
            self.src.origin, "header",
        ))
        return None, IntLit(0), BoolLit(False)

    # expressions

    def aexp(self):
        left = self.aterm()
        while self.at("+") or self.at("-"):
            op = self.tok.text
            self.pos += 1
            right = self.aterm()
            left = Add(left, right) if op == "+" else Sub(left, right)
        return left

    def aterm(self):
        t = self.tok
        if t.kind == "int":
            self.pos += 1
            return IntLit(int(t.text))
        if self.at("-"):
            self.pos += 1
            if self.tok.kind == "int":
                v = int(self.tok.text)
                self.pos += 1
                return IntLit(-v)
            return Sub(IntLit(0), self.aterm())
        if self.at("("):
            self.pos += 1
            e = self.aexp()
            self.expect(")")
            return e
        if t.kind == "ident":
            return VarRef(self.ident())
        raise self.error(f"expected an arithmetic expression, found {t.text or 'end of input'!r}")

    def bexp(self):
        left = self.conj()
        while self.at("or"):
            self.pos += 1
            left = Or(left, self.conj())
        return left

    def conj(self):
        left = self.atom()
        while self.at("and"):
            self.pos += 1
            left = And(left, self.atom())
        return left

    def atom(self):
        if self.at("!"):
            self.pos += 1
            return Not(self.atom())
        save = self.pos
        try:
            lhs = self.aexp()
            self.expect("=")
            return Eq(lhs, self.aexp())
        except _Fail as first:
            furthest = first
            self.pos = save
        t = self.tok
        if self.at("("):
            self.pos += 1
            try:
                e = self.bexp()
                self.expect(")")
                return e
            except _Fail as second:
                raise max(furthest, second, key=_position) from None
        if t.kind == "int" and t.text in ("0", "1"):
            self.pos += 1
            return BoolLit(t.text == "1")
        raise furthest


def _position(f: _Fail) -> tuple[int, int]:
    return (f.diag.line, f.diag.col)


class _MsrlParser(_Base):
    keywords = MSRL_KEYWORDS

    def stmt(self):
        if self.at("INC"):
            self.pos += 1
            return _msrl.MInc(self.ident())
        if self.at("DEC"):
            self.pos += 1
            return _msrl.MDec(self.ident())
        if self.at("for"):
            self.pos += 1
            reg = self.ident()
            self.expect("{")
            body = _msrl.mseq(*self.program("}"))
            self.expect("}")
            return _msrl.MFor(reg, body)
        found = self.tok.text or "end of input"
        raise self.error(f"expected INC, DEC or for, found {found!r}")


def _source(src: SourceFile | str) -> SourceFile:
    return SourceFile(src) if isinstance(src, str) else src


def parse_forest(
    src: SourceFile | str,
    *,
    allow_internal: bool = False,
    warnings: list | None = None,
) -> Term:
    """Parse forest source text into a term; raises :class:`ParseError`."""
    p = _ForestParser(_source(src), allow_internal, warnings)
    try:
        stmts = p.program(None)
        p.finish()
    except _Fail as f:
        raise ParseError([f.diag] + p.shape_errors) from None
    if p.shape_errors:
        raise ParseError(p.shape_errors)
    return seq(*stmts)


def parse_msrl(
    src: SourceFile | str,
    *,
    allow_internal: bool = False,
    warnings: list | None = None,
):
    """Parse M-SRL source text; raises :class:`ParseError`."""
    p = _MsrlParser(_source(src), allow_internal, warnings)
    try:
        stmts = p.program(None)
        p.finish()
    except _Fail as f:
        raise ParseError([f.diag]) from None
    return _msrl.mseq(*stmts)


# -- pretty printing ----------------------------------------------------------


def pretty_arith(e) -> str:
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, VarRef):
        return e.name
    if isinstance(e, (Add, Sub)):
        op = "+" if isinstance(e, Add) else "-"
        right = pretty_arith(e.right)
        if isinstance(e.right, (Add, Sub)) or (isinstance(e.right, IntLit) and e.right.value < 0):
            right = f"({right})"
        return f"{pretty_arith(e.left)} {op} {right}"
    raise TypeError(f"not an arithmetic expression: {e!r}")


def _bool_prec(e) -> int:
    if isinstance(e, Or):
        return 1
    if isinstance(e, And):
        return 2
    return 3


def pretty_bool(e, prec: int = 0) -> str:
    if isinstance(e, BoolLit):
        s = "1" if e.value else "0"
    elif isinstance(e, Eq):
        s = f"{pretty_arith(e.left)} = {pretty_arith(e.right)}"
    elif isinstance(e, Le):
        s = f"{pretty_arith(e.left)} <= {pretty_arith(e.right)}"
    elif isinstance(e, Gt):
        s = f"{pretty_arith(e.left)} > {pretty_arith(e.right)}"
    elif isinstance(e, Not):
        inner = pretty_bool(e.inner, 3)
        if isinstance(e.inner, (Eq, Le, Gt)):
            inner = f"({inner})"
        s = "!" + inner
    elif isinstance(e, Or):
        s = f"{pretty_bool(e.left, 1)} or {pretty_bool(e.right, 2)}"
    elif isinstance(e, And):
        s = f"{pretty_bool(e.left, 2)} and {pretty_bool(e.right, 3)}"
    else:
        raise TypeError(f"not a boolean expression: {e!r}")
    return f"({s})" if _bool_prec(e) < prec else s


def _header(lead: str, bound, escape) -> str:
    return f"({lead} = {pretty_arith(bound)} or {pretty_bool(escape, 1)})"


def _render_stmt(t: Term, depth: int, flat: bool) -> str:
    if isinstance(t, Skip):
        return "skip"
    if isinstance(t, Inc):
        return f"{t.target} += {pretty_arith(t.expr)}"
    if isinstance(t, Dec):
        return f"{t.target} -= {pretty_arith(t.expr)}"
    if isinstance(t, If):
        return (f"if ({pretty_bool(t.guard)}) {_render_block(t.then_branch, depth, flat)}"
                f" else {_render_block(t.else_branch, depth, flat)}")
    if isinstance(t, FromTo):
        return (f"from {_header(t.lead, t.from_bound, t.from_escape)}"
                f" to {_header(t.lead, t.to_bound, t.to_escape)}"
                f" {_render_block(t.body, depth, flat)}")
    raise TypeError(f"not a statement: {t!r}")


def _render_block(body: Term, depth: int, flat: bool) -> str:
    if flat:
        return "{" + "; ".join(_render_stmt(s, depth, True) for s in flatten(body)) + "}"
    pad = INDENT * (depth + 1)
    inner = _render_program(body, depth + 1)
    return "{\n" + pad + inner + "\n" + INDENT * depth + "}"


def _render_one(t: Term, depth: int) -> str:
    one_line = _render_stmt(t, depth, True)
    if len(one_line) + len(INDENT) * depth <= WIDTH or isinstance(t, (Skip, Inc, Dec)):
        return one_line
    return _render_stmt(t, depth, False)


def _render_program(term: Term, depth: int) -> str:
    parts = [_render_one(s, depth) for s in flatten(term)]
    joined = "; ".join(parts)
    if "\n" not in joined and len(joined) + len(INDENT) * depth <= WIDTH:
        return joined
    return (";\n" + INDENT * depth).join(parts)


def pretty_forest(term: Term) -> str:
    """Deterministic source text for ``term``; reparses to an equal term."""
    return _render_program(term, 0)


def pretty_msrl(term) -> str:
    return _msrl_program(term)


def _msrl_program(term) -> str:
    return "; ".join(_msrl_stmt(s) for s in _msrl.mflatten(term))


def _msrl_stmt(t) -> str:
    if isinstance(t, _msrl.MInc):
        return f"INC {t.reg}"
    if isinstance(t, _msrl.MDec):
        return f"DEC {t.reg}"
    if isinstance(t, _msrl.MFor):
        return f"for {t.reg} {{{_msrl_program(t.body)}}}"
    raise TypeError(f"not an M-SRL statement: {t!r}")


def expression_text(e: Node) -> str:
    """Render any expression node (arithmetic or boolean)."""
    if isinstance(e, (IntLit, VarRef, Add, Sub)):
        return pretty_arith(e)
    return pretty_bool(e)
