"""Abstract syntax of forest terms.

Terms may be built in an ill-formed state; :func:`validate` reports the
side-conditions that fail.  Equality between nodes is structural, ignores
source locations, and treats ``;`` as associative (the concrete syntax has
no way to group a sequence, so ``(P;Q);R`` and ``P;(Q;R)`` print the same).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union


@dataclass(frozen=True)
class Loc:
    line: int = 0
    col: int = 0

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


NOLOC = Loc()


class Node:
    """Base for expression and term nodes: structural equality and hashing."""

    __slots__ = ()

    def key(self) -> tuple:
        raise NotImplementedError

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Node):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())


# -- arithmetic expressions ---------------------------------------------------


@dataclass(frozen=True, eq=False)
class IntLit(Node):
    value: int

    def key(self) -> tuple:
        return ("int", self.value)


@dataclass(frozen=True, eq=False)
class VarRef(Node):
    name: str

    def key(self) -> tuple:
        return ("var", self.name)


@dataclass(frozen=True, eq=False)
class Add(Node):
    left: "ArithExpr"
    right: "ArithExpr"

    def key(self) -> tuple:
        return ("+", self.left.key(), self.right.key())


@dataclass(frozen=True, eq=False)
class Sub(Node):
    left: "ArithExpr"
    right: "ArithExpr"

    def key(self) -> tuple:
        return ("-", self.left.key(), self.right.key())


ArithExpr = Union[IntLit, VarRef, Add, Sub]


# -- boolean expressions ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BoolLit(Node):
    value: bool

    def key(self) -> tuple:
        return ("bool", self.value)


FALSE = BoolLit(False)
TRUE = BoolLit(True)


@dataclass(frozen=True, eq=False)
class Eq(Node):
    left: ArithExpr
    right: ArithExpr

    def key(self) -> tuple:
        return ("=", self.left.key(), self.right.key())


@dataclass(frozen=True, eq=False)
class Not(Node):
    inner: "BoolExpr"

    def key(self) -> tuple:
        return ("!", self.inner.key())


@dataclass(frozen=True, eq=False)
class And(Node):
    left: "BoolExpr"
    right: "BoolExpr"

    def key(self) -> tuple:
        return ("and", self.left.key(), self.right.key())


@dataclass(frozen=True, eq=False)
class Or(Node):
    left: "BoolExpr"
    right: "BoolExpr"

    def key(self) -> tuple:
        return ("or", self.left.key(), self.right.key())


@dataclass(frozen=True, eq=False)
class Le(Node):
    """``left <= right``; only produced when desugaring from-to loops."""

    left: ArithExpr
    right: ArithExpr

    def key(self) -> tuple:
        return ("<=", self.left.key(), self.right.key())


@dataclass(frozen=True, eq=False)
class Gt(Node):
    """``left > right``; only produced when desugaring from-to loops."""

    left: ArithExpr
    right: ArithExpr

    def key(self) -> tuple:
        return (">", self.left.key(), self.right.key())


BoolExpr = Union[BoolLit, Eq, Not, And, Or, Le, Gt]


# -- terms --------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Skip(Node):
    loc: Loc = field(default=NOLOC, repr=False)

    def key(self) -> tuple:
        return ("skip",)


@dataclass(frozen=True, eq=False)
class Inc(Node):
    target: str
    expr: ArithExpr
    loc: Loc = field(default=NOLOC, repr=False)

    def key(self) -> tuple:
        return ("+=", self.target, self.expr.key())


@dataclass(frozen=True, eq=False)
class Dec(Node):
    target: str
    expr: ArithExpr
    loc: Loc = field(default=NOLOC, repr=False)

    def key(self) -> tuple:
        return ("-=", self.target, self.expr.key())


@dataclass(frozen=True, eq=False)
class Seq(Node):
    first: "Term"
    second: "Term"
    loc: Loc = field(default=NOLOC, repr=False)

    def key(self) -> tuple:
        return ("seq",) + tuple(t.key() for t in flatten(self))


@dataclass(frozen=True, eq=False)
class If(Node):
    guard: BoolExpr
    then_branch: "Term"
    else_branch: "Term"
    loc: Loc = field(default=NOLOC, repr=False)

    def key(self) -> tuple:
        return ("if", self.guard.key(), self.then_branch.key(), self.else_branch.key())


@dataclass(frozen=True, eq=False)
class FromTo(Node):
    """``from (lead = from_bound or from_escape) to (lead = to_bound or to_escape) {body}``."""

    lead: str
    from_bound: ArithExpr
    from_escape: BoolExpr
    to_bound: ArithExpr
    to_escape: BoolExpr
    body: "Term"
    loc: Loc = field(default=NOLOC, repr=False)

    def key(self) -> tuple:
        return (
            "fromto",
            self.lead,
            self.from_bound.key(),
            self.from_escape.key(),
            self.to_bound.key(),
            self.to_escape.key(),
            self.body.key(),
        )


Term = Union[Skip, Inc, Dec, Seq, If, FromTo]


def flatten(term: Term) -> Iterator[Term]:
    """Yield the non-sequence components of ``term`` left to right."""
    stack = [term]
    while stack:
        t = stack.pop()
        if isinstance(t, Seq):
            stack.append(t.second)
            stack.append(t.first)
        else:
            yield t


def seq(*terms: Term) -> Term:
    """Right-nested sequence of ``terms``; ``seq()`` is ``skip``."""
    if not terms:
        return Skip()
    out = terms[-1]
    for t in reversed(terms[:-1]):
        out = Seq(t, out, getattr(t, "loc", NOLOC))
    return out


# -- domains ------------------------------------------------------------------


def expr_dom(expr: Node) -> frozenset[str]:
    """Variables occurring in an arithmetic or boolean expression."""
    if isinstance(expr, VarRef):
        return frozenset((expr.name,))
    if isinstance(expr, (IntLit, BoolLit)):
        return frozenset()
    if isinstance(expr, Not):
        return expr_dom(expr.inner)
    if isinstance(expr, (Add, Sub, Eq, And, Or, Le, Gt)):
        return expr_dom(expr.left) | expr_dom(expr.right)
    raise TypeError(f"not an expression: {expr!r}")


def dom(term: Term) -> frozenset[str]:
    if isinstance(term, Skip):
        return frozenset()
    if isinstance(term, (Inc, Dec)):
        return expr_dom(term.expr) | {term.target}
    if isinstance(term, Seq):
        return dom(term.first) | dom(term.second)
    if isinstance(term, If):
        return expr_dom(term.guard) | dom(term.then_branch) | dom(term.else_branch)
    if isinstance(term, FromTo):
        return (
            expr_dom(term.from_escape)
            | expr_dom(term.to_escape)
            | expr_dom(term.from_bound)
            | expr_dom(term.to_bound)
            | dom(term.body)
            | {term.lead}
        )
    raise TypeError(f"not a term: {term!r}")


def wdom(term: Term) -> frozenset[str]:
    if isinstance(term, Skip):
        return frozenset()
    if isinstance(term, (Inc, Dec)):
        return frozenset((term.target,))
    if isinstance(term, Seq):
        return wdom(term.first) | wdom(term.second)
    if isinstance(term, If):
        return wdom(term.then_branch) | wdom(term.else_branch)
    if isinstance(term, FromTo):
        return wdom(term.body) | {term.lead}
    raise TypeError(f"not a term: {term!r}")


def lead(term: Term) -> frozenset[str]:
    """Leading variables: only sequences and from-to loops contribute."""
    if isinstance(term, Seq):
        return lead(term.first) | lead(term.second)
    if isinstance(term, FromTo):
        return lead(term.body) | {term.lead}
    if isinstance(term, (Skip, Inc, Dec, If)):
        return frozenset()
    raise TypeError(f"not a term: {term!r}")


# -- well-formedness ----------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    loc: Loc = NOLOC

    def __str__(self) -> str:
        return f"{self.loc}: {self.message}"


SELF_ASSIGN = "self-assignment-source"
GUARD_WRITE = "guard-write-overlap"
LOOP_CONTROL_WRITE = "loop-control-write-overlap"
INTERNAL_OP = "internal-only-operator"


def _has_internal(expr: Node) -> bool:
    if isinstance(expr, (Le, Gt)):
        return True
    if isinstance(expr, Not):
        return _has_internal(expr.inner)
    if isinstance(expr, (And, Or)):
        return _has_internal(expr.left) or _has_internal(expr.right)
    return False


def validate(term: Term) -> list[Violation]:
    """Every violated side-condition in ``term``; empty means well-formed."""
    out: list[Violation] = []
    _check(term, out)
    return out


def is_well_formed(term: Term) -> bool:
    return not validate(term)


def _check(term: Term, out: list[Violation]) -> None:
    if isinstance(term, Skip):
        return
    if isinstance(term, (Inc, Dec)):
        if term.target in expr_dom(term.expr):
            out.append(Violation(
                SELF_ASSIGN,
                f"target occurs in source expression: {term.target}",
                term.loc,
            ))
        return
    if isinstance(term, Seq):
        for t in flatten(term):
            _check(t, out)
        return
    if isinstance(term, If):
        if _has_internal(term.guard):
            out.append(Violation(INTERNAL_OP, "comparison <= or > in guard", term.loc))
        clash = expr_dom(term.guard) & (wdom(term.then_branch) | wdom(term.else_branch))
        if clash:
            out.append(Violation(
                GUARD_WRITE,
                f"branches write guard variables: {', '.join(sorted(clash))}",
                term.loc,
            ))
        _check(term.then_branch, out)
        _check(term.else_branch, out)
        return
    if isinstance(term, FromTo):
        for e in (term.from_escape, term.to_escape):
            if _has_internal(e):
                out.append(Violation(INTERNAL_OP, "comparison <= or > in loop header", term.loc))
        written = wdom(term.body)
        if term.lead in written:
            out.append(Violation(
                LOOP_CONTROL_WRITE,
                f"body writes leading variable: {term.lead}",
                term.loc,
            ))
        clash = (expr_dom(term.from_bound) | expr_dom(term.to_bound)) & written
        if clash:
            out.append(Violation(
                LOOP_CONTROL_WRITE,
                f"body writes loop bound variables: {', '.join(sorted(clash))}",
                term.loc,
            ))
        _check(term.body, out)
        return
    raise TypeError(f"not a term: {term!r}")


class IllFormedError(ValueError):
    def __init__(self, violations: list[Violation]):
        self.violations = violations
        super().__init__("; ".join(str(v) for v in violations))


# -- inversion ----------------------------------------------------------------


def invert(term: Term) -> Term:
    """The inverse term.  Loops swap their two headers and keep the body."""
    violations = validate(term)
    if violations:
        raise IllFormedError(violations)
    return invert_unchecked(term)


def invert_unchecked(term: Term) -> Term:
    if isinstance(term, Skip):
        return term
    if isinstance(term, Inc):
        return Dec(term.target, term.expr, term.loc)
    if isinstance(term, Dec):
        return Inc(term.target, term.expr, term.loc)
    if isinstance(term, Seq):
        return Seq(invert_unchecked(term.second), invert_unchecked(term.first), term.loc)
    if isinstance(term, If):
        return If(
            term.guard,
            invert_unchecked(term.then_branch),
            invert_unchecked(term.else_branch),
            term.loc,
        )
    if isinstance(term, FromTo):
        return FromTo(
            term.lead,
            term.to_bound,
            term.to_escape,
            term.from_bound,
            term.from_escape,
            term.body,
            term.loc,
        )
    raise TypeError(f"not a term: {term!r}")


def subterms(term: Term) -> Iterator[Term]:
    """Pre-order walk over ``term`` and all nested terms."""
    yield term
    if isinstance(term, Seq):
        yield from subterms(term.first)
        yield from subterms(term.second)
    elif isinstance(term, If):
        yield from subterms(term.then_branch)
        yield from subterms(term.else_branch)
    elif isinstance(term, FromTo):
        yield from subterms(term.body)
