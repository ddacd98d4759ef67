"""Fast path: a forest term translated to one Python function.

Variables become locals and the four step counters become local integers,
so a run costs one call instead of a closure call per node.  Both branches
of every from-to are emitted (the backward one holding the inverted body),
which doubles the code per nesting level; terms that nest too deeply for
that, or for Python's block limit, fall back to the closure interpreter.
Tracing and loop records are only offered by the closure interpreter.
"""

from __future__ import annotations

from typing import Callable

from .syntax import (
    Add, And, BoolLit, Dec, Eq, FromTo, Gt, If, Inc, IntLit, Le, Node, Not, Or,
    Seq, Skip, Sub, Term, VarRef, dom, flatten, invert_unchecked,
)

MAX_LINES = 20_000


class Stop(Exception):
    """Raised out of generated code; carries the step counts at that point."""

    def __init__(self, reason: str | None, loc=None, lead: str = ""):
        self.reason, self.loc, self.lead = reason, loc, lead
        self.counts = (0, 0, 0, 0)


class TooLarge(Exception):
    pass


class _Emitter:
    def __init__(self, names: dict[str, str]):
        self.names = names
        self.lines: list[str] = []
        self.consts: list = []

    def const(self, value) -> str:
        self.consts.append(value)
        return f"K[{len(self.consts) - 1}]"

    def out(self, depth: int, text: str) -> None:
        self.lines.append("    " * depth + text)
        if len(self.lines) > MAX_LINES:
            raise TooLarge()

    def arith(self, e: Node) -> str:
        if isinstance(e, IntLit):
            return f"({e.value})"
        if isinstance(e, VarRef):
            return self.names[e.name]
        if isinstance(e, Add):
            return f"({self.arith(e.left)} + {self.arith(e.right)})"
        if isinstance(e, Sub):
            return f"({self.arith(e.left)} - {self.arith(e.right)})"
        raise TypeError(f"not an arithmetic expression: {e!r}")

    def cond(self, e: Node) -> str:
        # on values in {0, 1}, 1-m, m*n and m+n-m*n are not, and, or
        if isinstance(e, BoolLit):
            return "True" if e.value else "False"
        if isinstance(e, Eq):
            return f"({self.arith(e.left)} == {self.arith(e.right)})"
        if isinstance(e, Le):
            return f"({self.arith(e.left)} <= {self.arith(e.right)})"
        if isinstance(e, Gt):
            return f"({self.arith(e.left)} > {self.arith(e.right)})"
        if isinstance(e, Not):
            return f"(not {self.cond(e.inner)})"
        if isinstance(e, And):
            return f"({self.cond(e.left)} and {self.cond(e.right)})"
        if isinstance(e, Or):
            return f"({self.cond(e.left)} or {self.cond(e.right)})"
        raise TypeError(f"not a boolean expression: {e!r}")

    def term(self, t: Node, d: int) -> None:
        if isinstance(t, Skip):
            self.out(d, "pass")
        elif isinstance(t, (Inc, Dec)):
            op = "+=" if isinstance(t, Inc) else "-="
            self.out(d, f"{self.names[t.target]} {op} {self.arith(t.expr)}")
            self.out(d, "_a += 1")
        elif isinstance(t, Seq):
            for s in flatten(t):
                self.term(s, d)
        elif isinstance(t, If):
            self.out(d, "_g += 1")
            self.out(d, f"if {self.cond(t.guard)}:")
            self.term(t.then_branch, d + 1)
            self.out(d, "else:")
            self.term(t.else_branch, d + 1)
        elif isinstance(t, FromTo):
            self.from_to(t, d)
        else:
            raise TypeError(f"cannot compile {t!r}")

    def from_to(self, t: FromTo, d: int) -> None:
        i = self.names[t.lead]
        u, v = self.arith(t.from_bound), self.arith(t.to_bound)
        e_in, e_out = self.cond(t.from_escape), self.cond(t.to_escape)
        loc, lead = self.const(t.loc), self.const(t.lead)

        def bottom(reason: str) -> str:
            return f"raise Stop({self.const(reason)}, {loc}, {lead})"

        self.out(d, "_g += 1")
        self.out(d, f"if {u} <= {v}:")
        for forward in (True, False):
            lo, hi = (u, v) if forward else (v, u)
            self.out(d + 1, "_s += 2")
            self.out(d + 1, f"if not ({lo} <= {i} <= {hi}):")
            self.out(d + 2, "_s -= 1")
            self.out(d + 2, bottom("out-of-range"))
            self.out(d + 1, f"if not ({i} == {u} or {e_in}):")
            self.out(d + 2, bottom("entry-condition"))
            self.out(d + 1, "while True:")
            self.out(d + 2, "_g += 1")
            self.out(d + 2, f"if {i} == {v} or {e_out}:")
            self.out(d + 3, "break")
            self.out(d + 2, "if _u >= fuel:")
            self.out(d + 3, "raise Stop(None)")
            self.out(d + 2, "_u += 1")
            if forward:
                self.term(t.body, d + 2)
                self.out(d + 2, f"{i} += 1")
                self.out(d + 2, "_a += 1")
            else:
                self.out(d + 2, f"{i} -= 1")
                self.out(d + 2, "_a += 1")
                self.term(invert_unchecked(t.body), d + 2)
            self.out(d + 2, "_s += 1")
            self.out(d + 2, f"if {e_in}:")
            self.out(d + 3, bottom("re-entry-condition"))
            if forward:
                self.out(d, "else:")


RunFn = Callable[[dict, float], tuple[int, int, int, int]]


def generate(term: Term) -> tuple[str, list]:
    """Python source of ``_run(env, fuel)`` and its constant table."""
    names = {x: f"_v{k}" for k, x in enumerate(sorted(dom(term)))}
    em = _Emitter(names)
    em.out(0, "def _run(env, fuel):")
    for x, local in names.items():
        em.out(1, f"{local} = env.get({x!r}, 0)")
    em.out(1, "_a = _g = _s = _u = 0")
    em.out(1, "try:")
    em.term(term, 2)
    em.out(1, "except Stop as stop:")
    em.out(2, "stop.counts = (_a, _g, _s, _u)")
    em.out(2, "raise")
    for x, local in names.items():
        em.out(1, f"env[{x!r}] = {local}")
    em.out(1, "return (_a, _g, _s, _u)")
    return "\n".join(em.lines) + "\n", em.consts


def build(term: Term) -> RunFn | None:
    """Compiled runner for ``term``, or None when the term is too large."""
    try:
        source, consts = generate(term)
        namespace = {"Stop": Stop, "K": consts}
        exec(compile(source, "<forest>", "exec"), namespace)
    except (TooLarge, SyntaxError, RecursionError, MemoryError):
        return None
    return namespace["_run"]
