"""Big-step interpreter for forest.

A from-to loop is executed through its desugaring into the internal
extension of the language (``assert`` and ``loop until``)::

    if (u <= v) {
        assert(u <= i and i <= v); assert(i = u or e_in);
        loop until (i = v or e_out) { P; i += 1; assert(!e_in) }
    } else {
        assert(v <= i and i <= u); assert(i = u or e_in);
        loop until (i = v or e_out) { i -= 1; P^-; assert(!e_in) }
    }

The re-entry check is ``!e_in``; right after ``i`` has moved one step away
from ``u`` this is the same as ``!(i = u or e_in)``.

Terms are compiled once into Python closures over a mutable variable
dictionary; :class:`Program` holds the compiled form so callers that run one
term against many states pay the compile cost once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Union

from . import codegen
from .syntax import (
    NOLOC,
    Add,
    And,
    BoolLit,
    Dec,
    Eq,
    FromTo,
    Gt,
    If,
    IllFormedError,
    Inc,
    IntLit,
    Le,
    Loc,
    Node,
    Not,
    Or,
    Seq,
    Skip,
    Sub,
    Term,
    VarRef,
    flatten,
    invert_unchecked,
    validate,
)


# -- states -------------------------------------------------------------------


class State:
    """Total map from variable names to integers; unbound names read as 0.

    Zero bindings are not stored, so two states compare equal exactly when
    they agree on every variable.
    """

    __slots__ = ("_b",)

    def __init__(self, bindings: Mapping[str, int] | Iterable[tuple[str, int]] = (), **kw: int):
        b = dict(bindings)
        b.update(kw)
        self._b = {k: int(v) for k, v in b.items() if v != 0}

    def __getitem__(self, name: str) -> int:
        return self._b.get(name, 0)

    def get(self, name: str) -> int:
        return self._b.get(name, 0)

    def set(self, **updates: int) -> "State":
        b = dict(self._b)
        b.update(updates)
        return State(b)

    def update(self, updates: Mapping[str, int]) -> "State":
        b = dict(self._b)
        b.update(updates)
        return State(b)

    def support(self) -> frozenset[str]:
        """Variables bound to a non-zero value."""
        return frozenset(self._b)

    def items(self):
        return sorted(self._b.items())

    def restrict(self, names: Iterable[str]) -> dict[str, int]:
        return {n: self._b.get(n, 0) for n in sorted(names)}

    def agrees_on(self, other: "State", names: Iterable[str]) -> bool:
        return all(self[n] == other[n] for n in names)

    def as_dict(self) -> dict[str, int]:
        return dict(self._b)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, State):
            return NotImplemented
        return self._b == other._b

    def __hash__(self) -> int:
        return hash(frozenset(self._b.items()))

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={v}" for k, v in self.items())
        return f"State({inner})"


# -- outcomes -----------------------------------------------------------------


OUT_OF_RANGE = "out-of-range"
ENTRY_CONDITION = "entry-condition"
RE_ENTRY_CONDITION = "re-entry-condition"


@dataclass(frozen=True)
class Success:
    state: State


@dataclass(frozen=True)
class Failure:
    """The failing result of an interpretation (bottom)."""

    reason: str
    loc: Loc = NOLOC
    lead: str = ""


@dataclass(frozen=True)
class FuelExhausted:
    steps_used: int


Outcome = Union[Success, Failure, FuelExhausted]


@dataclass(frozen=True)
class StepStats:
    assignments: int = 0
    guard_evals: int = 0
    assert_evals: int = 0
    loop_unfoldings: int = 0

    @property
    def total(self) -> int:
        return self.assignments + self.guard_evals + self.assert_evals + self.loop_unfoldings

    def as_dict(self) -> dict[str, int]:
        return {
            "assignments": self.assignments,
            "guardEvals": self.guard_evals,
            "assertEvals": self.assert_evals,
            "loopUnfoldings": self.loop_unfoldings,
            "total": self.total,
        }


@dataclass(frozen=True)
class LoopRecord:
    """One execution of a from-to loop that got past its entry asserts."""

    loc: Loc
    lead: str
    forward: bool
    span: int  # |v - u| at entry
    unfoldings: int


@dataclass(frozen=True)
class TraceEvent:
    step: int
    rule: str
    loc: Loc
    var: str | None = None
    old: int | None = None
    new: int | None = None

    def __str__(self) -> str:
        delta = "-" if self.var is None else f"{self.var}={self.old}→{self.new}"
        return f"{self.step}\t{self.rule}\t{self.loc}\t{delta}"


# -- the internal extension ---------------------------------------------------


@dataclass(frozen=True, eq=False)
class Assert(Node):
    cond: Node
    role: str
    loc: Loc = field(default=NOLOC, repr=False)
    lead: str = ""

    def key(self) -> tuple:
        return ("assert", self.cond.key(), self.role)


@dataclass(frozen=True, eq=False)
class LoopUntil(Node):
    """``loop until (lead = bound or escape) {body}``."""

    lead: str
    bound: Node
    escape: Node
    body: Node
    loc: Loc = field(default=NOLOC, repr=False)
    # metadata for loop records, not part of the semantics
    start: Node = IntLit(0)
    forward: bool = True

    def key(self) -> tuple:
        return ("until", self.lead, self.bound.key(), self.escape.key(), self.body.key())


ExtTerm = Union[Term, Assert, LoopUntil]


def desugar_from_to(loop: FromTo) -> If:
    """The internal-language term that gives ``loop`` its meaning."""
    i = VarRef(loop.lead)
    u, v = loop.from_bound, loop.to_bound
    loc, name = loop.loc, loop.lead
    entry = Assert(Or(Eq(i, u), loop.from_escape), ENTRY_CONDITION, loc, name)
    re_entry = Assert(Not(loop.from_escape), RE_ENTRY_CONDITION, loc, name)
    forward = Seq(
        Assert(And(Le(u, i), Le(i, v)), OUT_OF_RANGE, loc, name),
        Seq(entry, LoopUntil(
            name, v, loop.to_escape,
            Seq(loop.body, Seq(Inc(name, IntLit(1), loc), re_entry, loc), loc),
            loc, u, True,
        ), loc),
        loc,
    )
    backward = Seq(
        Assert(And(Le(v, i), Le(i, u)), OUT_OF_RANGE, loc, name),
        Seq(entry, LoopUntil(
            name, v, loop.to_escape,
            Seq(Dec(name, IntLit(1), loc), Seq(invert_unchecked(loop.body), re_entry, loc), loc),
            loc, u, False,
        ), loc),
        loc,
    )
    return If(Le(u, v), forward, backward, loc)


# -- expression evaluation ----------------------------------------------------


def eval_arith(state: State | Mapping[str, int], expr: Node) -> int:
    if isinstance(expr, IntLit):
        return expr.value
    if isinstance(expr, VarRef):
        return state.get(expr.name) if isinstance(state, State) else state.get(expr.name, 0)
    if isinstance(expr, Add):
        return eval_arith(state, expr.left) + eval_arith(state, expr.right)
    if isinstance(expr, Sub):
        return eval_arith(state, expr.left) - eval_arith(state, expr.right)
    raise TypeError(f"not an arithmetic expression: {expr!r}")


def eval_bool(state: State | Mapping[str, int], expr: Node) -> int:
    """Truth value in {0, 1}; connectives are the quadratic polynomials."""
    if isinstance(expr, BoolLit):
        return 1 if expr.value else 0
    if isinstance(expr, Eq):
        return 1 if eval_arith(state, expr.left) == eval_arith(state, expr.right) else 0
    if isinstance(expr, Le):
        return 1 if eval_arith(state, expr.left) <= eval_arith(state, expr.right) else 0
    if isinstance(expr, Gt):
        return 1 if eval_arith(state, expr.left) > eval_arith(state, expr.right) else 0
    if isinstance(expr, Not):
        return 1 - eval_bool(state, expr.inner)
    if isinstance(expr, And):
        m, n = eval_bool(state, expr.left), eval_bool(state, expr.right)
        return m * n
    if isinstance(expr, Or):
        m, n = eval_bool(state, expr.left), eval_bool(state, expr.right)
        return m + n - m * n
    raise TypeError(f"not a boolean expression: {expr!r}")


# -- compilation --------------------------------------------------------------


class _Bottom(Exception):
    def __init__(self, reason: str, loc: Loc, lead: str):
        self.reason, self.loc, self.lead = reason, loc, lead


class _OutOfFuel(Exception):
    pass


class _Ctx:
    __slots__ = ("assignments", "guards", "asserts", "unfoldings", "fuel",
                 "trace", "loops", "step")

    def __init__(self, fuel, trace, loops):
        self.assignments = self.guards = self.asserts = self.unfoldings = 0
        self.fuel = fuel
        self.trace = trace
        self.loops = loops
        self.step = 0

    def emit(self, rule: str, loc: Loc, var=None, old=None, new=None) -> None:
        self.step += 1
        self.trace(TraceEvent(self.step, rule, loc, var, old, new))

    def stats(self) -> StepStats:
        return StepStats(self.assignments, self.guards, self.asserts, self.unfoldings)


Env = dict
Code = Callable[[Env, _Ctx], None]


def compile_arith(e: Node) -> Callable[[Env], int]:
    if isinstance(e, IntLit):
        v = e.value
        return lambda env: v
    if isinstance(e, VarRef):
        name = e.name
        return lambda env: env.get(name, 0)
    if isinstance(e, (Add, Sub)):
        left, right = compile_arith(e.left), compile_arith(e.right)
        if isinstance(e, Add):
            return lambda env: left(env) + right(env)
        return lambda env: left(env) - right(env)
    raise TypeError(f"not an arithmetic expression: {e!r}")


def compile_bool(e: Node) -> Callable[[Env], int]:
    if isinstance(e, BoolLit):
        v = 1 if e.value else 0
        return lambda env: v
    if isinstance(e, (Eq, Le, Gt)):
        if isinstance(e, Eq) and isinstance(e.left, VarRef):
            # leaf shapes seen in nearly every guard and loop header
            a = e.left.name
            if isinstance(e.right, IntLit):
                k = e.right.value
                return lambda env: 1 if env.get(a, 0) == k else 0
            if isinstance(e.right, VarRef):
                b = e.right.name
                return lambda env: 1 if env.get(a, 0) == env.get(b, 0) else 0
        left, right = compile_arith(e.left), compile_arith(e.right)
        if isinstance(e, Eq):
            return lambda env: 1 if left(env) == right(env) else 0
        if isinstance(e, Le):
            return lambda env: 1 if left(env) <= right(env) else 0
        return lambda env: 1 if left(env) > right(env) else 0
    if isinstance(e, Not):
        inner = compile_bool(e.inner)
        return lambda env: 1 - inner(env)
    if isinstance(e, And):
        left, right = compile_bool(e.left), compile_bool(e.right)
        return lambda env: left(env) * right(env)
    if isinstance(e, Or):
        left, right = compile_bool(e.left), compile_bool(e.right)

        def disj(env):
            m, n = left(env), right(env)
            return m + n - m * n
        return disj
    raise TypeError(f"not a boolean expression: {e!r}")


def _compile(t: Node) -> Code:
    if isinstance(t, Skip):
        loc = t.loc

        def skip(env, ctx):
            if ctx.trace is not None:
                ctx.emit("Skip", loc)
        return skip

    if isinstance(t, (Inc, Dec)):
        name, expr, loc = t.target, compile_arith(t.expr), t.loc
        sign = 1 if isinstance(t, Inc) else -1
        rule = "Inc" if sign == 1 else "Dec"

        def assign(env, ctx):
            old = env.get(name, 0)
            new = old + sign * expr(env)
            env[name] = new
            ctx.assignments += 1
            if ctx.trace is not None:
                ctx.emit(rule, loc, name, old, new)
        return assign

    if isinstance(t, Seq):
        parts = tuple(_compile(s) for s in flatten(t))

        def sequence(env, ctx):
            for p in parts:
                p(env, ctx)
        return sequence

    if isinstance(t, If):
        guard, loc = compile_bool(t.guard), t.loc
        then, other = _compile(t.then_branch), _compile(t.else_branch)

        def select(env, ctx):
            ctx.guards += 1
            if guard(env) == 1:
                if ctx.trace is not None:
                    ctx.emit("IfTrue", loc)
                then(env, ctx)
            else:
                if ctx.trace is not None:
                    ctx.emit("IfFalse", loc)
                other(env, ctx)
        return select

    if isinstance(t, Assert):
        cond, loc, role, lead = compile_bool(t.cond), t.loc, t.role, t.lead

        def check(env, ctx):
            ctx.asserts += 1
            if cond(env) != 1:
                if ctx.trace is not None:
                    ctx.emit("Assert0", loc)
                raise _Bottom(role, loc, lead)
            if ctx.trace is not None:
                ctx.emit("Assert1", loc)
        return check

    if isinstance(t, LoopUntil):
        return _compile_loop(t)

    if isinstance(t, FromTo):
        return _compile_from_to(t)

    raise TypeError(f"cannot compile {t!r}")


def _compile_loop(t: LoopUntil) -> Code:
    name, loc, forward = t.lead, t.loc, t.forward
    bound, escape = compile_arith(t.bound), compile_bool(t.escape)
    start = compile_arith(t.start)
    body = _compile(t.body)

    def loop(env, ctx):
        span = abs(bound(env) - start(env))
        count = 0
        while True:
            ctx.guards += 1
            if env.get(name, 0) == bound(env) or escape(env) == 1:
                if ctx.trace is not None:
                    ctx.emit("LoopBase", loc)
                break
            if ctx.fuel is not None and ctx.unfoldings >= ctx.fuel:
                raise _OutOfFuel()
            if ctx.trace is not None:
                ctx.emit("LoopRec", loc)
            ctx.unfoldings += 1
            count += 1
            body(env, ctx)
        if ctx.loops is not None:
            ctx.loops.append(LoopRecord(loc, name, forward, span, count))
    return loop


def _compile_from_to(t: FromTo) -> Code:
    desugared = desugar_from_to(t)
    direction = compile_bool(desugared.guard)
    loc = t.loc
    branches: list[Code | None] = [None, None]
    sources = (desugared.then_branch, desugared.else_branch)

    def from_to(env, ctx):
        if ctx.trace is not None:
            ctx.emit("FromTo", loc)
        ctx.guards += 1
        k = 0 if direction(env) == 1 else 1
        if ctx.trace is not None:
            ctx.emit("IfTrue" if k == 0 else "IfFalse", loc)
        code = branches[k]
        if code is None:
            # compiled on first use: the backward branch holds the inverted body
            code = branches[k] = _compile(sources[k])
        code(env, ctx)
    return from_to


class Program:
    """A validated, compiled forest term.

    From the second plain run on, runs go through :mod:`forest.codegen` when
    ``fast`` is set; generating code costs more than a single short run.
    Runs that ask for a trace or loop records use the closure interpreter,
    which is also the fallback for terms too large to generate.
    """

    def __init__(self, term: Term, *, check: bool = True, fast: bool = True):
        if check:
            violations = validate(term)
            if violations:
                raise IllFormedError(violations)
        self.term = term
        self._code = _compile(term)
        self._fast = None
        self._fast_pending = fast
        self._plain_runs = 0

    def _fast_runner(self):
        self._plain_runs += 1
        if self._fast_pending and self._plain_runs > 1:
            self._fast_pending = False
            self._fast = codegen.build(self.term)
        return self._fast

    def run(
        self,
        initial: State | Mapping[str, int] | None = None,
        fuel: int | None = None,
        *,
        trace: Callable[[TraceEvent], None] | None = None,
        loop_log: list | None = None,
    ) -> tuple[Outcome, StepStats]:
        if initial is None:
            env = {}
        elif isinstance(initial, State):
            env = initial.as_dict()
        else:
            env = dict(initial)
        if trace is None and loop_log is None:
            fast = self._fast_runner()
            if fast is not None:
                return self._run_fast(fast, env, fuel)
        ctx = _Ctx(fuel, trace, loop_log)
        try:
            self._code(env, ctx)
        except _Bottom as b:
            return Failure(b.reason, b.loc, b.lead), ctx.stats()
        except _OutOfFuel:
            stats = ctx.stats()
            return FuelExhausted(stats.total), stats
        return Success(State(env)), ctx.stats()

    @staticmethod
    def _run_fast(fast, env: dict, fuel: int | None) -> tuple[Outcome, StepStats]:
        try:
            counts = fast(env, float("inf") if fuel is None else fuel)
        except codegen.Stop as stop:
            stats = StepStats(*stop.counts)
            if stop.reason is None:
                return FuelExhausted(stats.total), stats
            return Failure(stop.reason, stop.loc, stop.lead), stats
        return Success(State(env)), StepStats(*counts)


def run(
    term: Term,
    initial: State | Mapping[str, int] | None = None,
    fuel: int | None = None,
    *,
    trace: Callable[[TraceEvent], None] | None = None,
    loop_log: list | None = None,
) -> tuple[Outcome, StepStats]:
    """Interpret ``term`` from ``initial``; see :class:`Program` for reuse."""
    return Program(term).run(initial, fuel, trace=trace, loop_log=loop_log)


def trace_lines(term: Term, initial=None, fuel=None) -> Iterator[str]:
    events: list[TraceEvent] = []
    run(term, initial, fuel, trace=events.append)
    for e in events:
        yield str(e)
