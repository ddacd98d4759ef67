"""M-SRL: increments, decrements, sequences and ``for r {P}`` over integer
registers, plus its translation into forest.

``for r {P}`` runs ``P`` r times when r >= 0 and the inverse of ``P`` |r|
times otherwise; ``P`` may not write ``r``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import count
from typing import Iterator, Mapping, Union

from . import syntax as fs
from .interp import Program, State, Success
from .syntax import IntLit, Node, VarRef


@dataclass(frozen=True, eq=False)
class MInc(Node):
    reg: str

    def key(self) -> tuple:
        return ("INC", self.reg)


@dataclass(frozen=True, eq=False)
class MDec(Node):
    reg: str

    def key(self) -> tuple:
        return ("DEC", self.reg)


@dataclass(frozen=True, eq=False)
class MSeq(Node):
    first: "MsrlTerm"
    second: "MsrlTerm"

    def key(self) -> tuple:
        return ("seq",) + tuple(t.key() for t in mflatten(self))


@dataclass(frozen=True, eq=False)
class MFor(Node):
    reg: str
    body: "MsrlTerm"

    def key(self) -> tuple:
        return ("for", self.reg, self.body.key())


MsrlTerm = Union[MInc, MDec, MSeq, MFor]


def mflatten(term: MsrlTerm) -> Iterator[MsrlTerm]:
    stack = [term]
    while stack:
        t = stack.pop()
        if isinstance(t, MSeq):
            stack.append(t.second)
            stack.append(t.first)
        else:
            yield t


def mseq(*terms: MsrlTerm) -> MsrlTerm:
    if not terms:
        raise ValueError("an M-SRL program has at least one statement")
    out = terms[-1]
    for t in reversed(terms[:-1]):
        out = MSeq(t, out)
    return out


def msrl_dom(term: MsrlTerm) -> frozenset[str]:
    if isinstance(term, (MInc, MDec)):
        return frozenset((term.reg,))
    if isinstance(term, MSeq):
        return msrl_dom(term.first) | msrl_dom(term.second)
    if isinstance(term, MFor):
        return msrl_dom(term.body) | {term.reg}
    raise TypeError(f"not an M-SRL term: {term!r}")


def msrl_wdom(term: MsrlTerm) -> frozenset[str]:
    if isinstance(term, (MInc, MDec)):
        return frozenset((term.reg,))
    if isinstance(term, MSeq):
        return msrl_wdom(term.first) | msrl_wdom(term.second)
    if isinstance(term, MFor):
        return msrl_wdom(term.body)
    raise TypeError(f"not an M-SRL term: {term!r}")


def validate_msrl(term: MsrlTerm) -> list[fs.Violation]:
    """One violation per ``for`` whose body writes its own register."""
    out = []
    for t in _msubterms(term):
        if isinstance(t, MFor) and t.reg in msrl_wdom(t.body):
            out.append(fs.Violation(
                fs.LOOP_CONTROL_WRITE, f"for-loop body writes its register: {t.reg}"
            ))
    return out


def _msubterms(term: MsrlTerm) -> Iterator[MsrlTerm]:
    yield term
    if isinstance(term, MSeq):
        yield from _msubterms(term.first)
        yield from _msubterms(term.second)
    elif isinstance(term, MFor):
        yield from _msubterms(term.body)


def invert_msrl(term: MsrlTerm) -> MsrlTerm:
    if isinstance(term, MInc):
        return MDec(term.reg)
    if isinstance(term, MDec):
        return MInc(term.reg)
    if isinstance(term, MSeq):
        return MSeq(invert_msrl(term.second), invert_msrl(term.first))
    if isinstance(term, MFor):
        return MFor(term.reg, invert_msrl(term.body))
    raise TypeError(f"not an M-SRL term: {term!r}")


class StepLimitExceeded(RuntimeError):
    pass


def run_msrl(
    term: MsrlTerm,
    initial: State | Mapping[str, int] | None = None,
    fuel: int | None = None,
) -> State:
    """Final state of ``term``.  ``fuel`` caps INC/DEC steps (tooling only)."""
    violations = validate_msrl(term)
    if violations:
        raise fs.IllFormedError(violations)
    env = initial.as_dict() if isinstance(initial, State) else dict(initial or {})
    budget = [fuel]
    _exec(term, env, budget)
    return State(env)


def _exec(t: MsrlTerm, env: dict, budget: list) -> None:
    if isinstance(t, (MInc, MDec)):
        if budget[0] is not None:
            budget[0] -= 1
            if budget[0] < 0:
                raise StepLimitExceeded()
        env[t.reg] = env.get(t.reg, 0) + (1 if isinstance(t, MInc) else -1)
    elif isinstance(t, MSeq):
        for s in mflatten(t):
            _exec(s, env, budget)
    elif isinstance(t, MFor):
        v = env.get(t.reg, 0)
        body = t.body if v >= 0 else invert_msrl(t.body)
        for _ in range(abs(v)):
            _exec(body, env, budget)
    else:
        raise TypeError(f"not an M-SRL term: {t!r}")


# -- translation --------------------------------------------------------------


FRESH_PREFIX = "_it"


def translate(term: MsrlTerm, avoid: frozenset[str] = frozenset()) -> fs.Term:
    """Forest term simulating ``term``.

    Each ``for r {P}`` becomes ``from (i = 0 or 0) to (i = r or 0) {[P]}; i -= r``
    with ``i`` drawn from ``_it0, _it1, ...``, skipping names already used.
    """
    violations = validate_msrl(term)
    if violations:
        raise fs.IllFormedError(violations)
    taken = set(msrl_dom(term)) | set(avoid)
    counter = count()

    def fresh() -> str:
        while True:
            name = f"{FRESH_PREFIX}{next(counter)}"
            if name not in taken:
                taken.add(name)
                return name

    def go(t: MsrlTerm) -> fs.Term:
        if isinstance(t, MInc):
            return fs.Inc(t.reg, IntLit(1))
        if isinstance(t, MDec):
            return fs.Dec(t.reg, IntLit(1))
        if isinstance(t, MSeq):
            return fs.seq(*(go(s) for s in mflatten(t)))
        if isinstance(t, MFor):
            i = fresh()
            loop = fs.FromTo(i, IntLit(0), fs.FALSE, VarRef(t.reg), fs.FALSE, go(t.body))
            return fs.Seq(loop, fs.Dec(i, VarRef(t.reg)))
        raise TypeError(f"not an M-SRL term: {t!r}")

    return go(term)


@dataclass(frozen=True)
class SimulationVerdict:
    passed: bool
    msrl_state: State
    forest_state: State | None
    message: str = ""

    def __bool__(self) -> bool:
        return self.passed


def check_simulation(
    term: MsrlTerm,
    initial: State | Mapping[str, int] | None = None,
    fuel: int | None = None,
) -> SimulationVerdict:
    """Run ``term`` and its translation side by side and compare.

    The forest side starts from ``initial`` with every leading variable of
    the translation set to 0.  PASS requires success, agreement on the M-SRL
    program's registers, and all leading variables back at 0.
    """
    sigma = initial if isinstance(initial, State) else State(initial or {})
    tau = run_msrl(term, sigma, fuel)
    target = translate(term)
    leads = fs.lead(target)
    sigma_hat = sigma.update({i: 0 for i in leads})
    outcome, _ = Program(target).run(sigma_hat)
    if not isinstance(outcome, Success):
        return SimulationVerdict(False, tau, None, f"forest run did not succeed: {outcome}")
    tau_hat = outcome.state
    regs = msrl_dom(term)
    bad = sorted(r for r in regs if tau[r] != tau_hat[r])
    if bad:
        return SimulationVerdict(False, tau, tau_hat, f"registers disagree: {', '.join(bad)}")
    dirty = sorted(i for i in leads if tau_hat[i] != 0)
    if dirty:
        return SimulationVerdict(False, tau, tau_hat, f"leading variables not clean: {', '.join(dirty)}")
    return SimulationVerdict(True, tau, tau_hat)
