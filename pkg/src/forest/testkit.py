"""Random well-formed programs and the property harness.

All randomness for case ``k`` of a suite comes from ``case_rng(seed, k)``,
so any reported counterexample can be regenerated from its seed and index.
"""

from __future__ import annotations

import dataclasses
import json
import random
from dataclasses import dataclass, field
from typing import Callable, Iterator

from . import msrl as ms
from . import syntax as fs
from .interp import FuelExhausted, LoopRecord, Program, State, Success
from .parser import ParseError, parse_forest, parse_msrl, pretty_forest, pretty_msrl
from .syntax import (
    FALSE,
    TRUE,
    Add,
    And,
    BoolLit,
    Eq,
    IntLit,
    Node,
    Not,
    Or,
    Sub,
    Term,
    VarRef,
)


@dataclass(frozen=True)
class GenConfig:
    max_depth: int = 3
    var_pool: tuple[str, ...] = ("a", "b", "c", "d")
    literal_range: tuple[int, int] = (-5, 5)
    loop_span_range: tuple[int, int] = (-4, 4)
    seed: int = 0
    lead_bias: float = 0.7  # chance a loop gets a fresh, zero-started counter
    max_seq: int = 3
    msrl_fuel: int = 200_000  # INC/DEC budget per generated M-SRL case

    def __post_init__(self):
        if not self.var_pool:
            raise ValueError("var_pool must be nonempty")


def case_rng(seed: int, k: int) -> random.Random:
    return random.Random(seed * 1_000_003 + k)


# -- expressions --------------------------------------------------------------


def _lit(rng: random.Random, lo_hi: tuple[int, int]) -> IntLit:
    return IntLit(rng.randint(*lo_hi))


def gen_arith(rng: random.Random, cfg: GenConfig, names: list[str], depth: int = 2) -> Node:
    r = rng.random()
    if depth == 0 or r < 0.55:
        if names and rng.random() < 0.6:
            return VarRef(rng.choice(names))
        return _lit(rng, cfg.literal_range)
    left = gen_arith(rng, cfg, names, depth - 1)
    right = gen_arith(rng, cfg, names, depth - 1)
    return Add(left, right) if r < 0.8 else Sub(left, right)


def gen_bool(rng: random.Random, cfg: GenConfig, names: list[str], depth: int = 2) -> Node:
    r = rng.random()
    if depth == 0 or r < 0.5:
        if r < 0.08:
            return BoolLit(rng.random() < 0.5)
        return Eq(gen_arith(rng, cfg, names, 1), gen_arith(rng, cfg, names, 1))
    if r < 0.65:
        return Not(gen_bool(rng, cfg, names, depth - 1))
    left = gen_bool(rng, cfg, names, depth - 1)
    right = gen_bool(rng, cfg, names, depth - 1)
    return And(left, right) if r < 0.82 else Or(left, right)


def _escape(rng: random.Random, cfg: GenConfig, names: list[str], p_false: float) -> Node:
    r = rng.random()
    if r < p_false:
        return FALSE
    if r < p_false + 0.1:
        return TRUE
    return Eq(VarRef(rng.choice(names)), _lit(rng, cfg.literal_range))


# -- terms --------------------------------------------------------------------


class _TermGen:
    def __init__(self, cfg: GenConfig, rng: random.Random):
        self.cfg = cfg
        self.rng = rng
        self.fresh = 0

    def term(self, depth: int, ro: frozenset[str]) -> Term:
        rng = self.rng
        writable = [v for v in self.cfg.var_pool if v not in ro]
        if depth <= 0:
            if writable and rng.random() < 0.85:
                return self.assign(writable)
            return fs.Skip()
        r = rng.random()
        if r < 0.05 or (not writable and r < 0.3):
            return fs.Skip()
        if r < 0.3:
            return self.assign(writable) if writable else fs.Skip()
        if r < 0.55:
            n = rng.randint(2, self.cfg.max_seq)
            return fs.seq(*(self.term(depth - 1, ro) for _ in range(n)))
        if r < 0.72:
            guard = gen_bool(rng, self.cfg, list(self.cfg.var_pool), 2)
            inner = ro | fs.expr_dom(guard)
            return fs.If(guard, self.term(depth - 1, inner), self.term(depth - 1, inner))
        return self.loop(depth, ro, writable)

    def assign(self, writable: list[str]) -> Term:
        target = self.rng.choice(writable)
        sources = [v for v in self.cfg.var_pool if v != target]
        expr = gen_arith(self.rng, self.cfg, sources, 2)
        cls = fs.Inc if self.rng.random() < 0.5 else fs.Dec
        return cls(target, expr)

    def loop(self, depth: int, ro: frozenset[str], writable: list[str]) -> Term:
        rng, cfg = self.rng, self.cfg
        fresh = rng.random() < cfg.lead_bias or not writable
        if fresh:
            lead = f"k{self.fresh}"
            self.fresh += 1
            lo = IntLit(0)
        else:
            lead = rng.choice(writable)
            lo = _lit(rng, cfg.loop_span_range)
        hi = _lit(rng, cfg.loop_span_range)
        names = list(cfg.var_pool) + [lead]
        e_in = _escape(rng, cfg, names, 0.7)
        e_out = _escape(rng, cfg, names, 0.5)
        body = self.term(depth - 1, ro | {lead})
        loop = fs.FromTo(lead, lo, e_in, hi, e_out, body)
        if fresh and e_out == FALSE and hi.value != 0 and rng.random() < 0.8:
            # reset the counter so an enclosing loop can re-enter this one
            return fs.Seq(loop, fs.Dec(lead, hi))
        return loop


def gen_term(cfg: GenConfig, read_only: frozenset[str] = frozenset(),
             rng: random.Random | None = None) -> Term:
    """A random well-formed term whose loops have literal bounds.

    Variables in ``read_only`` are never assigned.  Loops either get a fresh
    counter ``k<n>`` starting at bound 0 or reuse a pool variable with
    arbitrary literal bounds.
    """
    rng = rng or random.Random(cfg.seed)
    return _TermGen(cfg, rng).term(cfg.max_depth, frozenset(read_only))


def gen_state(cfg: GenConfig, names, clean=frozenset(),
              rng: random.Random | None = None) -> State:
    """Uniform values from ``literal_range`` on ``names``; exactly 0 on ``clean``."""
    rng = rng or random.Random(cfg.seed)
    clean = set(clean)
    return State({n: (0 if n in clean else rng.randint(*cfg.literal_range)) for n in sorted(names)})


def gen_msrl(cfg: GenConfig, rng: random.Random | None = None):
    rng = rng or random.Random(cfg.seed)

    def go(depth: int, ro: frozenset[str]):
        writable = [v for v in cfg.var_pool if v not in ro]
        r = rng.random()
        if depth <= 0 or r < 0.4:
            reg = rng.choice(writable)
            return ms.MInc(reg) if rng.random() < 0.5 else ms.MDec(reg)
        if r < 0.7 or len(writable) < 2:
            n = rng.randint(2, cfg.max_seq)
            return ms.mseq(*(go(depth - 1, ro) for _ in range(n)))
        reg = rng.choice(list(cfg.var_pool))
        inner = ro | {reg}
        if not [v for v in cfg.var_pool if v not in inner]:
            return ms.MInc(rng.choice(writable))
        return ms.MFor(reg, go(depth - 1, inner))

    return go(cfg.max_depth, frozenset())


# -- shrinking ----------------------------------------------------------------

_TERM_TYPES = (fs.Inc, fs.Dec, fs.Seq, fs.If, fs.FromTo)


def _variants(node: Node) -> Iterator[Node]:
    """Every node obtained by one shrinking step inside ``node``."""
    if isinstance(node, _TERM_TYPES):
        yield fs.Skip(node.loc)
    # a compound term may also be replaced by one of its parts
    if isinstance(node, fs.Seq):
        yield node.first
        yield node.second
    elif isinstance(node, fs.If):
        yield node.then_branch
        yield node.else_branch
    elif isinstance(node, fs.FromTo):
        yield node.body
    if isinstance(node, IntLit) and node.value != 0:
        yield IntLit(int(node.value / 2))
    for f in dataclasses.fields(node):
        child = getattr(node, f.name)
        if isinstance(child, Node):
            for v in _variants(child):
                yield dataclasses.replace(node, **{f.name: v})


def _size(node: Node) -> int:
    n = 1
    for f in dataclasses.fields(node):
        child = getattr(node, f.name)
        if isinstance(child, Node):
            n += _size(child)
    return n


def shrink(term: Term, state: State, fails: Callable[[Term, State], bool],
           max_steps: int = 2000) -> tuple[Term, State]:
    """Greedily minimize a failing (term, state) pair.

    Steps replace a subterm with ``skip`` or with one of its own parts, halve
    an integer literal, or halve a state value.  Parts of a well-formed term
    are well-formed, so every candidate stays valid.
    """
    steps = 0
    progress = True
    while progress and steps < max_steps:
        progress = False
        for cand in _variants(term):
            steps += 1
            if cand != term and _size(cand) <= _size(term) and fails(cand, state):
                term, progress = cand, True
                break
            if steps >= max_steps:
                break
        if progress:
            continue
        for name, value in state.items():
            smaller = state.set(**{name: int(value / 2)})
            steps += 1
            if fails(term, smaller):
                state, progress = smaller, True
                break
    return term, state


# -- the property suite -------------------------------------------------------

PROPERTIES = (
    "generator-soundness",
    "termination",
    "loop-bound",
    "reversibility",
    "read-only",
    "determinism",
    "involution",
    "inversion-preserves",
    "forest-roundtrip",
    "msrl-reversibility",
    "msrl-involution",
    "msrl-roundtrip",
    "msrl-simulation",
)


@dataclass
class Counterexample:
    prop: str
    case: int
    program: str
    state: dict
    detail: str = ""


@dataclass
class SuiteReport:
    seed: int
    seed_count: int
    checked: dict = field(default_factory=lambda: {p: 0 for p in PROPERTIES})
    failed: dict = field(default_factory=lambda: {p: 0 for p in PROPERTIES})
    runs: dict = field(default_factory=lambda: {"success": 0, "failure": 0})
    msrl_discarded: int = 0
    counterexamples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not any(self.failed.values())

    def record(self, prop: str, passed: bool, cx: Callable[[], Counterexample] | None = None):
        self.checked[prop] += 1
        if not passed:
            self.failed[prop] += 1
            if cx is not None and self.failed[prop] <= 5:
                self.counterexamples.append(cx())

    def summary(self) -> dict:
        return {
            "schemaVersion": 1,
            "seed": self.seed,
            "seedCount": self.seed_count,
            "ok": self.ok,
            "properties": {p: {"checked": self.checked[p], "failures": self.failed[p]}
                           for p in PROPERTIES},
            "runs": dict(self.runs),
            "msrlDiscarded": self.msrl_discarded,
            "failingCases": sorted({c.case for c in self.counterexamples}),
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2)

    def text(self) -> str:
        lines = [f"property suite: seed={self.seed} cases={self.seed_count}"]
        for p in PROPERTIES:
            mark = "PASS" if self.failed[p] == 0 else "FAIL"
            lines.append(f"  {mark} {p:<20} checked={self.checked[p]} failures={self.failed[p]}")
        lines.append(f"  runs: success={self.runs['success']} failure={self.runs['failure']}"
                     f" (msrl cases discarded for size: {self.msrl_discarded})")
        for c in self.counterexamples:
            lines.append(f"counterexample [{c.prop}] case {c.case}: {c.detail}")
            lines.append("  state: " + ", ".join(f"{k}={v}" for k, v in sorted(c.state.items())))
            for line in c.program.splitlines():
                lines.append("  | " + line)
        return "\n".join(lines)


def _observed(term: Term, state: State) -> frozenset[str]:
    return fs.dom(term) | state.support()


def check_run(term: Term, state: State, inverter=fs.invert_unchecked) -> dict[str, str | None]:
    """Run-based properties for one case; maps property -> failure detail or None.

    Reversibility and read-only preservation are only checked on success.
    """
    out: dict[str, str | None] = {}
    loops: list[LoopRecord] = []
    outcome, stats = Program(term).run(state, loop_log=loops)
    out["termination"] = None if not isinstance(outcome, FuelExhausted) else "ran out of fuel"
    over = [r for r in loops if r.unfoldings > r.span]
    out["loop-bound"] = None if not over else (
        f"loop at {over[0].loc} ({over[0].lead}) unfolded {over[0].unfoldings} > span {over[0].span}"
    )
    again, stats2 = Program(term).run(state)
    out["determinism"] = None if (again, stats2) == (outcome, stats) else "repeated run differs"
    if isinstance(outcome, Success):
        tau = outcome.state
        frozen = _observed(term, state) - fs.wdom(term)
        moved = sorted(x for x in frozen if tau[x] != state[x])
        out["read-only"] = None if not moved else f"read-only variables changed: {moved}"
        back, _ = Program(inverter(term), check=False).run(tau)
        if not isinstance(back, Success):
            out["reversibility"] = f"inverse run did not succeed: {back}"
        elif back.state != state:
            out["reversibility"] = f"inverse ended in {back.state}, expected {state}"
        else:
            out["reversibility"] = None
    return out


def property_suite(
    seed_count: int,
    seed: int = 0,
    cfg: GenConfig | None = None,
    inverter: Callable[[Term], Term] = fs.invert_unchecked,
    shrink_failures: bool = True,
) -> SuiteReport:
    """Run every property on ``seed_count`` generated cases."""
    cfg = cfg or GenConfig(seed=seed)
    report = SuiteReport(seed, seed_count)
    for k in range(seed_count):
        rng = case_rng(seed, k)
        _forest_case(report, k, rng, cfg, inverter, shrink_failures)
        _msrl_case(report, k, rng, cfg)
    return report


def _forest_case(report, k, rng, cfg, inverter, shrink_failures) -> None:
    term = gen_term(cfg, rng=rng)
    state = gen_state(cfg, fs.dom(term), fs.lead(term), rng=rng)

    def cx(prop: str, detail: str, t: Term = term, s: State = state):
        return lambda: Counterexample(prop, k, pretty_forest(t), s.as_dict(), detail)

    well_formed = not fs.validate(term)
    report.record("generator-soundness", well_formed, cx("generator-soundness", "ill-formed"))
    if not well_formed:
        return

    inv = inverter(term)
    report.record("involution", inverter(inv) == term, cx("involution", "inverse of inverse differs"))
    preserved = (not fs.validate(inv) and fs.dom(inv) == fs.dom(term)
                 and fs.wdom(inv) == fs.wdom(term) and fs.lead(inv) == fs.lead(term))
    report.record("inversion-preserves", preserved, cx("inversion-preserves", "dom/wdom/lead/validity"))

    text = pretty_forest(term)
    try:
        same = parse_forest(text) == term
    except ParseError:
        same = False
    report.record("forest-roundtrip", same, cx("forest-roundtrip", "reparse differs"))

    results = check_run(term, state, inverter)
    success = "reversibility" in results
    report.runs["success" if success else "failure"] += 1
    for prop, detail in results.items():
        if detail is None:
            report.record(prop, True)
            continue

        def make(prop=prop, detail=detail):
            t, s = term, state
            if shrink_failures:
                t, s = shrink(term, state,
                              lambda tt, ss: check_run(tt, ss, inverter).get(prop) is not None)
                detail = check_run(t, s, inverter).get(prop) or detail
            return Counterexample(prop, k, pretty_forest(t), s.as_dict(), detail)
        report.record(prop, False, make)


def _msrl_case(report, k, rng, cfg) -> None:
    for _ in range(20):
        term = gen_msrl(cfg, rng)
        state = gen_state(cfg, ms.msrl_dom(term), rng=rng)
        try:
            tau = ms.run_msrl(term, state, fuel=cfg.msrl_fuel)
            break
        except ms.StepLimitExceeded:
            report.msrl_discarded += 1
    else:
        return

    def cx(prop: str, detail: str):
        return lambda: Counterexample(prop, k, pretty_msrl(term), state.as_dict(), detail)

    back = ms.run_msrl(ms.invert_msrl(term), tau)
    report.record("msrl-reversibility", back == state, cx("msrl-reversibility", f"got {back}"))
    report.record("msrl-involution", ms.invert_msrl(ms.invert_msrl(term)) == term,
                  cx("msrl-involution", "inverse of inverse differs"))
    try:
        same = parse_msrl(pretty_msrl(term)) == term
    except ParseError:
        same = False
    report.record("msrl-roundtrip", same, cx("msrl-roundtrip", "reparse differs"))
    verdict = ms.check_simulation(term, state)
    report.record("msrl-simulation", verdict.passed, cx("msrl-simulation", verdict.message))
