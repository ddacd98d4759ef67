import json
import random

from forest import syntax as fs
from forest.interp import State
from forest.parser import parse_forest
from forest.testkit import (
    PROPERTIES, GenConfig, case_rng, check_run, gen_msrl, gen_state, gen_term,
    property_suite, shrink,
)


def _no_swap_inverter(t):
    # mutant: reverses sequences but leaves loop headers alone
    if isinstance(t, fs.Seq):
        return fs.Seq(_no_swap_inverter(t.second), _no_swap_inverter(t.first))
    if isinstance(t, fs.If):
        return fs.If(t.guard, _no_swap_inverter(t.then_branch), _no_swap_inverter(t.else_branch))
    if isinstance(t, fs.FromTo):
        return t
    return fs.invert_unchecked(t)


def test_depth_zero_is_atomic():
    cfg = GenConfig(max_depth=0)
    for k in range(200):
        t = gen_term(cfg, rng=case_rng(1, k))
        assert isinstance(t, (fs.Skip, fs.Inc, fs.Dec))


def test_generation_is_deterministic():
    cfg = GenConfig(max_depth=4, seed=9)
    assert gen_term(cfg) == gen_term(cfg)
    assert gen_msrl(cfg) == gen_msrl(cfg)
    assert gen_state(cfg, ["a", "b"]) == gen_state(cfg, ["a", "b"])


def test_read_only_variables_are_never_written():
    cfg = GenConfig(max_depth=4)
    for k in range(300):
        t = gen_term(cfg, frozenset({"a", "b"}), case_rng(2, k))
        assert not fs.wdom(t) & {"a", "b"}
        assert fs.validate(t) == []


def test_gen_state():
    cfg = GenConfig()
    assert gen_state(cfg, []) == State()
    t = gen_term(GenConfig(max_depth=4), rng=random.Random(5))
    s = gen_state(cfg, fs.dom(t), fs.lead(t), random.Random(5))
    assert all(s[i] == 0 for i in fs.lead(t))
    lo, hi = cfg.literal_range
    assert all(lo <= v <= hi for _, v in s.items())


def test_empty_suite_passes():
    report = property_suite(0)
    assert report.ok
    assert report.summary()["failingCases"] == []
    assert all(v == 0 for v in report.checked.values())


def test_small_suite_passes_and_is_reproducible():
    a = property_suite(150, seed=4)
    assert a.ok, a.text()
    assert a.summary() == property_suite(150, seed=4).summary()
    assert set(a.summary()["properties"]) == set(PROPERTIES)
    assert a.runs["success"] > 0 and a.runs["failure"] >= 0
    doc = json.loads(a.to_json())
    assert doc["schemaVersion"] == 1 and doc["ok"] is True


def test_broken_inverter_is_caught_and_shrunk():
    report = property_suite(200, seed=0, inverter=_no_swap_inverter)
    assert not report.ok
    assert report.failed["reversibility"] > 0
    cx = [c for c in report.counterexamples if c.prop == "reversibility"]
    assert cx
    # shrinking leaves a single loop whose header was not swapped
    smallest = min(cx, key=lambda c: len(c.program))
    assert isinstance(parse_forest(smallest.program), fs.FromTo)
    assert "counterexample [reversibility]" in report.text()


def test_check_run_on_a_failing_run_skips_reversibility():
    t = parse_forest("from(i=0 or 0)to(i=2 or 0){skip}")
    res = check_run(t, State(i=7))
    assert "reversibility" not in res and "read-only" not in res
    assert res["termination"] is None


def test_shrink_reduces_term_and_state():
    t = parse_forest("a += 1; if (b = 0) {c += 7} else {skip}; d += 2")

    def fails(term, state):
        return "c" in fs.wdom(term) and state["b"] == 0

    small, state = shrink(t, State(b=0, a=40), fails)
    assert small == parse_forest("c += 0")
    assert state == State()


def test_default_config_keeps_runs_small():
    from forest.interp import Program
    cfg = GenConfig()
    worst = 0
    for k in range(2000):
        rng = case_rng(0, k)
        t = gen_term(cfg, rng=rng)
        s = gen_state(cfg, fs.dom(t), fs.lead(t), rng)
        _, stats = Program(t).run(s)
        worst = max(worst, stats.loop_unfoldings)
    assert worst <= 10_000
