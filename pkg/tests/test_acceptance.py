"""Acceptance criteria 1-10, each at its stated tolerance.

Every test appends one ``CRITERION n: PASS|FAIL ...`` line, printed in the
terminal summary (and to stdout under ``-s``).
"""

import time

import pytest

from forest import msrl as ms
from forest import syntax as fs
from forest.interp import (
    ENTRY_CONDITION, OUT_OF_RANGE, RE_ENTRY_CONDITION, Failure, Program, State, Success,
)
from forest.parser import SourceFile, parse_forest, parse_msrl, pretty_forest, pretty_msrl
from forest.programs import (
    EXAMPLES_DIR, min_gen_program, min_neg_program, min_pos_program, oracle_min,
    oracle_sign, sign_program,
)
from forest.testkit import GenConfig, case_rng, gen_msrl, gen_state, gen_term, property_suite

from conftest import ACCEPTANCE_LINES, SHIFT_LOOP

CASES = 10_000
SEED = 0


def report(n: int, ok: bool, detail: str) -> None:
    line = f"CRITERION {n}: {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def best_of(fn, repeat: int = 5) -> float:
    # timeit convention: the minimum is the least noisy estimate
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


@pytest.fixture(scope="module")
def suite():
    t0 = time.perf_counter()
    rep = property_suite(CASES, seed=SEED)
    return rep, time.perf_counter() - t0


def test_criterion_1_worked_example():
    term = parse_forest(SHIFT_LOOP)
    inverse = fs.invert(term)
    results = {}

    def go():
        out, stats = Program(term).run(State(i=-4, j=2))
        back, _ = Program(inverse).run(out.state)
        results.update(out=out, stats=stats, back=back)

    elapsed = best_of(go)
    ok = (results["out"] == Success(State(i=1, j=7))
          and results["stats"].loop_unfoldings == 5
          and results["back"] == Success(State(i=-4, j=2))
          and elapsed < 1e-3)
    report(1, ok, f"{{i=1, j=7}}, 5 unfoldings, inverse restores; {elapsed * 1e3:.3f} ms")
    assert ok


def test_criterion_2_sign():
    b = sign_program()
    prog = Program(b.term)
    xs = (-10**6, -10**3, -1, 0, 1, 10**3, 10**6)
    prog.run(b.initial(x=0))
    outs = []

    def go():
        outs[:] = [(x, *prog.run(b.initial(x=x))) for x in xs]

    elapsed = best_of(go)
    bad = [x for x, out, stats in outs
           if not isinstance(out, Success)
           or (out.state["i"], out.state["s"]) != (oracle_sign(x),) * 2
           or stats.loop_unfoldings != (0 if x == 0 else 1)]
    ok = not bad and elapsed < 1e-3
    report(2, ok, f"{len(xs)} inputs, mismatches={bad}; {elapsed * 1e3:.3f} ms total")
    assert ok


def test_criterion_3_min_correctness():
    t0 = time.perf_counter()
    b = min_gen_program()
    prog = Program(b.term)
    bad = []
    pairs = 0
    for m in range(-50, 51):
        for n in range(-50, 51):
            pairs += 1
            out, _ = prog.run(b.initial(x=m, y=n))
            if not isinstance(out, Success) or out.state["min"] != oracle_min(m, n):
                bad.append((m, n))
    elapsed = time.perf_counter() - t0
    ok = pairs == 10_201 and not bad and elapsed < 1.0
    report(3, ok, f"{pairs} pairs, {len(bad)} mismatches; {elapsed:.3f} s")
    assert ok


def test_criterion_4_complexity_envelope():
    t0 = time.perf_counter()
    bad = []
    for bundle, values in ((min_pos_program(), range(0, 201)), (min_neg_program(), range(-200, 1))):
        prog = Program(bundle.term)
        for m in values:
            for n in values:
                out, stats = prog.run(bundle.initial(x=m, y=n))
                k = min(abs(m), abs(n))
                if (not isinstance(out, Success) or out.state["min"] != oracle_min(m, n)
                        or stats.loop_unfoldings not in (k, k + 1)):
                    bad.append((bundle.name, m, n))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 5.0
    report(4, ok, f"2 x 201^2 runs, {len(bad)} outside envelope; {elapsed:.3f} s")
    assert ok


def test_criterion_5_reversibility(suite):
    rep, elapsed = suite
    checked, failed = rep.checked["reversibility"], rep.failed["reversibility"]
    ok = (failed == 0 and checked == rep.runs["success"]
          and rep.runs["success"] + rep.runs["failure"] == CASES and elapsed < 60)
    report(5, ok, f"{CASES} cases, {checked} successful runs roundtripped, "
                  f"{failed} failures; {elapsed:.2f} s")
    assert ok


def test_criterion_6_termination_and_loop_bound(suite):
    rep, _ = suite
    ok = (rep.checked["termination"] == CASES and rep.failed["termination"] == 0
          and rep.checked["loop-bound"] == CASES and rep.failed["loop-bound"] == 0)
    report(6, ok, f"{rep.checked['termination']} runs terminated without fuel; "
                  f"loop-bound violations={rep.failed['loop-bound']}")
    assert ok


def test_criterion_7_read_only(suite):
    rep, _ = suite
    ok = rep.checked["read-only"] == rep.runs["success"] and rep.failed["read-only"] == 0
    report(7, ok, f"{rep.checked['read-only']} successful runs, violations={rep.failed['read-only']}")
    assert ok


def test_criterion_8_translation_simulation():
    t0 = time.perf_counter()
    cfg = GenConfig(seed=SEED)
    passed = discarded = 0
    failures = []
    k = 0
    while passed + len(failures) < 1000:
        rng = case_rng(SEED + 8, k)
        k += 1
        term = gen_msrl(cfg, rng)
        leads = fs.lead(ms.translate(term))
        state = gen_state(cfg, ms.msrl_dom(term) | leads, clean=leads, rng=rng)
        try:
            ms.run_msrl(term, state, fuel=cfg.msrl_fuel)
        except ms.StepLimitExceeded:
            discarded += 1
            continue
        verdict = ms.check_simulation(term, state)
        if verdict.passed:
            passed += 1
        else:
            failures.append((pretty_msrl(term), verdict.message))
    elapsed = time.perf_counter() - t0
    ok = passed == 1000 and not failures and elapsed < 30
    report(8, ok, f"{passed}/1000 PASS ({discarded} over the step budget regenerated); {elapsed:.2f} s")
    assert ok, failures[:3]


def test_criterion_9_structural_suites():
    cfg = GenConfig(seed=SEED)
    inv_bad = valid_bad = fst_bad = srl_bad = 0
    for k in range(CASES):
        rng = case_rng(SEED + 9, k)
        t = gen_term(cfg, rng=rng)
        inv = fs.invert(t)
        inv_bad += fs.invert(inv) != t
        valid_bad += bool(fs.validate(inv))
        fst_bad += parse_forest(pretty_forest(t)) != t
        m = gen_msrl(cfg, rng)
        srl_bad += parse_msrl(pretty_msrl(m)) != m
    ok = not (inv_bad or valid_bad or fst_bad or srl_bad)
    report(9, ok, f"{CASES} terms: involution={inv_bad}, validate={valid_bad}, "
                  f"forest roundtrip={fst_bad}, M-SRL roundtrip={srl_bad} failures")
    assert ok


def test_criterion_10_failure_semantics():
    fixtures = (
        ("out_of_range.fst", {"i": 5, "x": 3}, OUT_OF_RANGE),
        ("entry_condition.fst", {}, ENTRY_CONDITION),
        ("re_entry.fst", {}, RE_ENTRY_CONDITION),
    )
    got = []
    for name, init, expected in fixtures:
        term = parse_forest(SourceFile.read(EXAMPLES_DIR / name))
        prog = Program(term)
        # first run: closure interpreter; second: generated code
        for _ in range(2):
            out, _ = prog.run(init)
            got.append((name, out.reason if isinstance(out, Failure) else repr(out), expected))
    # the re-entry fixture only fails because its body sets the e_in variable
    re_entry = parse_forest(SourceFile.read(EXAMPLES_DIR / "re_entry.fst"))
    loop = next(t for t in fs.subterms(re_entry) if isinstance(t, fs.FromTo))
    sets_ein = fs.expr_dom(loop.from_escape) & fs.wdom(loop.body)
    ok = all(r == e for _, r, e in got) and bool(sets_ein)
    report(10, ok, "; ".join(f"{n} -> {r}" for n, r, _ in got[::2]))
    assert ok
