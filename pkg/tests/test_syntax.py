import random

import pytest
from hypothesis import given, settings, strategies as st

from forest import syntax as fs
from forest.parser import parse_forest
from forest.syntax import (
    Add, Dec, Eq, FromTo, IllFormedError, Inc, IntLit, Le, Seq, Skip, VarRef,
    dom, expr_dom, invert, lead, validate, wdom,
)
from forest.testkit import GenConfig, gen_term

from conftest import SHIFT_LOOP


def P(text):
    return parse_forest(text)


def test_expression_domains():
    e = P("z += (-1) + (x - 3) - y").expr
    assert expr_dom(e) == {"x", "y"}
    g = P("if ((3=y) or !(1=x+y)) {skip} else {skip}").guard
    assert expr_dom(g) == {"x", "y"}


def test_dom_of_skip_is_empty():
    assert dom(Skip()) == set()
    assert wdom(Skip()) == set()


def test_dom_and_wdom_of_assignment():
    t = P("min += x")
    assert dom(t) == {"min", "x"}
    assert wdom(P("x += 1")) == {"x"}


def test_domains_in_min_pos(min_pos_term):
    loop = list(fs.flatten(min_pos_term))[1]
    assert isinstance(loop, FromTo)
    assert dom(loop) == {"i", "x", "y", "min", "found"}
    selection = loop.body
    assert dom(selection) == {"i", "y", "min", "x", "found"}
    assert wdom(selection) == {"min", "found"}


def test_wdom_of_skip_sequence():
    assert wdom(Seq(Skip(), Skip())) == set()


def test_lead():
    assert lead(P("x += 1")) == set()
    translated = P("from(i=0 or 0)to(i=r or 0){j+=1}; i-=r")
    assert lead(translated) == {"i"}
    two = P("from(i1=0 or 0)to(i1=3 or 0){skip}; from(i2=0 or 0)to(i2=3 or 0){skip}")
    assert lead(two) == {"i1", "i2"}
    # selections do not contribute leading variables
    assert lead(P("if (x=0) {from(i=0 or 0)to(i=1 or 0){skip}} else {skip}")) == set()


def test_validate_self_assignment():
    (v,) = validate(Inc("x", VarRef("x")))
    assert v.kind == fs.SELF_ASSIGN
    assert "target occurs in source expression" in v.message


def test_validate_min_pos(min_pos_term):
    assert validate(min_pos_term) == []


def test_validate_body_writes_lead():
    (v,) = validate(P("from(i=0 or 0)to(i=x or 0){i+=1}"))
    assert v.kind == fs.LOOP_CONTROL_WRITE
    assert "body writes leading variable" in v.message


def test_validate_reports_every_violation_with_locations():
    t = P("x += 1;\nif (x = 0) {x += 1} else {y += y};\nfrom (i = 0 or 0) to (i = n or 0) {n += 1}")
    kinds = sorted(v.kind for v in validate(t))
    assert kinds == sorted([fs.GUARD_WRITE, fs.SELF_ASSIGN, fs.LOOP_CONTROL_WRITE])
    assert {v.loc.line for v in validate(t)} == {2, 3}


def test_validate_escape_may_read_written_variables(min_pos_term):
    # found is written by the body and read by the exit condition
    assert validate(min_pos_term) == []


def test_internal_operators_rejected_in_user_terms():
    t = fs.If(Le(VarRef("a"), IntLit(1)), Skip(), Skip())
    (v,) = validate(t)
    assert v.kind == fs.INTERNAL_OP


def test_invert_shift_loop():
    assert invert(P(SHIFT_LOOP)) == P("from(i=1 or 0)to(i=-4 or 0){j+=1}")


def test_invert_skip():
    assert invert(Skip()) == Skip()


def test_invert_keeps_loop_body(min_pos_term):
    loop = list(fs.flatten(min_pos_term))[1]
    assert invert(loop).body == loop.body


def test_double_inversion_of_min_pos(min_pos_term):
    assert invert(invert(min_pos_term)) == min_pos_term


def test_invert_rejects_ill_formed():
    with pytest.raises(IllFormedError):
        invert(Inc("x", VarRef("x")))


def test_equality_ignores_locations_and_sequence_grouping():
    a, b, c = Inc("a", IntLit(1)), Dec("b", IntLit(2)), Skip()
    assert Seq(Seq(a, b), c) == Seq(a, Seq(b, c))
    assert hash(Seq(Seq(a, b), c)) == hash(Seq(a, Seq(b, c)))
    assert Inc("a", IntLit(1), fs.Loc(3, 4)) == a
    assert Seq(a, b) != Seq(b, a)
    assert Add(VarRef("x"), IntLit(1)) != Eq(VarRef("x"), IntLit(1))


def _gen(seed):
    return gen_term(GenConfig(max_depth=4), rng=random.Random(seed))


@settings(max_examples=400, deadline=None)
@given(st.integers(0, 2**32))
def test_domain_inclusions(seed):
    t = _gen(seed)
    assert wdom(t) <= dom(t)
    assert lead(t) <= wdom(t) <= dom(t)


@settings(max_examples=400, deadline=None)
@given(st.integers(0, 2**32))
def test_invert_is_an_involution_preserving_domains(seed):
    t = _gen(seed)
    assert validate(t) == []
    inv = invert(t)
    assert invert(inv) == t
    assert validate(inv) == []
    assert (dom(inv), wdom(inv), lead(inv)) == (dom(t), wdom(t), lead(t))
