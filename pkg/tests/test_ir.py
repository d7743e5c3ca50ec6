import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from counterprog.ir import (
    SKIP,
    ZERO,
    Checking,
    Choice,
    Configuration,
    Dec,
    General,
    Inc,
    Loop,
    ProgramSyntaxError,
    Repeat,
    Seq,
    Test,
    TestFree,
    check_counter,
    classify,
    count_commands,
    counters,
    dimension,
    enumerate_programs,
    expand_repeats,
    has_test,
    parse,
    rename,
    render,
    seq,
    size,
    walk,
)

from strategies import programs


def test_size_contract():
    assert size(Inc("x")) == 1
    assert size(SKIP) == 0
    assert size(Loop(Inc("x"))) == 2
    assert size(seq(Inc("x"), Dec("y"), Test("x"))) == 5
    assert size(Choice(Inc("x"), Inc("y"))) == 3
    assert size(Repeat(Inc("x"), 4)) == 7
    assert size(Repeat(Inc("x"), 0)) == 0


def test_seq_is_right_associated():
    a, b, c = Inc("a"), Inc("b"), Inc("c")
    assert Seq(Seq(a, b), c) == Seq(a, Seq(b, c))
    assert Choice(Choice(a, b), c) == Choice(a, Choice(b, c))
    assert seq() is SKIP


def test_counters_and_dimension():
    p = parse("loop { inc y; dec x }; repeat 0 { inc z }; test a")
    assert counters(p) == ("a", "x", "y")
    assert dimension(p) == 3


def test_classify():
    assert classify(parse("inc x; loop { dec x }")) == TestFree()
    c = classify(parse("inc x; dec x; test x; test y"))
    assert isinstance(c, Checking)
    assert c.tested == ("x", "y")
    assert c.core == seq(Inc("x"), Dec("x"))
    assert classify(parse("test x; inc x")) == General()
    assert classify(parse("loop { test x }")) == General()
    # a repeat of tests at the end counts as trailing tests
    c = classify(parse("inc x; repeat 2 { test x }"))
    assert isinstance(c, Checking) and c.tested == ("x", "x")
    assert classify(parse("inc x; repeat 0 { test x }")) == TestFree()


def test_parse_shorthand_and_comments():
    p = parse("""
        # seed
        inc {x, y};  # two increments
        choice { dec x } or { dec y } or { skip }
    """)
    assert p == seq(Inc("x"), Inc("y"), Choice(Dec("x"), Choice(Dec("y"), SKIP)))
    assert parse("") is SKIP
    assert parse("loop { }") == Loop(SKIP)


@pytest.mark.parametrize("text,line", [
    ("inc", 1),
    ("inc x;\nloop { dec }", 2),
    ("choice { inc x }", 1),
    ("repeat x { inc x }", 1),
    ("inc x dec y", 1),
    ("inc loop", 1),
])
def test_parse_errors_carry_position(text, line):
    with pytest.raises(ProgramSyntaxError) as e:
        parse(text)
    assert e.value.line == line


def test_counter_names():
    assert check_counter("A::x'") == "A::x'"
    with pytest.raises(ValueError):
        check_counter("1x")
    with pytest.raises(ValueError):
        Inc("no spaces")


def test_render_shape():
    assert render(Loop(Inc("x"))) == "loop {\n  inc x\n}\n"
    assert render(SKIP) == ""
    assert render(Choice(Inc("a"), Dec("b"))) == "choice {\n  inc a\n} or {\n  dec b\n}\n"


@settings(max_examples=300, deadline=None)
@given(programs())
def test_render_parse_round_trip(p):
    assert parse(render(p)) == p


@settings(max_examples=300, deadline=None)
@given(programs())
def test_expand_repeats_preserves_size_and_commands(p):
    q = expand_repeats(p)
    assert not any(isinstance(n, Repeat) for n in walk(q))
    assert size(q) == size(p)
    assert count_commands(q) == count_commands(p)
    assert counters(q) == counters(p)
    assert has_test(q) == has_test(p)


@settings(max_examples=200, deadline=None)
@given(programs())
def test_classification_is_consistent(p):
    c = classify(p)
    if isinstance(c, TestFree):
        assert not has_test(p)
    elif isinstance(c, Checking):
        assert not has_test(c.core)
        assert c.tested
        assert count_commands(c.core) + len(c.tested) == count_commands(p)


@settings(max_examples=100, deadline=None)
@given(programs())
def test_rename_is_invertible(p):
    m = {"a": "u", "b": "v"}
    back = {"u": "a", "v": "b"}
    assert rename(rename(p, m), back) == p


def test_configuration_basics():
    c = Configuration(x=2, y=0)
    assert c == {"x": 2}
    assert c["y"] == 0
    assert len(c) == 1
    assert c.total() == 2
    assert c.updated(x=0) == ZERO
    assert Configuration(x=1, y=2).restrict(["y"]) == Configuration(y=2)
    with pytest.raises(ValueError):
        Configuration(x=-1)


def test_configuration_json_keeps_big_values_exact():
    big = 2**200 + 1
    c = Configuration(x=big, b=3)
    assert c.to_json() == '{"b": "3", "x": "%d"}' % big
    assert Configuration.from_json(c.to_json()) == c
    assert Configuration.from_json('{"x": 4}') == Configuration(x=4)
    for bad in ('[1]', '{"x": "-1"}', '{"x": true}', '{"x": 1.5}'):
        with pytest.raises(ValueError):
            Configuration.from_json(bad)


def test_enumeration_is_exact():
    ps = enumerate_programs(3, ["a"])
    # 3 commands; 3 loops; 9 sequences and 9 choices of two commands; 3 double loops
    assert len(ps) == 3 + 3 + 3 + 18
    assert len(set(ps)) == len(ps)
    assert all(1 <= size(p) <= 3 for p in ps)
    assert len(enumerate_programs(6, ["a", "b"])) == 9684
