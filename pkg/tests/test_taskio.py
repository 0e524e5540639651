"""Parsing, printing, round-trips, and file-level validation."""

import json

import pytest

from rulejoin.engine import FactStore
from rulejoin.generate import Bias
from rulejoin.learner import RunStats
from rulejoin.logic import Const, PredicateSymbol, Program, Rule, Var, make_program
from rulejoin.taskio import (
    HEAD_PRED,
    TAIL_PRED,
    ListInterner,
    ParseError,
    TaskError,
    _VarMap,
    evaluate,
    load_task,
    parse_bias,
    parse_bk,
    parse_exs,
    parse_program,
    print_bias,
    print_bk,
    print_exs,
    print_program,
    stats_json,
    tokenize,
)

from helpers import F, HEAD2, TAIL2, mk


BIAS_TEXT = """\
% a comment
head_pred(f,1).
body_pred(head,2).
body_pred(tail,2).
max_vars(3).
max_body(2).
max_rules(2).
enable_recursion(true).
constant(head,2,a).
constant(head,2,b).
"""


def test_tokenize_positions_and_comments():
    toks = tokenize("p(a). % trailing\n  q :- r.\n")
    kinds = [(t.kind, t.value) for t in toks]
    assert kinds == [
        ("name", "p"), ("punct", "("), ("name", "a"), ("punct", ")"), ("punct", "."),
        ("name", "q"), ("punct", ":-"), ("name", "r"), ("punct", "."), ("end", ""),
    ]
    assert (toks[5].line, toks[5].col) == (2, 3)
    assert (toks[6].line, toks[6].col) == (2, 5)


def test_tokenize_rejects_stray_characters():
    with pytest.raises(ParseError) as e:
        tokenize("p(a).\nq(@).")
    assert e.value.line == 2 and e.value.col == 3


def test_parse_bias_full():
    bias = parse_bias(BIAS_TEXT)
    assert bias.head_pred == PredicateSymbol("f", 1)
    assert bias.body_preds == (HEAD_PRED, TAIL_PRED)
    assert (bias.max_vars, bias.max_body, bias.max_rules) == (3, 2, 2)
    assert bias.enable_recursion
    assert bias.constant_pool == {(HEAD_PRED, 2): ("a", "b")}


def test_parse_bias_defaults_and_roundtrip():
    bias = parse_bias("head_pred(f,1). body_pred(p,1).")
    assert (bias.max_vars, bias.max_body, bias.max_rules) == (3, 3, 1)
    assert not bias.enable_recursion and bias.constant_pool == {}
    for b in (bias, parse_bias(BIAS_TEXT)):
        assert parse_bias(print_bias(b)) == b


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("body_pred(p,1).", "missing head_pred"),
        ("head_pred(f,1).", "missing body_pred"),
        ("head_pred(f,1). head_pred(g,1). body_pred(p,1).", "duplicate head_pred"),
        ("head_pred(f,1). body_pred(p,1). max_vars(2). max_vars(3).", "duplicate max_vars"),
        ("head_pred(f,1). body_pred(p,1). shiny(3).", "unknown bias directive"),
        ("head_pred(f,1). body_pred(p,1). constant(q,1,a).", "unknown predicate"),
        ("head_pred(f,1). body_pred(p,1). enable_recursion(maybe).", "true or false"),
        ("head_pred(f,1). body_pred(p,1) :- q.", "rules are not allowed"),
    ],
)
def test_parse_bias_errors(text, fragment):
    with pytest.raises(ParseError, match=fragment):
        parse_bias(text)


def test_parse_bk_facts_and_rules():
    facts, rules = parse_bk("p(a,b).\nq(b).\nr(A,B) :- p(A,B), q(B).\n")
    assert set(facts.atoms()) == {
        (PredicateSymbol("p", 2), ("a", "b")),
        (PredicateSymbol("q", 1), ("b",)),
    }
    p, q, r = PredicateSymbol("p", 2), PredicateSymbol("q", 1), PredicateSymbol("r", 2)
    assert rules == (Rule(mk(r, 0, 1), (mk(p, 0, 1), mk(q, 1))),)


def test_parse_bk_rejects_nonground_fact():
    with pytest.raises(ParseError, match="ground"):
        parse_bk("p(X).")


def test_list_sugar_desugars_to_cells():
    interner = ListInterner()
    facts, _ = parse_bk("val([a,b]).\nval([]).\n", interner)
    val = PredicateSymbol("val", 1)
    assert set(facts.atoms()) == {(val, ("l_a_b",)), (val, ("l_nil",))}
    assert set(interner.cells.atoms()) == {
        (HEAD_PRED, ("l_a_b", "a")),
        (TAIL_PRED, ("l_a_b", "l_b")),
        (HEAD_PRED, ("l_b", "b")),
        (TAIL_PRED, ("l_b", "l_nil")),
    }


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("p([a,[b]]).", "plain constants"),
        ("p([H|T]).", "plain constants"),
        ("p([a|T]).", "list tails"),
        ("p([a,b]). q(l_rogue).", "cannot be mixed"),
        ("q(l_rogue). p([a,b]).", "cannot be mixed"),
    ],
)
def test_list_sugar_errors(text, fragment):
    with pytest.raises(ParseError, match=fragment):
        parse_bk(text)


def test_explicit_l_constants_fine_without_sugar():
    facts, _ = parse_bk("head(l_a_b,a).\ntail(l_a_b,l_b).\n")
    assert len(facts) == 2


def test_parse_exs():
    pos, neg = parse_exs("pos(f(a)).\nneg(f(b)).\npos(g).\n")
    assert pos == [(PredicateSymbol("f", 1), ("a",)), (PredicateSymbol("g", 0), ())]
    assert neg == [(PredicateSymbol("f", 1), ("b",))]


def test_parse_exs_list_argument_shares_interner():
    interner = ListInterner()
    pos, neg = parse_exs("pos(f([a,b])).\nneg(f([b])).\n", interner)
    assert pos == [(F, ("l_a_b",))] and neg == [(F, ("l_b",))]
    assert (HEAD_PRED, ("l_b", "b")) in set(interner.cells.atoms())


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("claim(f(a)).", "expected pos"),
        ("pos(f(a)). pos(f(a)).", "duplicate example"),
        ("pos(f(a)). neg(f(a)).", "both pos and neg"),
        ("pos(f(X)).", "ground"),
    ],
)
def test_parse_exs_errors(text, fragment):
    with pytest.raises(ParseError, match=fragment):
        parse_exs(text)


def test_parse_program_roundtrip():
    rules = (
        Rule(mk(F, 0), (mk(HEAD2, 0, "c"),)),
        Rule(mk(F, 0), (mk(TAIL2, 0, 1), mk(F, 1))),
    )
    prog = make_program(rules, F)
    assert parse_program(print_program(prog)) == prog.rules


def test_parse_program_rejects_unsafe_and_facts():
    with pytest.raises(ParseError, match="unsafe"):
        parse_program("f(A):- head(B,C).")
    with pytest.raises(ParseError, match="not a fact"):
        parse_program("f(a).")


def test_varmap_keeps_printed_names_and_handles_oddballs():
    vm = _VarMap()
    assert [vm.index(n) for n in ("A", "C", "V26", "B", "X")] == [0, 2, 26, 1, 23]
    vm2 = _VarMap()
    # Xs has no canonical slot, V0 is below the printed range, and A then
    # finds its slot stolen; all three fall back to the smallest free index
    assert vm2.index("Xs") == 0
    assert vm2.index("V0") == 1
    assert vm2.index("A") == 2
    assert vm2.index("Xs") == 0


def test_bk_roundtrip():
    facts = FactStore()
    facts.add(PredicateSymbol("p", 2), ("a", "b"))
    facts.add(PredicateSymbol("q", 0), ())
    rules = (Rule(mk(PredicateSymbol("r", 1), 0), (mk(PredicateSymbol("p", 2), 0, 1),)),)
    text = print_bk(facts, rules)
    facts2, rules2 = parse_bk(text)
    assert set(facts2.atoms()) == set(facts.atoms())
    assert rules2 == rules
    pos, neg = [(F, ("l_a",))], [(F, ("l_nil",))]
    assert parse_exs(print_exs(pos, neg)) == (pos, neg)


def test_load_task_merges_cells_and_validates():
    task = load_task(
        "head_pred(f,1). body_pred(head,2). body_pred(tail,2).",
        "val(x).",
        "pos(f([a,b])). neg(f([b])).",
    )
    assert (HEAD_PRED, ("l_a_b", "a")) in set(task.bk_facts.atoms())
    assert task.pos == [(F, ("l_a_b",))]


@pytest.mark.parametrize(
    "bias,bk,exs,fragment",
    [
        ("head_pred(f,1). body_pred(p,1).", "", "pos(g(a)).", "does not match"),
        ("head_pred(f,1). body_pred(p,1).", "", "neg(f(a)).", "no positive"),
        ("head_pred(f,1). body_pred(p,1).", "f(a).", "pos(f(a)).", "background facts"),
        ("head_pred(f,1). body_pred(p,1).", "g(X) :- f(X).", "pos(f(a)).", "background rule"),
    ],
)
def test_load_task_errors(bias, bk, exs, fragment):
    with pytest.raises(TaskError, match=fragment):
        load_task(bias, bk, exs)


def test_stats_json_is_flat():
    s = RunStats(wall_s=1.5, final_k=6, generated=10, tested=10, optimal=True, seed=3)
    d = json.loads(stats_json(s))
    assert d["final_k"] == 6 and d["optimal"] is True and d["seed"] == 3
    assert all(not isinstance(v, (dict, list)) for v in d.values())


def test_evaluate_accuracy():
    facts = FactStore()
    facts.add(PredicateSymbol("p", 1), ("a",))
    pos = [(F, ("a",))]
    neg = [(F, ("b",))]
    exact = make_program([Rule(mk(F, 0), (mk(PredicateSymbol("p", 1), 0),))], F)
    assert evaluate(exact, facts, (), pos, neg) == 1.0
    assert evaluate(None, facts, (), pos, neg) == 0.5
    everything = make_program(
        [Rule(mk(F, 0), (mk(PredicateSymbol("p", 1), 1),))], F
    )
    # covers any constant, so the negative is wrong: one of two correct
    assert evaluate(everything, facts, (), pos, neg) == 0.5
