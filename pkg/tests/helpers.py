"""Shared fixtures and tiny generators for the test suites."""

import itertools
import random
from types import SimpleNamespace

from rulejoin.engine import CoverageTester, FactStore
from rulejoin.generate import Bias, programs_of_size
from rulejoin.logic import Atom, Const, PredicateSymbol, Rule, Var, make_program, program_cost

F = PredicateSymbol("f", 1)
HEAD2 = PredicateSymbol("head", 2)
TAIL2 = PredicateSymbol("tail", 2)
LAST2 = PredicateSymbol("last", 2)


def mk(pred, *args):
    return Atom(pred, tuple(Var(a) if isinstance(a, int) else Const(a) for a in args))


def list_const(items) -> str:
    return "l_" + "_".join(items) if items else "l_nil"


def add_list_facts(store: FactStore, items, with_last=False):
    """head/tail (and optionally last) facts for a list and all its suffixes."""
    items = list(items)
    while items:
        c = list_const(items)
        store.add(HEAD2, (c, items[0]))
        store.add(TAIL2, (c, list_const(items[1:])))
        if with_last:
            store.add(LAST2, (c, items[-1]))
        items = items[1:]
    return store


def worked_join_example():
    """The five-program list fixture: two positives, three negatives, and the
    programs head-a / last-e / second-is-b / contains-c / contains-d."""
    pos_lists = [list("abcd"), list("cbde")]
    neg_lists = [list("cb"), list("db"), list("acde")]
    store = FactStore()
    for xs in pos_lists + neg_lists:
        add_list_facts(store, xs, with_last=True)
    pos = [(F, (list_const(xs),)) for xs in pos_lists]
    neg = [(F, (list_const(xs),)) for xs in neg_lists]

    p1 = make_program([Rule(mk(F, 0), (mk(HEAD2, 0, "a"),))], F)
    p2 = make_program([Rule(mk(F, 0), (mk(LAST2, 0, "e"),))], F)
    p3 = make_program([Rule(mk(F, 0), (mk(TAIL2, 0, 1), mk(HEAD2, 1, "b")))], F)
    p4 = make_program(
        [Rule(mk(F, 0), (mk(HEAD2, 0, "c"),)), Rule(mk(F, 0), (mk(TAIL2, 0, 1), mk(F, 1)))], F
    )
    p5 = make_program(
        [Rule(mk(F, 0), (mk(HEAD2, 0, "d"),)), Rule(mk(F, 0), (mk(TAIL2, 0, 1), mk(F, 1)))], F
    )
    return store, pos, neg, [p1, p2, p3, p4, p5]


def intro_zendo_task():
    """Five scenes of colored pieces; a scene is positive iff it has a blue,
    a red, and a green piece. Cheapest hypothesis is the three-way
    conjunction of single-color rules, cost 9."""
    piece = PredicateSymbol("piece", 2)
    colors = {n: PredicateSymbol(n, 1) for n in ("blue", "red", "green", "yellow")}
    zendo = PredicateSymbol("zendo", 1)
    scenes = {
        "s1": ("blue", "red", "green", "yellow"),
        "s2": ("blue", "red", "green"),
        "s3": ("blue", "red", "yellow"),
        "s4": ("blue", "green", "yellow"),
        "s5": ("red", "green", "yellow"),
    }
    store = FactStore()
    for s, cs in scenes.items():
        for i, c in enumerate(cs):
            pid = f"{s}_p{i}"
            store.add(piece, (s, pid))
            store.add(colors[c], (pid,))
    pos = [(zendo, ("s1",)), (zendo, ("s2",))]
    neg = [(zendo, (s,)) for s in ("s3", "s4", "s5")]
    bias = Bias(zendo, (piece, *colors.values()), max_vars=3, max_body=2, max_rules=1)
    return SimpleNamespace(bias=bias, bk_facts=store, bk_rules=(), pos=pos, neg=neg)


def random_tiny_task(rng: random.Random):
    """Random facts over three constants, random example split. Non-recursive
    single-rule bias, so union coverage is exactly the or of unit coverages."""
    p = PredicateSymbol("p", 1)
    q = PredicateSymbol("q", 1)
    r = PredicateSymbol("r", 2)
    f = PredicateSymbol("f", 1)
    consts = ["a", "b", "c"]
    store = FactStore()
    for c in consts:
        if rng.random() < 0.5:
            store.add(p, (c,))
        if rng.random() < 0.5:
            store.add(q, (c,))
    for c1 in consts:
        for c2 in consts:
            if rng.random() < 0.3:
                store.add(r, (c1, c2))
    pos, neg = [], []
    for c in consts:
        (pos if rng.random() < 0.5 else neg).append((f, (c,)))
    if not pos:
        pos.append(neg.pop())
    bias = Bias(f, (p, q, r), max_vars=3, max_body=2, max_rules=1)
    return SimpleNamespace(bias=bias, bk_facts=store, bk_rules=(), pos=pos, neg=neg)


def oracle_optimal_cost(task, cap):
    """Brute-force optimum for non-recursive tasks: enumerate every program up
    to the cap, form all negative-free conjunctions of the impure ones, then
    take a minimum-cost cover of the positives (subset dp over coverage
    masks). Returns None when no hypothesis within the cap covers them all."""
    tester = CoverageTester(task.bk_facts, task.bk_rules, task.pos, task.neg)
    n_pos = len(task.pos)
    full = (1 << n_pos) - 1
    units = []
    impure = []
    for k in range(2, cap + 1):
        for prog in programs_of_size(k, task.bias):
            rec = tester.coverage(prog)
            if rec.tp == 0:
                continue
            if rec.fp == 0:
                units.append((program_cost(prog), rec.pos_bits))
            else:
                impure.append((program_cost(prog), rec.pos_bits, rec.neg_bits))
    for size in range(2, cap // 2 + 1):
        for combo in itertools.combinations(impure, size):
            cost = sum(c for c, _, _ in combo)
            if cost > cap:
                continue
            pb, nb = full, (1 << len(task.neg)) - 1
            for _, pbits, nbits in combo:
                pb &= pbits
                nb &= nbits
            if pb and not nb:
                units.append((cost, pb))
    dp = [None] * (full + 1)
    dp[0] = 0
    for mask in range(full + 1):
        if dp[mask] is None:
            continue
        for cost, pbits in units:
            new = mask | pbits
            if new != mask and (dp[new] is None or dp[mask] + cost < dp[new]):
                dp[new] = dp[mask] + cost
    if dp[full] is None or dp[full] > cap:
        return None
    return dp[full]


def random_fact_store(rng: random.Random, preds, consts):
    store = FactStore()
    for pred in preds:
        for _ in range(rng.randint(0, 3 * len(consts))):
            store.add(pred, tuple(rng.choice(consts) for _ in range(pred.arity)))
    return store


def random_safe_rule(rng: random.Random, head_pred, body_preds, max_vars=3, max_body=3, consts=()):
    head = Atom(head_pred, tuple(Var(i) for i in range(head_pred.arity)))
    while True:
        body = []
        for _ in range(rng.randint(1, max_body)):
            p = rng.choice(body_preds)
            args = []
            for _ in range(p.arity):
                if consts and rng.random() < 0.15:
                    args.append(Const(rng.choice(consts)))
                else:
                    args.append(Var(rng.randrange(max_vars)))
            body.append(Atom(p, tuple(args)))
        r = Rule(head, tuple(body))
        if {t.index for t in head.args} <= {
            t.index for a in body for t in a.args if isinstance(t, Var)
        }:
            return r
