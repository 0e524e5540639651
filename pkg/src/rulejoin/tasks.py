"""Synthetic task families with a planted large-rule solution.

Both families force joining: every negative example is one feature short of
positive, so no single small rule separates them, but the conjunction of all
per-feature rules does.

- Scene tasks (scale k = 1+3m): scenes of colored pieces, positive iff all m
  required colors are present. Planted solution is the conjunction of the m
  cost-3 rules `zendo(A):- piece(A,B),color(B)`, total cost 3m = k-1.
- String tasks (scale k = 1+7n): character lists, positive iff all n required
  characters occur. Each planted member is a cost-6 recursive contains
  program (head check plus tail recursion), total cost 6n; its reified form
  has size 7n+1 = k. Every string shares a two-character prefix of
  unclassified characters, so nothing can be read off the list head.
"""

import random
from dataclasses import dataclass
from pathlib import Path

from .engine import FactStore
from .generate import Bias
from .logic import PredicateSymbol
from .taskio import HEAD_PRED, TAIL_PRED, ListInterner, print_bias, print_bk, print_exs

PALETTE = (
    "blue red green yellow orange purple pink brown black white gray cyan "
    "magenta teal maroon navy olive lime silver gold"
).split()


@dataclass
class GeneratedTask:
    bias: Bias
    bk_facts: FactStore
    pos: list
    neg: list
    test_bk_facts: FactStore
    test_pos: list
    test_neg: list
    bk_rules: tuple = ()


def _scene_colors(rng, required, distractors, negative_slot):
    if negative_slot is None:
        colors = list(required)
        colors += [d for d in distractors if rng.random() < 0.5]
    else:
        colors = [c for c in required if c != negative_slot]
        colors += list(distractors)
    rng.shuffle(colors)
    return colors


def zendo_task(k, n_train=None, n_test=20, seed=0):
    """Scenes of colored pieces; optimal solution cost is k-1."""
    if k < 4 or (k - 1) % 3:
        raise ValueError("scene task scale must be 1+3m for some m >= 1")
    m = (k - 1) // 3
    if m + 2 > len(PALETTE):
        raise ValueError(f"scene task supports at most m={len(PALETTE) - 2}")
    if n_train is None:
        n_train = 2 * max(10, m)
    if n_train // 2 < m:
        # every drop-one-color variant must appear among the negatives,
        # otherwise a cheaper sub-conjunction separates the training split
        raise ValueError(f"need at least {2 * m} training examples for m={m}")
    required, distractors = PALETTE[:m], PALETTE[m : m + 2]
    piece = PredicateSymbol("piece", 2)
    zendo = PredicateSymbol("zendo", 1)
    by_name = {c: PredicateSymbol(c, 1) for c in required + distractors}
    rng = random.Random(seed)

    def split(prefix, count):
        facts = FactStore()
        pos, neg = [], []
        n_pos = count - count // 2
        for j in range(count):
            scene = f"{prefix}{j}"
            slot = None if j < n_pos else required[(j - n_pos) % m]
            for i, color in enumerate(_scene_colors(rng, required, distractors, slot)):
                pid = f"{scene}_p{i}"
                facts.add(piece, (scene, pid))
                facts.add(by_name[color], (pid,))
            (pos if slot is None else neg).append((zendo, (scene,)))
        return facts, pos, neg

    bk, pos, neg = split("s", n_train)
    test_bk, test_pos, test_neg = split("t", n_test)
    bias = Bias(
        zendo,
        (piece, *by_name.values()),
        max_vars=3,
        max_body=2,
        max_rules=1,
    )
    return GeneratedTask(bias, bk, pos, neg, test_bk, test_pos, test_neg)


def _string_payload(rng, required, distractors, negative_slot):
    if negative_slot is None:
        chars = list(required)
        chars += [d for d in distractors if rng.random() < 0.5]
    else:
        chars = [c for c in required if c != negative_slot]
        chars += list(distractors)
    rng.shuffle(chars)
    return chars


def string_task(k, n_train=None, n_test=20, seed=0):
    """Lists of characters; optimal solution cost is 6n with reified size k."""
    if k < 8 or (k - 1) % 7:
        raise ValueError("string task scale must be 1+7n for some n >= 1")
    n = (k - 1) // 7
    alphabet = "abcdefghijklmnopqrstuv"
    if n > len(alphabet):
        raise ValueError(f"string task supports at most n={len(alphabet)}")
    if n_train is None:
        n_train = 2 * max(10, n)
    if n_train // 2 < n:
        raise ValueError(f"need at least {2 * n} training examples for n={n}")
    required, distractors, prefix = list(alphabet[:n]), ["w", "x"], ["y", "z"]
    f = PredicateSymbol("f", 1)
    classes = {c: PredicateSymbol(f"is_{c}", 1) for c in required + distractors}
    rng = random.Random(seed)

    def split(count):
        interner = ListInterner()
        facts = FactStore()
        for c, pred in sorted(classes.items()):
            facts.add(pred, (c,))
        pos, neg = [], []
        seen = set()
        n_pos = count - count // 2
        for j in range(count):
            slot = None if j < n_pos else required[(j - n_pos) % n]
            payload = _string_payload(rng, required, distractors, slot)
            string = prefix + payload
            while tuple(string) in seen:
                payload = payload + [rng.choice(payload)]
                rng.shuffle(payload)
                string = prefix + payload
            seen.add(tuple(string))
            name = interner.intern(string)
            (pos if slot is None else neg).append((f, (name,)))
        for atom in interner.cells.atoms():
            facts.add(*atom)
        return facts, pos, neg

    bk, pos, neg = split(n_train)
    test_bk, test_pos, test_neg = split(n_test)
    bias = Bias(
        f,
        (HEAD_PRED, TAIL_PRED, *classes.values()),
        max_vars=3,
        max_body=2,
        max_rules=2,
        enable_recursion=True,
    )
    return GeneratedTask(bias, bk, pos, neg, test_bk, test_pos, test_neg)


FAMILIES = {"zendo": zendo_task, "string": string_task}


def write_task(task, out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "bias": (out / "bias.pl", print_bias(task.bias)),
        "bk": (out / "bk.pl", print_bk(task.bk_facts, task.bk_rules)),
        "exs": (out / "exs.pl", print_exs(task.pos, task.neg)),
        "test_bk": (out / "test_bk.pl", print_bk(task.test_bk_facts)),
        "test_exs": (out / "test_exs.pl", print_exs(task.test_pos, task.test_neg)),
    }
    for path, text in files.values():
        path.write_text(text)
    return {name: path for name, (path, _) in files.items()}
