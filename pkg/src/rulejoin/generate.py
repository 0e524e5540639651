"""Candidate enumeration: every safe, canonical, non-separable program of a
given cost, filtered for splittability and against the constraint store.

Single-rule programs are non-recursive (a lone recursive rule has no base
case and derives nothing). Multi-rule programs are recursive with at least
one base rule; purely non-recursive multi-rule programs are separable, so
they never appear. Splittability is only checked on non-recursive
single-rule candidates.
"""

import itertools
from dataclasses import dataclass, field

from .logic import (
    Atom,
    Const,
    PredicateSymbol,
    Program,
    Rule,
    Var,
    canonicalize,
    is_recursive_rule,
    is_safe,
    is_splittable_rule,
    rule_key,
    rule_size,
    theta_subsumes,
)


class BiasError(ValueError):
    """Malformed language bias."""


@dataclass
class Bias:
    head_pred: PredicateSymbol
    body_preds: tuple
    max_vars: int = 3
    max_body: int = 3
    max_rules: int = 1
    enable_recursion: bool = False
    constant_pool: dict = field(default_factory=dict)  # (pred, argpos) -> constants
    allow_splittable: bool = False

    def __post_init__(self):
        self.body_preds = tuple(sorted(set(self.body_preds), key=lambda p: (p.name, p.arity)))
        if self.max_vars < self.head_pred.arity:
            raise BiasError("max_vars smaller than head arity")
        if self.max_body < 1 or self.max_rules < 1:
            raise BiasError("max_body and max_rules must be positive")
        if self.head_pred in self.body_preds:
            raise BiasError("declare recursion via enable_recursion, not body_pred")
        for (pred, pos), _ in sorted(self.constant_pool.items(), key=lambda kv: (kv[0][0].name, kv[0][1])):
            if pred not in self.body_preds and pred != self.head_pred:
                raise BiasError(f"constants declared for undeclared predicate {pred.name}")
            if not 1 <= pos <= pred.arity:
                raise BiasError(f"constant position {pos} out of range for {pred.name}/{pred.arity}")

    def max_rule_size(self) -> int:
        return 1 + self.max_body


class ConstraintStore:
    """Programs whose tested coverage (tp=0 or fp=0) makes every
    specialisation useless for an optimal solution; generation is
    size-increasing, so every stored program is at most as costly as the
    candidates it prunes."""

    def __init__(self):
        self.entries = []

    def __len__(self):
        return len(self.entries)

    def prune_specialisations(self, h: Program, verdict: str):
        if verdict not in ("no_pos", "no_neg"):
            raise ValueError(f"unknown verdict {verdict!r}")
        if not self.prunes(h):
            self.entries.append(h)

    def prunes(self, candidate: Program) -> bool:
        return any(theta_subsumes(g, candidate) for g in self.entries)


class ProgramEnumerator:
    def __init__(self, bias: Bias):
        self.bias = bias
        self._pools = {}  # rule size -> (base rules, recursive rules), each key-sorted

    def _term_choices(self, pred, pos):
        terms = [Var(i) for i in range(self.bias.max_vars)]
        for c in sorted(self.bias.constant_pool.get((pred, pos), ())):
            terms.append(Const(c))
        return terms

    def _atom_universe(self):
        preds = list(self.bias.body_preds)
        if self.bias.enable_recursion:
            preds.append(self.bias.head_pred)
        preds.sort(key=lambda p: (p.name, p.arity))
        atoms = []
        for p in preds:
            choices = [self._term_choices(p, i + 1) for i in range(p.arity)]
            for args in itertools.product(*choices):
                atoms.append(Atom(p, args))
        return atoms

    def rules_of_size(self, size: int):
        """Canonical safe rules with exactly size-1 body atoms, split into
        (non-recursive, recursive) and sorted for stable streaming."""
        if size in self._pools:
            return self._pools[size]
        n_body = size - 1
        head = Atom(self.bias.head_pred, tuple(Var(i) for i in range(self.bias.head_pred.arity)))
        base, rec = set(), set()
        if 1 <= n_body <= self.bias.max_body:
            universe = self._atom_universe()
            for body in itertools.combinations(universe, n_body):
                r = Rule(head, body)
                if not is_safe(r):
                    continue
                r = canonicalize(r)
                (rec if is_recursive_rule(r) else base).add(r)
        pools = (sorted(base, key=rule_key), sorted(rec, key=rule_key))
        self._pools[size] = pools
        return pools

    def programs_of_size(self, k: int, store: ConstraintStore | None = None):
        """All eligible programs of cost exactly k, single-rule first, then
        by rule count, lexicographic within each group."""
        if k < 2:
            return
        bias = self.bias
        base, _ = self.rules_of_size(k)
        for r in base:
            if not bias.allow_splittable and is_splittable_rule(r):
                continue
            prog = Program((r,), bias.head_pred)
            if store is not None and store.prunes(prog):
                continue
            yield prog
        if not bias.enable_recursion or bias.max_rules < 2:
            return
        pool = []
        for s in range(2, min(bias.max_rule_size(), k - 2) + 1):
            b, r = self.rules_of_size(s)
            pool.extend(b)
            pool.extend(r)
        pool.sort(key=rule_key)
        sizes = [rule_size(r) for r in pool]
        recflags = [is_recursive_rule(r) for r in pool]

        def emit(start, budget, left, chosen, has_base, has_rec):
            if left == 0:
                if budget == 0 and has_base and has_rec:
                    prog = Program(tuple(chosen), bias.head_pred)
                    if store is None or not store.prunes(prog):
                        yield prog
                return
            for i in range(start, len(pool)):
                s = sizes[i]
                if s > budget - 2 * (left - 1):
                    continue
                chosen.append(pool[i])
                yield from emit(
                    i + 1, budget - s, left - 1, chosen, has_base or not recflags[i], has_rec or recflags[i]
                )
                chosen.pop()

        for n_rules in range(2, bias.max_rules + 1):
            if 2 * n_rules > k:
                break
            yield from emit(0, k, n_rules, [], False, False)


def programs_of_size(k: int, bias: Bias, store: ConstraintStore | None = None):
    enum = getattr(bias, "_enum", None)
    if enum is None or enum.bias is not bias:
        enum = ProgramEnumerator(bias)
        bias._enum = enum
    return enum.programs_of_size(k, store)
