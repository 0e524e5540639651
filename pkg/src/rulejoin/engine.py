"""Bottom-up evaluation of definite programs over ground facts.

Least models are computed by semi-naive fixpoint iteration (a naive mode
exists as a cross-check). Rules whose head variables do not all occur in the
body are evaluated with the unbound variables ranging over the constant
domain, which split-rule factors need.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .logic import Atom, Const, PredicateSymbol, Program, Rule, Var

GroundAtom = tuple[PredicateSymbol, tuple[str, ...]]

DEFAULT_MAX_DERIVED = 10_000_000


class DerivationLimitError(RuntimeError):
    """Raised when the least-model computation exceeds its derived-atom cap."""


class BiasViolationError(ValueError):
    """Hypothesis head predicate collides with the background knowledge."""


class FactStore:
    """Ground atoms grouped by predicate, with per-argument indexes."""

    def __init__(self, atoms: Iterable[GroundAtom] = ()):
        self._rel: dict[PredicateSymbol, set[tuple[str, ...]]] = {}
        self._index: dict[tuple[PredicateSymbol, int], dict[str, list[tuple[str, ...]]]] = {}
        for pred, args in atoms:
            self.add(pred, args)

    def add(self, pred: PredicateSymbol, args: tuple[str, ...]) -> bool:
        rel = self._rel.setdefault(pred, set())
        if args in rel:
            return False
        rel.add(args)
        for pos in range(len(args)):
            idx = self._index.get((pred, pos))
            if idx is not None:
                idx.setdefault(args[pos], []).append(args)
        return True

    def tuples(self, pred: PredicateSymbol) -> set[tuple[str, ...]]:
        return self._rel.get(pred, set())

    def lookup(self, pred: PredicateSymbol, pos: int, value: str) -> list[tuple[str, ...]]:
        key = (pred, pos)
        idx = self._index.get(key)
        if idx is None:
            idx = {}
            for args in self._rel.get(pred, ()):
                idx.setdefault(args[pos], []).append(args)
            self._index[key] = idx
        return idx.get(value, [])

    def preds(self):
        return self._rel.keys()

    def constants(self) -> set[str]:
        return {a for args in self._rel.values() for t in args for a in t}

    def atoms(self) -> Iterable[GroundAtom]:
        for pred in sorted(self._rel, key=lambda p: (p.name, p.arity)):
            for args in sorted(self._rel[pred]):
                yield (pred, args)

    def __contains__(self, atom: GroundAtom) -> bool:
        pred, args = atom
        return args in self._rel.get(pred, ())

    def __len__(self) -> int:
        return sum(len(rel) for rel in self._rel.values())


def _rule_constants(rules: Iterable[Rule]) -> set[str]:
    out = set()
    for r in rules:
        for atom in (r.head, *r.body):
            out |= {t.symbol for t in atom.args if isinstance(t, Const)}
    return out


class _Evaluator:
    """Fixpoint engine for one rule set over a fixed base store."""

    def __init__(self, rules: Sequence[Rule], base: FactStore, domain: Sequence[str], max_derived: int):
        self.rules = list(rules)
        self.base = base
        self.domain = list(domain)
        self.max_derived = max_derived
        self.derived_preds = {r.head.pred for r in self.rules}
        self.derived = FactStore()
        self.n_derived = 0

    def _candidates(self, atom: Atom, binding: dict[int, str], delta: FactStore | None, use_delta: bool):
        """Tuples that can ground `atom` under `binding`."""
        stores: list[FactStore]
        if use_delta:
            assert delta is not None
            stores = [delta]
        elif atom.pred in self.derived_preds and atom.pred in self.base.preds():
            stores = [self.base, self.derived]
        elif atom.pred in self.derived_preds:
            stores = [self.derived]
        else:
            stores = [self.base]
        # pick a bound position to use the index, if any
        bound_pos = None
        for pos, t in enumerate(atom.args):
            if isinstance(t, Const):
                bound_pos = (pos, t.symbol)
                break
            if t.index in binding:
                bound_pos = (pos, binding[t.index])
                break
        out: list[tuple[str, ...]] = []
        for store in stores:
            if bound_pos is None:
                out.extend(store.tuples(atom.pred))
            else:
                out.extend(store.lookup(atom.pred, bound_pos[0], bound_pos[1]))
        return out

    def _eval_rule(self, rule: Rule, delta: FactStore | None, delta_pos: int | None, emit):
        body = rule.body
        binding: dict[int, str] = {}

        def match_into(atom: Atom, args: tuple[str, ...]) -> list[int] | None:
            trail: list[int] = []
            for t, v in zip(atom.args, args):
                if isinstance(t, Const):
                    if t.symbol != v:
                        for k in trail:
                            del binding[k]
                        return None
                else:
                    bound = binding.get(t.index)
                    if bound is None:
                        binding[t.index] = v
                        trail.append(t.index)
                    elif bound != v:
                        for k in trail:
                            del binding[k]
                        return None
            return trail

        def go(remaining: list[int]):
            if not remaining:
                self._emit_head(rule, binding, emit)
                return
            # most-bound atom first keeps the join narrow
            best = min(
                remaining,
                key=lambda i: sum(
                    1 for t in body[i].args if isinstance(t, Var) and t.index not in binding
                ),
            )
            rest = [i for i in remaining if i != best]
            for args in self._candidates(body[best], binding, delta, False):
                trail = match_into(body[best], args)
                if trail is not None:
                    go(rest)
                    for k in trail:
                        del binding[k]

        if delta_pos is not None:
            # the delta atom joins first so only new derivations are explored
            rest0 = [i for i in range(len(body)) if i != delta_pos]
            for args in self._candidates(body[delta_pos], binding, delta, True):
                trail = match_into(body[delta_pos], args)
                if trail is not None:
                    go(rest0)
                    for k in trail:
                        del binding[k]
        else:
            go(list(range(len(body))))

    def _emit_head(self, rule: Rule, binding: dict[int, str], emit):
        unbound = [t.index for t in rule.head.args if isinstance(t, Var) and t.index not in binding]
        if not unbound:
            args = tuple(
                t.symbol if isinstance(t, Const) else binding[t.index] for t in rule.head.args
            )
            emit(rule.head.pred, args)
            return
        # unbound head vars range over the whole constant domain
        def expand(i: int, b: dict[int, str]):
            if i == len(unbound):
                args = tuple(t.symbol if isinstance(t, Const) else b[t.index] for t in rule.head.args)
                emit(rule.head.pred, args)
                return
            for c in self.domain:
                b[unbound[i]] = c
                expand(i + 1, b)
            del b[unbound[i]]

        expand(0, dict(binding))

    def _commit(self, pending: list[GroundAtom]) -> list[GroundAtom]:
        # additions are deferred to round boundaries so candidate sets are
        # never mutated while being iterated
        fresh = []
        for pred, args in pending:
            if self.derived.add(pred, args):
                self.n_derived += 1
                if self.n_derived > self.max_derived:
                    raise DerivationLimitError(f"exceeded {self.max_derived} derived atoms")
                fresh.append((pred, args))
        return fresh

    def _collector(self, pending: list[GroundAtom]):
        def emit(pred: PredicateSymbol, args: tuple[str, ...]):
            if (pred, args) not in self.base and (pred, args) not in self.derived:
                pending.append((pred, args))

        return emit

    def run_seminaive(self) -> FactStore:
        pending: list[GroundAtom] = []
        emit = self._collector(pending)
        for rule in self.rules:
            self._eval_rule(rule, None, None, emit)
        new = self._commit(pending)
        while new:
            delta = FactStore(new)
            pending = []
            emit = self._collector(pending)
            for rule in self.rules:
                for pos, atom in enumerate(rule.body):
                    if atom.pred in self.derived_preds and delta.tuples(atom.pred):
                        self._eval_rule(rule, delta, pos, emit)
            new = self._commit(pending)
        return self.derived

    def run_naive(self) -> FactStore:
        while True:
            pending: list[GroundAtom] = []
            emit = self._collector(pending)
            for rule in self.rules:
                self._eval_rule(rule, None, None, emit)
            if not self._commit(pending):
                return self.derived


def _check_bias(head_predicates: set[PredicateSymbol], bk_rules: Sequence[Rule], bk_facts: FactStore):
    for r in bk_rules:
        for b in r.body:
            if b.pred in head_predicates:
                raise BiasViolationError(
                    f"hypothesis predicate {b.pred} occurs in background rule body: {r}"
                )
        if r.head.pred in head_predicates:
            raise BiasViolationError(
                f"hypothesis predicate {r.head.pred} is defined by background rule: {r}"
            )
    for pred in bk_facts.preds():
        if pred in head_predicates:
            raise BiasViolationError(f"hypothesis predicate {pred} has background facts")


def least_model(
    program: Program | None,
    bk_facts: FactStore,
    bk_rules: Sequence[Rule] = (),
    domain: Sequence[str] | None = None,
    max_derived: int = DEFAULT_MAX_DERIVED,
    seminaive: bool = True,
) -> FactStore:
    """Least Herbrand model of program + background, as one fact store."""
    rules = list(bk_rules)
    if program is not None:
        _check_bias({r.head.pred for r in program.rules}, bk_rules, bk_facts)
        rules += list(program.rules)
    if domain is None:
        domain = sorted(bk_facts.constants() | _rule_constants(rules))
    ev = _Evaluator(rules, bk_facts, domain, max_derived)
    derived = ev.run_seminaive() if seminaive else ev.run_naive()
    out = FactStore(bk_facts.atoms())
    for atom in derived.atoms():
        out.add(*atom)
    return out


def restricted_model(model: FactStore, pred: PredicateSymbol) -> set[GroundAtom]:
    """Atoms of `model` whose predicate is `pred`."""
    return {(pred, args) for args in model.tuples(pred)}


@dataclass(frozen=True)
class CoverageRecord:
    pos_bits: int
    neg_bits: int
    n_pos: int
    n_neg: int

    @property
    def tp(self) -> int:
        return self.pos_bits.bit_count()

    @property
    def fn(self) -> int:
        return self.n_pos - self.tp

    @property
    def fp(self) -> int:
        return self.neg_bits.bit_count()


class CoverageTester:
    """Tests hypothesis programs against fixed background and examples.

    The background closure (facts plus background-rule consequences) is
    computed once; each hypothesis only derives its own head predicates on top.
    """

    def __init__(
        self,
        bk_facts: FactStore,
        bk_rules: Sequence[Rule],
        pos: Sequence[GroundAtom],
        neg: Sequence[GroundAtom],
        extra_constants: Iterable[str] = (),
        max_derived: int = DEFAULT_MAX_DERIVED,
        seminaive: bool = True,
    ):
        self.pos = list(pos)
        self.neg = list(neg)
        self.bk_rules = list(bk_rules)
        self.max_derived = max_derived
        self.seminaive = seminaive
        example_consts = {c for _, args in [*pos, *neg] for c in args}
        self.domain = sorted(
            bk_facts.constants() | _rule_constants(bk_rules) | example_consts | set(extra_constants)
        )
        closure_ev = _Evaluator(self.bk_rules, bk_facts, self.domain, max_derived)
        closure = closure_ev.run_seminaive() if seminaive else closure_ev.run_naive()
        self.closure = FactStore(bk_facts.atoms())
        for atom in closure.atoms():
            self.closure.add(*atom)
        self.bk_body_preds = {b.pred for r in bk_rules for b in r.body}
        self.bk_head_preds = {r.head.pred for r in bk_rules} | set(bk_facts.preds())

    def model_of(self, program: Program) -> FactStore:
        heads = {r.head.pred for r in program.rules}
        if heads & self.bk_body_preds or heads & self.bk_head_preds:
            bad = heads & (self.bk_body_preds | self.bk_head_preds)
            raise BiasViolationError(f"hypothesis predicates {sorted(bad)} collide with background")
        ev = _Evaluator(list(program.rules), self.closure, self.domain, self.max_derived)
        return ev.run_seminaive() if self.seminaive else ev.run_naive()

    def coverage(self, program: Program) -> CoverageRecord:
        derived = self.model_of(program)
        pos_bits = 0
        for i, (pred, args) in enumerate(self.pos):
            if args in derived.tuples(pred):
                pos_bits |= 1 << i
        neg_bits = 0
        for i, (pred, args) in enumerate(self.neg):
            if args in derived.tuples(pred):
                neg_bits |= 1 << i
        return CoverageRecord(pos_bits, neg_bits, len(self.pos), len(self.neg))


def coverage(
    program: Program,
    bk_facts: FactStore,
    bk_rules: Sequence[Rule],
    pos: Sequence[GroundAtom],
    neg: Sequence[GroundAtom],
    max_derived: int = DEFAULT_MAX_DERIVED,
) -> CoverageRecord:
    tester = CoverageTester(bk_facts, bk_rules, pos, neg, max_derived=max_derived)
    return tester.coverage(program)
