"""Function-free definite clauses: terms, atoms, rules, programs.

Rules are kept in a canonical form (variables renamed, body atoms sorted) so
that alpha-equivalent rules compare equal and enumeration can deduplicate with
a set lookup. Variables are plain integer indices; constants are strings.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator


@dataclass(frozen=True, order=True)
class PredicateSymbol:
    name: str
    arity: int

    def __repr__(self):
        return f"{self.name}/{self.arity}"


@dataclass(frozen=True)
class Var:
    index: int

    def __repr__(self):
        return var_name(self.index)


@dataclass(frozen=True)
class Const:
    symbol: str

    def __repr__(self):
        return self.symbol


Term = Var | Const


def var_name(index: int) -> str:
    # A..Z, then V26, V27, ...
    if index < 26:
        return chr(ord("A") + index)
    return f"V{index}"


def _term_key(t: Term):
    # vars sort before constants; fixed total order for canonical bodies
    if isinstance(t, Var):
        return (0, t.index, "")
    return (1, 0, t.symbol)


@dataclass(frozen=True)
class Atom:
    pred: PredicateSymbol
    args: tuple[Term, ...]

    def __post_init__(self):
        if len(self.args) != self.pred.arity:
            raise ValueError(f"{self.pred} applied to {len(self.args)} args")

    def __repr__(self):
        if not self.args:
            return self.pred.name
        return f"{self.pred.name}({','.join(map(repr, self.args))})"


def atom_key(a: Atom):
    return (a.pred.name, a.pred.arity, tuple(_term_key(t) for t in a.args))


def atom_vars(a: Atom) -> set[int]:
    return {t.index for t in a.args if isinstance(t, Var)}


def rename_atom(a: Atom, mapping: dict[int, int]) -> Atom:
    return Atom(a.pred, tuple(Var(mapping[t.index]) if isinstance(t, Var) else t for t in a.args))


@dataclass(frozen=True)
class Rule:
    head: Atom
    body: tuple[Atom, ...]

    def __post_init__(self):
        if not self.body:
            raise ValueError("rule body must be non-empty")

    def __repr__(self):
        return format_rule(self)


def rule_key(r: Rule):
    return (atom_key(r.head), tuple(atom_key(b) for b in r.body))


def rule_size(r: Rule) -> int:
    # head-inclusive literal count
    return 1 + len(r.body)


def rule_vars(r: Rule) -> set[int]:
    vs = atom_vars(r.head)
    for b in r.body:
        vs |= atom_vars(b)
    return vs


def head_vars(r: Rule) -> set[int]:
    return atom_vars(r.head)


def body_vars(r: Rule) -> set[int]:
    vs: set[int] = set()
    for b in r.body:
        vs |= atom_vars(b)
    return vs


def body_only_vars(r: Rule) -> set[int]:
    return body_vars(r) - atom_vars(r.head)


def is_safe(r: Rule) -> bool:
    """Every variable in the head occurs in the body."""
    return atom_vars(r.head) <= body_vars(r)


def is_recursive_rule(r: Rule, head_preds: Iterable[PredicateSymbol] | None = None) -> bool:
    preds = set(head_preds) if head_preds is not None else {r.head.pred}
    return any(b.pred in preds for b in r.body)


class UnsafeRuleError(ValueError):
    pass


def canonicalize(r: Rule, require_safe: bool = True) -> Rule:
    """Canonical representative of r's alpha-equivalence class.

    Head variables are forced by first occurrence in the head; body-only
    variables take the assignment minimizing the sorted body. Idempotent, and
    canonicalize(r1) == canonicalize(r2) iff r1, r2 differ only by a variable
    bijection / body reordering / duplicate body atoms.
    """
    if require_safe and not is_safe(r):
        raise UnsafeRuleError(f"unsafe rule: {r}")
    hmap: dict[int, int] = {}
    for t in r.head.args:
        if isinstance(t, Var) and t.index not in hmap:
            hmap[t.index] = len(hmap)
    nh = len(hmap)
    bo = sorted(body_vars(r) - set(hmap))
    best = None
    for perm in itertools.permutations(range(nh, nh + len(bo))):
        ren = hmap | dict(zip(bo, perm))
        body = tuple(sorted({rename_atom(b, ren) for b in r.body}, key=atom_key))
        key = tuple(atom_key(b) for b in body)
        if best is None or key < best[0]:
            best = (key, body)
    assert best is not None
    return Rule(rename_atom(r.head, hmap), best[1])


def is_canonical(r: Rule) -> bool:
    return canonicalize(r, require_safe=False) == r


@dataclass(frozen=True)
class Program:
    """A set of definite rules defining `target` (plus auxiliaries after reification)."""

    rules: tuple[Rule, ...]
    target: PredicateSymbol

    def __repr__(self):
        return format_program(self)


def make_program(rules: Iterable[Rule], target: PredicateSymbol) -> Program:
    return Program(tuple(sorted(set(rules), key=rule_key)), target)


def program_key(p: Program):
    return tuple(rule_key(r) for r in p.rules)


def program_cost(p: Program) -> int:
    """Total number of literals, heads included."""
    return sum(rule_size(r) for r in p.rules)


def head_preds(p: Program) -> set[PredicateSymbol]:
    return {r.head.pred for r in p.rules}


def is_recursive(p: Program) -> bool:
    """Some rule-head predicate of p occurs in some rule body."""
    hp = head_preds(p)
    return any(b.pred in hp for r in p.rules for b in r.body)


def is_separable(p: Program) -> bool:
    """At least two rules and no rule-head predicate in any body."""
    return len(p.rules) >= 2 and not is_recursive(p)


# -- theta-subsumption --------------------------------------------------------


def _match_atom(g: Atom, h: Atom, theta: dict[int, Term]) -> dict[int, Term] | None:
    """Extend theta so that g theta == h; h is taken literally (no renaming)."""
    if g.pred != h.pred:
        return None
    out = dict(theta)
    for gt, ht in zip(g.args, h.args):
        if isinstance(gt, Const):
            if gt != ht:
                return None
        else:
            bound = out.get(gt.index)
            if bound is None:
                out[gt.index] = ht
            elif bound != ht:
                return None
    return out


def rule_subsumes(g: Rule, h: Rule) -> bool:
    """True iff some substitution theta maps g's head to h's head and g's body
    into a subset of h's body."""
    theta0 = _match_atom(g.head, h.head, {})
    if theta0 is None:
        return False
    by_pred: dict[PredicateSymbol, list[Atom]] = {}
    for b in h.body:
        by_pred.setdefault(b.pred, []).append(b)
    gb = sorted(g.body, key=lambda a: len(by_pred.get(a.pred, ())))

    def go(i: int, theta: dict[int, Term]) -> bool:
        if i == len(gb):
            return True
        for cand in by_pred.get(gb[i].pred, ()):
            ext = _match_atom(gb[i], cand, theta)
            if ext is not None and go(i + 1, ext):
                return True
        return False

    return go(0, theta0)


def theta_subsumes(g: Program, h: Program) -> bool:
    """Program-level subsumption: every rule of h is subsumed by some rule of g.

    If theta_subsumes(g, h), h is a specialisation of g and covers no more
    examples than g does.
    """
    return all(any(rule_subsumes(rg, rh) for rg in g.rules) for rh in h.rules)


# -- splittability -------------------------------------------------------------


def body_components(r: Rule) -> list[tuple[Atom, ...]]:
    """Connected components of the body under shared body-only variables.

    Atoms with no body-only variables are singleton components. Components are
    returned in the order of their first atom in r.body.
    """
    bo = body_only_vars(r)
    parent = list(range(len(r.body)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    by_var: dict[int, int] = {}
    for i, atom in enumerate(r.body):
        for v in atom_vars(atom) & bo:
            if v in by_var:
                parent[find(i)] = find(by_var[v])
            else:
                by_var[v] = i
    groups: dict[int, list[Atom]] = {}
    for i, atom in enumerate(r.body):
        groups.setdefault(find(i), []).append(atom)
    return [tuple(groups[root]) for root in sorted(groups, key=lambda root: min(
        i for i, _ in enumerate(r.body) if find(i) == root))]


def is_splittable_rule(r: Rule) -> bool:
    """Body partitions into two non-empty groups with disjoint body-only vars."""
    return len(body_components(r)) >= 2


def split_rule(r: Rule) -> list[Rule]:
    """Factor rules of a non-recursive rule, one per body component.

    The intersection of the factor models equals the model of r. Factors of a
    safe rule need not be safe (a component may omit head variables); they are
    still evaluable, with unbound head variables ranging over the domain.
    """
    if is_recursive_rule(r):
        raise ValueError(f"cannot split recursive rule: {r}")
    comps = body_components(r)
    if len(comps) == 1:
        return [canonicalize(r, require_safe=False)]
    return [canonicalize(Rule(r.head, comp), require_safe=False) for comp in comps]


def is_splittable_program(p: Program) -> bool:
    """Exactly one rule, and that rule is splittable."""
    return len(p.rules) == 1 and is_splittable_rule(p.rules[0])


# -- formatting ----------------------------------------------------------------


def format_term(t: Term) -> str:
    return var_name(t.index) if isinstance(t, Var) else t.symbol


def format_atom(a: Atom) -> str:
    if not a.args:
        return a.pred.name
    return f"{a.pred.name}({','.join(format_term(t) for t in a.args)})"


def format_rule(r: Rule) -> str:
    return f"{format_atom(r.head)}:- {','.join(format_atom(b) for b in r.body)}."


def format_program(p: Program) -> str:
    return "\n".join(format_rule(r) for r in p.rules)


# -- small bitset helpers ------------------------------------------------------


def bits(mask: int) -> Iterator[int]:
    """Indices of set bits, ascending."""
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def popcount(mask: int) -> int:
    return mask.bit_count()
