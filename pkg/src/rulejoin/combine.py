"""Union selection: pick a cheapest set of promising units (programs and
reified conjunctions) that together cover every positive example.

Coverage clauses make the selection syntactically sound, but rules of
different recursive units share the target predicate inside a union and can
derive strictly more than either unit alone. Every candidate selection is
therefore re-evaluated semantically before acceptance; a selection that
entails a negative is blocked together with its supersets (adding rules
never removes derivations) and the search re-solves.

A conjunction unit costs the sum of its member costs. The linking overhead
of its reified program is not optimized over; build_union_program reports
the literal count of the final program separately.
"""

from dataclasses import dataclass

from .join import Conjunction
from .logic import Atom, Program, PredicateSymbol, Rule, Var, make_program, program_cost
from .sat import CNF, counter_geq_outputs, solve


@dataclass(frozen=True)
class CombineUnit:
    origin: object  # Program or Conjunction
    cost: int
    pos_bits: int
    recursive: bool


def _rename(atom, mapping):
    return Atom(mapping.get(atom.pred, atom.pred), atom.args)


def _aux_names(target, count, start, avoid):
    names, i = [], start
    while len(names) < count:
        name = f"{target.name}_{i}"
        if name not in avoid:
            names.append(name)
        i += 1
    return names, i


def _reify(conj: Conjunction, avoid, start):
    target = conj.members[0].target
    names, nxt = _aux_names(target, len(conj.members), start, avoid)
    rules = []
    link_body = []
    head_args = tuple(Var(i) for i in range(target.arity))
    for member, name in zip(conj.members, names):
        aux = PredicateSymbol(name, target.arity)
        mapping = {target: aux}
        for r in member.rules:
            rules.append(Rule(_rename(r.head, mapping), tuple(_rename(b, mapping) for b in r.body)))
        link_body.append(Atom(aux, head_args))
    rules.append(Rule(Atom(target, head_args), tuple(link_body)))
    return rules, nxt


def reify_conjunction(conj: Conjunction, avoid=()) -> Program:
    """Rename each member's target to a fresh predicate (recursion included)
    and add a linking rule; the model on the target is the intersection of
    the member models."""
    rules, _ = _reify(conj, set(avoid), 1)
    return make_program(rules, conj.members[0].target)


def build_union_program(origins, target, avoid=()):
    """Union of program units and reified conjunction units; returns the
    program and its literal count."""
    avoid = set(avoid)
    rules = []
    nxt = 1
    for origin in origins:
        if isinstance(origin, Conjunction):
            new_rules, nxt = _reify(origin, avoid, nxt)
            rules.extend(new_rules)
        else:
            rules.extend(origin.rules)
    prog = make_program(rules, target)
    return prog, program_cost(prog)


@dataclass
class CombineResult:
    selection: tuple  # CombineUnits
    cost: int
    program: Program
    reified_size: int


def combine(units, maxsize, n_pos, target, verify, avoid=(), budget=None):
    """Minimum-cost covering selection of cost <= maxsize passing semantic
    verification, or None.

    verify receives the built union program and must return True when it
    entails every positive and no negative example.
    """
    units = list(units)
    if n_pos == 0 or not units:
        return None
    cnf = CNF()
    s_vars = [cnf.new_var() for _ in units]
    for e in range(n_pos):
        clause = [sv for sv, u in zip(s_vars, units) if u.pos_bits >> e & 1]
        if not clause:
            return None  # some positive is covered by no unit
        cnf.add_clause(clause)
    total = sum(u.cost for u in units)
    outs = counter_geq_outputs(cnf, [(sv, u.cost) for sv, u in zip(s_vars, units)], total)
    best = None
    bound = maxsize
    while True:
        cap = [-outs[bound]] if bound < total else []
        model = solve(cnf, assumptions=cap, conflict_budget=budget)
        if model is None:
            return best
        chosen = [(sv, u) for sv, u in zip(s_vars, units) if model[sv]]
        cost = sum(u.cost for _, u in chosen)
        program, reified = build_union_program([u.origin for _, u in chosen], target, avoid)
        if verify(program):
            best = CombineResult(tuple(u for _, u in chosen), cost, program, reified)
            bound = cost - 1
            if bound < 0:
                return best
        else:
            cnf.add_clause([-sv for sv, _ in chosen])
