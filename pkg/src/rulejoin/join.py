"""Conjunction building.

A conjunction is a set of programs read as one classifier: an example is
accepted only if every member entails it. Its positive coverage is the AND
of member coverages and its cost the sum of member costs.

While no solution is known we greedily pick conjunctions that cover the most
still-uncovered positives (MaxSAT). Once a solution exists we enumerate, for
each cost bound in increasing order, every subset-maximal-coverage
conjunction within the bound, emitting a cheapest representative per
coverage and blocking coverage subsets afterwards. Bounds advance in steps
of one and each is run to exhaustion; members of a cost-s conjunction cost
at most s-2, so a conjunction is always enumerated no later than any
conjunction that could block it, which is what makes the blocking sound.
"""

from dataclasses import dataclass, field

from .logic import bits, popcount, program_key
from .sat import CNF, BudgetExceeded, counter_geq_outputs, maxsat, solve


@dataclass(frozen=True)
class ProgramInfo:
    """What the join stage needs to know about a tested program."""

    pos_bits: int
    neg_bits: int
    cost: int


@dataclass(frozen=True)
class Conjunction:
    members: tuple  # Programs, key-sorted
    pos_bits: int
    cost: int

    def __repr__(self):
        inner = " AND ".join("{" + "; ".join(map(str, m.rules)) + "}" for m in self.members)
        return f"<conjunction cost={self.cost} {inner}>"


def make_conjunction(members, records):
    members = tuple(sorted(set(members), key=program_key))
    cov = -1
    cost = 0
    for m in members:
        rec = records[m]
        cov &= rec.pos_bits
        cost += rec.cost
    return Conjunction(members, cov, cost)


class JoinEncoding:
    """p-var per program, c-var per positive example.

    F+ (per positive e): c_e -> not p_h, for every h that does not entail e.
    F- (per negative e): at least one selected program does not entail e.
    A model therefore decodes to a subset entailing no negative, claiming
    only examples every selected member entails.
    """

    def __init__(self, pool, records, n_pos, n_neg, found=(), max_bound=None):
        self.pool = list(pool)
        self.records = records
        self.n_pos = n_pos
        self.cnf = CNF()
        self.p_vars = [self.cnf.new_var() for _ in self.pool]
        self.c_vars = [self.cnf.new_var() for _ in range(n_pos)]
        self.dead = not self.pool
        self.f_pos_groups = []
        self.f_neg_clauses = []
        for e in range(n_pos):
            group = []
            for pv, prog in zip(self.p_vars, self.pool):
                if not records[prog].pos_bits >> e & 1:
                    clause = (-self.c_vars[e], -pv)
                    group.append(clause)
                    self.cnf.add_clause(clause)
            self.f_pos_groups.append(group)
        for e in range(n_neg):
            clause = tuple(
                pv
                for pv, prog in zip(self.p_vars, self.pool)
                if not records[prog].neg_bits >> e & 1
            )
            self.f_neg_clauses.append(clause)
            if clause:
                self.cnf.add_clause(clause)
            else:
                self.dead = True  # some negative entailed by every program
        if self.pool:
            self.cnf.add_clause(self.p_vars)  # conjunctions are non-empty
        self.sizes = [records[prog].cost for prog in self.pool]
        self.total_cost = sum(self.sizes)
        if max_bound is None:
            self.size_outs = []  # greedy stage never bounds cost
        else:
            self.size_outs = counter_geq_outputs(
                self.cnf,
                list(zip(self.p_vars, self.sizes)),
                min(self.total_cost, max_bound + 1),
            )
        for conj in found:
            self.block(conj)

    def block(self, conj):
        """Future models must claim some positive the conjunction misses."""
        clause = [self.c_vars[e] for e in range(self.n_pos) if not conj.pos_bits >> e & 1]
        if clause:
            self.cnf.add_clause(clause)
        else:
            self.dead = True

    def cost_cap(self, bound):
        """Assumption literals forcing total selected cost <= bound."""
        if bound < self.total_cost:
            return [-self.size_outs[bound]]
        return []

    def decode(self, model):
        return [prog for pv, prog in zip(self.p_vars, self.pool) if model[pv]]

    def coverage_of(self, progs):
        cov = (1 << self.n_pos) - 1
        for m in progs:
            cov &= self.records[m].pos_bits
        return cov

    def claim_units(self, cov):
        return [self.c_vars[e] for e in bits(cov)]


def build_join_encoding(pool, records, n_pos, n_neg, found=(), max_bound=None):
    return JoinEncoding(pool, records, n_pos, n_neg, found, max_bound)


def incomplete_join(pool, records, n_pos, n_neg, budget=None):
    """Greedy cover: each round, MaxSAT maximises claimed still-uncovered
    positives; stops when nothing new can be covered."""
    enc = build_join_encoding(pool, records, n_pos, n_neg)
    if enc.dead:
        return []
    out = []
    uncovered = (1 << n_pos) - 1
    while uncovered:
        soft = [enc.c_vars[e] for e in bits(uncovered)]
        res = maxsat(enc.cnf, soft, conflict_budget=budget)
        if res is None:
            break
        model, miss = res
        if miss == len(soft):
            break  # optimum covers nothing new
        conj = make_conjunction(enc.decode(model), records)
        if conj.pos_bits & uncovered == 0:
            break
        out.append(conj)
        uncovered &= ~conj.pos_bits
    return out


@dataclass
class JoinState:
    """Resume point for the complete stage: conjunctions found so far (they
    stay blocked forever) and the last cost bound run to exhaustion."""

    found: list = field(default_factory=list)
    done: int = 1
    dead: bool = False
    budget_hit: bool = False


def _climb(enc, cap, model, budget):
    """Grow claimed coverage until subset-maximal; returns the final
    coverage (possibly 0 when nothing at this bound covers a positive)."""
    cov = enc.coverage_of(enc.decode(model))
    while True:
        demand = [enc.c_vars[e] for e in range(enc.n_pos) if not cov >> e & 1]
        if not demand:
            return cov
        trial = enc.cnf.copy()
        trial.add_clause(demand)
        model = solve(trial, assumptions=cap + enc.claim_units(cov), conflict_budget=budget)
        if model is None:
            return cov
        cov = enc.coverage_of(enc.decode(model))


def _selection_cost(enc, model):
    return sum(s for pv, s in zip(enc.p_vars, enc.sizes) if model[pv])


def _representative(enc, bound, cov, budget):
    """Cheapest, then lexicographically least, selection claiming cov."""
    units = enc.claim_units(cov)
    m = solve(enc.cnf, assumptions=units + enc.cost_cap(bound), conflict_budget=budget)
    cost = _selection_cost(enc, m)
    while cost > 2:
        m = solve(enc.cnf, assumptions=units + enc.cost_cap(cost - 1), conflict_budget=budget)
        if m is None:
            break
        cost = _selection_cost(enc, m)
    fixed = []
    base = units + enc.cost_cap(cost)
    for pv in enc.p_vars:
        m = solve(enc.cnf, assumptions=base + fixed + [-pv], conflict_budget=budget)
        fixed.append(-pv if m is not None else pv)
    members = [prog for pv, prog in zip(enc.p_vars, enc.pool) if pv in fixed]
    return members, cost


def complete_join(pool, records, n_pos, n_neg, k, state, budget=None, stop=None):
    """Enumerate subset-maximal-coverage conjunctions of cost <= k, resuming
    from state; newly found conjunctions are returned and added to it."""
    if state.dead:
        return []
    enc = build_join_encoding(pool, records, n_pos, n_neg, state.found, max_bound=k)
    if enc.dead:
        state.dead = True
        return []
    state.budget_hit = False
    new = []
    try:
        for bound in range(state.done + 1, k + 1):
            cap = enc.cost_cap(bound)
            while True:
                if stop is not None and stop():
                    raise BudgetExceeded("deadline reached")
                model = solve(enc.cnf, assumptions=cap, conflict_budget=budget)
                if model is None:
                    break
                cov = _climb(enc, cap, model, budget)
                if cov == 0:
                    break  # nothing within this bound covers a positive
                members, cost = _representative(enc, bound, cov, budget)
                conj = make_conjunction(members, records)
                assert conj.pos_bits == cov and conj.cost == cost
                new.append(conj)
                state.found.append(conj)
                enc.block(conj)
                if enc.dead:
                    break
            if enc.dead:
                state.dead = True
                break
            state.done = bound
    except BudgetExceeded:
        state.budget_hit = True
    return new


def join(pool, records, bestsol, n_pos, n_neg, k, state, budget=None, stop=None):
    """Algorithm dispatch: greedy while no solution is known, complete
    enumeration under the size bound afterwards."""
    if not pool:
        return []
    if bestsol is None:
        return incomplete_join(pool, records, n_pos, n_neg, budget)
    return complete_join(pool, records, n_pos, n_neg, k, state, budget, stop)


def filter_subsumed(conjs):
    """Drop any conjunction whose coverage fits inside a strictly cheaper
    one; such a conjunction cannot be part of an optimal union."""
    conjs = list(conjs)
    out = []
    for c in conjs:
        dominated = any(
            other.cost < c.cost and c.pos_bits & ~other.pos_bits == 0 for other in conjs
        )
        if not dominated:
            out.append(c)
    return out
