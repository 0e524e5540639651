"""Small deterministic SAT layer: CDCL solver, LSU MaxSAT, weighted counters.

Literals are nonzero ints in DIMACS convention (variable v, negation -v).
Decisions always pick the lowest-index unassigned variable and assign it
False, and there are no restarts, so runs are reproducible bit for bit.
"""

from dataclasses import dataclass, field


class BudgetExceeded(Exception):
    """Raised when a solve call burns through its conflict budget."""


@dataclass
class CNF:
    n_vars: int = 0
    clauses: list = field(default_factory=list)

    def new_var(self) -> int:
        self.n_vars += 1
        return self.n_vars

    def add_clause(self, lits):
        lits = tuple(lits)
        for l in lits:
            if abs(l) > self.n_vars:
                self.n_vars = abs(l)
        self.clauses.append(lits)

    def copy(self) -> "CNF":
        return CNF(self.n_vars, list(self.clauses))


class _Solver:
    def __init__(self, n_vars, conflict_budget=None):
        self.n = n_vars
        self.val = [0] * (n_vars + 1)  # 0 unassigned, 1 true, -1 false
        self.level = [0] * (n_vars + 1)
        self.reason = [None] * (n_vars + 1)
        self.trail = []
        self.trail_lim = []
        self.qhead = 0
        self.watches = {}  # lit -> clauses currently watching that lit
        self.ok = True
        self.budget = conflict_budget
        self.conflicts = 0

    def value(self, lit):
        v = self.val[abs(lit)]
        return v if lit > 0 else -v

    def _watch(self, lit, clause):
        self.watches.setdefault(lit, []).append(clause)

    def add_clause(self, lits):
        # called at level 0 only
        if not self.ok:
            return
        seen = set()
        out = []
        for l in lits:
            if -l in seen or self.value(l) == 1:
                return  # tautology or already satisfied
            if l in seen or self.value(l) == -1:
                continue
            seen.add(l)
            out.append(l)
        if not out:
            self.ok = False
        elif len(out) == 1:
            self._enqueue(out[0], None)
        else:
            self._watch(out[0], out)
            self._watch(out[1], out)

    def _enqueue(self, lit, reason):
        self.val[abs(lit)] = 1 if lit > 0 else -1
        self.level[abs(lit)] = len(self.trail_lim)
        self.reason[abs(lit)] = reason
        self.trail.append(lit)

    def _propagate(self):
        while self.qhead < len(self.trail):
            p = self.trail[self.qhead]
            self.qhead += 1
            ws = self.watches.pop(-p, [])
            keep = []
            for i, c in enumerate(ws):
                if c[0] == -p:
                    c[0], c[1] = c[1], c[0]
                if self.value(c[0]) == 1:
                    keep.append(c)
                    continue
                for k in range(2, len(c)):
                    if self.value(c[k]) != -1:
                        c[1], c[k] = c[k], c[1]
                        self._watch(c[1], c)
                        break
                else:
                    keep.append(c)
                    if self.value(c[0]) == -1:
                        keep.extend(ws[i + 1 :])
                        if keep:
                            self.watches[-p] = keep
                        self.qhead = len(self.trail)
                        return c
                    self._enqueue(c[0], c)
            if keep:
                self.watches[-p] = keep
        return None

    def _analyze(self, confl):
        learnt = []
        seen = [False] * (self.n + 1)
        counter = 0
        p = 0
        index = len(self.trail) - 1
        btlevel = 0
        cur_level = len(self.trail_lim)
        while True:
            for q in confl:
                if q == p:
                    continue
                v = abs(q)
                if not seen[v] and self.level[v] > 0:
                    seen[v] = True
                    if self.level[v] == cur_level:
                        counter += 1
                    else:
                        learnt.append(q)
                        btlevel = max(btlevel, self.level[v])
            while not seen[abs(self.trail[index])]:
                index -= 1
            p = self.trail[index]
            confl = self.reason[abs(p)] or ()
            seen[abs(p)] = False
            counter -= 1
            if counter == 0:
                break
            index -= 1
        learnt.insert(0, -p)
        return learnt, btlevel

    def _cancel_until(self, lvl):
        while len(self.trail_lim) > lvl:
            lim = self.trail_lim.pop()
            for lit in self.trail[lim:]:
                self.val[abs(lit)] = 0
                self.reason[abs(lit)] = None
            del self.trail[lim:]
        self.qhead = len(self.trail)

    def solve(self):
        if not self.ok:
            return None
        while True:
            confl = self._propagate()
            if confl is not None:
                self.conflicts += 1
                if self.budget is not None and self.conflicts > self.budget:
                    raise BudgetExceeded(f"conflict budget {self.budget} exceeded")
                if not self.trail_lim:
                    self.ok = False
                    return None
                learnt, bt = self._analyze(list(confl))
                self._cancel_until(bt)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    # watch the asserting literal and one from the backjump level
                    for k in range(2, len(learnt)):
                        if self.level[abs(learnt[k])] == bt:
                            learnt[1], learnt[k] = learnt[k], learnt[1]
                            break
                    self._watch(learnt[0], learnt)
                    self._watch(learnt[1], learnt)
                    self._enqueue(learnt[0], learnt)
                continue
            var = 0
            for v in range(1, self.n + 1):
                if self.val[v] == 0:
                    var = v
                    break
            if var == 0:
                return {v: self.val[v] == 1 for v in range(1, self.n + 1)}
            self.trail_lim.append(len(self.trail))
            self._enqueue(-var, None)


def solve(cnf: CNF, assumptions=(), conflict_budget=None):
    """Model as {var: bool}, or None if unsatisfiable.

    Assumptions are plain literals added as if they were unit clauses; the
    solver is rebuilt per call, which is cheap at the sizes used here.
    """
    s = _Solver(cnf.n_vars, conflict_budget)
    for c in cnf.clauses:
        s.add_clause(c)
        if not s.ok:
            return None
    for a in assumptions:
        if s.value(a) == -1:
            return None
        if s.value(a) == 0:
            s._enqueue(a, None)
    if s._propagate() is not None:
        return None
    return s.solve()


def count_falsified(model, soft_lits):
    n = 0
    for l in soft_lits:
        sat = model[abs(l)] if l > 0 else not model[abs(l)]
        if not sat:
            n += 1
    return n


def maxsat(cnf: CNF, soft_lits, conflict_budget=None):
    """Minimise the number of falsified soft literals, exactly.

    Linear search from above: solve, then repeatedly forbid the current cost
    via a counter over the falsification indicators until unsatisfiable.
    Returns (model, cost) or None when the hard clauses are unsatisfiable.
    """
    work = cnf.copy()
    model = solve(work, conflict_budget=conflict_budget)
    if model is None:
        return None
    cost = count_falsified(model, soft_lits)
    if cost == 0 or not soft_lits:
        return model, cost
    outs = counter_geq_outputs(work, [(-l, 1) for l in soft_lits], cost)
    best = model
    while cost > 0:
        work.add_clause([-outs[cost - 1]])
        model = solve(work, conflict_budget=conflict_budget)
        if model is None:
            break
        c = count_falsified(model, soft_lits)
        assert c < cost
        best, cost = model, c
    return best, cost


def counter_geq_outputs(cnf: CNF, weighted_lits, max_bound):
    """Sequential weighted counter clamped at max_bound.

    Returns outs where outs[j-1] is forced true whenever the weighted sum of
    true input literals reaches j (implication in that direction only, which
    is all the upper-bound uses here need).
    """
    prev = [None] * max_bound
    for x, w in weighted_lits:
        cur = [cnf.new_var() for _ in range(max_bound)]
        for j in range(1, max_bound + 1):
            if prev[j - 1] is not None:
                cnf.add_clause([-prev[j - 1], cur[j - 1]])
            if j <= w:
                cnf.add_clause([-x, cur[j - 1]])
            elif prev[j - w - 1] is not None:
                cnf.add_clause([-x, -prev[j - w - 1], cur[j - 1]])
        prev = cur
    return prev


def pb_leq(cnf: CNF, weighted_lits, bound):
    """Constrain the weighted sum of true literals to be at most bound."""
    if bound < 0:
        cnf.add_clause([])
        return
    total = sum(w for _, w in weighted_lits)
    if bound >= total:
        return
    outs = counter_geq_outputs(cnf, weighted_lits, bound + 1)
    cnf.add_clause([-outs[bound]])


def to_dimacs(cnf: CNF) -> str:
    lines = [f"p cnf {cnf.n_vars} {len(cnf.clauses)}"]
    for c in cnf.clauses:
        lines.append(" ".join(str(l) for l in c) + " 0")
    return "\n".join(lines) + "\n"
