"""The main loop: generate programs by increasing size, test them, grow
conjunctions from the joinable ones, and keep the cheapest verified union.

Deviations from a fully literal reading of the loop, chosen to keep the
optimality guarantee:

- A directly generated solution is folded into the combine pool instead of
  returned on the spot; the same iteration's combine either confirms it or
  finds a cheaper union of earlier units.
- After the size loop ends (bound reached or bias exhausted), a final
  join/combine fixpoint runs the complete conjunction enumeration up to the
  current bound; without it, a task whose generation exhausts early would
  never enumerate conjunctions at all.
"""

import time
from dataclasses import dataclass

from .combine import CombineUnit, combine
from .engine import CoverageTester
from .generate import Bias, ConstraintStore, ProgramEnumerator
from .join import JoinState, ProgramInfo, complete_join, filter_subsumed, incomplete_join
from .logic import Program, is_recursive, program_cost
from .sat import BudgetExceeded


@dataclass
class LearnOptions:
    max_solution_size: int = 100
    timeout: float | None = None
    disable_join: bool = False
    allow_splittable: bool = False
    enable_pruning: bool = True
    solver_budget: int | None = None
    seed: int | None = None
    on_event: object = None


@dataclass
class RunStats:
    wall_s: float = 0.0
    final_k: int = 0
    generated: int = 0
    tested: int = 0
    conjunctions_incomplete: int = 0
    conjunctions_complete: int = 0
    solution_cost: int | None = None
    reified_size: int | None = None
    optimal: bool = False
    seed: int | None = None


@dataclass
class LearnResult:
    program: Program | None
    cost: int | None
    optimal: bool
    stats: RunStats


def classify_tested(rec) -> str:
    if rec.fn == 0 and rec.fp == 0:
        return "solution"
    if rec.tp > 0 and rec.fp == 0:
        return "combinable"
    if rec.tp > 0:
        return "joinable"
    return "useless"


def _collect_avoid_names(task):
    names = {task.bias.head_pred.name}
    names.update(p.name for p in task.bias.body_preds)
    names.update(p.name for p in task.bk_facts.preds())
    for r in task.bk_rules:
        names.add(r.head.pred.name)
        names.update(b.pred.name for b in r.body)
    return names


class _Deadline:
    def __init__(self, timeout):
        self.at = time.monotonic() + timeout if timeout is not None else None

    def expired(self):
        return self.at is not None and time.monotonic() >= self.at


def learn(task, options: LearnOptions | None = None) -> LearnResult:
    """task needs: bias, bk_facts (FactStore), bk_rules, pos, neg."""
    options = options or LearnOptions()
    t0 = time.monotonic()
    deadline = _Deadline(options.timeout)
    stats = RunStats(seed=options.seed)
    emit = options.on_event or (lambda kind, **kw: None)

    bias = task.bias
    if options.allow_splittable and not bias.allow_splittable:
        bias = Bias(
            bias.head_pred,
            bias.body_preds,
            bias.max_vars,
            bias.max_body,
            bias.max_rules,
            bias.enable_recursion,
            dict(bias.constant_pool),
            allow_splittable=True,
        )
    target = bias.head_pred
    extra = sorted({c for pool in bias.constant_pool.values() for c in pool})
    tester = CoverageTester(task.bk_facts, task.bk_rules, task.pos, task.neg, extra_constants=extra)
    n_pos, n_neg = len(task.pos), len(task.neg)

    enum = ProgramEnumerator(bias)
    store = ConstraintStore()
    records = {}
    to_join = []
    units = {}  # origin -> CombineUnit, insertion-ordered
    join_state = JoinState()
    best = None
    maxsize = options.max_solution_size
    optimal = True
    max_expressible = bias.max_rule_size() * bias.max_rules

    def verify(prog):
        rec = tester.coverage(prog)
        return rec.fn == 0 and rec.fp == 0

    avoid = _collect_avoid_names(task)

    def add_unit(origin, cost, pos_bits, recursive):
        if origin in units:
            return False
        units[origin] = CombineUnit(origin, cost, pos_bits, recursive)
        return True

    def run_combine():
        nonlocal best, maxsize, optimal
        try:
            res = combine(
                units.values(), maxsize, n_pos, target, verify, avoid, options.solver_budget
            )
        except BudgetExceeded:
            optimal = False
            return
        if res is not None:
            best = res
            maxsize = res.cost - 1
            emit("solution", cost=res.cost, bound=maxsize)

    def absorb_conjunctions(conjs, counter):
        changed = False
        for c in filter_subsumed(conjs):
            if add_unit(c, c.cost, c.pos_bits, any(is_recursive(m) for m in c.members)):
                setattr(stats, counter, getattr(stats, counter) + 1)
                emit("conjunction", cost=c.cost)
                changed = True
        return changed

    k = 1
    while k < maxsize and not deadline.expired():
        k += 1
        if k > max_expressible:
            break  # bias exhausted; the fixpoint below finishes any joining
        stats.final_k = k
        emit("size", k=k)

        pool_changed = False
        for prog in enum.programs_of_size(k, store if options.enable_pruning else None):
            stats.generated += 1
            rec = tester.coverage(prog)
            stats.tested += 1
            verdict = classify_tested(rec)
            emit("tested", verdict=verdict)
            if verdict in ("solution", "combinable"):
                pool_changed |= add_unit(prog, program_cost(prog), rec.pos_bits, is_recursive(prog))
                if options.enable_pruning:
                    store.prune_specialisations(prog, "no_neg")
            elif verdict == "joinable":
                info = ProgramInfo(rec.pos_bits, rec.neg_bits, program_cost(prog))
                # a program dominated on coverage, exclusions, and cost can be
                # swapped out of any conjunction without loss; keep the pool
                # down to the useful representatives
                if not any(
                    records[q].cost <= info.cost
                    and info.pos_bits & ~records[q].pos_bits == 0
                    and records[q].neg_bits & ~info.neg_bits == 0
                    for q in to_join
                ):
                    records[prog] = info
                    to_join.append(prog)
            else:
                if options.enable_pruning:
                    store.prune_specialisations(prog, "no_pos")
            if deadline.expired():
                optimal = False
                break

        if not options.disable_join and to_join and not deadline.expired():
            if best is None:
                try:
                    found = incomplete_join(
                        to_join, records, n_pos, n_neg, options.solver_budget
                    )
                except BudgetExceeded:
                    found = []
                    optimal = False
                pool_changed |= absorb_conjunctions(found, "conjunctions_incomplete")
            else:
                found = complete_join(
                    to_join, records, n_pos, n_neg, min(k, maxsize), join_state,
                    options.solver_budget, deadline.expired,
                )
                if join_state.budget_hit:
                    optimal = False
                pool_changed |= absorb_conjunctions(found, "conjunctions_complete")

        if pool_changed and not deadline.expired():
            run_combine()

    if deadline.expired():
        optimal = False

    # final fixpoint: complete conjunction enumeration up to the bound, one
    # cost bound per round so the deadline is honored between stages
    if not options.disable_join and to_join:
        while join_state.done < maxsize and not join_state.dead:
            if deadline.expired():
                optimal = False
                break
            found = complete_join(
                to_join, records, n_pos, n_neg, join_state.done + 1, join_state,
                options.solver_budget, deadline.expired,
            )
            if join_state.budget_hit:
                optimal = False
                break
            if absorb_conjunctions(found, "conjunctions_complete"):
                run_combine()

    stats.wall_s = time.monotonic() - t0
    stats.optimal = optimal
    if best is not None:
        stats.solution_cost = best.cost
        stats.reified_size = best.reified_size
        return LearnResult(best.program, best.cost, optimal, stats)
    return LearnResult(None, None, optimal, stats)
