"""rulejoin: learns definite logic programs with very large rules by joining
small non-splittable programs into conjunctions and unions via SAT."""

from .engine import CoverageTester, FactStore, coverage
from .estimator import RuleJoinClassifier
from .generate import Bias, BiasError, programs_of_size
from .learner import LearnOptions, LearnResult, RunStats, learn
from .logic import (
    Atom,
    Const,
    PredicateSymbol,
    Program,
    Rule,
    Var,
    make_program,
    program_cost,
)
from .taskio import (
    ParseError,
    TaskError,
    TaskSpec,
    evaluate,
    load_task,
    parse_program,
    print_program,
)
from .tasks import string_task, write_task, zendo_task

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "Bias",
    "BiasError",
    "Const",
    "CoverageTester",
    "FactStore",
    "LearnOptions",
    "LearnResult",
    "ParseError",
    "PredicateSymbol",
    "Program",
    "Rule",
    "RuleJoinClassifier",
    "RunStats",
    "TaskError",
    "TaskSpec",
    "Var",
    "coverage",
    "evaluate",
    "learn",
    "load_task",
    "make_program",
    "parse_program",
    "print_program",
    "program_cost",
    "programs_of_size",
    "string_task",
    "write_task",
    "zendo_task",
]
