"""A scikit-learn flavored facade over the learner.

Rows of X are argument tuples for the bias head predicate (bare strings act
as 1-tuples); background facts and rules are estimator parameters, since
they describe the world rather than the examples.
"""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .engine import CoverageTester, FactStore
from .learner import LearnOptions, learn
from .taskio import TaskSpec


class RuleJoinClassifier(ClassifierMixin, BaseEstimator):
    def __init__(
        self,
        bias=None,
        bk_facts=None,
        bk_rules=(),
        max_solution_size=100,
        timeout=None,
        disable_join=False,
        allow_splittable=False,
        enable_pruning=True,
        solver_budget=None,
        seed=None,
    ):
        self.bias = bias
        self.bk_facts = bk_facts
        self.bk_rules = bk_rules
        self.max_solution_size = max_solution_size
        self.timeout = timeout
        self.disable_join = disable_join
        self.allow_splittable = allow_splittable
        self.enable_pruning = enable_pruning
        self.solver_budget = solver_budget
        self.seed = seed

    def _examples(self, X):
        target = self.bias.head_pred
        out = []
        for row in X:
            args = (row,) if isinstance(row, str) else tuple(row)
            if len(args) != target.arity:
                raise ValueError(
                    f"example {args!r} does not fit {target.name}/{target.arity}"
                )
            if not all(isinstance(a, str) for a in args):
                raise ValueError(f"example arguments must be strings: {args!r}")
            out.append((target, args))
        return out

    def fit(self, X, y):
        if self.bias is None:
            raise ValueError("RuleJoinClassifier requires a bias declaration")
        atoms = self._examples(X)
        y = np.asarray(y)
        if len(atoms) != len(y):
            raise ValueError(f"{len(atoms)} examples but {len(y)} labels")
        self.classes_ = np.unique(y)
        if len(self.classes_) > 2:
            raise ValueError("binary labels expected")
        positive = self.classes_[-1]
        pos = [a for a, label in zip(atoms, y) if label == positive]
        neg = [a for a, label in zip(atoms, y) if label != positive]
        task = TaskSpec(
            self.bias,
            self.bk_facts if self.bk_facts is not None else FactStore(),
            tuple(self.bk_rules),
            pos,
            neg,
        )
        result = learn(
            task,
            LearnOptions(
                max_solution_size=self.max_solution_size,
                timeout=self.timeout,
                disable_join=self.disable_join,
                allow_splittable=self.allow_splittable,
                enable_pruning=self.enable_pruning,
                solver_budget=self.solver_budget,
                seed=self.seed,
            ),
        )
        self.program_ = result.program
        self.cost_ = result.cost
        self.optimal_ = result.optimal
        self.stats_ = result.stats
        return self

    def predict(self, X):
        check_is_fitted(self, "program_")
        atoms = self._examples(X)
        negative, positive = self.classes_[0], self.classes_[-1]
        if self.program_ is None or not atoms:
            return np.full(len(atoms), negative)
        tester = CoverageTester(
            self.bk_facts if self.bk_facts is not None else FactStore(),
            tuple(self.bk_rules),
            atoms,
            [],
        )
        covered = tester.coverage(self.program_).pos_bits
        return np.array(
            [positive if covered >> i & 1 else negative for i in range(len(atoms))]
        )
