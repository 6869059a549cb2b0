"""Scikit-learn style solver objects.

Each solver is a ``BaseEstimator``: hyper-parameters live in ``__init__``,
``fit`` solves one instance and stores the results in trailing-underscore
attributes, and ``get_params``/``set_params``/``clone`` work as usual.
Inputs may be an :class:`~ucddp.instance_io.Instance` or an ``(n, 3)``
integer array of ``(p, alpha, beta)`` rows.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils import check_array
from sklearn.utils.validation import check_is_fitted

from .exact import brute_force, branch_and_bound
from .heuristics import half_round_start, local_search, multistart
from .instance_io import Instance, InstanceError
from .partition import build_canonical_schedule, evaluate_partition


def check_instance(X, d: int | None = None) -> Instance:
    """Validate ``X`` and return an :class:`Instance`.

    ``d`` overrides the due date (default ``sum(p)`` for array input).
    """
    if isinstance(X, Instance):
        return X if d is None else X.with_due_date(d)
    arr = check_array(X, dtype=None, ensure_2d=True)
    if arr.shape[1] != 3:
        raise ValueError(f"expected 3 columns (p, alpha, beta), got {arr.shape[1]}")
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.mod(arr, 1) == 0):
            raise ValueError("instance data must be integral")
        arr = arr.astype(np.int64)
    try:
        return Instance.from_rows(arr.tolist(), d)
    except InstanceError as exc:
        raise ValueError(str(exc)) from exc


class _SchedulerMixin:
    def _store(self, inst: Instance, delta) -> None:
        self.instance_ = inst
        self.delta_ = tuple(int(x) for x in delta)
        self.penalty_ = evaluate_partition(inst, self.delta_)
        self.schedule_ = build_canonical_schedule(inst, self.delta_)
        self.n_tasks_ = inst.n

    def fit_predict(self, X, y=None):
        return np.asarray(self.fit(X).delta_)

    def predict(self, X=None):
        """Early indicators of the fitted solution (``X`` must match the fitted instance)."""
        check_is_fitted(self, "delta_")
        if X is not None and check_instance(X, self.instance_.d) != self.instance_:
            raise ValueError("predict only serves the instance passed to fit")
        return np.asarray(self.delta_)

    def score(self, X, y=None) -> float:
        """Negated penalty of the fitted solution evaluated on ``X``."""
        check_is_fitted(self, "delta_")
        inst = check_instance(X)
        if inst.n != self.n_tasks_:
            raise ValueError("task count differs from the fitted instance")
        return -float(evaluate_partition(inst, self.delta_))


class BruteForceScheduler(_SchedulerMixin, BaseEstimator):
    def __init__(self, max_n: int = 24):
        self.max_n = max_n

    def fit(self, X, y=None):
        inst = check_instance(X)
        delta, _ = brute_force(inst, self.max_n)
        self._store(inst, delta)
        return self


class LocalSearchScheduler(_SchedulerMixin, BaseEstimator):
    """Insert/swap local search from a chosen start.

    ``start`` is ``"multistart"`` (all-early plus ``restarts`` random
    vectors), ``"half-round"`` or ``"all-early"``.
    """

    def __init__(self, start: str = "multistart", restarts: int = 0, seed: int = 0):
        self.start = start
        self.restarts = restarts
        self.seed = seed

    def fit(self, X, y=None):
        inst = check_instance(X)
        if self.start == "multistart":
            res = multistart(inst, self.restarts, self.seed)
        elif self.start == "half-round":
            res = local_search(inst, half_round_start(inst), start_label="half-round")
        elif self.start == "all-early":
            res = local_search(inst, (1,) * inst.n, start_label="all-early")
        else:
            raise ValueError(f"unknown start {self.start!r}")
        self.result_ = res
        self._store(inst, res.delta)
        return self


class BranchAndBoundScheduler(_SchedulerMixin, BaseEstimator):
    def __init__(self, time_limit: float | None = None, gap_limit: float = 0.0,
                 restarts: int = 4, seed: int = 0):
        self.time_limit = time_limit
        self.gap_limit = gap_limit
        self.restarts = restarts
        self.seed = seed

    def fit(self, X, y=None):
        inst = check_instance(X)
        delta, _, stats = branch_and_bound(inst, self.time_limit, self.gap_limit, self.restarts, self.seed)
        self.stats_ = stats
        self._store(inst, delta)
        return self
