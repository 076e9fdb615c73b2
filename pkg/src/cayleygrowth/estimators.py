"""Estimator-style wrappers (``fit``/``predict``/``get_params``) over the engines and fitters."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from scipy import stats
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import (check_choice, check_growth_vector, check_int, check_n_column,
                          check_optional_int)
from .analysis import describe, gaussian_fit, quasipoly_fit
from .bfs import DEFAULT_ANTIPODES, _key_function, enumerate_states, growth
from .graph import GraphDef


class GrowthEstimator(BaseEstimator):
    """Runs BFS on ``fit``; ``predict`` returns start distances of given states.

    ``predict`` builds a distance table on first use, so it is only available
    when the reachable set fits under ``node_cap``.
    """

    def __init__(self, engine: str = "auto", max_depth: int | None = None,
                 memory_budget: int | None = None, n_antipodes: int = DEFAULT_ANTIPODES,
                 n_jobs: int = 1, node_cap: int = 5_000_000):
        self.engine = engine
        self.max_depth = max_depth
        self.memory_budget = memory_budget
        self.n_antipodes = n_antipodes
        self.n_jobs = n_jobs
        self.node_cap = node_cap

    def fit(self, graph: GraphDef, y=None):
        if not isinstance(graph, GraphDef):
            raise TypeError("fit expects a GraphDef")
        check_choice(self.engine, "engine", {"auto", "hash", "bitmask"})
        check_optional_int(self.max_depth, "max_depth", 0)
        check_int(self.n_jobs, "n_jobs", 1)
        kwargs = dict(max_depth=self.max_depth, memory_budget=self.memory_budget,
                      n_antipodes=self.n_antipodes)
        if self.engine != "hash":
            kwargs["n_jobs"] = self.n_jobs
        self.graph_ = graph
        self.growth_ = growth(graph, self.engine, **kwargs)
        self.layer_sizes_ = np.asarray(self.growth_.layer_sizes, dtype=np.int64)
        self.diameter_ = self.growth_.diameter
        self.summary_ = None if self.growth_.truncated else describe(self.growth_)
        self._table = None
        return self

    def predict(self, states) -> np.ndarray:
        check_is_fitted(self, "growth_")
        states = np.atleast_2d(np.asarray(states, dtype=self.graph_.space.dtype))
        if self._table is None:
            found, dist = enumerate_states(self.graph_, self.node_cap)
            keys_of = _key_function(self.graph_.space, self.graph_.space.dim)
            keys = keys_of(found)
            order = np.argsort(keys, kind="stable")
            self._table = (keys_of, keys[order], dist[order])
        keys_of, keys, dist = self._table
        q = keys_of(states)
        pos = np.minimum(np.searchsorted(keys, q), len(keys) - 1)
        return np.where(keys[pos] == q, dist[pos], -1)


class QuasiPolynomialRegressor(RegressorMixin, BaseEstimator):
    """Exact quasi-polynomial fit of ``y`` against integer ``n``.

    ``fit`` succeeds even when no quasi-polynomial qualifies; ``found_`` is
    then False and ``predict`` raises.
    """

    def __init__(self, s_max: int = 6, deg_max: int = 2, min_verify: int = 1, residues=None):
        self.s_max = s_max
        self.deg_max = deg_max
        self.min_verify = min_verify
        self.residues = residues

    def fit(self, X, y):
        ns = check_n_column(X)
        y = np.asarray(y).ravel()
        if len(y) != len(ns):
            raise ValueError(f"X has {len(ns)} rows but y has {len(y)} values")
        check_int(self.s_max, "s_max", 1)
        check_int(self.deg_max, "deg_max", 0)
        check_int(self.min_verify, "min_verify", 0)
        values = [Fraction(int(v)) if float(v).is_integer() else Fraction(str(v)) for v in y]
        self.qp_ = quasipoly_fit(zip(ns.tolist(), values), self.s_max, self.deg_max,
                                 self.min_verify, self.residues)
        self.found_ = self.qp_ is not None
        self.n_features_in_ = 1
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "found_")
        if not self.found_:
            raise ValueError("no quasi-polynomial fitted the training data")
        return np.array([float(self.qp_(int(n))) for n in check_n_column(X)])


class GaussianGrowthFit(BaseEstimator):
    """Moment-matched normal over layer indices; ``predict`` gives expected layer sizes."""

    def fit(self, growth_vector, y=None):
        sizes = check_growth_vector(growth_vector)
        fit = gaussian_fit(sizes)
        self.loc_, self.scale_, self.max_abs_error_ = fit.loc, fit.scale, fit.max_abs_error
        self.total_ = int(sizes.sum())
        return self

    def predict(self, layers) -> np.ndarray:
        check_is_fitted(self, "loc_")
        k = np.asarray(layers, dtype=np.float64)
        dist = stats.norm(self.loc_, self.scale_)
        return self.total_ * (dist.cdf(k + 0.5) - dist.cdf(k - 0.5))
