from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .diagram import CausalDiagram, ordering_delta
from .exceptions import NotIdentified
from .ident import COEFFICIENT_UNAVAILABLE, DEFAULT_BUDGET, analyze
from .recover import COND_CAP, recover_parameters
from .wright import CorrelationMatrix, VariableMatrix, correlation_from_params


class PathIdentifier(BaseEstimator):
    """Recover standardized structural parameters from a correlation matrix.

    ``fit`` analyzes the diagram and, when it is identified, solves the
    per-variable systems against ``X``, a square correlation matrix whose rows
    and columns follow ``diagram.variables``.

    Attributes set by ``fit``: ``verdict_``, ``recovery_``, ``coef_`` (param
    name to value) and ``n_features_in_``.
    """

    def __init__(self, diagram: CausalDiagram | None = None, budget=DEFAULT_BUDGET, delta_seed=None, cond_cap=COND_CAP):
        self.diagram = diagram
        self.budget = budget
        self.delta_seed = delta_seed
        self.cond_cap = cond_cap

    def _validate(self, X) -> CorrelationMatrix:
        if self.diagram is None:
            raise ValueError("PathIdentifier needs a diagram")
        if isinstance(X, VariableMatrix):
            return CorrelationMatrix(X.variables, X.values).reordered(self.diagram.variables)
        X = check_array(X, ensure_min_samples=1, ensure_min_features=1, ensure_all_finite=True)
        n = len(self.diagram.variables)
        if X.shape != (n, n):
            raise ValueError(f"expected a {n}x{n} correlation matrix, got {X.shape}")
        return CorrelationMatrix(self.diagram.variables, X)

    def fit(self, X, y=None):
        rho = self._validate(X)
        order = ordering_delta(self.diagram, seed=self.delta_seed)
        self.verdict_ = analyze(self.diagram, order, budget=self.budget)
        self.n_features_in_ = len(self.diagram.variables)
        if not self.verdict_.identified:
            raise NotIdentified(self.verdict_.headline())
        self.recovery_ = recover_parameters(self.diagram, rho, self.verdict_, self.cond_cap)
        if self.recovery_.status == COEFFICIENT_UNAVAILABLE:
            self.verdict_ = self.verdict_.downgraded(COEFFICIENT_UNAVAILABLE, self.recovery_.message)
        if not self.recovery_.ok:
            raise NotIdentified(f"recovery failed at {self.recovery_.failed_at}: {self.recovery_.message}")
        self.coef_ = dict(self.recovery_.recovered)
        return self

    def implied_correlation(self) -> CorrelationMatrix:
        check_is_fitted(self, "coef_")
        return correlation_from_params(self.diagram, self.coef_).reordered(self.diagram.variables)

    def score(self, X, y=None) -> float:
        """Negative largest absolute residual between ``X`` and the fitted correlations."""
        check_is_fitted(self, "coef_")
        rho = self._validate(X)
        return -float(np.max(np.abs(rho.values - self.implied_correlation().values)))
