import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from semid.estimator import PathIdentifier
from semid.exceptions import NotIdentified
from semid.wright import CorrelationMatrix, correlation_from_params

SMOKE_RHO = [[1, 0.5, 0.4], [0.5, 1, 0.5], [0.4, 0.5, 1]]


def test_fit_smoke(smoke):
    est = PathIdentifier(smoke).fit(np.array(SMOKE_RHO))
    assert est.n_features_in_ == 3
    assert est.coef_ == pytest.approx({"a": 0.5, "b": 0.4, "γ": 0.2}, abs=1e-12)
    assert est.score(np.array(SMOKE_RHO)) == pytest.approx(0.0, abs=1e-12)
    assert est.verdict_.identified


def test_fit_accepts_named_matrix_in_any_order(iv):
    rho = correlation_from_params(iv, {"c": 0.5, "λ1": 0.4, "λ2": 0.2}).reordered(["Y", "U", "W"])
    est = PathIdentifier(iv).fit(rho)
    assert est.coef_ == pytest.approx({"c": 0.5, "λ1": 0.4, "λ2": 0.2}, abs=1e-12)


def test_params_and_clone(coll):
    est = PathIdentifier(coll, budget=50, delta_seed=3)
    assert est.get_params() == {"diagram": coll, "budget": 50, "delta_seed": 3, "cond_cap": 1e8}
    twin = clone(est)
    assert twin.get_params()["budget"] == 50 and not hasattr(twin, "coef_")


def test_errors(smoke, bow):
    with pytest.raises(NotFittedError):
        PathIdentifier(smoke).implied_correlation()
    with pytest.raises(ValueError):
        PathIdentifier(smoke).fit(np.eye(2))
    with pytest.raises(ValueError):
        PathIdentifier().fit(np.eye(2))
    with pytest.raises(NotIdentified):
        PathIdentifier(bow).fit(np.eye(2))
    singular = CorrelationMatrix(["X", "Z", "Y"], [[1, 1, 0.4], [1, 1, 0.4], [0.4, 0.4, 1]])
    with pytest.raises(NotIdentified):
        PathIdentifier(smoke).fit(singular)
