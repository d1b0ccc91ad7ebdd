"""Estimator API conformance: params, cloning, fitted state, predictions."""

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from camopursuit import MotionCamouflagePlanner, trace

from conftest import SMALL_GRID


def small_config():
    return {"rate": {"overall_strength": 5.0}, "grid": dict(SMALL_GRID)}


@pytest.fixture(scope="module")
def fitted():
    return MotionCamouflagePlanner(config=small_config()).fit()


def test_get_set_params_round_trip():
    est = MotionCamouflagePlanner(config=small_config())
    params = est.get_params()
    assert params["config"] == small_config()
    est.set_params(config=None)
    assert est.config is None


def test_clone_keeps_params_drops_state(fitted):
    fresh = clone(fitted)
    assert fresh.get_params() == fitted.get_params()
    assert not hasattr(fresh, "solution_")


def test_predict_requires_fit():
    est = MotionCamouflagePlanner(config=small_config())
    with pytest.raises(NotFittedError):
        est.predict([[1.5, 0.7]])


def test_fit_returns_self_and_exposes_solution(fitted):
    assert isinstance(fitted, MotionCamouflagePlanner)
    assert fitted.solution_.values.shape[0] == SMALL_GRID["time_cells"] + 1
    assert fitted.stationary_ is fitted.solution_.stationary
    assert fitted.n_features_in_ == 2


def test_predict_matches_trace(fitted):
    preds = fitted.predict([[1.5, 0.7], [1.5, 0.8]])
    for z0, got in zip([(1.5, 0.7), (1.5, 0.8)], preds):
        traj = trace(z0, fitted.solution_, fitted.config_)
        assert got == traj.amc_fraction


def test_predict_flags_failures_as_nan(fitted):
    preds = fitted.predict([[3.9, 0.1], [1.5, 0.7]])
    assert np.isnan(preds[0])
    assert np.isfinite(preds[1])


def test_predict_validates_shape(fitted):
    with pytest.raises(ValueError):
        fitted.predict([[1.0, 2.0, 3.0]])
    with pytest.raises(ValueError):
        fitted.predict(np.empty((0, 2)))
