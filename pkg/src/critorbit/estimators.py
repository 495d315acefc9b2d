"""scikit-learn style wrappers for per-parameter computations.

Only the pointwise maps fit the fit/transform shape: an escape-rate feature
and a preperiodicity classifier over arrays of complex parameters.  Rasters,
root sets and symmetry searches keep their functional interfaces.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin

from .escape_green import SCALAR_CAP, escape_rates
from .poly_core import Family, load_fixture
from .preperiodic import PREPERIODIC_TOL, is_preperiodic_at


def _family(fam):
    return load_fixture(fam) if isinstance(fam, str) else fam


def _params(X) -> np.ndarray:
    X = np.asarray(X)
    if X.ndim == 2 and X.shape[1] == 2 and not np.iscomplexobj(X):
        return X[:, 0] + 1j * X[:, 1]
    return X.astype(np.complex128).ravel()


class EscapeRateTransformer(TransformerMixin, BaseEstimator):
    """Maps parameters t (complex, or (re, im) rows) to G_t(a_i(t)) for each marked point."""

    def __init__(self, family: Family | str = "quad.json", cap: int = SCALAR_CAP):
        self.family = family
        self.cap = cap

    def fit(self, X=None, y=None):
        self.family_ = _family(self.family)
        self.n_features_out_ = len(self.family_.marked)
        return self

    def transform(self, X):
        t = _params(X)
        return np.column_stack([escape_rates(self.family_, a, t, self.cap)
                                for a in self.family_.marked])


class PreperiodicVerdict(ClassifierMixin, BaseEstimator):
    """Labels each parameter by the numerical verdict of one marked orbit.

    Labels are ``preperiodic``, ``escaping`` or ``undecided``; ``score`` gives
    agreement with reference labels.
    """

    def __init__(self, family: Family | str = "quad.json", marked_index: int = 0,
                 tol: float = PREPERIODIC_TOL, orbit_cap: int = 200, period_cap: int = 12):
        self.family = family
        self.marked_index = marked_index
        self.tol = tol
        self.orbit_cap = orbit_cap
        self.period_cap = period_cap

    def fit(self, X=None, y=None):
        self.family_ = _family(self.family)
        self.classes_ = np.array(["escaping", "preperiodic", "undecided"])
        return self

    def predict(self, X):
        a = self.family_.marked[self.marked_index]
        return np.array([is_preperiodic_at(self.family_, a, t, self.tol,
                                           (self.orbit_cap, self.period_cap)).status
                         for t in _params(X)])
