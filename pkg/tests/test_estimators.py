import numpy as np
from sklearn.base import clone

from critorbit.estimators import EscapeRateTransformer, PreperiodicVerdict


def test_transformer():
    tr = EscapeRateTransformer("odd_cubic.json")
    out = tr.fit_transform(np.array([0.1, 2.0 + 1j]))
    assert out.shape == (2, 2)
    assert np.allclose(out[:, 0], out[:, 1])
    pairs = tr.transform(np.array([[0.1, 0.0], [2.0, 1.0]]))
    assert np.allclose(pairs, out)
    assert clone(tr).get_params() == tr.get_params()


def test_verdict_classifier():
    clf = PreperiodicVerdict().fit()
    X = np.array([0, -1, -2, 1j, 0.5])
    y = np.array(["preperiodic"] * 4 + ["escaping"])
    assert list(clf.predict(X)) == list(y)
    assert clf.score(X, y) == 1.0
