"""Input validation shared by the estimator wrappers."""

import numpy as np
from sklearn.utils.validation import check_array


def check_bandwidths(X):
    """Return bandwidths from ``X`` (1-D, or a single-column 2-D array) as a 1-D float array."""
    X = np.asarray(X, dtype=float) if not hasattr(X, "iloc") else X
    if np.ndim(X) == 1:
        X = np.reshape(X, (-1, 1))
    X = check_array(X, dtype=np.float64, ensure_2d=True)
    if X.shape[1] != 1:
        raise ValueError(f"expected a single bandwidth column, got {X.shape[1]} columns")
    W = X[:, 0]
    if np.any(W <= 0):
        raise ValueError("bandwidths must be positive")
    return W
