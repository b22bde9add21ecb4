"""scikit-learn compatible wrappers around the bound computations.

``BoundCurveTransformer`` maps a column of bandwidths to the bound columns of
a sweep; ``CriticalBandwidthEstimator`` learns the maximizing bandwidth over
the range spanned by its training bandwidths. Both hold only physical
parameters, so ``get_params``/``set_params``/``clone`` work as usual.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_bandwidths
from .bounds import BoundCurve, LinkConfig, bound_function, coherent_term, critical_bandwidth, sweep
from .channel_model import PowerBudget, ScatteringSpec

__all__ = ["BoundCurveTransformer", "CriticalBandwidthEstimator"]


class _LinkParams(BaseEstimator):
    def __init__(self, tau0=0.5e-6, nu0=500.0, sigma2=1e-9, mesh=None, P=1e-3, N0=4.14e-21,
                 beta=1.0, TF=1.25, constellation="qpsk", n_jobs=None):
        self.tau0 = tau0
        self.nu0 = nu0
        self.sigma2 = sigma2
        self.mesh = mesh
        self.P = P
        self.N0 = N0
        self.beta = beta
        self.TF = TF
        self.constellation = constellation
        self.n_jobs = n_jobs

    def _build(self):
        sf = ScatteringSpec(self.tau0, self.nu0, self.sigma2,
                            None if self.mesh is None else np.asarray(self.mesh, dtype=float))
        self.link_config_ = LinkConfig(sf, PowerBudget(self.P, self.N0, self.beta), self.TF)
        self.mi_ = coherent_term(self.constellation)


class BoundCurveTransformer(TransformerMixin, _LinkParams):
    """Bandwidths (Hz) in, bound columns out.

    Output columns follow ``get_feature_names_out``: ``ub1, ub2, lb_raw, lb,
    lb_approx, alpha_star, gamma_star`` (rates in nat/s).
    """

    def fit(self, X=None, y=None):
        if X is not None:
            check_bandwidths(X)
        self._build()
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "link_config_")
        W = check_bandwidths(X)
        curve = sweep(self.link_config_, W, self.mi_, workers=self.n_jobs)
        return curve.as_array()[:, 1:]

    def get_feature_names_out(self, input_features=None):
        return np.array(BoundCurve.COLUMNS[1:], dtype=object)


class CriticalBandwidthEstimator(_LinkParams):
    """Finds the bandwidth maximizing ``bound`` over the span of the fitted bandwidths.

    After ``fit``: ``critical_bandwidth_`` (Hz) and ``critical_value_`` (nat/s).
    ``predict`` returns the bound evaluated at new bandwidths.
    """

    def __init__(self, bound="lb", points_per_decade=40, tau0=0.5e-6, nu0=500.0, sigma2=1e-9,
                 mesh=None, P=1e-3, N0=4.14e-21, beta=1.0, TF=1.25, constellation="qpsk",
                 n_jobs=None):
        super().__init__(tau0=tau0, nu0=nu0, sigma2=sigma2, mesh=mesh, P=P, N0=N0, beta=beta,
                         TF=TF, constellation=constellation, n_jobs=n_jobs)
        self.bound = bound
        self.points_per_decade = points_per_decade

    def fit(self, X, y=None):
        W = check_bandwidths(X)
        self._build()
        self.n_features_in_ = 1
        self.critical_bandwidth_, self.critical_value_ = critical_bandwidth(
            self.bound, self.link_config_, (W.min(), W.max()), self.points_per_decade,
            mi=self.mi_, workers=self.n_jobs,
        )
        return self

    def predict(self, X):
        check_is_fitted(self, "critical_bandwidth_")
        f = bound_function(self.bound, self.link_config_, self.mi_)
        return np.array([f(W) for W in check_bandwidths(X)])
