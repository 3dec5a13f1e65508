"""Estimator-style wrappers so the algorithms compose with the wider
scikit-learn ecosystem (pipelines, clone, grid search).

The base class re-implements the ``get_params`` / ``set_params`` protocol
instead of importing scikit-learn, keeping numpy the only runtime
dependency; ``sklearn.base.clone`` and ``Pipeline`` work with these
classes through duck typing.
"""

from __future__ import annotations

import inspect

import numpy as np

from . import linalg, signal
from .errors import ConfigError
from .image import GrayImage, WindowConfig, sliding_scan, threshold_map
from .validation import check_matrix

__all__ = ["BaseEstimator", "SubspaceSeparator", "SmoothnessScanner"]


class BaseEstimator:
    """Parameter handling following the scikit-learn convention:
    ``__init__`` stores constructor arguments verbatim under the same
    names, and fitted state uses trailing-underscore attributes."""

    @classmethod
    def _param_names(cls):
        sig = inspect.signature(cls.__init__)
        return sorted(p.name for p in sig.parameters.values() if p.name != "self")

    def get_params(self, deep: bool = True) -> dict:
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params):
        valid = set(self._param_names())
        for key, value in params.items():
            if key not in valid:
                raise ConfigError(f"invalid parameter {key!r} for {type(self).__name__}")
            setattr(self, key, value)
        return self

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"


class SubspaceSeparator(BaseEstimator):
    """Learn a dominant/weak/noise split of a channel matrix.

    Parameters
    ----------
    method : {"svd", "gsvd"}
        "svd" fits the spectrum of X alone; "gsvd" compares X against a
        reference matrix passed to ``fit``.
    two_peaks : bool
        Detect both boundaries (svd method only); otherwise only the
        dominant/weak boundary.
    min_separation : int
        Minimum index distance between the two boundaries.
    rank_tolerance : float or None
        Relative numerical-rank tolerance; None for the default.

    After ``fit``, ``transform(X)`` projects data onto the learned weak
    subspace (for the svd method this works for any matrix with the fitted
    column count; the gsvd factorization has no projection form, so
    transform reconstructs the fitted matrix's weak band).
    """

    def __init__(self, method="svd", two_peaks=True, min_separation=1, rank_tolerance=None):
        self.method = method
        self.two_peaks = two_peaks
        self.min_separation = min_separation
        self.rank_tolerance = rank_tolerance

    def fit(self, X, B=None):
        if self.method not in ("svd", "gsvd"):
            raise ConfigError(f"method must be 'svd' or 'gsvd', got {self.method!r}")
        X = check_matrix(X, "X")
        self.n_features_in_ = X.shape[1]
        if self.method == "svd":
            self.spectrum_ = linalg.svd(X, rank_tolerance=self.rank_tolerance)
            if self.two_peaks and self.spectrum_.numerical_rank >= 3:
                self.cutoff_ = signal.find_two_cutoffs(self.spectrum_, self.min_separation)
            else:
                self.cutoff_ = signal.find_cutoff(self.spectrum_)
        else:
            if B is None:
                raise ConfigError("gsvd method requires the reference matrix B")
            self.gsvd_ = linalg.gsvd(X, B)
            self.cutoff_ = signal.cutoff_from_gsvd(self.gsvd_)
        return self

    def _check_fitted(self):
        if not hasattr(self, "cutoff_"):
            raise ConfigError("separator is not fitted yet; call fit first")

    def subspaces(self):
        """The (dominant, weak, noise) reconstructions of the fitted matrix."""
        self._check_fitted()
        if self.method == "svd":
            return signal.separate(self.spectrum_, self.cutoff_)
        return signal.gsvd_separate(self.gsvd_, self.cutoff_)

    def cutoffs(self):
        """The fitted boundary indices ``(m, f)``; f may be None."""
        self._check_fitted()
        return self.cutoff_.m, self.cutoff_.f

    def transform(self, X):
        """Project onto the weak subspace learned during ``fit``."""
        self._check_fitted()
        X = check_matrix(X, "X")
        if X.shape[1] != self.n_features_in_:
            raise ConfigError(f"X has {X.shape[1]} columns, fitted with {self.n_features_in_}")
        if self.method == "gsvd":
            return self.subspaces()[1]
        m = self.cutoff_.m
        f = self.cutoff_.f if self.cutoff_.f is not None else self.spectrum_.numerical_rank
        basis = self.spectrum_.right_basis[:, m:f]
        return X @ basis @ basis.T

    def fit_transform(self, X, B=None):
        return self.fit(X, B=B).transform(X)


class SmoothnessScanner(BaseEstimator):
    """Sliding-window texture metric as a transformer.

    ``transform`` maps a grayscale image (array in [0, 1] or
    :class:`GrayImage`) to the per-window metric grid; ``predict``
    thresholds the grid into a binary anomaly mask.
    """

    def __init__(self, window_size=5, stride=1, metric="smoothness", order=1,
                 delta=0.0, epsilon_guard=1e-6, threshold=None, polarity="above",
                 workers=1):
        self.window_size = window_size
        self.stride = stride
        self.metric = metric
        self.order = order
        self.delta = delta
        self.epsilon_guard = epsilon_guard
        self.threshold = threshold
        self.polarity = polarity
        self.workers = workers

    def _config(self) -> WindowConfig:
        return WindowConfig(window_size=self.window_size, stride=self.stride,
                            order=self.order, delta=self.delta,
                            epsilon_guard=self.epsilon_guard)

    def fit(self, X=None, y=None):
        self._config()  # validate parameters; the scanner itself is stateless
        self.fitted_ = True
        return self

    @staticmethod
    def _as_image(X) -> GrayImage:
        return X if isinstance(X, GrayImage) else GrayImage(np.asarray(X, dtype=np.float64))

    def transform(self, X):
        smap = sliding_scan(self._as_image(X), self._config(), metric=self.metric,
                            workers=self.workers)
        return smap.grid

    def fit_transform(self, X, y=None):
        return self.fit(X).transform(X)

    def predict(self, X):
        if self.threshold is None:
            raise ConfigError("predict requires the threshold parameter")
        smap = sliding_scan(self._as_image(X), self._config(), metric=self.metric,
                            workers=self.workers)
        return threshold_map(smap, self.threshold, self.polarity)
