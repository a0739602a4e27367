"""scikit-learn style transformer from rate rows to figures of merit.

Useful for dropping the model into pipelines that scan or fit over design
parameters: each input row holds the six rates (in ``RATE_NAMES`` order or as
named DataFrame columns) and each output row holds ``I``, ``beta`` and
``F_dB``.
"""
from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .analytic import analytic_metrics
from .errors import FunnelkitError
from .greens import MODES
from .metrics import compute_point
from .params import RATE_NAMES, RateParams

OUTPUT_NAMES = ("I", "beta", "F_dB")


class FunnelingTransformer(TransformerMixin, BaseEstimator):
    """Map rows of rates (units of Gamma_1) to ``[I, beta, F_dB]``.

    Parameters
    ----------
    mode : {"cavity", "plasmon"}
        Output mode whose photons are scored.
    method : {"spectral", "quadrature", "both", "analytic"}
        Evaluation route. ``both`` runs the two numerical routes and reports
        the spectral value.
    on_error : {"nan", "raise"}
        Rows that fail (no flux, numerical failure, invalid rates) become NaN
        unless ``"raise"`` is given.

    Notes
    -----
    The model has nothing to learn; ``fit`` only validates the input layout.
    """

    def __init__(self, mode="cavity", method="spectral", on_error="nan"):
        self.mode = mode
        self.method = method
        self.on_error = on_error

    def _columns(self, X):
        names = getattr(X, "columns", None)
        if names is not None:
            names = [str(c) for c in names]
            missing = [n for n in RATE_NAMES if n not in names]
            if missing:
                raise ValueError(f"input is missing rate column(s): {', '.join(missing)}")
            return np.asarray(X[list(RATE_NAMES)], dtype=float), np.array(names, dtype=object)
        arr = np.asarray(X, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != len(RATE_NAMES):
            raise ValueError(f"expected an (n_samples, {len(RATE_NAMES)}) array of {', '.join(RATE_NAMES)}")
        return arr, None

    def _check_settings(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {sorted(MODES)}")
        if self.method not in ("spectral", "quadrature", "both", "analytic"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.on_error not in ("nan", "raise"):
            raise ValueError("on_error must be 'nan' or 'raise'")
        if self.method == "analytic" and self.mode != "cavity":
            raise ValueError("the analytic model describes the cavity output only")

    def fit(self, X, y=None):
        self._check_settings()
        _, names = self._columns(X)
        self.n_features_in_ = len(RATE_NAMES)
        if names is not None:
            self.feature_names_in_ = names
        return self

    def _row(self, rates) -> tuple:
        params = RateParams(*rates)
        if self.method == "analytic":
            r = analytic_metrics(params)
        else:
            methods = ("spectral", "quadrature") if self.method == "both" else (self.method,)
            r = compute_point(params, self.mode, methods)
        return r.I, r.beta, r.F_dB

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        self._check_settings()
        arr, _ = self._columns(X)
        out = np.full((len(arr), len(OUTPUT_NAMES)), math.nan)
        for i, rates in enumerate(arr):
            try:
                out[i] = self._row(rates)
            except FunnelkitError:
                if self.on_error == "raise":
                    raise
        return out

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "n_features_in_")
        return np.array(OUTPUT_NAMES, dtype=object)
