"""sklearn-style estimator facade for the minimax polynomial fit.

``PacPolynomialRegressor`` composes with the usual tooling (``get_params``,
``set_params``, ``clone``, pipelines); the fitted state doubles as the
serializable artifact via ``pac_``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .scenario import PacPolynomial, PolyTemplate, sample_count, solve_minimax


class PacPolynomialRegressor(RegressorMixin, BaseEstimator):
    """Minimax (Chebyshev) polynomial regression with scenario-bound checking.

    Parameters
    ----------
    degree : total degree of the monomial template.
    eps, eta : error rate and significance level recorded with the fit; they
        also set the minimum training size the scenario bound prescribes.
    allow_undersampled : fit even when fewer samples are supplied (the
        statistical tags then no longer carry the guarantee).

    Attributes
    ----------
    coef_ : monomial coefficients, graded order (constant term first).
    lambda_ : optimal L-infinity training residual (the margin).
    pac_ : the fitted artifact with its statistical tags.
    """

    def __init__(self, degree=1, eps=0.05, eta=0.05, allow_undersampled=False):
        self.degree = degree
        self.eps = eps
        self.eta = eta
        self.allow_undersampled = allow_undersampled

    def required_samples(self, n_features: int) -> int:
        m = PolyTemplate.for_dimension(n_features, self.degree).size
        return sample_count(self.eps, self.eta, m + 1)

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        n = X.shape[1]
        needed = self.required_samples(n)
        if len(y) < needed and not self.allow_undersampled:
            raise ValueError(
                f"{len(y)} samples; the scenario bound for degree {self.degree} "
                f"in {n} features at eps={self.eps}, eta={self.eta} needs {needed}")
        template = PolyTemplate.for_dimension(n, self.degree)
        coeffs, lam = solve_minimax(X, y, template)
        self.n_features_in_ = n
        self.template_ = template
        self.coef_ = coeffs
        self.lambda_ = lam
        self.pac_ = PacPolynomial(template, tuple(f"x{i}" for i in range(n)),
                                  coeffs, lam, self.eps, self.eta, len(y), None)
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return self.template_.design_matrix(X) @ self.coef_
