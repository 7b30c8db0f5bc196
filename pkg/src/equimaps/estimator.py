"""scikit-learn wrapper: points of a homogeneous space -> equivariant kernel features."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .cli import parse_rep
from .invariants import DEFAULT_RANK_TOL
from .kernels import build_basis
from .sections import INFINITY, get_space

__all__ = ["EquivariantFeatures", "row_to_point"]


def row_to_point(space, row):
    """Real feature row -> catalog point (complex geometries use ``re, im`` pairs)."""
    row = np.asarray(row, dtype=float)
    key = space.key
    if key == "h2":
        return complex(row[0], row[1])
    if key == "riemann-sphere":
        if not np.all(np.isfinite(row)):
            return INFINITY
        return complex(row[0], row[1])
    if key == "c2-punctured":
        return np.array([complex(row[0], row[1]), complex(row[2], row[3])])
    return row


class EquivariantFeatures(TransformerMixin, BaseEstimator):
    """Evaluate all equivariant kernels ``K_i(x)`` at each input point.

    Parameters
    ----------
    geometry : str
        Catalog identifier, e.g. ``"sphere(2)"`` or ``"h2"``.
    rep : str
        Representation expression as accepted by the command line.
    tol : float
        Relative rank tolerance for the fixed-space solve.

    Attributes
    ----------
    basis_ : EquivariantBasis
    n_kernels_ : int
    n_features_in_ : int

    Notes
    -----
    Output rows are the kernel values flattened column-major and stacked;
    complex values are split into real and imaginary columns.  ``fit``
    ignores the data beyond its width: the basis depends only on the
    geometry and representation.
    """

    def __init__(self, geometry="h2", rep="endo_conj(defining)", tol=DEFAULT_RANK_TOL):
        self.geometry = geometry
        self.rep = rep
        self.tol = tol

    def fit(self, X, y=None):
        space = get_space(self.geometry)
        rep = parse_rep(self.rep, space.group)
        self.basis_ = build_basis(space, rep, self.tol)
        self.n_kernels_ = self.basis_.m
        X = np.asarray(X, dtype=float)
        self.n_features_in_ = X.shape[1] if X.ndim == 2 else 1
        return self

    def transform(self, X):
        check_is_fitted(self, "basis_")
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"expected shape (n, {self.n_features_in_}), got {X.shape}"
            )
        space = self.basis_.space
        rows = []
        for row in X:
            vals = np.concatenate(
                self.basis_.evaluate_all(row_to_point(space, row), flat=True) or [np.zeros(0)]
            )
            if np.iscomplexobj(vals):
                vals = np.concatenate([vals.real, vals.imag])
            rows.append(vals)
        return np.array(rows, dtype=float)
