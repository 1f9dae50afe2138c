"""scikit-learn style wrappers around the solver and the entanglement screens."""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError
from sklearn.utils.validation import check_is_fitted

from .channel import ChoiMatrix, LinearMapTensor, choi_of_map
from .entanglement import default_registry, pairing, ppt_test, realignment_test
from .matrix import FLOAT64, PSD_TOL, DenseMatrix
from .sqroot import FactorizationProblem, SolverConfig, solve_factorization


def _batch(X, side, name="X"):
    arr = np.asarray(X)
    if arr.ndim == 2:
        arr = arr[None]
    if arr.ndim != 3 or arr.shape[1:] != (side, side):
        raise ValueError(f"{name} must have shape (n_samples, {side}, {side}), got {np.shape(X)}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or infinity")
    return arr


class ChannelFactorizer(BaseEstimator):
    """Factor a target channel as ``phi2 o phi1`` through dimension ``b``.

    ``fit`` takes a :class:`~pptsquare.channel.ChoiMatrix` or a
    :class:`~pptsquare.channel.LinearMapTensor`.  After fitting,
    ``transform`` applies ``phi1`` to a batch of ``a x a`` matrices and
    ``inverse_transform`` applies ``phi2`` to ``b x b`` matrices (it is the
    second half of the factorization, not an inverse of ``transform``).
    """

    def __init__(self, dims=None, mode="square_root", require_cp=(False, False),
                 require_ccp=(False, False), restarts=64, max_iters=2000,
                 residual_tol=1e-8, psd_penalty_weight=1.0, seed=0, n_jobs=1):
        self.dims = dims
        self.mode = mode
        self.require_cp = require_cp
        self.require_ccp = require_ccp
        self.restarts = restarts
        self.max_iters = max_iters
        self.residual_tol = residual_tol
        self.psd_penalty_weight = psd_penalty_weight
        self.seed = seed
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        target = choi_of_map(X) if isinstance(X, LinearMapTensor) else X
        if not isinstance(target, ChoiMatrix):
            raise TypeError("fit expects a ChoiMatrix or LinearMapTensor")
        dims = self.dims
        if dims is None:
            if target.dim_a != target.dim_b:
                raise ValueError("dims is required when the target is not square")
            dims = (target.dim_a,) * 3
        problem = FactorizationProblem(target, tuple(dims), self.mode,
                                       tuple(self.require_cp), tuple(self.require_ccp))
        config = SolverConfig(restarts=self.restarts, max_iters=self.max_iters,
                              residual_tol=self.residual_tol,
                              psd_penalty_weight=self.psd_penalty_weight,
                              seed=self.seed, n_jobs=self.n_jobs)
        self.solutions_ = solve_factorization(problem, config)
        self.dims_ = problem.dims
        best = self.solutions_[0] if self.solutions_ else None
        self.factor1_ = None if best is None else best.factor1
        self.factor2_ = None if best is None else best.factor2
        self.residual_ = None if best is None else best.residual
        return self

    def _apply(self, phi, X, side, name):
        check_is_fitted(self, "solutions_")
        if phi is None:
            raise NotFittedError("no accepted factorization was found during fit")
        arr = _batch(X, side, name)
        return np.einsum("klij,nij->nkl", phi.to_numpy(), arr)

    def transform(self, X):
        check_is_fitted(self, "solutions_")
        return self._apply(self.factor1_, X, self.dims_[0], "X")

    def inverse_transform(self, X):
        check_is_fitted(self, "solutions_")
        return self._apply(self.factor2_, X, self.dims_[1], "X")


class EntanglementScreen(TransformerMixin, BaseEstimator):
    """Per-state entanglement features.

    Columns: smallest eigenvalue, smallest partial-transpose eigenvalue,
    realignment value, then one pairing per registered witness acting on the
    cut (all computed on the trace-normalized state).
    """

    def __init__(self, dim_a=2, dim_b=2, tol=PSD_TOL, registry=None):
        self.dim_a = dim_a
        self.dim_b = dim_b
        self.tol = tol
        self.registry = registry

    def fit(self, X, y=None):
        side = self.dim_a * self.dim_b
        arr = _batch(X, side)
        registry = default_registry() if self.registry is None else self.registry
        self.witnesses_ = registry.for_cut(self.dim_a, self.dim_b)
        self.n_features_in_ = side * side
        self.n_samples_seen_ = arr.shape[0]
        return self

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "witnesses_")
        names = ["min_eig", "pt_min_eig", "ccnr"]
        names += [f"pairing_{label}" for label, _ in self.witnesses_]
        return np.asarray(names, dtype=object)

    def transform(self, X):
        check_is_fitted(self, "witnesses_")
        arr = _batch(X, self.dim_a * self.dim_b)
        rows = []
        for M in arr:
            tr = np.trace(M).real
            if not tr > 0:
                raise ValueError("every state needs positive trace")
            unit = ChoiMatrix(DenseMatrix(M / tr, FLOAT64), self.dim_a, self.dim_b)
            v = ppt_test(unit, self.tol)
            feats = [v.min_eig_state, v.min_eig_pt, realignment_test(unit, self.tol).ccnr_value]
            feats += [float(pairing(unit, w)) for _, w in self.witnesses_]
            rows.append(feats)
        return np.asarray(rows, dtype=float).reshape(len(rows), -1)
