"""Soft-margin kernel SVM trained by SMO, with Platt-scaled probabilities."""

from __future__ import annotations

import math

import numpy as np

from ..errors import DegenerateLabels, NonConvergence
from ..rng import child_seed_seq
from . import _kernels
from .params import SVMParams

POLY_DEGREE = 3
COEF0 = 1.0
SV_EPS = 1e-8


def resolve_gamma(gamma, X: np.ndarray) -> float:
    """'scale' is 1 / (p * Var of all training values); 'auto' is 1 / p."""
    p = X.shape[1]
    if gamma == "scale":
        var = float(X.var())
        return 1.0 / (p * var) if var > 0 else 1.0 / p
    if gamma == "auto":
        return 1.0 / p
    return float(gamma)


def kernel_matrix(kernel: str, gamma: float | None, A: np.ndarray, B: np.ndarray,
                  ) -> np.ndarray:
    dots = A @ B.T
    if kernel == "linear":
        return dots
    if kernel == "rbf":
        sq = (np.sum(A * A, axis=1)[:, None] + np.sum(B * B, axis=1)[None, :]
              - 2.0 * dots)
        return np.exp(-gamma * np.maximum(sq, 0.0))
    if kernel == "poly":
        return (gamma * dots + COEF0) ** POLY_DEGREE
    if kernel == "sigmoid":
        return np.tanh(gamma * dots + COEF0)
    raise ValueError(f"unknown kernel {kernel!r}")


def _platt_fit(decision: np.ndarray, y01: np.ndarray, max_iter: int = 100,
               ) -> tuple[float, float]:
    """Newton fit of P(y=1|f) = 1 / (1 + exp(A f + B)) with smoothed targets."""
    prior1 = float(np.sum(y01 == 1))
    prior0 = float(len(y01) - prior1)
    hi = (prior1 + 1.0) / (prior1 + 2.0)
    lo = 1.0 / (prior0 + 2.0)
    t = np.where(y01 == 1, hi, lo)
    a, b = 0.0, math.log((prior0 + 1.0) / (prior1 + 1.0))
    sigma = 1e-12
    min_step = 1e-10

    def objective(a_, b_):
        f = a_ * decision + b_
        return float(np.sum(np.where(f >= 0, t * f + np.log1p(np.exp(-f)),
                                     (t - 1) * f + np.log1p(np.exp(f)))))

    fval = objective(a, b)
    for _ in range(max_iter):
        f = a * decision + b
        ef = np.exp(-np.abs(f))
        p = np.where(f >= 0, ef / (1.0 + ef), 1.0 / (1.0 + ef))
        q = 1.0 - p
        d1 = t - p
        d2 = p * q
        g1 = float(np.sum(decision * d1))
        g2 = float(np.sum(d1))
        if abs(g1) < 1e-5 and abs(g2) < 1e-5:
            break
        h11 = float(np.sum(decision * decision * d2)) + sigma
        h22 = float(np.sum(d2)) + sigma
        h21 = float(np.sum(decision * d2))
        det = h11 * h22 - h21 * h21
        da = -(h22 * g1 - h21 * g2) / det
        db = -(-h21 * g1 + h11 * g2) / det
        gd = g1 * da + g2 * db
        step = 1.0
        while step >= min_step:
            new_a, new_b = a + step * da, b + step * db
            new_f = objective(new_a, new_b)
            if new_f < fval + 1e-4 * step * gd:
                a, b, fval = new_a, new_b, new_f
                break
            step /= 2.0
        else:
            break
    return a, b


class KernelSVM:
    kind = "svm"

    def __init__(self, params: SVMParams, seed: int, sv_X: np.ndarray,
                 sv_coef: np.ndarray, bias: float, gamma_value: float | None,
                 platt_a: float, platt_b: float, kkt_residual: float,
                 n_features: int):
        self.params = params
        self.seed = seed
        self.sv_X = sv_X
        self.sv_coef = sv_coef  # alpha_i * y_i for support vectors
        self.bias = bias
        self.gamma_value = gamma_value
        self.platt_a = platt_a
        self.platt_b = platt_b
        self.kkt_residual = kkt_residual
        self.n_features = n_features

    @classmethod
    def fit(cls, X, y, params: SVMParams, seed: int, tol: float = 1e-3,
            max_passes_factor: int = 10) -> "KernelSVM":
        X = np.ascontiguousarray(X, dtype=np.float64)
        y01 = np.asarray(y, dtype=np.int64)
        if len(np.unique(y01)) < 2:
            raise DegenerateLabels("SVM needs both classes present")
        ypm = np.where(y01 == 1, 1.0, -1.0)
        gamma_value = None if params.kernel == "linear" else resolve_gamma(params.gamma, X)
        K = kernel_matrix(params.kernel, gamma_value, X, X)
        state = child_seed_seq(seed, "smo").generate_state(1, np.uint64)[0]
        n = X.shape[0]
        alphas, bias, residual, _ = _kernels.smo_solve(
            np.ascontiguousarray(K), ypm, float(params.C), tol,
            max_passes_factor * n, state)
        if residual > tol:
            raise NonConvergence(
                f"SMO stopped with KKT residual {residual:.3g} > tol {tol:.3g}",
                residual=float(residual))
        decision = K @ (alphas * ypm) + bias
        platt_a, platt_b = _platt_fit(decision, y01)
        keep = alphas > SV_EPS
        return cls(params=params, seed=seed, sv_X=X[keep].copy(),
                   sv_coef=(alphas * ypm)[keep].copy(), bias=float(bias),
                   gamma_value=gamma_value, platt_a=platt_a, platt_b=platt_b,
                   kkt_residual=float(residual), n_features=X.shape[1])

    def decision_function(self, X) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        if self.sv_X.shape[0] == 0:
            return np.full(X.shape[0], self.bias)
        K = kernel_matrix(self.params.kernel, self.gamma_value, X, self.sv_X)
        return K @ self.sv_coef + self.bias

    def predict_proba(self, X) -> np.ndarray:
        f = self.platt_a * self.decision_function(X) + self.platt_b
        ef = np.exp(-np.abs(f))
        return np.where(f >= 0, ef / (1.0 + ef), 1.0 / (1.0 + ef))

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(np.int8)


def fit_svm(X, y, params: SVMParams, seed: int, tol: float = 1e-3) -> KernelSVM:
    return KernelSVM.fit(X, y, params, seed, tol=tol)
