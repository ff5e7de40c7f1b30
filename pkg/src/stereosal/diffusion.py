"""Manifold-ranking propagation on a superpixel graph.

Scores are spread by solving ``(I - alpha * S) f = y`` where ``S`` is the
symmetrically normalized adjacency-weight matrix.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

DEFAULT_ALPHA = 0.99


class DiffusionOperator:
    """Factorized ranking system for one graph, reusable across right-hand sides."""

    def __init__(self, W, alpha: float = DEFAULT_ALPHA):
        if not 0.0 <= alpha < 1.0:
            raise ValueError(f"alpha must lie in [0, 1), got {alpha}")
        W = W.toarray() if sp.issparse(W) else np.asarray(W, dtype=np.float64)
        deg = W.sum(axis=1)
        inv_sqrt = np.zeros_like(deg)
        np.divide(1.0, np.sqrt(deg), out=inv_sqrt, where=deg > 0)
        self.alpha = float(alpha)
        self.S_norm = inv_sqrt[:, None] * W * inv_sqrt[None, :]
        self.system = np.eye(len(W)) - self.alpha * self.S_norm
        self._lu = la.lu_factor(self.system)

    def __len__(self):
        return self.system.shape[0]

    def solve(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=np.float64)
        if self.alpha == 0.0:
            return y.copy()
        return la.lu_solve(self._lu, y)


def manifold_rank(op: DiffusionOperator, y) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    if not np.all(np.isfinite(y)):
        raise ValueError("ranking seeds must be finite")
    return op.solve(y)


def diffuse_affinity(op: DiffusionOperator, A: np.ndarray) -> np.ndarray:
    """Propagate every column of ``A`` through the ranking operator.

    The result is re-symmetrized and rescaled as ``D^-1/2 X D^-1/2`` with ``D``
    its diagonal, so it has a unit diagonal like the raw affinity.
    """
    A = np.asarray(A, dtype=np.float64)
    if op.alpha == 0.0:
        return A.copy()
    X = op.solve(A)
    X = 0.5 * (X + X.T)
    s = 1.0 / np.sqrt(np.diag(X))
    X = s[:, None] * X * s[None, :]
    X = 0.5 * (X + X.T)
    np.fill_diagonal(X, 1.0)
    return X
