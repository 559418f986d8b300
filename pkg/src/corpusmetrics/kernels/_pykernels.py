"""Pure-numpy kernels: the fallback when the compiled extension is absent.

Must stay numerically interchangeable with ``_ckernels`` (same formulas,
same guard constants); cross-backend agreement is tested to 1e-8.
"""

from __future__ import annotations

import numpy as np

Q_FLOOR = 1e-12


def pairwise_sq_dists(x: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances between all row pairs, zero diagonal."""
    sq = np.einsum("ij,ij->i", x, x)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return d2


def gaussian_affinities(
    d2: np.ndarray, perplexity: float, tol: float, max_iter: int
) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise conditional Gaussian affinities calibrated to a perplexity.

    For each row a precision ``beta`` is bisected until the effective number
    of neighbours exp(entropy) is within ``tol`` of ``perplexity``. Returns
    (P, residuals) where P rows sum to 1 with a zero diagonal.
    """
    n = d2.shape[0]
    p = np.zeros((n, n))
    residuals = np.zeros(n)
    target = float(perplexity)
    for i in range(n):
        row = np.delete(d2[i], i)
        beta, lo, hi = 1.0, 0.0, np.inf
        weights = np.empty_like(row)
        residual = np.inf
        for _ in range(max_iter):
            np.exp(-row * beta, out=weights)
            total = weights.sum()
            if total <= 0.0:
                entropy = 0.0
            else:
                # H = log(sum w) + beta * sum(d w) / sum(w)
                entropy = np.log(total) + beta * float(row @ weights) / total
            residual = abs(np.exp(entropy) - target)
            if residual < tol:
                break
            if np.exp(entropy) > target:
                lo = beta
                beta = beta * 2.0 if hi == np.inf else (beta + hi) / 2.0
            else:
                hi = beta
                beta = (beta + lo) / 2.0
        if weights.sum() > 0.0:
            weights = weights / weights.sum()
        row_p = np.insert(weights, i, 0.0)
        p[i] = row_p
        residuals[i] = residual
    return p, residuals


def tsne_kl_grad(p: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    """KL divergence and its gradient for a Student-t low-dim layout.

    ``p`` is the symmetrized joint affinity matrix (zero diagonal), ``y`` the
    current (n, 2) coordinates.
    """
    d2 = pairwise_sq_dists(y)
    num = 1.0 / (1.0 + d2)
    np.fill_diagonal(num, 0.0)
    total = num.sum()
    q = np.maximum(num / total, Q_FLOOR)
    mask = p > 0.0
    kl = float(np.sum(p[mask] * np.log(p[mask] / q[mask])))
    pq = (p - q) * num
    grad = 4.0 * (pq.sum(axis=1)[:, None] * y - pq @ y)
    return kl, grad
