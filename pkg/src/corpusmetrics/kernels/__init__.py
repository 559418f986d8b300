"""Kernel backend selection.

The compiled Cython extension is preferred when it built; otherwise the
pure-numpy twin takes over. Set ``CORPUSMETRICS_PURE_KERNELS=1`` to force
the fallback (used by the cross-backend tests and the benchmark).
"""

from __future__ import annotations

import os

import numpy as np

from . import _pykernels

_impl = None
if os.environ.get("CORPUSMETRICS_PURE_KERNELS") != "1":
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = None
if _impl is None:
    _impl = _pykernels

BACKEND = "compiled" if _impl is not _pykernels else "pure"


def _c_array(x: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(x, dtype=np.float64)


def pairwise_sq_dists(x: np.ndarray) -> np.ndarray:
    return _impl.pairwise_sq_dists(_c_array(x))


def gaussian_affinities(
    d2: np.ndarray, perplexity: float, tol: float = 1e-5, max_iter: int = 200
) -> tuple[np.ndarray, np.ndarray]:
    return _impl.gaussian_affinities(_c_array(d2), float(perplexity), float(tol), int(max_iter))


def tsne_kl_grad(p: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    return _impl.tsne_kl_grad(_c_array(p), _c_array(y))
