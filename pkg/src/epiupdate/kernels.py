"""Backend selection for the hot loops.

The compiled extension ``_ckernels`` is used when it was built; otherwise the
numpy fallback. Setting ``EPIUPDATE_PURE_PYTHON=1`` forces the fallback.
"""
import os

import numpy as np

from . import _pykernels

if os.environ.get("EPIUPDATE_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"


def _worlds(arr, n):
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    if arr.shape != (1 << n,):
        raise ValueError(f"expected {1 << n} world values, got shape {arr.shape}")
    return arr


def world_marginals(probs, n):
    """Per-argument sums of ``probs`` over the worlds containing each argument."""
    return _impl.world_marginals(_worlds(probs, n), n)


def world_affine(coeffs, const, n):
    """``const + sum(coeffs[i] for i in w)`` for every world bitmask ``w``."""
    return _impl.world_affine(np.ascontiguousarray(coeffs, dtype=np.float64), float(const), n)


def world_product(values, n):
    """Independent-product distribution with argument marginals ``values``."""
    return _impl.world_product(np.ascontiguousarray(values, dtype=np.float64), n)


def world_gram(weights, n):
    """``sum_w weights[w] * phi(w) phi(w)^T`` with ``phi(w) = (1, bit_0(w), ..., bit_{n-1}(w))``."""
    return _impl.world_gram(_worlds(weights, n), n)


def qr_drop(R, J, k, q):
    _impl.qr_drop(R, J, k, q)
