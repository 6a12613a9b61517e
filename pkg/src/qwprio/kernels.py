"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise the NumPy/SciPy
fallback is used. Set ``QWPRIO_BACKEND=python`` to force the fallback.
"""
import os

import numpy as np

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("QWPRIO_BACKEND", "").lower() != "python":
    try:
        from . import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

UNREACHABLE = _pykernels.UNREACHABLE


def get_backend(name=None):
    """Return the kernel module for ``name`` ("python", "cython" or the active one)."""
    if name is None:
        return _impl
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels
        return _ckernels
    raise ValueError(f"unknown kernel backend {name!r}")


def _csr_arrays(matrix):
    return (np.ascontiguousarray(matrix.indptr, dtype=np.int32),
            np.ascontiguousarray(matrix.indices, dtype=np.int32),
            np.ascontiguousarray(matrix.data, dtype=np.float64))


def chebyshev_series(matrix, center, radius, coeffs, block, backend=None):
    indptr, indices, data = _csr_arrays(matrix)
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    block = np.ascontiguousarray(block, dtype=np.complex128)
    return get_backend(backend).chebyshev_series(
        indptr, indices, data, float(center), float(radius), coeffs, block)


def bfs_distances(matrix, source, backend=None):
    indptr, indices, _ = _csr_arrays(matrix)
    return get_backend(backend).bfs_distances(indptr, indices, int(source))


def triangle_counts(matrix, backend=None):
    indptr, indices, _ = _csr_arrays(matrix)
    return get_backend(backend).triangle_counts(indptr, indices)


def diamond_expand(matrix, is_seed, n_rank, weight, degree, label_rank,
                   logfact, backend=None):
    indptr, indices, _ = _csr_arrays(matrix)
    return get_backend(backend).diamond_expand(
        indptr, indices, np.asarray(is_seed, dtype=bool), int(n_rank),
        int(weight), np.ascontiguousarray(degree, dtype=np.int64),
        np.ascontiguousarray(label_rank, dtype=np.int64),
        np.ascontiguousarray(logfact, dtype=np.float64))
