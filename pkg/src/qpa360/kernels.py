"""Squared-error accumulation kernels.

These inner loops dominate runtime when scoring full sequences (an 8K ERP
luma plane is ~33M samples), so they are numba-jitted, with a pure-NumPy
fallback used when numba is unavailable or when the environment variable
QPA360_NO_NUMBA is set to a non-empty value. All accumulation happens in
float64 regardless of sample dtype.
"""

import os

import numpy as np

__all__ = ["BACKEND", "sse", "weighted_sse", "row_weighted_sse"]


def _numpy_sse(ref, test):
    d = ref.astype(np.float64) - test.astype(np.float64)
    return float(np.sum(d * d))


def _numpy_weighted_sse(ref, test, weights):
    d = ref.astype(np.float64) - test.astype(np.float64)
    return float(np.sum(weights * (d * d)))


def _numpy_row_weighted_sse(ref, test, row_weights):
    d = ref.astype(np.float64) - test.astype(np.float64)
    return float(np.sum(d * d, axis=1) @ row_weights)


_want_numba = not os.environ.get("QPA360_NO_NUMBA")

if _want_numba:
    try:
        from numba import njit
    except ImportError:
        _want_numba = False

if _want_numba:

    @njit(cache=True)
    def _numba_sse(ref, test):
        total = 0.0
        for i in range(ref.shape[0]):
            for j in range(ref.shape[1]):
                d = np.float64(ref[i, j]) - np.float64(test[i, j])
                total += d * d
        return total

    @njit(cache=True)
    def _numba_weighted_sse(ref, test, weights):
        total = 0.0
        for i in range(ref.shape[0]):
            for j in range(ref.shape[1]):
                d = np.float64(ref[i, j]) - np.float64(test[i, j])
                total += weights[i, j] * d * d
        return total

    @njit(cache=True)
    def _numba_row_weighted_sse(ref, test, row_weights):
        total = 0.0
        for i in range(ref.shape[0]):
            row = 0.0
            for j in range(ref.shape[1]):
                d = np.float64(ref[i, j]) - np.float64(test[i, j])
                row += d * d
            total += row_weights[i] * row
        return total

    BACKEND = "numba"
    _sse_impl = _numba_sse
    _weighted_sse_impl = _numba_weighted_sse
    _row_weighted_sse_impl = _numba_row_weighted_sse
else:
    BACKEND = "numpy"
    _sse_impl = _numpy_sse
    _weighted_sse_impl = _numpy_weighted_sse
    _row_weighted_sse_impl = _numpy_row_weighted_sse


def sse(ref, test):
    """Sum of squared sample differences of two equal-shape 2-D planes."""
    return float(_sse_impl(ref, test))


def weighted_sse(ref, test, weights):
    """Per-pixel weighted sum of squared differences (weights as a full grid)."""
    return float(_weighted_sse_impl(ref, test, weights))


def row_weighted_sse(ref, test, row_weights):
    """Weighted sum of squared differences with one weight per plane row.

    Equivalent to weighted_sse with the row weights broadcast across
    columns, but avoids materializing the full grid.
    """
    return float(_row_weighted_sse_impl(ref, test, row_weights))
