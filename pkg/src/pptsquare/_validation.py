"""Input validation helpers shared by the public functions and estimators."""

from numbers import Integral, Real

import numpy as np


class DimensionMismatchError(ValueError):
    """Raised when matrix or tensor extents do not fit the declared dimensions."""


class NotHermitianError(ValueError):
    """Raised when a Hermitian matrix is required but the input is not."""


def check_positive_int(value, name):
    if isinstance(value, bool) or not isinstance(value, Integral) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def check_nonnegative_int(value, name):
    if isinstance(value, bool) or not isinstance(value, Integral) or value < 0:
        raise ValueError(f"{name} must be a non-negative integer, got {value!r}")
    return int(value)


def check_tol(value, name="tol"):
    if not isinstance(value, Real) or not np.isfinite(value) or value < 0:
        raise ValueError(f"{name} must be a finite non-negative real, got {value!r}")
    return float(value)


def check_square(shape, name="matrix"):
    if len(shape) != 2 or shape[0] != shape[1]:
        raise DimensionMismatchError(f"{name} must be square, got shape {tuple(shape)}")
    return shape[0]


def check_bipartite_side(side, dim_a, dim_b, name="matrix"):
    dim_a = check_positive_int(dim_a, "dim_a")
    dim_b = check_positive_int(dim_b, "dim_b")
    if side != dim_a * dim_b:
        raise DimensionMismatchError(
            f"{name} side {side} does not equal dim_a * dim_b = {dim_a} * {dim_b}"
        )
    return dim_a, dim_b


def check_map_shape(shape):
    """Return ``(in_dim, out_dim)`` for a coefficient tensor of shape ``(m, m, n, n)``."""
    if len(shape) != 4 or shape[0] != shape[1] or shape[2] != shape[3]:
        raise DimensionMismatchError(
            f"map coefficients must have shape (m, m, n, n), got {tuple(shape)}"
        )
    if shape[0] == 0 or shape[2] == 0:
        raise DimensionMismatchError("map dimensions must be positive")
    return shape[2], shape[0]
