"""Dense complex matrices with a float64 and an exact-rational backend.

Every state, Choi matrix and spectrum in the package is built on
:class:`DenseMatrix`.  The rational backend stores Gaussian rationals
(``sympy``'s ``QQ_I`` elements) in a numpy object array so structural
operations (Kronecker products, partial transposes, reshuffles) are shared
between both backends and reproduce exact fixtures bit for bit.  Spectral
questions are always answered in float64.

Composite indices follow ``(i, k) -> i * dim_b + k``.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Complex, Rational, Real

import numpy as np
from sympy.polys.domains import QQ_I

from ._validation import (
    DimensionMismatchError,
    NotHermitianError,
    check_bipartite_side,
    check_square,
    check_tol,
)

FLOAT64 = "float64"
RATIONAL = "rational"

#: Default absolute tolerance for positive-semidefiniteness decisions.
PSD_TOL = 1e-9
#: Default Hermiticity tolerance, relative to ``max(1, max |M_ij|)``.
HERMITIAN_TOL = 1e-9
#: Default relative singular-value cut-off for numerical ranks.
RANK_TOL = 1e-10

_ExactScalar = QQ_I.dtype
_ZERO = QQ_I(0, 0)
_ONE = QQ_I(1, 0)


def _exact_real(x):
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (Rational, Real)):
        return Fraction(x)
    # gmpy2 / sympy rationals
    return Fraction(str(x))


def exact_scalar(x):
    """Convert ``x`` to an exact Gaussian rational.

    Accepts ints, :class:`~fractions.Fraction`, ``"p/q"`` strings, floats
    (converted exactly), complex numbers, ``(re, im)`` pairs and ``QQ_I``
    elements.
    """
    if isinstance(x, _ExactScalar):
        return x
    if isinstance(x, (tuple, list)):
        if len(x) != 2:
            raise ValueError(f"expected a (re, im) pair, got {x!r}")
        return QQ_I(_exact_real(x[0]), _exact_real(x[1]))
    if isinstance(x, complex) or (
        isinstance(x, Complex) and not isinstance(x, Real) and not isinstance(x, str)
    ):
        return QQ_I(Fraction(x.real), Fraction(x.imag))
    if isinstance(x, np.generic):
        return exact_scalar(x.item())
    return QQ_I(_exact_real(x), 0)


def exact_parts(x):
    """Return ``(re, im)`` of an exact scalar as :class:`Fraction` values."""
    x = exact_scalar(x)
    return Fraction(str(x.x)), Fraction(str(x.y))


def _to_complex(x):
    return complex(float(Fraction(str(x.x))), float(Fraction(str(x.y))))


def _conj_exact(x):
    return QQ_I(x.x, -x.y)


def _is_zero_exact(x):
    return x.x == 0 and x.y == 0


_vec_to_complex = np.frompyfunc(_to_complex, 1, 1)
_vec_conj = np.frompyfunc(_conj_exact, 1, 1)



def exact_array(values):
    """Object array of exact scalars with the same shape as ``values``."""
    arr = np.asarray(values, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx in np.ndindex(arr.shape):
        out[idx] = exact_scalar(arr[idx])
    return out


def exact_to_float(arr):
    """Convert an object array of exact scalars to float64/complex128."""
    if arr.size == 0:
        return np.zeros(arr.shape)
    out = np.asarray(_vec_to_complex(arr), dtype=np.complex128).reshape(arr.shape)
    if not np.any(out.imag):
        return out.real.copy()
    return out


def exact_conj(arr):
    if arr.size == 0:
        return arr.copy()
    return np.asarray(_vec_conj(arr), dtype=object).reshape(arr.shape)


def exact_zeros(shape):
    out = np.empty(shape, dtype=object)
    out.fill(_ZERO)
    return out


def exact_equal(a, b):
    """Entrywise exact equality of two object arrays of exact scalars."""
    if a.shape != b.shape:
        return False
    return all(x == y for x, y in zip(a.flat, b.flat))


def _freeze(arr):
    arr = np.array(arr, copy=True)
    arr.flags.writeable = False
    return arr


class DenseMatrix:
    """Immutable dense complex matrix.

    Parameters
    ----------
    data : array-like
        Two-dimensional entries.
    backend : {"float64", "rational"}, optional
        Scalar arithmetic to carry.  Inferred from ``data`` when omitted:
        object arrays become rational, everything else float64.

    Notes
    -----
    Rational matrices compare with ``==`` exactly.  Float matrices refuse
    ``==``; use :meth:`allclose`.
    """

    __slots__ = ("_data", "_backend")

    def __init__(self, data, backend=None):
        if isinstance(data, DenseMatrix):
            if backend is None or backend == data.backend:
                self._data, self._backend = data._data, data._backend
                return
            data = data._data
        if backend is None:
            arr = np.asarray(data)
            backend = RATIONAL if arr.dtype == object else FLOAT64
        if backend == RATIONAL:
            arr = exact_array(data)
        elif backend == FLOAT64:
            arr = np.asarray(data)
            if arr.dtype == object:
                arr = exact_to_float(exact_array(arr))
            elif np.iscomplexobj(arr):
                arr = arr.astype(np.complex128)
            else:
                arr = arr.astype(np.float64)
        else:
            raise ValueError(f"unknown backend {backend!r}")
        if arr.ndim != 2:
            raise DimensionMismatchError(f"expected a 2-d matrix, got shape {arr.shape}")
        self._data = _freeze(arr)
        self._backend = backend

    @classmethod
    def rational(cls, entries):
        """Build an exact matrix from ints, fractions, strings or pairs."""
        return cls(entries, backend=RATIONAL)

    @classmethod
    def float64(cls, entries):
        return cls(entries, backend=FLOAT64)

    @classmethod
    def identity(cls, n, backend=FLOAT64):
        if backend == RATIONAL:
            arr = exact_zeros((n, n))
            for i in range(n):
                arr[i, i] = _ONE
            return cls(arr, RATIONAL)
        return cls(np.eye(n), FLOAT64)

    @classmethod
    def zeros(cls, rows, cols, backend=FLOAT64):
        if backend == RATIONAL:
            return cls(exact_zeros((rows, cols)), RATIONAL)
        return cls(np.zeros((rows, cols)), FLOAT64)

    @property
    def backend(self):
        return self._backend

    @property
    def is_exact(self):
        return self._backend == RATIONAL

    @property
    def data(self):
        """Read-only view of the underlying array."""
        return self._data

    @property
    def rows(self):
        return self._data.shape[0]

    @property
    def cols(self):
        return self._data.shape[1]

    @property
    def shape(self):
        return self._data.shape

    @property
    def entries(self):
        """Entries in row-major order."""
        return list(self._data.flat)

    def to_numpy(self):
        """Float64 (or complex128) copy of the entries."""
        if self.is_exact:
            return exact_to_float(self._data)
        return np.array(self._data)

    def to_float(self):
        if not self.is_exact:
            return self
        return DenseMatrix(exact_to_float(self._data), FLOAT64)

    def __array__(self, dtype=None, copy=None):
        arr = self.to_numpy()
        return arr if dtype is None else arr.astype(dtype)

    def __getitem__(self, idx):
        return self._data[idx]

    def __repr__(self):
        return f"DenseMatrix({self.rows}x{self.cols}, backend={self._backend!r})"

    def __eq__(self, other):
        if not isinstance(other, DenseMatrix):
            return NotImplemented
        if not (self.is_exact and other.is_exact):
            raise TypeError("float64 matrices compare only via allclose()")
        return exact_equal(self._data, other._data)

    __hash__ = None

    def allclose(self, other, atol=1e-12, rtol=0.0):
        other = as_matrix(other)
        if self.shape != other.shape:
            return False
        return bool(np.allclose(self.to_numpy(), other.to_numpy(), atol=atol, rtol=rtol))

    def _coerce_pair(self, other):
        other = as_matrix(other)
        if self.is_exact and other.is_exact:
            return self._data, other._data, RATIONAL
        return self.to_numpy(), other.to_numpy(), FLOAT64

    def __add__(self, other):
        a, b, backend = self._coerce_pair(other)
        return DenseMatrix(a + b, backend)

    def __sub__(self, other):
        a, b, backend = self._coerce_pair(other)
        return DenseMatrix(a - b, backend)

    def __neg__(self):
        return DenseMatrix(-self._data, self._backend)

    def __matmul__(self, other):
        a, b, backend = self._coerce_pair(other)
        if a.shape[1] != b.shape[0]:
            raise DimensionMismatchError(f"cannot multiply {a.shape} by {b.shape}")
        if backend == RATIONAL:
            return DenseMatrix(_exact_matmul(a, b), RATIONAL)
        return DenseMatrix(a @ b, FLOAT64)

    def scale(self, factor):
        """Multiply by a scalar; exact factors keep the rational backend."""
        if self.is_exact and not isinstance(factor, float):
            return DenseMatrix(self._data * exact_scalar(factor), RATIONAL)
        return DenseMatrix(self.to_numpy() * factor, FLOAT64)

    @property
    def T(self):
        return DenseMatrix(self._data.T, self._backend)

    def conj(self):
        if self.is_exact:
            return DenseMatrix(exact_conj(self._data), RATIONAL)
        return DenseMatrix(np.conj(self._data), FLOAT64)

    @property
    def H(self):
        return self.conj().T

    def trace(self):
        check_square(self.shape)
        if self.is_exact:
            total = _ZERO
            for i in range(self.rows):
                total = total + self._data[i, i]
            return total
        return complex(np.trace(self._data))

    def real_trace(self):
        """Real part of the trace as a float."""
        t = self.trace()
        return float(Fraction(str(t.x))) if self.is_exact else float(t.real)

    def is_hermitian(self, tol=HERMITIAN_TOL):
        if self.rows != self.cols:
            return False
        if self.is_exact:
            return exact_equal(self._data, exact_conj(self._data).T)
        arr = self._data
        scale = max(1.0, float(np.max(np.abs(arr))) if arr.size else 1.0)
        return bool(np.max(np.abs(arr - arr.conj().T), initial=0.0) <= tol * scale)


def _exact_matmul(a, b):
    out = exact_zeros((a.shape[0], b.shape[1]))
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            acc = _ZERO
            for k in range(a.shape[1]):
                x, y = a[i, k], b[k, j]
                if not (_is_zero_exact(x) or _is_zero_exact(y)):
                    acc = acc + x * y
            out[i, j] = acc
    return out


def as_matrix(M):
    """Coerce ``M`` to :class:`DenseMatrix` (object arrays become rational)."""
    if isinstance(M, DenseMatrix):
        return M
    if isinstance(M, BipartiteState):
        return M.matrix
    return DenseMatrix(M)


def kron(A, B):
    """Kronecker product; block ``(i, j)`` equals ``A[i, j] * B``."""
    A, B = as_matrix(A), as_matrix(B)
    if A.is_exact and B.is_exact:
        return DenseMatrix(np.kron(A.data, B.data), RATIONAL)
    return DenseMatrix(np.kron(A.to_numpy(), B.to_numpy()), FLOAT64)


def partial_transpose(M, dim_a, dim_b, subsystem="A"):
    """Transpose one tensor factor of a bipartite matrix.

    For ``subsystem="A"`` the outer (block) indices are swapped, so
    ``output[(j, k), (i, l)] = M[(i, k), (j, l)]`` and
    ``partial_transpose(kron(A, B)) == kron(A.T, B)``.  ``"B"`` swaps the
    inner indices instead.
    """
    M = as_matrix(M)
    check_square(M.shape)
    dim_a, dim_b = check_bipartite_side(M.rows, dim_a, dim_b)
    t = M.data.reshape(dim_a, dim_b, dim_a, dim_b)
    if subsystem in ("A", "a", 0):
        t = t.transpose(2, 1, 0, 3)
    elif subsystem in ("B", "b", 1):
        t = t.transpose(0, 3, 2, 1)
    else:
        raise ValueError(f"subsystem must be 'A' or 'B', got {subsystem!r}")
    return DenseMatrix(t.reshape(dim_a * dim_b, dim_a * dim_b), M.backend)


def realign(M, dim_a, dim_b):
    """Reshuffled matrix ``R[(i, j), (k, l)] = M[(i, k), (j, l)]``."""
    M = as_matrix(M)
    check_square(M.shape)
    dim_a, dim_b = check_bipartite_side(M.rows, dim_a, dim_b)
    t = M.data.reshape(dim_a, dim_b, dim_a, dim_b).transpose(0, 2, 1, 3)
    return DenseMatrix(t.reshape(dim_a * dim_a, dim_b * dim_b), M.backend)


def hermitian_eigenvalues(M, tol=HERMITIAN_TOL):
    """All eigenvalues of a Hermitian matrix in ascending order.

    Raises
    ------
    NotHermitianError
        If ``M`` deviates from its conjugate transpose by more than ``tol``
        (relative to its largest entry).  Exact matrices must be exactly
        Hermitian.
    """
    M = as_matrix(M)
    check_square(M.shape, "Hermitian matrix")
    if not M.is_hermitian(tol):
        raise NotHermitianError("matrix is not Hermitian within tolerance")
    arr = M.to_numpy()
    arr = 0.5 * (arr + arr.conj().T)
    return np.linalg.eigvalsh(arr)


@dataclass(frozen=True)
class PsdVerdict:
    """Outcome of :func:`is_psd`; ``min_eigenvalue`` is the evidence."""

    psd: bool
    min_eigenvalue: float
    tol: float

    def __bool__(self):
        return self.psd

    @property
    def label(self):
        return "psd" if self.psd else "not_psd"


def is_psd(M, tol=PSD_TOL):
    """Eigenvalue-based PSD test: psd iff the smallest eigenvalue is >= -tol."""
    tol = check_tol(tol)
    eigs = hermitian_eigenvalues(M)
    lo = float(eigs[0]) if eigs.size else 0.0
    return PsdVerdict(lo >= -tol, lo, tol)


def numerical_rank(M, tol=RANK_TOL):
    """Number of singular values above ``tol`` times the largest one."""
    tol = check_tol(tol)
    arr = as_matrix(M).to_numpy()
    if arr.size == 0:
        return 0
    sv = np.linalg.svd(arr, compute_uv=False)
    if sv[0] == 0:
        return 0
    return int(np.sum(sv > tol * sv[0]))


@dataclass(frozen=True)
class BipartiteState:
    """A PSD matrix on ``C^dim_a (x) C^dim_b`` (not necessarily normalized).

    Construction validates the side length, Hermiticity and positivity
    (smallest eigenvalue >= ``-psd_tol``).
    """

    matrix: DenseMatrix
    dim_a: int
    dim_b: int
    psd_tol: float = PSD_TOL
    trace: float = field(init=False, repr=False)

    def __post_init__(self):
        matrix = as_matrix(self.matrix)
        object.__setattr__(self, "matrix", matrix)
        check_square(matrix.shape, "state")
        dim_a, dim_b = check_bipartite_side(matrix.rows, self.dim_a, self.dim_b, "state")
        object.__setattr__(self, "dim_a", dim_a)
        object.__setattr__(self, "dim_b", dim_b)
        verdict = is_psd(matrix, self.psd_tol)
        if not verdict.psd:
            raise ValueError(
                f"state is not positive semidefinite (min eigenvalue {verdict.min_eigenvalue:.3e})"
            )
        object.__setattr__(self, "trace", matrix.real_trace())

    @property
    def side(self):
        return self.matrix.rows

    @property
    def cut(self):
        return (self.dim_a, self.dim_b)

    def with_cut(self, dim_a, dim_b):
        """Same matrix read in another tensor factorization."""
        return BipartiteState(self.matrix, dim_a, dim_b, self.psd_tol)

    def normalized(self):
        """Float copy scaled to unit trace."""
        if self.trace <= 0:
            raise ValueError("cannot normalize a state with non-positive trace")
        arr = self.matrix.to_numpy() / self.trace
        return BipartiteState(DenseMatrix(arr, FLOAT64), self.dim_a, self.dim_b, self.psd_tol)
