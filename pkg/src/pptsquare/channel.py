"""Linear maps between matrix algebras and their Choi matrices.

A map ``phi: M_n -> M_m`` is stored as a coefficient tensor ``c`` of shape
``(m, m, n, n)``: output entry ``(k, l)`` is ``sum_ij c[k, l, i, j] * X[i, j]``.
The Choi matrix uses the block convention ``C[(i, k), (j, l)] = c[k, l, i, j]``,
i.e. block ``(i, j)`` is ``phi(e_ij)``.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._validation import (
    DimensionMismatchError,
    NotHermitianError,
    check_bipartite_side,
    check_map_shape,
    check_positive_int,
    check_square,
    check_tol,
)
from .matrix import (
    FLOAT64,
    PSD_TOL,
    RATIONAL,
    BipartiteState,
    DenseMatrix,
    as_matrix,
    exact_array,
    exact_conj,
    exact_equal,
    exact_scalar,
    exact_to_float,
    exact_zeros,
    hermitian_eigenvalues,
    partial_transpose,
)


def _freeze(arr):
    arr = np.array(arr, copy=True)
    arr.flags.writeable = False
    return arr


class LinearMapTensor:
    """Immutable coefficient tensor of a linear map ``M_n -> M_m``.

    Parameters
    ----------
    coeffs : array-like of shape (m, m, n, n)
        ``coeffs[k, l, i, j]`` multiplies input entry ``(i, j)`` in output
        entry ``(k, l)``.
    backend : {"float64", "rational"}, optional
        Inferred from the dtype when omitted.  Float tensors stay real unless
        complex coefficients are supplied.
    """

    __slots__ = ("_coeffs", "_backend")

    def __init__(self, coeffs, backend=None):
        if isinstance(coeffs, LinearMapTensor):
            coeffs = coeffs.coeffs
        arr = np.asarray(coeffs)
        if backend is None:
            backend = RATIONAL if arr.dtype == object else FLOAT64
        if backend == RATIONAL:
            arr = exact_array(arr)
        elif backend == FLOAT64:
            if arr.dtype == object:
                arr = exact_to_float(exact_array(arr))
            elif np.iscomplexobj(arr):
                arr = arr.astype(np.complex128)
            else:
                arr = arr.astype(np.float64)
        else:
            raise ValueError(f"unknown backend {backend!r}")
        check_map_shape(arr.shape)
        self._coeffs = _freeze(arr)
        self._backend = backend

    @property
    def coeffs(self):
        return self._coeffs

    @property
    def backend(self):
        return self._backend

    @property
    def is_exact(self):
        return self._backend == RATIONAL

    @property
    def in_dim(self):
        return self._coeffs.shape[2]

    @property
    def out_dim(self):
        return self._coeffs.shape[0]

    def to_float(self):
        if not self.is_exact:
            return self
        return LinearMapTensor(exact_to_float(self._coeffs), FLOAT64)

    def to_numpy(self):
        if self.is_exact:
            return exact_to_float(self._coeffs)
        return np.array(self._coeffs)

    def as_matrix(self):
        """Coefficients as an ``(m*m, n*n)`` matrix acting on row-major vec(X)."""
        m, n = self.out_dim, self.in_dim
        return self._coeffs.reshape(m * m, n * n)

    def __repr__(self):
        return f"LinearMapTensor(M_{self.in_dim} -> M_{self.out_dim}, backend={self._backend!r})"

    def __eq__(self, other):
        if not isinstance(other, LinearMapTensor):
            return NotImplemented
        if not (self.is_exact and other.is_exact):
            raise TypeError("float64 maps compare only via allclose()")
        return exact_equal(self._coeffs, other._coeffs)

    __hash__ = None

    def allclose(self, other, atol=1e-12):
        if self._coeffs.shape != other.coeffs.shape:
            return False
        return bool(np.allclose(self.to_numpy(), other.to_numpy(), atol=atol, rtol=0.0))

    def __add__(self, other):
        a, b, backend = _coerce_maps(self, other)
        if a.shape != b.shape:
            raise DimensionMismatchError("cannot add maps of different shapes")
        return LinearMapTensor(a + b, backend)

    def __sub__(self, other):
        a, b, backend = _coerce_maps(self, other)
        if a.shape != b.shape:
            raise DimensionMismatchError("cannot subtract maps of different shapes")
        return LinearMapTensor(a - b, backend)

    def __neg__(self):
        return LinearMapTensor(-self._coeffs, self._backend)

    def scale(self, factor):
        if self.is_exact and not isinstance(factor, float):
            return LinearMapTensor(self._coeffs * exact_scalar(factor), RATIONAL)
        return LinearMapTensor(self.to_numpy() * factor, FLOAT64)

    def is_hermiticity_preserving(self, tol=1e-12):
        swapped = self._coeffs.transpose(1, 0, 3, 2)
        if self.is_exact:
            return exact_equal(self._coeffs, exact_conj(swapped))
        return bool(np.max(np.abs(self._coeffs - np.conj(swapped)), initial=0.0) <= tol)


def _coerce_maps(f, g):
    if f.is_exact and g.is_exact:
        return f.coeffs, g.coeffs, RATIONAL
    return f.to_numpy(), g.to_numpy(), FLOAT64


@dataclass(frozen=True)
class ChoiMatrix:
    """Choi matrix of a map ``M_n -> M_m`` on the cut ``n (x) m``.

    Unlike :class:`~pptsquare.matrix.BipartiteState` this is not required to
    be positive: Choi matrices of positive but not completely positive maps
    are indefinite.  Use :meth:`state` for a validated state.
    """

    matrix: DenseMatrix
    dim_a: int
    dim_b: int
    role: str = ""

    def __post_init__(self):
        matrix = as_matrix(self.matrix)
        object.__setattr__(self, "matrix", matrix)
        check_square(matrix.shape, "Choi matrix")
        dims = check_bipartite_side(matrix.rows, self.dim_a, self.dim_b, "Choi matrix")
        object.__setattr__(self, "dim_a", dims[0])
        object.__setattr__(self, "dim_b", dims[1])

    @property
    def in_dim(self):
        return self.dim_a

    @property
    def out_dim(self):
        return self.dim_b

    @property
    def side(self):
        return self.matrix.rows

    @property
    def backend(self):
        return self.matrix.backend

    def state(self, psd_tol=PSD_TOL):
        return BipartiteState(self.matrix, self.dim_a, self.dim_b, psd_tol)

    def to_float(self):
        return ChoiMatrix(self.matrix.to_float(), self.dim_a, self.dim_b, self.role)


def choi_of_map(phi, role=""):
    """Choi matrix ``sum_ij e_ij (x) phi(e_ij)``."""
    n, m = phi.in_dim, phi.out_dim
    arr = phi.coeffs.transpose(2, 0, 3, 1).reshape(n * m, n * m)
    return ChoiMatrix(DenseMatrix(arr, phi.backend), n, m, role)


def map_of_choi(choi, in_dim=None, out_dim=None):
    """Inverse of :func:`choi_of_map`.

    ``choi`` may be a :class:`ChoiMatrix` (dimensions taken from it unless
    overridden) or any square matrix together with ``in_dim`` and ``out_dim``.
    """
    if isinstance(choi, ChoiMatrix):
        in_dim = choi.dim_a if in_dim is None else in_dim
        out_dim = choi.dim_b if out_dim is None else out_dim
        choi = choi.matrix
    M = as_matrix(choi)
    if in_dim is None or out_dim is None:
        raise ValueError("in_dim and out_dim are required for a bare matrix")
    check_square(M.shape, "Choi matrix")
    n, m = check_bipartite_side(M.rows, in_dim, out_dim, "Choi matrix")
    coeffs = M.data.reshape(n, m, n, m).transpose(1, 3, 0, 2)
    return LinearMapTensor(coeffs, M.backend)


def apply(phi, X):
    """``phi(X)`` with ``out[k, l] = sum_ij c[k, l, i, j] X[i, j]``."""
    X = as_matrix(X)
    if X.shape != (phi.in_dim, phi.in_dim):
        raise DimensionMismatchError(
            f"map expects a {phi.in_dim}x{phi.in_dim} input, got {X.rows}x{X.cols}"
        )
    if phi.is_exact and X.is_exact:
        return DenseMatrix(np.einsum("klij,ij->kl", phi.coeffs, X.data), RATIONAL)
    return DenseMatrix(np.einsum("klij,ij->kl", phi.to_numpy(), X.to_numpy()), FLOAT64)


def compose(outer, inner):
    """Tensor of ``outer o inner`` (apply ``inner`` first)."""
    if inner.out_dim != outer.in_dim:
        raise DimensionMismatchError(
            f"cannot compose: inner maps into M_{inner.out_dim}, outer expects M_{outer.in_dim}"
        )
    a, b, backend = _coerce_maps(outer, inner)
    return LinearMapTensor(np.einsum("pqkl,klij->pqij", a, b), backend)


def matrix_unit(n, i, j, backend=RATIONAL):
    arr = np.zeros((n, n), dtype=int)
    arr[i, j] = 1
    return DenseMatrix(arr, backend)


def map_from_function(func, in_dim, backend=RATIONAL):
    """Tabulate a linear function on ``M_in_dim`` by evaluating it on matrix units.

    ``func`` receives a :class:`DenseMatrix` and returns anything
    :class:`DenseMatrix` accepts.
    """
    in_dim = check_positive_int(in_dim, "in_dim")
    images = {}
    for i in range(in_dim):
        for j in range(in_dim):
            images[i, j] = as_matrix(func(matrix_unit(in_dim, i, j, backend)))
    m = images[0, 0].rows
    exact = backend == RATIONAL and all(img.is_exact for img in images.values())
    coeffs = exact_zeros((m, m, in_dim, in_dim)) if exact else None
    if not exact:
        dtype = complex if any(np.iscomplexobj(img.to_numpy()) for img in images.values()) else float
        coeffs = np.zeros((m, m, in_dim, in_dim), dtype=dtype)
    for (i, j), img in images.items():
        if img.shape != (m, m):
            raise DimensionMismatchError("function returned images of inconsistent size")
        coeffs[:, :, i, j] = img.data if exact else img.to_numpy()
    return LinearMapTensor(coeffs, RATIONAL if exact else FLOAT64)


def identity_map(n, backend=RATIONAL):
    return map_from_function(lambda X: X, n, backend)


def transpose_map(n, backend=RATIONAL):
    return map_from_function(lambda X: X.T, n, backend)


def trace_map(n, m=None, weight=1, backend=RATIONAL):
    """``X -> weight * tr(X) * I_m``."""
    m = n if m is None else m
    ident = DenseMatrix.identity(m, backend)

    def func(X):
        tr = X.trace() if backend == RATIONAL else X.trace().real
        return ident.scale(tr).scale(weight)

    return map_from_function(func, n, backend)


def depolarizing_map(n, backend=RATIONAL):
    """Completely depolarizing channel ``X -> tr(X) I_n / n``."""
    return trace_map(n, weight=Fraction(1, n) if backend == RATIONAL else 1.0 / n, backend=backend)


def reduction_map(n, weight=1, backend=RATIONAL):
    """``X -> tr(X) I_n - weight * X``; ``weight=1/2`` gives the 4x4 Choi example."""
    ident = DenseMatrix.identity(n, backend)

    def func(X):
        tr = X.trace() if backend == RATIONAL else X.trace().real
        return ident.scale(tr) - X.scale(weight)

    return map_from_function(func, n, backend)


def generalized_choi_map(a, b, c, backend=RATIONAL):
    """Map on ``M_3``: diagonal mixing with weights ``(a, b, c)`` minus the identity.

    ``X -> diag(a x11 + b x22 + c x33, c x11 + a x22 + b x33,
    b x11 + c x22 + a x33) - X``.
    """
    weights = [[a, b, c], [c, a, b], [b, c, a]]

    def func(X):
        d = [X[i, i] for i in range(3)]
        if backend == RATIONAL:
            diag = exact_zeros((3, 3))
            for k in range(3):
                acc = exact_scalar(0)
                for i in range(3):
                    acc = acc + exact_scalar(weights[k][i]) * d[i]
                diag[k, k] = acc
            return DenseMatrix(diag, RATIONAL) - X
        diag = np.diag([sum(weights[k][i] * d[i] for i in range(3)) for k in range(3)])
        return DenseMatrix(diag, FLOAT64) - X

    return map_from_function(func, 3, backend)


def breuer_hall_map(n=4, backend=RATIONAL):
    """``X -> tr(X) I - X - U X^T U^dagger`` with ``U`` the standard real antisymmetric unitary.

    ``n`` must be even.
    """
    if n % 2:
        raise ValueError("Breuer-Hall maps need an even dimension")
    U = np.zeros((n, n), dtype=int)
    for p in range(0, n, 2):
        U[p, p + 1], U[p + 1, p] = 1, -1
    Um = DenseMatrix(U, backend)
    ident = DenseMatrix.identity(n, backend)

    def func(X):
        tr = X.trace() if backend == RATIONAL else X.trace().real
        return ident.scale(tr) - X - Um @ X.T @ Um.T

    return map_from_function(func, n, backend)


def normalize_trace(phi):
    """Rescale ``phi`` so its Choi matrix has trace ``in_dim``.

    A trace-preserving map has Choi trace ``n``, so this puts an arbitrary
    map on the same footing without imposing trace preservation.
    """
    tr = choi_of_map(phi).matrix.trace()
    if phi.is_exact:
        if tr.x == 0 and tr.y == 0:
            raise ValueError("Choi matrix has zero trace")
        return LinearMapTensor(phi.coeffs * (exact_scalar(phi.in_dim) / tr), RATIONAL)
    if tr == 0:
        raise ValueError("Choi matrix has zero trace")
    return LinearMapTensor(phi.to_numpy() * (phi.in_dim / tr.real if tr.imag == 0 else phi.in_dim / tr), FLOAT64)


@dataclass(frozen=True)
class ChannelProperties:
    is_cp: bool
    is_ccp: bool
    is_ppt_map: bool
    is_trace_preserving: bool
    is_unital: bool
    is_hermiticity_preserving: bool
    min_eig_choi: float
    min_eig_choi_pt: float

    def as_dict(self):
        return dict(self.__dict__)


def _min_eig_or_nan(M):
    try:
        return float(hermitian_eigenvalues(M)[0])
    except NotHermitianError:
        return float("nan")


def _is_identity(M, tol):
    ident = DenseMatrix.identity(M.rows, RATIONAL if M.is_exact else FLOAT64)
    if M.is_exact:
        return M == ident
    return M.allclose(ident, atol=tol)


def channel_properties(phi, tol=PSD_TOL):
    """CP / co-CP / PPT / trace-preservation / unitality flags of a map.

    ``is_cp`` holds iff the Choi matrix is PSD and ``is_ccp`` iff its partial
    transpose (first factor) is PSD, both up to ``tol``.  A non-Hermitian
    Choi matrix is neither; its eigenvalue evidence is reported as NaN.
    """
    tol = check_tol(tol)
    choi = choi_of_map(phi)
    n, m = phi.in_dim, phi.out_dim
    lo = _min_eig_or_nan(choi.matrix)
    lo_pt = _min_eig_or_nan(partial_transpose(choi.matrix, n, m, "A"))
    is_cp = bool(lo >= -tol)
    is_ccp = bool(lo_pt >= -tol)

    # sum_k c[k, k, i, j] must equal delta_ij
    partial = np.einsum("kkij->ij", phi.coeffs)
    tp_matrix = DenseMatrix(partial, phi.backend)
    is_tp = _is_identity(tp_matrix, tol)
    unital = _is_identity(apply(phi, DenseMatrix.identity(n, phi.backend)), tol)
    return ChannelProperties(
        is_cp=is_cp,
        is_ccp=is_ccp,
        is_ppt_map=is_cp and is_ccp,
        is_trace_preserving=is_tp,
        is_unital=unital,
        is_hermiticity_preserving=phi.is_hermiticity_preserving(),
        min_eig_choi=lo,
        min_eig_choi_pt=lo_pt,
    )
