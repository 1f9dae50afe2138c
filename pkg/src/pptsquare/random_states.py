"""Seeded random generators for states and maps used by property tests."""

from fractions import Fraction

import numpy as np

from ._validation import check_positive_int
from .channel import ChoiMatrix, LinearMapTensor, map_of_choi
from .matrix import (
    FLOAT64,
    BipartiteState,
    DenseMatrix,
    exact_scalar,
    exact_zeros,
    partial_transpose,
)


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_psd(d, rank=None, rng=None, real=False):
    """Wishart-type ``G G^*`` with ``G`` of shape ``(d, rank)``."""
    rng = _rng(rng)
    rank = d if rank is None else check_positive_int(rank, "rank")
    G = rng.standard_normal((d, rank))
    if not real:
        G = G + 1j * rng.standard_normal((d, rank))
    return G @ G.conj().T


def random_state(dim_a, dim_b, rng=None, rank=None, real=False):
    """Random unit-trace PSD state (generically entangled for full rank G)."""
    rho = random_psd(dim_a * dim_b, rank, rng, real)
    rho = rho / np.trace(rho).real
    return BipartiteState(DenseMatrix(rho, FLOAT64), dim_a, dim_b)


def _pt_min(rho, dim_a, dim_b):
    return np.linalg.eigvalsh(partial_transpose(DenseMatrix(rho), dim_a, dim_b).to_numpy())[0]


def random_ppt_state(dim_a, dim_b, rng=None, max_tries=1000, real=False):
    """Mix a random state with the maximally mixed one until it is PPT.

    The mixing weight ``p`` on the random part is drawn uniformly; states that
    fail the PPT test (margin ``1e-12``) are rejected and redrawn.
    """
    rng = _rng(rng)
    d = dim_a * dim_b
    for _ in range(max_tries):
        rho = random_psd(d, rng=rng, real=real)
        rho = rho / np.trace(rho).real
        p = rng.uniform()
        mixed = p * rho + (1 - p) * np.eye(d) / d
        if _pt_min(mixed, dim_a, dim_b) >= 1e-12:
            return BipartiteState(DenseMatrix(mixed, FLOAT64), dim_a, dim_b)
    raise RuntimeError("no PPT state found within max_tries")


def random_nppt_state(dim_a, dim_b, rng=None, max_tries=1000, real=False):
    """Random state whose partial transpose has a negative eigenvalue (margin 1e-6)."""
    rng = _rng(rng)
    for _ in range(max_tries):
        rank = int(rng.integers(1, 3))
        state = random_state(dim_a, dim_b, rng, rank=rank, real=real)
        if _pt_min(state.matrix.to_numpy(), dim_a, dim_b) < -1e-6:
            return state
    raise RuntimeError("no NPPT state found within max_tries")


def random_separable_state(dim_a, dim_b, rng=None, terms=None, real=False):
    """Convex mixture of random product pure states."""
    rng = _rng(rng)
    terms = dim_a * dim_b if terms is None else check_positive_int(terms, "terms")
    weights = rng.dirichlet(np.ones(terms))
    rho = np.zeros((dim_a * dim_b,) * 2, dtype=float if real else complex)
    for w in weights:
        u = random_psd(dim_a, 1, rng, real)
        v = random_psd(dim_b, 1, rng, real)
        u, v = u / np.trace(u).real, v / np.trace(v).real
        rho = rho + w * np.kron(u, v)
    return BipartiteState(DenseMatrix(rho, FLOAT64), dim_a, dim_b)


def random_cp_map(n, m, rng=None, rank=None, real=True):
    """Map ``M_n -> M_m`` whose Choi matrix is a random PSD matrix."""
    C = random_psd(n * m, rank, rng, real)
    return map_of_choi(ChoiMatrix(DenseMatrix(C, FLOAT64), n, m))


def random_ccp_map(n, m, rng=None, rank=None, real=True):
    """Transpose-composed CP map: its Choi matrix has a PSD partial transpose."""
    C = random_psd(n * m, rank, rng, real)
    C = partial_transpose(DenseMatrix(C, FLOAT64), n, m, "B")
    return map_of_choi(ChoiMatrix(C, n, m))


def random_decomposable_pair(n, m, rng=None, real=True):
    """``(cp_part, ccp_part)`` whose sum is a random decomposable map."""
    rng = _rng(rng)
    return random_cp_map(n, m, rng, real=real), random_ccp_map(n, m, rng, real=real)


def random_rational_tensor(n, m, rng=None, bound=9, denominators=(1, 2, 3, 4, 5, 7),
                           complex_=False):
    """Rational ``(m, m, n, n)`` tensor with small numerators and denominators."""
    rng = _rng(rng)
    shape = (m, m, n, n)
    parts = 2 if complex_ else 1
    num = rng.integers(-bound, bound + 1, size=shape + (parts,))
    den = rng.choice(denominators, size=shape + (parts,))
    vals = exact_zeros(shape)
    for idx in np.ndindex(shape):
        re = Fraction(int(num[idx][0]), int(den[idx][0]))
        im = Fraction(int(num[idx][1]), int(den[idx][1])) if complex_ else 0
        vals[idx] = exact_scalar((re, im))
    return LinearMapTensor(vals)
