from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pptsquare._validation import DimensionMismatchError, NotHermitianError
from pptsquare.matrix import (
    FLOAT64,
    RATIONAL,
    BipartiteState,
    DenseMatrix,
    exact_scalar,
    hermitian_eigenvalues,
    is_psd,
    kron,
    numerical_rank,
    partial_transpose,
    realign,
)
from reference_displays import KRON_A, KRON_B, MAX_ENT_INPUT, MAX_ENT_PT

small_frac = st.fractions(min_value=-5, max_value=5, max_denominator=7)


def rational_matrices(rows, cols):
    return st.lists(
        st.lists(small_frac, min_size=cols, max_size=cols), min_size=rows, max_size=rows
    ).map(DenseMatrix.rational)


# ---- DenseMatrix basics ----------------------------------------------------


def test_backend_inference_and_shape():
    R = DenseMatrix.rational([[1, Fraction(1, 2)], [0, 3]])
    assert R.backend == RATIONAL and R.is_exact and R.shape == (2, 2)
    Fm = DenseMatrix([[1.0, 2.0]])
    assert Fm.backend == FLOAT64 and (Fm.rows, Fm.cols) == (1, 2)
    assert len(R.entries) == 4


def test_rational_equality_is_exact_and_float_equality_refuses():
    A = DenseMatrix.rational([[Fraction(1, 3)]])
    assert A == DenseMatrix.rational([[Fraction(1, 3)]])
    assert not A == DenseMatrix.rational([[Fraction(1, 3) + Fraction(1, 10**30)]])
    with pytest.raises(TypeError):
        _ = DenseMatrix([[1.0]]) == DenseMatrix([[1.0]])


def test_rational_to_float_is_total():
    A = DenseMatrix.rational([[Fraction(1, 3), (1, 2)]])
    f = A.to_float()
    assert f.backend == FLOAT64
    assert np.allclose(f.to_numpy(), [[1 / 3, 1 + 2j]])


def test_immutability():
    A = DenseMatrix([[1.0, 2.0], [3.0, 4.0]])
    with pytest.raises(ValueError):
        A.data[0, 0] = 5.0


def test_exact_scalar_parsing():
    assert exact_scalar("3/4") == exact_scalar(Fraction(3, 4))
    assert exact_scalar(0.5) == exact_scalar(Fraction(1, 2))


# ---- kron ------------------------------------------------------------------


def test_kron_identity():
    I2 = DenseMatrix.identity(2, RATIONAL)
    assert kron(I2, I2) == DenseMatrix.identity(4, RATIONAL)


def test_kron_block_definition_on_reference_factors():
    A = DenseMatrix.rational(KRON_A)
    B = DenseMatrix.rational(KRON_B)
    K = kron(A, B)
    assert K.shape == (6, 6)
    for i in range(3):
        for j in range(3):
            for k in range(2):
                for l in range(2):
                    assert K.data[2 * i + k, 2 * j + l] == exact_scalar(KRON_A[i][j] * KRON_B[k][l])


def test_kron_entrywise_oracle_random():
    rng = np.random.default_rng(3)
    A = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    B = rng.standard_normal((2, 2))
    K = kron(DenseMatrix(A), DenseMatrix(B)).to_numpy()
    assert K.shape == (6, 4)
    for i in range(3):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    assert K[2 * i + k, 2 * j + l] == pytest.approx(A[i, j] * B[k, l], abs=1e-15)


@given(rational_matrices(2, 2), rational_matrices(2, 1), rational_matrices(1, 2))
def test_kron_associative_exact(A, B, C):
    assert kron(kron(A, B), C) == kron(A, kron(B, C))


# ---- partial transpose -----------------------------------------------------


def test_partial_transpose_of_kron_is_transposed_factor():
    A = DenseMatrix.rational([[1, 2, 3], [4, 5, 6], [7, 8, 9]])
    B = DenseMatrix.rational([[0, 1], [-1, 2]])
    assert partial_transpose(kron(A, B), 3, 2, "A") == kron(A.T, B)
    assert partial_transpose(kron(A, B), 3, 2, "B") == kron(A, B.T)


def test_partial_transpose_index_rule():
    rng = np.random.default_rng(0)
    M = rng.standard_normal((6, 6))
    P = partial_transpose(DenseMatrix(M), 2, 3, "A").to_numpy()
    for i in range(2):
        for j in range(2):
            for k in range(3):
                for l in range(3):
                    assert P[j * 3 + k, i * 3 + l] == M[i * 3 + k, j * 3 + l]


def test_transpose_example_partial_transpose():
    M = DenseMatrix.rational(MAX_ENT_INPUT)
    assert partial_transpose(M, 2, 2, "B") == DenseMatrix.rational(MAX_ENT_PT)


@given(rational_matrices(6, 6), st.sampled_from(["A", "B"]))
def test_partial_transpose_involution_and_trace(M, sub):
    P = partial_transpose(M, 2, 3, sub)
    assert partial_transpose(P, 2, 3, sub) == M
    assert P.trace() == M.trace()


@given(rational_matrices(4, 4))
def test_pt_a_equals_full_transpose_of_pt_b(M):
    assert partial_transpose(M, 2, 2, "A") == partial_transpose(M, 2, 2, "B").T


def test_partial_transpose_dimension_errors():
    with pytest.raises(DimensionMismatchError):
        partial_transpose(DenseMatrix(np.eye(6)), 2, 2)
    with pytest.raises(ValueError):
        partial_transpose(DenseMatrix(np.eye(4)), 2, 2, "C")


def test_realign_index_rule():
    rng = np.random.default_rng(1)
    M = rng.standard_normal((6, 6))
    R = realign(DenseMatrix(M), 2, 3).to_numpy()
    assert R.shape == (4, 9)
    for i in range(2):
        for j in range(2):
            for k in range(3):
                for l in range(3):
                    assert R[i * 2 + j, k * 3 + l] == M[i * 3 + k, j * 3 + l]


# ---- spectra ---------------------------------------------------------------


def test_eigenvalues_of_swap_pattern():
    eig = hermitian_eigenvalues(DenseMatrix.rational(MAX_ENT_PT))
    # characteristic polynomial (x-1)^3 (x+1)
    assert np.allclose(eig, [-1, 1, 1, 1], atol=1e-12)


def test_eigenvalues_diagonal():
    assert np.allclose(hermitian_eigenvalues(DenseMatrix(np.diag([3.0, 1.0, 2.0]))), [1, 2, 3])


def test_eigenvalues_trace_and_determinant_oracle():
    rng = np.random.default_rng(7)
    G = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    H = G + G.conj().T
    eig = hermitian_eigenvalues(DenseMatrix(H))
    assert np.all(np.diff(eig) >= 0)
    assert np.sum(eig) == pytest.approx(np.trace(H).real, rel=1e-9)
    assert np.prod(eig) == pytest.approx(np.linalg.det(H).real, rel=1e-9)


def test_non_hermitian_rejected():
    with pytest.raises(NotHermitianError):
        hermitian_eigenvalues(DenseMatrix([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(NotHermitianError):
        hermitian_eigenvalues(DenseMatrix.rational([[0, 1], [0, 0]]))


def test_is_psd_verdicts():
    good = is_psd(DenseMatrix.rational(MAX_ENT_INPUT))
    assert good.psd and good.label == "psd"
    bad = is_psd(DenseMatrix.rational(MAX_ENT_PT))
    assert not bad and bad.label == "not_psd"
    assert bad.min_eigenvalue == pytest.approx(-1, abs=1e-10)
    ident = is_psd(DenseMatrix.identity(3))
    assert ident.psd and ident.min_eigenvalue == pytest.approx(1)


@given(st.integers(0, 10_000))
def test_is_psd_transpose_agreement(seed):
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    H = G + G.conj().T
    assert is_psd(DenseMatrix(H)).psd == is_psd(DenseMatrix(H.T)).psd


def test_numerical_rank():
    ones = DenseMatrix(np.ones((9, 9)))
    assert numerical_rank(ones) == 1
    assert numerical_rank(DenseMatrix(np.zeros((3, 3)))) == 0
    assert numerical_rank(DenseMatrix.identity(4)) == 4


# ---- states ----------------------------------------------------------------


def test_bipartite_state_validation():
    s = BipartiteState(DenseMatrix.rational(MAX_ENT_INPUT), 2, 2)
    assert s.trace == 2 and s.cut == (2, 2)
    assert s.normalized().trace == pytest.approx(1)
    with pytest.raises(ValueError):
        BipartiteState(DenseMatrix.rational(MAX_ENT_PT), 2, 2)
    with pytest.raises(DimensionMismatchError):
        BipartiteState(DenseMatrix.identity(4), 2, 3)
    with pytest.raises(NotHermitianError):
        BipartiteState(DenseMatrix([[1.0, 1.0], [0.0, 1.0]]), 1, 2)
    assert s.with_cut(1, 4).cut == (1, 4)
