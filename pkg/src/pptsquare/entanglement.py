"""Entanglement diagnostics for bipartite states and Choi matrices."""

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from ._validation import (
    DimensionMismatchError,
    check_bipartite_side,
    check_positive_int,
    check_tol,
)
from .channel import (
    ChoiMatrix,
    LinearMapTensor,
    channel_properties,
    choi_of_map,
    compose,
)
from .matrix import (
    PSD_TOL,
    RANK_TOL,
    BipartiteState,
    DenseMatrix,
    as_matrix,
    exact_parts,
    hermitian_eigenvalues,
    numerical_rank,
    partial_transpose,
    realign,
)

COMPLETELY_POSITIVE = "completely_positive"
COMPLETELY_COPOSITIVE = "completely_copositive"
DECOMPOSABLE_SUM = "decomposable_sum"
INDECOMPOSABLE_CANDIDATE = "indecomposable_candidate"
UNVERIFIED = "unverified"
CLASSIFICATIONS = (
    COMPLETELY_POSITIVE,
    COMPLETELY_COPOSITIVE,
    DECOMPOSABLE_SUM,
    INDECOMPOSABLE_CANDIDATE,
    UNVERIFIED,
)

EB_CERTIFIED = "eb_certified"
NOT_EB_CERTIFIED = "not_eb_certified"
UNDECIDED = "undecided"

# Cuts where PPT is equivalent to separability.
_EXACT_CUTS = {(2, 2), (2, 3), (3, 2)}


def _min_eig(M):
    eigs = hermitian_eigenvalues(M)
    return float(eigs[0]) if eigs.size else 0.0


def _cut_of(obj, dim_a=None, dim_b=None):
    """Return ``(matrix, dim_a, dim_b)`` for a state, Choi matrix or raw matrix."""
    if isinstance(obj, (BipartiteState, ChoiMatrix)):
        return obj.matrix, obj.dim_a, obj.dim_b
    M = as_matrix(obj)
    if dim_a is None or dim_b is None:
        raise ValueError("dim_a and dim_b are required for a bare matrix")
    dim_a, dim_b = check_bipartite_side(M.rows, dim_a, dim_b)
    return M, dim_a, dim_b


# --------------------------------------------------------------------------
# witnesses


@dataclass(frozen=True)
class Witness:
    """A map used in pairing batteries, with a checked classification.

    ``decomposable_sum`` witnesses carry ``cp_part`` and ``ccp_part`` whose sum
    must equal ``map``.  ``indecomposable_candidate`` and ``unverified`` are
    labels only; screening them is the caller's job (see
    :func:`positivity_heuristic`).
    """

    map: LinearMapTensor
    classification: str = UNVERIFIED
    provenance: str = ""
    cp_part: LinearMapTensor = None
    ccp_part: LinearMapTensor = None
    tol: float = PSD_TOL
    choi: ChoiMatrix = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.classification not in CLASSIFICATIONS:
            raise ValueError(f"unknown classification {self.classification!r}")
        choi = choi_of_map(self.map, role=self.provenance)
        object.__setattr__(self, "choi", choi)
        kind = self.classification
        if kind == COMPLETELY_POSITIVE and _min_eig(choi.matrix) < -self.tol:
            raise ValueError("witness labelled completely_positive has a non-PSD Choi matrix")
        if kind == COMPLETELY_COPOSITIVE and _min_eig(_pt(choi)) < -self.tol:
            raise ValueError("witness labelled completely_copositive has a non-PSD partial transpose")
        if kind == DECOMPOSABLE_SUM:
            if self.cp_part is None or self.ccp_part is None:
                raise ValueError("decomposable_sum witnesses need cp_part and ccp_part")
            Witness(self.cp_part, COMPLETELY_POSITIVE, tol=self.tol)
            Witness(self.ccp_part, COMPLETELY_COPOSITIVE, tol=self.tol)
            total = self.cp_part + self.ccp_part
            same = total == self.map if total.is_exact and self.map.is_exact else None
            if same is None:
                same = total.allclose(self.map, atol=1e-10)
            if not same:
                raise ValueError("cp_part + ccp_part does not equal the witness map")

    @property
    def cut(self):
        return (self.map.in_dim, self.map.out_dim)

    @classmethod
    def decomposable(cls, cp_part, ccp_part, provenance="", tol=PSD_TOL):
        return cls(cp_part + ccp_part, DECOMPOSABLE_SUM, provenance, cp_part, ccp_part, tol)


def _pt(choi):
    return partial_transpose(choi.matrix, choi.dim_a, choi.dim_b, "B")


@dataclass(frozen=True)
class WitnessRegistry:
    """Immutable, ordered collection of labelled witnesses."""

    entries: tuple = ()

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    @property
    def labels(self):
        return [label for label, _ in self.entries]

    def for_cut(self, dim_a, dim_b):
        return [(label, w) for label, w in self.entries if w.cut == (dim_a, dim_b)]


def load_registry(directory):
    """Load witnesses listed in ``directory/manifest.json``.

    The manifest holds ``{"witnesses": [{"file", "label", "classification",
    "provenance", "cp_part"?, "ccp_part"?}, ...]}``; every file is in the map
    interchange format.
    """
    from .io import read_map

    directory = Path(directory)
    manifest = json.loads((directory / "manifest.json").read_text())
    entries = []
    for item in manifest["witnesses"]:
        phi = read_map(directory / item["file"])
        cp = read_map(directory / item["cp_part"]) if "cp_part" in item else None
        ccp = read_map(directory / item["ccp_part"]) if "ccp_part" in item else None
        w = Witness(phi, item["classification"], item.get("provenance", ""), cp, ccp)
        entries.append((item["label"], w))
    return WitnessRegistry(tuple(entries))


def default_registry():
    """Witnesses shipped with the package."""
    with resources.as_file(resources.files("pptsquare") / "witnesses") as path:
        return load_registry(path)


# --------------------------------------------------------------------------
# PPT and pairing


@dataclass(frozen=True)
class PptVerdict:
    is_positive: bool
    is_ppt: bool
    min_eig_state: float
    min_eig_pt: float
    cut: tuple

    def as_dict(self):
        return {
            "is_positive": self.is_positive,
            "is_ppt": self.is_ppt,
            "min_eig_state": self.min_eig_state,
            "min_eig_pt": self.min_eig_pt,
            "cut": list(self.cut),
        }


def ppt_test(state, tol=PSD_TOL, dim_a=None, dim_b=None, subsystem="A"):
    """PSD and partial-transpose eigenvalue evidence for a bipartite matrix.

    ``is_ppt`` reports positivity of the partial transpose alone;
    ``is_positive`` is evaluated on the same matrix.  Non-PSD Choi matrices
    and bare matrices (with explicit dimensions) are accepted too.
    """
    tol = check_tol(tol)
    M, dim_a, dim_b = _cut_of(state, dim_a, dim_b)
    lo = _min_eig(M)
    lo_pt = _min_eig(partial_transpose(M, dim_a, dim_b, subsystem))
    return PptVerdict(lo >= -tol, lo_pt >= -tol, lo, lo_pt, (dim_a, dim_b))


def pairing(state, witness):
    """``tr(rho C^T)`` where ``C`` is the witness's Choi matrix.

    Exact (a :class:`~fractions.Fraction`) when both sides are rational,
    otherwise a float.  Only the real part is returned; it is the full value
    for Hermitian inputs.
    """
    M, dim_a, dim_b = _cut_of(state)
    if witness.cut != (dim_a, dim_b):
        raise DimensionMismatchError(
            f"witness acts on cut {witness.cut}, state has cut {(dim_a, dim_b)}"
        )
    C = witness.choi.matrix
    if M.is_exact and C.is_exact:
        # tr(rho C^T) = sum_ij rho_ij C_ij
        total = np.sum(M.data * C.data)
        return exact_parts(total)[0]
    return float(np.sum(M.to_numpy() * C.to_numpy()).real)


def schmidt_rank(vec, dim_a, dim_b, tol=RANK_TOL):
    """Rank of the ``dim_a x dim_b`` reshaping of a pure-state vector."""
    v = np.asarray(vec)
    if v.ndim != 1:
        v = v.reshape(-1)
    if v.size != dim_a * dim_b:
        raise DimensionMismatchError(f"vector length {v.size} != {dim_a}*{dim_b}")
    return numerical_rank(DenseMatrix(v.astype(complex).reshape(dim_a, dim_b)), tol)


@dataclass(frozen=True)
class RealignmentResult:
    ccnr_value: float
    detects: bool
    tol: float

    def as_dict(self):
        return {"ccnr_value": self.ccnr_value, "detects": self.detects, "tol": self.tol}


def realignment_test(state, tol=PSD_TOL, dim_a=None, dim_b=None):
    """Computable cross-norm (realignment) screen on the trace-normalized matrix."""
    tol = check_tol(tol)
    M, dim_a, dim_b = _cut_of(state, dim_a, dim_b)
    tr = M.real_trace()
    if not tr > 0:
        raise ValueError("realignment needs a matrix with positive trace")
    R = realign(M, dim_a, dim_b).to_numpy() / tr
    value = float(np.linalg.svd(R, compute_uv=False).sum())
    return RealignmentResult(value, value > 1 + tol, tol)


# --------------------------------------------------------------------------
# entanglement breaking


@dataclass(frozen=True)
class EbVerdict:
    label: str
    reason: str
    ppt: PptVerdict
    ccnr: RealignmentResult = None
    pairings: tuple = ()

    def __str__(self):
        return self.label

    def as_dict(self):
        return {
            "label": self.label,
            "reason": self.reason,
            "ppt": self.ppt.as_dict(),
            "ccnr": None if self.ccnr is None else self.ccnr.as_dict(),
            "pairings": [[label, float(v)] for label, v in self.pairings],
        }


def eb_test(choi, tol=PSD_TOL, registry=None):
    """Decide whether a Choi matrix is separable where that is decidable.

    In cuts 2x2, 2x3, 3x2 (and whenever one factor is trivial) separability is
    equivalent to PPT.  Elsewhere a state is reported ``not_eb_certified`` only
    on positive evidence of entanglement (NPPT, a negative witness pairing or a
    realignment violation) and ``undecided`` otherwise; separability is never
    claimed there.
    """
    tol = check_tol(tol)
    M, dim_a, dim_b = _cut_of(choi)
    verdict = ppt_test(M, tol, dim_a, dim_b)
    if not verdict.is_positive:
        return EbVerdict(NOT_EB_CERTIFIED, "choi_not_psd", verdict)
    if M.real_trace() <= tol:
        # PSD with vanishing trace: the zero matrix, trivially separable.
        return EbVerdict(EB_CERTIFIED, "zero_matrix", verdict)
    if min(dim_a, dim_b) == 1 or (dim_a, dim_b) in _EXACT_CUTS:
        if verdict.is_ppt:
            return EbVerdict(EB_CERTIFIED, "ppt_in_exact_cut", verdict)
        return EbVerdict(NOT_EB_CERTIFIED, "nppt", verdict)
    if not verdict.is_ppt:
        return EbVerdict(NOT_EB_CERTIFIED, "nppt", verdict)
    pairs = []
    if registry is not None:
        unit = ChoiMatrix(M.to_float().scale(1.0 / M.real_trace()), dim_a, dim_b)
        for label, w in registry.for_cut(dim_a, dim_b):
            pairs.append((label, float(pairing(unit, w))))
    ccnr = realignment_test(M, tol, dim_a, dim_b)
    if any(v < -tol for _, v in pairs):
        return EbVerdict(NOT_EB_CERTIFIED, "negative_pairing", verdict, ccnr, tuple(pairs))
    if ccnr.detects:
        return EbVerdict(NOT_EB_CERTIFIED, "realignment", verdict, ccnr, tuple(pairs))
    return EbVerdict(UNDECIDED, "no_screen_fired", verdict, ccnr, tuple(pairs))


@dataclass(frozen=True)
class EbIndexResult:
    """``status`` is ``found``, ``not_found_within`` or ``undecided_at``."""

    status: str
    k: int = None
    k_max: int = None
    undecided: tuple = ()
    verdicts: tuple = ()

    def __str__(self):
        if self.status == "found":
            return f"found({self.k})"
        if self.status == "not_found_within":
            return f"not_found_within({self.k_max})"
        return f"undecided_at({list(self.undecided)})"


def eb_index(phi, k_max, tol=PSD_TOL, registry=None):
    """Smallest ``k <= k_max`` with ``phi^k`` entanglement breaking, if certifiable."""
    k_max = check_positive_int(k_max, "k_max")
    if phi.in_dim != phi.out_dim:
        raise DimensionMismatchError("EB index needs a map M_n -> M_n")
    if not channel_properties(phi, tol).is_cp:
        raise ValueError("EB index is defined for completely positive maps only")
    power = phi
    verdicts = []
    undecided = []
    for k in range(1, k_max + 1):
        if k > 1:
            power = compose(phi, power)
        v = eb_test(choi_of_map(power), tol, registry)
        verdicts.append(v)
        if v.label == EB_CERTIFIED:
            return EbIndexResult("found", k, k_max, tuple(undecided), tuple(verdicts))
        if v.label == UNDECIDED:
            undecided.append(k)
    status = "undecided_at" if undecided else "not_found_within"
    return EbIndexResult(status, None, k_max, tuple(undecided), tuple(verdicts))


# --------------------------------------------------------------------------
# positivity screening


@dataclass(frozen=True)
class PositivityResult:
    min_value: float
    witness_pair: tuple

    def certifies_not_positive(self, tol=PSD_TOL):
        return self.min_value < -tol


def _herm(A):
    return 0.5 * (A + A.conj().T)


def _unit(rng, n):
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return z / np.linalg.norm(z)


def positivity_heuristic(phi, restarts=30, iters=200, seed=0):
    """Approximate ``min <v| phi(u u^*) |v>`` over unit vectors ``u``, ``v``.

    Alternates exact minimisation in ``v`` (smallest eigenvector of
    ``phi(u u^*)``) and in ``u`` (smallest eigenvector of the dual form).  For
    maps that do not preserve Hermiticity the real part is minimised.  A
    clearly negative value certifies that ``phi`` is not positive; a
    non-negative one is only evidence.
    """
    restarts = check_positive_int(restarts, "restarts")
    iters = check_positive_int(iters, "iters")
    c = phi.to_numpy().astype(complex)
    n, m = phi.in_dim, phi.out_dim
    best = (np.inf, None, None)
    for child in np.random.SeedSequence(seed).spawn(restarts):
        rng = np.random.default_rng(child)
        u = _unit(rng, n)
        value = np.inf
        for _ in range(iters):
            A = _herm(np.einsum("klij,i,j->kl", c, u, u.conj()))
            w, V = np.linalg.eigh(A)
            v = V[:, 0]
            G = np.einsum("k,l,klij->ij", v.conj(), v, c)
            w, U = np.linalg.eigh(_herm(G.T))
            u = U[:, 0]
            new = float(w[0])
            if value - new < 1e-15:
                value = min(value, new)
                break
            value = new
        if value < best[0]:
            best = (value, u, v)
    value, u, v = best
    return PositivityResult(value, (u, v))
