"""Least-squares factorization of a target channel through an intermediate system.

Given the Choi matrix of a map ``M_a -> M_c`` find real maps
``phi1: M_a -> M_b`` and ``phi2: M_b -> M_c`` with ``phi2 o phi1`` equal to
the target (``square_root`` mode forces ``phi1 = phi2``).  Maps are handled in
their "transfer matrix" form ``F[(k, l), (i, j)] = c[k, l, i, j]`` so that
composition is a matrix product and the residual is ``||F2 F1 - T||_F``.
"""

import json
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from ._validation import DimensionMismatchError, check_positive_int, check_tol
from .channel import ChoiMatrix, LinearMapTensor, channel_properties, map_of_choi
from .matrix import PSD_TOL

SQUARE_ROOT = "square_root"
GENERAL_PAIR = "general_pair"
MODES = (SQUARE_ROOT, GENERAL_PAIR)


@dataclass(frozen=True)
class FactorizationProblem:
    """Target Choi matrix of ``M_a -> M_c`` and the chain ``(a, b, c)``.

    ``require_cp`` and ``require_ccp`` are ``(factor1, factor2)`` flag pairs.
    """

    target: ChoiMatrix
    dims: tuple
    mode: str = SQUARE_ROOT
    require_cp: tuple = (False, False)
    require_ccp: tuple = (False, False)

    def __post_init__(self):
        a, b, c = (check_positive_int(d, "dimension") for d in self.dims)
        object.__setattr__(self, "dims", (a, b, c))
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if (self.target.dim_a, self.target.dim_b) != (a, c):
            raise DimensionMismatchError(
                f"target cut {(self.target.dim_a, self.target.dim_b)} does not match (a, c) = {(a, c)}"
            )
        if self.mode == SQUARE_ROOT and not a == b == c:
            raise DimensionMismatchError("square_root mode needs a = b = c")
        for name in ("require_cp", "require_ccp"):
            flags = tuple(bool(f) for f in getattr(self, name))
            if len(flags) != 2:
                raise ValueError(f"{name} must be a pair of flags")
            object.__setattr__(self, name, flags)


@dataclass(frozen=True)
class SolverConfig:
    restarts: int = 64
    max_iters: int = 2000
    residual_tol: float = 1e-8
    psd_penalty_weight: float = 1.0
    penalty_growth: float = 10.0
    max_escalations: int = 5
    polish_iters: int = 50
    constraint_tol: float = PSD_TOL
    distinct_tol: float = 1e-6
    init_scale: float = None
    seed: int = 0
    n_jobs: int = 1
    progress_log: str = None

    def __post_init__(self):
        check_positive_int(self.restarts, "restarts")
        check_positive_int(self.max_iters, "max_iters")
        check_tol(self.residual_tol, "residual_tol")
        if not self.residual_tol > 0:
            raise ValueError("residual_tol must be positive")
        check_positive_int(self.n_jobs, "n_jobs")

    @classmethod
    def from_dict(cls, d):
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown solver config keys: {sorted(unknown)}")
        return cls(**d)


@dataclass(frozen=True)
class FactorizationSolution:
    factor1: LinearMapTensor
    factor2: LinearMapTensor
    residual: float
    constraint_violations: dict = field(default_factory=dict)
    accepted: bool = False
    restart: int = -1

    def as_dict(self):
        from .io import map_to_dict

        return {
            "residual": self.residual,
            "accepted": self.accepted,
            "restart": self.restart,
            "constraint_violations": self.constraint_violations,
            "factor1": map_to_dict(self.factor1),
            "factor2": map_to_dict(self.factor2),
        }


# --------------------------------------------------------------------------
# residual


def _transfer(phi):
    n, m = phi.in_dim, phi.out_dim
    return phi.to_numpy().reshape(m * m, n * n)


def _target_transfer(target):
    return _transfer(map_of_choi(target))


@dataclass(frozen=True)
class ResidualResult:
    """``value = ||choi(f2 o f1) - target||_F^2``.

    ``grad1``/``grad2`` have the shapes of the factor tensors; their real parts
    are derivatives with respect to the real parts of the coefficients and
    their imaginary parts with respect to the imaginary parts.
    """

    value: float
    grad1: np.ndarray
    grad2: np.ndarray

    @property
    def gradient(self):
        return np.concatenate([self.grad1.ravel(), self.grad2.ravel()])


def composition_residual(factor1, factor2, target):
    a, c = target.dim_a, target.dim_b
    b = factor1.out_dim
    if factor1.in_dim != a or factor2.in_dim != b or factor2.out_dim != c:
        raise DimensionMismatchError(
            f"chain {factor1.in_dim}->{factor1.out_dim}, {factor2.in_dim}->{factor2.out_dim} "
            f"does not match target {a}->{c}"
        )
    F1, F2 = _transfer(factor1), _transfer(factor2)
    R = F2 @ F1 - _target_transfer(target)
    value = float(np.vdot(R, R).real)
    g1 = 2 * F2.conj().T @ R
    g2 = 2 * R @ F1.conj().T
    if not (np.iscomplexobj(g1) and np.any(g1.imag)):
        g1 = g1.real
    if not (np.iscomplexobj(g2) and np.any(g2.imag)):
        g2 = g2.real
    return ResidualResult(value, g1.reshape(factor1.coeffs.shape), g2.reshape(factor2.coeffs.shape))


# --------------------------------------------------------------------------
# penalties on a transfer matrix


def _choi_of_transfer(F, n, m):
    # F[(k,l),(i,j)] -> C[(i,k),(j,l)]
    return F.reshape(m, m, n, n).transpose(2, 0, 3, 1).reshape(n * m, n * m)


def _transfer_of_choi(C, n, m):
    return C.reshape(n, m, n, m).transpose(1, 3, 0, 2).reshape(m * m, n * n)


def _pt_b(C, n, m):
    return C.reshape(n, m, n, m).transpose(0, 3, 2, 1).reshape(n * m, n * m)


def _neg_eig_penalty(S):
    """``sum min(lam, 0)^2`` of the symmetric part and its gradient wrt ``S``."""
    H = 0.5 * (S + S.T)
    w, V = np.linalg.eigh(H)
    neg = np.minimum(w, 0.0)
    value = float(neg @ neg)
    grad = (V * (2 * neg)) @ V.T
    return value, grad, float(w[0])


def _penalty(F, n, m, cp, ccp):
    """Penalty and gradient (transfer shape) for one real factor."""
    if not (cp or ccp):
        return 0.0, np.zeros_like(F)
    C = _choi_of_transfer(F, n, m)
    value = 0.0
    gC = np.zeros_like(C)
    if cp:
        v, g, _ = _neg_eig_penalty(C)
        value += v
        gC += g
    if ccp:
        v, g, _ = _neg_eig_penalty(_pt_b(C, n, m))
        value += v
        gC += _pt_b(g, n, m)
    # keep the Choi matrix symmetric so eigenvalue constraints are meaningful
    K = C - C.T
    value += 0.25 * float(np.sum(K * K))
    gC += K
    return value, _transfer_of_choi(gC, n, m)


def _violations(F, n, m):
    C = _choi_of_transfer(F, n, m)
    H = 0.5 * (C + C.T)
    P = _pt_b(H, n, m)
    return float(np.linalg.eigvalsh(H)[0]), float(np.linalg.eigvalsh(P)[0])


# --------------------------------------------------------------------------
# solver


class _Objective:
    def __init__(self, problem, weight):
        a, b, c = problem.dims
        self.a, self.b, self.c = a, b, c
        self.square = problem.mode == SQUARE_ROOT
        self.T = _target_transfer(problem.target).real.astype(float)
        self.n1 = b * b * a * a
        self.weight = weight
        cp, ccp = problem.require_cp, problem.require_ccp
        if self.square:
            self.flags1 = (cp[0] or cp[1], ccp[0] or ccp[1])
            self.flags2 = (False, False)
        else:
            self.flags1 = (cp[0], ccp[0])
            self.flags2 = (cp[1], ccp[1])
        self.constrained = any(self.flags1) or any(self.flags2)

    def split(self, x):
        a, b, c = self.a, self.b, self.c
        F1 = x[: self.n1].reshape(b * b, a * a)
        F2 = F1 if self.square else x[self.n1:].reshape(c * c, b * b)
        return F1, F2

    def residual(self, x):
        F1, F2 = self.split(x)
        return F2 @ F1 - self.T

    def __call__(self, x):
        F1, F2 = self.split(x)
        R = F2 @ F1 - self.T
        value = float(np.sum(R * R))
        g1 = 2 * F2.T @ R
        g2 = 2 * R @ F1.T
        p1, h1 = _penalty(F1, self.a, self.b, *self.flags1)
        value += self.weight * p1
        g1 = g1 + self.weight * h1
        if self.square:
            return value, (g1 + g2).ravel()
        p2, h2 = _penalty(F2, self.b, self.c, *self.flags2)
        value += self.weight * p2
        g2 = g2 + self.weight * h2
        return value, np.concatenate([g1.ravel(), g2.ravel()])

    def max_violation(self, x, tol):
        """Most negative flagged eigenvalue (0.0 when nothing is flagged)."""
        F1, F2 = self.split(x)
        worst = 0.0
        for F, (n, m), (cp, ccp) in ((F1, (self.a, self.b), self.flags1),
                                     (F2, (self.b, self.c), self.flags2)):
            if not (cp or ccp):
                continue
            lo, lo_pt = _violations(F, n, m)
            asym = float(np.max(np.abs(_choi_of_transfer(F, n, m) - _choi_of_transfer(F, n, m).T)))
            if cp:
                worst = min(worst, lo)
            if ccp:
                worst = min(worst, lo_pt)
            if asym > tol:
                worst = min(worst, -asym)
        return worst

    def jacobian(self, x):
        F1, F2 = self.split(x)
        n_in, n_mid, n_out = F1.shape[1], F1.shape[0], F2.shape[0]
        J1 = np.einsum("pk,ij->pikj", F2, np.eye(n_in)).reshape(n_out * n_in, n_mid * n_in)
        J2 = np.einsum("pq,ki->piqk", np.eye(n_out), F1).reshape(n_out * n_in, n_out * n_mid)
        if self.square:
            return J1 + J2
        return np.hstack([J1, J2])


class _Logger:
    def __init__(self, path):
        self.path = path
        self.lock = threading.Lock()
        if path:
            open(path, "w").close()

    def __call__(self, **record):
        if not self.path:
            return
        with self.lock, open(self.path, "a") as fh:
            fh.write(json.dumps(record) + "\n")


def _gauss_newton(obj, x, iters):
    r = obj.residual(x).ravel()
    best = float(r @ r)
    for _ in range(iters):
        if best < 1e-30:
            break
        step = np.linalg.lstsq(obj.jacobian(x), -r, rcond=None)[0]
        trial = x + step
        rt = obj.residual(trial).ravel()
        val = float(rt @ rt)
        if not val < best:
            break
        x, r, best = trial, rt, val
    return x


def _run_restart(problem, config, index, child_seed, log):
    rng = np.random.default_rng(child_seed)
    obj = _Objective(problem, config.psd_penalty_weight)
    a, b, c = problem.dims
    if config.init_scale is not None:
        sigma = config.init_scale
    else:
        norm = np.linalg.norm(obj.T)
        sigma = np.sqrt(norm / (np.sqrt(c * c * a * a) * b)) if norm > 0 else 1.0
    size = obj.n1 if obj.square else obj.n1 + c * c * b * b
    x = sigma * rng.standard_normal(size)
    tol = config.constraint_tol
    for stage in range(config.max_escalations + 1):
        res = minimize(obj, x, jac=True, method="L-BFGS-B",
                       options={"maxiter": config.max_iters, "ftol": 1e-20, "gtol": 1e-12})
        x = res.x
        viol = obj.max_violation(x, tol)
        r = obj.residual(x)
        log(restart=index, stage=stage, iteration=int(res.nit), weight=obj.weight,
            residual=float(np.linalg.norm(r)), max_violation=viol)
        if viol >= -tol or not obj.constrained:
            break
        obj.weight *= config.penalty_growth
    polished = _gauss_newton(obj, x, config.polish_iters)
    # the polish ignores constraints; keep it only if it does not worsen them
    if obj.max_violation(polished, tol) >= min(obj.max_violation(x, tol), 0.0):
        x = polished
    residual = float(np.linalg.norm(obj.residual(x)))
    log(restart=index, stage="polish", iteration=config.polish_iters,
        residual=residual, max_violation=obj.max_violation(x, tol))
    return _package(problem, obj, x, residual, config, index)


def _to_map(F, n, m):
    return LinearMapTensor(F.reshape(m, m, n, n).copy())


def _canonical_sign(F1, F2):
    flat = F1.ravel()
    k = int(np.argmax(np.abs(flat)))
    if flat[k] < 0:
        return -F1, -F2
    return F1, F2


def _package(problem, obj, x, residual, config, index):
    a, b, c = problem.dims
    F1, F2 = obj.split(x)
    F1, F2 = _canonical_sign(F1.copy(), F2.copy())
    if obj.square:
        F2 = F1
    lo1, pt1 = _violations(F1, a, b)
    lo2, pt2 = _violations(F2, b, c)
    violations = {
        "factor1_choi_min_eig": lo1,
        "factor1_pt_min_eig": pt1,
        "factor2_choi_min_eig": lo2,
        "factor2_pt_min_eig": pt2,
    }
    flagged = []
    for i, (lo, pt) in enumerate(((lo1, pt1), (lo2, pt2))):
        if problem.require_cp[i] or (obj.square and any(problem.require_cp)):
            flagged.append(lo)
        if problem.require_ccp[i] or (obj.square and any(problem.require_ccp)):
            flagged.append(pt)
    ok = residual <= config.residual_tol and all(v >= -config.constraint_tol for v in flagged)
    ok = ok and obj.max_violation(x, config.constraint_tol) >= -config.constraint_tol
    return FactorizationSolution(_to_map(F1, a, b), _to_map(F2, b, c), residual,
                                 violations, bool(ok), index)


def _key(sol):
    return np.concatenate([sol.factor1.to_numpy().ravel(), sol.factor2.to_numpy().ravel()])


def solve_factorization(problem, config=None, return_all=False):
    """Multi-start penalised least squares.

    Returns the distinct accepted solutions sorted by residual (an empty list
    only means nothing was found within the budget).  With ``return_all`` every
    restart's final point is returned instead, accepted or not.
    """
    config = SolverConfig() if config is None else config
    log = _Logger(config.progress_log)
    seeds = np.random.SeedSequence(config.seed).spawn(config.restarts)
    tasks = list(enumerate(seeds))
    if config.n_jobs > 1:
        with ThreadPoolExecutor(config.n_jobs) as pool:
            results = list(pool.map(lambda t: _run_restart(problem, config, t[0], t[1], log), tasks))
    else:
        results = [_run_restart(problem, config, i, s, log) for i, s in tasks]
    results.sort(key=lambda s: (s.residual, s.restart))
    if return_all:
        return results
    distinct = []
    for sol in results:
        if not sol.accepted:
            continue
        key = _key(sol)
        if all(np.linalg.norm(key - _key(d)) > config.distinct_tol for d in distinct):
            distinct.append(sol)
    return distinct


# --------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class VerificationReport:
    is_positive_factor1: bool
    is_positive_factor2: bool
    is_ppt_factor1: bool
    is_ppt_factor2: bool
    residual: float
    residual_ok: bool

    def as_dict(self):
        return dict(self.__dict__)


def verify_solution(solution, target, tol=PSD_TOL, residual_tol=1e-8):
    """Re-check a solution from its tensors alone.

    ``is_positive_*`` means the factor's Choi matrix is PSD; ``is_ppt_*``
    additionally requires its partial transpose to be PSD.  Factors whose Choi
    matrix is not Hermitian fail both.
    """
    props = [channel_properties(f, tol) for f in (solution.factor1, solution.factor2)]
    res = composition_residual(solution.factor1, solution.factor2, target)
    residual = float(np.sqrt(res.value))
    return VerificationReport(
        props[0].is_cp,
        props[1].is_cp,
        props[0].is_ppt_map,
        props[1].is_ppt_map,
        residual,
        residual <= residual_tol,
    )
