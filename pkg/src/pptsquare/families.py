"""Parameterized state families and the (4, 2, 4) composite construction."""

from dataclasses import dataclass, field
from fractions import Fraction

from .channel import ChoiMatrix, LinearMapTensor, choi_of_map, compose, map_of_choi
from .matrix import RATIONAL, BipartiteState, DenseMatrix, exact_scalar, exact_zeros

FAMILIES = ("ones9", "choi3x3", "agkl")


def as_fraction(x):
    """Exact value of ``x``; floats go through their shortest decimal repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class StateFamily:
    name: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in FAMILIES:
            raise ValueError(f"unknown family {self.name!r}; choose from {FAMILIES}")
        params = {k: as_fraction(v) for k, v in self.params.items()}
        if self.name == "agkl":
            missing = {"a", "t"} - set(params)
            if missing:
                raise ValueError(f"agkl needs parameters {sorted(missing)}")
            if params["a"] == 0:
                raise ValueError("agkl requires a != 0")
        object.__setattr__(self, "params", params)

    @property
    def in_ppt_regime(self):
        """True inside ``0 < a < 1, |t| < a`` (agkl only)."""
        if self.name != "agkl":
            return None
        a, t = self.params["a"], self.params["t"]
        return 0 < a < 1 and abs(t) < a


@dataclass(frozen=True)
class FamilyState:
    """A family member with every tensor cut it is studied in."""

    family: StateFamily
    matrix: DenseMatrix
    cuts: tuple

    @property
    def state(self):
        """The state in its first (default) cut."""
        return BipartiteState(self.matrix, *self.cuts[0])

    def in_cut(self, dim_a, dim_b):
        if (dim_a, dim_b) not in self.cuts:
            raise ValueError(f"cut {(dim_a, dim_b)} is not annotated for {self.family.name}")
        return BipartiteState(self.matrix, dim_a, dim_b)


def _rational(entries):
    return DenseMatrix(entries, RATIONAL)


def ones9():
    arr = exact_zeros((9, 9))
    arr[...] = exact_scalar(1)
    return _rational(arr)


def choi3x3():
    half = Fraction(1, 2)
    diag = [1, 2, half, half, 1, 2, 2, half, 1]
    arr = exact_zeros((9, 9))
    for i, d in enumerate(diag):
        arr[i, i] = exact_scalar(d)
    for i, j in ((0, 4), (0, 8), (4, 8), (1, 3), (2, 6), (5, 7)):
        arr[i, j] = arr[j, i] = exact_scalar(1)
    return _rational(arr)


def agkl_matrix(a, t):
    """The 8x8 two-parameter matrix; PSD for ``0 < a <= 1`` and ``|t| <= a``."""
    a, t = as_fraction(a), as_fraction(t)
    if a == 0:
        raise ValueError("agkl requires a != 0")
    diag = [a, 1, 1 / a, 1, 1, 1 / a, 1, a]
    arr = exact_zeros((8, 8))
    for i, d in enumerate(diag):
        arr[i, i] = exact_scalar(d)
    arr[0, 7] = arr[7, 0] = exact_scalar(t)
    for i, j in ((1, 4), (2, 5), (3, 6)):
        arr[i, j] = arr[j, i] = exact_scalar(-1)
    return _rational(arr)


def family_state(family):
    """Exact rational member of a family, validated as a PSD state."""
    if isinstance(family, str):
        family = StateFamily(family)
    if family.name == "ones9":
        fs = FamilyState(family, ones9(), ((3, 3),))
    elif family.name == "choi3x3":
        fs = FamilyState(family, choi3x3(), ((3, 3),))
    else:
        p = family.params
        fs = FamilyState(family, agkl_matrix(p["a"], p["t"]), ((4, 2), (2, 4)))
    fs.state  # validates positivity
    return fs


@dataclass(frozen=True)
class Composite:
    phi1: LinearMapTensor
    phi2: LinearMapTensor
    composite: LinearMapTensor
    choi: ChoiMatrix


def build_composite(a, t):
    """``phi1`` reads the 8x8 matrix as a Choi matrix of ``M_4 -> M_2``,
    ``phi2`` as one of ``M_2 -> M_4``; the result holds ``phi2 o phi1``."""
    rho = agkl_matrix(a, t)
    phi1 = map_of_choi(ChoiMatrix(rho, 4, 2))
    phi2 = map_of_choi(ChoiMatrix(rho, 2, 4))
    comp = compose(phi2, phi1)
    return Composite(phi1, phi2, comp, choi_of_map(comp, role="phi2 o phi1"))
