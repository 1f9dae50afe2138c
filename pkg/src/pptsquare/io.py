"""JSON interchange for matrices, Choi matrices and maps.

Matrix files::

    {"rows": 2, "cols": 2, "backend": "rational",
     "entries": [[re, im], ...],                 # row-major floats, always present
     "entries_rational": [["p/q", "r/s"], ...],  # only for the rational backend
     "dimA": 1, "dimB": 2}                       # optional bipartite cut

Map files::

    {"inDim": n, "outDim": m, "backend": "float64" | "rational",
     "coeffs": c}   # c[k][l][i][j] is [re, im] (floats, or "p/q" strings)

Rational values are written as decimal integer strings ``"p/q"`` (or ``"p"``)
so they round-trip bit-exactly.
"""

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .channel import ChoiMatrix, LinearMapTensor
from .matrix import FLOAT64, RATIONAL, DenseMatrix, exact_parts, exact_scalar, exact_zeros


def _frac_str(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _exact_pair_str(x):
    re, im = exact_parts(x)
    return [_frac_str(re), _frac_str(im)]


def _parse_exact(pair):
    if isinstance(pair, (list, tuple)):
        re, im = pair
    else:
        re, im = pair, "0"
    return exact_scalar((str(re), str(im)))


def _float_pair(z):
    z = complex(z)
    return [z.real, z.imag]


def load_json(source):
    """Accept a path, a JSON string already parsed to a dict, or a file object."""
    if isinstance(source, dict):
        return source
    if hasattr(source, "read"):
        return json.load(source)
    return json.loads(Path(source).read_text())


def dump_json(obj, target=None):
    text = json.dumps(obj, indent=2)
    if target is None:
        return text
    if hasattr(target, "write"):
        target.write(text + "\n")
    else:
        Path(target).write_text(text + "\n")
    return text


def matrix_to_dict(M, dim_a=None, dim_b=None):
    M = M if isinstance(M, DenseMatrix) else DenseMatrix(M)
    out = {
        "rows": M.rows,
        "cols": M.cols,
        "backend": M.backend,
        "entries": [_float_pair(z) for z in M.to_numpy().astype(complex).flat],
    }
    if M.is_exact:
        out["entries_rational"] = [_exact_pair_str(x) for x in M.data.flat]
    if dim_a is not None:
        out["dimA"], out["dimB"] = int(dim_a), int(dim_b)
    return out


def matrix_from_dict(d):
    rows, cols = int(d["rows"]), int(d["cols"])
    backend = d.get("backend", FLOAT64)
    if backend == RATIONAL:
        flat = d.get("entries_rational")
        if flat is None:
            raise ValueError("rational matrix file lacks 'entries_rational'")
        arr = exact_zeros((rows * cols,))
        for idx, pair in enumerate(flat):
            arr[idx] = _parse_exact(pair)
        if len(flat) != rows * cols:
            raise ValueError("entry count does not equal rows * cols")
        return DenseMatrix(arr.reshape(rows, cols), RATIONAL)
    flat = d["entries"]
    if len(flat) != rows * cols:
        raise ValueError("entry count does not equal rows * cols")
    vals = np.array([complex(*p) if isinstance(p, (list, tuple)) else complex(p) for p in flat])
    if not np.any(vals.imag):
        vals = vals.real
    return DenseMatrix(vals.reshape(rows, cols), FLOAT64)


def read_matrix(source):
    """Return ``(matrix, (dimA, dimB) or None)``."""
    d = load_json(source)
    dims = (int(d["dimA"]), int(d["dimB"])) if "dimA" in d else None
    return matrix_from_dict(d), dims


def write_matrix(M, target=None, dim_a=None, dim_b=None):
    return dump_json(matrix_to_dict(M, dim_a, dim_b), target)


def choi_to_dict(choi):
    out = matrix_to_dict(choi.matrix, choi.dim_a, choi.dim_b)
    if choi.role:
        out["role"] = choi.role
    return out


def read_choi(source, in_dim=None, out_dim=None):
    d = load_json(source)
    M = matrix_from_dict(d)
    dim_a = in_dim if in_dim is not None else d.get("dimA")
    dim_b = out_dim if out_dim is not None else d.get("dimB")
    if dim_a is None or dim_b is None:
        raise ValueError("Choi file lacks dimA/dimB; pass the dimensions explicitly")
    return ChoiMatrix(M, int(dim_a), int(dim_b), d.get("role", ""))


def write_choi(choi, target=None):
    return dump_json(choi_to_dict(choi), target)


def map_to_dict(phi):
    if phi.is_exact:
        coeffs = np.empty(phi.coeffs.shape, dtype=object)
        for idx in np.ndindex(phi.coeffs.shape):
            coeffs[idx] = _exact_pair_str(phi.coeffs[idx])
    else:
        vals = phi.to_numpy().astype(complex)
        coeffs = np.empty(vals.shape, dtype=object)
        for idx in np.ndindex(vals.shape):
            coeffs[idx] = _float_pair(vals[idx])
    return {
        "inDim": phi.in_dim,
        "outDim": phi.out_dim,
        "backend": phi.backend,
        "coeffs": coeffs.tolist(),
    }


def map_from_dict(d):
    n, m = int(d["inDim"]), int(d["outDim"])
    backend = d.get("backend", FLOAT64)
    raw = d["coeffs"]
    shape = (m, m, n, n)
    if backend == RATIONAL:
        arr = exact_zeros(shape)
        for idx in np.ndindex(shape):
            arr[idx] = _parse_exact(_lookup(raw, idx))
        return LinearMapTensor(arr, RATIONAL)
    arr = np.zeros(shape, dtype=complex)
    for idx in np.ndindex(shape):
        leaf = _lookup(raw, idx)
        arr[idx] = complex(*leaf) if isinstance(leaf, (list, tuple)) else complex(leaf)
    if not np.any(arr.imag):
        arr = arr.real
    return LinearMapTensor(arr, FLOAT64)


def _lookup(nested, idx):
    try:
        for i in idx:
            nested = nested[i]
    except (IndexError, TypeError) as exc:
        raise ValueError(f"coefficient tensor does not match declared dimensions at {idx}") from exc
    return nested


def read_map(source):
    return map_from_dict(load_json(source))


def write_map(phi, target=None, **extra):
    d = map_to_dict(phi)
    d.update(extra)
    return dump_json(d, target)
