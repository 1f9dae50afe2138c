"""Matrices transcribed cell-for-cell from the reference displays.

Nothing here is computed by the package; these are independent fixtures.
"""

from fractions import Fraction as F

H = F(1, 2)


def _sparse(n, cells, diag=None):
    M = [[F(0)] * n for _ in range(n)]
    for i, d in enumerate(diag or []):
        M[i][i] = F(d)
    for (i, j), v in cells.items():
        M[i][j] = F(v)
    return M


# x -> tr(x) I_4 - x/2, 16x16 Choi display
_hr_cells = {}
for p in (0, 5, 10, 15):
    for q in (0, 5, 10, 15):
        if p != q:
            _hr_cells[(p, q)] = -H
HALF_REDUCTION_CHOI = _sparse(
    16, _hr_cells, [H if i in (0, 5, 10, 15) else 1 for i in range(16)]
)

# transpose example: input and its image under id (x) transpose
MAX_ENT_INPUT = [[1, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0], [1, 0, 0, 1]]
MAX_ENT_PT = [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]

# Kronecker example
KRON_A = [[1, 2, 1], [2, 1, 2], [1, 2, 1]]
KRON_B = [[0, 1], [-1, 0]]
KRON_AB = [
    [0, 1, 0, 2, 0, 1],
    [-1, 0, -2, 0, -1, 0],
    [0, 2, 0, 1, 0, 1],
    [-2, 0, -1, 0, -1, 0],
    [0, 1, 0, 2, 0, 1],
    [-1, 0, -2, 0, -1, 0],
]
KRON_AT_B = [row[:] for row in KRON_AB]
KRON_A_BT = [
    [0, -1, 0, -2, 0, -1],
    [1, 0, 2, 0, 1, 0],
    [0, -2, 0, -1, 0, -1],
    [2, 0, 1, 0, 1, 0],
    [0, -1, 0, -2, 0, -1],
    [1, 0, 2, 0, 1, 0],
]

# two-qubit square-root example
C_ETA = [
    [F(17, 4), 0, 0, F(1, 9)],
    [0, 2, 0, 0],
    [0, 0, 2, 0],
    [F(1, 9), 0, 0, F(17, 4)],
]


def sqrt_example_map(X):
    """X -> [[2 x11 + x22/2, x12/3], [x21/3, 2 x22 + x11/2]]."""
    return [
        [2 * X[0][0] + H * X[1][1], F(1, 3) * X[0][1]],
        [F(1, 3) * X[1][0], 2 * X[1][1] + H * X[0][0]],
    ]


def diag_four_map(X):
    """X -> [[4 x11, x12], [x21, 4 x22]]."""
    return [[4 * X[0][0], X[0][1]], [X[1][0], 4 * X[1][1]]]


FOUR_ROOTS = [
    lambda X: [[2 * X[0][0], X[0][1]], [X[1][0], 2 * X[1][1]]],
    lambda X: [[2 * X[0][0], X[1][0]], [X[0][1], 2 * X[1][1]]],
    lambda X: [[2 * X[0][0], -X[0][1]], [-X[1][0], 2 * X[1][1]]],
    lambda X: [[2 * X[0][0], -X[1][0]], [-X[0][1], 2 * X[1][1]]],
]


def agkl_rho(a, t):
    a, t = F(a), F(t)
    cells = {(0, 7): t, (7, 0): t}
    for i, j in ((1, 4), (2, 5), (3, 6)):
        cells[(i, j)] = cells[(j, i)] = -1
    return _sparse(8, cells, [a, 1, 1 / a, 1, 1, 1 / a, 1, a])


def composite_choi_display(a, t):
    """The displayed 16x16 Choi matrix of the composite, cell by cell."""
    a, t = F(a), F(t)
    diag = [
        a * a + 1, a + 1 / a, 2, 2 * a,
        2, 2 / a, 1 + 1 / a, a + 1 / a,
        a + 1 / a, 1 + 1 / (a * a), 2 / a, 2,
        2 * a, 2, a + 1 / a, 1 + 1 / (a * a),
    ]
    cells = {}
    ones = [(0, 9), (1, 10), (2, 11), (4, 13), (5, 8), (5, 14), (6, 9), (6, 15),
            (7, 10), (8, 5), (9, 0), (9, 6), (10, 1), (10, 7), (11, 2), (13, 4),
            (14, 5), (15, 6)]
    for c in ones:
        cells[c] = F(1)
    for c in [(1, 12), (2, 13), (3, 14), (12, 1), (13, 2), (14, 3)]:
        cells[c] = -t
    return _sparse(16, cells, diag)


def choi3x3_display():
    cells = {}
    for i, j in ((0, 4), (0, 8), (4, 8), (1, 3), (2, 6), (5, 7)):
        cells[(i, j)] = cells[(j, i)] = 1
    return _sparse(9, cells, [1, 2, H, H, 1, 2, 2, H, 1])
