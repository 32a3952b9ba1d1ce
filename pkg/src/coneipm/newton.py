"""Assembly and dense solution of the interior-point Newton system.

The system has the 3x3 block layout

    [ A        0     0      ] [dx]   [ b - A x              ]
    [ 0        A^T   I      ] [dy] = [ c - s - A^T y        ]
    [ Arw(s)   0     Arw(x) ] [ds]   [ sigma*nu*e - Arw(x)s ]

with the arrowhead blocks block-diagonal per cone.  The solver is dense
LU with partial pivoting plus iterative refinement; SVD-based condition
number and the block-encoding normalization zeta are provided as
diagnostics of the same matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .jordan import BlockVector, arrowhead, block_product, identity_element
from .socp import IpmState, SocpInstance


class SingularNewtonSystem(RuntimeError):
    """Newton matrix is singular or numerically rank deficient."""

    def __init__(self, smallest_pivot: float):
        self.smallest_pivot = float(smallest_pivot)
        super().__init__(
            f"Newton matrix is numerically singular "
            f"(smallest pivot {self.smallest_pivot:.3e})")


@dataclass
class NewtonLayout:
    """Slices of the stacked unknown (dx; dy; dz) inside the solution vector."""

    n_cols: int
    m_rows: int

    @property
    def dx(self) -> slice:
        return slice(0, self.n_cols)

    @property
    def dy(self) -> slice:
        return slice(self.n_cols, self.n_cols + self.m_rows)

    @property
    def ds(self) -> slice:
        return slice(self.n_cols + self.m_rows, 2 * self.n_cols + self.m_rows)


@dataclass
class NewtonSystem:
    matrix: np.ndarray
    rhs: np.ndarray
    layout: NewtonLayout
    structure: object  # ConeStructure of the originating instance

    @property
    def side(self) -> int:
        return self.matrix.shape[0]


def assemble(inst: SocpInstance, state: IpmState, sigma: float) -> NewtonSystem:
    """Build the Newton system at the current iterate with centering sigma."""
    if not 0.0 < sigma < 1.0:
        raise ValueError(f"sigma must lie in (0, 1), got {sigma}")
    structure = inst.structure
    N = structure.total_dim
    m = inst.m_rows
    side = m + 2 * N
    layout = NewtonLayout(n_cols=N, m_rows=m)

    M = np.zeros((side, side))
    M[:m, layout.dx] = inst.A
    M[m:m + N, layout.dy] = inst.A.T
    M[m:m + N, layout.ds] = np.eye(N)
    for i in range(structure.rank):
        sl = structure.block_slice(i)
        rows = slice(m + N + sl.start, m + N + sl.stop)
        M[rows, sl] = arrowhead(state.s.values[sl])
        M[rows, N + m + sl.start:N + m + sl.stop] = arrowhead(state.x.values[sl])

    e = identity_element(structure)
    rhs = np.empty(side)
    rhs[:m] = inst.b - inst.A @ state.x.values
    rhs[m:m + N] = inst.c - state.s.values - inst.A.T @ state.y
    for i in range(structure.rank):
        sl = structure.block_slice(i)
        rhs[m + N + sl.start:m + N + sl.stop] = (
            sigma * state.nu * e.values[sl]
            - block_product(state.x.values[sl], state.s.values[sl]))
    return NewtonSystem(matrix=M, rhs=rhs, layout=layout, structure=structure)


def solve(sys: NewtonSystem):
    """Solve the system by LU; returns (dx, dy, ds) split per the layout.

    One or two refinement sweeps keep the back-substitution residual at
    roundoff level even for ill-conditioned late-stage systems.  Raises
    :class:`SingularNewtonSystem` (carrying the smallest pivot) when the
    factorization reveals numerical rank deficiency.
    """
    M, rhs = sys.matrix, sys.rhs
    try:
        lu, piv = scipy.linalg.lu_factor(M)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise SingularNewtonSystem(0.0) from exc
    pivots = np.abs(np.diag(lu))
    if pivots.min() <= sys.side * np.finfo(float).eps * pivots.max():
        raise SingularNewtonSystem(pivots.min())

    delta = scipy.linalg.lu_solve((lu, piv), rhs)
    rhs_norm = np.linalg.norm(rhs)
    for _ in range(2):
        res = rhs - M @ delta
        if np.linalg.norm(res) <= 1e-12 * max(rhs_norm, 1e-300):
            break
        delta = delta + scipy.linalg.lu_solve((lu, piv), res)

    lay = sys.layout
    dx = BlockVector(sys.structure, delta[lay.dx])
    dy = delta[lay.dy].copy()
    ds = BlockVector(sys.structure, delta[lay.ds])
    return dx, dy, ds


def condition_number(sys_or_matrix) -> float:
    """Condition number sigma_max / sigma_min from a full SVD.

    Returns ``inf`` when the smallest singular value is zero.  The
    symmetrized matrix [[0, M], [M^T, 0]] has the same singular values, so
    this is simultaneously the raw and the symmetrized condition number.
    """
    M = getattr(sys_or_matrix, "matrix", sys_or_matrix)
    svals = np.linalg.svd(np.asarray(M, dtype=float), compute_uv=False)
    if svals[-1] == 0.0:
        return float("inf")
    return float(svals[0] / svals[-1])


def zeta(matrix: np.ndarray) -> float:
    """Block-encoding normalization min(||S||_F, s1(S)) / ||S||_2.

    Computed on S = matrix if already symmetric, otherwise on the
    symmetrization [[0, M], [M^T, 0]]; s1 is the maximum absolute row
    sum.  Always >= 1 for symmetric S since both numerators dominate the
    spectral norm.
    """
    M = np.atleast_2d(np.asarray(matrix, dtype=float))
    if not np.any(M):
        raise ValueError("zeta is undefined for the zero matrix")
    if M.shape[0] == M.shape[1] and np.array_equal(M, M.T):
        S = M
    else:
        S = np.block([[np.zeros((M.shape[0], M.shape[0])), M],
                      [M.T, np.zeros((M.shape[1], M.shape[1]))]])
    spectral_norm = np.linalg.norm(S, 2)
    frobenius = np.linalg.norm(S, "fro")
    s1 = np.abs(S).sum(axis=1).max()
    return float(min(frobenius, s1) / spectral_norm)
