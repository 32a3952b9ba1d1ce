"""SOCP instances in standard conic form, iterates and their health checks.

The primal problem is ``min c^T x  s.t.  A x = b, x in L`` over a product
of Lorentz cones; the dual is ``max b^T y  s.t.  A^T y + s = c, s in L``.
This module holds the problem data, the (x, y, s, nu) iterate, and the
monitoring quantities: duality gap, linear residuals, a Jordan-algebraic
centrality measure and a strict-feasibility check.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .jordan import (
    BlockVector,
    ConeStructure,
    _check_same_structure,
    identity_element,
    jordan_product,
    jordan_sqrt,
    min_eigenvalue,
)

# Residual tolerance in strict_feasibility_check is scale-invariant:
# tol * (1 + norm of the relevant data vector).
FEASIBILITY_RTOL = 1e-8


@dataclass
class SocpInstance:
    """Problem data (A, b, c) over a fixed cone structure.

    A must have full row rank; this is validated on construction so that
    Newton systems built from the instance are nonsingular for interior
    iterates.
    """

    structure: ConeStructure
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        self.b = np.asarray(self.b, dtype=float).reshape(-1)
        self.c = np.asarray(self.c, dtype=float).reshape(-1)
        N = self.structure.total_dim
        if self.A.shape[1] != N:
            raise ValueError(
                f"A has {self.A.shape[1]} columns, structure wants {N}")
        if self.b.size != self.A.shape[0]:
            raise ValueError(
                f"b has length {self.b.size}, A has {self.A.shape[0]} rows")
        if self.c.size != N:
            raise ValueError(f"c has length {self.c.size}, expected {N}")
        if np.linalg.matrix_rank(self.A) < self.A.shape[0]:
            raise ValueError("A is row-rank deficient")

    @property
    def m_rows(self) -> int:
        return self.A.shape[0]

    def to_json(self) -> str:
        """Serialize as {"dims", "A", "b", "c"} with A dense row-major."""
        return json.dumps({
            "dims": list(self.structure.dims),
            "A": self.A.tolist(),
            "b": self.b.tolist(),
            "c": self.c.tolist(),
        })

    @classmethod
    def from_json(cls, doc: str) -> "SocpInstance":
        data = json.loads(doc)
        return cls(ConeStructure(tuple(data["dims"])),
                   np.array(data["A"], dtype=float),
                   np.array(data["b"], dtype=float),
                   np.array(data["c"], dtype=float))


@dataclass
class IpmState:
    """Current primal-dual iterate (x, y, s) with its duality gap nu.

    ``nu`` is recomputed from x and s on construction, so it always equals
    x^T s / r.
    """

    x: BlockVector
    y: np.ndarray
    s: BlockVector
    nu: float = field(init=False)

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=float).reshape(-1)
        self.nu = duality_gap(self.x, self.s)


def duality_gap(x: BlockVector, s: BlockVector, r: int | None = None) -> float:
    """Duality gap nu = x^T s / r (r defaults to the structure's rank)."""
    _check_same_structure(x, s)
    if r is None:
        r = x.structure.rank
    return float(x.values @ s.values) / r


def residuals(inst: SocpInstance, state: IpmState):
    """Linear residuals (b - A x, c - s - A^T y) of the current iterate."""
    if state.x.structure.total_dim != inst.structure.total_dim:
        raise ValueError("state does not match instance dimensions")
    if state.y.size != inst.m_rows:
        raise ValueError(
            f"y has length {state.y.size}, instance has {inst.m_rows} rows")
    primal = inst.b - inst.A @ state.x.values
    dual = inst.c - state.s.values - inst.A.T @ state.y
    return primal, dual


def centrality(x: BlockVector, s: BlockVector, nu: float) -> float:
    """Distance-to-central-path measure ||Q_{x^{1/2}} s - nu e||.

    Zero exactly when x o s = nu e with x and s sharing a Jordan frame;
    requires x interior (the Jordan square root must exist).  The norm is
    the Euclidean norm of the concatenated coordinates.
    """
    if min_eigenvalue(x) <= 0:
        raise ValueError("centrality needs x strictly inside the cone")
    u = jordan_sqrt(x)
    # Q_u s = 2 u o (u o s) - (u o u) o s, and u o u = x.
    q_s = 2.0 * jordan_product(u, jordan_product(u, s)).values \
        - jordan_product(x, s).values
    e = identity_element(x.structure)
    return float(np.linalg.norm(q_s - nu * e.values))


@dataclass
class FeasibilityReport:
    """Outcome of strict_feasibility_check with the quantities inspected."""

    ok: bool
    min_eig_x: float
    min_eig_s: float
    primal_res_norm: float
    dual_res_norm: float
    primal_tol: float
    dual_tol: float
    violations: list[str]


def strict_feasibility_check(inst: SocpInstance, state: IpmState) -> FeasibilityReport:
    """True iff x and s are strictly interior and both residuals are small.

    Residual norms are compared against FEASIBILITY_RTOL * (1 + ||b||) and
    FEASIBILITY_RTOL * (1 + ||c||) respectively.
    """
    primal, dual = residuals(inst, state)
    p_norm = float(np.linalg.norm(primal))
    d_norm = float(np.linalg.norm(dual))
    p_tol = FEASIBILITY_RTOL * (1.0 + float(np.linalg.norm(inst.b)))
    d_tol = FEASIBILITY_RTOL * (1.0 + float(np.linalg.norm(inst.c)))
    eig_x = min_eigenvalue(state.x)
    eig_s = min_eigenvalue(state.s)
    violations = []
    if eig_x <= 0:
        violations.append("x not strictly interior")
    if eig_s <= 0:
        violations.append("s not strictly interior")
    if p_norm > p_tol:
        violations.append("primal residual too large")
    if d_norm > d_tol:
        violations.append("dual residual too large")
    return FeasibilityReport(
        ok=not violations,
        min_eig_x=eig_x,
        min_eig_s=eig_s,
        primal_res_norm=p_norm,
        dual_res_norm=d_norm,
        primal_tol=p_tol,
        dual_tol=d_tol,
        violations=violations,
    )
