"""Per-iteration diagnostics and run reports shared by both solver loops.

A report row records the Newton-matrix diagnostics (kappa, zeta) of the
system solved at that iteration and the state reached after the update
(nu, centrality, residual norms).  Noisy runs add the tomography precision
actually used, the interiority precision budget, and the per-iteration
cost term.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class IterationDiagnostics:
    iteration: int
    nu: float
    centrality: float
    kappa: float
    zeta: float
    primal_res: float
    dual_res: float
    # quantum-simulation extras; None on classical rows
    delta_used: float | None = None
    delta_required: float | None = None
    cost_term: float | None = None

    def to_row(self) -> dict:
        row = {
            "iter": self.iteration,
            "nu": self.nu,
            "centrality": self.centrality,
            "kappa": self.kappa,
            "zeta": self.zeta,
            "primal_res": self.primal_res,
            "dual_res": self.dual_res,
        }
        if self.delta_used is not None:
            row["delta_used"] = self.delta_used
            row["delta_required"] = self.delta_required
            row["cost_term"] = self.cost_term
        return row


# status values a run can end with
STATUS_CONVERGED = "converged"
STATUS_MAX_ITERS = "max_iterations"
STATUS_INTERIORITY_LOST = "interiority_lost"
STATUS_SINGULAR = "singular_system"


@dataclass
class RunReport:
    """Outcome of one interior-point run, with partial data on failure."""

    algorithm: str                      # "classical" or "quantum_sim"
    converged: bool
    status: str
    sigma: float
    epsilon: float
    nu_initial: float
    nu_final: float
    iterations: int
    rank: int = 0                       # cone count r of the instance
    rows: list[IterationDiagnostics] = field(default_factory=list)
    x: np.ndarray | None = None
    y: np.ndarray | None = None
    s: np.ndarray | None = None
    primal_infeasibility: float = math.nan
    dual_infeasibility: float = math.nan
    matrix_norm2: float = math.nan      # ||A||_2 of the instance, for the bound
    failure_detail: str | None = None

    @property
    def kappa_max(self) -> float:
        return max((r.kappa for r in self.rows), default=math.nan)

    @property
    def zeta_max(self) -> float:
        return max((r.zeta for r in self.rows), default=math.nan)

    @property
    def delta_min(self) -> float:
        deltas = [r.delta_used for r in self.rows if r.delta_used is not None]
        return min(deltas) if deltas else math.nan

    def to_json(self, indent: int | None = None) -> str:
        doc = {
            "algorithm": self.algorithm,
            "converged": self.converged,
            "status": self.status,
            "sigma": self.sigma,
            "epsilon": self.epsilon,
            "nu_initial": self.nu_initial,
            "nu_final": self.nu_final,
            "iterations": self.iterations,
            "rank": self.rank,
            "rows": [r.to_row() for r in self.rows],
            "x": None if self.x is None else list(self.x),
            "y": None if self.y is None else list(self.y),
            "s": None if self.s is None else list(self.s),
            "primal_infeasibility": self.primal_infeasibility,
            "dual_infeasibility": self.dual_infeasibility,
            "matrix_norm2": self.matrix_norm2,
            "failure_detail": self.failure_detail,
        }
        return json.dumps(doc, indent=indent)
