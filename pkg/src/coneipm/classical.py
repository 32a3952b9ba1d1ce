"""Short-step interior-point loop with exact Newton steps.

Each iteration solves the Newton system targeting sigma * nu with
sigma = 1 - chi/sqrt(r) and takes the full step; the duality gap then
contracts by exactly sigma once the linear residuals have been absorbed
(they vanish after the first full step, since the constraints are
linear).  There is no line search and no corrector: the loop is the plain
short-step method, and a step that leaves the cone interior is an error,
not something to be damped away.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import newton
from .diagnostics import (
    STATUS_CONVERGED,
    STATUS_INTERIORITY_LOST,
    STATUS_MAX_ITERS,
    STATUS_SINGULAR,
    IterationDiagnostics,
    RunReport,
)
from .jordan import BlockVector, identity_element, spectral
from .socp import IpmState, SocpInstance, centrality, residuals


class InteriorityLost(RuntimeError):
    """An update pushed x or s out of the cone interior.

    For the exact method this signals a pathological instance or a bad
    initial scale; for the noisy method it signals a tomography precision
    too coarse for the current iterate (``delta_used`` is then set).
    """

    def __init__(self, which: str, block: int, eigenvalue: float,
                 delta_used: float | None = None):
        self.which = which
        self.block = block
        self.eigenvalue = float(eigenvalue)
        self.delta_used = delta_used
        msg = (f"{which} left the cone interior at block {block} "
               f"(min eigenvalue {self.eigenvalue:.3e})")
        if delta_used is not None:
            msg += f" after a noisy step with delta={delta_used:.3e}"
        super().__init__(msg)


@dataclass
class IpmConfig:
    """Knobs of the short-step loop.

    ``chi`` sets the centering rate sigma = 1 - chi/sqrt(r); 0.1 is the
    algorithmic value, 0.01 the conservative constant of the step-wise
    convergence analysis -- both are legitimate.  ``eta`` is the central-
    path proximity threshold used only for reporting.  ``tau`` scales the
    cold-start point x = s = tau*e; None picks max(1, ||b||_inf, ||c||_inf).
    ``max_iters`` None means a generous multiple of the geometric-decay
    iteration bound.
    """

    epsilon: float = 1e-6
    chi: float = 0.1
    max_iters: int | None = None
    tau: float | None = None
    eta: float = 0.01
    full_diagnostics: bool = True       # per-iteration SVD for kappa/zeta

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if not 0.0 < self.chi < 1.0:
            raise ValueError("chi must lie in (0, 1)")
        if self.tau is not None and self.tau <= 0:
            raise ValueError("tau must be positive")


def sigma_for(r: int, chi: float) -> float:
    return 1.0 - chi / math.sqrt(r)


def default_tau(inst: SocpInstance) -> float:
    return max(1.0,
               float(np.max(np.abs(inst.b), initial=0.0)),
               float(np.max(np.abs(inst.c), initial=0.0)))


def initial_point(inst: SocpInstance, tau: float) -> IpmState:
    """Cold start x = s = tau*e, y = 0 (interior but generally infeasible).

    The linear residuals it leaves behind sit on the Newton right-hand
    side and are wiped out by the first full step.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    e = identity_element(inst.structure)
    return IpmState(x=tau * e, y=np.zeros(inst.m_rows), s=tau * e)


def _worst_block(v: BlockVector):
    worst_idx, worst_lam = 0, math.inf
    for i in range(v.structure.rank):
        lam, _ = spectral(v.block(i))
        if lam < worst_lam:
            worst_idx, worst_lam = i, lam
    return worst_idx, worst_lam


def advance_state(inst: SocpInstance, state: IpmState,
                  dx: np.ndarray, dy: np.ndarray, ds: np.ndarray,
                  delta_used: float | None = None) -> IpmState:
    """Apply a (possibly perturbed) Newton step and enforce interiority."""
    new = IpmState(
        x=BlockVector(inst.structure, state.x.values + dx),
        y=state.y + dy,
        s=BlockVector(inst.structure, state.s.values + ds),
    )
    for name, vec in (("x", new.x), ("s", new.s)):
        block, lam = _worst_block(vec)
        if lam <= 0.0:
            raise InteriorityLost(name, block, lam, delta_used=delta_used)
    return new


def _diagnose(inst: SocpInstance, state: IpmState, iteration: int,
              kappa: float, zeta_val: float) -> IterationDiagnostics:
    primal, dual = residuals(inst, state)
    return IterationDiagnostics(
        iteration=iteration,
        nu=state.nu,
        centrality=centrality(state.x, state.s, state.nu),
        kappa=kappa,
        zeta=zeta_val,
        primal_res=float(np.linalg.norm(primal)),
        dual_res=float(np.linalg.norm(dual)),
    )


def step(inst: SocpInstance, state: IpmState, config: IpmConfig,
         iteration: int = 0):
    """One exact short-step update; returns (new state, diagnostics)."""
    sigma = sigma_for(inst.structure.rank, config.chi)
    system = newton.assemble(inst, state, sigma)
    dx, dy, ds = newton.solve(system)
    if config.full_diagnostics:
        kappa = newton.condition_number(system)
        zeta_val = newton.zeta(system.matrix)
    else:
        kappa = zeta_val = math.nan
    new_state = advance_state(inst, state, dx.values, dy, ds.values)
    return new_state, _diagnose(inst, new_state, iteration, kappa, zeta_val)


def iteration_bound(nu0: float, epsilon: float, sigma: float) -> int:
    """Iterations of exact geometric decay needed to bring nu0 below epsilon."""
    if nu0 <= epsilon:
        return 0
    return math.ceil(math.log(nu0 / epsilon) / (-math.log(sigma)))


def _finalize(inst, state, report: RunReport) -> RunReport:
    primal, dual = residuals(inst, state)
    report.nu_final = state.nu
    report.x = state.x.values.copy()
    report.y = state.y.copy()
    report.s = state.s.values.copy()
    report.primal_infeasibility = float(np.linalg.norm(primal))
    report.dual_infeasibility = float(np.linalg.norm(dual))
    report.matrix_norm2 = float(np.linalg.norm(inst.A, 2))
    return report


def run(inst: SocpInstance, config: IpmConfig | None = None) -> RunReport:
    """Drive the loop until nu <= epsilon; partial data kept on failure."""
    config = config or IpmConfig()
    sigma = sigma_for(inst.structure.rank, config.chi)
    tau = config.tau if config.tau is not None else default_tau(inst)
    state = initial_point(inst, tau)
    nu0 = state.nu
    max_iters = config.max_iters
    if max_iters is None:
        max_iters = 4 * iteration_bound(nu0, config.epsilon, sigma) + 50

    report = RunReport(
        algorithm="classical", converged=False, status=STATUS_MAX_ITERS,
        sigma=sigma, epsilon=config.epsilon, nu_initial=nu0,
        nu_final=nu0, iterations=0, rank=inst.structure.rank)
    if nu0 <= config.epsilon:
        report.converged = True
        report.status = STATUS_CONVERGED
        return _finalize(inst, state, report)

    for t in range(1, max_iters + 1):
        try:
            state, diag = step(inst, state, config, iteration=t)
        except InteriorityLost as exc:
            report.status = STATUS_INTERIORITY_LOST
            report.failure_detail = str(exc)
            break
        except newton.SingularNewtonSystem as exc:
            report.status = STATUS_SINGULAR
            report.failure_detail = str(exc)
            break
        report.rows.append(diag)
        report.iterations = t
        if state.nu <= config.epsilon:
            report.converged = True
            report.status = STATUS_CONVERGED
            break
    return _finalize(inst, state, report)
