"""Classically simulated noisy interior-point loop.

The Newton step is still solved exactly, but what reaches the iterate is
a reconstruction of it: the concatenated step (dx; dy; ds) is replaced by
a sample with a random direction error and a random norm-estimate error,
hard-bounded by ``2 * delta * ||step||``.  This reproduces the error
contract of state-tomography-plus-norm-estimation readout without any
state-vector simulation.  The per-iterate precision budget that keeps the
perturbed iterate interior is ``xi * lambda_min`` (the inverse-square-root
norm of the quadratic representation), and "adaptive" mode tightens delta
to that budget each iteration.  A per-iteration cost term mirrors the
``n * kappa * zeta / delta^2`` readout cost of the modeled hardware.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import newton
from .classical import (
    InteriorityLost,
    IpmConfig,
    _diagnose,
    _finalize,
    advance_state,
    default_tau,
    initial_point,
    iteration_bound,
    sigma_for,
)
from .diagnostics import (
    STATUS_CONVERGED,
    STATUS_INTERIORITY_LOST,
    STATUS_MAX_ITERS,
    STATUS_SINGULAR,
    RunReport,
)
from .jordan import BlockVector, min_eigenvalue
from .socp import IpmState, SocpInstance

MODE_FIXED = "fixed"
MODE_ADAPTIVE = "adaptive"

# adaptive-mode clamp: the interiority budget is an absolute step error
# while the noise contract is relative, so the normalized budget is kept
# away from the degenerate ends
DELTA_FLOOR = 1e-12
DELTA_CEIL = 0.5


@dataclass
class NoiseModel:
    """Tomography precision delta, norm-estimation precision, RNG seed.

    ``delta = 0`` makes every step exact, reproducing the classical loop
    bit for bit.  In ``adaptive`` mode ``delta`` acts as a cap and the
    precision actually used also honors the per-iterate interiority
    budget (with ``xi`` as its constant); ``norm_delta`` only applies in
    ``fixed`` mode, adaptive steps use one precision for both errors.
    ``joint`` applies the noise to the concatenated step; switch it off
    to perturb dx, dy, ds independently.
    """

    delta: float = 0.0
    norm_delta: float | None = None
    seed: int = 0
    mode: str = MODE_FIXED
    xi: float = 0.001
    joint: bool = True

    def __post_init__(self):
        if not 0.0 <= self.delta < 1.0:
            raise ValueError("delta must lie in [0, 1)")
        if self.norm_delta is None:
            self.norm_delta = self.delta
        if self.norm_delta < 0:
            raise ValueError("norm_delta must be non-negative")
        if self.mode not in (MODE_FIXED, MODE_ADAPTIVE):
            raise ValueError(f"unknown noise mode {self.mode!r}")
        if self.xi <= 0:
            raise ValueError("xi must be positive")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


def _noisy_sample(v: np.ndarray, delta: float, norm_delta: float,
                  rng: np.random.Generator) -> np.ndarray:
    norm = float(np.linalg.norm(v))
    if norm == 0.0 or (delta == 0.0 and norm_delta == 0.0):
        return v.copy()
    u = v / norm
    if delta > 0.0:
        g = rng.standard_normal(v.size)
        g_norm = float(np.linalg.norm(g))
        if g_norm > 0.0:
            u = u + (delta / g_norm) * g
            u = u / np.linalg.norm(u)
    lam = norm * (1.0 + rng.uniform(-norm_delta, norm_delta))
    sample = lam * u
    # hard error contract ||v_hat - v|| <= 2 delta ||v||
    bound = 2.0 * (delta if delta > 0.0 else norm_delta) * norm
    dev = sample - v
    dev_norm = float(np.linalg.norm(dev))
    if dev_norm > bound:
        sample = v + dev * (bound / dev_norm)
    return sample


def simulate_tomography(v: np.ndarray, model: NoiseModel,
                        rng: np.random.Generator | None = None) -> np.ndarray:
    """Reconstruct v as the modeled readout would: direction noise of
    magnitude <= delta, norm noise uniform in +-norm_delta, clipped to the
    relative error bound 2*delta."""
    if rng is None:
        rng = model.rng()
    return _noisy_sample(np.asarray(v, dtype=float), model.delta,
                         model.norm_delta, rng)


def required_precision(x: BlockVector, s: BlockVector,
                       xi: float = 0.001) -> tuple[float, float]:
    """Absolute step-error budgets (delta_x, delta_s) keeping interiority.

    Equal to xi / ||Q_v^{-1/2}||_2 for v in {x, s}; on a Lorentz-cone
    product that operator norm is the reciprocal of the smallest spectral
    value, so each budget is xi * lambda_min(v).
    """
    if xi <= 0:
        raise ValueError("xi must be positive")
    lam_x = min_eigenvalue(x)
    lam_s = min_eigenvalue(s)
    if lam_x <= 0 or lam_s <= 0:
        raise ValueError("precision budget needs strictly interior x and s")
    return xi * lam_x, xi * lam_s


def _normalized_budget(x, s, xi, step_norm: float) -> float:
    dx_budget, ds_budget = required_precision(x, s, xi)
    if step_norm == 0.0:
        return DELTA_CEIL
    rel = min(dx_budget, ds_budget) / (2.0 * step_norm)
    return min(max(rel, DELTA_FLOOR), DELTA_CEIL)


def quantum_step(inst: SocpInstance, state: IpmState, config: IpmConfig,
                 model: NoiseModel, rng: np.random.Generator | None = None,
                 iteration: int = 0):
    """One noisy step: exact solve, simulated readout, full update."""
    if rng is None:
        rng = model.rng()
    sigma = sigma_for(inst.structure.rank, config.chi)
    system = newton.assemble(inst, state, sigma)
    dx, dy, ds = newton.solve(system)
    if config.full_diagnostics:
        kappa = newton.condition_number(system)
        zeta_val = newton.zeta(system.matrix)
    else:
        kappa = zeta_val = math.nan

    step_vec = np.concatenate([dx.values, dy, ds.values])
    delta_required = _normalized_budget(
        state.x, state.s, model.xi, float(np.linalg.norm(step_vec)))
    if model.mode == MODE_ADAPTIVE:
        delta_used = min(model.delta, delta_required) if model.delta > 0 \
            else delta_required
        norm_delta = delta_used
    else:
        delta_used = model.delta
        norm_delta = model.norm_delta

    if model.joint:
        noisy = _noisy_sample(step_vec, delta_used, norm_delta, rng)
    else:
        lay = system.layout
        noisy = np.concatenate([
            _noisy_sample(step_vec[lay.dx], delta_used, norm_delta, rng),
            _noisy_sample(step_vec[lay.dy], delta_used, norm_delta, rng),
            _noisy_sample(step_vec[lay.ds], delta_used, norm_delta, rng),
        ])
    lay = system.layout
    new_state = advance_state(inst, state, noisy[lay.dx], noisy[lay.dy],
                              noisy[lay.ds], delta_used=delta_used)

    diag = _diagnose(inst, new_state, iteration, kappa, zeta_val)
    diag.delta_used = delta_used
    diag.delta_required = delta_required
    diag.cost_term = (
        iteration_cost(inst.structure.n, kappa, zeta_val, delta_used)
        if delta_used > 0 else math.inf)
    return new_state, diag


def run_quantum(inst: SocpInstance, config: IpmConfig | None = None,
                model: NoiseModel | None = None) -> RunReport:
    """Noisy counterpart of the classical run; deterministic per seed."""
    config = config or IpmConfig()
    model = model or NoiseModel()
    rng = model.rng()
    sigma = sigma_for(inst.structure.rank, config.chi)
    tau = config.tau if config.tau is not None else default_tau(inst)
    state = initial_point(inst, tau)
    nu0 = state.nu
    max_iters = config.max_iters
    if max_iters is None:
        max_iters = 4 * iteration_bound(nu0, config.epsilon, sigma) + 50

    report = RunReport(
        algorithm="quantum_sim", converged=False, status=STATUS_MAX_ITERS,
        sigma=sigma, epsilon=config.epsilon, nu_initial=nu0,
        nu_final=nu0, iterations=0, rank=inst.structure.rank)
    if nu0 <= config.epsilon:
        report.converged = True
        report.status = STATUS_CONVERGED
        return _finalize(inst, state, report)

    for t in range(1, max_iters + 1):
        try:
            state, diag = quantum_step(inst, state, config, model, rng,
                                       iteration=t)
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


def iteration_cost(n: int, kappa: float, zeta_val: float,
                   delta: float) -> float:
    """Single-iteration readout cost term n*kappa*zeta/delta^2 * log(kappa*zeta/delta)."""
    return n * kappa * zeta_val / delta ** 2 * math.log(kappa * zeta_val / delta)


@dataclass
class CostEstimate:
    """Runtime-model evaluation of a finished noisy run."""

    quantum: float
    classical: dict[float, float]       # omega -> cost
    kappa: float
    zeta: float
    delta: float
    iteration_factor: float             # sqrt(r) * log(n / epsilon)
    log_term: float                     # log(kappa * zeta / delta)
    inner_precision: float              # delta^2 / n^3 readout sub-precision
    degenerate: bool                    # log term vanished or went negative


def quantum_cost(r: int, n: int, epsilon: float, kappa: float,
                 zeta_val: float, delta: float) -> float:
    """Total modeled cost sqrt(r) log(n/eps) * (n kappa zeta / delta^2) log(kappa zeta / delta)."""
    return (math.sqrt(r) * math.log(n / epsilon)
            * (n * kappa * zeta_val / delta ** 2)
            * math.log(kappa * zeta_val / delta))


def classical_cost(r: int, n: int, epsilon: float, omega: float) -> float:
    """Comparator cost sqrt(r) n^omega log(n/eps) of the exact method."""
    return math.sqrt(r) * n ** omega * math.log(n / epsilon)


def cost_estimate(report: RunReport, epsilon: float, r: int, n: int,
                  omegas: tuple[float, ...] = (2.373, 3.0)) -> CostEstimate:
    """Evaluate the runtime model on a run's worst-case diagnostics.

    kappa and zeta are maxima over iterations, delta the minimum used;
    a noiseless run has no defined cost and raises.
    """
    delta = report.delta_min
    if not delta or math.isnan(delta):
        raise ValueError("cost undefined: run used delta = 0 (noiseless)")
    kappa = report.kappa_max
    zeta_val = report.zeta_max
    log_term = math.log(kappa * zeta_val / delta)
    return CostEstimate(
        quantum=quantum_cost(r, n, epsilon, kappa, zeta_val, delta),
        classical={w: classical_cost(r, n, epsilon, w) for w in omegas},
        kappa=kappa,
        zeta=zeta_val,
        delta=delta,
        iteration_factor=math.sqrt(r) * math.log(n / epsilon),
        log_term=log_term,
        inner_precision=delta ** 2 / n ** 3,
        degenerate=log_term <= 0.0,
    )
