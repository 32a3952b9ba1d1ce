"""Minimum-risk portfolio selection as a second-order cone program.

Pipeline: price CSV -> simple returns -> (mu, M) statistics -> cone
program over variables (t; x; slacks) minimizing t0 subject to
t_bar = M x, mu.x = R, optional extra equalities, optional inequalities
C x >= d handled through scalar slacks, and x >= 0.  The risk
sqrt(x' Sigma x) equals ||M x|| with Sigma = M'M, so the optimum puts t
on the boundary of its cone and t0 is the achieved risk.

M is oriented rows-by-epochs (T x m), which makes t_bar = M x live in
R^T and the cone for t a single Lorentz cone of dimension T.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from sklearn.base import BaseEstimator
from sklearn.exceptions import ConvergenceWarning
from sklearn.utils.validation import check_array, check_is_fitted

from .classical import IpmConfig, run
from .diagnostics import RunReport
from .jordan import ConeStructure
from .quantum import NoiseModel, run_quantum
from .socp import SocpInstance


@dataclass
class ReturnsDataset:
    """Per-epoch simple returns for a set of assets (rows = epochs)."""

    assets: list[str]
    epochs: list[str]
    returns: np.ndarray
    dropped_rows: int = 0

    def __post_init__(self):
        self.returns = np.asarray(self.returns, dtype=float)
        if self.returns.ndim != 2:
            raise ValueError("returns must be a T x m matrix")
        t, m = self.returns.shape
        if t < 2:
            raise ValueError("need at least 2 return epochs")
        if len(self.assets) != m or len(self.epochs) != t:
            raise ValueError("label lengths do not match the returns shape")
        if not np.all(np.isfinite(self.returns)):
            raise ValueError("returns contain non-finite entries")

    @property
    def n_epochs(self) -> int:
        return self.returns.shape[0]

    @property
    def n_assets(self) -> int:
        return self.returns.shape[1]


def ingest_csv(path) -> ReturnsDataset:
    """Load adjusted close prices and convert to simple returns.

    Expected layout: header row of asset names, first column a date
    label, remaining columns numeric prices.  Rows with any missing
    price are dropped (counted in ``dropped_rows`` and warned about);
    non-numeric cells and duplicate asset names are errors.
    """
    # check the raw header first: pandas silently renames duplicate
    # column names, which would hide a duplicated asset
    with open(path, "r", newline="") as fh:
        header = next(csv.reader(fh), None)
    if header is None or len(header) < 2:
        raise ValueError("price CSV needs a date column plus asset columns")
    assets = [str(c) for c in header[1:]]
    if len(set(assets)) != len(assets):
        raise ValueError("duplicate asset names in CSV header")
    frame = pd.read_csv(path)
    prices = frame.iloc[:, 1:].copy()
    for col in prices.columns:
        try:
            prices[col] = pd.to_numeric(prices[col])
        except (ValueError, TypeError) as exc:
            raise ValueError(
                f"non-numeric price cell in column {col!r}: {exc}") from exc
    keep = ~prices.isna().any(axis=1)
    dropped = int((~keep).sum())
    if dropped:
        warnings.warn(f"dropped {dropped} row(s) with missing prices",
                      stacklevel=2)
    prices = prices[keep]
    dates = frame.iloc[:, 0][keep].astype(str).tolist()
    if prices.shape[0] < 3:
        raise ValueError("need at least 3 complete price rows")
    values = prices.to_numpy(dtype=float)
    returns = values[1:] / values[:-1] - 1.0
    return ReturnsDataset(assets=assets, epochs=dates[1:], returns=returns,
                          dropped_rows=dropped)


def estimate(dataset: ReturnsDataset):
    """Mean vector, scaled deviation matrix, covariance (mu, M, Sigma).

    M has row t equal to (R(t) - mu) / sqrt(T - 1), so Sigma = M'M is
    the sample covariance with the T - 1 normalization.
    """
    returns = dataset.returns
    t = returns.shape[0]
    mu = returns.mean(axis=0)
    m_mat = (returns - mu) / np.sqrt(t - 1)
    sigma = m_mat.T @ m_mat
    return mu, m_mat, sigma


@dataclass
class PortfolioProblem:
    """Minimize portfolio risk at a required expected return.

    ``extra_eq = (A, b)`` adds rows A x = b (e.g. the budget row);
    ``extra_ineq = (C, d)`` adds C x >= d via slack variables.
    """

    mu: np.ndarray
    M: np.ndarray
    target_return: float
    extra_eq: tuple[np.ndarray, np.ndarray] | None = None
    extra_ineq: tuple[np.ndarray, np.ndarray] | None = None

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=float)
        self.M = np.asarray(self.M, dtype=float)
        if self.mu.ndim != 1 or self.M.ndim != 2:
            raise ValueError("mu must be a vector and M a matrix")
        if self.M.shape[1] != self.mu.size:
            raise ValueError("M column count must match mu length")
        self.target_return = float(self.target_return)
        if self.extra_eq is not None:
            a, b = (np.asarray(z, dtype=float) for z in self.extra_eq)
            if a.ndim != 2 or a.shape[1] != self.mu.size or a.shape[0] != b.size:
                raise ValueError("extra_eq shapes inconsistent with mu")
            self.extra_eq = (a, b)
        if self.extra_ineq is not None:
            c, d = (np.asarray(z, dtype=float) for z in self.extra_ineq)
            if c.ndim != 2 or c.shape[1] != self.mu.size or c.shape[0] != d.size:
                raise ValueError("extra_ineq shapes inconsistent with mu")
            self.extra_ineq = (c, d)

    @property
    def n_assets(self) -> int:
        return self.mu.size

    @property
    def sigma(self) -> np.ndarray:
        return self.M.T @ self.M

    def to_json(self) -> dict:
        blob = {
            "mu": self.mu.tolist(),
            "M": self.M.tolist(),
            "target_return": self.target_return,
        }
        if self.extra_eq is not None:
            blob["extra_eq"] = [self.extra_eq[0].tolist(),
                                self.extra_eq[1].tolist()]
        if self.extra_ineq is not None:
            blob["extra_ineq"] = [self.extra_ineq[0].tolist(),
                                  self.extra_ineq[1].tolist()]
        return blob

    @classmethod
    def from_json(cls, blob: dict) -> "PortfolioProblem":
        return cls(
            mu=np.asarray(blob["mu"], dtype=float),
            M=np.asarray(blob["M"], dtype=float),
            target_return=float(blob["target_return"]),
            extra_eq=tuple(np.asarray(z, dtype=float)
                           for z in blob["extra_eq"])
            if "extra_eq" in blob else None,
            extra_ineq=tuple(np.asarray(z, dtype=float)
                             for z in blob["extra_ineq"])
            if "extra_ineq" in blob else None,
        )


@dataclass
class SolutionMap:
    """Where each original quantity lives inside the cone program."""

    n_epochs: int
    n_assets: int
    n_slacks: int
    mu: np.ndarray
    M: np.ndarray
    target_return: float
    C: np.ndarray | None = None
    d: np.ndarray | None = None

    @property
    def t_slice(self) -> slice:
        return slice(0, self.n_epochs + 1)

    @property
    def x_slice(self) -> slice:
        t = self.n_epochs
        return slice(t + 1, t + 1 + self.n_assets)

    @property
    def slack_slice(self) -> slice:
        start = self.n_epochs + 1 + self.n_assets
        return slice(start, start + self.n_slacks)


def to_socp(prob: PortfolioProblem) -> tuple[SocpInstance, SolutionMap]:
    """Lift the portfolio problem to canonical cone form.

    Variables are ordered (t0, t_bar, x, slacks); cones are one Lorentz
    cone of dimension T for t plus nonnegative scalars for each x_i and
    each slack.  Rows: -t_bar + M x = 0 (T rows), mu.x = R, any extra
    equalities, then C x - slack = d.
    """
    t_epochs, m = prob.M.shape
    mu = prob.mu
    if prob.target_return < mu.min() or prob.target_return > mu.max():
        warnings.warn(
            "target return outside [min mu, max mu]; the instance is "
            "likely infeasible", stacklevel=2)
    n_extra = prob.extra_eq[0].shape[0] if prob.extra_eq is not None else 0
    k = prob.extra_ineq[0].shape[0] if prob.extra_ineq is not None else 0
    n_cols = (t_epochs + 1) + m + k
    n_rows = t_epochs + 1 + n_extra + k

    a = np.zeros((n_rows, n_cols))
    b = np.zeros(n_rows)
    x_cols = slice(t_epochs + 1, t_epochs + 1 + m)
    # -t_bar + M x = 0
    a[:t_epochs, 1:t_epochs + 1] = -np.eye(t_epochs)
    a[:t_epochs, x_cols] = prob.M
    # mu.x = R
    a[t_epochs, x_cols] = mu
    b[t_epochs] = prob.target_return
    row = t_epochs + 1
    if n_extra:
        a[row:row + n_extra, x_cols] = prob.extra_eq[0]
        b[row:row + n_extra] = prob.extra_eq[1]
        row += n_extra
    if k:
        a[row:, x_cols] = prob.extra_ineq[0]
        a[row:, t_epochs + 1 + m:] = -np.eye(k)
        b[row:] = prob.extra_ineq[1]

    c = np.zeros(n_cols)
    c[0] = 1.0
    structure = ConeStructure((t_epochs,) + (0,) * (m + k))
    inst = SocpInstance(structure=structure, A=a, b=b, c=c)
    smap = SolutionMap(
        n_epochs=t_epochs, n_assets=m, n_slacks=k, mu=mu.copy(),
        M=prob.M.copy(), target_return=prob.target_return,
        C=None if not k else prob.extra_ineq[0].copy(),
        d=None if not k else prob.extra_ineq[1].copy())
    return inst, smap


@dataclass
class PortfolioSolution:
    """Extracted portfolio with its achieved risk/return and checks."""

    weights: np.ndarray
    risk: float
    expected_return: float
    t0: float
    boundary_gap: float
    tight: bool
    slacks: np.ndarray = field(default_factory=lambda: np.zeros(0))
    slack_residual: float = 0.0
    min_weight: float = 0.0


def extract_solution(report: RunReport | np.ndarray, smap: SolutionMap,
                     epsilon: float | None = None) -> PortfolioSolution:
    """Pull the portfolio out of a solved cone program.

    At the optimum t0 should sit on its cone boundary (t0 = ||M x||); a
    gap beyond 100 * epsilon is flagged via ``tight = False`` rather
    than raised, since noisy runs legitimately land slightly off.
    """
    if isinstance(report, RunReport):
        if report.x is None:
            raise ValueError("report carries no solution vector")
        point = report.x
        if epsilon is None:
            epsilon = report.epsilon
    else:
        point = np.asarray(report, dtype=float)
        if epsilon is None:
            raise ValueError("epsilon required when passing a raw vector")
    x = point[smap.x_slice].copy()
    t0 = float(point[0])
    risk = float(np.linalg.norm(smap.M @ x))
    slacks = point[smap.slack_slice].copy()
    slack_residual = 0.0
    if smap.n_slacks:
        slack_residual = float(
            np.max(np.abs(smap.C @ x - smap.d - slacks)))
    gap = abs(t0 - risk)
    return PortfolioSolution(
        weights=x,
        risk=risk,
        expected_return=float(smap.mu @ x),
        t0=t0,
        boundary_gap=gap,
        tight=gap <= 100.0 * epsilon,
        slacks=slacks,
        slack_residual=slack_residual,
        min_weight=float(x.min()) if x.size else 0.0,
    )


class MarkowitzOptimizer(BaseEstimator):
    """Minimum-variance portfolio estimator over historical returns.

    ``fit`` takes a T x m matrix of per-epoch simple returns (not
    prices), solves the cone program at the requested target return,
    and exposes the allocation as ``weights_``.  With ``delta > 0`` the
    noisy solver is used instead of the exact one.

    Parameters
    ----------
    target_return : float or "mean"
        Required expected return; "mean" uses the average of the asset
        means, which is always attainable.
    budget : float or None
        If set, adds the constraint sum(x) = budget.
    epsilon : float
        Duality-gap convergence threshold.
    chi : float
        Centering-rate constant of the solver.
    delta, norm_delta, noise_mode, seed : noise model passthrough.
    """

    def __init__(self, target_return="mean", budget=1.0, epsilon=1e-6,
                 chi=0.1, delta=0.0, norm_delta=None, noise_mode="fixed",
                 seed=0, max_iters=None, tau=None):
        self.target_return = target_return
        self.budget = budget
        self.epsilon = epsilon
        self.chi = chi
        self.delta = delta
        self.norm_delta = norm_delta
        self.noise_mode = noise_mode
        self.seed = seed
        self.max_iters = max_iters
        self.tau = tau

    def fit(self, X, y=None):
        X = check_array(X, dtype=float, ensure_min_samples=2)
        dataset = ReturnsDataset(
            assets=[f"a{i}" for i in range(X.shape[1])],
            epochs=[str(t) for t in range(X.shape[0])],
            returns=X)
        mu, m_mat, _ = estimate(dataset)
        target = (float(np.mean(mu)) if self.target_return == "mean"
                  else float(self.target_return))
        extra_eq = None
        if self.budget is not None:
            extra_eq = (np.ones((1, X.shape[1])),
                        np.array([float(self.budget)]))
        problem = PortfolioProblem(mu=mu, M=m_mat, target_return=target,
                                   extra_eq=extra_eq)
        inst, smap = to_socp(problem)
        config = IpmConfig(epsilon=self.epsilon, chi=self.chi,
                           max_iters=self.max_iters, tau=self.tau)
        if self.delta > 0:
            model = NoiseModel(delta=self.delta, norm_delta=self.norm_delta,
                               seed=self.seed, mode=self.noise_mode)
            report = run_quantum(inst, config, model)
        else:
            report = run(inst, config)
        if not report.converged:
            warnings.warn(
                f"solver stopped without converging ({report.status})",
                ConvergenceWarning, stacklevel=2)
        solution = extract_solution(report, smap)
        self.problem_ = problem
        self.report_ = report
        self.solution_ = solution
        self.weights_ = solution.weights
        self.risk_ = solution.risk
        self.expected_return_ = solution.expected_return
        self.boundary_gap_ = solution.boundary_gap
        self.n_iter_ = report.iterations
        self.n_features_in_ = X.shape[1]
        return self

    def score(self, X, y=None):
        """Negative out-of-sample variance of the fitted allocation."""
        check_is_fitted(self, "weights_")
        X = check_array(X, dtype=float, ensure_min_samples=2)
        if X.shape[1] != self.n_features_in_:
            raise ValueError("asset count differs from the fitted data")
        realized = X @ self.weights_
        return -float(np.var(realized, ddof=1))
