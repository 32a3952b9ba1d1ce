"""Experiment harness: subsampled portfolio instances, noisy-vs-exact
comparison, condition-number tracking, power-law fits, plot data.

A suite draws random asset subsets and epoch windows from one dataset
(user CSV or the synthetic generator), solves each sampled instance
with the noisy method, and records the worst per-run values of kappa,
zeta and the finest tomography precision used.  Downstream fits of
kappa, 1/delta^2 and total modeled cost against instance size use
ordinary least squares on log-log points with a t-interval on the
slope; the cost fit drops the top 1% most expensive trials first.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .classical import IpmConfig, run
from .diagnostics import RunReport
from .portfolio import PortfolioProblem, ReturnsDataset, ingest_csv, \
    estimate, to_socp
from .quantum import NoiseModel, cost_estimate, run_quantum
from .synthetic import synthetic_dataset


@dataclass
class ExperimentSpec:
    """One suite: dataset, sampling policy, solver and noise settings.

    ``dataset`` is a price-CSV path; ``None`` generates a synthetic
    universe of ``pool_assets`` assets over ``pool_days`` days instead.
    Each trial samples ``n_assets`` columns and an epoch window whose
    length is uniform in ``window = [lo, hi]``.
    """

    dataset: str | None = None
    pool_assets: int = 50
    pool_days: int = 600
    correlation: float = 0.3
    n_assets: int = 10
    window: tuple[int, int] = (10, 60)
    epsilon: float = 1e-3
    chi: float = 0.1
    noise: dict = field(default_factory=dict)
    trials: int = 1
    seed: int = 0
    budget: float | None = 1.0
    compare_classical: bool = False

    def __post_init__(self):
        self.window = (int(self.window[0]), int(self.window[1]))
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.window[0] < 2 or self.window[0] > self.window[1]:
            raise ValueError("window must satisfy 2 <= lo <= hi")
        if self.n_assets < 2:
            raise ValueError("n_assets must be >= 2")

    def to_json(self) -> dict:
        blob = {k: getattr(self, k) for k in (
            "dataset", "pool_assets", "pool_days", "correlation",
            "n_assets", "epsilon", "chi", "noise", "trials", "seed",
            "budget", "compare_classical")}
        blob["window"] = list(self.window)
        return blob

    @classmethod
    def from_json(cls, blob: dict) -> "ExperimentSpec":
        data = dict(blob)
        if "window" in data:
            data["window"] = tuple(data["window"])
        return cls(**data)


@dataclass
class TrialRow:
    """Summary of one sampled instance."""

    trial: int
    n: int = 0
    r: int = 0
    n_assets: int = 0
    n_epochs: int = 0
    kappa_max: float = math.nan
    zeta_max: float = math.nan
    zeta_min: float = math.nan
    delta_min: float = math.nan
    iterations: int = 0
    converged: bool = False
    status: str = "error"
    cost: float | None = None
    classical_iterations: int | None = None
    error: str | None = None

    def to_row(self) -> dict:
        return {
            "trial": self.trial, "n": self.n, "r": self.r,
            "n_assets": self.n_assets, "n_epochs": self.n_epochs,
            "kappa_max": self.kappa_max, "zeta_max": self.zeta_max,
            "zeta_min": self.zeta_min, "delta_min": self.delta_min,
            "iterations": self.iterations,
            "converged": self.converged, "status": self.status,
            "cost": self.cost,
            "classical_iterations": self.classical_iterations,
            "error": self.error,
        }


@dataclass
class SuiteReport:
    """All trial rows plus full detail of the first successful run."""

    spec: ExperimentSpec
    rows: list[TrialRow] = field(default_factory=list)
    first_run: RunReport | None = None
    first_classical: RunReport | None = None

    @property
    def failures(self) -> int:
        return sum(1 for row in self.rows if not row.converged)

    @property
    def succeeded(self) -> list[TrialRow]:
        return [row for row in self.rows if row.converged]


def _trial_seed(seed: int, trial: int, stream: int) -> int:
    return int(np.random.SeedSequence([seed, trial, stream])
               .generate_state(1)[0])


def _sample_instance(dataset: ReturnsDataset, spec: ExperimentSpec,
                     rng: np.random.Generator):
    total_t, total_m = dataset.returns.shape
    m_pick = min(spec.n_assets, total_m)
    cols = np.sort(rng.choice(total_m, size=m_pick, replace=False))
    length = int(rng.integers(spec.window[0],
                              min(spec.window[1], total_t) + 1))
    start = int(rng.integers(0, total_t - length + 1))
    return dataset.returns[start:start + length, cols]


def run_suite(spec: ExperimentSpec) -> SuiteReport:
    """Run all trials; failures are recorded and the suite continues."""
    if spec.dataset is not None:
        dataset = ingest_csv(spec.dataset)
    else:
        dataset = synthetic_dataset(spec.pool_assets, spec.pool_days,
                                    seed=spec.seed,
                                    correlation=spec.correlation)
    report = SuiteReport(spec=spec)
    for trial in range(spec.trials):
        rng = np.random.default_rng([spec.seed, trial])
        row = TrialRow(trial=trial)
        try:
            sub = _sample_instance(dataset, spec, rng)
            mu = sub.mean(axis=0)
            m_mat = (sub - mu) / np.sqrt(sub.shape[0] - 1)
            extra_eq = None
            if spec.budget is not None:
                extra_eq = (np.ones((1, sub.shape[1])),
                            np.array([spec.budget]))
            prob = PortfolioProblem(mu=mu, M=m_mat,
                                    target_return=float(np.mean(mu)),
                                    extra_eq=extra_eq)
            inst, _ = to_socp(prob)
            config = IpmConfig(epsilon=spec.epsilon, chi=spec.chi)
            noise_kwargs = dict(spec.noise)
            noise_kwargs.setdefault("delta", 0.0)
            noise_kwargs["seed"] = _trial_seed(spec.seed, trial, 1)
            model = NoiseModel(**noise_kwargs)
            run_report = run_quantum(inst, config, model)

            row.n = inst.structure.n
            row.r = inst.structure.rank
            row.n_assets = sub.shape[1]
            row.n_epochs = sub.shape[0]
            row.kappa_max = run_report.kappa_max
            row.zeta_max = run_report.zeta_max
            row.zeta_min = min((d.zeta for d in run_report.rows),
                               default=math.nan)
            row.delta_min = run_report.delta_min
            row.iterations = run_report.iterations
            row.converged = run_report.converged
            row.status = run_report.status
            if (run_report.converged and row.delta_min
                    and not math.isnan(row.delta_min)):
                row.cost = cost_estimate(run_report, spec.epsilon, row.r,
                                         row.n).quantum
            if spec.compare_classical:
                cls_report = run(inst, config)
                row.classical_iterations = cls_report.iterations
                if report.first_classical is None and cls_report.converged:
                    report.first_classical = cls_report
            if report.first_run is None and run_report.converged:
                report.first_run = run_report
        except Exception as exc:  # noqa: BLE001 - trial isolation
            row.error = f"{type(exc).__name__}: {exc}"
            row.converged = False
            row.status = "error"
        report.rows.append(row)
    return report


@dataclass
class PowerLawFit:
    """y = a * x^b fitted on log-log points, with a 95% CI on b."""

    a: float
    b: float
    ci_low: float
    ci_high: float
    stderr: float
    r_squared: float
    n_points: int

    def to_json(self) -> dict:
        return {"a": self.a, "b": self.b, "ci_low": self.ci_low,
                "ci_high": self.ci_high, "stderr": self.stderr,
                "r_squared": self.r_squared, "n_points": self.n_points}


def fit_power_law(points) -> PowerLawFit:
    """Ordinary least squares on (log x, log y); CI from the slope's
    t-distribution."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be an iterable of (x, y) pairs")
    if pts.shape[0] < 3:
        raise ValueError("need at least 3 points")
    if np.any(pts <= 0):
        raise ValueError("power-law fit needs strictly positive values")
    lx, ly = np.log(pts[:, 0]), np.log(pts[:, 1])
    if np.allclose(lx, lx[0]):
        raise ValueError("degenerate fit: all x equal")
    n = pts.shape[0]
    res = stats.linregress(lx, ly)
    half = stats.t.ppf(0.975, n - 2) * res.stderr if n > 2 else 0.0
    if not math.isfinite(half):
        half = 0.0
    return PowerLawFit(
        a=float(math.exp(res.intercept)),
        b=float(res.slope),
        ci_low=float(res.slope - half),
        ci_high=float(res.slope + half),
        stderr=float(res.stderr),
        r_squared=float(res.rvalue ** 2),
        n_points=n,
    )


def measured_alpha(reports, burn: int = 2) -> float:
    """Decay constant alpha of the model nu_t ~ nu_0 (1 - alpha/sqrt(r))^t.

    Ordinary least squares on the pooled post-burn-in (t, log nu)
    trajectories of one or more runs over the same cone rank; an exact
    short-step run returns the centering constant chi to round-off.
    """
    if isinstance(reports, RunReport):
        reports = [reports]
    ranks = {rep.rank for rep in reports}
    if len(ranks) != 1 or 0 in ranks:
        raise ValueError("reports must share one positive cone rank")
    rank = ranks.pop()
    slopes = []
    for rep in reports:
        rows = [d for d in rep.rows if d.iteration >= burn]
        if len(rows) < 2:
            raise ValueError("not enough iterations past the burn-in")
        t = np.array([d.iteration for d in rows], dtype=float)
        ln = np.log([d.nu for d in rows])
        slopes.append(np.polyfit(t, ln, 1)[0])
    # separate fits per run: trajectories share a slope model but not
    # an intercept, so a single pooled regression would be biased
    slope = float(np.mean(slopes))
    return float((1.0 - math.exp(slope)) * math.sqrt(rank))


def trim_top_cost(points, fraction: float = 0.01):
    """Drop the top ``fraction`` of points by y before fitting."""
    pts = sorted(points, key=lambda p: p[1])
    drop = int(fraction * len(pts))
    return pts[:len(pts) - drop] if drop else pts


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)


def _safe_fit(points):
    try:
        return fit_power_law(points).to_json()
    except ValueError:
        return None


def emit_plots(report: SuiteReport, outdir) -> dict:
    """Write one CSV per figure plus a JSON summary; returns the summary.

    Figures: duality gap and tomography precision per iteration, kappa
    and zeta per iteration (both from the first successful run), then
    per-trial kappa, 1/delta^2 and modeled cost against instance size.
    """
    os.makedirs(outdir, exist_ok=True)
    first = report.first_run
    detail = first.rows if first is not None else []
    _write_csv(
        os.path.join(outdir, "gap_precision_vs_iteration.csv"),
        ["iter", "nu", "delta_used", "delta_required"],
        [[d.iteration, d.nu,
          "" if d.delta_used is None else d.delta_used,
          "" if d.delta_required is None else d.delta_required]
         for d in detail])
    _write_csv(
        os.path.join(outdir, "kappa_vs_iteration.csv"),
        ["iter", "kappa", "zeta"],
        [[d.iteration, d.kappa, d.zeta] for d in detail])

    ok = report.succeeded
    _write_csv(os.path.join(outdir, "kappa_vs_size.csv"),
               ["n", "kappa_max"],
               [[row.n, row.kappa_max] for row in ok])
    _write_csv(os.path.join(outdir, "precision_vs_size.csv"),
               ["n", "delta_min", "inv_delta_sq"],
               [[row.n, row.delta_min, 1.0 / row.delta_min ** 2]
                for row in ok
                if row.delta_min > 0 and not math.isnan(row.delta_min)])
    cost_rows = [row for row in ok if row.cost is not None]
    _write_csv(os.path.join(outdir, "complexity_vs_size.csv"),
               ["n", "r", "iterations", "cost"],
               [[row.n, row.r, row.iterations, row.cost]
                for row in cost_rows])

    kappas = np.array([row.kappa_max for row in ok
                       if not math.isnan(row.kappa_max)])
    zetas = [row.zeta_max for row in ok if not math.isnan(row.zeta_max)]
    delta_pts = [(row.n, 1.0 / row.delta_min ** 2) for row in ok
                 if row.delta_min and not math.isnan(row.delta_min)]
    cost_pts = trim_top_cost([(row.n, row.cost) for row in cost_rows])

    summary = {
        "trials": len(report.rows),
        "converged": len(ok),
        "failures": report.failures,
        "kappa_quantiles": (
            {q: float(np.quantile(kappas, float(q)))
             for q in ("0.5", "0.9", "0.99")} | {"max": float(kappas.max())}
            if kappas.size else None),
        "zeta_max": max(zetas) if zetas else None,
        "zeta_over_5": sum(1 for z in zetas if z > 5.0),
        "fits": {
            "kappa_vs_n": _safe_fit([(row.n, row.kappa_max) for row in ok
                                     if not math.isnan(row.kappa_max)]),
            "inv_delta_sq_vs_n": _safe_fit(delta_pts),
            "cost_vs_n": _safe_fit(cost_pts),
        },
    }
    with open(os.path.join(outdir, "summary.json"), "w") as handle:
        json.dump(summary, handle, indent=2, sort_keys=True)
    return summary
